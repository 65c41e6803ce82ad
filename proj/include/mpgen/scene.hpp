// SPDX-License-Identifier: Apache-2.0
//
// mpgen: urban RF multipath dataset generator
// Copyright (C) 2026 mpgen contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "mpgen/config.hpp"
#include "mpgen/material.hpp"
#include "mpgen/math.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mpgen {

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Building {
  int id = 0;
  std::vector<Vec2> footprint;  // simple polygon, counterclockwise, no closing vertex
  double height_m = 0.0;
  std::string material;

  bool operator==(const Building&) const = default;
};

struct GeoOrigin {
  double latitude = 0.0;
  double longitude = 0.0;
  bool operator==(const GeoOrigin&) const = default;
};

struct Scene {
  Bounds bounds;
  std::string ground_material = "concrete";
  std::vector<Building> buildings;
  std::optional<GeoOrigin> geo_origin;
  std::uint64_t seed = 0;
  MaterialTable materials;

  bool operator==(const Scene&) const = default;
};

enum class SurfaceKind { wall, roof, ground };

std::string_view to_string(SurfaceKind kind);

struct Triangle {
  Vec3 v0, v1, v2;
  int face_id = 0;    // index into TriangleMesh::facets
  int building = -1;  // -1 for ground
  std::string material;
  SurfaceKind kind = SurfaceKind::ground;

  Vec3 normal() const { return (v1 - v0).cross(v2 - v0).normalized(); }
  double area() const { return 0.5 * (v1 - v0).cross(v2 - v0).norm(); }
};

// One planar reflector: a wall quad, a roof polygon or the ground rectangle.
// The polygon is counterclockwise when seen from the front (normal) side.
struct Facet {
  int id = 0;
  SurfaceKind kind = SurfaceKind::ground;
  int building = -1;
  std::string material;
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;  // plane: normal . x = offset
  std::vector<Vec3> polygon;
  std::vector<Vec2> local;  // polygon in the (axis_u, axis_v) frame
  Vec3 axis_u = Vec3::UnitX();
  Vec3 axis_v = Vec3::UnitY();
  std::vector<int> triangles;
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  Vec2 project(const Vec3& p) const { return {axis_u.dot(p), axis_v.dot(p)}; }
  // True when p (assumed on the plane) lies inside the polygon at least
  // `margin` metres away from its boundary.
  bool contains_strictly(const Vec3& p, double margin) const;
};

struct TriangleMesh {
  std::vector<Triangle> triangles;
  std::vector<Facet> facets;
};

/// Throws SceneError when a Scene invariant is violated.
void validate_scene(const Scene& scene);

/// Deterministic block-grid city: one axis-aligned rectangular building per
/// occupied cell, at least 2 m from every cell border.
Scene generate_procedural_scene(const ProcGenParams& params, std::uint64_t seed,
                                const MaterialTable& materials);

/// GeoJSON FeatureCollection of Polygon features, projected about the
/// collection centroid (equirectangular, R = 6371 km).
Scene import_footprints(std::string_view geojson, const ProcGenParams& frame,
                        const MaterialTable& materials, std::uint64_t seed = 0);

TriangleMesh triangulate(const Scene& scene);

/// Ear clipping of a counterclockwise simple polygon; n-2 index triples.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& polygon);

double signed_area(const std::vector<Vec2>& polygon);
bool is_simple_polygon(const std::vector<Vec2>& polygon);

/// Writes scene.xml plus mesh/ground.ply and mesh/building_<i>.ply.
void export_scene(const Scene& scene, const std::filesystem::path& dir);
Scene import_scene(const std::filesystem::path& dir);

std::string scene_to_xml(const Scene& scene);
Scene scene_from_xml(std::string_view xml);

/// "proc_<seed>" for synthetic scenes, "<lat>_<lon>" for geo-referenced ones.
std::string scene_id(const Scene& scene);

}  // namespace mpgen
