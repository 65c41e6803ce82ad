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
#include "mpgen/math.hpp"
#include "mpgen/scene.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mpgen {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();  // unit length
  double t_max = std::numeric_limits<double>::infinity();
};

struct Hit {
  double t = 0.0;
  int triangle = -1;  // index into TriangleMesh::triangles
  int face_id = -1;
  double u = 0.0, v = 0.0;  // barycentric
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool contains(const Aabb& b) const {
    return (lo.array() <= b.lo.array()).all() && (b.hi.array() <= hi.array()).all();
  }
  double surface_area() const {
    const Vec3 d = (hi - lo).cwiseMax(0.0);
    return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
  }
  bool operator==(const Aabb&) const = default;
};

Aabb triangle_bounds(const Triangle& tri);

/// Moller-Trumbore in double precision. Hits require 0 < t <= ray.t_max.
std::optional<Hit> intersect_triangle(const Triangle& tri, const Ray& ray);

struct BvhNode {
  Aabb box;
  int left = -1;   // interior: child indices
  int right = -1;
  int first = 0;   // leaf: range into the triangle permutation
  int count = 0;

  bool leaf() const { return count > 0; }
};

/// Bounding-volume hierarchy over a triangle mesh, built with 16-bin SAH
/// splits. Immutable after construction; queries are thread-safe.
class Bvh {
 public:
  static constexpr int kMaxLeafSize = 4;
  static constexpr int kBins = 16;
  static constexpr double kOcclusionEpsilon = 1e-6;

  explicit Bvh(const TriangleMesh& mesh);

  /// Nearest hit; ties in t resolve to the lower triangle index.
  std::optional<Hit> intersect(const Ray& ray) const;

  /// True iff the open segment (p, q), shortened by 1e-6*|q - p| at both ends,
  /// crosses a triangle whose facet is not listed in `ignore_faces`.
  bool occluded(const Vec3& p, const Vec3& q, std::span<const int> ignore_faces = {}) const;

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  const std::vector<int>& permutation() const { return order_; }
  std::size_t triangle_count() const { return tris_.size(); }

 private:
  struct Tri {
    Vec3 v0, e1, e2;
    int face_id;
    int index;
  };

  static constexpr int kMaxSahDepth = 48;

  int build(int first, int last, const std::vector<Aabb>& boxes, const std::vector<Vec3>& centroids,
            int depth);

  std::vector<BvhNode> nodes_;
  std::vector<int> order_;
  std::vector<Tri> tris_;  // in permutation order
};

struct RxPoint {
  int index = 0;  // j * nx + i
  Vec3 position = Vec3::Zero();
  bool outdoor = true;

  bool operator==(const RxPoint&) const = default;
};

/// Even-odd test; points within 1e-9 m of an edge count as inside.
bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p);

bool point_inside_building(const Scene& scene, const Vec3& p);

/// All nx*ny grid points in index order with their outdoor flag.
std::vector<RxPoint> filter_outdoor_receivers(const Scene& scene, const GridSpec& grid);
/// Single-threaded reference for filter_outdoor_receivers.
std::vector<RxPoint> filter_outdoor_receivers_serial(const Scene& scene, const GridSpec& grid);

}  // namespace mpgen
