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
#include "mpgen/geometry.hpp"
#include "mpgen/math.hpp"
#include "mpgen/scene.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace mpgen {

enum class PathType { los = 0, reflection = 1, diffraction = 2, scattering = 3 };

std::string_view to_string(PathType type);
std::optional<PathType> path_type_from_string(std::string_view name);

/// Azimuth in [-180, 180) from +x, elevation (zenith angle) in [0, 180] from +z.
struct AngleSpec {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  bool operator==(const AngleSpec&) const = default;
};

struct PropagationPath {
  PathType type = PathType::los;
  int order = 0;               // number of interactions
  std::vector<Vec3> vertices;  // tx, interaction points..., rx
  std::vector<int> faces;      // facet (or wall next to the edge) per interaction
  double length_m = 0.0;
  Complex gain;                // |gain|^2 = received / transmitted power, isotropic antennas
  double toa_s = 0.0;
  AngleSpec aod;
  AngleSpec aoa;

  double gain_db() const { return 20.0 * std::log10(std::abs(gain)); }
  bool operator==(const PropagationPath&) const = default;
};

AngleSpec direction_to_angles(const Vec3& d);

struct FresnelCoefficients {
  Complex te;
  Complex tm;
};

/// Plane-wave reflection coefficients at a half-space of relative
/// permittivity `eps` (Im(eps) <= 0), incidence angle from the normal.
FresnelCoefficients fresnel_coefficients(double theta_i_rad, Complex eps);

/// Single knife-edge excess loss J(nu) in dB; zero for nu <= -0.78.
double knife_edge_loss_db(double nu);

/// Diffuse single-bounce amplitude for a Lambertian facet of area `area_m2`.
double scattering_amplitude(double s, double wavelength_m, double area_m2, double cos_in,
                            double cos_out, double d_in, double d_out);

struct VerticalEdge {
  Vec2 xy;
  double height_m = 0.0;
  int building = -1;
  int wall_before = -1;  // facets meeting at the edge
  int wall_after = -1;
};

/// Everything the per-receiver tracer needs, built once per scene and shared
/// read-only across threads.
class PropagationScene {
 public:
  static constexpr double kFacetMargin = 1e-9;  // reflection points stay this far inside facets

  PropagationScene(const Scene& scene, const TraceConfig& cfg);

  const TriangleMesh& mesh() const { return mesh_; }
  const Bvh& bvh() const { return bvh_; }
  const std::vector<Facet>& facets() const { return mesh_.facets; }
  const std::vector<VerticalEdge>& edges() const { return edges_; }
  double wavelength() const { return wavelength_; }
  double frequency() const { return frequency_; }

  Complex permittivity(int facet) const { return permittivity_[static_cast<std::size_t>(facet)]; }
  double scattering_coeff(int facet) const { return scattering_[static_cast<std::size_t>(facet)]; }
  const Vec3& scatter_point(int facet) const { return scatter_point_[static_cast<std::size_t>(facet)]; }

  /// A path may go from facet a to facet b only if each has a point strictly
  /// in front of the other.
  bool can_follow(int a, int b) const {
    return reach_[static_cast<std::size_t>(a) * mesh_.facets.size() + static_cast<std::size_t>(b)] != 0;
  }

 private:
  TriangleMesh mesh_;
  Bvh bvh_;
  std::vector<VerticalEdge> edges_;
  std::vector<Complex> permittivity_;
  std::vector<double> scattering_;
  std::vector<Vec3> scatter_point_;
  std::vector<unsigned char> reach_;
  double frequency_;
  double wavelength_;
};

/// Successive mirror images of a source across facet sequences, pruned by
/// "source in front of the next facet" and facet mutual visibility.
struct ImageNode {
  int facet = -1;   // -1 for the root (the source itself)
  int parent = -1;
  int level = 0;
  Vec3 image = Vec3::Zero();
};

class ImageTree {
 public:
  ImageTree(const PropagationScene& ps, const Vec3& source, int max_depth);

  const std::vector<ImageNode>& nodes() const { return nodes_; }
  const Vec3& source() const { return nodes_.front().image; }
  int max_depth() const { return max_depth_; }

 private:
  void expand(const PropagationScene& ps, int node);

  std::vector<ImageNode> nodes_;
  int max_depth_;
};

Vec3 mirror_across(const Facet& facet, const Vec3& p);

/// Assembles a path from its vertex chain: length, ToA, angles and the
/// free-space factor (lambda / 4 pi L) e^{-j 2 pi L / lambda} times `factor`.
PropagationPath make_path(PathType type, std::vector<Vec3> vertices, std::vector<int> faces,
                          Complex factor, double wavelength_m);

std::optional<PropagationPath> trace_los(const PropagationScene& ps, const Vec3& tx, const Vec3& rx);

/// Image-method specular paths of 1..depth bounces.
std::vector<PropagationPath> enumerate_reflections(const PropagationScene& ps, const ImageTree& tree,
                                                   const Vec3& rx, int depth);
std::vector<PropagationPath> enumerate_reflections(const PropagationScene& ps, const Vec3& tx,
                                                   const Vec3& rx, int depth);

/// Checks one explicit facet sequence with the image method; used by both
/// the pruned enumeration and exhaustive audits.
std::optional<PropagationPath> reflect_sequence(const PropagationScene& ps, const Vec3& tx,
                                                const Vec3& rx, const std::vector<int>& sequence);

/// Vertical-edge knife-edge paths; empty whenever the direct path is clear.
std::vector<PropagationPath> trace_diffraction(const PropagationScene& ps, const Vec3& tx,
                                               const Vec3& rx);

/// One Lambertian candidate per facet with a positive scattering coefficient.
std::vector<PropagationPath> trace_scattering(const PropagationScene& ps, const Vec3& tx,
                                              const Vec3& rx);

struct TraceOptions {
  int max_reflection_depth = 3;
  bool enable_diffraction = true;
  bool enable_scattering = false;
  int n_paths = 5;
};

TraceOptions trace_options(const TraceConfig& cfg);

/// Strongest-first ordering: |gain| descending, then ToA, then path type.
void sort_paths(std::vector<PropagationPath>& paths);

/// All enabled mechanisms for one receiver, sorted and truncated to n_paths.
/// `tree` must be built from tx with max_depth >= opts.max_reflection_depth.
std::vector<PropagationPath> trace_receiver(const PropagationScene& ps, const ImageTree& tree,
                                            const Vec3& rx, const TraceOptions& opts);
std::vector<PropagationPath> trace_receiver(const PropagationScene& ps, const Vec3& tx,
                                            const Vec3& rx, const TraceOptions& opts);

}  // namespace mpgen
