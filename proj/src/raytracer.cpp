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

#include "mpgen/raytracer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mpgen {

namespace {

constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kReachTolerance = 1e-9;
constexpr double kGoldenTolerance = 1e-6;

Complex free_space(double length, double wavelength) {
  return std::polar(wavelength / (4.0 * kPi * length), wrap_phase(-2.0 * kPi * length / wavelength));
}

// Horizontal facets (ground, roofs) see the TM coefficient, walls the TE one.
Complex reflection_coefficient(const PropagationScene& ps, int facet, const Vec3& incoming) {
  const auto& f = ps.facets()[static_cast<std::size_t>(facet)];
  const double cos_i = std::min(1.0, std::abs(incoming.normalized().dot(f.normal)));
  const auto gamma = fresnel_coefficients(std::acos(cos_i), ps.permittivity(facet));
  return std::abs(f.normal.z()) > 0.5 ? gamma.tm : gamma.te;
}

// Validates the reflection chain points[0..k+1] against facets seq[0..k-1]
// and turns it into a path.
std::optional<PropagationPath> finish_reflection(const PropagationScene& ps,
                                                 std::vector<Vec3> points,
                                                 std::vector<int> seq) {
  const auto& facets = ps.facets();
  const std::size_t k = seq.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& f = facets[static_cast<std::size_t>(seq[i])];
    if (!(f.signed_distance(points[i]) > 0.0) || !(f.signed_distance(points[i + 2]) > 0.0))
      return std::nullopt;
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    std::array<int, 2> ignore{-1, -1};
    if (i >= 1) ignore[0] = seq[i - 1];
    if (i < k) ignore[1] = seq[i];
    if (ps.bvh().occluded(points[i], points[i + 1], ignore)) return std::nullopt;
  }
  Complex factor{1.0, 0.0};
  for (std::size_t i = 0; i < k; ++i)
    factor *= reflection_coefficient(ps, seq[i], points[i + 1] - points[i]);
  return make_path(PathType::reflection, std::move(points), std::move(seq), factor, ps.wavelength());
}

// Intersects the segment from `p` (in front of `f`) towards `image` (behind it)
// with the facet plane. Fails unless the crossing lies strictly inside the facet.
std::optional<Vec3> back_trace(const Facet& f, const Vec3& p, const Vec3& image) {
  const double dp = f.signed_distance(p);
  const double di = f.signed_distance(image);
  if (!(dp > 0.0) || !(di < 0.0)) return std::nullopt;
  const Vec3 x = p + (dp / (dp - di)) * (image - p);
  if (!f.contains_strictly(x, PropagationScene::kFacetMargin)) return std::nullopt;
  return x;
}

}  // namespace

std::string_view to_string(PathType type) {
  switch (type) {
    case PathType::los: return "los";
    case PathType::reflection: return "reflection";
    case PathType::diffraction: return "diffraction";
    case PathType::scattering: return "scattering";
  }
  return "?";
}

std::optional<PathType> path_type_from_string(std::string_view name) {
  for (auto t : {PathType::los, PathType::reflection, PathType::diffraction, PathType::scattering}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

AngleSpec direction_to_angles(const Vec3& d) {
  double az = std::atan2(d.y(), d.x()) * kRadToDeg + 0.0;  // + 0.0 folds -0 into +0
  if (az >= 180.0) az -= 360.0;
  const double el = std::acos(std::clamp(d.z(), -1.0, 1.0)) * kRadToDeg;
  return {az, el};
}

FresnelCoefficients fresnel_coefficients(double theta_i_rad, Complex eps) {
  const double c = std::cos(theta_i_rad);
  const double s2 = std::sin(theta_i_rad) * std::sin(theta_i_rad);
  const Complex root = std::sqrt(eps - s2);
  return {(c - root) / (c + root), (eps * c - root) / (eps * c + root)};
}

double knife_edge_loss_db(double nu) {
  if (nu <= -0.78) return 0.0;
  const double x = nu - 0.1;
  return 6.9 + 20.0 * std::log10(std::sqrt(x * x + 1.0) + x);
}

double scattering_amplitude(double s, double wavelength_m, double area_m2, double cos_in,
                            double cos_out, double d_in, double d_out) {
  return s * (wavelength_m / (4.0 * kPi)) *
         std::sqrt(area_m2 * std::max(0.0, cos_in) * std::max(0.0, cos_out) / kPi) / (d_in * d_out);
}

PropagationScene::PropagationScene(const Scene& scene, const TraceConfig& cfg)
    : mesh_(triangulate(scene)),
      bvh_(mesh_),
      frequency_(cfg.carrier_frequency_hz),
      wavelength_(cfg.wavelength_m()) {
  MaterialTable materials = scene.materials;
  for (const auto& [name, m] : cfg.materials) materials[name] = m;

  const auto& facets = mesh_.facets;
  const std::size_t n = facets.size();
  permittivity_.reserve(n);
  scattering_.reserve(n);
  scatter_point_.reserve(n);
  for (const auto& f : facets) {
    const auto it = materials.find(f.material);
    if (it == materials.end())
      throw std::invalid_argument("facet material '" + f.material + "' is undefined");
    permittivity_.push_back(it->second.permittivity(frequency_));
    scattering_.push_back(it->second.scattering_coeff);

    // Non-convex roofs can have their centroid outside the polygon; fall back
    // to the centroid of the largest triangle.
    Vec3 point = f.centroid;
    if (!f.contains_strictly(point, kFacetMargin)) {
      double best = -1.0;
      for (const int t : f.triangles) {
        const auto& tri = mesh_.triangles[static_cast<std::size_t>(t)];
        if (tri.area() > best) {
          best = tri.area();
          point = (tri.v0 + tri.v1 + tri.v2) / 3.0;
        }
      }
    }
    scatter_point_.push_back(point);
  }

  reach_.assign(n * n, 0);
  auto any_in_front = [](const Facet& of, const Facet& plane) {
    return std::any_of(of.polygon.begin(), of.polygon.end(),
                       [&](const Vec3& p) { return plane.signed_distance(p) > kReachTolerance; });
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      reach_[a * n + b] = any_in_front(facets[a], facets[b]) && any_in_front(facets[b], facets[a]);
    }
  }

  // Vertical edges, one per footprint vertex; walls are emitted per building
  // in footprint order right after the facets of the previous building.
  int wall_base = 1;  // facet 0 is the ground
  for (const auto& bld : scene.buildings) {
    const int m = static_cast<int>(bld.footprint.size());
    for (int v = 0; v < m; ++v) {
      VerticalEdge e;
      e.xy = bld.footprint[static_cast<std::size_t>(v)];
      e.height_m = bld.height_m;
      e.building = bld.id;
      e.wall_before = wall_base + (v + m - 1) % m;
      e.wall_after = wall_base + v;
      edges_.push_back(e);
    }
    wall_base += m + 1;  // walls plus roof
  }
}

Vec3 mirror_across(const Facet& facet, const Vec3& p) {
  return p - 2.0 * facet.signed_distance(p) * facet.normal;
}

ImageTree::ImageTree(const PropagationScene& ps, const Vec3& source, int max_depth)
    : max_depth_(max_depth) {
  nodes_.push_back({-1, -1, 0, source});
  if (max_depth > 0) expand(ps, 0);
}

void ImageTree::expand(const PropagationScene& ps, int node) {
  const ImageNode parent = nodes_[static_cast<std::size_t>(node)];
  const auto& facets = ps.facets();
  for (const auto& g : facets) {
    if (g.id == parent.facet) continue;
    if (parent.facet >= 0 && !ps.can_follow(parent.facet, g.id)) continue;
    if (!(g.signed_distance(parent.image) > 0.0)) continue;
    nodes_.push_back({g.id, node, parent.level + 1, mirror_across(g, parent.image)});
    if (parent.level + 1 < max_depth_) expand(ps, static_cast<int>(nodes_.size()) - 1);
  }
}

PropagationPath make_path(PathType type, std::vector<Vec3> vertices, std::vector<int> faces,
                          Complex factor, double wavelength_m) {
  PropagationPath path;
  path.type = type;
  path.order = static_cast<int>(vertices.size()) - 2;
  double length = 0.0;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) length += (vertices[i + 1] - vertices[i]).norm();
  path.length_m = length;
  path.toa_s = length / kSpeedOfLight;
  path.gain = free_space(length, wavelength_m) * factor;
  path.aod = direction_to_angles((vertices[1] - vertices[0]).normalized());
  const std::size_t n = vertices.size();
  path.aoa = direction_to_angles((vertices[n - 2] - vertices[n - 1]).normalized());
  path.vertices = std::move(vertices);
  path.faces = std::move(faces);
  return path;
}

std::optional<PropagationPath> trace_los(const PropagationScene& ps, const Vec3& tx, const Vec3& rx) {
  if (ps.bvh().occluded(tx, rx)) return std::nullopt;
  return make_path(PathType::los, {tx, rx}, {}, {1.0, 0.0}, ps.wavelength());
}

std::vector<PropagationPath> enumerate_reflections(const PropagationScene& ps, const ImageTree& tree,
                                                   const Vec3& rx, int depth) {
  std::vector<PropagationPath> out;
  if (depth < 1) return out;
  const auto& nodes = tree.nodes();
  const auto& facets = ps.facets();
  std::vector<Vec3> points;
  std::vector<int> seq;
  for (std::size_t idx = 1; idx < nodes.size(); ++idx) {
    const ImageNode& leaf = nodes[idx];
    if (leaf.level > depth) continue;
    if (!(facets[static_cast<std::size_t>(leaf.facet)].signed_distance(rx) > 0.0)) continue;

    const auto k = static_cast<std::size_t>(leaf.level);
    points.assign(k + 2, Vec3::Zero());
    seq.assign(k, -1);
    points[k + 1] = rx;
    points[0] = tree.source();
    bool ok = true;
    Vec3 p = rx;
    for (int cur = static_cast<int>(idx); cur > 0; cur = nodes[static_cast<std::size_t>(cur)].parent) {
      const auto& node = nodes[static_cast<std::size_t>(cur)];
      const auto x = back_trace(facets[static_cast<std::size_t>(node.facet)], p, node.image);
      if (!x) {
        ok = false;
        break;
      }
      points[static_cast<std::size_t>(node.level)] = *x;
      seq[static_cast<std::size_t>(node.level - 1)] = node.facet;
      p = *x;
    }
    if (!ok) continue;
    if (auto path = finish_reflection(ps, points, seq)) out.push_back(std::move(*path));
  }
  return out;
}

std::vector<PropagationPath> enumerate_reflections(const PropagationScene& ps, const Vec3& tx,
                                                   const Vec3& rx, int depth) {
  if (depth < 1) return {};
  const ImageTree tree(ps, tx, depth);
  return enumerate_reflections(ps, tree, rx, depth);
}

std::optional<PropagationPath> reflect_sequence(const PropagationScene& ps, const Vec3& tx,
                                                const Vec3& rx, const std::vector<int>& sequence) {
  const auto& facets = ps.facets();
  const std::size_t k = sequence.size();
  if (k == 0) return std::nullopt;
  std::vector<Vec3> images(k + 1);
  images[0] = tx;
  for (std::size_t i = 0; i < k; ++i)
    images[i + 1] = mirror_across(facets[static_cast<std::size_t>(sequence[i])], images[i]);

  std::vector<Vec3> points(k + 2);
  points[0] = tx;
  points[k + 1] = rx;
  for (std::size_t i = k; i >= 1; --i) {
    const auto x = back_trace(facets[static_cast<std::size_t>(sequence[i - 1])], points[i + 1], images[i]);
    if (!x) return std::nullopt;
    points[i] = *x;
  }
  return finish_reflection(ps, std::move(points), sequence);
}

std::vector<PropagationPath> trace_diffraction(const PropagationScene& ps, const Vec3& tx,
                                               const Vec3& rx) {
  std::vector<PropagationPath> out;
  if (!ps.bvh().occluded(tx, rx)) return out;
  const double lambda = ps.wavelength();
  const Vec3 los = rx - tx;
  const double los_len = los.norm();
  for (const auto& edge : ps.edges()) {
    auto path_length = [&](double z) {
      const Vec3 d(edge.xy.x(), edge.xy.y(), z);
      return (tx - d).norm() + (d - rx).norm();
    };
    // Golden-section search over the edge height; path length is convex in z.
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = 0.0, hi = edge.height_m;
    double z1 = hi - kInvPhi * (hi - lo), z2 = lo + kInvPhi * (hi - lo);
    double f1 = path_length(z1), f2 = path_length(z2);
    while (hi - lo > kGoldenTolerance) {
      if (f1 <= f2) {
        hi = z2;
        z2 = z1;
        f2 = f1;
        z1 = hi - kInvPhi * (hi - lo);
        f1 = path_length(z1);
      } else {
        lo = z1;
        z1 = z2;
        f1 = f2;
        z2 = lo + kInvPhi * (hi - lo);
        f2 = path_length(z2);
      }
    }
    const Vec3 d(edge.xy.x(), edge.xy.y(), 0.5 * (lo + hi));

    const std::array<int, 2> ignore{edge.wall_before, edge.wall_after};
    if (ps.bvh().occluded(tx, d, ignore) || ps.bvh().occluded(d, rx, ignore)) continue;

    const double d1 = (d - tx).norm();
    const double d2 = (rx - d).norm();
    const double h = (d - tx).cross(los).norm() / los_len;
    const double nu = h * std::sqrt(2.0 * (d1 + d2) / (lambda * d1 * d2));
    const double loss = std::pow(10.0, -knife_edge_loss_db(nu) / 20.0);
    out.push_back(make_path(PathType::diffraction, {tx, d, rx}, {edge.wall_after}, {loss, 0.0}, lambda));
  }
  return out;
}

std::vector<PropagationPath> trace_scattering(const PropagationScene& ps, const Vec3& tx,
                                              const Vec3& rx) {
  std::vector<PropagationPath> out;
  const double lambda = ps.wavelength();
  for (const auto& f : ps.facets()) {
    const double s = ps.scattering_coeff(f.id);
    if (!(s > 0.0)) continue;
    const double st = f.signed_distance(tx), sr = f.signed_distance(rx);
    if (!(st > 0.0) || !(sr > 0.0)) continue;
    const Vec3& c = ps.scatter_point(f.id);
    const std::array<int, 1> ignore{f.id};
    if (ps.bvh().occluded(tx, c, ignore) || ps.bvh().occluded(c, rx, ignore)) continue;
    const double d1 = (c - tx).norm(), d2 = (rx - c).norm();
    const double amp = scattering_amplitude(s, lambda, f.area, st / d1, sr / d2, d1, d2);
    // make_path applies lambda / (4 pi L); divide it back out.
    const double free = lambda / (4.0 * kPi * (d1 + d2));
    out.push_back(make_path(PathType::scattering, {tx, c, rx}, {f.id}, {amp / free, 0.0}, lambda));
  }
  return out;
}

TraceOptions trace_options(const TraceConfig& cfg) {
  return {cfg.max_reflection_depth, cfg.enable_diffraction, cfg.enable_scattering,
          cfg.n_paths_retained};
}

void sort_paths(std::vector<PropagationPath>& paths) {
  std::stable_sort(paths.begin(), paths.end(), [](const PropagationPath& a, const PropagationPath& b) {
    const double ga = std::abs(a.gain), gb = std::abs(b.gain);
    if (ga != gb) return ga > gb;
    if (a.toa_s != b.toa_s) return a.toa_s < b.toa_s;
    return static_cast<int>(a.type) < static_cast<int>(b.type);
  });
}

std::vector<PropagationPath> trace_receiver(const PropagationScene& ps, const ImageTree& tree,
                                            const Vec3& rx, const TraceOptions& opts) {
  if (opts.max_reflection_depth > tree.max_depth())
    throw std::invalid_argument("image tree is shallower than the requested reflection depth");
  const Vec3& tx = tree.source();
  std::vector<PropagationPath> paths;
  if (auto los = trace_los(ps, tx, rx)) paths.push_back(std::move(*los));
  for (auto& p : enumerate_reflections(ps, tree, rx, opts.max_reflection_depth))
    paths.push_back(std::move(p));
  if (opts.enable_diffraction) {
    for (auto& p : trace_diffraction(ps, tx, rx)) paths.push_back(std::move(p));
  }
  if (opts.enable_scattering) {
    for (auto& p : trace_scattering(ps, tx, rx)) paths.push_back(std::move(p));
  }
  sort_paths(paths);
  if (paths.size() > static_cast<std::size_t>(std::max(0, opts.n_paths)))
    paths.resize(static_cast<std::size_t>(opts.n_paths));
  return paths;
}

std::vector<PropagationPath> trace_receiver(const PropagationScene& ps, const Vec3& tx,
                                            const Vec3& rx, const TraceOptions& opts) {
  const ImageTree tree(ps, tx, std::max(0, opts.max_reflection_depth));
  return trace_receiver(ps, tree, rx, opts);
}

}  // namespace mpgen
