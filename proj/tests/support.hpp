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

// Shared test fixtures: hand-rolled random generators, small constructed
// scenes and reference oracles. Oracles deliberately avoid the library's
// geometry and physics code; they only read plain Scene data.

#pragma once

#include "mpgen/config.hpp"
#include "mpgen/geometry.hpp"
#include "mpgen/math.hpp"
#include "mpgen/raytracer.hpp"
#include "mpgen/scene.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace testkit {

using mpgen::Complex;
using mpgen::Vec2;
using mpgen::Vec3;

inline constexpr double kC = 299792458.0;
inline constexpr double kEps0 = 8.8541878128e-12;
inline constexpr double kPi = 3.14159265358979323846;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  Vec3 unit() {
    for (;;) {
      const Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      const double n = v.norm();
      if (n > 1e-3 && n <= 1.0) return v / n;
    }
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline mpgen::Scene empty_scene(mpgen::Bounds bounds = {}) {
  mpgen::Scene s;
  s.bounds = bounds;
  s.materials = mpgen::default_materials(0.2);
  return s;
}

inline mpgen::Building rect_building(int id, double x0, double y0, double x1, double y1, double h,
                                     const std::string& material = "concrete") {
  return {id, {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, h, material};
}

inline mpgen::TraceConfig small_config(int nx, int ny, double spacing, double x0, double y0) {
  mpgen::TraceConfig cfg;
  cfg.rx_grid.nx = nx;
  cfg.rx_grid.ny = ny;
  cfg.rx_grid.spacing_m = spacing;
  cfg.rx_grid.origin_xy = {x0, y0};
  return cfg;
}

// Random scene with at most `max_facets` reflecting facets (ground included):
// convex triangles or quads scattered around the origin.
inline mpgen::Scene random_small_scene(Gen& g, int max_facets) {
  mpgen::Scene s = empty_scene({-40, -40, 40, 40});
  int facets = 1;
  const char* materials[] = {"concrete", "glass", "metal"};
  for (int id = 0;; ++id) {
    const int sides = g.integer(3, 4);
    if (facets + sides + 1 > max_facets) break;
    const Vec2 c(g.uniform(-25, 25), g.uniform(-25, 25));
    const double r = g.uniform(2.0, 6.0);
    const double phase = g.uniform(0, 2 * kPi);
    mpgen::Building b;
    b.id = id;
    for (int k = 0; k < sides; ++k) {
      const double a = phase + 2 * kPi * k / sides + g.uniform(-0.3, 0.3);
      b.footprint.emplace_back(c.x() + r * std::cos(a), c.y() + r * std::sin(a));
    }
    b.height_m = g.uniform(4, 25);
    b.material = materials[g.integer(0, 2)];
    bool clash = false;
    for (const auto& o : s.buildings) {
      Vec2 oc = Vec2::Zero();
      for (const auto& v : o.footprint) oc += v;
      oc /= static_cast<double>(o.footprint.size());
      if ((oc - c).norm() < 14.0) clash = true;
    }
    if (clash) continue;
    s.buildings.push_back(std::move(b));
    facets += sides + 1;
  }
  return s;
}

namespace oracle {

inline double wavelength(double f) { return kC / f; }

inline Complex permittivity(const mpgen::MaterialParams& m, double f) {
  return {m.eps_r, -m.conductivity_s_per_m / (2.0 * kPi * f * kEps0)};
}

// Snell-law form of the Fresnel equations: n = sqrt(eps), cos_t = sqrt(1 - sin^2 / eps).
inline Complex gamma_te(double theta, Complex eps) {
  const Complex n = std::sqrt(eps);
  const Complex cos_t = std::sqrt(1.0 - std::sin(theta) * std::sin(theta) / eps);
  const double ci = std::cos(theta);
  return (ci - n * cos_t) / (ci + n * cos_t);
}

inline Complex gamma_tm(double theta, Complex eps) {
  const Complex n = std::sqrt(eps);
  const Complex cos_t = std::sqrt(1.0 - std::sin(theta) * std::sin(theta) / eps);
  const double ci = std::cos(theta);
  return (n * ci - cos_t) / (n * ci + cos_t);
}

inline double knife_edge_db(double nu) {
  if (nu <= -0.78) return 0.0;
  return 6.9 + 20.0 * std::log10(std::sqrt((nu - 0.1) * (nu - 0.1) + 1.0) + nu - 0.1);
}

inline double friis_db(double d, double f) { return -20.0 * std::log10(4.0 * kPi * d / wavelength(f)); }

// --- ray / triangle --------------------------------------------------------

struct RayHit {
  double t = 0.0;
  int index = -1;
};

// Plane intersection followed by an edge-function inside test.
inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                          const Vec3& c, double t_max) {
  const Vec3 n = (b - a).cross(c - a);
  const double denom = n.dot(d);
  if (std::abs(denom) < 1e-14 * n.norm()) return std::nullopt;
  const double t = n.dot(a - o) / denom;
  if (!(t > 0.0) || t > t_max) return std::nullopt;
  const Vec3 p = o + t * d;
  const double e0 = (b - a).cross(p - a).dot(n);
  const double e1 = (c - b).cross(p - b).dot(n);
  const double e2 = (a - c).cross(p - c).dot(n);
  if (e0 < 0 || e1 < 0 || e2 < 0) return std::nullopt;
  return t;
}

inline std::optional<RayHit> brute_force_hit(const std::vector<mpgen::Triangle>& tris, const Vec3& o,
                                             const Vec3& d,
                                             double t_max = std::numeric_limits<double>::infinity()) {
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto t = ray_triangle(o, d, tris[i].v0, tris[i].v1, tris[i].v2, t_max);
    if (t && (!best || *t < best->t)) best = RayHit{*t, static_cast<int>(i)};
  }
  return best;
}

// --- planar reflectors rebuilt from the footprints ----------------------------

struct Plane {
  int id = 0;
  Vec3 n;
  Vec3 p0;
  std::vector<Vec3> poly;
  bool horizontal = false;
  std::string material;
  double dist(const Vec3& x) const { return n.dot(x - p0); }
};

// Facet order: ground, then per building its walls (edge k from vertex k to
// k+1) followed by its roof.
inline std::vector<Plane> planes_of(const mpgen::Scene& s) {
  std::vector<Plane> out;
  const auto& b = s.bounds;
  out.push_back({0, Vec3::UnitZ(), Vec3::Zero(),
                 {{b.xmin, b.ymin, 0}, {b.xmax, b.ymin, 0}, {b.xmax, b.ymax, 0}, {b.xmin, b.ymax, 0}},
                 true, s.ground_material});
  for (const auto& bld : s.buildings) {
    const auto& f = bld.footprint;
    const std::size_t m = f.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 a = f[k], c = f[(k + 1) % m];
      const Vec2 e = (c - a).normalized();
      const Vec3 n(e.y(), -e.x(), 0.0);
      out.push_back({static_cast<int>(out.size()), n, {a.x(), a.y(), 0},
                     {{a.x(), a.y(), 0}, {c.x(), c.y(), 0}, {c.x(), c.y(), bld.height_m}, {a.x(), a.y(), bld.height_m}},
                     false, bld.material});
    }
    Plane roof{static_cast<int>(out.size()), Vec3::UnitZ(), {f[0].x(), f[0].y(), bld.height_m}, {}, true, bld.material};
    for (const auto& v : f) roof.poly.emplace_back(v.x(), v.y(), bld.height_m);
    out.push_back(std::move(roof));
  }
  return out;
}

// Point on the plane strictly inside the polygon, `margin` away from edges.
inline bool inside(const Plane& pl, const Vec3& x, double margin) {
  int drop = 0;
  pl.n.cwiseAbs().maxCoeff(&drop);
  const int a = (drop + 1) % 3, b = (drop + 2) % 3;
  bool in = false;
  const std::size_t m = pl.poly.size();
  for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
    const Vec3& p = pl.poly[i];
    const Vec3& q = pl.poly[j];
    if ((p[b] > x[b]) != (q[b] > x[b])) {
      const double xc = p[a] + (x[b] - p[b]) / (q[b] - p[b]) * (q[a] - p[a]);
      if (x[a] < xc) in = !in;
    }
    const Vec3 e = q - p;
    const double t = std::clamp((x - p).dot(e) / e.squaredNorm(), 0.0, 1.0);
    if ((p + t * e - x).norm() <= margin) return false;
  }
  return in;
}

// Segment p-q blocked by any polygon not in `skip`, trimming 1e-6 of the
// length at both ends.
inline bool blocked(const std::vector<Plane>& planes, const Vec3& p, const Vec3& q,
                    std::initializer_list<int> skip) {
  const Vec3 d = q - p;
  for (const auto& pl : planes) {
    if (std::find(skip.begin(), skip.end(), pl.id) != skip.end()) continue;
    const double dp = pl.dist(p), dq = pl.dist(q);
    if ((dp > 0 && dq > 0) || (dp < 0 && dq < 0) || dp == dq) continue;
    const double t = dp / (dp - dq);
    if (t <= 1e-6 || t >= 1 - 1e-6) continue;
    if (inside(pl, p + t * d, 0.0)) return true;
  }
  return false;
}

struct Reflection {
  std::vector<int> faces;
  std::vector<Vec3> points;
  double length = 0.0;
  Complex gain;
};

// Every facet sequence of length 1..depth, no pruning.
inline std::vector<Reflection> exhaustive_reflections(const mpgen::Scene& s, double freq,
                                                      const Vec3& tx, const Vec3& rx, int depth) {
  const auto planes = planes_of(s);
  const int F = static_cast<int>(planes.size());
  const double lambda = wavelength(freq);
  std::vector<Reflection> out;
  for (int k = 1; k <= depth; ++k) {
    std::vector<int> seq(static_cast<std::size_t>(k), 0);
    for (;;) {
      std::vector<Vec3> img{tx};
      for (int f : seq) {
        const auto& pl = planes[static_cast<std::size_t>(f)];
        img.push_back(img.back() - 2.0 * pl.dist(img.back()) * pl.n);
      }
      std::vector<Vec3> pts(static_cast<std::size_t>(k + 2));
      pts.front() = tx;
      pts.back() = rx;
      bool ok = true;
      for (int i = k; i >= 1 && ok; --i) {
        const auto& pl = planes[static_cast<std::size_t>(seq[static_cast<std::size_t>(i - 1)])];
        const Vec3& from = pts[static_cast<std::size_t>(i + 1)];
        const Vec3& to = img[static_cast<std::size_t>(i)];
        const double a = pl.dist(from), b = pl.dist(to);
        if (!(a > 0 && b < 0)) {
          ok = false;
          break;
        }
        const Vec3 x = from + a / (a - b) * (to - from);
        if (!inside(pl, x, 1e-9)) ok = false;
        pts[static_cast<std::size_t>(i)] = x;
      }
      for (int i = 1; i <= k && ok; ++i) {
        const auto& pl = planes[static_cast<std::size_t>(seq[static_cast<std::size_t>(i - 1)])];
        if (!(pl.dist(pts[static_cast<std::size_t>(i - 1)]) > 0) ||
            !(pl.dist(pts[static_cast<std::size_t>(i + 1)]) > 0))
          ok = false;
      }
      for (int i = 0; i <= k && ok; ++i) {
        const int a = i >= 1 ? seq[static_cast<std::size_t>(i - 1)] : -1;
        const int b = i < k ? seq[static_cast<std::size_t>(i)] : -1;
        if (blocked(planes, pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i + 1)], {a, b}))
          ok = false;
      }
      if (ok) {
        Reflection r;
        r.faces = seq;
        r.points = pts;
        Complex factor = 1.0;
        for (int i = 1; i <= k; ++i) {
          const auto& pl = planes[static_cast<std::size_t>(seq[static_cast<std::size_t>(i - 1)])];
          const Vec3 in = (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(i - 1)]).normalized();
          const double theta = std::acos(std::min(1.0, std::abs(in.dot(pl.n))));
          const Complex eps = permittivity(s.materials.at(pl.material), freq);
          factor *= pl.horizontal ? gamma_tm(theta, eps) : gamma_te(theta, eps);
        }
        for (int i = 0; i <= k; ++i)
          r.length += (pts[static_cast<std::size_t>(i + 1)] - pts[static_cast<std::size_t>(i)]).norm();
        r.gain = lambda / (4 * kPi * r.length) * std::exp(Complex(0, -2 * kPi * r.length / lambda)) * factor;
        out.push_back(std::move(r));
      }
      int pos = k - 1;
      while (pos >= 0 && ++seq[static_cast<std::size_t>(pos)] == F) seq[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
  }
  return out;
}

// Crossing-number point-in-polygon with no tolerance.
inline bool crossing_inside(const std::vector<Vec2>& poly, const Vec2& p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    if ((poly[i].y() > p.y()) != (poly[j].y() > p.y()) &&
        p.x() < poly[i].x() + (p.y() - poly[i].y()) / (poly[j].y() - poly[i].y()) * (poly[j].x() - poly[i].x()))
      in = !in;
  }
  return in;
}

}  // namespace oracle
}  // namespace testkit
