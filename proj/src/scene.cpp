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

#include "mpgen/scene.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <random>

namespace mpgen {

namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kMetresPerLevel = 3.0;
constexpr double kDefaultHeightM = 10.0;
constexpr double kStreetMarginM = 2.0;

// Orientation of (a, b, c): > 0 counterclockwise.
double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool inside_closed_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  return orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0;
}

// Uniform double in [0, 1) from the top 53 bits; std distributions are
// implementation-defined and would break cross-platform reproducibility.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Drops repeated and collinear vertices (including a closing duplicate).
std::vector<Vec2> clean_ring(std::vector<Vec2> ring) {
  bool changed = true;
  while (changed && ring.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < ring.size() && ring.size() >= 3; ++i) {
      const Vec2& prev = ring[(i + ring.size() - 1) % ring.size()];
      const Vec2& cur = ring[i];
      const Vec2& next = ring[(i + 1) % ring.size()];
      const double scale = std::max((cur - prev).norm(), (next - cur).norm());
      if ((cur - prev).norm() <= 1e-9 ||
          std::abs(cross2(cur - prev, next - cur)) <= 1e-12 * scale * scale) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return ring;
}

// Sutherland-Hodgman clip against an axis-aligned rectangle.
std::vector<Vec2> clip_to_bounds(const std::vector<Vec2>& poly, const Bounds& b) {
  auto clip = [](const std::vector<Vec2>& in, auto inside, auto intersect) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2& cur = in[i];
      const Vec2& prev = in[(i + in.size() - 1) % in.size()];
      const bool cin = inside(cur), pin = inside(prev);
      if (cin) {
        if (!pin) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (pin) {
        out.push_back(intersect(prev, cur));
      }
    }
    return out;
  };
  auto along_x = [](double x) {
    return [x](const Vec2& p, const Vec2& q) {
      const double t = (x - p.x()) / (q.x() - p.x());
      return Vec2(x, p.y() + t * (q.y() - p.y()));
    };
  };
  auto along_y = [](double y) {
    return [y](const Vec2& p, const Vec2& q) {
      const double t = (y - p.y()) / (q.y() - p.y());
      return Vec2(p.x() + t * (q.x() - p.x()), y);
    };
  };
  std::vector<Vec2> out = poly;
  out = clip(out, [&](const Vec2& p) { return p.x() >= b.xmin; }, along_x(b.xmin));
  if (out.empty()) return out;
  out = clip(out, [&](const Vec2& p) { return p.x() <= b.xmax; }, along_x(b.xmax));
  if (out.empty()) return out;
  out = clip(out, [&](const Vec2& p) { return p.y() >= b.ymin; }, along_y(b.ymin));
  if (out.empty()) return out;
  out = clip(out, [&](const Vec2& p) { return p.y() <= b.ymax; }, along_y(b.ymax));
  return out;
}

double number_property(const nlohmann::json& props, const char* key, int feature) {
  const auto& v = props.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const auto s = v.get<std::string>();
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw SceneError(fmt::format("feature {}: property '{}' is not numeric", feature, key));
}

Facet make_facet(int id, SurfaceKind kind, int building, const std::string& material,
                 std::vector<Vec3> polygon, const Vec3& axis_u, const Vec3& axis_v) {
  Facet f;
  f.id = id;
  f.kind = kind;
  f.building = building;
  f.material = material;
  f.axis_u = axis_u;
  f.axis_v = axis_v;
  f.normal = axis_u.cross(axis_v);
  f.offset = f.normal.dot(polygon.front());
  f.polygon = std::move(polygon);
  for (const auto& p : f.polygon) f.local.push_back(f.project(p));

  // Area-weighted polygon centroid in the local frame.
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < f.local.size(); ++i) {
    const Vec2& p = f.local[i];
    const Vec2& q = f.local[(i + 1) % f.local.size()];
    const double c = cross2(p, q);
    a2 += c;
    cx += (p.x() + q.x()) * c;
    cy += (p.y() + q.y()) * c;
  }
  f.area = 0.5 * a2;
  f.centroid = f.axis_u * (cx / (3.0 * a2)) + f.axis_v * (cy / (3.0 * a2)) + f.normal * f.offset;
  return f;
}

}  // namespace

std::string_view to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::wall: return "wall";
    case SurfaceKind::roof: return "roof";
    case SurfaceKind::ground: return "ground";
  }
  return "?";
}

bool Facet::contains_strictly(const Vec3& p, double margin) const {
  const Vec2 q = project(p);
  bool inside = false;
  const std::size_t n = local.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = local[i];
    const Vec2& b = local[j];
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
    if ((a + t * ab - q).norm() <= margin) return false;
    if ((a.y() > q.y()) != (b.y() > q.y()) &&
        q.x() < (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

double signed_area(const std::vector<Vec2>& polygon) {
  double a2 = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i)
    a2 += cross2(polygon[i], polygon[(i + 1) % polygon.size()]);
  return 0.5 * a2;
}

bool is_simple_polygon(const std::vector<Vec2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((polygon[i] - polygon[(i + 1) % n]).norm() == 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Vec2 &a = polygon[i], &b = polygon[(i + 1) % n];
      const Vec2 &c = polygon[j], &d = polygon[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges may only share their common vertex: reject folds.
        const Vec2& shared = (j == i + 1) ? b : a;
        const Vec2& far1 = (j == i + 1) ? a : b;
        const Vec2& far2 = (j == i + 1) ? d : c;
        if (orient(far1, shared, far2) == 0 && (far1 - shared).dot(far2 - shared) > 0) return false;
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& polygon) {
  const int n = static_cast<int>(polygon.size());
  if (n < 3) throw SceneError("ear clipping needs at least 3 vertices");
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;

  std::vector<std::array<int, 3>> out;
  out.reserve(static_cast<std::size_t>(n - 2));
  while (idx.size() > 3) {
    const std::size_t m = idx.size();
    bool clipped = false;
    for (std::size_t k = 0; k < m; ++k) {
      const int ia = idx[(k + m - 1) % m], ib = idx[k], ic = idx[(k + 1) % m];
      const Vec2 &a = polygon[static_cast<std::size_t>(ia)], &b = polygon[static_cast<std::size_t>(ib)],
                 &c = polygon[static_cast<std::size_t>(ic)];
      if (orient(a, b, c) <= 0) continue;  // reflex or flat
      bool ear = true;
      for (const int other : idx) {
        if (other == ia || other == ib || other == ic) continue;
        const Vec2& p = polygon[static_cast<std::size_t>(other)];
        if (p == a || p == b || p == c) continue;
        if (inside_closed_triangle(a, b, c, p)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      out.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped) throw SceneError("ear clipping failed: polygon is not simple");
  }
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

void validate_scene(const Scene& scene) {
  const auto& b = scene.bounds;
  if (!(b.xmax > b.xmin && b.ymax > b.ymin)) throw SceneError("scene bounds are empty");
  for (const auto& [name, m] : scene.materials) {
    if (name != m.name) throw SceneError("material table key '" + name + "' does not match name");
    if (auto problem = check_material(m); !problem.empty())
      throw SceneError("material '" + name + "': " + problem);
  }
  if (!scene.materials.contains(scene.ground_material))
    throw SceneError("ground material '" + scene.ground_material + "' is undefined");
  for (const auto& bld : scene.buildings) {
    const auto where = fmt::format("building {}", bld.id);
    if (bld.footprint.size() < 3) throw SceneError(where + ": fewer than 3 vertices");
    for (const auto& v : bld.footprint) {
      if (!v.allFinite() || !b.contains(v)) throw SceneError(where + ": vertex outside bounds");
    }
    if (!(bld.height_m > 0.0) || !std::isfinite(bld.height_m))
      throw SceneError(where + ": height must be positive");
    if (!scene.materials.contains(bld.material))
      throw SceneError(where + ": material '" + bld.material + "' is undefined");
    if (!(signed_area(bld.footprint) > 0.0))
      throw SceneError(where + ": footprint is not counterclockwise");
    if (!is_simple_polygon(bld.footprint)) throw SceneError(where + ": footprint is not simple");
  }
}

Scene generate_procedural_scene(const ProcGenParams& params, std::uint64_t seed,
                                const MaterialTable& materials) {
  static const std::array<std::string, 3> kMaterials = {"concrete", "glass", "metal"};
  const int k = params.block_grid;
  if (k < 1) throw SceneError("block_grid must be >= 1");
  if (params.building_probability < 0.0 || params.building_probability > 1.0)
    throw SceneError("building_probability must lie in [0, 1]");
  const double cell_w = params.bounds.width() / k;
  const double cell_h = params.bounds.height() / k;
  if (!(params.footprint_min_m > 0.0) || params.footprint_max_m < params.footprint_min_m ||
      params.footprint_max_m > std::min(cell_w, cell_h) - 2.0 * kStreetMarginM)
    throw SceneError(fmt::format(
        "infeasible footprint range [{}, {}] m for {:.3f} x {:.3f} m cells with {} m margins",
        params.footprint_min_m, params.footprint_max_m, cell_w, cell_h, kStreetMarginM));
  for (const auto& name : kMaterials) {
    if (!materials.contains(name)) throw SceneError("material table lacks '" + name + "'");
  }

  std::mt19937_64 rng(seed);
  const int cells = k * k;
  std::vector<bool> occupied(static_cast<std::size_t>(cells), false);
  if (params.building_count) {
    if (*params.building_count > cells)
      throw SceneError(fmt::format("building_count {} exceeds {} cells", *params.building_count, cells));
    std::vector<int> order(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = cells - 1; i > 0; --i) {
      const auto j = static_cast<int>(uniform01(rng) * (i + 1));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < *params.building_count; ++i)
      occupied[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;
  } else {
    for (int c = 0; c < cells; ++c)
      occupied[static_cast<std::size_t>(c)] = uniform01(rng) < params.building_probability;
  }

  Scene scene;
  scene.bounds = params.bounds;
  scene.ground_material = params.ground_material;
  scene.seed = seed;
  scene.materials = materials;

  const double span = params.footprint_max_m - params.footprint_min_m;
  for (int cy = 0; cy < k; ++cy) {
    for (int cx = 0; cx < k; ++cx) {
      if (!occupied[static_cast<std::size_t>(cy * k + cx)]) continue;
      const double w = params.footprint_min_m + uniform01(rng) * span;
      const double d = params.footprint_min_m + uniform01(rng) * span;
      const double x0 = params.bounds.xmin + cx * cell_w + kStreetMarginM +
                        uniform01(rng) * (cell_w - 2.0 * kStreetMarginM - w);
      const double y0 = params.bounds.ymin + cy * cell_h + kStreetMarginM +
                        uniform01(rng) * (cell_h - 2.0 * kStreetMarginM - d);
      const double h = std::clamp(
          std::exp(std::log(params.height_median_m) + params.height_sigma * standard_normal(rng)),
          3.0, 100.0);
      const auto pick = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * 3.0), 2);

      Building bld;
      bld.id = static_cast<int>(scene.buildings.size());
      bld.footprint = {{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + d}, {x0, y0 + d}};
      bld.height_m = h;
      bld.material = kMaterials[pick];
      scene.buildings.push_back(std::move(bld));
    }
  }
  validate_scene(scene);
  return scene;
}

Scene import_footprints(std::string_view geojson, const ProcGenParams& frame,
                        const MaterialTable& materials, std::uint64_t seed) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(geojson);
  } catch (const nlohmann::json::exception& e) {
    throw SceneError(std::string("malformed GeoJSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array())
    throw SceneError("malformed GeoJSON: expected a FeatureCollection with a features array");

  struct Raw {
    std::vector<Vec2> lonlat;
    nlohmann::json props;
  };
  std::vector<Raw> raws;
  double sum_lon = 0.0, sum_lat = 0.0;
  std::size_t count = 0;
  int index = 0;
  for (const auto& feature : doc["features"]) {
    if (!feature.is_object() || !feature.contains("geometry") || !feature["geometry"].is_object())
      throw SceneError(fmt::format("feature {}: missing geometry", index));
    const auto& geom = feature["geometry"];
    if (geom.value("type", "") != "Polygon")
      throw SceneError(fmt::format("feature {}: geometry type '{}' is not Polygon", index,
                                   geom.value("type", "")));
    const auto& coords = geom.value("coordinates", nlohmann::json::array());
    if (!coords.is_array() || coords.empty() || !coords[0].is_array())
      throw SceneError(fmt::format("feature {}: malformed coordinates", index));
    Raw raw;
    for (const auto& pos : coords[0]) {
      if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
        throw SceneError(fmt::format("feature {}: malformed position", index));
      raw.lonlat.emplace_back(pos[0].get<double>(), pos[1].get<double>());
    }
    if (raw.lonlat.size() >= 2 && raw.lonlat.front() == raw.lonlat.back()) raw.lonlat.pop_back();
    for (const auto& p : raw.lonlat) {
      sum_lon += p.x();
      sum_lat += p.y();
      ++count;
    }
    raw.props = feature.contains("properties") && feature["properties"].is_object()
                    ? feature["properties"]
                    : nlohmann::json::object();
    raws.push_back(std::move(raw));
    ++index;
  }

  Scene scene;
  scene.bounds = frame.bounds;
  scene.ground_material = frame.ground_material;
  scene.materials = materials;
  scene.seed = seed;
  if (count == 0) {
    validate_scene(scene);
    return scene;
  }
  const double lon0 = sum_lon / static_cast<double>(count);
  const double lat0 = sum_lat / static_cast<double>(count);
  scene.geo_origin = GeoOrigin{lat0, lon0};
  const double deg = kPi / 180.0;
  const double cos_lat0 = std::cos(lat0 * deg);

  for (std::size_t f = 0; f < raws.size(); ++f) {
    const auto& raw = raws[f];
    const int fi = static_cast<int>(f);
    std::vector<Vec2> ring;
    for (const auto& p : raw.lonlat)
      ring.emplace_back(kEarthRadiusM * (p.x() - lon0) * deg * cos_lat0,
                        kEarthRadiusM * (p.y() - lat0) * deg);
    ring = clean_ring(std::move(ring));
    if (ring.size() < 3) throw SceneError(fmt::format("feature {}: degenerate polygon", fi));
    if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());

    Vec2 lo = ring.front(), hi = ring.front();
    for (const auto& p : ring) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const auto& b = frame.bounds;
    if (hi.x() < b.xmin || lo.x() > b.xmax || hi.y() < b.ymin || lo.y() > b.ymax) continue;
    if (lo.x() < b.xmin || hi.x() > b.xmax || lo.y() < b.ymin || hi.y() > b.ymax) {
      ring = clean_ring(clip_to_bounds(ring, b));
      if (ring.size() < 3 || !(signed_area(ring) > 0.0)) continue;
    }
    if (!is_simple_polygon(ring))
      throw SceneError(fmt::format("feature {}: footprint is not a simple polygon", fi));

    double height = kDefaultHeightM;
    if (raw.props.contains("height") && !raw.props["height"].is_null())
      height = number_property(raw.props, "height", fi);
    else if (raw.props.contains("levels") && !raw.props["levels"].is_null())
      height = kMetresPerLevel * number_property(raw.props, "levels", fi);
    if (!(height > 0.0) || !std::isfinite(height))
      throw SceneError(fmt::format("feature {}: non-positive height", fi));

    std::string material = "concrete";
    if (raw.props.contains("material") && raw.props["material"].is_string())
      material = raw.props["material"].get<std::string>();

    Building bld;
    bld.id = static_cast<int>(scene.buildings.size());
    bld.footprint = std::move(ring);
    bld.height_m = height;
    bld.material = material;
    scene.buildings.push_back(std::move(bld));
  }
  validate_scene(scene);
  return scene;
}

TriangleMesh triangulate(const Scene& scene) {
  TriangleMesh mesh;
  auto add_triangle = [&mesh](const Vec3& a, const Vec3& b, const Vec3& c, Facet& facet) {
    facet.triangles.push_back(static_cast<int>(mesh.triangles.size()));
    mesh.triangles.push_back({a, b, c, facet.id, facet.building, facet.material, facet.kind});
  };

  const auto& bd = scene.bounds;
  {
    std::vector<Vec3> quad = {{bd.xmin, bd.ymin, 0.0}, {bd.xmax, bd.ymin, 0.0},
                              {bd.xmax, bd.ymax, 0.0}, {bd.xmin, bd.ymax, 0.0}};
    Facet ground = make_facet(0, SurfaceKind::ground, -1, scene.ground_material, quad,
                              Vec3::UnitX(), Vec3::UnitY());
    add_triangle(quad[0], quad[1], quad[2], ground);
    add_triangle(quad[0], quad[2], quad[3], ground);
    mesh.facets.push_back(std::move(ground));
  }

  for (const auto& bld : scene.buildings) {
    const auto& fp = bld.footprint;
    const std::size_t n = fp.size();
    const double h = bld.height_m;
    for (std::size_t e = 0; e < n; ++e) {
      const Vec2& a = fp[e];
      const Vec2& c = fp[(e + 1) % n];
      const Vec3 a0(a.x(), a.y(), 0.0), b0(c.x(), c.y(), 0.0);
      const Vec3 b1(c.x(), c.y(), h), a1(a.x(), a.y(), h);
      const Vec3 u = (b0 - a0).normalized();
      Facet wall = make_facet(static_cast<int>(mesh.facets.size()), SurfaceKind::wall, bld.id,
                              bld.material, {a0, b0, b1, a1}, u, Vec3::UnitZ());
      add_triangle(a0, b0, b1, wall);
      add_triangle(a0, b1, a1, wall);
      mesh.facets.push_back(std::move(wall));
    }

    std::vector<std::array<int, 3>> roof_tris;
    try {
      roof_tris = ear_clip(fp);
    } catch (const SceneError& e) {
      throw SceneError(fmt::format("building {}: {}", bld.id, e.what()));
    }
    std::vector<Vec3> ring;
    for (const auto& p : fp) ring.emplace_back(p.x(), p.y(), h);
    Facet roof = make_facet(static_cast<int>(mesh.facets.size()), SurfaceKind::roof, bld.id,
                            bld.material, ring, Vec3::UnitX(), Vec3::UnitY());
    for (const auto& t : roof_tris)
      add_triangle(ring[static_cast<std::size_t>(t[0])], ring[static_cast<std::size_t>(t[1])],
                   ring[static_cast<std::size_t>(t[2])], roof);
    mesh.facets.push_back(std::move(roof));
  }
  return mesh;
}

std::string scene_id(const Scene& scene) {
  if (scene.geo_origin)
    return fmt::format("{:.6f}_{:.6f}", scene.geo_origin->latitude, scene.geo_origin->longitude);
  return fmt::format("proc_{}", scene.seed);
}

}  // namespace mpgen
