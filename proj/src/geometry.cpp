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

#include "mpgen/geometry.hpp"

#include <algorithm>

namespace mpgen {

namespace {

constexpr double kOnEdgeTolerance = 1e-9;

double distance_to_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

RxPoint classify(const Scene& scene, const GridSpec& grid, int index) {
  const Vec3 p = grid.position(index);
  return {index, p, !point_inside_building(scene, p)};
}

}  // namespace

bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if (distance_to_segment(a, b, p) <= kOnEdgeTolerance) return true;
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

bool point_inside_building(const Scene& scene, const Vec3& p) {
  const Vec2 xy = p.head<2>();
  for (const auto& b : scene.buildings) {
    if (!(p.z() < b.height_m)) continue;
    if (point_in_polygon(b.footprint, xy)) return true;
  }
  return false;
}

std::vector<RxPoint> filter_outdoor_receivers_serial(const Scene& scene, const GridSpec& grid) {
  std::vector<RxPoint> out(static_cast<std::size_t>(grid.size()));
  for (int k = 0; k < grid.size(); ++k) out[static_cast<std::size_t>(k)] = classify(scene, grid, k);
  return out;
}

std::vector<RxPoint> filter_outdoor_receivers(const Scene& scene, const GridSpec& grid) {
  const int n = grid.size();
  std::vector<RxPoint> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = classify(scene, grid, k);
  return out;
}

}  // namespace mpgen
