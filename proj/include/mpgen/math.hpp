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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <complex>
#include <numbers>

namespace mpgen {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;       // m/s, exact
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kPi = std::numbers::pi;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Wraps an angle in radians onto (-pi, pi].
inline double wrap_phase(double rad) {
  double w = std::remainder(rad, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

// Axis-aligned rectangle in the ground plane.
struct Bounds {
  double xmin = -64.0;
  double ymin = -64.0;
  double xmax = 64.0;
  double ymax = 64.0;

  bool contains(const Vec2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool operator==(const Bounds&) const = default;
};

}  // namespace mpgen
