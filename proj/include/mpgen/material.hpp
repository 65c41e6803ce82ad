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

#include "mpgen/math.hpp"

#include <map>
#include <string>

namespace mpgen {

// Electrical parameters of a surface material. The complex relative
// permittivity at frequency f is eps_r - j*sigma/(2*pi*f*eps0).
struct MaterialParams {
  std::string name;
  double eps_r = 1.0;
  double conductivity_s_per_m = 0.0;
  double scattering_coeff = 0.0;

  Complex permittivity(double frequency_hz) const {
    return {eps_r, -conductivity_s_per_m / (2.0 * kPi * frequency_hz * kVacuumPermittivity)};
  }
  bool operator==(const MaterialParams&) const = default;
};

using MaterialTable = std::map<std::string, MaterialParams>;

// Built-in concrete / glass / metal table (mid-band values).
MaterialTable default_materials(double scattering_coeff);

// Returns an empty string when valid, otherwise a description of the problem.
std::string check_material(const MaterialParams& m);

}  // namespace mpgen
