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

#include "mpgen/material.hpp"

#include <cmath>

namespace mpgen {

MaterialTable default_materials(double scattering_coeff) {
  MaterialTable table;
  table["concrete"] = {"concrete", 5.24, 0.46, scattering_coeff};
  table["glass"] = {"glass", 6.31, 0.02, scattering_coeff};
  table["metal"] = {"metal", 1.0, 1e7, scattering_coeff};
  return table;
}

std::string check_material(const MaterialParams& m) {
  if (!(m.eps_r >= 1.0) || !std::isfinite(m.eps_r)) return "eps_r must be finite and >= 1";
  if (!(m.conductivity_s_per_m >= 0.0) || !std::isfinite(m.conductivity_s_per_m))
    return "conductivity_s_per_m must be finite and >= 0";
  if (!(m.scattering_coeff >= 0.0 && m.scattering_coeff <= 1.0))
    return "scattering_coeff must lie in [0, 1]";
  return {};
}

}  // namespace mpgen
