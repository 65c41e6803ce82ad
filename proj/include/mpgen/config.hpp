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

#include "mpgen/errors.hpp"
#include "mpgen/material.hpp"
#include "mpgen/math.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mpgen {

/// Receiver grid. Receiver (i, j) sits at origin + (i*spacing, j*spacing, height),
/// with row-major index j*nx + i.
struct GridSpec {
  int nx = 128;
  int ny = 128;
  double spacing_m = 1.0;
  double height_m = 1.0;
  std::array<double, 2> origin_xy{-63.5, -63.5};

  int size() const { return nx * ny; }
  Vec3 position(int i, int j) const {
    return {origin_xy[0] + i * spacing_m, origin_xy[1] + j * spacing_m, height_m};
  }
  Vec3 position(int index) const { return position(index % nx, index / nx); }
  bool operator==(const GridSpec&) const = default;
};

/// Parameters for procedural scene synthesis and the scene frame shared with
/// footprint ingestion.
struct ProcGenParams {
  Bounds bounds;
  std::string ground_material = "concrete";
  int block_grid = 8;                  // k x k cells over bounds
  double building_probability = 0.35;  // per-cell occupancy
  double footprint_min_m = 6.0;
  double footprint_max_m = 12.0;
  double height_median_m = 12.0;       // log-normal median
  double height_sigma = 0.5;           // log-normal shape
  std::optional<int> building_count;   // exact count instead of per-cell draws

  bool operator==(const ProcGenParams&) const = default;
};

enum class AntennaModel { isotropic };

struct TraceConfig {
  double carrier_frequency_hz = 3.5e9;
  int max_reflection_depth = 3;
  bool enable_diffraction = true;
  bool enable_scattering = false;
  int n_paths_retained = 5;
  Vec3 tx_position{0.0, 0.0, 30.0};
  GridSpec rx_grid;
  AntennaModel antenna_model = AntennaModel::isotropic;
  std::uint64_t seed = 0;
  int batch_size = 1024;
  std::optional<double> batch_time_budget_s;
  double min_outdoor_fraction = 0.3;
  MaterialTable materials;  // overrides applied on top of the scene's table
  double scattering_coefficient_default = 0.2;
  ProcGenParams scene;

  double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }
  bool operator==(const TraceConfig&) const = default;
};

struct Violation {
  std::string key;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses a YAML (or JSON) configuration document. Missing keys take their
/// defaults; `overrides` are dotted `key.path=value` assignments applied to the
/// document before it is interpreted. Throws ConfigError naming the offending key.
TraceConfig load_config(std::string_view text, const std::vector<std::string>& overrides = {});
TraceConfig load_config_file(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

std::vector<Violation> validate_config(const TraceConfig& cfg);

/// Built-in materials (seeded with scattering_coefficient_default) overlaid
/// with the configured overrides.
MaterialTable material_table(const TraceConfig& cfg);

/// YAML rendering with every field explicit; load_config(dump_config(c)) == c.
std::string dump_config(const TraceConfig& cfg);
nlohmann::json config_to_json(const TraceConfig& cfg);

}  // namespace mpgen
