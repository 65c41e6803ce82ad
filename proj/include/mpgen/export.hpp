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

#include "mpgen/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mpgen {

inline constexpr const char* kFormatVersion = "1.0";
inline constexpr int kHistogramBins = 50;
inline constexpr int kArrayFields = 8;

/// File names inside one scene's results directory.
namespace files {
inline constexpr const char* csv = "raytracing_results.csv";
inline constexpr const char* jsonl = "raytracing_results.jsonl";
inline constexpr const char* array = "deepmimo_format.npy";
inline constexpr const char* metadata = "metadata.json";
inline constexpr const char* stats = "generation_stats.txt";
inline constexpr const char* gain_hist = "channel_gain_distribution.csv";
inline constexpr const char* toa_hist = "ToA_distribution.csv";
inline constexpr const char* type_hist = "path_type_distribution.csv";
inline constexpr const char* heatmaps = "heatmaps";
inline constexpr std::array<const char*, 4> rasters{"channel_gain_heatmap.pgm", "ToA_heatmap.pgm",
                                                   "elevation_heatmap.pgm", "azimuth_heatmap.pgm"};
inline constexpr const char* scene_list = "generated_scenes.txt";
}  // namespace files

void write_csv(const ResultSet& rs, const std::filesystem::path& path);
void write_jsonl(const ResultSet& rs, const std::filesystem::path& path);
std::vector<ReceiverRecord> read_jsonl(const std::filesystem::path& path);

/// NPY v1.0 preamble for a little-endian float64 array of shape (r, n, 8).
std::string npy_header(std::size_t receivers, std::size_t slots);
void write_array(const ResultSet& rs, const std::filesystem::path& path);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::int64_t> counts;
};

/// Uniform bins over [min, max] of the finite values; max lands in the last bin.
Histogram histogram(const std::vector<double>& values, int bins = kHistogramBins);
void write_stats(const ResultSet& rs, const std::filesystem::path& dir);

/// Linear-interpolated percentile of sorted data, p in [0, 100].
double percentile(const std::vector<double>& sorted, double p);

/// Maps values onto [1, 255] by the 1st-99th percentile window; entries with
/// mask == false become 0.
std::vector<std::uint8_t> scale_to_pixels(const std::vector<double>& values,
                                          const std::vector<bool>& mask);

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 = north
};

Raster read_pgm(const std::filesystem::path& path);
void render_heatmaps(const ResultSet& rs, const std::filesystem::path& dir);

nlohmann::json metadata_json(const ResultSet& rs);
void write_metadata(const ResultSet& rs, const std::filesystem::path& dir);
/// ResultSet without records, as stored in metadata.json.
ResultSet read_metadata(const std::filesystem::path& dir);

/// Everything the results directory holds.
void export_results(const ResultSet& rs, const std::filesystem::path& dir);
/// Stats and heatmaps only, the part `analyze` regenerates.
void export_analysis(const ResultSet& rs, const std::filesystem::path& dir);
/// metadata.json plus the jsonl records.
ResultSet read_results(const std::filesystem::path& dir);

/// Rebuilds region-level generated_scenes.txt and generation_stats.txt from
/// the scene and result directories below `region`.
void write_region_summary(const std::filesystem::path& region);

}  // namespace mpgen
