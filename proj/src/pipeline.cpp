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

#include "mpgen/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace mpgen {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ResultSet run_trace(const Scene& scene, const TraceConfig& cfg, const RunOptions& run) {
  const auto start = std::chrono::steady_clock::now();
  ResultSet rs;
  rs.scene_id = scene_id(scene);
  rs.geo_origin = scene.geo_origin;
  rs.config_echo = cfg;

  const PropagationScene ps(scene, cfg);
  TraceOptions opts = trace_options(cfg);
  const ImageTree tree(ps, cfg.tx_position, std::max(0, opts.max_reflection_depth));

  const std::vector<RxPoint> grid = run.kernel == Kernel::serial
                                        ? filter_outdoor_receivers_serial(scene, cfg.rx_grid)
                                        : filter_outdoor_receivers(scene, cfg.rx_grid);
  rs.records.reserve(grid.size());
  std::vector<RxPoint> outdoor;
  std::vector<std::size_t> slot;
  for (const auto& rx : grid) {
    if (rx.outdoor) {
      outdoor.push_back(rx);
      slot.push_back(rs.records.size());
    }
    rs.records.push_back({rx, {}});
  }

  const std::size_t batch = static_cast<std::size_t>(std::max(1, cfg.batch_size));
  std::vector<std::vector<PropagationPath>> out;
  int batch_index = 0;
  for (std::size_t first = 0; first < outdoor.size(); first += batch, ++batch_index) {
    const std::size_t count = std::min(batch, outdoor.size() - first);
    const std::span<const RxPoint> rxs(outdoor.data() + first, count);
    out.assign(count, {});
    const auto batch_start = std::chrono::steady_clock::now();
    if (run.kernel == Kernel::serial)
      trace_batch_serial(ps, tree, opts, rxs, out);
    else
      trace_batch_parallel(ps, tree, opts, rxs, out, run.threads);
    const double elapsed = seconds_since(batch_start);
    for (std::size_t i = 0; i < count; ++i) rs.records[slot[first + i]].paths = std::move(out[i]);

    if (cfg.batch_time_budget_s && elapsed > *cfg.batch_time_budget_s && opts.max_reflection_depth > 1) {
      rs.degradation_log.push_back(
          {batch_index, opts.max_reflection_depth, opts.max_reflection_depth - 1, elapsed});
      --opts.max_reflection_depth;
    }
  }

  rs = qc_check(std::move(rs), cfg);
  rs.wall_time_s = seconds_since(start);
  return rs;
}

ResultSet qc_check(ResultSet rs, const TraceConfig& cfg) {
  const auto outdoor = std::count_if(rs.records.begin(), rs.records.end(),
                                     [](const ReceiverRecord& r) { return r.rx.outdoor; });
  const int total = cfg.rx_grid.size();
  rs.qc.outdoor_fraction = total > 0 ? static_cast<double>(outdoor) / total : 0.0;
  rs.qc.passed = rs.qc.outdoor_fraction >= cfg.min_outdoor_fraction;
  return rs;
}

}  // namespace mpgen
