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

#include "mpgen/config.hpp"
#include "mpgen/geometry.hpp"
#include "mpgen/raytracer.hpp"
#include "mpgen/scene.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mpgen {

struct ReceiverRecord {
  RxPoint rx;
  std::vector<PropagationPath> paths;  // empty for indoor receivers
  bool operator==(const ReceiverRecord&) const = default;
};

struct DegradationEvent {
  int batch_index = 0;
  int old_depth = 0;
  int new_depth = 0;
  double elapsed_s = 0.0;
  bool operator==(const DegradationEvent&) const = default;
};

struct QcResult {
  double outdoor_fraction = 0.0;
  bool passed = false;
  bool operator==(const QcResult&) const = default;
};

struct ResultSet {
  std::string scene_id;
  std::optional<GeoOrigin> geo_origin;
  std::vector<ReceiverRecord> records;  // one per grid point, by receiver index
  std::vector<DegradationEvent> degradation_log;
  QcResult qc;
  TraceConfig config_echo;
  double wall_time_s = 0.0;  // excluded from equality
  bool operator==(const ResultSet& o) const {
    return scene_id == o.scene_id && geo_origin == o.geo_origin && records == o.records &&
           degradation_log == o.degradation_log && qc == o.qc && config_echo == o.config_echo;
  }
};

enum class Kernel { parallel, serial };

struct RunOptions {
  int threads = 0;  // 0 = OpenMP default
  Kernel kernel = Kernel::parallel;
};

/// Traces receivers[i] into out[i]. The parallel kernel distributes receivers
/// over OpenMP threads; each slot is written by exactly one thread, so the
/// result does not depend on the schedule.
void trace_batch_parallel(const PropagationScene& ps, const ImageTree& tree, const TraceOptions& opts,
                          std::span<const RxPoint> receivers,
                          std::span<std::vector<PropagationPath>> out, int threads = 0);
void trace_batch_serial(const PropagationScene& ps, const ImageTree& tree, const TraceOptions& opts,
                        std::span<const RxPoint> receivers,
                        std::span<std::vector<PropagationPath>> out);

ResultSet run_trace(const Scene& scene, const TraceConfig& cfg, const RunOptions& run = {});

/// Fills rs.qc from the records: fraction of outdoor receivers over the grid.
ResultSet qc_check(ResultSet rs, const TraceConfig& cfg);

}  // namespace mpgen
