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

#include <omp.h>

namespace mpgen {

void trace_batch_parallel(const PropagationScene& ps, const ImageTree& tree, const TraceOptions& opts,
                          std::span<const RxPoint> receivers,
                          std::span<std::vector<PropagationPath>> out, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(receivers.size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        trace_receiver(ps, tree, receivers[static_cast<std::size_t>(i)].position, opts);
  }
}

void trace_batch_serial(const PropagationScene& ps, const ImageTree& tree, const TraceOptions& opts,
                        std::span<const RxPoint> receivers,
                        std::span<std::vector<PropagationPath>> out) {
  for (std::size_t i = 0; i < receivers.size(); ++i)
    out[i] = trace_receiver(ps, tree, receivers[i].position, opts);
}

}  // namespace mpgen
