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

// Serial reference kernels against their OpenMP counterparts on the default
// 128 x 128 grid over a 20-building city.

#include "mpgen/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

using namespace mpgen;

struct Fixture {
  Scene scene;
  TraceConfig cfg;
  PropagationScene ps;
  ImageTree tree;
  std::vector<RxPoint> outdoor;

  static Scene make_scene() {
    ProcGenParams params;
    params.building_count = 20;
    return generate_procedural_scene(params, 1, default_materials(0.2));
  }
  static TraceConfig make_cfg() {
    TraceConfig cfg;
    cfg.max_reflection_depth = 2;
    return cfg;
  }

  Fixture()
      : scene(make_scene()), cfg(make_cfg()), ps(scene, cfg), tree(ps, cfg.tx_position, cfg.max_reflection_depth) {
    for (const auto& rx : filter_outdoor_receivers(scene, cfg.rx_grid)) {
      if (rx.outdoor) outdoor.push_back(rx);
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_TraceSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<PropagationPath>> out(n);
  for (auto _ : state) {
    trace_batch_serial(f.ps, f.tree, trace_options(f.cfg), {f.outdoor.data(), n}, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_TraceParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  std::vector<std::vector<PropagationPath>> out(n);
  for (auto _ : state) {
    trace_batch_parallel(f.ps, f.tree, trace_options(f.cfg), {f.outdoor.data(), n}, out, threads);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_OutdoorFilterSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(filter_outdoor_receivers_serial(f.scene, f.cfg.rx_grid));
}

void BM_OutdoorFilterParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(filter_outdoor_receivers(f.scene, f.cfg.rx_grid));
}

void thread_args(benchmark::internal::Benchmark* b) {
  for (int t = 1; t <= std::max(1, omp_get_num_procs()); t *= 2) b->Args({4096, t});
}

}  // namespace

BENCHMARK(BM_TraceSerial)->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TraceParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OutdoorFilterSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OutdoorFilterParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
