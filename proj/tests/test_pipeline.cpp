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

#include "support.hpp"

#include "mpgen/pipeline.hpp"

#include <gtest/gtest.h>

using namespace mpgen;

namespace {

Scene city(int buildings, std::uint64_t seed) {
  ProcGenParams params;
  params.building_count = buildings;
  return generate_procedural_scene(params, seed, default_materials(0.2));
}

TraceConfig coarse() {
  TraceConfig cfg = testkit::small_config(24, 20, 5.0, -60, -50);
  cfg.max_reflection_depth = 2;
  return cfg;
}

}  // namespace

TEST(Pipeline, EmptySceneDefaultsHaveOneLosPerReceiver) {
  TraceConfig cfg;
  cfg.max_reflection_depth = 1;
  const ResultSet rs = run_trace(testkit::empty_scene(), cfg);
  ASSERT_EQ(rs.records.size(), 16384u);
  for (std::size_t i = 0; i < rs.records.size(); ++i) {
    const auto& r = rs.records[i];
    EXPECT_EQ(r.rx.index, static_cast<int>(i));
    ASSERT_FALSE(r.paths.empty());
    EXPECT_EQ(r.paths[0].type, PathType::los);
    EXPECT_EQ(std::count_if(r.paths.begin(), r.paths.end(),
                            [](const PropagationPath& p) { return p.type == PathType::los; }),
              1);
  }
  EXPECT_TRUE(rs.degradation_log.empty());
  EXPECT_DOUBLE_EQ(rs.qc.outdoor_fraction, 1.0);
  EXPECT_TRUE(rs.qc.passed);
  EXPECT_EQ(rs.scene_id, "proc_0");
}

TEST(Pipeline, IndoorRecordsAreEmptyAndComplete) {
  const Scene s = city(30, 2);
  const TraceConfig cfg = coarse();
  const ResultSet rs = run_trace(s, cfg);
  ASSERT_EQ(rs.records.size(), static_cast<std::size_t>(cfg.rx_grid.size()));
  int indoor = 0;
  for (std::size_t i = 0; i < rs.records.size(); ++i) {
    const auto& r = rs.records[i];
    EXPECT_EQ(r.rx.index, static_cast<int>(i));
    EXPECT_EQ(r.rx.outdoor, !point_inside_building(s, r.rx.position));
    if (!r.rx.outdoor) {
      ++indoor;
      EXPECT_TRUE(r.paths.empty());
    }
    EXPECT_LE(r.paths.size(), static_cast<std::size_t>(cfg.n_paths_retained));
  }
  EXPECT_GT(indoor, 0);
}

TEST(Pipeline, DeterministicAcrossThreadsBatchesAndKernels) {
  const Scene s = city(20, 9);
  TraceConfig cfg = coarse();
  const ResultSet reference = run_trace(s, cfg, {1, Kernel::serial});
  for (int threads : {1, 2, 8}) {
    for (int batch : {1, 7, 1024}) {
      cfg.batch_size = batch;
      ResultSet rs = run_trace(s, cfg, {threads, Kernel::parallel});
      rs.config_echo.batch_size = reference.config_echo.batch_size;
      EXPECT_EQ(rs, reference) << threads << " threads, batch " << batch;
    }
  }
}

TEST(Pipeline, ParallelKernelMatchesSerialKernel) {
  const Scene s = city(20, 4);
  const TraceConfig cfg = coarse();
  const PropagationScene ps(s, cfg);
  const ImageTree tree(ps, cfg.tx_position, cfg.max_reflection_depth);
  const auto rx = filter_outdoor_receivers(s, cfg.rx_grid);
  std::vector<RxPoint> outdoor;
  for (const auto& r : rx) {
    if (r.outdoor) outdoor.push_back(r);
  }
  std::vector<std::vector<PropagationPath>> a(outdoor.size()), b(outdoor.size());
  trace_batch_serial(ps, tree, trace_options(cfg), outdoor, a);
  trace_batch_parallel(ps, tree, trace_options(cfg), outdoor, b, 4);
  EXPECT_EQ(a, b);
}

TEST(Pipeline, ZeroBudgetDegradesToFloor) {
  const Scene s = city(6, 1);
  TraceConfig cfg = testkit::small_config(10, 10, 6.0, -30, -30);
  cfg.max_reflection_depth = 3;
  cfg.batch_size = 20;
  cfg.batch_time_budget_s = 0.0;
  const ResultSet rs = run_trace(s, cfg);
  ASSERT_EQ(rs.degradation_log.size(), 2u);
  EXPECT_EQ(rs.degradation_log[0].batch_index, 0);
  EXPECT_EQ(rs.degradation_log[0].old_depth, 3);
  EXPECT_EQ(rs.degradation_log[0].new_depth, 2);
  EXPECT_EQ(rs.degradation_log[1].batch_index, 1);
  EXPECT_EQ(rs.degradation_log[1].old_depth, 2);
  EXPECT_EQ(rs.degradation_log[1].new_depth, 1);
  EXPECT_GE(rs.degradation_log[0].elapsed_s, 0.0);
}

TEST(Pipeline, GenerousBudgetNeverDegrades) {
  TraceConfig cfg = coarse();
  cfg.batch_size = 50;
  cfg.batch_time_budget_s = 1e6;
  EXPECT_TRUE(run_trace(city(5, 3), cfg).degradation_log.empty());
}

TEST(Qc, FractionAndThreshold) {
  Scene s = testkit::empty_scene();
  s.buildings.push_back(testkit::rect_building(0, -64, -64, 64, 64, 20));
  TraceConfig cfg = testkit::small_config(8, 8, 2.0, -7, -7);
  ResultSet rs = run_trace(s, cfg);
  EXPECT_DOUBLE_EQ(rs.qc.outdoor_fraction, 0.0);
  EXPECT_FALSE(rs.qc.passed);
  cfg.min_outdoor_fraction = 0.0;
  EXPECT_TRUE(qc_check(rs, cfg).qc.passed);
}
