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

#include "mpgen/cli.hpp"
#include "mpgen/export.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

using namespace mpgen;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mpgen_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

// Relative path -> contents, skipping timing lines that legitimately differ.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::string text = read(e.path());
    const std::string name = e.path().filename().string();
    if (name == files::stats || name == files::metadata) {
      std::istringstream in(text);
      std::string kept;
      for (std::string line; std::getline(in, line);) {
        if (line.find("wall_time_s") == std::string::npos) kept += line + "\n";
      }
      text = kept;
    }
    out[fs::relative(e.path(), root).string()] = text;
  }
  return out;
}

const std::vector<std::string> kSmall = {"--set", "rx_grid.nx=12", "--set", "rx_grid.ny=10",
                                         "--set", "rx_grid.spacing_m=8", "--set",
                                         "rx_grid.origin_xy=[-44, -36]", "--set",
                                         "max_reflection_depth=1"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

}  // namespace

TEST(Cli, PrintDefaultsLoadsBack) {
  const auto a = cli({"--print-defaults"});
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(load_config(a.out), TraceConfig{});
  EXPECT_EQ(cli({"print-defaults"}).out, a.out);
}

TEST(Cli, GensceneIsDeterministic) {
  const auto dir = scratch("gen");
  const auto a = cli({"genscene", "--seed", "7", "-o", (dir / "a").string()});
  const auto b = cli({"genscene", "--seed", "7", "-o", (dir / "b").string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, "proc_7\n");
  EXPECT_EQ(read(dir / "a/scenes/scene_proc_7/scene.xml"), read(dir / "b/scenes/scene_proc_7/scene.xml"));
  EXPECT_EQ(read(dir / "a" / files::scene_list), "proc_7\n");
  fs::remove_all(dir);
}

TEST(Cli, EmptyCityHasNoBuildingElements) {
  const auto dir = scratch("nobld");
  ASSERT_EQ(cli({"genscene", "-o", dir.string(), "--set", "scene.building_probability=0"}).code, kExitOk);
  EXPECT_EQ(read(dir / "scenes/scene_proc_0/scene.xml").find("<building"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ConfigErrorsExitOneNamingKey) {
  const auto dir = scratch("bad");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.yaml") << "carrier_frequency_hz: -3\n";
  const auto a = cli({"genscene", "-c", (dir / "bad.yaml").string(), "-o", dir.string()});
  EXPECT_EQ(a.code, kExitConfig);
  EXPECT_NE(a.err.find("carrier_frequency_hz"), std::string::npos);
  EXPECT_EQ(cli({"genscene", "-o", dir.string(), "--set", "nonsense=1"}).code, kExitConfig);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(cli({"genscene", "-c", (dir / "missing.yaml").string(), "-o", dir.string()}).code, kExitIo);
  EXPECT_EQ(cli({"trace", "--scene", (dir / "none").string(), "-o", dir.string()}).code, kExitIo);
  fs::remove_all(dir);
}

TEST(Cli, RunWritesTheLayout) {
  const auto dir = scratch("run");
  const auto a = cli(with_small({"run", "-o", dir.string(), "--set", "scene.building_count=4"}));
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const fs::path scene = dir / "scenes/scene_proc_0";
  const fs::path res = dir / "raytracing_results/scene_proc_0";
  for (const fs::path p : {scene / "scene.xml", scene / "mesh/ground.ply", scene / "mesh/building_3.ply",
                           res / files::csv, res / files::jsonl, res / files::array, res / files::metadata,
                           res / files::stats, res / files::gain_hist, res / files::toa_hist,
                           res / files::type_hist, dir / files::scene_list, dir / files::stats})
    EXPECT_TRUE(fs::exists(p)) << p;
  for (const char* r : files::rasters) EXPECT_TRUE(fs::exists(res / files::heatmaps / r)) << r;
  fs::remove_all(dir);
}

TEST(Cli, ComposedPipelineEqualsOneShot) {
  const auto dir = scratch("compose");
  const auto one = dir / "one", three = dir / "three";
  const std::vector<std::string> common{"--seed", "3", "--set", "scene.building_count=6"};
  auto args = [&](std::vector<std::string> head) {
    head.insert(head.end(), common.begin(), common.end());
    return with_small(head);
  };
  ASSERT_EQ(cli(args({"run", "-o", one.string()})).code, kExitOk);
  ASSERT_EQ(cli(args({"genscene", "-o", three.string()})).code, kExitOk);
  ASSERT_EQ(cli(args({"trace", "--scene", (three / "scenes/scene_proc_3").string(), "-o", three.string()})).code,
            kExitOk);
  ASSERT_EQ(cli({"analyze", (three / "raytracing_results/scene_proc_3").string()}).code, kExitOk);
  EXPECT_EQ(snapshot(one), snapshot(three));
  fs::remove_all(dir);
}

TEST(Cli, AnalyzeIsIdempotentAndNeedsResults) {
  const auto dir = scratch("analyze");
  ASSERT_EQ(cli(with_small({"run", "-o", dir.string()})).code, kExitOk);
  const auto res = dir / "raytracing_results/scene_proc_0";
  const auto before = snapshot(res);
  ASSERT_EQ(cli({"analyze", res.string()}).code, kExitOk);
  const auto once = snapshot(res);
  ASSERT_EQ(cli({"analyze", res.string()}).code, kExitOk);
  EXPECT_EQ(snapshot(res), once);
  EXPECT_EQ(once, before);
  fs::remove(res / files::jsonl);
  EXPECT_EQ(cli({"analyze", res.string()}).code, kExitIo);
  fs::remove_all(dir);
}

TEST(Cli, QcFailureExitsThreeAndKeepsOutputs) {
  const auto dir = scratch("qc");
  const auto a = cli(with_small({"run", "-o", dir.string(), "--set", "scene.building_probability=1",
                                 "--set", "min_outdoor_fraction=0.99"}));
  EXPECT_EQ(a.code, kExitQc);
  const auto meta = read(dir / "raytracing_results/scene_proc_0" / files::metadata);
  EXPECT_FALSE(nlohmann::json::parse(meta).at("qc").at("passed").get<bool>());
  fs::remove_all(dir);
}

TEST(Cli, PathCountOverrideShapesArray) {
  const auto dir = scratch("shape");
  ASSERT_EQ(cli(with_small({"run", "-o", dir.string(), "--set", "n_paths_retained=1"})).code, kExitOk);
  const auto npy = read(dir / "raytracing_results/scene_proc_0" / files::array);
  EXPECT_NE(npy.find("'shape': (120, 1, 8)"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ImportGeojson) {
  const auto dir = scratch("import");
  fs::create_directories(dir);
  std::ofstream(dir / "city.geojson") << R"({"type": "FeatureCollection", "features": [
    {"type": "Feature", "properties": {"height": 15},
     "geometry": {"type": "Polygon", "coordinates": [[[11.0, 48.0], [11.0002, 48.0], [11.0002, 48.0001], [11.0, 48.0001]]]}}]})";
  const auto a = cli({"import", (dir / "city.geojson").string(), "-o", dir.string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, "48.000050_11.000100\n");
  EXPECT_TRUE(fs::exists(dir / "scenes/scene_48.000050_11.000100/scene.xml"));
  std::ofstream(dir / "broken.geojson") << "{";
  EXPECT_EQ(cli({"import", (dir / "broken.geojson").string(), "-o", dir.string()}).code, kExitIo);
  fs::remove_all(dir);
}
