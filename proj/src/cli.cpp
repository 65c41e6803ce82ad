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

#include "mpgen/cli.hpp"

#include "mpgen/config.hpp"
#include "mpgen/export.hpp"
#include "mpgen/pipeline.hpp"
#include "mpgen/scene.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace mpgen {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> set;
  std::string out;
  std::string scene;
  std::string geojson;
  std::string results;
  int threads = 0;
};

TraceConfig load(const Options& o) {
  std::vector<std::string> overrides = o.set;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  return o.config.empty() ? load_config("", overrides) : load_config_file(o.config, overrides);
}

fs::path scene_dir(const fs::path& region, const std::string& id) {
  return region / "scenes" / ("scene_" + id);
}

fs::path results_dir(const fs::path& region, const std::string& id) {
  return region / "raytracing_results" / ("scene_" + id);
}

Scene generate(const TraceConfig& cfg) {
  try {
    return generate_procedural_scene(cfg.scene, cfg.seed, material_table(cfg));
  } catch (const SceneError& e) {
    throw ConfigError("scene", e.what());  // the parameters cannot be realized
  }
}

Scene load_geojson(const Options& o, const TraceConfig& cfg) {
  std::ifstream in(o.geojson, std::ios::binary);
  if (!in) throw IoError("cannot read " + o.geojson);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return import_footprints(ss.str(), cfg.scene, material_table(cfg), cfg.seed);
  } catch (const SceneError& e) {
    throw IoError(o.geojson + ": " + e.what());
  }
}

Scene load_scene_dir(const std::string& dir) {
  try {
    return import_scene(dir);
  } catch (const SceneError& e) {
    throw IoError(dir + ": " + e.what());
  }
}

void publish_scene(const Scene& scene, const fs::path& region, std::ostream& out) {
  export_scene(scene, scene_dir(region, scene_id(scene)));
  out << scene_id(scene) << '\n';
}

int trace_scene(const Scene& scene, const TraceConfig& cfg, const Options& o, bool analyze,
                std::ostream& err) {
  RunOptions run;
  run.threads = o.threads;
  const ResultSet rs = run_trace(scene, cfg, run);
  const fs::path dir = results_dir(o.out, rs.scene_id);
  if (analyze) {
    export_results(rs, dir);
  } else {
    fs::create_directories(dir);
    write_csv(rs, dir / files::csv);
    write_jsonl(rs, dir / files::jsonl);
    write_array(rs, dir / files::array);
    write_metadata(rs, dir);
  }
  write_region_summary(o.out);
  if (!rs.qc.passed) {
    err << "qc failed: outdoor fraction " << rs.qc.outdoor_fraction << " below "
        << cfg.min_outdoor_fraction << '\n';
    return kExitQc;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Urban RF multipath dataset generator", "mpgen"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");

  Options o;
  auto add_config = [&o](CLI::App* cmd) {
    cmd->add_option("-c,--config", o.config, "YAML configuration file");
    cmd->add_option("--seed", o.seed, "Override the configured seed");
    cmd->add_option("--set", o.set, "Dotted key=value override (repeatable)");
  };
  auto add_out = [&o](CLI::App* cmd) {
    cmd->add_option("-o,--out", o.out, "Region output directory")->required();
  };

  auto* genscene = app.add_subcommand("genscene", "Generate and export a procedural scene");
  add_config(genscene);
  add_out(genscene);

  auto* import = app.add_subcommand("import", "Extrude GeoJSON footprints into a scene");
  add_config(import);
  add_out(import);
  import->add_option("geojson", o.geojson, "GeoJSON FeatureCollection")->required();

  auto* trace = app.add_subcommand("trace", "Trace a stored scene");
  add_config(trace);
  add_out(trace);
  trace->add_option("--scene", o.scene, "Scene directory containing scene.xml")->required();
  trace->add_option("--threads", o.threads, "Worker threads (0 = auto)");

  auto* analyze = app.add_subcommand("analyze", "Regenerate statistics and heatmaps");
  analyze->add_option("results", o.results, "Results directory of one scene")->required();

  auto* run = app.add_subcommand("run", "Generate (or load) a scene, trace and analyze it");
  add_config(run);
  add_out(run);
  run->add_option("--scene", o.scene, "Existing scene directory instead of generating one");
  run->add_option("--threads", o.threads, "Worker threads (0 = auto)");

  auto* defaults = app.add_subcommand("print-defaults", "Print the default configuration");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (print_defaults || defaults->parsed()) {
      out << dump_config(TraceConfig{});
      return kExitOk;
    }
    if (genscene->parsed()) {
      const TraceConfig cfg = load(o);
      publish_scene(generate(cfg), o.out, out);
      write_region_summary(o.out);
      return kExitOk;
    }
    if (import->parsed()) {
      const TraceConfig cfg = load(o);
      publish_scene(load_geojson(o, cfg), o.out, out);
      write_region_summary(o.out);
      return kExitOk;
    }
    if (trace->parsed()) {
      const TraceConfig cfg = load(o);
      return trace_scene(load_scene_dir(o.scene), cfg, o, false, err);
    }
    if (analyze->parsed()) {
      const ResultSet rs = read_results(o.results);
      export_analysis(rs, o.results);
      return kExitOk;
    }
    if (run->parsed()) {
      const TraceConfig cfg = load(o);
      const Scene scene = o.scene.empty() ? generate(cfg) : load_scene_dir(o.scene);
      publish_scene(scene, o.out, out);
      return trace_scene(scene, cfg, o, true, err);
    }
    out << app.help();
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace mpgen
