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

#include "mpgen/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mpgen {

namespace {

const std::set<std::string> kRootKeys = {
    "carrier_frequency_hz", "max_reflection_depth", "enable_diffraction", "enable_scattering",
    "n_paths_retained",     "tx_position",          "rx_grid",            "antenna_model",
    "seed",                 "batch_size",           "batch_time_budget_s", "min_outdoor_fraction",
    "materials",            "scattering_coefficient_default", "scene"};
const std::set<std::string> kGridKeys = {"nx", "ny", "spacing_m", "height_m", "origin_xy"};
const std::set<std::string> kSceneKeys = {
    "bounds",          "ground_material", "block_grid",      "building_probability",
    "footprint_min_m", "footprint_max_m", "height_median_m", "height_sigma",
    "building_count"};
const std::set<std::string> kMaterialKeys = {"eps_r", "conductivity_s_per_m", "scattering_coeff"};

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                const std::string& prefix) {
  if (!map.IsMap()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(join(prefix, key), "unknown key");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "cannot interpret '" + node.Scalar() + "'");
  }
}

template <typename T>
void read(const YAML::Node& map, const std::string& key, const std::string& prefix, T& out) {
  if (const auto node = map[key]) out = scalar<T>(node, join(prefix, key));
}

template <std::size_t N>
std::array<double, N> read_vector(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() != N)
    throw ConfigError(key, "expected a sequence of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = scalar<double>(node[i], key);
  return out;
}

template <typename T>
void read_optional(const YAML::Node& map, const std::string& key, const std::string& prefix,
                   std::optional<T>& out) {
  const auto node = map[key];
  if (!node) return;
  if (node.IsNull()) {
    out.reset();
    return;
  }
  out = scalar<T>(node, join(prefix, key));
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must have the form key.path=value");
  const std::string path = assignment.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError(path, std::string("malformed override value: ") + e.what());
  }

  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError(path, "empty path component");
    parts.push_back(part);
  }
  YAML::Node node(root);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node[parts[i]] || !node[parts[i]].IsMap()) node[parts[i]] = YAML::Node(YAML::NodeType::Map);
    node.reset(node[parts[i]]);
  }
  node[parts.back()] = value;
}

MaterialParams read_material(const YAML::Node& node, const std::string& name,
                             const MaterialTable& builtin, double scattering_default) {
  const std::string prefix = "materials." + name;
  check_keys(node, kMaterialKeys, prefix);
  MaterialParams m;
  if (auto it = builtin.find(name); it != builtin.end()) {
    m = it->second;
  } else {
    if (!node["eps_r"]) throw ConfigError(join(prefix, "eps_r"), "required for a new material");
    if (!node["conductivity_s_per_m"])
      throw ConfigError(join(prefix, "conductivity_s_per_m"), "required for a new material");
    m.scattering_coeff = scattering_default;
  }
  m.name = name;
  read(node, "eps_r", prefix, m.eps_r);
  read(node, "conductivity_s_per_m", prefix, m.conductivity_s_per_m);
  read(node, "scattering_coeff", prefix, m.scattering_coeff);
  return m;
}

TraceConfig from_yaml(const YAML::Node& root) {
  TraceConfig cfg;
  if (root.IsNull()) return cfg;
  check_keys(root, kRootKeys, "");

  read(root, "carrier_frequency_hz", "", cfg.carrier_frequency_hz);
  read(root, "max_reflection_depth", "", cfg.max_reflection_depth);
  read(root, "enable_diffraction", "", cfg.enable_diffraction);
  read(root, "enable_scattering", "", cfg.enable_scattering);
  read(root, "n_paths_retained", "", cfg.n_paths_retained);
  if (const auto tx = root["tx_position"]) {
    const auto v = read_vector<3>(tx, "tx_position");
    cfg.tx_position = {v[0], v[1], v[2]};
  }
  if (const auto grid = root["rx_grid"]) {
    check_keys(grid, kGridKeys, "rx_grid");
    read(grid, "nx", "rx_grid", cfg.rx_grid.nx);
    read(grid, "ny", "rx_grid", cfg.rx_grid.ny);
    read(grid, "spacing_m", "rx_grid", cfg.rx_grid.spacing_m);
    read(grid, "height_m", "rx_grid", cfg.rx_grid.height_m);
    if (const auto o = grid["origin_xy"]) cfg.rx_grid.origin_xy = read_vector<2>(o, "rx_grid.origin_xy");
  }
  if (const auto antenna = root["antenna_model"]) {
    const auto name = scalar<std::string>(antenna, "antenna_model");
    if (name != "isotropic") throw ConfigError("antenna_model", "unsupported model '" + name + "'");
  }
  if (const auto seed = root["seed"]) {
    const auto text = scalar<std::string>(seed, "seed");
    if (text.empty() || text.front() == '-') throw ConfigError("seed", "expected an unsigned integer");
    cfg.seed = scalar<std::uint64_t>(seed, "seed");
  }
  read(root, "batch_size", "", cfg.batch_size);
  read_optional(root, "batch_time_budget_s", "", cfg.batch_time_budget_s);
  read(root, "min_outdoor_fraction", "", cfg.min_outdoor_fraction);
  read(root, "scattering_coefficient_default", "", cfg.scattering_coefficient_default);

  if (const auto materials = root["materials"]) {
    if (!materials.IsMap()) throw ConfigError("materials", "expected a mapping");
    const auto builtin = default_materials(cfg.scattering_coefficient_default);
    for (const auto& kv : materials) {
      const auto name = kv.first.as<std::string>();
      cfg.materials[name] =
          read_material(kv.second, name, builtin, cfg.scattering_coefficient_default);
    }
  }

  if (const auto scene = root["scene"]) {
    check_keys(scene, kSceneKeys, "scene");
    auto& s = cfg.scene;
    if (const auto b = scene["bounds"]) {
      const auto v = read_vector<4>(b, "scene.bounds");
      s.bounds = {v[0], v[1], v[2], v[3]};
    }
    read(scene, "ground_material", "scene", s.ground_material);
    read(scene, "block_grid", "scene", s.block_grid);
    read(scene, "building_probability", "scene", s.building_probability);
    read(scene, "footprint_min_m", "scene", s.footprint_min_m);
    read(scene, "footprint_max_m", "scene", s.footprint_max_m);
    read(scene, "height_median_m", "scene", s.height_median_m);
    read(scene, "height_sigma", "scene", s.height_sigma);
    read_optional(scene, "building_count", "scene", s.building_count);
  }
  return cfg;
}

}  // namespace

std::vector<Violation> validate_config(const TraceConfig& cfg) {
  std::vector<Violation> out;
  auto require = [&](bool ok, const std::string& key, const std::string& message) {
    if (!ok) out.push_back({key, message});
  };

  require(cfg.carrier_frequency_hz > 0.0 && std::isfinite(cfg.carrier_frequency_hz) &&
              std::isfinite(cfg.wavelength_m()) && cfg.wavelength_m() > 0.0,
          "carrier_frequency_hz", "must be a finite positive frequency");
  require(cfg.max_reflection_depth >= 0, "max_reflection_depth", "must be >= 0");
  require(cfg.n_paths_retained >= 1, "n_paths_retained", "must be >= 1");
  require(cfg.tx_position.allFinite(), "tx_position", "must be finite");
  require(cfg.rx_grid.nx >= 1, "rx_grid.nx", "must be >= 1");
  require(cfg.rx_grid.ny >= 1, "rx_grid.ny", "must be >= 1");
  require(cfg.rx_grid.spacing_m > 0.0 && std::isfinite(cfg.rx_grid.spacing_m),
          "rx_grid.spacing_m", "must be > 0");
  require(cfg.rx_grid.height_m > 0.0 && std::isfinite(cfg.rx_grid.height_m), "rx_grid.height_m",
          "must be > 0");
  require(std::isfinite(cfg.rx_grid.origin_xy[0]) && std::isfinite(cfg.rx_grid.origin_xy[1]),
          "rx_grid.origin_xy", "must be finite");
  require(cfg.batch_size >= 1, "batch_size", "must be >= 1");
  // A zero budget is accepted: it forces degradation after every batch.
  require(!cfg.batch_time_budget_s ||
              (*cfg.batch_time_budget_s >= 0.0 && std::isfinite(*cfg.batch_time_budget_s)),
          "batch_time_budget_s", "must be a non-negative number or null");
  require(cfg.min_outdoor_fraction >= 0.0 && cfg.min_outdoor_fraction <= 1.0,
          "min_outdoor_fraction", "must lie in [0, 1]");
  require(cfg.scattering_coefficient_default >= 0.0 && cfg.scattering_coefficient_default <= 1.0,
          "scattering_coefficient_default", "must lie in [0, 1]");
  for (const auto& [name, m] : cfg.materials) {
    if (auto problem = check_material(m); !problem.empty())
      out.push_back({"materials." + name, problem});
  }

  const auto& s = cfg.scene;
  require(s.bounds.xmax > s.bounds.xmin && s.bounds.ymax > s.bounds.ymin, "scene.bounds",
          "must satisfy xmin < xmax and ymin < ymax");
  require(!s.ground_material.empty(), "scene.ground_material", "must be non-empty");
  require(s.block_grid >= 1, "scene.block_grid", "must be >= 1");
  require(s.building_probability >= 0.0 && s.building_probability <= 1.0,
          "scene.building_probability", "must lie in [0, 1]");
  require(s.footprint_min_m > 0.0 && s.footprint_max_m >= s.footprint_min_m,
          "scene.footprint_min_m", "need 0 < footprint_min_m <= footprint_max_m");
  require(s.height_median_m > 0.0, "scene.height_median_m", "must be > 0");
  require(s.height_sigma >= 0.0, "scene.height_sigma", "must be >= 0");
  require(!s.building_count || *s.building_count >= 0, "scene.building_count", "must be >= 0");
  return out;
}

MaterialTable material_table(const TraceConfig& cfg) {
  MaterialTable table = default_materials(cfg.scattering_coefficient_default);
  for (const auto& [name, m] : cfg.materials) table[name] = m;
  return table;
}

TraceConfig load_config(std::string_view text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", std::string("parse error: ") + e.what());
  }
  if (!overrides.empty()) {
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ConfigError("<root>", "expected a mapping");
    for (const auto& o : overrides) apply_override(root, o);
  }
  TraceConfig cfg = from_yaml(root);
  if (const auto violations = validate_config(cfg); !violations.empty()) {
    std::string message = violations.front().message;
    for (std::size_t i = 1; i < violations.size(); ++i)
      message += "; " + violations[i].key + ": " + violations[i].message;
    throw ConfigError(violations.front().key, message);
  }
  return cfg;
}

TraceConfig load_config_file(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_config(buffer.str(), overrides);
}

nlohmann::json config_to_json(const TraceConfig& cfg) {
  using nlohmann::json;
  json materials = json::object();
  for (const auto& [name, m] : cfg.materials) {
    materials[name] = {{"eps_r", m.eps_r},
                       {"conductivity_s_per_m", m.conductivity_s_per_m},
                       {"scattering_coeff", m.scattering_coeff}};
  }
  const auto& s = cfg.scene;
  return {
      {"carrier_frequency_hz", cfg.carrier_frequency_hz},
      {"max_reflection_depth", cfg.max_reflection_depth},
      {"enable_diffraction", cfg.enable_diffraction},
      {"enable_scattering", cfg.enable_scattering},
      {"n_paths_retained", cfg.n_paths_retained},
      {"tx_position", {cfg.tx_position.x(), cfg.tx_position.y(), cfg.tx_position.z()}},
      {"rx_grid",
       {{"nx", cfg.rx_grid.nx},
        {"ny", cfg.rx_grid.ny},
        {"spacing_m", cfg.rx_grid.spacing_m},
        {"height_m", cfg.rx_grid.height_m},
        {"origin_xy", cfg.rx_grid.origin_xy}}},
      {"antenna_model", "isotropic"},
      {"seed", cfg.seed},
      {"batch_size", cfg.batch_size},
      {"batch_time_budget_s",
       cfg.batch_time_budget_s ? json(*cfg.batch_time_budget_s) : json(nullptr)},
      {"min_outdoor_fraction", cfg.min_outdoor_fraction},
      {"materials", materials},
      {"scattering_coefficient_default", cfg.scattering_coefficient_default},
      {"scene",
       {{"bounds", {s.bounds.xmin, s.bounds.ymin, s.bounds.xmax, s.bounds.ymax}},
        {"ground_material", s.ground_material},
        {"block_grid", s.block_grid},
        {"building_probability", s.building_probability},
        {"footprint_min_m", s.footprint_min_m},
        {"footprint_max_m", s.footprint_max_m},
        {"height_median_m", s.height_median_m},
        {"height_sigma", s.height_sigma},
        {"building_count", s.building_count ? json(*s.building_count) : json(nullptr)}}},
  };
}

std::string dump_config(const TraceConfig& cfg) {
  // JSON is a YAML subset, so the yaml-cpp emitter can reproduce the same
  // tree in block style. Doubles use the shortest round-trip representation.
  const nlohmann::json j = config_to_json(cfg);
  YAML::Emitter out;
  const auto emit = [&out](const auto& self, const nlohmann::json& node) -> void {
    if (node.is_object()) {
      out << YAML::BeginMap;
      for (const auto& [k, v] : node.items()) {
        out << YAML::Key << k << YAML::Value;
        self(self, v);
      }
      out << YAML::EndMap;
    } else if (node.is_array()) {
      out << YAML::Flow << YAML::BeginSeq;
      for (const auto& v : node) self(self, v);
      out << YAML::EndSeq;
    } else if (node.is_null()) {
      out << YAML::Null;
    } else if (node.is_boolean()) {
      out << node.get<bool>();
    } else if (node.is_number_unsigned()) {
      out << node.get<std::uint64_t>();
    } else if (node.is_number_integer()) {
      out << node.get<std::int64_t>();
    } else if (node.is_number_float()) {
      out << node.dump();
    } else {
      out << node.get<std::string>();
    }
  };
  emit(emit, j);
  return std::string(out.c_str()) + "\n";
}

}  // namespace mpgen
