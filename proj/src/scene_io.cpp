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

#include "mpgen/scene.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace mpgen {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

constexpr const char* kSchemaVersion = "1.0";

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

const pt::ptree& attrs(const pt::ptree& node, const std::string& element) {
  const auto it = node.find("<xmlattr>");
  if (it == node.not_found()) throw SceneError("schema: <" + element + "> has no attributes");
  return it->second;
}

std::string attr(const pt::ptree& node, const std::string& element, const std::string& name) {
  const auto& a = attrs(node, element);
  const auto v = a.get_optional<std::string>(name);
  if (!v) throw SceneError("schema: <" + element + "> lacks attribute '" + name + "'");
  return *v;
}

double attr_double(const pt::ptree& node, const std::string& element, const std::string& name) {
  const auto text = attr(node, element, name);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw SceneError("schema: <" + element + " " + name + "> is not a number: '" + text + "'");
  }
}

long long attr_int(const pt::ptree& node, const std::string& element, const std::string& name) {
  const auto text = attr(node, element, name);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw SceneError("schema: <" + element + " " + name + "> is not an integer: '" + text + "'");
  }
}

std::string ply(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& faces) {
  std::string out = fmt::format(
      "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\n"
      "property float z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
      vertices.size(), faces.size());
  for (const auto& v : vertices) out += fmt::format("{:.9g} {:.9g} {:.9g}\n", v.x(), v.y(), v.z());
  for (const auto& f : faces) out += fmt::format("3 {} {} {}\n", f[0], f[1], f[2]);
  return out;
}

}  // namespace

std::string scene_to_xml(const Scene& scene) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format("<scene version=\"{}\" seed=\"{}\">\n", kSchemaVersion, scene.seed);
  const auto& b = scene.bounds;
  out += fmt::format("  <bounds xmin=\"{}\" ymin=\"{}\" xmax=\"{}\" ymax=\"{}\"/>\n", num(b.xmin),
                     num(b.ymin), num(b.xmax), num(b.ymax));
  if (scene.geo_origin)
    out += fmt::format("  <geo_origin latitude=\"{}\" longitude=\"{}\"/>\n",
                       num(scene.geo_origin->latitude), num(scene.geo_origin->longitude));
  for (const auto& [name, m] : scene.materials)
    out += fmt::format(
        "  <material name=\"{}\" eps_r=\"{}\" conductivity=\"{}\" scattering=\"{}\"/>\n", name,
        num(m.eps_r), num(m.conductivity_s_per_m), num(m.scattering_coeff));
  out += fmt::format("  <ground material=\"{}\"/>\n", scene.ground_material);
  for (const auto& bld : scene.buildings) {
    out += fmt::format("  <building id=\"{}\" height=\"{}\" material=\"{}\">\n", bld.id,
                       num(bld.height_m), bld.material);
    for (const auto& v : bld.footprint)
      out += fmt::format("    <v x=\"{}\" y=\"{}\"/>\n", num(v.x()), num(v.y()));
    out += "  </building>\n";
  }
  out += "</scene>\n";
  return out;
}

Scene scene_from_xml(std::string_view xml) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw SceneError(std::string("malformed scene.xml: ") + e.what());
  }
  const auto root_it = tree.find("scene");
  if (root_it == tree.not_found()) throw SceneError("schema: missing <scene> root");
  const auto& root = root_it->second;
  const auto version = attr(root, "scene", "version");
  if (version != kSchemaVersion)
    throw SceneError("schema: unsupported scene version '" + version + "'");

  Scene scene;
  scene.materials.clear();
  {
    const auto seed = attr(root, "scene", "seed");
    try {
      std::size_t used = 0;
      if (seed.empty() || seed.front() == '-') throw std::invalid_argument(seed);
      scene.seed = std::stoull(seed, &used);
      if (used != seed.size()) throw std::invalid_argument(seed);
    } catch (const std::exception&) {
      throw SceneError("schema: <scene seed> is not an unsigned integer");
    }
  }
  bool have_bounds = false, have_ground = false;
  for (const auto& [tag, node] : root) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag == "bounds") {
      scene.bounds = {attr_double(node, tag, "xmin"), attr_double(node, tag, "ymin"),
                      attr_double(node, tag, "xmax"), attr_double(node, tag, "ymax")};
      have_bounds = true;
    } else if (tag == "geo_origin") {
      scene.geo_origin = GeoOrigin{attr_double(node, tag, "latitude"),
                                   attr_double(node, tag, "longitude")};
    } else if (tag == "material") {
      MaterialParams m;
      m.name = attr(node, tag, "name");
      m.eps_r = attr_double(node, tag, "eps_r");
      m.conductivity_s_per_m = attr_double(node, tag, "conductivity");
      m.scattering_coeff = attr_double(node, tag, "scattering");
      scene.materials[m.name] = m;
    } else if (tag == "ground") {
      scene.ground_material = attr(node, tag, "material");
      have_ground = true;
    } else if (tag == "building") {
      Building bld;
      bld.id = static_cast<int>(attr_int(node, tag, "id"));
      bld.height_m = attr_double(node, tag, "height");
      bld.material = attr(node, tag, "material");
      for (const auto& [vtag, v] : node) {
        if (vtag == "<xmlattr>" || vtag == "<xmlcomment>") continue;
        if (vtag != "v") throw SceneError("schema: unexpected <" + vtag + "> in <building>");
        bld.footprint.emplace_back(attr_double(v, "v", "x"), attr_double(v, "v", "y"));
      }
      scene.buildings.push_back(std::move(bld));
    } else {
      throw SceneError("schema: unexpected element <" + tag + ">");
    }
  }
  if (!have_bounds) throw SceneError("schema: missing <bounds>");
  if (!have_ground) throw SceneError("schema: missing <ground>");
  try {
    validate_scene(scene);
  } catch (const SceneError& e) {
    throw SceneError(std::string("schema: ") + e.what());
  }
  return scene;
}

void export_scene(const Scene& scene, const fs::path& dir) {
  validate_scene(scene);
  const TriangleMesh mesh = triangulate(scene);
  fs::create_directories(dir / "mesh");
  write_file(dir / "scene.xml", scene_to_xml(scene));

  const auto& b = scene.bounds;
  write_file(dir / "mesh" / "ground.ply",
             ply({{b.xmin, b.ymin, 0.0}, {b.xmax, b.ymin, 0.0}, {b.xmax, b.ymax, 0.0},
                  {b.xmin, b.ymax, 0.0}},
                 {{{0, 1, 2}}, {{0, 2, 3}}}));

  for (std::size_t i = 0; i < scene.buildings.size(); ++i) {
    const auto& bld = scene.buildings[i];
    const int n = static_cast<int>(bld.footprint.size());
    std::vector<Vec3> vertices;
    for (const auto& p : bld.footprint) vertices.emplace_back(p.x(), p.y(), 0.0);
    for (const auto& p : bld.footprint) vertices.emplace_back(p.x(), p.y(), bld.height_m);
    std::vector<std::array<int, 3>> faces;
    for (int e = 0; e < n; ++e) {
      const int e1 = (e + 1) % n;
      faces.push_back({e, e1, n + e1});
      faces.push_back({e, n + e1, n + e});
    }
    for (const auto& t : ear_clip(bld.footprint)) faces.push_back({n + t[0], n + t[1], n + t[2]});
    write_file(dir / "mesh" / fmt::format("building_{}.ply", i), ply(vertices, faces));
  }
}

Scene import_scene(const fs::path& dir) {
  std::ifstream in(dir / "scene.xml", std::ios::binary);
  if (!in) throw IoError("cannot read " + (dir / "scene.xml").string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scene_from_xml(buffer.str());
}

}  // namespace mpgen
