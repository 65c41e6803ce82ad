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

#include "mpgen/export.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace mpgen {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "array payload is written in host order");

namespace {

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr std::array<PathType, 4> kTypes{PathType::los, PathType::reflection, PathType::diffraction,
                                         PathType::scattering};

json angles_json(const AngleSpec& a) { return json::array({a.azimuth_deg, a.elevation_deg}); }

AngleSpec angles_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

std::string sci(double v) { return fmt::format("{:.9e}", v); }

std::size_t path_count(const ResultSet& rs) {
  std::size_t n = 0;
  for (const auto& r : rs.records) n += r.paths.size();
  return n;
}

std::size_t outdoor_count(const ResultSet& rs) {
  return static_cast<std::size_t>(std::count_if(
      rs.records.begin(), rs.records.end(), [](const ReceiverRecord& r) { return r.rx.outdoor; }));
}

}  // namespace

void write_csv(const ResultSet& rs, const fs::path& path) {
  std::string out =
      "rx_index,x_m,y_m,z_m,path_rank,path_type,gain_db,phase_rad,toa_s,aod_az_deg,aod_el_deg,"
      "aoa_az_deg,aoa_el_deg,n_interactions\n";
  for (const auto& rec : rs.records) {
    const Vec3& p = rec.rx.position;
    for (std::size_t k = 0; k < rec.paths.size(); ++k) {
      const auto& path_k = rec.paths[k];
      fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                     rec.rx.index, sci(p.x()), sci(p.y()), sci(p.z()), k, to_string(path_k.type),
                     sci(path_k.gain_db()), sci(std::arg(path_k.gain)), sci(path_k.toa_s),
                     sci(path_k.aod.azimuth_deg), sci(path_k.aod.elevation_deg),
                     sci(path_k.aoa.azimuth_deg), sci(path_k.aoa.elevation_deg), path_k.order);
    }
  }
  write_file(path, out);
}

void write_jsonl(const ResultSet& rs, const fs::path& path) {
  std::string out;
  for (const auto& rec : rs.records) {
    json paths = json::array();
    for (const auto& p : rec.paths) {
      json vertices = json::array();
      for (const auto& v : p.vertices) vertices.push_back(json::array({v.x(), v.y(), v.z()}));
      paths.push_back({{"type", std::string(to_string(p.type))},
                       {"order", p.order},
                       {"gain_re", p.gain.real()},
                       {"gain_im", p.gain.imag()},
                       {"length_m", p.length_m},
                       {"toa_s", p.toa_s},
                       {"aod", angles_json(p.aod)},
                       {"aoa", angles_json(p.aoa)},
                       {"vertices", vertices},
                       {"faces", p.faces}});
    }
    const Vec3& x = rec.rx.position;
    const json line = {{"rx_index", rec.rx.index},
                       {"position", json::array({x.x(), x.y(), x.z()})},
                       {"outdoor", rec.rx.outdoor},
                       {"paths", paths}};
    out += line.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<ReceiverRecord> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<ReceiverRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ReceiverRecord rec;
      rec.rx.index = j.at("rx_index").get<int>();
      const auto& pos = j.at("position");
      rec.rx.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
      rec.rx.outdoor = j.at("outdoor").get<bool>();
      for (const auto& pj : j.at("paths")) {
        PropagationPath p;
        const auto type = path_type_from_string(pj.at("type").get<std::string>());
        if (!type) throw IoError("unknown path type");
        p.type = *type;
        p.order = pj.at("order").get<int>();
        p.gain = {pj.at("gain_re").get<double>(), pj.at("gain_im").get<double>()};
        p.length_m = pj.at("length_m").get<double>();
        p.toa_s = pj.at("toa_s").get<double>();
        p.aod = angles_from(pj.at("aod"));
        p.aoa = angles_from(pj.at("aoa"));
        for (const auto& v : pj.at("vertices"))
          p.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
        p.faces = pj.at("faces").get<std::vector<int>>();
        rec.paths.push_back(std::move(p));
      }
      records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw IoError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    } catch (const IoError& e) {
      throw IoError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return records;
}

std::string npy_header(std::size_t receivers, std::size_t slots) {
  std::string dict =
      fmt::format("{{'descr': '<f8', 'fortran_order': False, 'shape': ({}, {}, {}), }}", receivers,
                  slots, kArrayFields);
  const std::size_t unpadded = 10 + dict.size() + 1;  // magic, version, length, dict, newline
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict += '\n';
  std::string out("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(dict.size());
  out += static_cast<char>(len & 0xff);
  out += static_cast<char>(len >> 8);
  return out + dict;
}

void write_array(const ResultSet& rs, const fs::path& path) {
  const auto slots = static_cast<std::size_t>(rs.config_echo.n_paths_retained);
  std::vector<double> data(rs.records.size() * slots * kArrayFields,
                           std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < rs.records.size(); ++r) {
    const auto& paths = rs.records[r].paths;
    for (std::size_t k = 0; k < std::min(slots, paths.size()); ++k) {
      const auto& p = paths[k];
      double* row = data.data() + (r * slots + k) * kArrayFields;
      row[0] = p.gain_db();
      row[1] = std::arg(p.gain);
      row[2] = p.toa_s;
      row[3] = p.aod.azimuth_deg;
      row[4] = p.aod.elevation_deg;
      row[5] = p.aoa.azimuth_deg;
      row[6] = p.aoa.elevation_deg;
      row[7] = static_cast<double>(static_cast<int>(p.type));
    }
  }
  std::string out = npy_header(rs.records.size(), slots);
  const std::size_t header = out.size();
  out.resize(header + data.size() * sizeof(double));
  std::memcpy(out.data() + header, data.data(), data.size() * sizeof(double));
  write_file(path, out);
}

Histogram histogram(const std::vector<double>& values, int bins) {
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo <= hi)) return h;
  if (hi == lo) hi = lo + 1.0;
  h.lo = lo;
  h.hi = hi;
  for (const double v : values) {
    if (!std::isfinite(v)) continue;
    auto b = static_cast<long>(std::floor((v - lo) / (hi - lo) * bins));
    b = std::clamp<long>(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

namespace {

std::string histogram_csv(const Histogram& h, std::string_view name) {
  std::string out = fmt::format("bin,{0}_lo,{0}_hi,count\n", name);
  const auto bins = static_cast<int>(h.counts.size());
  const double width = (h.hi - h.lo) / bins;
  for (int b = 0; b < bins; ++b) {
    const double lo = h.lo + b * width;
    const double hi = b + 1 == bins ? h.hi : h.lo + (b + 1) * width;
    fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", b, sci(lo), sci(hi),
                   h.counts[static_cast<std::size_t>(b)]);
  }
  return out;
}

}  // namespace

void write_stats(const ResultSet& rs, const fs::path& dir) {
  std::vector<double> gains, toas;
  std::array<std::size_t, 4> by_type{};
  for (const auto& rec : rs.records) {
    for (const auto& p : rec.paths) {
      gains.push_back(p.gain_db());
      toas.push_back(p.toa_s);
      ++by_type[static_cast<std::size_t>(p.type)];
    }
  }
  write_file(dir / files::gain_hist, histogram_csv(histogram(gains), "gain_db"));
  write_file(dir / files::toa_hist, histogram_csv(histogram(toas), "toa_s"));

  const std::size_t total = gains.size();
  std::string types = "path_type,count,fraction\n";
  for (const auto t : kTypes) {
    const auto n = by_type[static_cast<std::size_t>(t)];
    fmt::format_to(std::back_inserter(types), "{},{},{}\n", to_string(t), n,
                   sci(total ? static_cast<double>(n) / static_cast<double>(total) : 0.0));
  }
  write_file(dir / files::type_hist, types);

  std::string txt;
  auto line = [&txt](std::string_view key, const auto& value) {
    fmt::format_to(std::back_inserter(txt), "{}: {}\n", key, value);
  };
  line("scene_id", rs.scene_id);
  line("receivers", rs.records.size());
  line("outdoor_receivers", outdoor_count(rs));
  line("outdoor_fraction", fmt::format("{:.6f}", rs.qc.outdoor_fraction));
  line("qc_passed", rs.qc.passed ? "true" : "false");
  line("min_outdoor_fraction", fmt::format("{:.6f}", rs.config_echo.min_outdoor_fraction));
  line("paths", total);
  for (const auto t : kTypes) line(fmt::format("paths_{}", to_string(t)), by_type[static_cast<std::size_t>(t)]);
  line("initial_reflection_depth", rs.config_echo.max_reflection_depth);
  line("degradation_events", rs.degradation_log.size());
  for (const auto& e : rs.degradation_log)
    line("degradation", fmt::format("batch {} depth {} -> {} after {:.6f} s", e.batch_index,
                                    e.old_depth, e.new_depth, e.elapsed_s));
  line("wall_time_s", fmt::format("{:.6f}", rs.wall_time_s));
  write_file(dir / files::stats, txt);
}

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

std::vector<std::uint8_t> scale_to_pixels(const std::vector<double>& values,
                                          const std::vector<bool>& mask) {
  std::vector<double> sorted;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) sorted.push_back(values[i]);
  }
  std::sort(sorted.begin(), sorted.end());
  const double lo = percentile(sorted, 1.0);
  const double hi = percentile(sorted, 99.0);
  std::vector<std::uint8_t> out(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    if (!(hi > lo)) {
      out[i] = 128;  // flat field
      continue;
    }
    const double x = std::clamp(1.0 + (values[i] - lo) / (hi - lo) * 254.0, 1.0, 255.0);
    out[i] = static_cast<std::uint8_t>(std::floor(x + 0.5));
  }
  return out;
}

Raster read_pgm(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string magic;
  int maxval = 0;
  Raster r;
  in >> magic >> r.width >> r.height >> maxval;
  if (!in || magic != "P5" || maxval != 255 || r.width <= 0 || r.height <= 0)
    throw IoError("not an 8-bit P5 image: " + path.string());
  in.get();
  const auto n = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height);
  const auto offset = static_cast<std::size_t>(in.tellg());
  if (bytes.size() != offset + n) throw IoError("truncated image: " + path.string());
  r.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
  return r;
}

void render_heatmaps(const ResultSet& rs, const fs::path& dir) {
  const GridSpec& grid = rs.config_echo.rx_grid;
  const auto n = static_cast<std::size_t>(grid.size());
  if (rs.records.size() != n) throw IoError("result set does not match its receiver grid");

  std::vector<bool> mask(n, false);
  std::array<std::vector<double>, 4> fields;
  for (auto& f : fields) f.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = rs.records[i];
    if (!rec.rx.outdoor || rec.paths.empty()) continue;
    const auto& p = rec.paths.front();
    mask[i] = true;
    fields[0][i] = p.gain_db();
    fields[1][i] = p.toa_s;
    fields[2][i] = p.aoa.elevation_deg;
    fields[3][i] = p.aoa.azimuth_deg;
  }
  const std::string header = fmt::format("P5\n{} {}\n255\n", grid.nx, grid.ny);
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const auto px = scale_to_pixels(fields[f], mask);
    std::string out = header;
    out.resize(header.size() + n);
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const auto row = static_cast<std::size_t>(grid.ny - 1 - j);
        out[header.size() + row * static_cast<std::size_t>(grid.nx) + static_cast<std::size_t>(i)] =
            static_cast<char>(px[static_cast<std::size_t>(j * grid.nx + i)]);
      }
    }
    write_file(dir / files::heatmaps / files::rasters[f], out);
  }
}

json metadata_json(const ResultSet& rs) {
  json log = json::array();
  for (const auto& e : rs.degradation_log) {
    log.push_back({{"batch_index", e.batch_index},
                   {"old_depth", e.old_depth},
                   {"new_depth", e.new_depth},
                   {"elapsed_s", e.elapsed_s}});
  }
  return {{"format_version", kFormatVersion},
          {"scene_id", rs.scene_id},
          {"geo_origin", rs.geo_origin ? json{{"latitude", rs.geo_origin->latitude},
                                              {"longitude", rs.geo_origin->longitude}}
                                       : json(nullptr)},
          {"seed", rs.config_echo.seed},
          {"config", config_to_json(rs.config_echo)},
          {"degradation_log", log},
          {"qc", {{"outdoor_fraction", rs.qc.outdoor_fraction}, {"passed", rs.qc.passed}}},
          {"summary",
           {{"receivers", rs.records.size()},
            {"outdoor_receivers", outdoor_count(rs)},
            {"paths", path_count(rs)}}},
          {"wall_time_s", rs.wall_time_s}};
}

void write_metadata(const ResultSet& rs, const fs::path& dir) {
  write_file(dir / files::metadata, metadata_json(rs).dump(2) + "\n");
}

ResultSet read_metadata(const fs::path& dir) {
  const fs::path path = dir / files::metadata;
  const std::string text = read_file(path);
  ResultSet rs;
  try {
    const json j = json::parse(text);
    if (j.at("format_version").get<std::string>() != kFormatVersion)
      throw IoError("unsupported format_version in " + path.string());
    rs.scene_id = j.at("scene_id").get<std::string>();
    if (const auto& g = j.at("geo_origin"); !g.is_null())
      rs.geo_origin = GeoOrigin{g.at("latitude").get<double>(), g.at("longitude").get<double>()};
    rs.config_echo = load_config(j.at("config").dump());
    for (const auto& e : j.at("degradation_log")) {
      rs.degradation_log.push_back({e.at("batch_index").get<int>(), e.at("old_depth").get<int>(),
                                    e.at("new_depth").get<int>(), e.at("elapsed_s").get<double>()});
    }
    rs.qc.outdoor_fraction = j.at("qc").at("outdoor_fraction").get<double>();
    rs.qc.passed = j.at("qc").at("passed").get<bool>();
    rs.wall_time_s = j.at("wall_time_s").get<double>();
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw IoError(path.string() + ": config echo: " + e.what());
  }
  return rs;
}

void export_analysis(const ResultSet& rs, const fs::path& dir) {
  write_stats(rs, dir);
  render_heatmaps(rs, dir);
}

void export_results(const ResultSet& rs, const fs::path& dir) {
  fs::create_directories(dir);
  write_csv(rs, dir / files::csv);
  write_jsonl(rs, dir / files::jsonl);
  write_array(rs, dir / files::array);
  write_metadata(rs, dir);
  export_analysis(rs, dir);
}

ResultSet read_results(const fs::path& dir) {
  ResultSet rs = read_metadata(dir);
  rs.records = read_jsonl(dir / files::jsonl);
  if (rs.records.size() != static_cast<std::size_t>(rs.config_echo.rx_grid.size()))
    throw IoError("record count does not match the receiver grid in " + dir.string());
  return rs;
}

void write_region_summary(const fs::path& region) {
  std::vector<std::string> scenes;
  if (fs::is_directory(region / "scenes")) {
    for (const auto& entry : fs::directory_iterator(region / "scenes")) {
      const std::string name = entry.path().filename().string();
      if (entry.is_directory() && name.rfind("scene_", 0) == 0) scenes.push_back(name.substr(6));
    }
  }
  std::sort(scenes.begin(), scenes.end());
  std::string list;
  for (const auto& id : scenes) list += id + "\n";
  write_file(region / files::scene_list, list);

  std::vector<fs::path> results;
  if (fs::is_directory(region / "raytracing_results")) {
    for (const auto& entry : fs::directory_iterator(region / "raytracing_results")) {
      if (fs::exists(entry.path() / files::metadata)) results.push_back(entry.path());
    }
  }
  std::sort(results.begin(), results.end());
  std::string txt = fmt::format("scenes: {}\ntraced_scenes: {}\n", scenes.size(), results.size());
  for (const auto& dir : results) {
    const json j = json::parse(read_file(dir / files::metadata));
    const auto& s = j.at("summary");
    fmt::format_to(std::back_inserter(txt),
                   "scene {}: receivers={} outdoor={} paths={} outdoor_fraction={:.6f} qc_passed={} "
                   "degradation_events={}\n",
                   j.at("scene_id").get<std::string>(), s.at("receivers").get<std::size_t>(),
                   s.at("outdoor_receivers").get<std::size_t>(), s.at("paths").get<std::size_t>(),
                   j.at("qc").at("outdoor_fraction").get<double>(),
                   j.at("qc").at("passed").get<bool>() ? "true" : "false",
                   j.at("degradation_log").size());
  }
  write_file(region / files::stats, txt);
}

}  // namespace mpgen
