// Copyright 2026 The qavolume Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qav/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef QAV_GIT_DESCRIBE
#define QAV_GIT_DESCRIBE "unknown"
#endif

namespace qav::experiment {

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Stabilizer: return "stabilizer";
    case Engine::Particles: return "particles";
    case Engine::Codes: return "codes";
    case Engine::Rwre: return "rwre";
    case Engine::Oracle: return "oracle";
  }
  return "?";
}

std::size_t Params::horizon(std::size_t system_size) const {
  if (T > 0) return T;
  const auto t = static_cast<std::size_t>(std::llround(t_factor * static_cast<double>(system_size)));
  if (t == 0) throw ConfigError("horizon resolves to zero steps");
  return t;
}

void override_L(Params& p, std::size_t L) {
  p.L = L;
  if (p.sizes.empty()) return;
  std::vector<std::size_t> kept;
  for (std::size_t s : p.sizes) {
    if (s < L) kept.push_back(s);
  }
  kept.push_back(L);
  p.sizes = std::move(kept);
}

void to_json(nlohmann::json& j, const Params& p) {
  j = nlohmann::json{{"family", circuit::to_string(p.family)},
                     {"boundary", circuit::to_string(p.boundary)},
                     {"schedule", circuit::to_string(p.schedule)},
                     {"L", p.L},
                     {"p", p.p},
                     {"T", p.T},
                     {"t_factor", p.t_factor},
                     {"sizes", p.sizes},
                     {"ps", p.ps},
                     {"samples", p.samples},
                     {"seed", p.seed},
                     {"configs", p.configs},
                     {"times_per_decade", p.times_per_decade},
                     {"fit_lo", p.fit_lo},
                     {"fit_hi", p.fit_hi},
                     {"epsilon", p.epsilon},
                     {"window_stride", p.window_stride},
                     {"l_a", p.l_a}};
}

void apply_json(const nlohmann::json& j, Params& p) {
  static const std::set<std::string> kKeys = {"family",  "boundary", "schedule", "L",      "p",
                                              "T",       "t_factor", "sizes",    "ps",     "samples",
                                              "seed",    "configs",  "times_per_decade", "fit_lo",
                                              "fit_hi",  "epsilon",  "window_stride",    "l_a"};
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
  Params out = p;
  try {
    if (j.contains("family")) out.family = circuit::parse_family(j.at("family").get<std::string>());
    if (j.contains("boundary")) out.boundary = circuit::parse_boundary(j.at("boundary").get<std::string>());
    if (j.contains("schedule")) out.schedule = circuit::parse_schedule(j.at("schedule").get<std::string>());
    if (j.contains("L")) out.L = j.at("L").get<std::size_t>();
    if (j.contains("p")) out.p = j.at("p").get<double>();
    if (j.contains("T")) out.T = j.at("T").get<std::size_t>();
    if (j.contains("t_factor")) out.t_factor = j.at("t_factor").get<double>();
    if (j.contains("sizes")) out.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("ps")) out.ps = j.at("ps").get<std::vector<double>>();
    if (j.contains("samples")) out.samples = j.at("samples").get<std::size_t>();
    if (j.contains("seed")) out.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("configs")) out.configs = j.at("configs").get<std::size_t>();
    if (j.contains("times_per_decade")) out.times_per_decade = j.at("times_per_decade").get<std::size_t>();
    if (j.contains("fit_lo")) out.fit_lo = j.at("fit_lo").get<double>();
    if (j.contains("fit_hi")) out.fit_hi = j.at("fit_hi").get<double>();
    if (j.contains("epsilon")) out.epsilon = j.at("epsilon").get<double>();
    if (j.contains("window_stride")) out.window_stride = j.at("window_stride").get<std::size_t>();
    if (j.contains("l_a")) out.l_a = j.at("l_a").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  if (!(out.p >= 0.0 && out.p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  for (double q : out.ps) {
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("every entry of ps must lie in [0, 1]");
  }
  if (out.samples == 0) throw ConfigError("samples must be positive");
  if (out.configs == 0) throw ConfigError("configs must be positive");
  if (out.window_stride == 0) throw ConfigError("window_stride must be positive");
  if (out.times_per_decade == 0) throw ConfigError("times_per_decade must be positive");
  if (out.t_factor < 0.0) throw ConfigError("t_factor must be non-negative");
  if (out.fit_hi > 0.0 && out.fit_hi < out.fit_lo) throw ConfigError("fit_hi must not be below fit_lo");
  if (out.l_a == 0) throw ConfigError("l_a must be positive");
  p = out;
}

Table series_table(std::string name, const stats::EnsembleSeries& s) {
  Table t{std::move(name), {"x", "mean", "stddev", "n"}, {}};
  t.rows.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    t.rows.push_back({s.xs()[i], s.at(i).mean, s.at(i).stddev(), static_cast<double>(s.at(i).n)});
  }
  return t;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  char buf[64];
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
}

const Table* Result::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::size_t default_threads() {
  if (const char* env = std::getenv("QA_VOLUME_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw ConfigError("QA_VOLUME_THREADS must be a positive integer");
    return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::string_view git_describe() { return QAV_GIT_DESCRIBE; }

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
  if (!f) throw ConfigError("cannot write " + path.string());
}

}  // namespace

RunOutcome run_and_write(const Preset& preset, const Params& params, std::size_t threads,
                         const std::filesystem::path& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec || !std::filesystem::is_directory(out)) throw ConfigError("output directory not writable: " + out.string());

  RunOutcome o;
  const auto t0 = std::chrono::steady_clock::now();
  o.result = preset.run(params, threads);
  o.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& t : o.result.tables) {
    std::ostringstream os;
    write_csv(os, t);
    write_file(out / (t.name + ".csv"), os.str());
    o.files.push_back(t.name + ".csv");
  }
  write_file(out / "fits.json", o.result.fits.dump(2) + "\n");
  o.files.push_back("fits.json");
  for (const auto& [stem, doc] : o.result.documents) {
    write_file(out / (stem + ".json"), doc.dump(2) + "\n");
    o.files.push_back(stem + ".json");
  }

  nlohmann::json manifest{{"preset", preset.name},
                          {"engine", to_string(preset.engine)},
                          {"config", params},
                          {"seed", params.seed},
                          {"threads", threads},
                          {"git_describe", git_describe()},
                          {"wall_time_seconds", o.wall_seconds},
                          {"outputs", o.files},
                          {"flags", {{"undersampled", o.result.undersampled}, {"degenerate", o.result.degenerate}}},
                          {"report", o.result.report}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  o.files.push_back("manifest.json");
  return o;
}

}  // namespace qav::experiment
