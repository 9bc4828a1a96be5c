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

// qav: run figure presets and write CSV / JSON results.
//
//   qav list
//   qav describe fig6b
//   qav run fig3b --p 0 --L 512 --samples 2000 --seed 7 --out results/fig3b

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qav/experiment.hpp"

namespace {

using namespace qav;
using namespace qav::experiment;

constexpr int kConfigExit = 2;
constexpr int kFlagExit = 3;

struct RunArgs {
  std::string preset;
  std::string config;
  std::optional<std::size_t> L;
  std::optional<double> p;
  std::optional<std::size_t> T;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> boundary;
  std::optional<std::size_t> threads;
  std::string out;
};

void print_params(const Params& p) {
  nlohmann::json j = p;
  std::cout << j.dump(2) << "\n";
}

int do_list() {
  for (const auto& p : presets()) {
    std::printf("%-13s %-11s %s\n", p.name.c_str(), std::string(to_string(p.engine)).c_str(), p.summary.c_str());
  }
  return 0;
}

int do_describe(const std::string& name) {
  const auto& p = find_preset(name);
  std::cout << p.name << ": " << p.summary << "\n"
            << "engine: " << to_string(p.engine) << "\n"
            << p.details << "\n"
            << "defaults:\n";
  print_params(p.defaults);
  return 0;
}

int do_run(const RunArgs& a) {
  std::string name = a.preset;
  nlohmann::json overrides = nlohmann::json::object();
  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) throw ConfigError("cannot read " + a.config);
    try {
      overrides = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(a.config + ": " + e.what());
    }
    if (!overrides.is_object()) throw ConfigError(a.config + ": expected a JSON object");
    // A manifest from an earlier run: replay its preset and resolved config.
    if (overrides.contains("config") && overrides.at("config").is_object()) {
      nlohmann::json replay = overrides.at("config");
      replay["preset"] = overrides.value("preset", "");
      overrides = replay;
    }
    if (overrides.contains("preset")) {
      const auto from_file = overrides.at("preset").get<std::string>();
      if (!name.empty() && name != from_file) throw ConfigError("preset given twice with different names");
      name = from_file;
      overrides.erase("preset");
    }
  }
  if (name.empty()) throw ConfigError("no preset given");
  const auto& preset = find_preset(name);

  Params params = preset.defaults;
  apply_json(overrides, params);
  if (a.L) override_L(params, *a.L);
  nlohmann::json flags = nlohmann::json::object();
  if (a.p) flags["p"] = *a.p;
  if (a.T) flags["T"] = *a.T;
  if (a.samples) flags["samples"] = *a.samples;
  if (a.seed) flags["seed"] = *a.seed;
  if (a.boundary) flags["boundary"] = *a.boundary;
  apply_json(flags, params);

  const std::size_t threads = a.threads ? *a.threads : default_threads();
  if (threads == 0) throw ConfigError("--threads must be positive");
  const std::string out = a.out.empty() ? "results/" + preset.name : a.out;

  const auto outcome = run_and_write(preset, params, threads, out);
  for (const auto& line : outcome.result.report) std::cout << line << "\n";
  std::fprintf(stderr, "%s: %.1f s on %zu threads, wrote %zu files to %s\n", preset.name.c_str(), outcome.wall_seconds,
               threads, outcome.files.size(), out.c_str());
  if (outcome.result.undersampled) std::fprintf(stderr, "warning: undersampled\n");
  if (outcome.result.degenerate) std::fprintf(stderr, "warning: degenerate\n");
  return outcome.result.undersampled || outcome.result.degenerate ? kFlagExit : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum-automaton circuit simulations"};
  app.require_subcommand(1);

  app.add_subcommand("list", "List the presets");

  auto* describe = app.add_subcommand("describe", "Show what a preset measures and its defaults");
  std::string describe_name;
  describe->add_option("preset", describe_name, "Preset name")->required();

  auto* run = app.add_subcommand("run", "Run a preset");
  RunArgs a;
  run->add_option("-e,--preset,name", a.preset, "Preset name");
  run->add_option("--config", a.config, "JSON file with a \"preset\" key and parameter overrides");
  run->add_option("--L", a.L, "System size (caps the size sweep of sweep presets)");
  run->add_option("--p", a.p, "Measurement rate");
  run->add_option("--T", a.T, "Depth in time steps");
  run->add_option("--samples,--realizations", a.samples, "Number of realizations");
  run->add_option("--seed", a.seed, "Base seed");
  run->add_option("--boundary", a.boundary, "periodic or open");
  run->add_option("--threads", a.threads, "Worker threads (default: QA_VOLUME_THREADS or all cores)");
  run->add_option("--out", a.out, "Output directory (default: results/<preset>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (app.got_subcommand("list")) return do_list();
    if (app.got_subcommand("describe")) return do_describe(describe_name);
    return do_run(a);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigExit;
  }
}
