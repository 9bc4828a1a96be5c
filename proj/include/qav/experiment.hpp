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

#ifndef QAV_EXPERIMENT_HPP
#define QAV_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qav/circuit.hpp"
#include "qav/stats.hpp"

namespace qav::experiment {

enum class Engine { Stabilizer, Particles, Codes, Rwre, Oracle };
std::string_view to_string(Engine e);

/// Resolved run parameters. Sweeps over system size use `sizes`; presets
/// that take a single size use `L`. T = 0 means T = t_factor * L.
struct Params {
  circuit::Family family = circuit::Family::Entangle;
  circuit::Boundary boundary = circuit::Boundary::Periodic;
  circuit::MeasureSchedule schedule = circuit::MeasureSchedule::RandomSlot;
  std::size_t L = 64;
  double p = 0.0;
  std::size_t T = 0;
  double t_factor = 2.0;
  std::vector<std::size_t> sizes;
  std::vector<double> ps;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  /// Particle configurations per realization for the samplers.
  std::size_t configs = 4096;
  /// Recorded times per decade for time series.
  std::size_t times_per_decade = 20;
  /// Fit window on the series axis; 0 means the lower / upper end of the data.
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double epsilon = 1.0;
  std::size_t window_stride = 1;
  /// Subsystem length for the RWRE model.
  std::size_t l_a = 1000;

  std::size_t horizon(std::size_t system_size) const;
};

/// --L on a size sweep keeps the default sizes up to L and adds L itself.
void override_L(Params& p, std::size_t L);

void to_json(nlohmann::json& j, const Params& p);
/// Applies the keys present in `j` on top of `p`. Unknown keys and bad values
/// throw ConfigError.
void apply_json(const nlohmann::json& j, Params& p);

/// One CSV file: a header row and numeric rows.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table series_table(std::string name, const stats::EnsembleSeries& s);
void write_csv(std::ostream& os, const Table& t);

struct Result {
  std::vector<Table> tables;
  /// Fit results and derived numbers, written to fits.json.
  nlohmann::json fits = nlohmann::json::object();
  /// Extra JSON documents (file stem -> content).
  std::vector<std::pair<std::string, nlohmann::json>> documents;
  /// Human-readable summary lines.
  std::vector<std::string> report;
  bool undersampled = false;
  bool degenerate = false;

  const Table* table(const std::string& name) const;
};

struct Preset {
  std::string name;
  std::string summary;
  Engine engine = Engine::Stabilizer;
  /// What is measured, the axis, and the reference exponent.
  std::string details;
  Params defaults;
  std::function<Result(const Params&, std::size_t threads)> run;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for unknown names.
const Preset& find_preset(const std::string& name);

/// Worker count: QA_VOLUME_THREADS if set, else the hardware concurrency.
std::size_t default_threads();

/// Runs f(0..n-1) on a pool of `threads` workers and returns the results in
/// index order. The first exception is rethrown after the pool drains.
template <class F>
auto parallel_map(std::size_t n, std::size_t threads, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct RunOutcome {
  Result result;
  double wall_seconds = 0.0;
  std::vector<std::string> files;
};

/// Runs a preset and writes <out>/<table>.csv, fits.json, any extra
/// documents and manifest.json. Throws ConfigError if `out` is not writable.
RunOutcome run_and_write(const Preset& preset, const Params& params, std::size_t threads,
                         const std::filesystem::path& out);

/// The git revision baked in at build time.
std::string_view git_describe();

}  // namespace qav::experiment

#endif  // QAV_EXPERIMENT_HPP
