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

#ifndef QAV_STATS_HPP
#define QAV_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace qav::stats {

/// Streaming count / mean / sum of squared deviations.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  /// Chan et al. pairwise combination.
  void merge(const Moments& other);
  /// Population variance <x^2> - <x>^2.
  double variance() const { return n == 0 ? 0.0 : m2 / static_cast<double>(n); }
  double stddev() const;
};

enum class Axis { Time, SubsystemSize, SystemSize };
std::string_view to_string(Axis a);

/// Moments per axis point, accumulated over realizations.
class EnsembleSeries {
 public:
  EnsembleSeries() = default;
  EnsembleSeries(Axis axis, std::vector<double> xs);

  Axis axis() const { return axis_; }
  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const Moments& at(std::size_t i) const { return acc_[i]; }

  void add(std::size_t i, double value) { acc_[i].add(value); }
  /// One value per axis point.
  void add_series(const std::vector<double>& values);
  /// Throws std::invalid_argument on axis mismatch.
  void merge(const EnsembleSeries& other);

  std::vector<double> means() const;
  std::vector<double> stddevs() const;

  /// Header "x,mean,stddev,n" and one row per point, doubles as %.17g.
  void write_csv(std::ostream& os) const;

 private:
  Axis axis_ = Axis::Time;
  std::vector<double> xs_;
  std::vector<Moments> acc_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// y = prefactor * x^exponent.
struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double stderr_exponent = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t points = 0;
  double r2 = 0.0;
  std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const FitResult& f);

struct FitRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// The central decade of [x_min, x_max] on a log scale, or the whole range
/// when it spans less than a decade.
FitRange central_decade(double x_min, double x_max);

/// Ordinary least squares of log y on log x over points with x in [lo, hi].
/// Points with x <= 0 or y <= 0 are skipped with a warning. Throws FitError
/// with fewer than 4 usable points.
FitResult fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                        std::optional<FitRange> range = std::nullopt);

/// Distances against system size. Throws FitError with fewer than 4 sizes;
/// distances below 1 are skipped with a warning.
FitResult extract_distance_exponent(const std::vector<std::pair<double, double>>& size_distance);

/// Roughly log-spaced integers in [1, n], always including 1 and n.
std::vector<std::size_t> log_spaced(std::size_t n, std::size_t per_decade);

}  // namespace qav::stats

#endif  // QAV_STATS_HPP
