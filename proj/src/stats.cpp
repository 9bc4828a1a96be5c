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

#include "qav/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace qav::stats {

void Moments::add(double x) {
  ++n;
  const double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void Moments::merge(const Moments& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(o.n);
  const double total = na + nb;
  const double d = o.mean - mean;
  mean += d * nb / total;
  m2 += o.m2 + d * d * na * nb / total;
  n += o.n;
}

double Moments::stddev() const { return std::sqrt(std::max(variance(), 0.0)); }

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::Time:
      return "time";
    case Axis::SubsystemSize:
      return "subsystem-size";
    case Axis::SystemSize:
      return "system-size";
  }
  return "time";
}

EnsembleSeries::EnsembleSeries(Axis axis, std::vector<double> xs)
    : axis_(axis), xs_(std::move(xs)), acc_(xs_.size()) {}

void EnsembleSeries::add_series(const std::vector<double>& values) {
  if (values.size() != xs_.size()) throw std::invalid_argument("EnsembleSeries: series length mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) acc_[i].add(values[i]);
}

void EnsembleSeries::merge(const EnsembleSeries& other) {
  if (other.axis_ != axis_ || other.xs_ != xs_) throw std::invalid_argument("EnsembleSeries: axis mismatch");
  for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i].merge(other.acc_[i]);
}

std::vector<double> EnsembleSeries::means() const {
  std::vector<double> out;
  out.reserve(acc_.size());
  for (const auto& a : acc_) out.push_back(a.mean);
  return out;
}

std::vector<double> EnsembleSeries::stddevs() const {
  std::vector<double> out;
  out.reserve(acc_.size());
  for (const auto& a : acc_) out.push_back(a.stddev());
  return out;
}

void EnsembleSeries::write_csv(std::ostream& os) const {
  os << "x,mean,stddev,n\n";
  char buf[128];
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%llu\n", xs_[i], acc_[i].mean, acc_[i].stddev(),
                  static_cast<unsigned long long>(acc_[i].n));
    os << buf;
  }
}

void to_json(nlohmann::json& j, const FitResult& f) {
  j = nlohmann::json{{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"stderr", f.stderr_exponent},
                     {"x_min", f.x_min},       {"x_max", f.x_max},         {"points", f.points},
                     {"r2", f.r2},             {"warnings", f.warnings}};
}

FitRange central_decade(double x_min, double x_max) {
  if (!(x_min > 0.0) || x_max <= x_min || x_max / x_min <= 10.0) return {x_min, x_max};
  const double center = std::sqrt(x_min * x_max);
  const double half = std::sqrt(10.0);
  return {center / half, center * half};
}

FitResult fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys, std::optional<FitRange> range) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_power_law: length mismatch");
  FitResult f;
  std::vector<double> lx;
  std::vector<double> ly;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (range && (xs[i] < range->lo || xs[i] > range->hi)) continue;
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(ys[i])) {
      ++skipped;
      continue;
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  if (skipped > 0) f.warnings.push_back(std::to_string(skipped) + " nonpositive point(s) excluded");
  const std::size_t n = lx.size();
  if (n < 4) throw FitError("fit_power_law: fewer than 4 usable points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw FitError("fit_power_law: all x values coincide");
  f.exponent = sxy / sxx;
  const double intercept = my - f.exponent * mx;
  f.prefactor = std::exp(intercept);
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - intercept - f.exponent * lx[i];
    sse += r * r;
  }
  f.stderr_exponent = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.x_min = std::exp(*std::min_element(lx.begin(), lx.end()));
  f.x_max = std::exp(*std::max_element(lx.begin(), lx.end()));
  f.points = n;
  return f;
}

FitResult extract_distance_exponent(const std::vector<std::pair<double, double>>& size_distance) {
  if (size_distance.size() < 4) throw FitError("extract_distance_exponent: fewer than 4 system sizes");
  std::vector<double> ls;
  std::vector<double> ds;
  std::size_t skipped = 0;
  for (const auto& [l, d] : size_distance) {
    if (d < 1.0) {
      ++skipped;
      continue;
    }
    ls.push_back(l);
    ds.push_back(d);
  }
  FitResult f = fit_power_law(ls, ds);
  if (skipped > 0) f.warnings.push_back(std::to_string(skipped) + " size(s) with distance below 1 excluded");
  return f;
}

std::vector<std::size_t> log_spaced(std::size_t n, std::size_t per_decade) {
  std::set<std::size_t> pts;
  if (n == 0) return {};
  pts.insert(1);
  pts.insert(n);
  const double step = std::pow(10.0, 1.0 / static_cast<double>(std::max<std::size_t>(per_decade, 1)));
  for (double x = 1.0; x < static_cast<double>(n); x *= step) pts.insert(static_cast<std::size_t>(std::llround(x)));
  return {pts.begin(), pts.end()};
}

}  // namespace qav::stats
