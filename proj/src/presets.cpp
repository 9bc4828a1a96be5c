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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "qav/codes.hpp"
#include "qav/experiment.hpp"
#include "qav/oracle.hpp"
#include "qav/particles.hpp"
#include "qav/stabilizer.hpp"

namespace qav::experiment {

namespace {

using circuit::CircuitRealization;
using circuit::CircuitSpec;
using circuit::Family;
using gf2::BitVec;
using nlohmann::json;
using particles::Direction;
using stats::Axis;
using stats::EnsembleSeries;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CircuitSpec make_spec(const Params& p, Family f, std::size_t L, double prob, std::size_t T) {
  CircuitSpec s;
  s.family = f;
  s.L = L;
  s.p = prob;
  s.boundary = p.boundary;
  s.schedule = p.schedule;
  s.seed = p.seed;
  if (f == Family::UmU) {
    s.T1 = T;
    s.T2 = T;
  } else {
    s.T = T;
  }
  s.validate();
  return s;
}

BitVec window(std::size_t n, std::size_t start, std::size_t len) {
  BitVec v(n);
  for (std::size_t i = start; i < start + len; ++i) v.set(i);
  return v;
}

void require_family(const Params& p, std::initializer_list<Family> allowed) {
  for (Family f : allowed) {
    if (p.family == f) return;
  }
  throw ConfigError("family " + std::string(circuit::to_string(p.family)) + " is not supported by this preset");
}

std::vector<std::size_t> sweep_sizes(const Params& p) {
  std::vector<std::size_t> s = p.sizes.empty() ? std::vector<std::size_t>{p.L} : p.sizes;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::vector<double> as_doubles(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

/// Power-law fit over [fit_lo, fit_hi] if set, else over `def`. The fit is
/// stored under fits[key] with "value" = sign * exponent.
void fit_into(Result& res, const std::string& key, const std::vector<double>& xs, const std::vector<double>& ys,
              const Params& p, stats::FitRange def, double sign = 1.0) {
  const stats::FitRange range{p.fit_lo > 0 ? p.fit_lo : def.lo, p.fit_hi > 0 ? p.fit_hi : def.hi};
  try {
    const auto f = stats::fit_power_law(xs, ys, range);
    json j = f;
    j["value"] = sign * f.exponent;
    res.fits[key] = j;
    res.report.push_back(key + ": " + fmt("%.4f", sign * f.exponent) + " +- " + fmt("%.4f", f.stderr_exponent) +
                         " over [" + fmt("%g", f.x_min) + ", " + fmt("%g", f.x_max) + "], " +
                         std::to_string(f.points) + " points");
  } catch (const stats::FitError& e) {
    res.fits[key] = json{{"error", e.what()}};
    res.report.push_back(key + ": fit failed: " + e.what());
  }
}

/// Flattened (size index, sample) jobs.
struct Job {
  std::size_t point;
  std::size_t sample;
};

std::vector<Job> jobs_for(std::size_t points, std::size_t samples) {
  std::vector<Job> jobs;
  jobs.reserve(points * samples);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t k = 0; k < samples; ++k) jobs.push_back({i, k});
  }
  return jobs;
}

// ---------------------------------------------------------------- stabilizer

/// S_{[0, L/2)} at the recorded times of one trajectory.
std::vector<double> half_entropy_series(const CircuitRealization& r, const std::vector<std::size_t>& times) {
  const std::size_t L = r.system_size();
  const BitVec a = window(L, 0, L / 2);
  std::vector<double> out;
  out.reserve(times.size());
  std::size_t next = 0;
  if (r.spec().family == Family::Z2) {
    auto t = stabilizer::init_z2_even(L);
    for (std::size_t s = 1; s <= r.steps() && next < times.size(); ++s) {
      t.apply(r.step(s));
      if (s == times[next]) {
        out.push_back(static_cast<double>(stabilizer::entropy(t, a)));
        ++next;
      }
    }
  } else {
    stabilizer::GraphState g(L);
    for (std::size_t s = 1; s <= r.steps() && next < times.size(); ++s) {
      g.apply(r.step(s));
      if (s == times[next]) {
        out.push_back(static_cast<double>(g.entropy(a)));
        ++next;
      }
    }
  }
  return out;
}

Result run_half_entropy_time(const Params& p, std::size_t threads) {
  require_family(p, {Family::Entangle, Family::Z2});
  const std::size_t T = p.horizon(p.L);
  const auto times = stats::log_spaced(T, p.times_per_decade);
  const auto spec = make_spec(p, p.family, p.L, p.p, T);
  const auto rows = parallel_map(p.samples, threads, [&](std::size_t k) {
    auto rng = circuit::rng_stream(p.seed, k, p.L);
    return half_entropy_series(circuit::sample_realization(spec, rng), times);
  });
  EnsembleSeries s(Axis::Time, as_doubles(times));
  for (const auto& v : rows) s.add_series(v);
  Result res;
  res.tables.push_back(series_table("half_entropy", s));
  fit_into(res, "beta2", s.xs(), s.stddevs(), p, {4.0, kInf});
  return res;
}

Result run_half_entropy_steady(const Params& p, std::size_t threads) {
  require_family(p, {Family::Entangle, Family::Z2});
  const auto sizes = sweep_sizes(p);
  const auto jobs = jobs_for(sizes.size(), p.samples);
  const auto values = parallel_map(jobs.size(), threads, [&](std::size_t j) {
    const std::size_t L = sizes[jobs[j].point];
    const std::size_t T = p.horizon(L);
    auto rng = circuit::rng_stream(p.seed, jobs[j].sample, L);
    return half_entropy_series(circuit::sample_realization(make_spec(p, p.family, L, p.p, T), rng), {T}).at(0);
  });
  std::vector<double> xs;
  for (std::size_t L : sizes) xs.push_back(static_cast<double>(L / 2));
  EnsembleSeries s(Axis::SubsystemSize, xs);
  for (std::size_t j = 0; j < jobs.size(); ++j) s.add(jobs[j].point, values[j]);
  Result res;
  res.tables.push_back(series_table("half_entropy", s));
  fit_into(res, "beta1", s.xs(), s.stddevs(), p, {32.0, kInf});
  return res;
}

// ----------------------------------------------------------------- particles

enum class BasisKind { K, M };

Result run_basis_time(const Params& p, std::size_t threads) {
  require_family(p, {Family::Entangle});
  const std::size_t T = p.horizon(p.L);
  const auto times = stats::log_spaced(T, p.times_per_decade);
  const auto spec = make_spec(p, p.family, p.L, p.p, T);
  const BitVec a = window(p.L, 0, p.L / 2);
  const auto rows = parallel_map(p.samples, threads, [&](std::size_t k) {
    auto rng = circuit::rng_stream(p.seed, k, p.L);
    const auto b = particles::single_species_K(circuit::sample_realization(spec, rng), a, T);
    std::vector<double> v;
    for (std::size_t t : times) v.push_back(static_cast<double>(b.eliminated.at(t)));
    return v;
  });
  EnsembleSeries s(Axis::Time, as_doubles(times));
  for (const auto& v : rows) s.add_series(v);
  Result res;
  res.tables.push_back(series_table("neg_log_k", s));
  fit_into(res, "exponent", s.xs(), s.stddevs(), p, {4.0, kInf});
  return res;
}

Result run_basis_steady(const Params& p, std::size_t threads, BasisKind kind) {
  require_family(p, {Family::Entangle});
  const auto sizes = sweep_sizes(p);
  const auto jobs = jobs_for(sizes.size(), p.samples);
  struct Out {
    double value;
    bool steady;
  };
  const auto values = parallel_map(jobs.size(), threads, [&](std::size_t j) {
    const std::size_t L = sizes[jobs[j].point];
    const std::size_t T = p.horizon(L);
    auto rng = circuit::rng_stream(p.seed, jobs[j].sample, L);
    const auto r = circuit::sample_realization(make_spec(p, p.family, L, p.p, T), rng);
    const BitVec a = window(L, 0, L / 2);
    const auto b = kind == BasisKind::K ? particles::single_species_K(r, a, T) : particles::approx_two_species_M(r, a, T);
    return Out{static_cast<double>(b.eliminated.back()), b.steady_at.has_value()};
  });
  std::vector<double> xs;
  for (std::size_t L : sizes) xs.push_back(static_cast<double>(L / 2));
  EnsembleSeries s(Axis::SubsystemSize, xs);
  std::vector<std::size_t> unsteady(sizes.size(), 0);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    s.add(jobs[j].point, values[j].value);
    if (!values[j].steady) ++unsteady[jobs[j].point];
  }
  Result res;
  res.tables.push_back(series_table(kind == BasisKind::K ? "neg_log_k" : "neg_log_m", s));
  json steady = json::array();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    steady.push_back({{"L", sizes[i]}, {"not_steady", unsteady[i]}});
    if (unsteady[i] > 0) {
      res.report.push_back("L=" + std::to_string(sizes[i]) + ": " + std::to_string(unsteady[i]) +
                           " samples not steady at T");
    }
  }
  res.fits["steady"] = steady;
  fit_into(res, "exponent", s.xs(), s.stddevs(), p, {32.0, kInf});
  return res;
}

Result run_two_species(const Params& p, std::size_t threads) {
  require_family(p, {Family::Entangle});
  const std::size_t T = p.horizon(p.L);
  const auto times = stats::log_spaced(T, p.times_per_decade);
  const auto spec = make_spec(p, p.family, p.L, p.p, T);
  const BitVec a = window(p.L, 0, p.L / 2);
  // P(t) per recorded time; negative marks an empty count.
  const auto rows = parallel_map(p.samples, threads, [&](std::size_t k) {
    auto rng = circuit::rng_stream(p.seed, k, p.L);
    const auto r = circuit::sample_realization(spec, rng);
    const auto c = particles::sample_P(r, a, p.configs, {T, Direction::Forward, false}, rng);
    std::vector<double> v;
    for (std::size_t t : times) v.push_back(static_cast<double>(c.never_met.at(t)) / static_cast<double>(c.total));
    return v;
  });
  EnsembleSeries mean_p(Axis::Time, as_doubles(times));
  EnsembleSeries neg_log(Axis::Time, as_doubles(times));
  std::vector<double> zeros(times.size(), 0.0);
  for (const auto& v : rows) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      mean_p.add(i, v[i]);
      if (v[i] > 0.0) {
        neg_log.add(i, -std::log2(v[i]));
      } else {
        zeros[i] += 1.0;
      }
    }
  }
  Result res;
  res.tables.push_back(series_table("p_mean", mean_p));
  Table t = series_table("neg_log_p", neg_log);
  t.header.push_back("zero");
  for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i].push_back(zeros[i]);
  res.tables.push_back(t);

  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (zeros[i] > 0.0) {
      res.undersampled = true;
      continue;
    }
    fx.push_back(neg_log.xs()[i]);
    fy.push_back(neg_log.at(i).stddev());
  }
  if (res.undersampled) res.report.push_back("some realizations ran out of configurations; those times are not fitted");
  fit_into(res, "beta2", fx, fy, p, {4.0, kInf});
  fit_into(res, "alpha", mean_p.xs(), mean_p.means(), p, {10.0, kInf}, -1.0);
  return res;
}

Result run_rwre(const Params& p, std::size_t threads) {
  const std::size_t T = p.T > 0 ? p.T : 10 * p.l_a;
  const auto times = stats::log_spaced(T, p.times_per_decade);
  const auto rows = parallel_map(p.samples, threads, [&](std::size_t k) {
    auto rng = circuit::rng_stream(p.seed, k, p.l_a);
    const auto n = particles::rwre_run(p.l_a, T, rng);
    std::vector<double> v;
    for (std::size_t t : times) v.push_back(static_cast<double>(n.at(t)));
    return v;
  });
  EnsembleSeries s(Axis::Time, as_doubles(times));
  for (const auto& v : rows) s.add_series(v);
  Result res;
  res.tables.push_back(series_table("n_arrived", s));
  fit_into(res, "exponent", s.xs(), s.stddevs(), p, {30.0, kInf});
  return res;
}

// -------------------------------------------------------------- purification

stabilizer::PurificationCuts purified_cuts(const CircuitRealization& r) {
  const std::size_t L = r.system_size();
  stabilizer::GraphState g(2 * L);
  g.apply(r.layers());
  return {g.stabilizers(), L};
}

Result run_purify_profile(const Params& p, std::size_t threads) {
  require_family(p, {Family::Purify});
  const std::size_t L = p.L;
  const std::size_t T = p.horizon(L);
  const auto spec = make_spec(p, Family::Purify, L, p.p, T);
  const auto profiles = parallel_map(p.samples, threads, [&](std::size_t k) {
    auto rng = circuit::rng_stream(p.seed, k, L);
    const auto cuts = purified_cuts(circuit::sample_realization(spec, rng));
    return std::pair{cuts.windows(0), cuts.s_q()};
  });
  std::vector<double> xs(L + 1);
  for (std::size_t i = 0; i <= L; ++i) xs[i] = static_cast<double>(i);
  EnsembleSeries s_a(Axis::SubsystemSize, xs);
  EnsembleSeries s_b(Axis::SubsystemSize, xs);
  EnsembleSeries half_i(Axis::SubsystemSize, xs);
  std::size_t end_mismatch = 0;
  double s_q = 0.0;
  for (const auto& [prof, sq] : profiles) {
    for (std::size_t i = 0; i <= L; ++i) {
      s_a.add(i, static_cast<double>(prof.s_a[i]));
      s_b.add(i, static_cast<double>(prof.s_b[i]));
      half_i.add(i, 0.5 * static_cast<double>(prof.mutual[i]));
    }
    if (prof.s_a[L] != sq) ++end_mismatch;
    s_q += static_cast<double>(sq);
  }
  s_q /= static_cast<double>(profiles.size());
  const auto m = s_a.means();
  const auto peak = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  Result res;
  res.tables.push_back(series_table("s_a", s_a));
  res.tables.push_back(series_table("s_b", s_b));
  res.tables.push_back(series_table("half_mutual_ar", half_i));
  res.fits = {{"s_q_mean", s_q},
              {"peak_l_a", peak},
              {"peak_s_a", m[peak]},
              {"end_s_a", m[L]},
              {"end_mismatches", end_mismatch}};
  res.report.push_back("mean S_Q " + fmt("%.3f", s_q) + ", S_A peaks at L_A = " + std::to_string(peak));
  res.report.push_back("S_A(L) != S_Q in " + std::to_string(end_mismatch) + " samples");
  res.degenerate = s_q == 0.0;
  return res;
}

Result run_purify_halves(const Params& p, std::size_t threads) {
  require_family(p, {Family::Purify});
  const auto sizes = sweep_sizes(p);
  const auto jobs = jobs_for(sizes.size(), p.samples);
  const auto values = parallel_map(jobs.size(), threads, [&](std::size_t j) {
    const std::size_t L = sizes[jobs[j].point];
    auto rng = circuit::rng_stream(p.seed, jobs[j].sample, L);
    const auto cuts = purified_cuts(circuit::sample_realization(make_spec(p, Family::Purify, L, p.p, p.horizon(L)), rng));
    const auto prof = cuts.windows(0, L / 2);
    const double sa = static_cast<double>(prof.s_a[L / 2]);
    const double sb = static_cast<double>(prof.s_b[L / 2]);
    return std::pair{sa, sa + sb - static_cast<double>(cuts.s_q())};
  });
  std::vector<double> xs;
  for (std::size_t L : sizes) xs.push_back(static_cast<double>(L / 2));
  EnsembleSeries s_a(Axis::SubsystemSize, xs);
  EnsembleSeries i_ab(Axis::SubsystemSize, xs);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    s_a.add(jobs[j].point, values[j].first);
    i_ab.add(jobs[j].point, values[j].second);
  }
  Result res;
  res.tables.push_back(series_table("s_a", s_a));
  res.tables.push_back(series_table("mutual_ab", i_ab));
  fit_into(res, "beta1", s_a.xs(), s_a.stddevs(), p, {32.0, kInf});
  fit_into(res, "mutual_ab", i_ab.xs(), i_ab.means(), p, {32.0, kInf});
  return res;
}

// -------------------------------------------------------------------- codes

struct DistanceKinds {
  bool qecc = false;
  bool z = false;
  bool clc = false;
};

struct CodeSample {
  std::optional<stabilizer::PurificationCuts> cuts;
  std::optional<codes::RankDeficitData> z;
  std::optional<codes::RankDeficitData> clc;
};

Table distance_table(const std::string& name, const std::vector<codes::DistanceScan>& scans, std::size_t samples) {
  Table t{name, {"L", "distance", "degenerate", "samples"}, {}};
  for (const auto& s : scans) {
    t.rows.push_back({static_cast<double>(s.L), static_cast<double>(s.distance), s.degenerate ? 1.0 : 0.0,
                      static_cast<double>(samples)});
  }
  return t;
}

void fit_distances(Result& res, const std::string& key, const std::vector<codes::DistanceScan>& scans,
                   const Params& p) {
  const double lo = p.fit_lo > 0 ? p.fit_lo : 64.0;
  const double hi = p.fit_hi > 0 ? p.fit_hi : kInf;
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : scans) {
    if (s.degenerate) {
      res.degenerate = true;
      res.report.push_back(key + ": L=" + std::to_string(s.L) + " has no code");
      continue;
    }
    const auto L = static_cast<double>(s.L);
    if (L >= lo && L <= hi) pts.emplace_back(L, static_cast<double>(s.distance));
  }
  try {
    const auto f = stats::extract_distance_exponent(pts);
    json j = f;
    j["value"] = f.exponent;
    res.fits[key] = j;
    res.report.push_back(key + " exponent: " + fmt("%.4f", f.exponent) + " +- " + fmt("%.4f", f.stderr_exponent) +
                         ", " + std::to_string(f.points) + " sizes");
  } catch (const stats::FitError& e) {
    res.fits[key] = json{{"error", e.what()}};
    res.report.push_back(key + ": fit failed: " + e.what());
  }
}

Result run_distances(const Params& p, std::size_t threads, DistanceKinds kinds) {
  require_family(p, {Family::Purify});
  const auto sizes = sweep_sizes(p);
  const auto jobs = jobs_for(sizes.size(), p.samples);
  auto data = parallel_map(jobs.size(), threads, [&](std::size_t j) {
    const std::size_t L = sizes[jobs[j].point];
    const std::size_t T = p.horizon(L);
    auto rng = circuit::rng_stream(p.seed, jobs[j].sample, L);
    const auto r = circuit::sample_realization(make_spec(p, Family::Purify, L, p.p, T), rng);
    CodeSample s;
    if (kinds.qecc) s.cuts.emplace(purified_cuts(r));
    if (kinds.z) s.z = codes::z_error_data(particles::purification_ranks(r, T, T, Direction::Reversed).h_final);
    if (kinds.clc) s.clc = codes::clc_data(particles::purification_ranks(r, T, T, Direction::Forward).h_final);
    return s;
  });

  codes::ScanOptions opt;
  opt.epsilon = p.epsilon;
  opt.start_stride = p.window_stride;
  struct Scans {
    codes::DistanceScan qecc, z, clc;
    double s_q = 0.0;
  };
  const auto scans = parallel_map(sizes.size(), threads, [&](std::size_t i) {
    const std::size_t L = sizes[i];
    const std::size_t T = p.horizon(L);
    std::vector<stabilizer::PurificationCuts> cuts;
    std::vector<codes::RankDeficitData> z;
    std::vector<codes::RankDeficitData> clc;
    Scans out;
    for (std::size_t j = i * p.samples; j < (i + 1) * p.samples; ++j) {
      if (data[j].cuts) {
        out.s_q += static_cast<double>(data[j].cuts->s_q());
        cuts.push_back(*data[j].cuts);
      }
      if (data[j].z) z.push_back(*data[j].z);
      if (data[j].clc) clc.push_back(*data[j].clc);
    }
    out.s_q /= static_cast<double>(p.samples);
    if (kinds.qecc) out.qecc = codes::qecc_distance(cuts, p.p, T, opt);
    if (kinds.z) out.z = codes::z_error_distance(z, p.p, T, opt);
    if (kinds.clc) out.clc = codes::clc_distance(clc, p.p, T, opt);
    return out;
  });

  Result res;
  json doc = json::object();
  auto emit = [&](bool on, const std::string& key, codes::DistanceScan Scans::*member) {
    if (!on) return;
    std::vector<codes::DistanceScan> v;
    for (const auto& s : scans) v.push_back(s.*member);
    res.tables.push_back(distance_table("distance_" + key, v, p.samples));
    doc[key] = v;
    fit_distances(res, key, v, p);
  };
  emit(kinds.qecc, "qecc", &Scans::qecc);
  emit(kinds.z, "z", &Scans::z);
  emit(kinds.clc, "clc", &Scans::clc);
  res.documents.emplace_back("scans", doc);
  if (kinds.qecc) {
    json sq = json::array();
    for (std::size_t i = 0; i < sizes.size(); ++i) sq.push_back({{"L", sizes[i]}, {"s_q_mean", scans[i].s_q}});
    res.fits["s_q"] = sq;
  }
  if (kinds.qecc && kinds.z) {
    bool above = true;
    for (const auto& s : scans) above = above && s.z.distance > s.qecc.distance;
    res.fits["z_exceeds_qecc"] = above;
    res.report.push_back(std::string("d^Z > d at every size: ") + (above ? "yes" : "no"));
  }
  return res;
}

Result run_um_u(const Params& p, std::size_t threads) {
  const auto sizes = sweep_sizes(p);
  const auto jobs = jobs_for(sizes.size(), p.samples);
  const auto profiles = parallel_map(jobs.size(), threads, [&](std::size_t j) {
    const std::size_t L = sizes[jobs[j].point];
    auto rng = circuit::rng_stream(p.seed, jobs[j].sample, L);
    const auto r = circuit::sample_realization(make_spec(p, Family::UmU, L, p.p, p.horizon(L)), rng);
    return codes::um_u_profile(r, p.window_stride);
  });

  Result res;
  Table summary{"um_u", {"L", "l_c", "distance", "distance_mutual", "zero_variance", "s_q", "neg_log_pq"}, {}};
  std::vector<std::pair<double, double>> size_distance;
  bool all_zero_variance = true;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::size_t L = sizes[i];
    std::vector<double> xs(L + 1);
    for (std::size_t l = 0; l <= L; ++l) xs[l] = static_cast<double>(l);
    EnsembleSeries s_a(Axis::SubsystemSize, xs);
    EnsembleSeries mutual(Axis::SubsystemSize, xs);
    EnsembleSeries p2(Axis::SubsystemSize, xs);
    double s_q = 0.0;
    double pq = 0.0;
    for (std::size_t j = i * p.samples; j < (i + 1) * p.samples; ++j) {
      s_a.add_series(profiles[j].s_a);
      mutual.add_series(profiles[j].mutual);
      p2.add_series(profiles[j].neg_log_p2);
      s_q += static_cast<double>(profiles[j].s_q);
      pq += static_cast<double>(profiles[j].neg_log_pq);
    }
    s_q /= static_cast<double>(p.samples);
    pq /= static_cast<double>(p.samples);
    const std::string tag = "_L" + std::to_string(L);
    res.tables.push_back(series_table("s_a" + tag, s_a));
    res.tables.push_back(series_table("mutual" + tag, mutual));
    res.tables.push_back(series_table("neg_log_p2" + tag, p2));

    // L^c is the first window length where <S_A> leaves the line S_A = L_A;
    // the distance is L - L^c. The epsilon criterion on <I_{A,R}> is kept
    // alongside for comparison.
    std::size_t l_c = L;
    for (std::size_t l = 0; l <= L; ++l) {
      if (s_a.at(l).mean < static_cast<double>(l)) {
        l_c = l;
        break;
      }
    }
    const std::size_t d = L - l_c;
    std::size_t d_mutual = L;
    for (std::size_t l = 1; l <= L; ++l) {
      if (mutual.at(l).mean > p.epsilon) {
        d_mutual = l - 1;
        break;
      }
    }
    bool zero_variance = true;
    for (std::size_t l = 0; l < l_c; ++l) zero_variance = zero_variance && s_a.at(l).m2 == 0.0;
    all_zero_variance = all_zero_variance && zero_variance;
    if (s_q == 0.0) res.degenerate = true;
    summary.rows.push_back({static_cast<double>(L), static_cast<double>(l_c), static_cast<double>(d),
                            static_cast<double>(d_mutual), zero_variance ? 1.0 : 0.0, s_q, pq});
    size_distance.emplace_back(static_cast<double>(L), static_cast<double>(d));
    res.report.push_back("L=" + std::to_string(L) + ": L^c = " + std::to_string(l_c) + ", distance " +
                         std::to_string(d) + ", mutual-information distance " + std::to_string(d_mutual) +
                         (zero_variance ? "" : ", S_A fluctuates below L^c"));
  }
  res.tables.insert(res.tables.begin(), summary);
  res.fits["zero_variance"] = all_zero_variance;
  try {
    const auto f = stats::extract_distance_exponent(size_distance);
    json j = f;
    j["value"] = f.exponent;
    res.fits["distance"] = j;
    res.report.push_back("distance exponent: " + fmt("%.4f", f.exponent));
  } catch (const stats::FitError& e) {
    res.fits["distance"] = json{{"error", e.what()}};
    res.report.push_back(std::string("distance: fit failed: ") + e.what());
  }
  return res;
}

// Probabilities at T for every L_A of a small PURIFY system, from the
// reversed-order sampler.
Result run_p1_profile(const Params& p, std::size_t threads) {
  require_family(p, {Family::Purify});
  const std::size_t L = p.L;
  const std::size_t T = p.horizon(L);
  const auto spec = make_spec(p, Family::Purify, L, p.p, T);
  struct Row {
    std::vector<double> p1, px, py, s_a;
    double rank_h;
  };
  const auto rows = parallel_map(p.samples, threads, [&](std::size_t k) {
    auto rng = circuit::rng_stream(p.seed, k, L);
    const auto r = circuit::sample_realization(spec, rng);
    const auto system = r.without_prefix();
    Row row;
    row.rank_h = static_cast<double>(particles::purification_ranks(system, T, T, Direction::Reversed).rank_h.back());
    const auto prof = purified_cuts(r).windows(0);
    for (std::size_t l = 0; l <= L; ++l) {
      const auto c = particles::sample_P(system, window(L, 0, l), p.configs, {T, Direction::Reversed, true}, rng);
      const double n = static_cast<double>(c.total);
      row.p1.push_back(static_cast<double>(c.x_extinct.at(T)) / n);
      row.px.push_back(static_cast<double>(c.x_first.at(T)) / n);
      row.py.push_back(static_cast<double>(c.y_first.at(T)) / n);
      row.s_a.push_back(static_cast<double>(prof.s_a[l]));
    }
    return row;
  });
  std::vector<double> xs(L + 1);
  for (std::size_t l = 0; l <= L; ++l) xs[l] = static_cast<double>(l);
  EnsembleSeries p1(Axis::SubsystemSize, xs);
  EnsembleSeries px(Axis::SubsystemSize, xs);
  EnsembleSeries py(Axis::SubsystemSize, xs);
  EnsembleSeries s_a(Axis::SubsystemSize, xs);
  std::vector<double> z1(L + 1, 0.0), zx(L + 1, 0.0), zy(L + 1, 0.0);
  auto put = [](EnsembleSeries& s, std::vector<double>& zeros, std::size_t l, double prob, double shift) {
    if (prob > 0.0) {
      s.add(l, -std::log2(prob) + shift);
    } else {
      zeros[l] += 1.0;
    }
  };
  for (const auto& row : rows) {
    for (std::size_t l = 0; l <= L; ++l) {
      put(p1, z1, l, row.p1[l], 0.0);
      put(px, zx, l, row.px[l], 0.0);
      put(py, zy, l, row.py[l], row.rank_h);
      s_a.add(l, row.s_a[l]);
    }
  }
  Result res;
  auto with_zeros = [&](const char* name, const EnsembleSeries& s, const std::vector<double>& z) {
    Table t = series_table(name, s);
    t.header.push_back("zero");
    for (std::size_t l = 0; l <= L; ++l) {
      t.rows[l].push_back(z[l]);
      if (z[l] > 0.0) res.undersampled = true;
    }
    res.tables.push_back(std::move(t));
  };
  with_zeros("neg_log_p1", p1, z1);
  with_zeros("neg_log_px", px, zx);
  with_zeros("neg_log_py_pq", py, zy);
  res.tables.push_back(series_table("s_a", s_a));
  if (res.undersampled) res.report.push_back("some probabilities were zero in the sample; see the zero columns");
  return res;
}

// ------------------------------------------------------------------- oracle

Result run_oracle_check(const Params& p, std::size_t threads) {
  require_family(p, {Family::Entangle});
  const std::size_t L = p.L;
  if (L > 12) throw ConfigError("oracle-check needs L <= 12");
  const std::size_t T = p.horizon(L);
  const auto spec = make_spec(p, Family::Entangle, L, p.p, T);
  const auto rows = parallel_map(p.samples, threads, [&](std::size_t k) {
    auto rng = circuit::rng_stream(p.seed, k, L);
    const auto r = circuit::sample_realization(spec, rng);
    oracle::PhaseState ps(L);
    ps.apply(r.layers());
    stabilizer::GraphState g(L);
    g.apply(r.layers());
    auto tab = stabilizer::init_plus_x(L);
    tab.apply(r.layers());
    std::vector<std::vector<double>> out;
    for (std::size_t l = 1; l < L; ++l) {
      const BitVec a = window(L, 0, l);
      const auto pur = oracle::purity_swap(ps, a);
      const auto bits = pur.entropy_bits();
      const auto counts = oracle::exhaustive_pair_count(r, a, T, oracle::Order::Reversed);
      out.push_back({static_cast<double>(k), static_cast<double>(l), static_cast<double>(g.entropy(a)),
                     static_cast<double>(stabilizer::entropy(tab, a)), bits ? static_cast<double>(*bits) : -1.0,
                     pur.value(), static_cast<double>(counts.never_met) / static_cast<double>(counts.total),
                     static_cast<double>(counts.phase_sum) / static_cast<double>(counts.total)});
    }
    return out;
  });
  Table t{"oracle", {"realization", "l_a", "s_graph", "s_tableau", "s_oracle", "purity", "never_met_fraction",
                       "phase_weighted_fraction"},
          {}};
  std::size_t comparisons = 0;
  std::size_t entropy_mismatch = 0;
  std::size_t pair_mismatch = 0;
  std::size_t phase_mismatch = 0;
  for (const auto& block : rows) {
    for (const auto& row : block) {
      ++comparisons;
      if (row[2] != row[4] || row[3] != row[4]) ++entropy_mismatch;
      if (row[6] != row[5]) ++pair_mismatch;
      if (row[7] != row[5]) ++phase_mismatch;
      t.rows.push_back(row);
    }
  }
  Result res;
  res.tables.push_back(t);
  res.fits = {{"comparisons", comparisons}, {"entropy_mismatches", entropy_mismatch}, {"pair_count_mismatches", pair_mismatch},
              {"phase_count_mismatches", phase_mismatch}};
  res.report.push_back(std::to_string(entropy_mismatch) + " mismatches between stabilizer and exact entropies in " +
                       std::to_string(comparisons) + " cuts");
  res.report.push_back(std::to_string(pair_mismatch) + " cuts where the never-met fraction differs from the purity");
  res.report.push_back(std::to_string(phase_mismatch) + " cuts where the phase-weighted count differs from the purity");
  return res;
}

// ----------------------------------------------------------------- p_c scans

double purified_entropy(const CircuitRealization& r) {
  const std::size_t L = r.system_size();
  if (r.spec().family == Family::Z2) {
    const auto coupled = r.with_reference_coupling();
    auto t = stabilizer::init_plus_x(2 * L);
    const BitVec q = window(2 * L, 0, L);
    t.apply(coupled.step(0));
    // The Z2 dynamics needs even parity on Q.
    t.measure_z_parity(q, 0);
    for (std::size_t s = 1; s <= coupled.steps(); ++s) t.apply(coupled.step(s));
    return static_cast<double>(stabilizer::entropy(t, q));
  }
  return static_cast<double>(purified_cuts(r).s_q());
}

Result run_pc_scan(const Params& p, std::size_t threads) {
  require_family(p, {Family::Purify, Family::Z2});
  const auto sizes = sweep_sizes(p);
  if (p.ps.size() < 2) throw ConfigError("pc scan needs at least two values in ps");
  const std::size_t points = sizes.size() * p.ps.size();
  const auto jobs = jobs_for(points, p.samples);
  const auto values = parallel_map(jobs.size(), threads, [&](std::size_t j) {
    const std::size_t L = sizes[jobs[j].point / p.ps.size()];
    const double prob = p.ps[jobs[j].point % p.ps.size()];
    auto rng = circuit::rng_stream(p.seed, jobs[j].sample, jobs[j].point);
    return purified_entropy(circuit::sample_realization(make_spec(p, p.family, L, prob, p.horizon(L)), rng));
  });
  std::vector<stats::Moments> acc(points);
  for (std::size_t j = 0; j < jobs.size(); ++j) acc[jobs[j].point].add(values[j]);

  Result res;
  Table t{"s_q", {"p", "L", "mean", "stddev", "n"}, {}};
  for (std::size_t i = 0; i < points; ++i) {
    const auto& m = acc[i];
    t.rows.push_back({p.ps[i % p.ps.size()], static_cast<double>(sizes[i / p.ps.size()]), m.mean, m.stddev(),
                      static_cast<double>(m.n)});
  }
  res.tables.push_back(t);

  // The larger system purifies more slowly below p_c and faster above it.
  json crossings = json::array();
  double sum = 0.0;
  std::size_t found = 0;
  for (std::size_t a = 0; a + 1 < sizes.size(); ++a) {
    std::vector<double> diff;
    for (std::size_t k = 0; k < p.ps.size(); ++k) {
      diff.push_back(acc[(a + 1) * p.ps.size() + k].mean - acc[a * p.ps.size() + k].mean);
    }
    json c = {{"L1", sizes[a]}, {"L2", sizes[a + 1]}, {"p", nullptr}};
    for (std::size_t k = 0; k + 1 < diff.size(); ++k) {
      if (diff[k] > 0.0 && diff[k + 1] <= 0.0) {
        const double pc = p.ps[k] + (p.ps[k + 1] - p.ps[k]) * diff[k] / (diff[k] - diff[k + 1]);
        c["p"] = pc;
        sum += pc;
        ++found;
        res.report.push_back("L=" + std::to_string(sizes[a]) + "/" + std::to_string(sizes[a + 1]) +
                             " cross at p = " + fmt("%.4f", pc));
        break;
      }
    }
    if (c["p"].is_null()) {
      res.report.push_back("L=" + std::to_string(sizes[a]) + "/" + std::to_string(sizes[a + 1]) +
                           " do not cross in the scanned range");
    }
    crossings.push_back(c);
  }
  res.fits["crossings"] = crossings;
  res.fits["p_c"] = found > 0 ? json(sum / static_cast<double>(found)) : json(nullptr);
  return res;
}

// ------------------------------------------------------------------ registry

Params base(Family f, double prob) {
  Params p;
  p.family = f;
  p.p = prob;
  return p;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> v;
  for (std::size_t i = 0;; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi + 1e-9) break;
    v.push_back(std::round(x * 1e6) / 1e6);
  }
  return v;
}

std::vector<Preset> build() {
  std::vector<Preset> v;
  const std::vector<std::size_t> mid_sizes = {32, 64, 96, 128, 192, 256};
  const std::vector<std::size_t> code_sizes = {64, 96, 128, 160, 192, 256};

  {
    Params p = base(Family::Entangle, 0.04);
    p.sizes = mid_sizes;
    p.t_factor = 2;
    p.samples = 500;
    v.push_back({"fig3a", "steady-state fluctuation of S_{L/2} against L_A", Engine::Stabilizer,
                 "observable: delta S_A at T = 2L with L_A = L/2 (ENTANGLE); axis: L_A; reference exponent beta1 = "
                 "0.322",
                 p, run_half_entropy_steady});
  }
  {
    Params p = base(Family::Entangle, 0.04);
    p.L = 512;
    p.T = 256;
    p.samples = 200;
    v.push_back({"fig3b", "growth of the fluctuation of S_{L/2} in time", Engine::Stabilizer,
                 "observable: delta S_{L/2}(t) (ENTANGLE); axis: t; reference exponent beta2 = 0.307", p,
                 run_half_entropy_time});
  }
  {
    Params p = base(Family::Entangle, 0.04);
    p.L = 512;
    p.T = 256;
    p.samples = 400;
    v.push_back({"fig4a", "single-species particle model, -log2 K(t)", Engine::Particles,
                 "observable: delta(-log2 K(t)) with L_A = L/2; axis: t; reference exponent 0.294", p,
                 run_basis_time});
  }
  {
    Params p = base(Family::Entangle, 0.04);
    p.sizes = mid_sizes;
    p.t_factor = 4;
    p.samples = 500;
    v.push_back({"fig4b", "single-species particle model in the steady state", Engine::Particles,
                 "observable: delta(-log2 K) at T = 4L with L_A = L/2; axis: L_A; reference exponent 0.245", p,
                 [](const Params& q, std::size_t n) { return run_basis_steady(q, n, BasisKind::K); }});
  }
  {
    Params p = base(Family::Entangle, 0.08);
    p.boundary = circuit::Boundary::Open;
    p.L = 256;
    p.T = 256;
    p.samples = 200;
    v.push_back({"fig5a", "two-species sampler P(t)", Engine::Particles,
                 "observable: mean P(t) and delta(-log2 P(t)) with L_A = L/2, open chain; axis: t; reference "
                 "exponents alpha = 0.938 at p = 0.138, beta2 = 0.307",
                 p, run_two_species});
  }
  {
    Params p = base(Family::Entangle, 0.04);
    p.boundary = circuit::Boundary::Open;
    p.sizes = mid_sizes;
    p.t_factor = 3;
    p.samples = 500;
    v.push_back({"fig5b", "approximated two-species model in the steady state", Engine::Particles,
                 "observable: delta(-log2 M) at T = 3L with L_A = L/2, open chain; axis: L_A; reference exponent "
                 "0.266",
                 p, [](const Params& q, std::size_t n) { return run_basis_steady(q, n, BasisKind::M); }});
  }
  {
    Params p = base(Family::Purify, 0.08);
    p.L = 128;
    p.t_factor = 2;
    p.samples = 100;
    v.push_back({"fig6a", "PURIFY entropy profile over window length", Engine::Stabilizer,
                 "observable: S_A, S_B and I_{A,R}/2 for A = [0, L_A) at T = 2L; axis: L_A", p,
                 run_purify_profile});
  }
  {
    Params p = base(Family::Purify, 0.04);
    p.sizes = code_sizes;
    p.t_factor = 3;
    p.samples = 50;
    v.push_back({"fig6b", "QECC contiguous distance against L", Engine::Codes,
                 "observable: d_cont from mean I_{A,R} > epsilon at T = 3L; axis: L; reference exponent 0.343", p,
                 [](const Params& q, std::size_t n) { return run_distances(q, n, {true, false, false}); }});
  }
  {
    Params p = base(Family::Purify, 0.08);
    p.L = 32;
    p.t_factor = 3;
    p.samples = 20;
    p.configs = 65536;
    v.push_back({"fig8a", "particle probabilities against L_A", Engine::Particles,
                 "observable: -log2 P1, -log2 P_X and -log2 P_Y - log2 P_Q at T = 3L next to S_A; axis: L_A", p,
                 run_p1_profile});
  }
  {
    Params p = base(Family::Purify, 0.04);
    p.sizes = code_sizes;
    p.t_factor = 3;
    p.samples = 50;
    v.push_back({"fig8b", "Z-error and QECC distances against L", Engine::Codes,
                 "observable: d^Z_cont from the rank deficit and d_cont at T = 3L; axis: L; reference exponent "
                 "0.327",
                 p, [](const Params& q, std::size_t n) { return run_distances(q, n, {true, true, false}); }});
  }
  {
    Params p = base(Family::Purify, 0.04);
    p.sizes = {64, 96, 128, 160, 192, 256, 320, 400};
    p.t_factor = 4;
    p.samples = 100;
    v.push_back({"fig9b", "classical linear code distance against L", Engine::Codes,
                 "observable: d^c_cont and d^Z_cont at T = 4L; axis: L; reference exponent 0.331", p,
                 [](const Params& q, std::size_t n) { return run_distances(q, n, {false, true, true}); }});
  }
  {
    Params p = base(Family::UmU, 0.08);
    p.sizes = {32, 48, 64, 96, 128};
    p.t_factor = 2;
    p.samples = 20;
    v.push_back({"fig10b", "UM_U window profiles and distance", Engine::Codes,
                 "observable: S_A, I_{A,R} and -log2 P2 against L_A after T1 = T2 = 2L; distance against L "
                 "(linear)",
                 p, run_um_u});
  }
  {
    Params p = base(Family::Z2, 0.0);
    p.L = 512;
    p.T = 64;
    p.samples = 200;
    v.push_back({"figB12", "Z2 family, fluctuation of S_{L/2} in time", Engine::Stabilizer,
                 "observable: delta S_{L/2}(t) from the even-parity state; axis: t; reference exponent beta2 = 0.324",
                 p, run_half_entropy_time});
  }
  {
    Params p;
    p.T = 10000;
    p.samples = 100;
    v.push_back({"figC13", "random walk in a random environment", Engine::Rwre,
                 "observable: delta N(t) with L_A = 1000; axis: t; reference exponent 0.26", p, run_rwre});
  }
  {
    Params p = base(Family::Purify, 0.04);
    p.sizes = mid_sizes;
    p.t_factor = 3;
    p.samples = 300;
    v.push_back({"figD14", "PURIFY half-system entropy and mutual information", Engine::Stabilizer,
                 "observable: delta S_A and mean I_{A,B} with L_A = L/2 at T = 3L; axis: L_A", p,
                 run_purify_halves});
  }
  {
    Params p = base(Family::Entangle, 0.1);
    p.L = 8;
    p.T = 4;
    p.samples = 100;
    v.push_back({"oracle-check", "stabilizer entropies against the exact state-vector purity", Engine::Oracle,
                 "observable: S_A from the graph state and the tableau against -log2 Tr rho_A^2, plus the exhaustive "
                 "never-met fraction; axis: L_A",
                 p, run_oracle_check});
  }
  {
    Params p = base(Family::Purify, 0.0);
    p.sizes = {16, 32, 64};
    p.ps = grid(0.08, 0.20, 0.01);
    p.t_factor = 4;
    p.samples = 200;
    v.push_back({"pc-scan", "S_Q at T = 4L against p for several L", Engine::Stabilizer,
                 "observable: S_Q(4L) (PURIFY); axis: p; reference critical point 0.138", p, run_pc_scan});
  }
  {
    Params p = base(Family::Z2, 0.0);
    p.sizes = {16, 32, 64};
    p.ps = grid(0.20, 0.50, 0.025);
    p.t_factor = 4;
    p.samples = 100;
    v.push_back({"pc-scan-z2", "Z2 family, S_Q at T = 4L against p", Engine::Stabilizer,
                 "observable: S_Q(4L) with the system started in even parity; axis: p; reference critical point "
                 "0.335",
                 p, run_pc_scan});
  }
  return v;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> v = build();
  return v;
}

}  // namespace qav::experiment
