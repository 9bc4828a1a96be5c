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

#include "qav/codes.hpp"

#include <algorithm>
#include <stdexcept>

#include "qav/particles.hpp"

namespace qav::codes {

namespace {

template <class Profile>
DistanceScan scan(std::size_t L, std::size_t n_traj, Criterion kind, double p, std::size_t T,
                  const ScanOptions& opt, Profile&& profile) {
  if (n_traj == 0) throw std::invalid_argument("distance scan: empty ensemble");
  if (opt.start_stride == 0) throw std::invalid_argument("distance scan: zero start stride");
  DistanceScan out;
  out.L = L;
  out.p = p;
  out.T = T;
  out.epsilon = opt.epsilon;
  out.kind = kind;
  std::size_t len = std::min(L, std::max<std::size_t>(opt.initial_length, 1));
  for (;;) {
    std::vector<double> sums(len + 1, 0.0);
    std::size_t count = 0;
    for (std::size_t k = 0; k < n_traj; ++k) {
      for (std::size_t start = 0; start < L; start += opt.start_stride) {
        const auto v = profile(k, start, len);
        for (std::size_t l = 0; l <= len; ++l) sums[l] += static_cast<double>(v[l]);
        ++count;
      }
    }
    for (auto& s : sums) s /= static_cast<double>(count);
    out.criterion = std::move(sums);
    for (std::size_t l = 1; l <= len; ++l) {
      const double c = out.criterion[l];
      const bool bad = kind == Criterion::MutualInformation ? c > opt.epsilon : c >= opt.epsilon;
      if (bad) {
        out.distance = l - 1;
        return out;
      }
    }
    if (len == L) {
      out.distance = L;
      return out;
    }
    len = std::min(L, 2 * len);
  }
}

RankDeficitData kernel_data(const BitMatrix& m, bool left) {
  RankDeficitData d;
  d.L = left ? m.nrows() : m.ncols();
  d.rank = gf2::rank2(m);
  d.kernel = gf2::kernel_basis(left ? m.transpose() : m);
  return d;
}

}  // namespace

void to_json(nlohmann::json& j, const DistanceScan& s) {
  j = nlohmann::json{{"L", s.L},
                     {"p", s.p},
                     {"T", s.T},
                     {"epsilon", s.epsilon},
                     {"criterion", s.criterion},
                     {"distance", s.distance},
                     {"degenerate", s.degenerate}};
}

DistanceScan qecc_distance(const std::vector<stabilizer::PurificationCuts>& ensemble, double p, std::size_t T,
                           const ScanOptions& opt) {
  if (ensemble.empty()) throw std::invalid_argument("qecc_distance: empty ensemble");
  const std::size_t L = ensemble.front().system_size();
  DistanceScan out = scan(L, ensemble.size(), Criterion::MutualInformation, p, T, opt,
                          [&](std::size_t k, std::size_t start, std::size_t len) {
                            return ensemble[k].windows(start, len).mutual;
                          });
  out.degenerate = std::all_of(ensemble.begin(), ensemble.end(), [](const auto& c) { return c.s_q() == 0; });
  return out;
}

RankDeficitData z_error_data(const BitMatrix& h) { return kernel_data(h, true); }

RankDeficitData clc_data(const BitMatrix& m) { return kernel_data(m, false); }

std::vector<std::size_t> window_deficits(const RankDeficitData& d, std::size_t start, std::size_t max_len) {
  const std::size_t len = std::min(max_len, d.L);
  // Kernel columns in window order, then prefix ranks by elimination.
  std::vector<gf2::BitVec> rows;
  rows.reserve(d.kernel.nrows());
  for (const auto& kr : d.kernel.rows()) {
    gf2::BitVec r(len);
    for (std::size_t l = 0; l < len; ++l) {
      if (kr.get((start + l) % d.L)) r.set(l);
    }
    rows.push_back(std::move(r));
  }
  std::vector<std::size_t> out(len + 1, 0);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < len; ++c) {
    std::size_t pivot = gf2::kNpos;
    for (std::size_t i = rank; i < rows.size(); ++i) {
      if (rows[i].get(c)) {
        pivot = i;
        break;
      }
    }
    if (pivot != gf2::kNpos) {
      std::swap(rows[rank], rows[pivot]);
      for (std::size_t i = rank + 1; i < rows.size(); ++i) {
        if (rows[i].get(c)) rows[i] ^= rows[rank];
      }
      ++rank;
    }
    out[c + 1] = c + 1 - rank;
  }
  return out;
}

DistanceScan z_error_distance(const std::vector<RankDeficitData>& ensemble, double p, std::size_t T,
                              const ScanOptions& opt) {
  if (ensemble.empty()) throw std::invalid_argument("z_error_distance: empty ensemble");
  DistanceScan out = scan(ensemble.front().L, ensemble.size(), Criterion::RankDeficit, p, T, opt,
                          [&](std::size_t k, std::size_t start, std::size_t len) {
                            return window_deficits(ensemble[k], start, len);
                          });
  out.degenerate = std::all_of(ensemble.begin(), ensemble.end(), [](const auto& d) { return d.rank == 0; });
  return out;
}

DistanceScan clc_distance(const std::vector<RankDeficitData>& ensemble, double p, std::size_t T,
                          const ScanOptions& opt) {
  return z_error_distance(ensemble, p, T, opt);
}

UmUProfile um_u_profile(const circuit::CircuitRealization& r, std::size_t start_stride) {
  if (r.spec().family != circuit::Family::UmU) throw std::invalid_argument("um_u_profile: UM_U realization expected");
  if (r.num_qubits() != 2 * r.system_size()) throw std::invalid_argument("um_u_profile: reference coupling missing");
  if (start_stride == 0) throw std::invalid_argument("um_u_profile: zero start stride");
  const std::size_t L = r.system_size();
  stabilizer::GraphState g(2 * L);
  g.apply(r.layers());
  const stabilizer::PurificationCuts cuts(g.stabilizers(), L);
  const auto pr = particles::purification_ranks(r, r.steps(), r.steps(), particles::Direction::Reversed);

  UmUProfile out;
  out.s_a.assign(L + 1, 0.0);
  out.mutual.assign(L + 1, 0.0);
  out.neg_log_p2.assign(L + 1, 0.0);
  out.s_q = cuts.s_q();
  out.neg_log_pq = pr.rank_h.back();
  std::size_t count = 0;
  for (std::size_t start = 0; start < L; start += start_stride) {
    const auto prof = cuts.windows(start);
    gf2::Echelon ech(L);
    for (std::size_t l = 0; l <= L; ++l) {
      if (l > 0) ech.insert(pr.h_final.row((start + l - 1) % L));
      out.s_a[l] += static_cast<double>(prof.s_a[l]);
      out.mutual[l] += static_cast<double>(prof.mutual[l]);
      out.neg_log_p2[l] += static_cast<double>(ech.rank());
    }
    ++count;
  }
  for (std::size_t l = 0; l <= L; ++l) {
    out.s_a[l] /= static_cast<double>(count);
    out.mutual[l] /= static_cast<double>(count);
    out.neg_log_p2[l] /= static_cast<double>(count);
  }
  return out;
}

}  // namespace qav::codes
