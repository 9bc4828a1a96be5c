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

#include "qav/particles.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <variant>

namespace qav::particles {

using circuit::Layer;
using circuit::MeasureLayer;
using circuit::UnitaryLayer;
using gf2::kNpos;
using gf2::Word;

LaneMatrix::LaneMatrix(std::size_t sites, std::size_t lanes) : lanes_(lanes), cols_(sites, BitVec(lanes)) {}

LaneMatrix LaneMatrix::from_rows(const BitMatrix& rows) {
  LaneMatrix m(rows.ncols(), rows.nrows());
  for (std::size_t i = 0; i < rows.nrows(); ++i) {
    const BitVec& r = rows.row(i);
    for (std::size_t j = r.first_set(); j != kNpos; j = r.next_set(j + 1)) m.cols_[j].set(i);
  }
  return m;
}

void LaneMatrix::apply(const Layer& layer) { evolve_particle_layer(*this, layer); }

BitVec LaneMatrix::occupied_lanes() const {
  BitVec out(lanes_);
  for (const auto& c : cols_) out |= c;
  return out;
}

BitVec LaneMatrix::occupied_sites(const BitVec& lane_mask) const {
  BitVec out(cols_.size());
  for (std::size_t j = 0; j < cols_.size(); ++j) out.set(j, !cols_[j].disjoint(lane_mask));
  return out;
}

BitMatrix LaneMatrix::to_rows() const {
  BitMatrix out(lanes_, cols_.size());
  for (std::size_t j = 0; j < cols_.size(); ++j) {
    const BitVec& c = cols_[j];
    for (std::size_t i = c.first_set(); i != kNpos; i = c.next_set(i + 1)) out.set(i, j);
  }
  return out;
}

LaneMatrix LaneMatrix::compact(const BitVec& keep) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = keep.first_set(); i != kNpos; i = keep.next_set(i + 1)) idx.push_back(i);
  LaneMatrix out(cols_.size(), idx.size());
  for (std::size_t j = 0; j < cols_.size(); ++j) {
    const BitVec& c = cols_[j];
    BitVec& d = out.cols_[j];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (c.get(idx[k])) d.set(k);
    }
  }
  return out;
}

namespace {

template <class Cnot, class Clear>
void particle_rules(const Layer& layer, Cnot&& cnot, Clear&& clear) {
  if (const auto* u = std::get_if<UnitaryLayer>(&layer)) {
    if (u->kind == circuit::GateKind::CZ) return;
    for (const auto& g : u->gates) {
      cnot(g.control, g.target);
      if (u->kind == circuit::GateKind::CNN) cnot(g.control, g.target2);
    }
    return;
  }
  for (const auto& e : std::get<MeasureLayer>(layer).events) {
    if (e.paired()) cnot(e.site, e.partner());
    clear(e.site);
  }
}

BitVec keep_subset(const BitVec& v, const BitVec& keep) {
  BitVec out(keep.popcount());
  std::size_t k = 0;
  for (std::size_t i = keep.first_set(); i != kNpos; i = keep.next_set(i + 1), ++k) {
    if (v.get(i)) out.set(k);
  }
  return out;
}

// a &= ~b
void and_not(BitVec& a, const BitVec& b) {
  auto aw = a.words();
  const auto bw = b.words();
  for (std::size_t w = 0; w < aw.size(); ++w) aw[w] &= ~bw[w];
}

BitVec complement(const BitVec& v) {
  BitVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.set(i, !v.get(i));
  return out;
}

void check_region(const circuit::CircuitRealization& r, const BitVec& region) {
  if (region.size() != r.system_size()) throw std::invalid_argument("particles: region size mismatch");
}

void check_horizon(const circuit::CircuitRealization& r, std::size_t horizon) {
  if (horizon > r.steps()) throw std::invalid_argument("particles: horizon beyond the realization");
}

// Every live lane with a bit in a window column is combined away: the first
// such lane becomes the pivot, is added to the others and then dropped.
// Returns the number of dropped lanes.
std::size_t eliminate_window(LaneMatrix& m, BitVec& live, const BitVec& window) {
  std::size_t dropped = 0;
  for (std::size_t c = window.first_set(); c != kNpos; c = window.next_set(c + 1)) {
    BitVec hit = m.column(c) & live;
    const std::size_t pivot = hit.first_set();
    if (pivot == kNpos) continue;
    hit.flip(pivot);
    for (std::size_t j = 0; j < m.sites(); ++j) {
      BitVec& col = m.column(j);
      if (!col.get(pivot)) continue;
      if (hit.any()) col ^= hit;
      col.set(pivot, false);
    }
    live.set(pivot, false);
    ++dropped;
  }
  return dropped;
}

class TwoSpeciesEngine {
 public:
  TwoSpeciesEngine(LaneMatrix x, LaneMatrix y, const TwoSpeciesOptions& opt)
      : opt_(opt), x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.lanes();
    counts_.total = n;
    active_ = BitVec(n);
    for (std::size_t i = 0; i < n; ++i) active_.set(i);
    y_dead_ = BitVec(n);
    y_first_ = BitVec(n);
  }

  TwoSpeciesCounts run(const circuit::CircuitRealization& r) {
    update_deaths();
    record();
    for (const auto& step : particle_steps(r, opt_.horizon, opt_.direction)) {
      for (const Layer* layer : step) {
        if (active_.none()) break;
        if (const auto* u = std::get_if<UnitaryLayer>(layer)) {
          meet(*u);
          evolve_particle_layer(x_, *layer);
          evolve_particle_layer(y_, *layer);
        } else {
          evolve_particle_layer(x_, *layer);
          evolve_particle_layer(y_, *layer);
          update_deaths();
        }
      }
      record();
      maybe_compact();
    }
    return std::move(counts_);
  }

 private:
  void meet(const UnitaryLayer& u) {
    auto act = active_.words();
    for (const auto& g : u.gates) {
      const auto xc = x_.column(g.control).words();
      const auto xt = x_.column(g.target).words();
      const auto yc = y_.column(g.control).words();
      const auto yt = y_.column(g.target).words();
      if (g.target2 == circuit::kNoSite) {
        for (std::size_t w = 0; w < act.size(); ++w) act[w] &= ~((xc[w] | xt[w]) & (yc[w] | yt[w]));
      } else {
        const auto xu = x_.column(g.target2).words();
        const auto yu = y_.column(g.target2).words();
        for (std::size_t w = 0; w < act.size(); ++w) {
          act[w] &= ~((xc[w] | xt[w] | xu[w]) & (yc[w] | yt[w] | yu[w]));
        }
      }
    }
  }

  void update_deaths() {
    const BitVec x_any = x_.occupied_lanes();
    const BitVec y_any = y_.occupied_lanes();
    BitVec x_new = active_;
    and_not(x_new, x_any);
    BitVec y_new = active_;
    and_not(y_new, y_any);
    and_not(y_new, y_dead_);
    // Deaths in the same layer count for both species.
    const BitVec both = x_new & y_new;
    BitVec x_only = x_new;
    and_not(x_only, y_dead_);
    and_not(x_only, both);
    const std::size_t n_x = x_new.popcount();
    frozen_never_met_ += n_x;
    frozen_x_extinct_ += n_x;
    frozen_x_first_ += x_only.popcount() + both.popcount();
    frozen_y_first_ += (x_new & y_first_).popcount() + both.popcount();
    frozen_both_ += both.popcount();
    and_not(active_, x_new);

    and_not(y_new, x_new);
    y_first_ |= y_new;
    y_dead_ |= y_new;
    if (!opt_.track_extinction) {
      const BitVec done = active_ & y_dead_;
      frozen_never_met_ += done.popcount();
      frozen_y_first_ += (done & y_first_).popcount();
      and_not(active_, done);
    }
  }

  void record() {
    const std::size_t alive = active_.popcount();
    counts_.never_met.push_back(frozen_never_met_ + alive);
    counts_.x_extinct.push_back(frozen_x_extinct_);
    counts_.x_first.push_back(frozen_x_first_);
    counts_.y_first.push_back(frozen_y_first_ + (active_ & y_first_).popcount());
    counts_.both.push_back(frozen_both_);
  }

  void maybe_compact() {
    const std::size_t n = active_.size();
    if (n < 256 || 2 * active_.popcount() >= n) return;
    x_ = x_.compact(active_);
    y_ = y_.compact(active_);
    y_dead_ = keep_subset(y_dead_, active_);
    y_first_ = keep_subset(y_first_, active_);
    active_ = BitVec(x_.lanes());
    for (std::size_t i = 0; i < x_.lanes(); ++i) active_.set(i);
  }

  TwoSpeciesOptions opt_;
  LaneMatrix x_;
  LaneMatrix y_;
  BitVec active_;
  BitVec y_dead_;
  BitVec y_first_;
  std::uint64_t frozen_never_met_ = 0;
  std::uint64_t frozen_x_extinct_ = 0;
  std::uint64_t frozen_x_first_ = 0;
  std::uint64_t frozen_y_first_ = 0;
  std::uint64_t frozen_both_ = 0;
  TwoSpeciesCounts counts_;
};

}  // namespace

void evolve_particle_layer(BitVec& h, const Layer& layer) {
  particle_rules(
      layer,
      [&](std::size_t c, std::size_t t) {
        if (h.get(c)) h.flip(t);
      },
      [&](std::size_t s) { h.set(s, false); });
}

void evolve_particle_layer(LaneMatrix& m, const Layer& layer) {
  particle_rules(
      layer, [&](std::size_t c, std::size_t t) { m.cnot(c, t); }, [&](std::size_t s) { m.clear_site(s); });
}

std::vector<std::vector<const Layer*>> particle_steps(const circuit::CircuitRealization& r, std::size_t horizon,
                                                      Direction dir) {
  check_horizon(r, horizon);
  std::vector<std::vector<const Layer*>> out;
  out.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    std::vector<const Layer*> step;
    for (const auto& l : r.step(t)) step.push_back(&l);
    out.push_back(std::move(step));
  }
  if (dir == Direction::Reversed) {
    std::reverse(out.begin(), out.end());
    for (auto& s : out) std::reverse(s.begin(), s.end());
  }
  return out;
}

TwoSpeciesCounts two_species_exhaustive(const circuit::CircuitRealization& r, const BitVec& region,
                                        const TwoSpeciesOptions& opt) {
  check_region(r, region);
  const std::size_t L = r.system_size();
  if (L > 24) throw std::invalid_argument("two_species_exhaustive: system too large");
  const std::size_t n = std::size_t{1} << L;
  LaneMatrix x(L, n);
  LaneMatrix y(L, n);
  for (std::size_t j = 0; j < L; ++j) {
    BitVec& col = region.get(j) ? x.column(j) : y.column(j);
    for (std::size_t h = 0; h < n; ++h) {
      if ((h >> j) & 1U) col.set(h);
    }
  }
  return TwoSpeciesEngine(std::move(x), std::move(y), opt).run(r);
}

TwoSpeciesCounts sample_P(const circuit::CircuitRealization& r, const BitVec& region, std::size_t n_configs,
                          const TwoSpeciesOptions& opt, circuit::RngStream& rng) {
  check_region(r, region);
  const std::size_t L = r.system_size();
  LaneMatrix x(L, n_configs);
  LaneMatrix y(L, n_configs);
  const std::size_t tail = n_configs % gf2::kWordBits;
  const Word last = tail == 0 ? ~Word{0} : (Word{1} << tail) - 1;
  for (std::size_t j = 0; j < L; ++j) {
    auto w = (region.get(j) ? x.column(j) : y.column(j)).words();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = rng.bits();
    if (!w.empty()) w.back() &= last;
  }
  return TwoSpeciesEngine(std::move(x), std::move(y), opt).run(r);
}

BasisSeries single_species_K(const circuit::CircuitRealization& r, const BitVec& region, std::size_t horizon,
                             Direction dir) {
  check_region(r, region);
  const std::size_t L = r.system_size();
  BitMatrix rows(0, L);
  for (std::size_t i = region.first_set(); i != kNpos; i = region.next_set(i + 1)) rows.append_row(BitVec::unit(L, i));
  LaneMatrix h = LaneMatrix::from_rows(rows);
  BitVec live(h.lanes());
  for (std::size_t i = 0; i < h.lanes(); ++i) live.set(i);
  const BitVec outside = complement(region);

  BasisSeries out;
  std::size_t eliminated = 0;
  out.eliminated.push_back(0);
  std::size_t t = 0;
  for (const auto& step : particle_steps(r, horizon, dir)) {
    ++t;
    if (!out.steady_at) {
      for (const Layer* layer : step) {
        evolve_particle_layer(h, *layer);
        if (std::holds_alternative<UnitaryLayer>(*layer)) eliminated += eliminate_window(h, live, outside);
      }
      if ((h.occupied_lanes() & live).none()) out.steady_at = t;
    }
    out.eliminated.push_back(eliminated);
  }
  return out;
}

namespace {

// Complement of the longest Y-free cyclic run that meets the region. Empty
// when there is no Y at all; everything when no Y-free site is in the region.
BitVec periodic_window(const BitVec& y_sites, const BitVec& region) {
  const std::size_t L = y_sites.size();
  BitVec window(L);
  const std::size_t first_y = y_sites.first_set();
  if (first_y == kNpos) return window;
  std::size_t best_len = 0;
  std::size_t best_start = 0;
  // Walk the ring starting right after a Y site so runs never wrap.
  std::size_t run_start = 0;
  std::size_t run_len = 0;
  bool run_meets = false;
  for (std::size_t k = 1; k <= L; ++k) {
    const std::size_t s = (first_y + k) % L;
    if (y_sites.get(s)) {
      if (run_meets && run_len > best_len) {
        best_len = run_len;
        best_start = run_start;
      }
      run_len = 0;
      run_meets = false;
      continue;
    }
    if (run_len == 0) run_start = s;
    ++run_len;
    run_meets = run_meets || region.get(s);
  }
  for (std::size_t i = 0; i < L; ++i) window.set(i);
  for (std::size_t k = 0; k < best_len; ++k) window.set((best_start + k) % L, false);
  return window;
}

BitVec open_window(const BitVec& y_sites) {
  const std::size_t L = y_sites.size();
  BitVec window(L);
  const std::size_t b = y_sites.first_set();
  if (b == kNpos) return window;
  for (std::size_t i = b; i < L; ++i) window.set(i);
  return window;
}

}  // namespace

BasisSeries approx_two_species_M(const circuit::CircuitRealization& r, const BitVec& region, std::size_t horizon,
                                 Direction dir) {
  check_region(r, region);
  const std::size_t L = r.system_size();
  const bool periodic = r.spec().boundary == circuit::Boundary::Periodic;
  BitMatrix xr(0, L);
  BitMatrix yr(0, L);
  for (std::size_t i = 0; i < L; ++i) (region.get(i) ? xr : yr).append_row(BitVec::unit(L, i));
  LaneMatrix hx = LaneMatrix::from_rows(xr);
  LaneMatrix hy = LaneMatrix::from_rows(yr);
  BitVec live(hx.lanes());
  for (std::size_t i = 0; i < hx.lanes(); ++i) live.set(i);
  BitVec y_all(hy.lanes());
  for (std::size_t i = 0; i < hy.lanes(); ++i) y_all.set(i);

  BasisSeries out;
  std::size_t eliminated = 0;
  bool y_extinct = hy.lanes() == 0;
  out.eliminated.push_back(0);
  std::size_t t = 0;
  for (const auto& step : particle_steps(r, horizon, dir)) {
    ++t;
    if (!out.steady_at) {
      for (const Layer* layer : step) {
        evolve_particle_layer(hx, *layer);
        if (!y_extinct) evolve_particle_layer(hy, *layer);
        if (y_extinct || !std::holds_alternative<UnitaryLayer>(*layer)) continue;
        const BitVec y_sites = hy.occupied_sites(y_all);
        if (y_sites.none()) {
          y_extinct = true;
          continue;
        }
        const BitVec window = periodic ? periodic_window(y_sites, region) : open_window(y_sites);
        eliminated += eliminate_window(hx, live, window);
      }
      if (!y_extinct && hy.occupied_lanes().none()) y_extinct = true;
      if ((hx.occupied_lanes() & live).none()) out.steady_at = t;
    }
    out.eliminated.push_back(eliminated);
  }
  return out;
}

BitMatrix evolve_basis(const circuit::CircuitRealization& r, const BitMatrix& rows, std::size_t horizon,
                       Direction dir) {
  if (rows.ncols() != r.system_size()) throw std::invalid_argument("evolve_basis: width mismatch");
  LaneMatrix m = LaneMatrix::from_rows(rows);
  for (const auto& step : particle_steps(r, horizon, dir)) {
    for (const Layer* layer : step) evolve_particle_layer(m, *layer);
  }
  return m.to_rows();
}

PurificationRanks purification_ranks(const circuit::CircuitRealization& r, std::size_t horizon, std::size_t stride,
                                     Direction dir) {
  if (stride == 0) throw std::invalid_argument("purification_ranks: zero stride");
  const std::size_t L = r.system_size();
  LaneMatrix m = LaneMatrix::from_rows(BitMatrix::identity(L));
  PurificationRanks out;
  out.times.push_back(0);
  out.rank_h.push_back(L);
  std::size_t t = 0;
  for (const auto& step : particle_steps(r, horizon, dir)) {
    ++t;
    for (const Layer* layer : step) evolve_particle_layer(m, *layer);
    if (t % stride == 0 || t == horizon) {
      out.times.push_back(t);
      out.rank_h.push_back(gf2::rank2(m.to_rows()));
    }
  }
  out.h_final = m.to_rows();
  return out;
}

std::size_t rank_h_prime(const BitMatrix& h, std::size_t start, std::size_t length) {
  const std::size_t L = h.nrows();
  if (length > L) throw std::invalid_argument("rank_h_prime: window longer than the system");
  std::vector<BitVec> rows;
  for (std::size_t i = 0; i < L; ++i) {
    if ((i + L - start % L) % L >= length) rows.push_back(h.row(i));
  }
  return gf2::rank2(rows);
}

std::vector<std::size_t> rwre_run(std::size_t l_a, std::size_t horizon, circuit::RngStream& rng,
                                  std::optional<double> forced_omega) {
  // Walker k starts at l_a - 1 - k. Positions are shifted by `offset` so that
  // every reachable site indexes the per-site arrays.
  const std::int64_t offset = static_cast<std::int64_t>(horizon) + 1;
  const std::size_t span = l_a + horizon + 2;
  std::vector<std::int64_t> pos(l_a);
  for (std::size_t k = 0; k < l_a; ++k) pos[k] = static_cast<std::int64_t>(l_a - 1 - k);
  std::vector<bool> arrived(l_a, false);
  std::vector<double> omega(span, 0.0);
  std::vector<std::size_t> stamp(span, 0);
  const auto boundary = static_cast<std::int64_t>(l_a);

  std::vector<std::size_t> n(horizon + 1, 0);
  std::size_t front = 0;
  std::size_t moving = l_a;
  for (std::size_t t = 1; t <= horizon; ++t) {
    if (moving > 0) {
      for (std::size_t k = 0; k < l_a; ++k) {
        if (arrived[k]) continue;
        const auto cell = static_cast<std::size_t>(pos[k] + offset);
        if (stamp[cell] != t) {
          stamp[cell] = t;
          omega[cell] = forced_omega ? *forced_omega : rng.uniform();
        }
        pos[k] += rng.uniform() < omega[cell] ? 1 : -1;
        if (pos[k] >= boundary) {
          arrived[k] = true;
          --moving;
        }
      }
      while (front < l_a && arrived[front]) ++front;
    }
    n[t] = front;
  }
  return n;
}

}  // namespace qav::particles
