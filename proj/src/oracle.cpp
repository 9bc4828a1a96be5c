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

#include "qav/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace qav::oracle {

namespace {

std::uint32_t flip_if(std::uint32_t s, std::size_t control, std::size_t target) {
  return s ^ (((s >> control) & 1U) << target);
}

}  // namespace

PhaseState::PhaseState(std::size_t n) : n_(n), amp_(std::size_t{1} << n, 1) {
  if (n == 0 || n > kMaxQubits) throw std::invalid_argument("PhaseState: unsupported qubit count");
}

PhaseState PhaseState::z2_even(std::size_t n) {
  PhaseState s(n);
  for (std::uint32_t k = 0; k < s.amp_.size(); ++k) {
    if (std::popcount(k) % 2 != 0) s.amp_[k] = 0;
  }
  return s;
}

std::size_t PhaseState::support_size() const {
  std::size_t n = 0;
  for (auto a : amp_) n += a != 0 ? 1 : 0;
  return n;
}

bool PhaseState::equal_weight() const {
  for (auto a : amp_) {
    if (a != 0 && a != 1 && a != -1) return false;
  }
  return support_size() > 0;
}

bool PhaseState::even_parity_support() const {
  for (std::uint32_t k = 0; k < amp_.size(); ++k) {
    if (amp_[k] != 0 && std::popcount(k) % 2 != 0) return false;
  }
  return true;
}

void PhaseState::cnot(std::size_t c, std::size_t t) {
  if (c == t || c >= n_ || t >= n_) throw std::invalid_argument("PhaseState::cnot: bad sites");
  std::vector<std::int8_t> out(amp_.size());
  for (std::uint32_t s = 0; s < amp_.size(); ++s) out[s] = amp_[flip_if(s, c, t)];
  amp_ = std::move(out);
}

void PhaseState::cz(std::size_t a, std::size_t b) {
  if (a == b || a >= n_ || b >= n_) throw std::invalid_argument("PhaseState::cz: bad sites");
  for (std::uint32_t s = 0; s < amp_.size(); ++s) {
    if (((s >> a) & 1U) && ((s >> b) & 1U)) amp_[s] = static_cast<std::int8_t>(-amp_[s]);
  }
}

void PhaseState::cnn(std::size_t c, std::size_t a, std::size_t b) {
  cnot(c, a);
  cnot(c, b);
}

void PhaseState::composite_measure(std::size_t q) {
  if (q >= n_) throw std::invalid_argument("PhaseState::composite_measure: bad site");
  const std::uint32_t bit = 1U << q;
  for (std::uint32_t s = 0; s < amp_.size(); ++s) {
    if (s & bit) amp_[s] = amp_[s & ~bit];
  }
  bool any = false;
  for (auto a : amp_) any |= a != 0;
  if (!any) throw std::runtime_error("PhaseState: projection onto an empty support");
}

void PhaseState::h_pair_rotation(std::size_t left, std::size_t right) {
  // sqrt(2) R in the basis |00>, |01>, |10>, |11> (left bit first).
  static constexpr int kR[4][4] = {{1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, -1, 0}, {1, 0, 0, -1}};
  const std::uint32_t lb = 1U << left;
  const std::uint32_t rb = 1U << right;
  std::vector<std::int8_t> out(amp_.size(), 0);
  for (std::uint32_t s = 0; s < amp_.size(); ++s) {
    if (s & (lb | rb)) continue;
    int in[4];
    for (int ab = 0; ab < 4; ++ab) in[ab] = amp_[s | ((ab & 2) ? lb : 0) | ((ab & 1) ? rb : 0)];
    for (int row = 0; row < 4; ++row) {
      int v = 0;
      for (int col = 0; col < 4; ++col) v += kR[row][col] * in[col];
      if (v < -1 || v > 1) throw std::logic_error("PhaseState: rotation left the {-1,0,1} alphabet");
      out[s | ((row & 2) ? lb : 0) | ((row & 1) ? rb : 0)] = static_cast<std::int8_t>(v);
    }
  }
  amp_ = std::move(out);
}

void PhaseState::apply(const circuit::Layer& layer) {
  if (const auto* u = std::get_if<circuit::UnitaryLayer>(&layer)) {
    for (const auto& g : u->gates) {
      switch (u->kind) {
        case circuit::GateKind::CNOT: cnot(g.control, g.target); break;
        case circuit::GateKind::CZ: cz(g.control, g.target); break;
        case circuit::GateKind::CNN: cnn(g.control, g.target, g.target2); break;
      }
    }
    return;
  }
  for (const auto& e : std::get<circuit::MeasureLayer>(layer).events) {
    if (!e.paired()) {
      composite_measure(e.site);
      continue;
    }
    const std::uint32_t bit = 1U << e.site;
    for (std::uint32_t s = 0; s < amp_.size(); ++s) {
      if (s & bit) amp_[s] = 0;
    }
    h_pair_rotation(e.left, e.right);
  }
}

void PhaseState::apply(std::span<const circuit::Layer> layers) {
  for (const auto& l : layers) apply(l);
}

std::optional<std::size_t> Purity::entropy_bits() const {
  if (num <= 0 || den % num != 0) return std::nullopt;
  const auto ratio = static_cast<std::uint64_t>(den / num);
  if (!std::has_single_bit(ratio)) return std::nullopt;
  return static_cast<std::size_t>(std::countr_zero(ratio));
}

Purity purity_swap(const PhaseState& state, const gf2::BitVec& region) {
  const std::size_t n = state.num_qubits();
  if (region.size() != n) throw std::invalid_argument("purity_swap: region size mismatch");
  std::vector<std::size_t> a_sites;
  std::vector<std::size_t> b_sites;
  for (std::size_t i = 0; i < n; ++i) (region.get(i) ? a_sites : b_sites).push_back(i);
  auto compose = [&](std::uint32_t alpha, std::uint32_t beta) {
    std::uint32_t s = 0;
    for (std::size_t k = 0; k < a_sites.size(); ++k) s |= ((alpha >> k) & 1U) << a_sites[k];
    for (std::size_t k = 0; k < b_sites.size(); ++k) s |= ((beta >> k) & 1U) << b_sites[k];
    return s;
  };
  const std::uint32_t na = 1U << a_sites.size();
  const std::uint32_t nb = 1U << b_sites.size();
  // <psi|<psi| SWAP_A |psi>|psi> = sum_{a1 a2 b1 b2} psi(a1 b1) psi(a2 b2) psi(a2 b1) psi(a1 b2)
  //                             = sum_{a1, a2} (sum_b psi(a1 b) psi(a2 b))^2 for real psi.
  std::vector<std::int8_t> m(static_cast<std::size_t>(na) * nb);
  for (std::uint32_t a = 0; a < na; ++a) {
    for (std::uint32_t b = 0; b < nb; ++b) m[static_cast<std::size_t>(a) * nb + b] = static_cast<std::int8_t>(state.amplitude(compose(a, b)));
  }
  std::int64_t num = 0;
  for (std::uint32_t a1 = 0; a1 < na; ++a1) {
    for (std::uint32_t a2 = 0; a2 < na; ++a2) {
      std::int64_t overlap = 0;
      for (std::uint32_t b = 0; b < nb; ++b) {
        overlap += m[static_cast<std::size_t>(a1) * nb + b] * m[static_cast<std::size_t>(a2) * nb + b];
      }
      num += overlap * overlap;
    }
  }
  const auto norm = static_cast<std::int64_t>(state.support_size());
  Purity p{num, norm * norm};
  const std::int64_t g = std::gcd(p.num, p.den);
  if (g > 0) {
    p.num /= g;
    p.den /= g;
  }
  return p;
}

PairCounts exhaustive_pair_count(const circuit::CircuitRealization& realization, const gf2::BitVec& region,
                                 std::size_t t, Order order) {
  const std::size_t L = realization.system_size();
  if (L > 20) throw std::invalid_argument("exhaustive_pair_count: system too large");
  if (region.size() != L) throw std::invalid_argument("exhaustive_pair_count: region size mismatch");
  if (t > realization.steps()) throw std::invalid_argument("exhaustive_pair_count: t beyond the realization");
  std::uint32_t a_mask = 0;
  for (std::size_t i = 0; i < L; ++i) a_mask |= region.get(i) ? (1U << i) : 0U;
  const std::uint32_t b_mask = ((1U << L) - 1U) & ~a_mask;

  const auto layers = realization.first_steps(t);
  std::vector<const circuit::Layer*> seq;
  for (const auto& l : layers) seq.push_back(&l);
  if (order == Order::Reversed) std::reverse(seq.begin(), seq.end());

  PairCounts c;
  for (std::uint32_t h = 0; h < (1U << L); ++h) {
    std::uint32_t x = h & a_mask;
    std::uint32_t y = h & b_mask;
    bool met = false;
    bool x_dead = x == 0;
    bool y_dead = y == 0;
    bool x_first = x_dead;
    bool y_first = y_dead;
    int phase = 0;
    for (const circuit::Layer* layer : seq) {
      if (const auto* u = std::get_if<circuit::UnitaryLayer>(layer)) {
        for (const auto& g : u->gates) {
          std::uint32_t support = (1U << g.control) | (1U << g.target);
          if (g.target2 != circuit::kNoSite) support |= 1U << g.target2;
          if (!met && (x & support) != 0 && (y & support) != 0) met = true;
          switch (u->kind) {
            case circuit::GateKind::CZ:
              phase ^= static_cast<int>((((x >> g.control) & (y >> g.target)) ^ ((x >> g.target) & (y >> g.control))) & 1U);
              break;
            case circuit::GateKind::CNOT:
              x = flip_if(x, g.control, g.target);
              y = flip_if(y, g.control, g.target);
              break;
            case circuit::GateKind::CNN:
              x = flip_if(flip_if(x, g.control, g.target), g.control, g.target2);
              y = flip_if(flip_if(y, g.control, g.target), g.control, g.target2);
              break;
          }
        }
      } else {
        for (const auto& e : std::get<circuit::MeasureLayer>(*layer).events) {
          if (e.paired()) throw std::invalid_argument("exhaustive_pair_count: paired measurements unsupported");
          x &= ~(1U << e.site);
          y &= ~(1U << e.site);
        }
      }
      const bool xd = x == 0;
      const bool yd = y == 0;
      if (!met && !x_dead && !y_dead) {
        if (xd) x_first = true;
        if (yd) y_first = true;
      }
      x_dead = x_dead || xd;
      y_dead = y_dead || yd;
    }
    ++c.total;
    if (!met) {
      ++c.never_met;
      if (x == 0) ++c.x_extinct_at_t;
    }
    if (x_first) ++c.x_first;
    if (y_first) ++c.y_first;
    if (x_first && y_first) ++c.both;
    c.phase_sum += phase ? -1 : 1;
  }
  return c;
}

}  // namespace qav::oracle
