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

#include <random>

#include "doctest.h"
#include "qav/circuit.hpp"
#include "qav/oracle.hpp"
#include "qav/stabilizer.hpp"

using namespace qav;
using gf2::BitVec;
using oracle::PhaseState;

namespace {

circuit::CircuitSpec spec(circuit::Family f, std::size_t L, double p, std::size_t T) {
  circuit::CircuitSpec s;
  s.family = f;
  s.L = L;
  s.p = p;
  s.T = T;
  return s;
}

BitVec prefix(std::size_t n, std::size_t k) {
  BitVec v(n);
  for (std::size_t i = 0; i < k; ++i) v.set(i);
  return v;
}

}  // namespace

TEST_CASE("CZ phases on |++>") {
  PhaseState s(2);
  s.cz(0, 1);
  CHECK(s.amplitude(0) == 1);
  CHECK(s.amplitude(1) == 1);
  CHECK(s.amplitude(2) == 1);
  CHECK(s.amplitude(3) == -1);
}

TEST_CASE("purity of simple states") {
  PhaseState prod(4);
  CHECK(oracle::purity_swap(prod, prefix(4, 2)).value() == 1.0);
  PhaseState bell(2);
  bell.cz(0, 1);
  const auto p = oracle::purity_swap(bell, prefix(2, 1));
  CHECK(p.num == 1);
  CHECK(p.den == 2);
  CHECK(p.entropy_bits() == 1);
}

TEST_CASE("QA evolution keeps an equal-weight superposition") {
  for (std::uint64_t k = 0; k < 30; ++k) {
    auto stream = circuit::rng_stream(k, 0);
    const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, 8, 0.2, 4), stream);
    PhaseState s(8);
    s.apply(r.layers());
    CHECK(s.equal_weight());
    CHECK(s.support_size() == 256);
  }
}

TEST_CASE("purity equals the stabilizer entropy") {
  std::mt19937_64 rng(5);
  for (auto family : {circuit::Family::Entangle, circuit::Family::Purify}) {
    for (std::uint64_t k = 0; k < 40; ++k) {
      const std::size_t L = family == circuit::Family::Purify ? 4 : 4 + 2 * (k % 3);
      auto stream = circuit::rng_stream(50 + k, 1);
      const auto r = circuit::sample_realization(spec(family, L, 0.05 * (k % 5), 1 + k % 6), stream);
      PhaseState s(r.num_qubits());
      stabilizer::Tableau t = stabilizer::init_plus_x(r.num_qubits());
      s.apply(r.layers());
      t.apply(r.layers());
      for (int q = 0; q < 6; ++q) {
        BitVec a(r.num_qubits());
        for (std::size_t i = 0; i < r.num_qubits(); ++i) a.set(i, (rng() & 1U) != 0);
        const auto purity = oracle::purity_swap(s, a);
        REQUIRE(purity.entropy_bits().has_value());
        CHECK(*purity.entropy_bits() == stabilizer::entropy(t, a));
      }
    }
  }
}

TEST_CASE("Z2 states stay in the even sector and agree with the tableau") {
  std::mt19937_64 rng(6);
  for (std::uint64_t k = 0; k < 30; ++k) {
    const std::size_t L = 6 + 2 * (k % 2);
    auto stream = circuit::rng_stream(70 + k, 0);
    const auto r = circuit::sample_realization(spec(circuit::Family::Z2, L, 0.1 * (k % 6), 3), stream);
    PhaseState s = PhaseState::z2_even(L);
    stabilizer::Tableau t = stabilizer::init_z2_even(L);
    for (const auto& layer : r.layers()) {
      s.apply(layer);
      t.apply(layer);
      CHECK(s.even_parity_support());
      CHECK(s.equal_weight());
    }
    for (int q = 0; q < 6; ++q) {
      BitVec a(L);
      for (std::size_t i = 0; i < L; ++i) a.set(i, (rng() & 1U) != 0);
      const auto purity = oracle::purity_swap(s, a);
      REQUIRE(purity.entropy_bits().has_value());
      CHECK(*purity.entropy_bits() == stabilizer::entropy(t, a));
    }
  }
}

TEST_CASE("pair counts at t = 0 and basic orderings") {
  auto stream = circuit::rng_stream(9, 0);
  const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, 8, 0.1, 4), stream);
  const auto c0 = oracle::exhaustive_pair_count(r, prefix(8, 4), 0);
  CHECK(c0.total == 256);
  CHECK(c0.never_met == 256);
  CHECK(c0.phase_sum == 256);
  std::uint64_t prev = c0.never_met;
  for (std::size_t t = 1; t <= 4; ++t) {
    const auto c = oracle::exhaustive_pair_count(r, prefix(8, 4), t, oracle::Order::Forward);
    CHECK(c.never_met <= prev);
    CHECK(c.x_extinct_at_t <= c.never_met);
    CHECK(c.x_first + c.y_first - c.both <= c.never_met);
    prev = c.never_met;
  }
}

TEST_CASE("p = 1 kills every particle in the first sweep") {
  auto stream = circuit::rng_stream(10, 0);
  const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, 6, 1.0, 2), stream);
  const auto c = oracle::exhaustive_pair_count(r, prefix(6, 3), 2, oracle::Order::Forward);
  // Forward: the first CNOT layer can only bring particles together inside a
  // bond; every survivor of that layer is then measured away.
  CHECK(c.x_extinct_at_t == c.never_met);
  CHECK(c.x_first + c.y_first - c.both == c.never_met);
  CHECK(c.both > 0);
}

TEST_CASE("phase-weighted count reproduces the purity exactly") {
  for (std::uint64_t k = 0; k < 60; ++k) {
    const std::size_t L = 4 + 2 * (k % 3);
    auto stream = circuit::rng_stream(500 + k, 0);
    const std::size_t T = 1 + k % 4;
    const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, L, 0.04 * (k % 5), T), stream);
    PhaseState s(L);
    s.apply(r.layers());
    for (std::size_t la = 1; la < L; ++la) {
      const auto c = oracle::exhaustive_pair_count(r, prefix(L, la), T);
      const auto purity = oracle::purity_swap(s, prefix(L, la));
      // purity = phase_sum / 2^L
      CHECK(c.phase_sum * purity.den == purity.num * static_cast<std::int64_t>(1U << L));
    }
  }
}
