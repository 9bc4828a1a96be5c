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

#include <cmath>
#include <random>

#include "doctest.h"
#include "qav/circuit.hpp"
#include "qav/oracle.hpp"
#include "qav/particles.hpp"
#include "qav/stabilizer.hpp"

using namespace qav;
using gf2::BitMatrix;
using gf2::BitVec;
using particles::Direction;
using particles::LaneMatrix;

namespace {

circuit::CircuitSpec spec(circuit::Family f, std::size_t L, double p, std::size_t T,
                          circuit::Boundary b = circuit::Boundary::Periodic) {
  circuit::CircuitSpec s;
  s.family = f;
  s.L = L;
  s.p = p;
  s.T = T;
  s.boundary = b;
  if (f == circuit::Family::UmU) {
    s.T1 = T / 2;
    s.T2 = T - T / 2;
  }
  return s;
}

BitVec prefix(std::size_t n, std::size_t k) {
  BitVec v(n);
  for (std::size_t i = 0; i < k; ++i) v.set(i);
  return v;
}

BitVec random_vec(std::mt19937_64& rng, std::size_t n) {
  BitVec v(n);
  for (std::size_t i = 0; i < n; ++i) v.set(i, (rng() & 1U) != 0);
  return v;
}

BitVec evolve_one(const circuit::CircuitRealization& r, BitVec h, std::size_t t, Direction dir) {
  for (const auto& step : particles::particle_steps(r, t, dir)) {
    for (const auto* layer : step) particles::evolve_particle_layer(h, *layer);
  }
  return h;
}

}  // namespace

TEST_CASE("particle evolution is linear over GF(2)") {
  std::mt19937_64 rng(1);
  for (std::uint64_t k = 0; k < 10; ++k) {
    auto stream = circuit::rng_stream(k, 0);
    const auto fam = k % 2 ? circuit::Family::Z2 : circuit::Family::Entangle;
    const auto r = circuit::sample_realization(spec(fam, 12, 0.2, 6), stream);
    const BitVec a = random_vec(rng, 12);
    const BitVec b = random_vec(rng, 12);
    for (auto dir : {Direction::Forward, Direction::Reversed}) {
      CHECK((evolve_one(r, a, 6, dir) ^ evolve_one(r, b, 6, dir)) == evolve_one(r, a ^ b, 6, dir));
    }
  }
}

TEST_CASE("lane matrix agrees with single-vector evolution") {
  std::mt19937_64 rng(2);
  auto stream = circuit::rng_stream(2, 0);
  const auto r = circuit::sample_realization(spec(circuit::Family::Z2, 12, 0.3, 5), stream);
  BitMatrix rows(0, 12);
  for (int i = 0; i < 70; ++i) rows.append_row(random_vec(rng, 12));
  const BitMatrix out = particles::evolve_basis(r, rows, 5);
  for (std::size_t i = 0; i < rows.nrows(); ++i) CHECK(out.row(i) == evolve_one(r, rows.row(i), 5, Direction::Forward));
  const LaneMatrix m = LaneMatrix::from_rows(rows);
  CHECK(m.to_rows() == rows);
  BitVec keep(70);
  for (std::size_t i = 0; i < 70; i += 3) keep.set(i);
  const BitMatrix kept = m.compact(keep).to_rows();
  REQUIRE(kept.nrows() == 24);
  for (std::size_t k = 0; k < 24; ++k) CHECK(kept.row(k) == rows.row(3 * k));
}

TEST_CASE("exhaustive lane engine reproduces the pair-count oracle") {
  for (std::uint64_t k = 0; k < 24; ++k) {
    const std::size_t L = 6 + 2 * (k % 3);
    const std::size_t T = 2 + k % 4;
    auto stream = circuit::rng_stream(20 + k, 0);
    const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, L, 0.1 * (k % 4), T), stream);
    const BitVec a = prefix(L, L / 2 - k % 2);
    for (auto dir : {Direction::Forward, Direction::Reversed}) {
      particles::TwoSpeciesOptions opt;
      opt.horizon = T;
      opt.direction = dir;
      const auto c = particles::two_species_exhaustive(r, a, opt);
      REQUIRE(c.never_met.size() == T + 1);
      CHECK(c.never_met[0] == c.total);
      for (std::size_t t = 0; t <= T; ++t) {
        // The oracle evolves through steps 1..t; only the full horizon agrees
        // for the reversed traversal.
        if (dir == Direction::Reversed && t != T) continue;
        const auto o = oracle::exhaustive_pair_count(
            r, a, t, dir == Direction::Forward ? oracle::Order::Forward : oracle::Order::Reversed);
        CHECK(c.total == o.total);
        CHECK(c.never_met[t] == o.never_met);
        CHECK(c.x_extinct[t] == o.x_extinct_at_t);
        CHECK(c.x_first[t] == o.x_first);
        CHECK(c.y_first[t] == o.y_first);
        CHECK(c.both[t] == o.both);
      }
    }
  }
}

TEST_CASE("never-met counts do not depend on extinction tracking") {
  auto stream = circuit::rng_stream(31, 0);
  const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, 10, 0.15, 8), stream);
  particles::TwoSpeciesOptions opt;
  opt.horizon = 8;
  const auto full = particles::two_species_exhaustive(r, prefix(10, 5), opt);
  opt.track_extinction = false;
  const auto lean = particles::two_species_exhaustive(r, prefix(10, 5), opt);
  CHECK(full.never_met == lean.never_met);
  for (std::size_t t = 1; t <= 8; ++t) CHECK(full.never_met[t] <= full.never_met[t - 1]);
}

TEST_CASE("sampled survival fraction is consistent with enumeration") {
  auto stream = circuit::rng_stream(32, 0);
  const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, 12, 0.1, 6), stream);
  particles::TwoSpeciesOptions opt;
  opt.horizon = 6;
  const auto exact = particles::two_species_exhaustive(r, prefix(12, 6), opt);
  auto rng = circuit::rng_stream(33, 0);
  const std::size_t n = 20000;
  const auto s = particles::sample_P(r, prefix(12, 6), n, opt, rng);
  CHECK(s.total == n);
  for (std::size_t t = 0; t <= 6; ++t) {
    const double p = static_cast<double>(exact.never_met[t]) / static_cast<double>(exact.total);
    const double q = static_cast<double>(s.never_met[t]) / static_cast<double>(n);
    const double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
    CHECK(std::abs(p - q) <= 5 * sigma + 1e-12);
  }
}

TEST_CASE("without measurements K equals the region size") {
  auto stream = circuit::rng_stream(40, 0);
  const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, 16, 0.0, 40), stream);
  for (std::size_t la : {2U, 5U, 8U}) {
    const auto k = particles::single_species_K(r, prefix(16, la), 40);
    CHECK(k.eliminated.front() == 0);
    CHECK(k.eliminated.back() == la);
    CHECK(k.steady_at.has_value());
  }
}

TEST_CASE("K and M series are monotone and bounded") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    auto stream = circuit::rng_stream(50 + k, 0);
    const auto b = k % 2 ? circuit::Boundary::Open : circuit::Boundary::Periodic;
    const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, 24, 0.1, 30, b), stream);
    const BitVec a = prefix(24, 8);
    const auto ks = particles::single_species_K(r, a, 30);
    const auto ms = particles::approx_two_species_M(r, a, 30);
    REQUIRE(ks.eliminated.size() == 31);
    REQUIRE(ms.eliminated.size() == 31);
    for (std::size_t t = 1; t <= 30; ++t) {
      CHECK(ks.eliminated[t] >= ks.eliminated[t - 1]);
      CHECK(ms.eliminated[t] >= ms.eliminated[t - 1]);
    }
    CHECK(ks.eliminated.back() <= 8);
    CHECK(ms.eliminated.back() <= 8);
  }
}

TEST_CASE("layerwise K elimination removes at least a final restriction") {
  // Survivors avoid the complement at every layer, so at least as much is
  // eliminated as by a single restriction at the end.
  auto stream = circuit::rng_stream(60, 0);
  const std::size_t L = 12;
  const auto r = circuit::sample_realization(spec(circuit::Family::Entangle, L, 0.0, 3), stream);
  const BitVec a = prefix(L, 5);
  BitMatrix rows(0, L);
  for (std::size_t i = 0; i < 5; ++i) rows.append_row(BitVec::unit(L, i));
  const auto k = particles::single_species_K(r, a, 3);
  BitVec outside(L);
  for (std::size_t i = 5; i < L; ++i) outside.set(i);
  const auto once = gf2::kernel_restricted(particles::evolve_basis(r, rows, 3), outside);
  CHECK(k.eliminated.back() >= once.eliminated);
}

TEST_CASE("purification ranks") {
  for (std::uint64_t k = 0; k < 8; ++k) {
    const std::size_t L = 16;
    auto stream = circuit::rng_stream(70 + k, 0);
    const auto r = circuit::sample_realization(spec(circuit::Family::Purify, L, 0.1 + 0.02 * k, 3 * L), stream);
    const auto pr = particles::purification_ranks(r, 3 * L, 4);
    REQUIRE(pr.times.size() == pr.rank_h.size());
    CHECK(pr.rank_h.front() == L);
    for (std::size_t i = 1; i < pr.rank_h.size(); ++i) CHECK(pr.rank_h[i] <= pr.rank_h[i - 1]);
    CHECK(pr.rank_h.back() == gf2::rank2(pr.h_final));
    for (std::size_t start : {0U, 7U, 13U}) {
      std::size_t prev = gf2::rank2(pr.h_final);
      for (std::size_t len = 0; len <= L; ++len) {
        const std::size_t direct =
            gf2::rank2(particles::evolve_basis(r, gf2::zero_window(BitMatrix::identity(L), start, len, true), 3 * L));
        const std::size_t fast = particles::rank_h_prime(pr.h_final, start, len);
        CHECK(direct == fast);
        CHECK(fast <= prev);
        prev = fast;
      }
    }
  }
}

TEST_CASE("rank H equals S_Q of the purified state") {
  for (std::uint64_t k = 0; k < 8; ++k) {
    const std::size_t L = 12;
    auto stream = circuit::rng_stream(80 + k, 0);
    const auto r = circuit::sample_realization(spec(circuit::Family::Purify, L, 0.05 * (k + 1), L), stream);
    stabilizer::GraphState g(2 * L);
    g.apply(r.layers());
    const auto pr = particles::purification_ranks(r, L, L, Direction::Reversed);
    BitVec q(2 * L);
    for (std::size_t i = 0; i < L; ++i) q.set(i);
    CHECK(pr.rank_h.back() == g.entropy(q));
  }
}

TEST_CASE("RWRE staircase") {
  auto rng = circuit::rng_stream(90, 0);
  const auto ballistic = particles::rwre_run(20, 50, rng, 1.0);
  for (std::size_t t = 0; t <= 50; ++t) CHECK(ballistic[t] == std::min<std::size_t>(t, 20));
  const auto frozen = particles::rwre_run(20, 50, rng, 0.0);
  for (std::size_t t = 0; t <= 50; ++t) CHECK(frozen[t] == 0);
  const auto n = particles::rwre_run(200, 4000, rng);
  for (std::size_t t = 1; t < n.size(); ++t) {
    CHECK(n[t] >= n[t - 1]);
    CHECK(n[t] <= std::min<std::size_t>(t, 200));
  }
}
