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
#include <set>

#include "doctest.h"
#include "qav/gf2.hpp"

using qav::gf2::BitMatrix;
using qav::gf2::BitVec;

namespace {

// Independent rank: row vectors as plain integers, greedy xor basis keyed by
// the highest bit.
std::size_t naive_rank(const std::vector<std::vector<int>>& rows) {
  std::vector<std::vector<int>> basis;
  std::size_t rank = 0;
  std::vector<std::vector<int>> work = rows;
  const std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < ncols; ++c) {
    std::size_t pivot = work.size();
    for (std::size_t r = rank; r < work.size(); ++r) {
      if (work[r][c] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == work.size()) continue;
    std::swap(work[rank], work[pivot]);
    for (std::size_t r = 0; r < work.size(); ++r) {
      if (r != rank && work[r][c] != 0) {
        for (std::size_t k = 0; k < ncols; ++k) work[r][k] = (work[r][k] + work[rank][k]) % 2;
      }
    }
    ++rank;
  }
  return rank;
}

BitMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double density = 0.5) {
  std::bernoulli_distribution coin(density);
  BitMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, coin(rng));
  }
  return m;
}

std::set<std::string> span_of(const std::vector<BitVec>& rows, std::size_t ncols) {
  std::set<std::string> out;
  const std::size_t n = rows.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    BitVec v(ncols);
    for (std::size_t k = 0; k < n; ++k) {
      if ((mask >> k) & 1U) v ^= rows[k];
    }
    out.insert(v.to_string());
  }
  return out;
}

}  // namespace

TEST_CASE("rank of the identity, the zero matrix and a dependent triple") {
  CHECK(qav::gf2::rank2(BitMatrix::identity(7)) == 7);
  CHECK(qav::gf2::rank2(BitMatrix(5, 9)) == 0);
  const BitMatrix m = BitMatrix::from_strings({"110", "011", "101"});
  CHECK(qav::gf2::rank2(m) == 2);
  CHECK(m == BitMatrix::from_strings({"110", "011", "101"}));
}

TEST_CASE("occupancy glyphs parse as bits") {
  CHECK(BitVec::from_string("\xE2\x80\xA2\xE2\x88\x98\xE2\x80\xA2").to_string() == "101");
}

TEST_CASE("tail bits stay clear") {
  BitVec v(70);
  v.set(69);
  v.set(3);
  CHECK(v.popcount() == 2);
  CHECK(v.first_set() == 3);
  CHECK(v.next_set(4) == 69);
  CHECK(v.next_set(70) == qav::gf2::kNpos);
  BitVec w = v ^ v;
  CHECK(w.none());
}

TEST_CASE("kernel_restricted examples") {
  SUBCASE("no support in the window") {
    const BitMatrix m = BitMatrix::from_strings({"100", "010"});
    const auto r = qav::gf2::kernel_restricted(m, BitVec::from_string("001"));
    CHECK(r.eliminated == 0);
    CHECK(r.survivors == m);
  }
  SUBCASE("one combination survives") {
    const BitMatrix m = BitMatrix::from_strings({"011", "001"});
    const auto r = qav::gf2::kernel_restricted(m, BitVec::from_string("001"));
    CHECK(r.eliminated == 1);
    REQUIRE(r.survivors.nrows() == 1);
    CHECK(r.survivors.row(0).to_string() == "010");
  }
  SUBCASE("full elimination") {
    const auto r = qav::gf2::kernel_restricted(BitMatrix::identity(3), BitVec::from_string("111"));
    CHECK(r.eliminated == 3);
    CHECK(r.survivors.nrows() == 0);
  }
  SUBCASE("empty window") {
    const BitMatrix m = BitMatrix::from_strings({"101", "111"});
    const auto r = qav::gf2::kernel_restricted(m, BitVec(3));
    CHECK(r.eliminated == 0);
    CHECK(r.survivors == m);
  }
  SUBCASE("zero rows are retained") {
    const BitMatrix m = BitMatrix::from_strings({"000", "001", "101"});
    const auto r = qav::gf2::kernel_restricted(m, BitVec::from_string("001"));
    CHECK(r.eliminated == 1);
    CHECK(r.survivors.nrows() == 2);
  }
}

TEST_CASE("zero_window examples") {
  const BitMatrix id = BitMatrix::identity(4);
  CHECK(qav::gf2::zero_window(id, 0, 0, false) == id);
  CHECK(qav::gf2::rank2(qav::gf2::zero_window(id, 1, 2, false)) == 2);
  const BitMatrix ones = BitMatrix::from_strings({"1111"});
  CHECK(qav::gf2::zero_window(ones, 0, 4, false).row(0).none());
  // Wrapped window {3, 0}.
  const BitMatrix z = qav::gf2::zero_window(ones, 3, 2, true);
  CHECK(z.row(0).to_string() == "0110");
  CHECK_THROWS(qav::gf2::zero_window(ones, 3, 2, false));
}

TEST_CASE("rank agrees with an independent elimination on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 1 + rng() % 64;
    const std::size_t c = 1 + rng() % 64;
    const double density = (trial % 4 + 1) * 0.2;
    const BitMatrix m = random_matrix(rng, r, c, density);
    std::vector<std::vector<int>> rows(r, std::vector<int>(c));
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) rows[i][j] = m.get(i, j) ? 1 : 0;
    }
    CHECK(qav::gf2::rank2(m) == naive_rank(rows));
    CHECK(qav::gf2::rank2(m) == qav::gf2::rank2(m.transpose()));
  }
}

TEST_CASE("zeroing a window never raises the rank") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    const BitMatrix m = random_matrix(rng, 1 + rng() % 30, n);
    const std::size_t start = rng() % n;
    const std::size_t len = rng() % (n + 1);
    CHECK(qav::gf2::rank2(qav::gf2::zero_window(m, start, len, true)) <= qav::gf2::rank2(m));
  }
}

TEST_CASE("kernel_restricted splits the row space exactly") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t ncols = 1 + rng() % 10;
    const std::size_t nrows = 1 + rng() % 8;
    const BitMatrix m = random_matrix(rng, nrows, ncols, 0.4);
    BitVec window(ncols);
    for (std::size_t j = 0; j < ncols; ++j) window.set(j, (rng() & 1U) != 0);

    const auto r = qav::gf2::kernel_restricted(m, window);
    CHECK(r.eliminated + r.survivors.nrows() == nrows);
    for (const auto& row : r.survivors.rows()) CHECK(row.disjoint(window));

    // eliminated = rank of m restricted to the window.
    std::vector<BitVec> restricted;
    for (const auto& row : m.rows()) restricted.push_back(row & window);
    CHECK(r.eliminated == qav::gf2::rank2(std::span<const BitVec>(restricted)));

    // Survivors span exactly the window-free part of the row space.
    std::set<std::string> expected;
    for (const auto& v : span_of(m.rows(), ncols)) {
      if (BitVec::from_string(v).disjoint(window)) expected.insert(v);
    }
    CHECK(span_of(r.survivors.rows(), ncols) == expected);
  }
}

TEST_CASE("kernel_basis spans the right kernel") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ncols = 1 + rng() % 40;
    const BitMatrix m = random_matrix(rng, 1 + rng() % 40, ncols);
    const BitMatrix k = qav::gf2::kernel_basis(m);
    CHECK(k.nrows() + qav::gf2::rank2(m) == ncols);
    CHECK(qav::gf2::rank2(k) == k.nrows());
    for (const auto& v : k.rows()) {
      for (const auto& row : m.rows()) CHECK_FALSE(row.dot(v));
    }
  }
}

TEST_CASE("Echelon tracks the rank of inserted vectors") {
  std::mt19937_64 rng(15);
  const BitMatrix m = random_matrix(rng, 50, 37);
  qav::gf2::Echelon e(37);
  for (const auto& row : m.rows()) e.insert(row);
  CHECK(e.rank() == qav::gf2::rank2(m));
  for (const auto& row : m.rows()) {
    BitVec v = row;
    CHECK_FALSE(e.reduce(v));
  }
}
