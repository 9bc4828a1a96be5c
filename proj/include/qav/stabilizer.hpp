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

#ifndef QAV_STABILIZER_HPP
#define QAV_STABILIZER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qav/circuit.hpp"
#include "qav/gf2.hpp"

namespace qav::stabilizer {

using gf2::BitMatrix;
using gf2::BitVec;
using gf2::Word;

/// Generator matrices throughout this module use interleaved columns: qubit j
/// owns column 2j (X part) and 2j+1 (Z part). A row with both bits set is Y.

/// Stabilizer state with destabilizers, stored column-major: for every qubit
/// the X and Z bits of all 2n rows are packed into one bitset. Rows [0, n) are
/// destabilizers, rows [n, 2n) stabilizers.
class Tableau {
 public:
  /// |0...0>.
  explicit Tableau(std::size_t n);

  std::size_t num_qubits() const { return n_; }

  void h(std::size_t q);
  void x(std::size_t q);
  void z(std::size_t q);
  void cnot(std::size_t c, std::size_t t);
  void cz(std::size_t a, std::size_t b);
  /// CNOT(c -> a) then CNOT(c -> b).
  void cnn(std::size_t c, std::size_t a, std::size_t b);

  /// Projects onto Z_q. A random outcome is fixed to `forced`; a deterministic
  /// one is left as is. Returns the outcome.
  int measure_z(std::size_t q, int forced = 0);
  bool is_deterministic_z(std::size_t q) const;

  /// Projection onto Z_q = +1 followed by H_q.
  void composite_measure(std::size_t q);
  /// Projection of event.site onto 0 followed by the two-site rotation on
  /// (left, right).
  void paired_measure(const circuit::MeasureEvent& event);
  /// Projects the product of Z over `mask` onto (-1)^outcome.
  void measure_z_parity(const BitVec& mask, int outcome);

  void apply(const circuit::Layer& layer);
  void apply(std::span<const circuit::Layer> layers);

  /// +1 / -1 if the Pauli X^x Z^z (Y where both) is in +/- the stabilizer
  /// group, 0 otherwise.
  int expectation(const BitVec& x, const BitVec& z) const;

  /// n x 2n stabilizer generators (interleaved columns).
  BitMatrix stabilizers() const;
  /// Sign bits of the stabilizer rows (1 means -).
  BitVec stabilizer_signs() const;

 private:
  Word* xcol(std::size_t q) { return &x_[q * w_]; }
  Word* zcol(std::size_t q) { return &z_[q * w_]; }
  const Word* xcol(std::size_t q) const { return &x_[q * w_]; }
  const Word* zcol(std::size_t q) const { return &z_[q * w_]; }
  bool xbit(std::size_t q, std::size_t row) const { return (xcol(q)[row / 64] >> (row % 64)) & 1U; }
  bool zbit(std::size_t q, std::size_t row) const { return (zcol(q)[row / 64] >> (row % 64)) & 1U; }
  bool rbit(std::size_t row) const { return (r_[row / 64] >> (row % 64)) & 1U; }
  void check(std::size_t q) const;
  void rowsum_masked(const std::vector<Word>& mask, std::size_t p);

  std::size_t n_;
  std::size_t w_;
  std::vector<Word> x_;
  std::vector<Word> z_;
  std::vector<Word> r_;
};

Tableau init_plus_x(std::size_t n);
/// |+x>^n projected onto even Z parity.
Tableau init_z2_even(std::size_t n);

/// Exact representation of the states reachable from |+x>^n by CNOT, CZ, CNN
/// and composite measurements: psi(s) = 2^{-n/2} (-1)^{f(s)} with the quadratic
/// form f(s) = sum_{j<k} G_jk s_j s_k + sum_j l_j s_j. The stabilizers are
/// (-1)^{l_i} X_i Z_{N(i)}. Every operation costs O(n / 64 + degree).
class GraphState {
 public:
  explicit GraphState(std::size_t n);

  std::size_t num_qubits() const { return n_; }
  const BitVec& neighbors(std::size_t i) const { return adj_[i]; }
  const BitVec& linear() const { return lin_; }

  void cz(std::size_t a, std::size_t b);
  void cnot(std::size_t c, std::size_t t);
  void cnn(std::size_t c, std::size_t a, std::size_t b);
  void composite_measure(std::size_t q);

  /// Paired (Z2) measurement events are rejected.
  void apply(const circuit::Layer& layer);
  void apply(std::span<const circuit::Layer> layers);

  BitMatrix stabilizers() const;
  BitVec stabilizer_signs() const { return lin_; }
  /// Entanglement entropy as the cut rank of the adjacency matrix.
  std::size_t entropy(const BitVec& region) const;

 private:
  void check(std::size_t q) const;

  std::size_t n_;
  std::vector<BitVec> adj_;
  BitVec lin_;
};

/// Second Renyi (= von Neumann) entropy of a pure stabilizer state with n
/// generators: rank of the generators restricted to the region, minus |A|.
std::size_t entropy(const BitMatrix& generators, const BitVec& region);
std::size_t entropy(const Tableau& t, const BitVec& region);

/// S of the first k sites of `order`, for k = 0..order.size(), from a single
/// elimination. Requires a pure state (as many generators as qubits).
std::vector<std::size_t> prefix_entropies(const BitMatrix& generators, std::span<const std::uint32_t> order);

/// Sites start, start+1, ... (mod length) of a ring of `length` sites.
std::vector<std::uint32_t> ring_order(std::size_t length, std::size_t start);

/// Entropies of a pure state on Q u R where Q = qubits [0, L) and R = [L, 2L).
/// For windows A = [s, s+k) of Q (cyclic) it returns S_A, S_B with B = Q \ A,
/// and I_{A,R} = S_A + S_Q - S_B, computed as rank(G|_A) - rank(G_Q|_A) where
/// G_Q is the subgroup of stabilizers supported on Q.
class PurificationCuts {
 public:
  struct Profile {
    std::vector<std::size_t> s_a;
    std::vector<std::size_t> s_b;
    std::vector<std::size_t> mutual;
  };

  PurificationCuts(const BitMatrix& generators, std::size_t L);

  std::size_t system_size() const { return L_; }
  std::size_t s_q() const { return s_q_; }
  /// Profiles for window lengths 0..min(max_len, L).
  Profile windows(std::size_t start, std::size_t max_len = static_cast<std::size_t>(-1)) const;

 private:
  std::size_t L_;
  std::size_t s_q_ = 0;
  // Generators restricted to Q columns (full group, and Q-supported subgroup).
  BitMatrix full_q_;
  BitMatrix q_only_;
};

/// Reorders site columns of an interleaved generator matrix: new site k is old
/// site order[k]. Sites not listed are dropped.
BitMatrix select_sites(const BitMatrix& generators, std::span<const std::uint32_t> order);

/// Number of pivots within the first 2k columns, for k = 0..ncols/2, after
/// reduction to row echelon form.
std::vector<std::size_t> prefix_ranks(const BitMatrix& m);

}  // namespace qav::stabilizer

#endif  // QAV_STABILIZER_HPP
