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

// Brute-force reference implementations for small systems. Nothing here
// shares code with the stabilizer or particle engines.

#ifndef QAV_ORACLE_HPP
#define QAV_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qav/circuit.hpp"
#include "qav/gf2.hpp"

namespace qav::oracle {

inline constexpr std::size_t kMaxQubits = 16;

/// Unnormalized state vector with amplitudes in {-1, 0, +1}. Basis state s
/// has qubit i in bit i of s.
class PhaseState {
 public:
  /// |+x>^n.
  explicit PhaseState(std::size_t n);
  /// |+x>^n restricted to even parity.
  static PhaseState z2_even(std::size_t n);

  std::size_t num_qubits() const { return n_; }
  int amplitude(std::uint32_t s) const { return amp_[s]; }
  std::span<const std::int8_t> amplitudes() const { return amp_; }
  std::size_t support_size() const;
  /// All nonzero amplitudes have the same magnitude (always true here; kept
  /// as a structural check).
  bool equal_weight() const;
  /// True when every basis state in the support has even parity.
  bool even_parity_support() const;

  void cnot(std::size_t c, std::size_t t);
  void cz(std::size_t a, std::size_t b);
  void cnn(std::size_t c, std::size_t a, std::size_t b);
  void h_pair_rotation(std::size_t left, std::size_t right);
  /// Projection of q onto 0, then H on q.
  void composite_measure(std::size_t q);
  void apply(const circuit::Layer& layer);
  void apply(std::span<const circuit::Layer> layers);

 private:
  std::size_t n_;
  std::vector<std::int8_t> amp_;
};

/// Exact purity num / den.
struct Purity {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// -log2 of the purity when it is a power of 1/2.
  std::optional<std::size_t> entropy_bits() const;
};

/// Tr rho_A^2 as the expectation of SWAP_A over two copies.
Purity purity_swap(const PhaseState& state, const gf2::BitVec& region);

enum class Order { Reversed, Forward };

/// Tallies over all 2^L particle configurations h, split into X particles
/// h & A and Y particles h & B, evolved through steps 1..t.
struct PairCounts {
  std::uint64_t total = 0;
  /// Never met.
  std::uint64_t never_met = 0;
  /// Never met and no X particle left at t.
  std::uint64_t x_extinct_at_t = 0;
  /// X died out before meeting and no later than Y.
  std::uint64_t x_first = 0;
  /// Y died out before meeting and no later than X.
  std::uint64_t y_first = 0;
  /// Both died out in the same layer before meeting.
  std::uint64_t both = 0;
  /// Sum over h of (-1)^{phase}, where every CZ on (a, b) adds
  /// X_a Y_b + X_b Y_a. With the reversed order this equals 2^L Tr rho_A^2 for
  /// full-support states.
  std::int64_t phase_sum = 0;
};

PairCounts exhaustive_pair_count(const circuit::CircuitRealization& realization, const gf2::BitVec& region,
                                 std::size_t t, Order order = Order::Reversed);

}  // namespace qav::oracle

#endif  // QAV_ORACLE_HPP
