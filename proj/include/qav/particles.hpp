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

#ifndef QAV_PARTICLES_HPP
#define QAV_PARTICLES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qav/circuit.hpp"
#include "qav/gf2.hpp"

namespace qav::particles {

using gf2::BitMatrix;
using gf2::BitVec;

/// Order in which the layers of a realization are traversed. The particle
/// picture formally runs backwards in time; for the statistically symmetric
/// ensembles forward traversal is used so that a whole time series comes out
/// of one pass.
enum class Direction { Forward, Reversed };

/// Many particle configurations at once: column j holds site j of every lane
/// (configuration or basis row).
class LaneMatrix {
 public:
  LaneMatrix() = default;
  LaneMatrix(std::size_t sites, std::size_t lanes);
  /// Lane i = row i.
  static LaneMatrix from_rows(const BitMatrix& rows);

  std::size_t sites() const { return cols_.size(); }
  std::size_t lanes() const { return lanes_; }
  const BitVec& column(std::size_t j) const { return cols_[j]; }
  BitVec& column(std::size_t j) { return cols_[j]; }

  bool get(std::size_t lane, std::size_t site) const { return cols_[site].get(lane); }
  void set(std::size_t lane, std::size_t site, bool v = true) { cols_[site].set(lane, v); }

  void cnot(std::size_t c, std::size_t t) { cols_[t] ^= cols_[c]; }
  void clear_site(std::size_t j) { cols_[j].clear(); }
  void apply(const circuit::Layer& layer);

  /// Lanes with at least one particle.
  BitVec occupied_lanes() const;
  /// Sites occupied in at least one of the given lanes.
  BitVec occupied_sites(const BitVec& lane_mask) const;
  BitMatrix to_rows() const;
  /// Keeps the lanes in `keep`, renumbered in order.
  LaneMatrix compact(const BitVec& keep) const;

 private:
  std::size_t lanes_ = 0;
  std::vector<BitVec> cols_;
};

/// Particle rules: CNOT c -> t sets h_t ^= h_c, CNN does it for both targets,
/// CZ does nothing, a composite measurement empties its site. A paired event
/// moves the measured site's bit onto its partner and empties the site.
void evolve_particle_layer(BitVec& h, const circuit::Layer& layer);
void evolve_particle_layer(LaneMatrix& m, const circuit::Layer& layer);

/// Steps 1..horizon of the realization as ordered layer lists.
std::vector<std::vector<const circuit::Layer*>> particle_steps(const circuit::CircuitRealization& r,
                                                               std::size_t horizon, Direction dir);

struct TwoSpeciesOptions {
  std::size_t horizon = 0;
  Direction direction = Direction::Forward;
  /// Track extinction bookkeeping (needed for N1, X-first, Y-first). Without
  /// it, lanes with an extinct species are retired early.
  bool track_extinction = true;
};

/// Counts over the configurations, recorded at t = 0..horizon (step ends).
struct TwoSpeciesCounts {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> never_met;
  /// Never met and no X particle left (only with track_extinction).
  std::vector<std::uint64_t> x_extinct;
  std::vector<std::uint64_t> x_first;
  std::vector<std::uint64_t> y_first;
  std::vector<std::uint64_t> both;
};

/// All 2^L splits of h into X = h & A and Y = h & (not A). L <= 24.
TwoSpeciesCounts two_species_exhaustive(const circuit::CircuitRealization& r, const BitVec& region,
                                        const TwoSpeciesOptions& opt);

/// n_configs random splits, every bit independently occupied with
/// probability 1/2, all evolved under the same realization.
TwoSpeciesCounts sample_P(const circuit::CircuitRealization& r, const BitVec& region, std::size_t n_configs,
                          const TwoSpeciesOptions& opt, circuit::RngStream& rng);

/// Basis-decomposition series: eliminated[t] = -log2 K(t) (or -log2 M(t)).
struct BasisSeries {
  std::vector<std::size_t> eliminated;
  /// First step after which every surviving row is empty, if reached.
  std::optional<std::size_t> steady_at;
};

/// Rows start as unit vectors on `region`; after every unitary layer, row
/// combinations touching the complement are eliminated.
BasisSeries single_species_K(const circuit::CircuitRealization& r, const BitVec& region, std::size_t horizon,
                             Direction dir = Direction::Forward);

/// H_X starts as unit vectors on `region`, H_Y on its complement. The
/// forbidden window for H_X is everything outside the Y-free stretch around
/// the region: [b, L) with b the leftmost Y site for open chains, the
/// complement of the longest Y-free cyclic run meeting `region` for periodic
/// ones. If H_Y dies out the window is empty and nothing more is eliminated.
BasisSeries approx_two_species_M(const circuit::CircuitRealization& r, const BitVec& region, std::size_t horizon,
                                 Direction dir = Direction::Forward);

/// Evolves every row of `rows` through steps 1..horizon.
BitMatrix evolve_basis(const circuit::CircuitRealization& r, const BitMatrix& rows, std::size_t horizon,
                       Direction dir = Direction::Forward);

struct PurificationRanks {
  /// rank H(t) = -log2 P_Q(t), at t = 0, stride, 2 stride, ... and at horizon.
  std::vector<std::size_t> times;
  std::vector<std::size_t> rank_h;
  /// H(horizon); row i is the evolution of e_i.
  BitMatrix h_final;
};

PurificationRanks purification_ranks(const circuit::CircuitRealization& r, std::size_t horizon,
                                     std::size_t stride = 1, Direction dir = Direction::Forward);

/// rank H'(t): H(0) with a contiguous column window zeroed, evolved. Since
/// the dynamics is linear this is the rank of the rows of H(t) outside the
/// window.
std::size_t rank_h_prime(const BitMatrix& h, std::size_t start, std::size_t length);

/// One walker per site of A = [0, L_A); the boundary is at L_A. Every step
/// each occupied site draws omega ~ U(0,1) (or uses `forced_omega`), and each
/// walker there steps right with probability omega, else left. A walker that
/// reaches L_A stops. N(t) is the largest n such that the n walkers that
/// started closest to the boundary have all arrived.
std::vector<std::size_t> rwre_run(std::size_t l_a, std::size_t horizon, circuit::RngStream& rng,
                                  std::optional<double> forced_omega = std::nullopt);

}  // namespace qav::particles

#endif  // QAV_PARTICLES_HPP
