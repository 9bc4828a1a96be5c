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

#ifndef QAV_CODES_HPP
#define QAV_CODES_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"
#include "qav/circuit.hpp"
#include "qav/gf2.hpp"
#include "qav/stabilizer.hpp"

namespace qav::codes {

using gf2::BitMatrix;

enum class Criterion {
  /// Mean I_{A,R}; a window length violates when the mean exceeds epsilon.
  MutualInformation,
  /// Mean rank deficit; a window length violates when the mean reaches epsilon.
  RankDeficit,
};

struct DistanceScan {
  std::size_t L = 0;
  double p = 0.0;
  std::size_t T = 0;
  double epsilon = 1.0;
  Criterion kind = Criterion::MutualInformation;
  /// Ensemble- and window-averaged criterion for window lengths 0..size()-1.
  /// The scan stops a little past the first violation.
  std::vector<double> criterion;
  /// Last window length before the first violation (L if none).
  std::size_t distance = 0;
  /// No code: the state is pure / the code space is empty.
  bool degenerate = false;
};

void to_json(nlohmann::json& j, const DistanceScan& s);

struct ScanOptions {
  double epsilon = 1.0;
  /// Every start_stride-th window start is used (1 = all, with wrap).
  std::size_t start_stride = 1;
  /// Window lengths are first scanned up to this value and doubled until a
  /// violation shows up.
  std::size_t initial_length = 32;
};

/// Per-trajectory data for the QECC distance: the purified state on Q u R.
/// The generators are the 2L x 4L stabilizer matrix.
DistanceScan qecc_distance(const std::vector<stabilizer::PurificationCuts>& ensemble, double p, std::size_t T,
                           const ScanOptions& opt = {});

/// Deficit data from one evolved basis: rank of H and a basis of the
/// relevant kernel, one row per kernel vector.
struct RankDeficitData {
  std::size_t L = 0;
  std::size_t rank = 0;
  BitMatrix kernel;
};

/// rank H - rank H' for the Z-error criterion, where H' drops the rows in
/// the window. Uses the left kernel of H.
RankDeficitData z_error_data(const BitMatrix& h);
/// rank M - rank M' for the classical code, where M' zeroes the columns in
/// the window. Uses the right kernel of M.
RankDeficitData clc_data(const BitMatrix& m);

/// Deficits for window lengths 0..max_len starting at `start` (cyclic):
/// |W| - rank(kernel restricted to W).
std::vector<std::size_t> window_deficits(const RankDeficitData& d, std::size_t start, std::size_t max_len);

DistanceScan z_error_distance(const std::vector<RankDeficitData>& ensemble, double p, std::size_t T,
                              const ScanOptions& opt = {});
/// Flags the scan degenerate when every code space is empty.
DistanceScan clc_distance(const std::vector<RankDeficitData>& ensemble, double p, std::size_t T,
                          const ScanOptions& opt = {});

/// Window profiles of one UM_U trajectory averaged over window starts. The
/// realization must carry the reference coupling.
struct UmUProfile {
  std::vector<double> s_a;
  std::vector<double> mutual;
  /// -log2 P2(L_A): rank of the rows of H(T) inside the window.
  std::vector<double> neg_log_p2;
  std::size_t s_q = 0;
  /// -log2 P_Q = rank H(T).
  std::size_t neg_log_pq = 0;
};

UmUProfile um_u_profile(const circuit::CircuitRealization& r, std::size_t start_stride = 1);

}  // namespace qav::codes

#endif  // QAV_CODES_HPP
