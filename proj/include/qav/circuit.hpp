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

#ifndef QAV_CIRCUIT_HPP
#define QAV_CIRCUIT_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace qav {

/// Raised for malformed specs, presets and overrides.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace circuit {

inline constexpr std::uint32_t kNoSite = 0xFFFFFFFFU;

enum class Family { Entangle, Purify, UmU, Z2 };
enum class Boundary { Periodic, Open };
/// Placement of single-site measurements within a step of the QA families.
/// RandomSlot: every site is measured with probability p once per step, in one
/// of the four measure layers chosen uniformly. EveryLayer: every measure layer
/// measures each site with probability p. StepEnd: probability p per step, all
/// in the last measure layer. Z2 always uses p per bond and measured row.
enum class MeasureSchedule { RandomSlot, EveryLayer, StepEnd };

std::string_view to_string(Family f);
std::string_view to_string(Boundary b);
std::string_view to_string(MeasureSchedule m);
Family parse_family(std::string_view s);
Boundary parse_boundary(std::string_view s);
MeasureSchedule parse_schedule(std::string_view s);

struct CircuitSpec {
  Family family = Family::Entangle;
  std::size_t L = 8;
  double p = 0.0;
  Boundary boundary = Boundary::Periodic;
  MeasureSchedule schedule = MeasureSchedule::RandomSlot;
  std::size_t T = 1;
  // UM_U only: hybrid steps followed by unitary-only steps.
  std::size_t T1 = 0;
  std::size_t T2 = 0;
  std::uint64_t seed = 0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  std::size_t steps() const { return family == Family::UmU ? T1 + T2 : T; }
  bool has_reference() const { return family == Family::Purify || family == Family::UmU; }
  /// Physical qubits touched by the realization (2L when a reference is coupled in).
  std::size_t num_qubits() const { return has_reference() ? 2 * L : L; }

  friend bool operator==(const CircuitSpec&, const CircuitSpec&) = default;
};

void to_json(nlohmann::json& j, const CircuitSpec& s);
void from_json(const nlohmann::json& j, CircuitSpec& s);

enum class GateKind { CNOT, CZ, CNN };

/// CNOT: control -> target. CZ: symmetric on (control, target).
/// CNN: control -> target and control -> target2.
struct Gate {
  std::uint32_t control = kNoSite;
  std::uint32_t target = kNoSite;
  std::uint32_t target2 = kNoSite;

  friend bool operator==(const Gate&, const Gate&) = default;
};

struct UnitaryLayer {
  GateKind kind = GateKind::CNOT;
  std::vector<Gate> gates;
  /// The CZ layer pairing system qubit i with reference qubit L + i.
  bool coupling = false;

  friend bool operator==(const UnitaryLayer&, const UnitaryLayer&) = default;
};

/// Composite measurement with outcome 0. A single-site event projects `site`
/// and applies H there. A paired event (Z2 family) projects `site`, one of
/// (left, right), then applies the two-site rotation on (left, right).
struct MeasureEvent {
  std::uint32_t site = kNoSite;
  std::uint32_t left = kNoSite;
  std::uint32_t right = kNoSite;

  bool paired() const { return left != kNoSite; }
  /// The other qubit of a paired event.
  std::uint32_t partner() const { return site == left ? right : left; }
  friend bool operator==(const MeasureEvent&, const MeasureEvent&) = default;
};

struct MeasureLayer {
  std::vector<MeasureEvent> events;
  friend bool operator==(const MeasureLayer&, const MeasureLayer&) = default;
};

using Layer = std::variant<UnitaryLayer, MeasureLayer>;

/// One quenched sample of a circuit family. Layers are grouped into time
/// steps; step 0 holds set-up layers (the reference coupling), steps 1..T the
/// circuit proper.
class CircuitRealization {
 public:
  CircuitRealization(CircuitSpec spec, std::size_t num_qubits, std::vector<Layer> layers,
                     std::vector<std::size_t> step_offsets);

  const CircuitSpec& spec() const { return spec_; }
  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t system_size() const { return spec_.L; }
  std::size_t steps() const { return step_offsets_.size() - 2; }
  std::span<const Layer> layers() const { return layers_; }
  /// Layers of step t (0 = set-up prefix).
  std::span<const Layer> step(std::size_t t) const;
  /// Layers of steps 1..t, without the prefix.
  std::span<const Layer> first_steps(std::size_t t) const;
  /// Copy with the prefix removed; the result acts on the system only.
  CircuitRealization without_prefix() const;
  /// Copy with a reference coupling prefix (L extra qubits) prepended.
  CircuitRealization with_reference_coupling() const;

  friend bool operator==(const CircuitRealization&, const CircuitRealization&) = default;

 private:
  CircuitSpec spec_;
  std::size_t num_qubits_;
  std::vector<Layer> layers_;
  std::vector<std::size_t> step_offsets_;
};

/// Deterministic, independent random stream per (seed, trajectory index).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0);

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

RngStream rng_stream(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t salt = 0);

CircuitRealization sample_realization(const CircuitSpec& spec, RngStream& rng);

/// Bonds (i, i+1) with i of the given parity. The wrap bond (L-1, 0) is odd and
/// present only under periodic boundaries.
std::vector<std::pair<std::uint32_t, std::uint32_t>> brickwork_bonds(std::size_t L, int parity, Boundary b);

}  // namespace circuit
}  // namespace qav

#endif  // QAV_CIRCUIT_HPP
