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

#include "qav/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace qav::circuit {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Entangle: return "ENTANGLE";
    case Family::Purify: return "PURIFY";
    case Family::UmU: return "UM_U";
    case Family::Z2: return "Z2";
  }
  return "?";
}

std::string_view to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "open"; }

std::string_view to_string(MeasureSchedule m) {
  switch (m) {
    case MeasureSchedule::RandomSlot: return "random-slot";
    case MeasureSchedule::EveryLayer: return "every-layer";
    case MeasureSchedule::StepEnd: return "step-end";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  if (s == "ENTANGLE") return Family::Entangle;
  if (s == "PURIFY") return Family::Purify;
  if (s == "UM_U") return Family::UmU;
  if (s == "Z2") return Family::Z2;
  throw ConfigError("unknown circuit family '" + std::string(s) + "'");
}

Boundary parse_boundary(std::string_view s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "open") return Boundary::Open;
  throw ConfigError("unknown boundary '" + std::string(s) + "'");
}

MeasureSchedule parse_schedule(std::string_view s) {
  if (s == "random-slot") return MeasureSchedule::RandomSlot;
  if (s == "every-layer") return MeasureSchedule::EveryLayer;
  if (s == "step-end") return MeasureSchedule::StepEnd;
  throw ConfigError("unknown measurement schedule '" + std::string(s) + "'");
}

void CircuitSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("measurement rate p must lie in [0, 1]");
  if (L < 2 || L % 2 != 0) throw ConfigError("L must be an even number >= 2");
  if (L > (std::size_t{1} << 30)) throw ConfigError("L too large");
  if (family == Family::UmU) {
    if (T1 == 0 || T2 == 0) throw ConfigError("UM_U requires both T1 and T2");
  }
}

void to_json(nlohmann::json& j, const CircuitSpec& s) {
  j = nlohmann::json{{"family", to_string(s.family)},
                     {"L", s.L},
                     {"p", s.p},
                     {"boundary", to_string(s.boundary)},
                     {"schedule", to_string(s.schedule)},
                     {"T", s.T},
                     {"T1", s.T1},
                     {"T2", s.T2},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, CircuitSpec& s) {
  static const std::set<std::string> kKeys = {"family", "L",  "p",  "boundary", "schedule",
                                                    "T",      "T1", "T2", "seed"};
  if (!j.is_object()) throw ConfigError("circuit spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("unknown circuit spec field '" + key + "'");
  }
  try {
    CircuitSpec out;
    out.family = parse_family(j.at("family").get<std::string>());
    out.L = j.at("L").get<std::size_t>();
    out.p = j.at("p").get<double>();
    if (j.contains("boundary")) out.boundary = parse_boundary(j.at("boundary").get<std::string>());
    if (j.contains("schedule")) out.schedule = parse_schedule(j.at("schedule").get<std::string>());
    if (j.contains("T") && !j.at("T").is_null()) out.T = j.at("T").get<std::size_t>();
    if (j.contains("T1") && !j.at("T1").is_null()) out.T1 = j.at("T1").get<std::size_t>();
    if (j.contains("T2") && !j.at("T2").is_null()) out.T2 = j.at("T2").get<std::size_t>();
    if (j.contains("seed")) out.seed = j.at("seed").get<std::uint64_t>();
    s = out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed circuit spec: ") + e.what());
  }
}

CircuitRealization::CircuitRealization(CircuitSpec spec, std::size_t num_qubits, std::vector<Layer> layers,
                                       std::vector<std::size_t> step_offsets)
    : spec_(spec), num_qubits_(num_qubits), layers_(std::move(layers)), step_offsets_(std::move(step_offsets)) {
  if (step_offsets_.size() < 2 || step_offsets_.back() != layers_.size()) {
    throw std::invalid_argument("CircuitRealization: inconsistent step offsets");
  }
}

std::span<const Layer> CircuitRealization::step(std::size_t t) const {
  return std::span<const Layer>(layers_).subspan(step_offsets_[t], step_offsets_[t + 1] - step_offsets_[t]);
}

std::span<const Layer> CircuitRealization::first_steps(std::size_t t) const {
  return std::span<const Layer>(layers_).subspan(step_offsets_[1], step_offsets_[t + 1] - step_offsets_[1]);
}

CircuitRealization CircuitRealization::without_prefix() const {
  std::vector<Layer> layers(layers_.begin() + static_cast<std::ptrdiff_t>(step_offsets_[1]), layers_.end());
  std::vector<std::size_t> offsets{0};
  for (std::size_t k = 1; k < step_offsets_.size(); ++k) offsets.push_back(step_offsets_[k] - step_offsets_[1]);
  return CircuitRealization(spec_, spec_.L, std::move(layers), std::move(offsets));
}

CircuitRealization CircuitRealization::with_reference_coupling() const {
  const std::size_t L = spec_.L;
  UnitaryLayer coupling{GateKind::CZ, {}, true};
  for (std::uint32_t i = 0; i < L; ++i) coupling.gates.push_back({i, static_cast<std::uint32_t>(L + i)});
  CircuitRealization bare = without_prefix();
  std::vector<Layer> layers;
  layers.reserve(bare.layers_.size() + 1);
  layers.emplace_back(std::move(coupling));
  layers.insert(layers.end(), bare.layers_.begin(), bare.layers_.end());
  std::vector<std::size_t> offsets{0};
  for (std::size_t k = 1; k < bare.step_offsets_.size(); ++k) offsets.push_back(bare.step_offsets_[k] + 1);
  return CircuitRealization(spec_, 2 * L, std::move(layers), std::move(offsets));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),         static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),        static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt),         static_cast<std::uint32_t>(salt >> 32),
                    0x51A7E5EDU};
  engine_.seed(seq);
}

RngStream rng_stream(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t salt) {
  return RngStream(seed, trajectory, salt);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> brickwork_bonds(std::size_t L, int parity, Boundary b) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> bonds;
  for (std::size_t i = static_cast<std::size_t>(parity); i < L; i += 2) {
    if (i + 1 < L) {
      bonds.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1));
    } else if (b == Boundary::Periodic && L > 2) {
      bonds.emplace_back(static_cast<std::uint32_t>(i), 0U);
    }
  }
  return bonds;
}

namespace {

UnitaryLayer cnot_layer(std::size_t L, int parity, Boundary b, RngStream& rng) {
  UnitaryLayer layer{GateKind::CNOT, {}, false};
  for (auto [a, c] : brickwork_bonds(L, parity, b)) {
    if (rng.coin()) {
      layer.gates.push_back({a, c});
    } else {
      layer.gates.push_back({c, a});
    }
  }
  return layer;
}

UnitaryLayer cz_layer(std::size_t L, int parity, Boundary b) {
  UnitaryLayer layer{GateKind::CZ, {}, false};
  for (auto [a, c] : brickwork_bonds(L, parity, b)) layer.gates.push_back({a, c});
  return layer;
}

std::array<MeasureLayer, 4> site_measurements(std::size_t L, double p, MeasureSchedule schedule, RngStream& rng) {
  std::array<MeasureLayer, 4> layers;
  if (schedule == MeasureSchedule::EveryLayer) {
    for (auto& layer : layers) {
      for (std::uint32_t i = 0; i < L; ++i) {
        if (rng.bernoulli(p)) layer.events.push_back({i});
      }
    }
    return layers;
  }
  for (std::uint32_t i = 0; i < L; ++i) {
    if (!rng.bernoulli(p)) continue;
    const std::size_t slot = schedule == MeasureSchedule::StepEnd ? 3 : rng.bits() >> 62;
    layers[slot].events.push_back({i});
  }
  return layers;
}

// Triples (s, s+1, s+2) with s = offset + 3k; under periodic boundaries the
// last triple may wrap, and the count is capped so triples never overlap.
UnitaryLayer cnn_layer(std::size_t L, std::size_t offset, Boundary b, RngStream& rng) {
  UnitaryLayer layer{GateKind::CNN, {}, false};
  const std::size_t count = b == Boundary::Periodic ? L / 3 : (L >= offset + 3 ? (L - offset) / 3 : 0);
  for (std::size_t k = 0; k < count; ++k) {
    const auto s0 = static_cast<std::uint32_t>((offset + 3 * k) % L);
    const auto s1 = static_cast<std::uint32_t>((offset + 3 * k + 1) % L);
    const auto s2 = static_cast<std::uint32_t>((offset + 3 * k + 2) % L);
    if (rng.coin()) {
      layer.gates.push_back({s0, s1, s2});
    } else {
      layer.gates.push_back({s2, s0, s1});
    }
  }
  return layer;
}

MeasureLayer pair_measurements(std::size_t L, int parity, Boundary b, double p, RngStream& rng) {
  MeasureLayer layer;
  for (auto [l, r] : brickwork_bonds(L, parity, b)) {
    if (!rng.bernoulli(p)) continue;
    const bool project_left = rng.coin();
    layer.events.push_back({project_left ? l : r, l, r});
  }
  return layer;
}

}  // namespace

CircuitRealization sample_realization(const CircuitSpec& spec, RngStream& rng) {
  spec.validate();
  const std::size_t L = spec.L;
  std::vector<Layer> layers;
  std::vector<std::size_t> offsets{0};

  if (spec.has_reference()) {
    UnitaryLayer coupling{GateKind::CZ, {}, true};
    for (std::uint32_t i = 0; i < L; ++i) coupling.gates.push_back({i, static_cast<std::uint32_t>(L + i)});
    layers.emplace_back(std::move(coupling));
  }
  offsets.push_back(layers.size());

  const std::size_t steps = spec.steps();
  for (std::size_t t = 1; t <= steps; ++t) {
    const double p = (spec.family == Family::UmU && t > spec.T1) ? 0.0 : spec.p;
    if (spec.family == Family::Z2) {
      layers.emplace_back(cnn_layer(L, 0, spec.boundary, rng));
      layers.emplace_back(cz_layer(L, 0, spec.boundary));
      layers.emplace_back(pair_measurements(L, 0, spec.boundary, p, rng));
      layers.emplace_back(pair_measurements(L, 1, spec.boundary, p, rng));
      layers.emplace_back(cnn_layer(L, 1, spec.boundary, rng));
      layers.emplace_back(cz_layer(L, 1, spec.boundary));
      layers.emplace_back(pair_measurements(L, 0, spec.boundary, p, rng));
      layers.emplace_back(pair_measurements(L, 1, spec.boundary, p, rng));
      layers.emplace_back(cnn_layer(L, 2, spec.boundary, rng));
      layers.emplace_back(pair_measurements(L, 0, spec.boundary, p, rng));
      layers.emplace_back(pair_measurements(L, 1, spec.boundary, p, rng));
    } else {
      auto unitaries = std::array<UnitaryLayer, 4>{cnot_layer(L, 0, spec.boundary, rng),
                                                   cnot_layer(L, 1, spec.boundary, rng),
                                                   cz_layer(L, 0, spec.boundary), cz_layer(L, 1, spec.boundary)};
      auto measures = site_measurements(L, p, spec.schedule, rng);
      for (std::size_t k = 0; k < 4; ++k) {
        layers.emplace_back(std::move(unitaries[k]));
        layers.emplace_back(std::move(measures[k]));
      }
    }
    offsets.push_back(layers.size());
  }
  return CircuitRealization(spec, spec.num_qubits(), std::move(layers), std::move(offsets));
}

}  // namespace qav::circuit
