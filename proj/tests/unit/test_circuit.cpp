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

#include <array>
#include <cmath>
#include <set>

#include "doctest.h"
#include "qav/circuit.hpp"

using namespace qav::circuit;

namespace {

CircuitSpec make(Family f, std::size_t L, double p, std::size_t T = 1, Boundary b = Boundary::Periodic) {
  CircuitSpec s;
  s.family = f;
  s.L = L;
  s.p = p;
  s.T = T;
  s.boundary = b;
  if (f == Family::UmU) {
    s.T1 = T;
    s.T2 = T;
  }
  return s;
}

std::set<std::uint32_t> support(const Gate& g) {
  std::set<std::uint32_t> s{g.control, g.target};
  if (g.target2 != kNoSite) s.insert(g.target2);
  return s;
}

}  // namespace

TEST_CASE("ENTANGLE step layout at p = 0 and p = 1") {
  auto rng = rng_stream(1, 0);
  const auto r0 = sample_realization(make(Family::Entangle, 8, 0.0), rng);
  REQUIRE(r0.layers().size() == 8);
  CHECK(r0.steps() == 1);
  CHECK(r0.step(0).empty());
  const GateKind kinds[4] = {GateKind::CNOT, GateKind::CNOT, GateKind::CZ, GateKind::CZ};
  for (std::size_t k = 0; k < 8; ++k) {
    if (k % 2 == 0) {
      const auto& u = std::get<UnitaryLayer>(r0.layers()[k]);
      CHECK(u.kind == kinds[k / 2]);
      CHECK(u.gates.size() == 4);
    } else {
      CHECK(std::get<MeasureLayer>(r0.layers()[k]).events.empty());
    }
  }
  const auto r1 = sample_realization(make(Family::Entangle, 8, 1.0), rng);
  std::size_t total = 0;
  for (std::size_t k = 1; k < 8; k += 2) total += std::get<MeasureLayer>(r1.layers()[k]).events.size();
  CHECK(total == 8);
}

TEST_CASE("brickwork bonds alternate and wrap only when periodic") {
  const auto even = brickwork_bonds(8, 0, Boundary::Periodic);
  const auto odd = brickwork_bonds(8, 1, Boundary::Periodic);
  const auto odd_open = brickwork_bonds(8, 1, Boundary::Open);
  CHECK(even.size() == 4);
  CHECK(odd.size() == 4);
  CHECK(odd_open.size() == 3);
  CHECK(odd.back() == std::pair<std::uint32_t, std::uint32_t>{7, 0});
  for (auto [a, b] : even) CHECK(a % 2 == 0);
}

TEST_CASE("PURIFY couples each system qubit to its reference first") {
  auto rng = rng_stream(3, 0);
  const auto r = sample_realization(make(Family::Purify, 4, 0.3, 5), rng);
  CHECK(r.num_qubits() == 8);
  REQUIRE(r.step(0).size() == 1);
  const auto& c = std::get<UnitaryLayer>(r.step(0)[0]);
  CHECK(c.coupling);
  CHECK(c.kind == GateKind::CZ);
  REQUIRE(c.gates.size() == 4);
  for (std::uint32_t i = 0; i < 4; ++i) {
    CHECK(c.gates[i].control == i);
    CHECK(c.gates[i].target == 4 + i);
  }
  for (std::size_t t = 1; t <= r.steps(); ++t) {
    for (const auto& layer : r.step(t)) {
      if (const auto* u = std::get_if<UnitaryLayer>(&layer)) {
        for (const auto& g : u->gates) {
          for (auto s : support(g)) CHECK(s < 4);
        }
      } else {
        for (const auto& e : std::get<MeasureLayer>(layer).events) CHECK(e.site < 4);
      }
    }
  }
}

TEST_CASE("UM_U runs measurement-free steps after T1") {
  auto rng = rng_stream(5, 0);
  CircuitSpec s = make(Family::UmU, 6, 1.0);
  s.T1 = 2;
  s.T2 = 3;
  const auto r = sample_realization(s, rng);
  CHECK(r.steps() == 5);
  for (std::size_t t = 1; t <= 5; ++t) {
    std::size_t measured = 0;
    for (const auto& layer : r.step(t)) {
      if (const auto* m = std::get_if<MeasureLayer>(&layer)) measured += m->events.size();
    }
    CHECK(measured == (t <= 2 ? 6U : 0U));
  }
}

TEST_CASE("Z2 step layout") {
  auto rng = rng_stream(9, 0);
  const auto r = sample_realization(make(Family::Z2, 12, 1.0, 1), rng);
  std::size_t cnn = 0;
  std::size_t cz = 0;
  std::size_t measure_rows = 0;
  for (const auto& layer : r.step(1)) {
    if (const auto* u = std::get_if<UnitaryLayer>(&layer)) {
      if (u->kind == GateKind::CNN) {
        ++cnn;
        CHECK(u->gates.size() == 4);
      } else {
        ++cz;
      }
    } else {
      const auto& m = std::get<MeasureLayer>(layer);
      ++measure_rows;
      CHECK(m.events.size() == 6);
      for (const auto& e : m.events) {
        CHECK(e.paired());
        CHECK((e.site == e.left || e.site == e.right));
        CHECK(e.right == (e.left + 1) % 12);
      }
    }
  }
  CHECK(cnn == 3);
  CHECK(cz == 2);
  CHECK(measure_rows == 6);
}

TEST_CASE("gate supports are disjoint within every layer") {
  for (Family f : {Family::Entangle, Family::Purify, Family::Z2}) {
    for (Boundary b : {Boundary::Periodic, Boundary::Open}) {
      for (std::size_t L : {4U, 6U, 10U, 16U}) {
        auto rng = rng_stream(7, L);
        const auto r = sample_realization(make(f, L, 0.5, 3, b), rng);
        for (const auto& layer : r.layers()) {
          std::set<std::uint32_t> used;
          std::size_t count = 0;
          if (const auto* u = std::get_if<UnitaryLayer>(&layer)) {
            for (const auto& g : u->gates) {
              for (auto s : support(g)) {
                used.insert(s);
                ++count;
              }
            }
          } else {
            for (const auto& e : std::get<MeasureLayer>(layer).events) {
              used.insert(e.site);
              ++count;
              if (e.paired()) {
                used.insert(e.partner());
                ++count;
              }
            }
          }
          CHECK(used.size() == count);
        }
      }
    }
  }
}

TEST_CASE("measured fraction matches p") {
  auto rng = rng_stream(21, 0);
  const double p = 0.13;
  const auto r = sample_realization(make(Family::Entangle, 64, p, 400), rng);
  std::size_t measured = 0;
  std::array<std::size_t, 4> per_layer{};
  for (std::size_t t = 1; t <= r.steps(); ++t) {
    std::set<std::uint32_t> sites;
    std::size_t k = 0;
    for (const auto& layer : r.step(t)) {
      if (const auto* m = std::get_if<MeasureLayer>(&layer)) {
        for (const auto& e : m->events) CHECK(sites.insert(e.site).second);
        measured += m->events.size();
        per_layer[k++] += m->events.size();
      }
    }
    CHECK(k == 4);
  }
  const std::size_t slots = 64 * r.steps();
  for (std::size_t n : per_layer) {
    const double q = p / 4;
    CHECK(std::abs(static_cast<double>(n) - q * slots) < 4 * std::sqrt(slots * q * (1 - q)));
  }
  const double mean = p * static_cast<double>(slots);
  const double sigma = std::sqrt(static_cast<double>(slots) * p * (1 - p));
  CHECK(std::abs(static_cast<double>(measured) - mean) < 3 * sigma);
}

TEST_CASE("measurement schedules") {
  for (auto sched : {MeasureSchedule::EveryLayer, MeasureSchedule::StepEnd}) {
    auto rng = rng_stream(22, 0);
    CircuitSpec s = make(Family::Entangle, 16, 1.0, 2);
    s.schedule = sched;
    const auto r = sample_realization(s, rng);
    for (std::size_t t = 1; t <= 2; ++t) {
      std::vector<std::size_t> counts;
      for (const auto& layer : r.step(t)) {
        if (const auto* m = std::get_if<MeasureLayer>(&layer)) counts.push_back(m->events.size());
      }
      REQUIRE(counts.size() == 4);
      if (sched == MeasureSchedule::EveryLayer) {
        CHECK(counts == std::vector<std::size_t>{16, 16, 16, 16});
      } else {
        CHECK(counts == std::vector<std::size_t>{0, 0, 0, 16});
      }
    }
  }
}

TEST_CASE("streams are deterministic and distinct") {
  const CircuitSpec s = make(Family::Entangle, 16, 0.2, 4);
  auto a = rng_stream(42, 0);
  auto b = rng_stream(42, 0);
  auto c = rng_stream(42, 1);
  const auto ra = sample_realization(s, a);
  CHECK(ra == sample_realization(s, b));
  CHECK_FALSE(ra == sample_realization(s, c));
}

TEST_CASE("spec JSON round trip and validation") {
  CircuitSpec s = make(Family::UmU, 10, 0.08);
  s.T1 = 20;
  s.T2 = 20;
  s.seed = 99;
  s.boundary = Boundary::Open;
  s.schedule = MeasureSchedule::StepEnd;
  nlohmann::json j = s;
  CHECK(j.size() == 9);
  for (const char* key : {"family", "L", "p", "boundary", "schedule", "T", "T1", "T2", "seed"}) CHECK(j.contains(key));
  CHECK(j.get<CircuitSpec>() == s);
  CHECK_THROWS_AS(nlohmann::json({{"family", "ENTANGLE"}, {"L", 4}, {"p", 0.1}, {"schedule", "later"}}).get<CircuitSpec>(),
                  qav::ConfigError);

  CHECK_THROWS_AS(nlohmann::json({{"family", "NOPE"}, {"L", 4}, {"p", 0.1}}).get<CircuitSpec>(), qav::ConfigError);
  CHECK_THROWS_AS(nlohmann::json({{"family", "ENTANGLE"}, {"L", 4}, {"p", 0.1}, {"x", 1}}).get<CircuitSpec>(),
                  qav::ConfigError);
  CHECK_THROWS_AS(make(Family::Entangle, 5, 0.1).validate(), qav::ConfigError);
  CHECK_THROWS_AS(make(Family::Entangle, 6, 1.5).validate(), qav::ConfigError);
  CircuitSpec u = make(Family::UmU, 6, 0.1);
  u.T2 = 0;
  CHECK_THROWS_AS(u.validate(), qav::ConfigError);
}

TEST_CASE("reference coupling can be added and removed") {
  auto rng = rng_stream(4, 0);
  const auto r = sample_realization(make(Family::Entangle, 6, 0.3, 3), rng);
  const auto p = r.with_reference_coupling();
  CHECK(p.num_qubits() == 12);
  CHECK(p.steps() == 3);
  CHECK(p.without_prefix() == r);
}
