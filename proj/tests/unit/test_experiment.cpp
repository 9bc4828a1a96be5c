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

#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "qav/experiment.hpp"

using namespace qav::experiment;

namespace {

std::string csv_of(const Result& r) {
  std::ostringstream os;
  for (const auto& t : r.tables) {
    os << t.name << "\n";
    write_csv(os, t);
  }
  return os.str();
}

}  // namespace

TEST_CASE("parallel_map keeps index order and rethrows") {
  for (std::size_t threads : {1U, 2U, 5U}) {
    const auto v = parallel_map(37, threads, [](std::size_t i) { return i * i; });
    REQUIRE(v.size() == 37);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == i * i);
  }
  CHECK(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t i) {
                                 if (i == 6) throw std::runtime_error("boom");
                                 return i;
                               }),
                  std::runtime_error);
}

TEST_CASE("params JSON") {
  Params p;
  apply_json({{"L", 32}, {"p", 0.1}, {"boundary", "open"}, {"sizes", {16, 32}}}, p);
  CHECK(p.L == 32);
  CHECK(p.p == 0.1);
  CHECK(p.boundary == qav::circuit::Boundary::Open);
  CHECK(p.sizes == std::vector<std::size_t>{16, 32});

  nlohmann::json j = p;
  Params q;
  apply_json(j, q);
  CHECK(nlohmann::json(q) == j);

  CHECK_THROWS_AS(apply_json({{"Lx", 3}}, p), qav::ConfigError);
  CHECK_THROWS_AS(apply_json({{"p", 2.0}}, p), qav::ConfigError);
  CHECK_THROWS_AS(apply_json({{"samples", "many"}}, p), qav::ConfigError);
  CHECK_THROWS_AS(apply_json({{"boundary", "twisted"}}, p), qav::ConfigError);
  CHECK(p.L == 32);
}

TEST_CASE("horizon and size override") {
  Params p;
  p.t_factor = 3;
  CHECK(p.horizon(10) == 30);
  p.T = 7;
  CHECK(p.horizon(10) == 7);

  Params s;
  s.sizes = {32, 64, 128, 256};
  override_L(s, 100);
  CHECK(s.sizes == std::vector<std::size_t>{32, 64, 100});
  Params single;
  override_L(single, 24);
  CHECK(single.L == 24);
  CHECK(single.sizes.empty());
}

TEST_CASE("CSV writer") {
  Table t{"x", {"a", "b"}, {{1.0, 0.1}, {2.5, 1e-20}}};
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str() == "a,b\n1,0.10000000000000001\n2.5,9.9999999999999995e-21\n");
}

TEST_CASE("preset registry") {
  std::set<std::string> names;
  for (const auto& p : presets()) {
    CHECK(names.insert(p.name).second);
    CHECK(p.run);
    CHECK_FALSE(p.details.empty());
  }
  for (const char* n : {"fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig8a", "fig8b", "fig9b",
                        "fig10b", "figB12", "figC13", "figD14", "oracle-check"}) {
    CHECK(names.contains(n));
  }
  CHECK_THROWS_AS(find_preset("nosuch"), qav::ConfigError);
}

TEST_CASE("thread count from the environment") {
  ::setenv("QA_VOLUME_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  ::setenv("QA_VOLUME_THREADS", "zero", 1);
  CHECK_THROWS_AS(default_threads(), qav::ConfigError);
  ::unsetenv("QA_VOLUME_THREADS");
  CHECK(default_threads() >= 1);
}

TEST_CASE("results do not depend on the thread count") {
  struct Case {
    const char* name;
    nlohmann::json overrides;
  };
  const Case cases[] = {
      {"fig3b", {{"L", 32}, {"T", 16}, {"samples", 12}}},
      {"fig4b", {{"sizes", {8, 16}}, {"samples", 6}}},
      {"fig5a", {{"L", 16}, {"T", 16}, {"samples", 5}, {"configs", 100}}},
      {"fig6b", {{"sizes", {16, 24}}, {"samples", 4}}},
      {"fig9b", {{"sizes", {16, 24}}, {"samples", 4}}},
      {"fig10b", {{"sizes", {8, 12}}, {"samples", 3}}},
      {"figC13", {{"l_a", 20}, {"T", 100}, {"samples", 6}}},
      {"pc-scan-z2", {{"sizes", {8, 12}}, {"ps", {0.2, 0.4}}, {"samples", 3}}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto& preset = find_preset(c.name);
    Params p = preset.defaults;
    apply_json(c.overrides, p);
    const auto one = preset.run(p, 1);
    const auto three = preset.run(p, 3);
    CHECK(csv_of(one) == csv_of(three));
    CHECK(one.fits == three.fits);
    p.seed += 1;
    CHECK(csv_of(preset.run(p, 2)) != csv_of(one));
  }
}

TEST_CASE("oracle-check agrees across engines") {
  const auto& preset = find_preset("oracle-check");
  Params p = preset.defaults;
  p.samples = 10;
  const auto r = preset.run(p, 2);
  CHECK(r.fits.at("entropy_mismatches") == 0);
  CHECK(r.fits.at("phase_count_mismatches") == 0);
  CHECK(r.fits.at("comparisons") == 70);
}
