// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "catch2/catch_amalgamated.hpp"

#include "dpsynth/ipf.hpp"
#include "dpsynth/rng.hpp"
#include "test_util.hpp"

using namespace dpsynth;
using dpsynth::testing::make_codebook;
using Catch::Approx;

namespace {

MarginTable one_way_target(const CodebookPtr& cb, std::size_t var,
                           std::vector<double> probs) {
  MarginTable m(cb, MarginSpec{{var}}, TableMode::kProbabilities);
  m.values() = std::move(probs);
  return m;
}

// 2x2x2 joint with all one- and two-way log-linear terms but no three-way
// term, in effect coding. IPF on its two-way margins must recover it.
ContingencyTable no_three_way_joint(RngStream& rng) {
  auto cb = make_codebook({2, 2, 2});
  ContingencyTable t(cb, TableMode::kProbabilities);
  double uA = 0.5 * rng.normal01(), uB = 0.5 * rng.normal01();
  double uC = 0.5 * rng.normal01(), uAB = 0.5 * rng.normal01();
  double uAC = 0.5 * rng.normal01(), uBC = 0.5 * rng.normal01();
  for (Level a = 0; a < 2; ++a)
    for (Level b = 0; b < 2; ++b)
      for (Level c = 0; c < 2; ++c) {
        double sa = a ? 1 : -1, sb = b ? 1 : -1, sc = c ? 1 : -1;
        double logp = uA * sa + uB * sb + uC * sc + uAB * sa * sb +
                      uAC * sa * sc + uBC * sb * sc;
        t.values()[cb->encode(LevelTuple{a, b, c})] = std::exp(logp);
      }
  double total = stable_sum(t.values());
  for (double& p : t.values()) p /= total;
  return t;
}

}  // namespace

TEST_CASE("default_init is uniform over free cells") {
  ContingencyTable init = default_init(make_codebook({2, 2}));
  CHECK(init.values() == std::vector<double>{0.25, 0.25, 0.25, 0.25});

  ContingencyTable with_sz = default_init(make_codebook({2, 2}), {3});
  CHECK(with_sz.values()[0] == Approx(1.0 / 3));
  CHECK(with_sz.values()[3] == 0.0);

  ContingencyTable big = default_init(make_codebook({3, 4, 5}));
  CHECK(big.values()[0] == Approx(1.0 / 60));
  CHECK(stable_sum(big.values()) == Approx(1.0).margin(1e-12));
}

TEST_CASE("uniform targets leave the uniform table unchanged in one sweep") {
  auto cb = make_codebook({2, 2});
  IpfTargets targets;
  targets.margins.push_back(one_way_target(cb, 0, {0.5, 0.5}));
  targets.margins.push_back(one_way_target(cb, 1, {0.5, 0.5}));
  IpfResult fit = ipf_fit(default_init(cb), targets);
  CHECK(fit.converged);
  CHECK(fit.iterations == 1);
  for (double p : fit.fitted.values()) CHECK(p == Approx(0.25));
}

TEST_CASE("one-way targets from uniform init give the product table") {
  auto cb = make_codebook({2, 2});
  IpfTargets targets;
  targets.margins.push_back(one_way_target(cb, 0, {0.3, 0.7}));
  targets.margins.push_back(one_way_target(cb, 1, {0.6, 0.4}));
  IpfResult fit = ipf_fit(default_init(cb), targets);
  CHECK(fit.converged);
  CHECK(fit.fitted.values()[0] == Approx(0.18).margin(1e-10));
  CHECK(fit.fitted.values()[1] == Approx(0.12).margin(1e-10));
  CHECK(fit.fitted.values()[2] == Approx(0.42).margin(1e-10));
  CHECK(fit.fitted.values()[3] == Approx(0.28).margin(1e-10));
}

TEST_CASE("ipf recovers a no-three-way 2x2x2 joint from two-way margins") {
  RngStream rng(31, 0);
  for (int trial = 0; trial < 25; ++trial) {
    ContingencyTable joint = no_three_way_joint(rng);
    IpfTargets targets;
    for (const auto& spec : all_margins(joint.codebook(), 2))
      targets.margins.push_back(marginalize(joint, spec));
    IpfResult fit =
        ipf_fit(default_init(joint.codebook_ptr()), targets, 1e-10, 5000);
    REQUIRE(fit.converged);
    for (CellIndex i = 0; i < joint.n_cells(); ++i)
      CHECK(fit.fitted.values()[i] == Approx(joint.values()[i]).margin(1e-6));
  }
}

TEST_CASE("compatible targets are matched within 10x tol") {
  RngStream rng(37, 0);
  for (int trial = 0; trial < 25; ++trial) {
    auto cb = make_codebook({2, 3, 2});
    ContingencyTable joint(cb, TableMode::kProbabilities);
    for (double& p : joint.values()) p = rng.uniform01() + 0.1;
    double total = stable_sum(joint.values());
    for (double& p : joint.values()) p /= total;

    IpfTargets targets;
    for (const auto& spec : all_margins(*cb, 2))
      targets.margins.push_back(marginalize(joint, spec));
    const double tol = 1e-9;
    IpfResult fit = ipf_fit(default_init(cb), targets, tol, 5000);
    CHECK(fit.converged);
    CHECK(fit.max_margin_discrepancy < 10 * tol);
    CHECK(stable_sum(fit.fitted.values()) == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("ipf preserves the init odds ratio when one-way margins are fit") {
  auto cb = make_codebook({2, 2});
  IpfTargets targets;
  targets.margins.push_back(one_way_target(cb, 0, {0.35, 0.65}));
  targets.margins.push_back(one_way_target(cb, 1, {0.8, 0.2}));

  IpfResult from_uniform = ipf_fit(default_init(cb), targets, 1e-12, 5000);
  const auto& u = from_uniform.fitted.values();
  CHECK(u[0] * u[3] / (u[1] * u[2]) == Approx(1.0).margin(1e-6));

  ContingencyTable skewed(cb, TableMode::kProbabilities);
  skewed.values() = {0.4, 0.1, 0.1, 0.4};  // odds ratio 16
  IpfResult from_skewed = ipf_fit(skewed, targets, 1e-12, 5000);
  const auto& s = from_skewed.fitted.values();
  CHECK(s[0] * s[3] / (s[1] * s[2]) == Approx(16.0).epsilon(1e-6));
}

TEST_CASE("incompatible targets stop at the cap with an honest residual") {
  auto cb = make_codebook({2, 2, 2});
  // The B margin implied by the AB target contradicts the BC target.
  MarginTable ab(cb, MarginSpec{{0, 1}}, TableMode::kProbabilities);
  ab.values() = {0.45, 0.05, 0.45, 0.05};  // B: (0.9, 0.1)
  MarginTable bc(cb, MarginSpec{{1, 2}}, TableMode::kProbabilities);
  bc.values() = {0.05, 0.05, 0.45, 0.45};  // B: (0.1, 0.9)
  IpfTargets targets;
  targets.margins.push_back(ab);
  targets.margins.push_back(bc);

  IpfResult fit = ipf_fit(default_init(cb), targets, 1e-8, 200);
  CHECK(fit.iterations <= 200);
  CHECK((!fit.converged || fit.max_margin_discrepancy > 1e-3));
  CHECK(stable_sum(fit.fitted.values()) == Approx(1.0).margin(1e-9));
  for (double p : fit.fitted.values()) CHECK(p >= 0.0);
}

TEST_CASE("structural zeros survive fitting") {
  auto cb = make_codebook({2, 2});
  ContingencyTable init = default_init(cb, {3});
  IpfTargets targets;
  targets.margins.push_back(one_way_target(cb, 0, {0.5, 0.5}));
  targets.margins.push_back(one_way_target(cb, 1, {0.7, 0.3}));
  IpfResult fit = ipf_fit(init, targets, 1e-10, 5000);
  CHECK(fit.fitted.values()[3] == 0.0);
  CHECK(fit.fitted.is_structural_zero(3));
  CHECK(stable_sum(fit.fitted.values()) == Approx(1.0).margin(1e-9));
}

TEST_CASE("invalid targets and inits are rejected") {
  auto cb = make_codebook({2, 2});
  IpfTargets bad_sum;
  bad_sum.margins.push_back(one_way_target(cb, 0, {0.5, 0.6}));
  bad_sum.margins.push_back(one_way_target(cb, 1, {0.5, 0.5}));
  CHECK_THROWS_AS(ipf_fit(default_init(cb), bad_sum), DataError);

  IpfTargets dup;
  dup.margins.push_back(one_way_target(cb, 0, {0.5, 0.5}));
  dup.margins.push_back(one_way_target(cb, 0, {0.5, 0.5}));
  CHECK_THROWS_AS(ipf_fit(default_init(cb), dup), DataError);

  IpfTargets uncovered;
  uncovered.margins.push_back(one_way_target(cb, 0, {0.5, 0.5}));
  CHECK_THROWS_AS(ipf_fit(default_init(cb), uncovered), DataError);

  IpfTargets ok;
  ok.margins.push_back(one_way_target(cb, 0, {0.5, 0.5}));
  ok.margins.push_back(one_way_target(cb, 1, {0.5, 0.5}));
  ContingencyTable zero_init(cb, TableMode::kProbabilities);
  zero_init.values() = {1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(ipf_fit(zero_init, ok), DataError);
  CHECK_THROWS_AS(ipf_fit(default_init(cb), ok, 0.0), DataError);
  CHECK_THROWS_AS(ipf_fit(default_init(cb), ok, 1e-8, 0), DataError);
}
