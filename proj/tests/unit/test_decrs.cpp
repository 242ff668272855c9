// Copyright 2026 The ecrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"
#include "ecrs/baselines.hpp"
#include "ecrs/decrs.hpp"
#include "support/oracles.hpp"
#include "support/rng.hpp"

using namespace ecrs;

namespace {

SceneConfig scene(int K) {
  SceneConfig c;
  c.num_mues = K;
  return c;
}

}  // namespace

TEST_CASE("single mUE: DeCRS and IeCRS coincide") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const SceneConfig cfg = scene(1);
    const Channels ch = sample_scene(cfg, seed);
    const auto d = solve_decrs(ch, cfg);
    IecrsOptions o;
    o.phase2 = Phase2Method::Sca;
    const auto i = solve_iecrs(ch, cfg, o);
    CHECK(d.report.min_rate == doctest::Approx(i.report.min_rate).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("silent mUEs leave nothing for the dUE") {
  const SceneConfig cfg = scene(3);
  const Channels ch = sample_scene(cfg, 4);
  const auto d = solve_decrs(ch.H, ch.g, cfg.ap_power_watt(), RVec::Zero(3));
  CHECK(d.report.due == 0.0);
  CHECK(d.report.min_rate == 0.0);
  CHECK(d.precoders.g_bar.isZero());
  CHECK(d.report.mue.minCoeff() > 0.0);
}

TEST_CASE("two mUEs, one antenna: matches the grid oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const CMat H = testutil::randn_c(rng, 1, 2, 2.0);
    const CVec g = testutil::randn_cv(rng, 2, 1.5);
    const double p = 1.0;
    const auto d = solve_decrs(H, g, p, RVec::Ones(2));
    const testutil::DecrsK2Oracle oracle(std::norm(H(0, 0)), std::norm(H(0, 1)), p, std::norm(g(0)),
                                         std::norm(g(1)));
    const double want = oracle.solve();
    CHECK(d.report.min_rate == doctest::Approx(want).epsilon(5e-3).scale(1.0));
    CHECK(d.report.min_rate <= want + 1e-3);
  }
}

TEST_CASE("default scene: monotone trace, slack consistency and audit") {
  const SceneConfig cfg = scene(5);
  const Channels ch = sample_scene(cfg, 6);
  const auto d = solve_decrs(ch, cfg);
  for (std::size_t i = 1; i < d.t0_trace.size(); ++i) CHECK(d.t0_trace[i] <= d.t0_trace[i - 1] + 1e-8);
  CHECK(d.converged);
  CHECK(d.t.sum() <= d.t0 + 1e-8);

  const RVec r2 = rate_phase2_decrs(d.precoders.g_bar);
  for (int k = 0; k < 5; ++k) {
    const double xi = 1.0 - r2(k) * kLn2;  // WMSE at the MMSE receiver
    CHECK(d.t(k) == doctest::Approx(std::max(-d.precoders.c(5 + k), (xi - 1.0) / kLn2)).epsilon(1e-6).scale(1.0));
  }
  const auto rx = mmse_update_decrs(ch.H, d.precoders.F, d.precoders.g_bar);
  const auto s = mse_suite_decrs(ch.H, d.precoders.F, d.precoders.g_bar, rx);
  for (int k = 0; k < 5; ++k) CHECK((s.xi_d(k) - 1.0) / kLn2 == doctest::Approx(-r2(k)).epsilon(1e-10).scale(1.0));

  const auto a = decrs_rate_audit(d.precoders, d.t0, ch, cfg.ap_power_watt(), mue_powers(cfg));
  CHECK(a.passed);
  CHECK(a.t0_gap <= 1e-6);
  CHECK(a.report.min_rate == doctest::Approx(d.report.min_rate).epsilon(1e-12));
}

TEST_CASE("audit of a hand-built point") {
  Channels ch;
  ch.H = CMat::Identity(2, 2);
  ch.g = CVec::Ones(2);
  ch.tau = {0, 1};
  DecrsPrecoders p;
  p.F = CMat::Zero(2, 4);
  p.F(0, 0) = 1.0;  // common stream of mUE 1, seen by mUE 1 only
  p.F(1, 3) = 1.0;  // private stream of mUE 2
  p.g_bar = CVec::Zero(2);
  p.g_bar(0) = 1.0;
  // mUE 1: R_c = 1, R_p = 0. mUE 2: R_c = 0, R_p = 1. Second phase: log2(2) and 0.
  p.c = RVec::Zero(4);
  p.c(0) = 0.5;
  p.c(2) = 0.5;
  const auto a = decrs_rate_audit(p, -0.5, ch, 2.0, RVec::Ones(2));
  CHECK(a.passed);
  CHECK(a.report.mue(0) == doctest::Approx(0.5));
  CHECK(a.report.mue(1) == doctest::Approx(1.0));
  CHECK(a.report.due == doctest::Approx(0.5));
  CHECK(a.report.min_rate == doctest::Approx(0.5));

  // Over-allocating the common rate of mUE 1 is flagged.
  DecrsPrecoders bad = p;
  bad.c(2) = 0.6;
  const auto b = decrs_rate_audit(bad, -0.5, ch, 2.0, RVec::Ones(2));
  CHECK_FALSE(b.passed);
  REQUIRE_FALSE(b.report.violations.empty());
  CHECK(b.report.violations[0].find("common rate") != std::string::npos);

  // Power budgets and a wrong t0.
  DecrsPrecoders loud = p;
  loud.F *= 2.0;
  loud.g_bar(0) = 1.5;
  const auto c = decrs_rate_audit(loud, -0.9, ch, 2.0, RVec::Ones(2));
  CHECK_FALSE(c.passed);
  CHECK(c.power_excess == doctest::Approx(6.0));
  CHECK(c.mue_power_excess == doctest::Approx(1.25));
  CHECK(c.issues.size() >= 3);
}

TEST_CASE("audit after perturbing a converged solution") {
  const SceneConfig cfg = scene(3);
  const Channels ch = sample_scene(cfg, 8);
  const auto d = solve_decrs(ch, cfg);
  DecrsPrecoders p = d.precoders;
  p.c(3) += 0.05;
  const auto a = decrs_rate_audit(p, d.t0, ch, cfg.ap_power_watt(), mue_powers(cfg));
  CHECK_FALSE(a.passed);
  bool flagged = false;
  for (const auto& v : a.report.violations) flagged |= v.find("common rate violated for mUE 0") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("pinned split matches DC-NOMA") {
  const SceneConfig cfg = scene(3);
  const Channels ch = sample_scene(cfg, 10);
  DecrsOptions o;
  o.ao.pin_private_common = true;
  const auto d = solve_decrs(ch, cfg, o);
  CHECK(d.pinned);
  CHECK(d.precoders.c.head(3).isZero());
  const auto n = solve_dc_noma(ch, cfg);
  CHECK(n.report.min_rate == doctest::Approx(d.report.min_rate).epsilon(1e-12));
}

TEST_CASE("evaluation on the design channel reproduces the report") {
  const SceneConfig cfg = scene(2);
  const Channels ch = sample_scene(cfg, 12);
  const auto d = solve_decrs(ch, cfg);
  const auto r = evaluate_decrs(d.precoders, ch.g, ch);
  CHECK(r.min_rate == doctest::Approx(d.report.min_rate).epsilon(1e-12));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(solve_decrs(CMat::Zero(2, 0), CVec(), 1.0, RVec()), std::invalid_argument);
  CHECK_THROWS_AS(solve_decrs(CMat::Ones(2, 2), CVec::Ones(1), 1.0, RVec::Ones(2)), std::invalid_argument);
  CHECK_THROWS_AS(solve_decrs(CMat::Ones(2, 2), CVec::Ones(2), -1.0, RVec::Ones(2)), std::invalid_argument);
}
