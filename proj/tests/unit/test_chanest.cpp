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
#include <sstream>

#include "doctest.h"
#include "ecrs/chanest.hpp"
#include "support/rng.hpp"

using namespace ecrs;

namespace {

// Cyclic correlation sum_m a[m] conj(b[(m + s) mod N]).
cd cyclic_corr(const CVec& a, const CVec& b, int s) {
  const int n = static_cast<int>(a.size());
  cd acc = 0.0;
  for (int m = 0; m < n; ++m) acc += a(m) * std::conj(b((m + s) % n));
  return acc;
}

Channels toy_channels(const CVec& g, const Delays& tau) {
  Channels ch;
  ch.H = CMat::Zero(1, g.size());
  ch.g = g;
  ch.tau = tau;
  return ch;
}

}  // namespace

TEST_CASE("root assignment and validation") {
  CHECK(assign_roots(37, 3) == std::vector<int>{1, 2, 3});
  CHECK(assign_roots(100, 4) == std::vector<int>{1, 3, 7, 9});
  CHECK_THROWS_AS(assign_roots(3, 3), std::invalid_argument);

  PilotConfig c = make_pilot_config(37, 2, 0.0, 5);
  CHECK(c.n_r == 42);
  CHECK_NOTHROW(validate(c));
  c.n_r = 41;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.n_r = 42;
  c.roots = {2, 2};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.roots = {1, 37};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  PilotConfig e = make_pilot_config(100, 1, 0.0, 5);
  e.roots = {4};
  CHECK_THROWS_AS(validate(e), std::invalid_argument);
}

TEST_CASE("pilot norms") {
  for (int n_p : {1, 2, 37, 50, 100, 101, 400}) {
    const int K = n_p <= 2 ? 1 : 3;
    const CMat p = gen_pilots(make_pilot_config(n_p, K, 0.0, 3));
    for (int k = 0; k < K; ++k) CHECK(p.col(k).squaredNorm() == doctest::Approx(n_p).epsilon(1e-12));
  }
}

TEST_CASE("Zadoff-Chu correlation at prime length 37") {
  const CMat p = gen_pilots(make_pilot_config(37, 2, 0.0, 0));
  const double bound = 1.0 / std::sqrt(37.0);
  for (int s = 1; s < 37; ++s) {
    CHECK(std::abs(cyclic_corr(p.col(0), p.col(0), s)) / 37.0 <= bound + 1e-12);
    CHECK(std::abs(cyclic_corr(p.col(0), p.col(1), s)) / 37.0 == doctest::Approx(bound).epsilon(1e-9));
  }
  CHECK(std::abs(cyclic_corr(p.col(1), p.col(1), 0)) == doctest::Approx(37.0));
}

TEST_CASE("non-prime lengths extend the prime-length sequence cyclically") {
  CHECK(zc_base_length(100) == 97);
  CHECK(zc_base_length(101) == 101);
  CHECK(zc_base_length(50) == 47);
  CHECK(zc_base_length(2) == 2);
  CHECK(zc_base_length(1) == 1);
  CHECK_THROWS_AS(zc_base_length(0), std::invalid_argument);

  const CMat p = gen_pilots(make_pilot_config(100, 2, 0.0, 0));
  PilotConfig bc = make_pilot_config(97, 2, 0.0, 0);
  bc.roots = {1, 3};
  const CMat base = gen_pilots(bc);
  CHECK((p.topRows(97) - base).norm() == 0.0);
  CHECK((p.bottomRows(3) - base.topRows(3)).norm() == 0.0);
  // The base sequence has ideal cyclic autocorrelation.
  for (int s = 1; s < 97; ++s) CHECK(std::abs(cyclic_corr(base.col(0), base.col(0), s)) < 1e-9);
  for (int m = 0; m < 100; ++m) CHECK(std::abs(p(m, 1)) == doctest::Approx(1.0));
  // Roots must stay below the base length.
  PilotConfig c = make_pilot_config(100, 1, 0.0, 0);
  c.roots = {99};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("noiseless reception") {
  PilotConfig c = make_pilot_config(37, 1, 10.0, 4);
  const CMat p = gen_pilots(c);
  const CVec y = simulate_pilot_rx(p, CVec::Ones(1), {0}, c, std::nullopt);
  CHECK((y.head(37) - std::sqrt(c.power_watt()) * p.col(0)).norm() < 1e-14);
  CHECK(y.tail(4).isZero());

  std::mt19937_64 rng(1);
  PilotConfig c3 = make_pilot_config(53, 3, -5.0, 10);
  const CMat p3 = gen_pilots(c3);
  const CVec g = testutil::randn_cv(rng, 3);
  const Delays tau{2, 10, 7};
  CMat psi(c3.n_r, 3);
  for (int k = 0; k < 3; ++k) psi.col(k) = shifted_pilot(p3.col(k), tau[k], c3.n_r);
  const CVec y3 = simulate_pilot_rx(p3, g, tau, c3, std::nullopt);
  CHECK((y3 - std::sqrt(c3.power_watt()) * psi * g).norm() < 1e-13);
  CHECK_THROWS_AS(simulate_pilot_rx(p3, g, {2, 11, 7}, c3, std::nullopt), std::invalid_argument);
}

TEST_CASE("noise has unit variance per complex sample") {
  PilotConfig c = make_pilot_config(101, 1, 0.0, 0);
  c.n_r = 1000;
  const CMat p = gen_pilots(c);
  const CVec g = CVec::Constant(1, cd(0.3, -0.2));
  const CVec clean = simulate_pilot_rx(p, g, {0}, c, std::nullopt);
  double power = 0.0, re = 0.0;
  int n = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CVec z = simulate_pilot_rx(p, g, {0}, c, seed) - clean;
    power += z.squaredNorm();
    re += z.real().squaredNorm();
    n += static_cast<int>(z.size());
  }
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.05));
  CHECK(re / n == doctest::Approx(0.5).epsilon(0.05));
  CHECK(simulate_pilot_rx(p, g, {0}, c, 3) == simulate_pilot_rx(p, g, {0}, c, 3));
}

TEST_CASE("noiseless delay estimation is exact") {
  PilotConfig c = make_pilot_config(101, 1, 0.0, 30);
  const CMat p = gen_pilots(c);
  for (int tau = 0; tau <= 30; ++tau) {
    const CVec y = simulate_pilot_rx(p, CVec::Constant(1, cd(0.0, 2.0)), {tau}, c, std::nullopt);
    CHECK(estimate_delays(y, p, c).tau_hat[0] == tau);
  }
  // Ties resolve to the smallest delay.
  const auto flat = estimate_delays(CVec::Zero(c.n_r), p, c);
  CHECK(flat.tau_hat[0] == 0);
  CHECK(flat.profiles[0].size() == 31);
}

TEST_CASE("projection profile splits into signal, interference and noise") {
  std::mt19937_64 rng(2);
  PilotConfig c = make_pilot_config(61, 3, -3.0, 12);
  const CMat p = gen_pilots(c);
  const CVec g = testutil::randn_cv(rng, 3);
  const Delays tau{4, 0, 12};
  const CVec y = simulate_pilot_rx(p, g, tau, c, 17);
  const CVec z = y - simulate_pilot_rx(p, g, tau, c, std::nullopt);
  const auto est = estimate_delays(y, p, c);
  const double a = std::sqrt(c.power_watt());
  for (int k = 0; k < 3; ++k) {
    for (int t = 0; t <= c.tau_max; ++t) {
      const CVec probe = shifted_pilot(p.col(k), t, c.n_r);
      const cd signal = a * g(k) * probe.dot(shifted_pilot(p.col(k), tau[k], c.n_r));
      cd interference = 0.0;
      for (int j = 0; j < 3; ++j)
        if (j != k) interference += a * g(j) * probe.dot(shifted_pilot(p.col(j), tau[j], c.n_r));
      const cd noise = probe.dot(z);
      CHECK(est.profiles[k](t) == doctest::Approx(std::abs(signal + interference + noise)).epsilon(1e-12));
    }
  }
}

TEST_CASE("least-squares gains") {
  std::mt19937_64 rng(3);
  PilotConfig c = make_pilot_config(100, 5, 0.0, 20);
  const CMat p = gen_pilots(c);
  const CVec g = testutil::randn_cv(rng, 5, 1e-3);
  const Delays tau{0, 5, 9, 14, 20};
  const CVec y = simulate_pilot_rx(p, g, tau, c, std::nullopt);
  const auto ge = estimate_gains(y, p, tau, c);
  CHECK_FALSE(ge.rank_deficient);
  CHECK((ge.g_hat - g).squaredNorm() / g.squaredNorm() <= 1e-20);

  // One mUE, delay off by one: LS keeps only the lag-one correlation rho.
  PilotConfig c1 = make_pilot_config(101, 1, 0.0, 4);
  const CMat p1 = gen_pilots(c1);
  const CVec y1 = simulate_pilot_rx(p1, CVec::Ones(1), {2}, c1, std::nullopt);
  const auto g1 = estimate_gains(y1, p1, {3}, c1);
  const cd rho = shifted_pilot(p1.col(0), 3, c1.n_r).dot(shifted_pilot(p1.col(0), 2, c1.n_r)) / 101.0;
  const double nmse = std::norm(g1.g_hat(0) - 1.0);
  CHECK(nmse == doctest::Approx(std::norm(1.0 - rho)).epsilon(1e-12));
  CHECK(nmse > 0.5);
  CHECK(std::abs(nmse - (1.0 - std::norm(rho))) <= 2.0 * std::abs(rho) * (1.0 + std::abs(rho)) + 1e-12);

  // Identical columns at the same shift cannot be separated.
  CMat twin(100, 2);
  twin.col(0) = p.col(0);
  twin.col(1) = p.col(0);
  PilotConfig c2 = make_pilot_config(100, 2, 0.0, 20);
  const CVec y2 = simulate_pilot_rx(twin, CVec::Ones(2), {3, 3}, c2, std::nullopt);
  const auto gd = estimate_gains(y2, twin, {3, 3}, c2);
  CHECK(gd.rank_deficient);
  CHECK(gd.g_hat.allFinite());
  CHECK(std::abs(gd.g_hat.sum() - cd(2.0)) < 1e-10);
}

TEST_CASE("end-to-end noiseless estimation on scenes") {
  // Without noise only cross-correlation between mUEs causes delay errors;
  // long pilots remove them.
  SceneConfig cfg;
  cfg.num_mues = 5;
  for (int n_p : {100, 400}) {
    const PilotConfig pc = make_pilot_config(n_p, 5, 0.0, max_delay_taps(cfg));
    double der = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Channels ch = sample_scene(cfg, seed);
      const auto est = estimate_channel(ch, pc, std::nullopt);
      der += est.der / 20.0;
      if (est.tau_hat == ch.tau) CHECK(est.nmse <= 1e-20);
    }
    CHECK(der <= (n_p == 400 ? 0.0 : 0.05));
  }
}

TEST_CASE("at vanishing power the delay is a uniform guess") {
  PilotConfig c = make_pilot_config(37, 1, -150.0, 9);
  const Channels ch = toy_channels(CVec::Ones(1), {4});
  std::vector<Channels> truth;
  std::vector<EstimationResult> est;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    truth.push_back(ch);
    est.push_back(estimate_channel(ch, c, seed));
  }
  const auto m = metrics(truth, est);
  CHECK(m.runs == 2000);
  CHECK(m.der == doctest::Approx(9.0 / 10.0).epsilon(0.03));
}

TEST_CASE("metric aggregation") {
  const Channels ch = toy_channels(CVec::Ones(5), {0, 1, 2, 3, 4});
  EstimationResult right;
  right.tau_hat = ch.tau;
  right.g_hat = ch.g;
  EstimationResult all_wrong = right;
  all_wrong.tau_hat = {1, 2, 3, 4, 5};
  EstimationResult one_wrong = right;
  one_wrong.tau_hat[2] = 0;
  one_wrong.g_hat(0) = 2.0;  // NMSE 1/5

  const std::vector<Channels> t2{ch, ch};
  CHECK(metrics(t2, std::vector{right, right}).der == 0.0);
  CHECK(metrics(t2, std::vector{all_wrong, all_wrong}).der == 1.0);
  const auto m = metrics(t2, std::vector{one_wrong, one_wrong});
  CHECK(m.der == doctest::Approx(0.2));
  CHECK(m.nmse == doctest::Approx(0.2));
  CHECK_THROWS_AS(metrics(t2, std::vector{right}), std::invalid_argument);

  const Channels est = with_estimates(ch, one_wrong);
  CHECK(est.tau == one_wrong.tau_hat);
  CHECK(est.g == one_wrong.g_hat);
}

TEST_CASE("csv exports") {
  const CMat p = gen_pilots(make_pilot_config(3, 1, 0.0, 0));
  std::ostringstream os;
  write_pilots_csv(os, p);
  CHECK(os.str().rfind("k,m,re,im\n0,0,1,", 0) == 0);
  std::ostringstream pr;
  write_profiles_csv(pr, {RVec::Constant(2, 0.5)});
  CHECK(pr.str() == "k,tau,magnitude\n0,0,0.5\n0,1,0.5\n");
}
