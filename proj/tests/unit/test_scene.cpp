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
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "ecrs/scene.hpp"

using namespace ecrs;

namespace {

// Config whose single mUE sits at a fixed point.
SceneConfig pinned_mue(const Vec3& p) {
  SceneConfig c;
  c.num_mues = 1;
  c.mue_box_lo = p;
  c.mue_box_hi = p;
  return c;
}

}  // namespace

TEST_CASE("pathloss at unit and doubled distance") {
  SceneConfig c;
  CHECK(pathloss(1.0, c) == doctest::Approx(c.beta0_linear()).epsilon(1e-15));
  CHECK(pathloss(2.0, c) == doctest::Approx(c.beta0_linear() / 4.0).epsilon(1e-15));
  c.beta0_db = -82.2;
  CHECK(pathloss(8.0, c) == doctest::Approx(std::pow(10.0, -8.22) / 64.0).epsilon(1e-12));
  CHECK_THROWS_AS(pathloss(0.0, c), std::domain_error);
  CHECK_THROWS_AS(pathloss(-1.0, c), std::domain_error);
}

TEST_CASE("default beta0 is the free-space loss at 1 m") {
  // Link budget: FSPL(1 m) = 20 log10(4 pi f / c).
  SceneConfig c;
  const double fspl_db = 20.0 * std::log10(4.0 * std::numbers::pi * 0.3e12 / 299792458.0);
  CHECK(10.0 * std::log10(c.beta0_linear()) == doctest::Approx(-fspl_db).epsilon(1e-12));
  CHECK(fspl_db == doctest::Approx(81.99).epsilon(1e-3));
}

TEST_CASE("noise power of the default band is -84 dBm") {
  SceneConfig c;
  CHECK(10.0 * std::log10(c.noise_power_watt()) + 30.0 == doctest::Approx(-84.0).epsilon(1e-12));
}

TEST_CASE("delay taps round the propagation delay") {
  CHECK(delay_taps(3.0, 1e9) == 10);
  CHECK(delay_taps(0.0, 1e9) == 0);
  CHECK(delay_taps(0.149, 1e9) == 0);
  CHECK(delay_taps(0.151, 1e9) == 1);
}

TEST_CASE("unit-gain single antenna channel") {
  // Place the mUE 2 m from the AP and pick beta0 so that beta0 d^-2 / sigma^2 = 1.
  SceneConfig c = pinned_mue(Vec3(0.0, 4.0, 3.0));
  c.n_v = c.n_h = 1;
  const double sigma2 = c.noise_power_watt();
  c.beta0_db = 10.0 * std::log10(sigma2 * 4.0);
  const Channels ch = sample_scene(c, 5);
  REQUIRE(ch.H.rows() == 1);
  CHECK(std::abs(ch.H(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("channel norms follow the path loss") {
  SceneConfig c;
  c.num_mues = 6;
  const Channels ch = sample_scene(c, 11);
  for (int k = 0; k < c.num_mues; ++k) {
    const double d_ap = (ch.positions[k] - c.ap_pos).norm();
    const double d_due = (ch.positions[k] - c.due_pos).norm();
    const double expected = c.num_antennas() * pathloss(d_ap, c) / c.noise_power_watt();
    CHECK(ch.H.col(k).squaredNorm() == doctest::Approx(expected).epsilon(1e-12));
    for (int n = 0; n < ch.H.rows(); ++n) {
      CHECK(std::abs(ch.H(n, k)) == doctest::Approx(std::abs(ch.H(0, k))).epsilon(1e-12));
    }
    CHECK(std::norm(ch.g(k)) == doctest::Approx(pathloss(d_due, c) / c.noise_power_watt()).epsilon(1e-12));
    CHECK(ch.tau[k] == delay_taps(d_due, c.sampling_hz));
  }
}

TEST_CASE("positions stay in the box and delays within the geometric bound") {
  SceneConfig c;
  c.num_mues = 10;
  const int bound = max_delay_taps(c);
  CHECK(bound == delay_taps(std::sqrt(36.0 + 16.0), 1e9));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Channels ch = sample_scene(c, seed);
    for (int k = 0; k < c.num_mues; ++k) {
      for (int i = 0; i < 3; ++i) {
        CHECK(ch.positions[k][i] >= c.mue_box_lo[i]);
        CHECK(ch.positions[k][i] <= c.mue_box_hi[i]);
      }
      CHECK(ch.tau[k] >= 0);
      CHECK(ch.tau[k] <= bound);
    }
  }
}

TEST_CASE("cooperative gain decreases with distance to the dUE") {
  SceneConfig c;
  c.num_mues = 20;
  const Channels ch = sample_scene(c, 3);
  for (int a = 0; a < c.num_mues; ++a) {
    for (int b = 0; b < c.num_mues; ++b) {
      const double da = (ch.positions[a] - c.due_pos).norm();
      const double db = (ch.positions[b] - c.due_pos).norm();
      if (da < db) CHECK(std::abs(ch.g(a)) > std::abs(ch.g(b)));
    }
  }
}

TEST_CASE("same seed gives identical channels") {
  SceneConfig c;
  const Channels a = sample_scene(c, 42);
  const Channels b = sample_scene(c, 42);
  CHECK(a.H == b.H);
  CHECK(a.g == b.g);
  CHECK(a.tau == b.tau);
  const Channels other = sample_scene(c, 43);
  CHECK_FALSE(a.g == other.g);
}

TEST_CASE("steering vector phases") {
  // Broadside along +y: horizontal phase pi per element, no vertical phase.
  const CVec a = steering_vector(Vec3(0, 0, 0), Vec3(0, 5, 0), 2, 3);
  REQUIRE(a.size() == 6);
  for (int iv = 0; iv < 2; ++iv) {
    for (int ih = 0; ih < 3; ++ih) {
      CHECK(std::abs(a(iv * 3 + ih) - std::polar(1.0, std::numbers::pi * ih)) < 1e-12);
    }
  }
  // Straight down: vertical phase -pi per element.
  const CVec b = steering_vector(Vec3(0, 0, 1), Vec3(0, 0, 0), 3, 1);
  for (int iv = 0; iv < 3; ++iv) CHECK(std::abs(b(iv) - std::polar(1.0, -std::numbers::pi * iv)) < 1e-12);
}

TEST_CASE("config validation") {
  SceneConfig c;
  CHECK_NOTHROW(validate(c));
  c.num_mues = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = SceneConfig{};
  c.n_v = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = SceneConfig{};
  c.bandwidth_hz = 0.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = SceneConfig{};
  c.cp_len = -1;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = SceneConfig{};
  c.mue_box_lo = Vec3(7, 0, 0);
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("cyclic prefix defaults to the largest delay") {
  SceneConfig c;
  const Channels ch = sample_scene(c, 9);
  CHECK(cyclic_prefix(c, ch) == *std::max_element(ch.tau.begin(), ch.tau.end()));
  c.cp_len = 3;
  CHECK(cyclic_prefix(c, ch) == 3);
}

TEST_CASE("channels CSV round trip") {
  SceneConfig c;
  c.num_mues = 3;
  const Channels ch = sample_scene(c, 21);
  std::stringstream ss;
  write_channels_csv(ss, ch);
  const Channels back = read_channels_csv(ss);
  CHECK((back.H - ch.H).norm() == 0.0);
  CHECK((back.g - ch.g).norm() == 0.0);
  CHECK(back.tau == ch.tau);
  REQUIRE(back.positions.size() == 3);
  CHECK((back.positions[2] - ch.positions[2]).norm() == 0.0);
}
