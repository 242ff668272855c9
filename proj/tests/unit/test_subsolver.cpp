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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ecrs/subsolver.hpp"
#include "support/rng.hpp"

using namespace ecrs;

namespace {

QuadConstraint linear(int n, std::vector<std::pair<int, double>> terms, double rhs, std::string label = "lin") {
  ConstraintBuilder b(n);
  for (auto [i, a] : terms) b.add_linear(i, a);
  b.add_rhs(rhs);
  return b.build(std::move(label));
}

SubproblemSpec real_spec(int n) {
  SubproblemSpec s;
  s.layout.add_real("x", n);
  s.objective = RVec::Zero(n);
  return s;
}

// Random convex QCQP over n reals: each constraint ||A x + c||^2 + b^T x <= d
// is strictly satisfied at the origin, and a ball of radius 2 bounds it.
SubproblemSpec random_qcqp(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  SubproblemSpec s = real_spec(n);
  for (int i = 0; i < n; ++i) s.objective(i) = g(rng);
  for (int j = 0; j < m; ++j) {
    ConstraintBuilder b(n);
    const int rows = 1 + static_cast<int>(rng() % n);
    double c2 = 0.0;
    for (int r = 0; r < rows; ++r) {
      std::vector<std::pair<int, double>> terms;
      for (int i = 0; i < n; ++i) terms.emplace_back(i, g(rng));
      const double c = 0.5 * g(rng);
      c2 += c * c;
      b.add_real_square(terms, c);
    }
    for (int i = 0; i < n; ++i) b.add_linear(i, 0.5 * g(rng));
    b.add_rhs(c2 + 0.2 + std::abs(g(rng)));
    s.constraints.push_back(b.build("q" + std::to_string(j)));
  }
  ConstraintBuilder ball(n);
  for (int i = 0; i < n; ++i) ball.add_real_square({{i, 1.0}}, 0.0);
  ball.add_rhs(4.0);
  s.constraints.push_back(ball.build("ball"));
  return s;
}

bool feasible(const SubproblemSpec& s, const RVec& x) {
  for (const auto& q : s.constraints)
    if (q.value(x) > 0.0) return false;
  return true;
}

// Zooming grid search: scan a box, recentre on the best feasible point and
// shrink. Convexity of the feasible set keeps the optimum inside the window.
double grid_oracle(const SubproblemSpec& s) {
  const int n = s.layout.size();
  const int pts = n == 2 ? 401 : 61;
  RVec center = RVec::Zero(n);
  double half = 2.0;
  double best = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 14; ++level) {
    RVec best_x = center;
    std::vector<int> idx(n, 0);
    while (true) {
      RVec x(n);
      for (int i = 0; i < n; ++i) x(i) = center(i) - half + 2.0 * half * idx[i] / (pts - 1);
      if (feasible(s, x)) {
        const double f = s.objective.dot(x);
        if (f < best) {
          best = f;
          best_x = x;
        }
      }
      int i = 0;
      while (i < n && ++idx[i] == pts) idx[i++] = 0;
      if (i == n) break;
    }
    center = best_x;
    half *= 8.0 / (pts - 1);
  }
  return best;
}

}  // namespace

TEST_CASE("variable layout indexing") {
  VariableLayout L;
  const int z = L.add_complex("Z", 2, 3);
  const int t = L.add_real("t", 4);
  CHECK(L.size() == 16);
  CHECK(L.complex_index(z, 1, 2) == 10);
  CHECK(L.real_index(t, 0) == 12);
  CHECK(L.block(t).size() == 4);

  std::mt19937_64 rng(1);
  const CMat v = testutil::randn_c(rng, 2, 3);
  RVec x = RVec::Zero(L.size());
  L.set_complex_block(z, v, x);
  CHECK((L.complex_block(z, x) - v).norm() == 0.0);
  CHECK(x.tail(4).isZero());
}

TEST_CASE("complex square matches the modulus") {
  VariableLayout L;
  const int z = L.add_complex("z", 2, 1);
  ConstraintBuilder b(L.size());
  const cd a0(0.3, -1.2), a1(2.0, 0.5), k(-0.4, 0.9);
  b.add_complex_square({{L.complex_index(z, 0), a0}, {L.complex_index(z, 1), a1}}, k);
  b.add_rhs(2.5);
  const QuadConstraint q = b.build("c");
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const CMat v = testutil::randn_c(rng, 2, 1);
    RVec x(L.size());
    L.set_complex_block(z, v, x);
    CHECK(q.value(x) == doctest::Approx(std::norm(a0 * v(0) + a1 * v(1) + k) - 2.5).epsilon(1e-13));
  }
}

TEST_CASE("hand example: min t with x^2 <= 1, x >= 0.5, t >= x") {
  SubproblemSpec s = real_spec(2);  // (x, t)
  s.objective(1) = 1.0;
  ConstraintBuilder disk(2);
  disk.add_real_square({{0, 1.0}}, 0.0);
  disk.add_rhs(1.0);
  s.constraints.push_back(disk.build("disk"));
  s.constraints.push_back(linear(2, {{0, -1.0}}, -0.5));
  s.constraints.push_back(linear(2, {{0, 1.0}, {1, -1.0}}, 0.0));
  s.initial = RVec::Zero(2);
  const auto r = solve(s);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.used_phase1);
  CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("hand example: linearized disk boundary") {
  SubproblemSpec s = real_spec(3);  // (a, b, u)
  s.objective(2) = -1.0;
  s.constraints.push_back(linear(3, {{2, 1.0}, {0, -2.0}}, -1.0));
  ConstraintBuilder disk(3);
  disk.add_real_square({{0, 1.0}}, 0.0);
  disk.add_real_square({{1, 1.0}}, 0.0);
  disk.add_rhs(1.0);
  s.constraints.push_back(disk.build("disk"));
  const auto r = solve(s);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(-r.objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(r.x(1)) < 1e-3);
}

TEST_CASE("log utility term") {
  // min -log(1 + x) + x/2 on x <= 10: stationary at x = 1.
  SubproblemSpec s = real_spec(1);
  s.objective(0) = 0.5;
  s.log_terms.push_back({RVec::Ones(1), 1.0, 1.0});
  s.constraints.push_back(linear(1, {{0, 1.0}}, 10.0));
  s.constraints.push_back(linear(1, {{0, -1.0}}, 0.5));
  const auto r = solve(s);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.objective == doctest::Approx(0.5 - std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("random QCQPs match a grid-search oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    SubproblemSpec s = random_qcqp(rng, n, 3);
    s.options.opt_tol = 1e-8;
    const auto r = solve(s);
    REQUIRE(r.status == SolveStatus::Optimal);
    const double oracle = grid_oracle(s);
    CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-4).scale(1.0));
    CHECK(r.objective <= oracle + 1e-6);
  }
}

TEST_CASE("optimal status certifies feasibility and the trace is monotone") {
  std::mt19937_64 rng(4);
  int optimal = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    SubproblemSpec s = random_qcqp(rng, n, 1 + static_cast<int>(rng() % 6));
    // Start outside so phase 1 runs on half of the instances.
    s.initial = RVec::Constant(n, trial % 2 ? 3.0 : 0.0);
    const auto r = solve(s);
    REQUIRE(r.status != SolveStatus::Infeasible);
    if (r.status == SolveStatus::Optimal) {
      ++optimal;
      CHECK(r.max_residual <= s.options.feas_tol);
      CHECK(r.gap <= s.options.opt_tol);
    }
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(r.trace[i] <= r.trace[i - 1] + 1e-12 * (1.0 + std::abs(r.trace[i - 1])));
    }
  }
  CHECK(optimal == 40);
}

TEST_CASE("argmin is invariant to objective scaling") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    SubproblemSpec s = random_qcqp(rng, 4, 3);
    s.options.opt_tol = 1e-9;
    const auto a = solve(s);
    s.objective *= 37.0;
    const auto b = solve(s);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK((a.x - b.x).norm() < 1e-4);
    CHECK(b.objective == doctest::Approx(37.0 * a.objective).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("solve is deterministic") {
  std::mt19937_64 rng(6);
  SubproblemSpec s = random_qcqp(rng, 5, 4);
  const auto a = solve(s);
  const auto b = solve(s);
  CHECK(a.x == b.x);
  CHECK(a.trace == b.trace);
}

TEST_CASE("infeasible problems are reported") {
  SubproblemSpec s = real_spec(2);
  s.objective(0) = 1.0;
  s.constraints.push_back(linear(2, {{0, -1.0}}, -1.0));  // x >= 1
  ConstraintBuilder disk(2);
  disk.add_real_square({{0, 1.0}}, 0.0);
  disk.add_real_square({{1, 1.0}}, 0.0);
  disk.add_rhs(0.25);
  s.constraints.push_back(disk.build("disk"));
  const auto r = solve(s);
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK(r.max_residual > 0.0);
  CHECK(std::string(to_string(r.status)) == "Infeasible");
}

TEST_CASE("malformed specs are rejected") {
  SubproblemSpec s = real_spec(2);
  s.objective = RVec::Zero(3);
  CHECK_THROWS_AS(solve(s), std::invalid_argument);
  s.objective = RVec::Zero(2);
  s.constraints.push_back(linear(3, {{0, 1.0}}, 1.0));
  CHECK_THROWS_AS(solve(s), std::invalid_argument);
}

TEST_CASE("trace csv") {
  SubproblemSpec s = real_spec(1);
  s.objective(0) = 1.0;
  s.constraints.push_back(linear(1, {{0, -1.0}}, 0.0));
  const auto r = solve(s);
  std::ostringstream os;
  write_trace_csv(os, r);
  const std::string out = os.str();
  CHECK(out.rfind("step,objective\n0,", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == static_cast<long>(r.trace.size()) + 1);
}
