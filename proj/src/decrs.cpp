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

#include "ecrs/decrs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detail.hpp"
#include "ecrs/baselines.hpp"

namespace ecrs {

namespace {

struct DecrsVars {
  VariableLayout layout;
  int z = -1;   // r x 2K, columns f_c1..f_cK, f_1..f_K (reduced, scaled)
  int v = -1;   // K, g_bar_k = amp_k v_k
  int x = -1;   // X_1..X_K (absent when pinned), X_d1..X_dK
  int t = -1;
  int t0 = -1;
  int K = 0;
  bool pinned = false;

  int x_private(int k) const { return pinned ? -1 : layout.real_index(x, k); }
  int x_due(int k) const { return layout.real_index(x, pinned ? k : K + k); }
};

DecrsVars make_vars(int r, int K, bool pinned) {
  DecrsVars d;
  d.K = K;
  d.pinned = pinned;
  d.z = d.layout.add_complex("Z", r, 2 * K);
  d.v = d.layout.add_complex("v", K, 1);
  d.x = d.layout.add_real("X", pinned ? K : 2 * K);
  d.t = d.layout.add_real("t", K);
  d.t0 = d.layout.add_real("t0", 1);
  return d;
}

std::vector<std::pair<int, cd>> ap_terms(const DecrsVars& d, const CMat& Hr, double scale, cd w,
                                         int k, int col) {
  std::vector<std::pair<int, cd>> terms;
  terms.reserve(Hr.rows());
  for (int n = 0; n < Hr.rows(); ++n) {
    terms.emplace_back(d.layout.complex_index(d.z, n, col), w * scale * std::conj(Hr(n, k)));
  }
  return terms;
}

SubproblemSpec build_spec(const DecrsVars& d, const CMat& Hr, double scale, const RVec& amp,
                          const MmseReceivers& rx, const SolverOptions& solver) {
  const int K = d.K;
  const int r = static_cast<int>(Hr.rows());
  const int n = d.layout.size();
  const int t0 = d.layout.real_index(d.t0, 0);
  SubproblemSpec spec;
  spec.layout = d.layout;
  spec.options = solver;
  spec.objective = RVec::Zero(n);
  spec.objective(t0) = 1.0;

  for (int k = 0; k < K; ++k) {
    const double mu = rx.mu_p(k);
    ConstraintBuilder b(n);
    for (int i = 0; i < 2 * K; ++i) {
      if (i == k) continue;  // own common stream is removed by SIC
      b.add_complex_square(ap_terms(d, Hr, scale, rx.w_p(k), k, i), i == K + k ? cd(-1.0) : cd(0.0));
    }
    if (d.x_private(k) >= 0) b.add_linear(d.x_private(k), kLn2 / mu);
    b.add_linear(t0, -kLn2 / mu);
    b.add_rhs((1.0 + std::log(mu)) / mu - std::norm(rx.w_p(k)));
    spec.constraints.push_back(b.build("private_" + std::to_string(k + 1)));
  }
  for (int k = 0; k < K; ++k) {
    const double mu = rx.mu_c(k);
    ConstraintBuilder b(n);
    for (int i = 0; i < 2 * K; ++i) {
      b.add_complex_square(ap_terms(d, Hr, scale, rx.w_c(k), k, i), i == k ? cd(-1.0) : cd(0.0));
    }
    b.add_linear(d.x_due(k), -kLn2 / mu);
    if (d.x_private(k) >= 0) b.add_linear(d.x_private(k), -kLn2 / mu);
    b.add_rhs((1.0 + std::log(mu)) / mu - std::norm(rx.w_c(k)));
    spec.constraints.push_back(b.build("common_" + std::to_string(k + 1)));
  }
  for (int k = 0; k < K; ++k) {
    ConstraintBuilder b(n);
    b.add_linear(d.x_due(k), 1.0);
    b.add_linear(d.layout.real_index(d.t, k), -1.0);
    spec.constraints.push_back(b.build("due_common_" + std::to_string(k + 1)));
  }
  for (int k = 0; k < K; ++k) {
    const double mu = rx.mu_d(k);
    ConstraintBuilder b(n);
    for (int i = 0; i < K; ++i) {
      b.add_complex_square({{d.layout.complex_index(d.v, i), rx.w_d(k) * amp(i)}},
                           i == k ? cd(-1.0) : cd(0.0));
    }
    b.add_linear(d.layout.real_index(d.t, k), -kLn2 / mu);
    b.add_rhs((1.0 + std::log(mu)) / mu - std::norm(rx.w_d(k)));
    spec.constraints.push_back(b.build("due_phase2_" + std::to_string(k + 1)));
  }
  {
    ConstraintBuilder b(n);
    for (int k = 0; k < K; ++k) b.add_linear(d.layout.real_index(d.t, k), 1.0);
    b.add_linear(t0, -1.0);
    spec.constraints.push_back(b.build("due_sum"));
  }
  {
    ConstraintBuilder b(n);
    for (int j = 0; j < 2 * K; ++j) {
      for (int i = 0; i < r; ++i) b.add_complex_square({{d.layout.complex_index(d.z, i, j), cd(1.0)}}, 0.0);
    }
    b.add_rhs(1.0);
    spec.constraints.push_back(b.build("ap_power"));
  }
  for (int k = 0; k < K; ++k) {
    ConstraintBuilder b(n);
    b.add_complex_square({{d.layout.complex_index(d.v, k), cd(1.0)}}, 0.0);
    b.add_rhs(1.0);
    spec.constraints.push_back(b.build("mue_power_" + std::to_string(k + 1)));
  }
  for (int k = 0; k < K; ++k) {
    for (int idx : {d.x_private(k), d.x_due(k)}) {
      if (idx < 0) continue;
      ConstraintBuilder b(n);
      b.add_linear(idx, 1.0);
      spec.constraints.push_back(b.build("split_nonneg"));
    }
  }
  return spec;
}

RVec start_point(const DecrsVars& d, const CMat& H, const CMat& F, const CMat& z, const CVec& g_bar,
                 const CMat& v, const MmseReceivers& rx) {
  const int K = d.K;
  const MseSuite mse = mse_suite_decrs(H, F, g_bar, rx);
  RVec x = RVec::Zero(d.layout.size());
  d.layout.set_complex_block(d.z, z, x);
  d.layout.set_complex_block(d.v, v, x);
  double t0 = -1e300;
  double t_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const double lc = (mse.xi_c(k) - 1.0) / kLn2;
    const double lp = (mse.xi_p(k) - 1.0) / kLn2;
    const double ld = (mse.xi_d(k) - 1.0) / kLn2;
    const double budget = -lc;
    const double share = budget > 0.0 ? budget / 3.0 : 1e-3;
    double xp = 0.0;
    if (d.x_private(k) >= 0) {
      xp = -share;
      x(d.x_private(k)) = xp;
    }
    x(d.x_due(k)) = -share;
    const double tk = std::max(-share, ld) + 1e-3;
    x(d.layout.real_index(d.t, k)) = tk;
    t_sum += tk;
    t0 = std::max(t0, xp + lp);
  }
  t0 = std::max(t0, t_sum);
  x(d.layout.real_index(d.t0, 0)) = t0 + 1e-3 * std::max(1.0, std::abs(t0));
  return x;
}

double exact_t0(const CMat& H, const CMat& F, const CVec& g_bar, bool pinned, RVec* c) {
  double value = 0.0;
  *c = max_min_split_decrs(decrs_rates(H, F), rate_phase2_decrs(g_bar), pinned, &value);
  return -value;
}

}  // namespace

DecrsSolution solve_decrs(const CMat& H, const CVec& g, double p_ap, const RVec& p_k,
                          const DecrsOptions& opts, const CMat* initial_F, const CVec* initial_g_bar) {
  const int K = static_cast<int>(H.cols());
  if (K < 1) throw std::invalid_argument("solve_decrs: no mUEs");
  if (g.size() != K || p_k.size() != K) throw std::invalid_argument("solve_decrs: size mismatch");
  if (!(p_ap >= 0.0)) throw std::invalid_argument("solve_decrs: negative power budget");
  const bool pinned = opts.ao.pin_private_common;
  detail::Stopwatch clock;
  DecrsSolution out;
  out.pinned = pinned;

  RVec amp(K);
  for (int k = 0; k < K; ++k) amp(k) = std::abs(g(k)) * std::sqrt(std::max(0.0, p_k(k)));
  CVec g_bar = initial_g_bar ? *initial_g_bar : CVec(amp.cast<cd>());
  if (g_bar.size() != K) throw std::invalid_argument("solve_decrs: bad initial gains");
  CMat v(K, 1);
  for (int k = 0; k < K; ++k) {
    cd vk = amp(k) > 0.0 ? g_bar(k) / amp(k) : cd(0.0);
    if (std::abs(vk) > 1.0) vk /= std::abs(vk);
    v(k, 0) = vk;
    g_bar(k) = amp(k) * vk;
  }

  const CMat Q = detail::span_basis(H);
  const int r = static_cast<int>(Q.cols());
  const double scale = std::sqrt(p_ap);
  CMat F = CMat::Zero(H.rows(), 2 * K);
  CMat z = CMat::Zero(std::max(r, 0), 2 * K);
  if (p_ap > 0.0 && r > 0) {
    const CMat F0 = initial_F ? *initial_F : init_mrt_decrs(H, p_ap);
    if (F0.rows() != H.rows() || F0.cols() != 2 * K) throw std::invalid_argument("solve_decrs: bad initial F");
    z = Q.adjoint() * F0 / scale;
    if (z.squaredNorm() > 1.0) z /= z.norm();
    F = scale * Q * z;
  }
  RVec c;
  double t0 = exact_t0(H, F, g_bar, pinned, &c);
  out.t0_trace.push_back(t0);
  out.wall_seconds.push_back(clock.seconds());

  const bool trivial = p_ap == 0.0 || r == 0 || amp.maxCoeff() == 0.0;
  if (!trivial) {
    const CMat Hr = Q.adjoint() * H;
    const DecrsVars vars = make_vars(r, K, pinned);
    for (int it = 0; it < opts.ao.max_iter; ++it) {
      const MmseReceivers rx = mmse_update_decrs(H, F, g_bar);
      SubproblemSpec spec = build_spec(vars, Hr, scale, amp, rx, opts.ao.solver);
      CMat zs = z;
      detail::shrink_into_unit_ball(zs);
      CMat vs = v * (1.0 - 1e-7);
      CVec gs(K);
      for (int k = 0; k < K; ++k) gs(k) = amp(k) * vs(k, 0);
      spec.initial = start_point(vars, H, scale * Q * zs, zs, gs, vs, rx);
      const SubproblemResult res = solve(spec);
      ++out.iterations;
      if (res.status == SolveStatus::Infeasible) throw std::runtime_error("solve_decrs: subproblem infeasible");
      if (res.status != SolveStatus::Optimal) ++out.solver_failures;

      CMat z_new = vars.layout.complex_block(vars.z, res.x);
      if (z_new.squaredNorm() > 1.0) z_new /= z_new.norm();
      CMat v_new = vars.layout.complex_block(vars.v, res.x);
      CVec g_new(K);
      for (int k = 0; k < K; ++k) {
        if (std::abs(v_new(k, 0)) > 1.0) v_new(k, 0) /= std::abs(v_new(k, 0));
        g_new(k) = amp(k) * v_new(k, 0);
      }
      const CMat F_new = scale * Q * z_new;
      RVec c_new;
      const double t0_new = exact_t0(H, F_new, g_new, pinned, &c_new);
      if (!(t0_new <= t0)) {
        out.converged = true;
        break;
      }
      const double gain = t0 - t0_new;
      const double threshold = opts.ao.rel_tol * std::abs(t0) + opts.ao.abs_tol;
      z = z_new;
      v = v_new;
      F = F_new;
      g_bar = g_new;
      c = c_new;
      t0 = t0_new;
      out.t0_trace.push_back(t0);
      out.wall_seconds.push_back(clock.seconds());
      if (gain <= threshold) {
        out.converged = true;
        break;
      }
    }
  } else {
    out.converged = true;
  }

  out.precoders.F = F;
  out.precoders.c = c;
  out.precoders.g_bar = g_bar;
  out.t0 = t0;
  const RVec r2 = rate_phase2_decrs(g_bar);
  out.t = RVec(K);
  for (int k = 0; k < K; ++k) out.t(k) = -std::min(c(K + k), r2(k));
  out.report = combine_rates_decrs(c, decrs_rates(H, F), r2);
  return out;
}

DecrsSolution solve_decrs(const Channels& channels, const SceneConfig& config,
                          const DecrsOptions& opts, const CMat* initial_F, const CVec* initial_g_bar) {
  validate(config);
  return solve_decrs(channels.H, channels.g, config.ap_power_watt(), mue_powers(config), opts,
                     initial_F, initial_g_bar);
}

DecrsAudit decrs_rate_audit(const DecrsPrecoders& solution, double t0, const Channels& channels,
                            double p_ap, const RVec& p_k, double tol) {
  DecrsAudit audit;
  const int K = channels.num_mues();
  if (solution.F.cols() != 2 * K || solution.c.size() != 2 * K || solution.g_bar.size() != K) {
    throw std::invalid_argument("decrs_rate_audit: solution does not match the channels");
  }
  const StreamRates rates = decrs_rates(channels.H, solution.F);
  const RVec r2 = rate_phase2_decrs(solution.g_bar);
  audit.report = combine_rates_decrs(solution.c, rates, r2);
  for (const std::string& v : audit.report.violations) audit.issues.push_back(v);

  audit.power_excess = std::max(0.0, solution.F.squaredNorm() - p_ap);
  if (audit.power_excess > 1e-8 * std::max(1.0, p_ap)) audit.issues.push_back("AP power budget exceeded");
  for (int k = 0; k < K; ++k) {
    const double cap = std::norm(channels.g(k)) * p_k(k);
    const double excess = std::norm(solution.g_bar(k)) - cap;
    audit.mue_power_excess = std::max(audit.mue_power_excess, excess);
    if (excess > 1e-10 * std::max(1.0, cap)) {
      audit.issues.push_back("mUE " + std::to_string(k + 1) + " power budget exceeded");
    }
  }
  audit.t0_gap = std::abs(-t0 - audit.report.min_rate);
  if (audit.t0_gap > tol) audit.issues.push_back("optimizer t0 disagrees with recomputed min-rate");
  audit.passed = audit.issues.empty();
  return audit;
}

RateReport evaluate_decrs(const DecrsPrecoders& design, const CVec& g_design, const Channels& truth) {
  const CVec g_bar = realized_gains(design.g_bar, g_design, truth.g);
  return combine_rates_decrs(design.c, decrs_rates(truth.H, design.F), rate_phase2_decrs(g_bar));
}

}  // namespace ecrs
