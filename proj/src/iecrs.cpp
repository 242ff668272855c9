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

#include "ecrs/iecrs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "detail.hpp"
#include "ecrs/baselines.hpp"

namespace ecrs {

namespace {

struct Phase1Vars {
  VariableLayout layout;
  int z = -1;
  int x = -1;
  int t0 = -1;
  bool pinned = false;
  int K = 0;

  // Variable index of X_k (k < K) or X_d (k == K); -1 when pinned to zero.
  int x_index(int k) const {
    if (pinned) return k == K ? layout.real_index(x, 0) : -1;
    return layout.real_index(x, k);
  }
};

Phase1Vars make_phase1_vars(int r, int K, bool pinned) {
  Phase1Vars v;
  v.K = K;
  v.pinned = pinned;
  v.z = v.layout.add_complex("Z", r, K + 1);
  v.x = v.layout.add_real("X", pinned ? 1 : K + 1);
  v.t0 = v.layout.add_real("t0", 1);
  return v;
}

// Terms of w * h_k^H f_col in the reduced coordinates f = scale * Q z.
std::vector<std::pair<int, cd>> stream_terms(const Phase1Vars& v, const CMat& Hr, double scale,
                                             cd w, int k, int col) {
  std::vector<std::pair<int, cd>> terms;
  terms.reserve(Hr.rows());
  for (int n = 0; n < Hr.rows(); ++n) {
    terms.emplace_back(v.layout.complex_index(v.z, n, col), w * scale * std::conj(Hr(n, k)));
  }
  return terms;
}

SubproblemSpec build_phase1_spec(const Phase1Vars& v, const CMat& Hr, double scale,
                                 const MmseReceivers& rx, const SolverOptions& solver) {
  const int K = v.K;
  const int r = static_cast<int>(Hr.rows());
  const int n = v.layout.size();
  const int t0 = v.layout.real_index(v.t0, 0);
  SubproblemSpec spec;
  spec.layout = v.layout;
  spec.options = solver;
  spec.objective = RVec::Zero(n);
  spec.objective(t0) = 1.0;

  for (int k = 0; k < K; ++k) {
    const double mu = rx.mu_p(k);
    ConstraintBuilder b(n);
    for (int i = 1; i <= K; ++i) {
      b.add_complex_square(stream_terms(v, Hr, scale, rx.w_p(k), k, i), i == k + 1 ? cd(-1.0) : cd(0.0));
    }
    const int xk = v.x_index(k);
    if (xk >= 0) b.add_linear(xk, kLn2 / mu);
    b.add_linear(t0, -kLn2 / mu);
    b.add_rhs((1.0 + std::log(mu)) / mu - std::norm(rx.w_p(k)));
    spec.constraints.push_back(b.build("private_" + std::to_string(k + 1)));
  }
  for (int k = 0; k < K; ++k) {
    const double mu = rx.mu_c(k);
    ConstraintBuilder b(n);
    for (int i = 0; i <= K; ++i) {
      b.add_complex_square(stream_terms(v, Hr, scale, rx.w_c(k), k, i), i == 0 ? cd(-1.0) : cd(0.0));
    }
    for (int i = 0; i <= K; ++i) {
      const int xi = v.x_index(i);
      if (xi >= 0) b.add_linear(xi, -kLn2 / mu);
    }
    b.add_rhs((1.0 + std::log(mu)) / mu - std::norm(rx.w_c(k)));
    spec.constraints.push_back(b.build("common_" + std::to_string(k + 1)));
  }
  {
    ConstraintBuilder b(n);
    b.add_linear(v.x_index(K), 1.0);
    b.add_linear(t0, -1.0);
    spec.constraints.push_back(b.build("due_common"));
  }
  {
    ConstraintBuilder b(n);
    for (int j = 0; j <= K; ++j) {
      for (int i = 0; i < r; ++i) b.add_complex_square({{v.layout.complex_index(v.z, i, j), cd(1.0)}}, 0.0);
    }
    b.add_rhs(1.0);
    spec.constraints.push_back(b.build("ap_power"));
  }
  for (int k = 0; k <= K; ++k) {
    const int xk = v.x_index(k);
    if (xk < 0) continue;
    ConstraintBuilder b(n);
    b.add_linear(xk, 1.0);
    spec.constraints.push_back(b.build("split_nonneg_" + std::to_string(k + 1)));
  }
  return spec;
}

// Strictly feasible start at the current precoders: rate splits at a fraction
// of the common budget and t0 with a margin.
RVec phase1_start(const Phase1Vars& v, const CMat& H, const CMat& F, const CMat& z,
                  const MmseReceivers& rx) {
  const int K = v.K;
  const MseSuite mse = mse_suite_iecrs(H, F, rx);
  const RVec lc = (mse.xi_c.array() - 1.0) / kLn2;
  const RVec lp = (mse.xi_p.array() - 1.0) / kLn2;
  const double budget = -lc.maxCoeff();
  const int shares = v.pinned ? 1 : K + 1;
  const double xval = budget > 0.0 ? -budget / (2.0 * shares) : -1e-3;

  RVec x = RVec::Zero(v.layout.size());
  v.layout.set_complex_block(v.z, z, x);
  double t0 = xval;
  for (int k = 0; k <= K; ++k) {
    const int xk = v.x_index(k);
    if (xk >= 0) x(xk) = xval;
  }
  for (int k = 0; k < K; ++k) {
    const int xk = v.x_index(k);
    t0 = std::max(t0, (xk >= 0 ? xval : 0.0) + lp(k));
  }
  x(v.layout.real_index(v.t0, 0)) = t0 + 1e-3 * std::max(1.0, std::abs(t0));
  return x;
}

double exact_t0(const CMat& H, const CMat& F, bool pinned, RVec* c) {
  double value = 0.0;
  *c = max_min_split_iecrs(iecrs_rates(H, F), pinned, &value);
  return -value;
}

}  // namespace

Phase1Result solve_phase1(const CMat& H, double p_ap, const AoOptions& opts, const CMat* initial) {
  const int K = static_cast<int>(H.cols());
  if (K < 1) throw std::invalid_argument("solve_phase1: no mUEs");
  if (!(p_ap >= 0.0)) throw std::invalid_argument("solve_phase1: negative power budget");
  detail::Stopwatch clock;
  Phase1Result out;
  const CMat Q = detail::span_basis(H);
  if (p_ap == 0.0 || Q.cols() == 0) {
    out.F = CMat::Zero(H.rows(), K + 1);
    out.t0 = exact_t0(H, out.F, opts.pin_private_common, &out.c);
    out.t0_trace = {out.t0};
    out.wall_seconds = {clock.seconds()};
    out.converged = true;
    return out;
  }
  const double scale = std::sqrt(p_ap);
  const CMat Hr = Q.adjoint() * H;
  CMat F0 = initial ? *initial : init_mrt_svd(H, p_ap);
  if (F0.rows() != H.rows() || F0.cols() != K + 1) throw std::invalid_argument("solve_phase1: bad initial F");
  CMat z = Q.adjoint() * F0 / scale;
  if (z.squaredNorm() > 1.0) z /= z.norm();

  CMat F = scale * Q * z;
  RVec c;
  double t0 = exact_t0(H, F, opts.pin_private_common, &c);
  out.t0_trace.push_back(t0);
  out.wall_seconds.push_back(clock.seconds());

  const Phase1Vars vars = make_phase1_vars(static_cast<int>(Q.cols()), K, opts.pin_private_common);
  for (int it = 0; it < opts.max_iter; ++it) {
    const MmseReceivers rx = mmse_update_iecrs(H, F);
    SubproblemSpec spec = build_phase1_spec(vars, Hr, scale, rx, opts.solver);
    CMat zs = z;
    detail::shrink_into_unit_ball(zs);
    spec.initial = phase1_start(vars, H, scale * Q * zs, zs, rx);
    const SubproblemResult res = solve(spec);
    ++out.iterations;
    if (res.status == SolveStatus::Infeasible) {
      throw std::runtime_error("solve_phase1: subproblem infeasible");
    }
    if (res.status != SolveStatus::Optimal) ++out.solver_failures;

    CMat z_new = vars.layout.complex_block(vars.z, res.x);
    if (z_new.squaredNorm() > 1.0) z_new /= z_new.norm();
    const CMat F_new = scale * Q * z_new;
    RVec c_new;
    const double t0_new = exact_t0(H, F_new, opts.pin_private_common, &c_new);
    if (!(t0_new <= t0)) {
      out.converged = true;
      break;
    }
    const double gain = t0 - t0_new;
    const double threshold = opts.rel_tol * std::abs(t0) + opts.abs_tol;
    z = z_new;
    F = F_new;
    c = c_new;
    t0 = t0_new;
    out.t0_trace.push_back(t0);
    out.wall_seconds.push_back(clock.seconds());
    if (gain <= threshold) {
      out.converged = true;
      break;
    }
  }
  out.F = F;
  out.c = c;
  out.t0 = t0;
  return out;
}

Phase2Result solve_phase2_low(const CVec& g, const Delays& tau, const RVec& p_k, int n_c) {
  if (g.size() != p_k.size() || static_cast<int>(tau.size()) != g.size()) {
    throw std::invalid_argument("solve_phase2_low: size mismatch");
  }
  Phase2Result out;
  out.g_bar = CVec(g.size());
  for (int k = 0; k < g.size(); ++k) out.g_bar(k) = std::abs(g(k)) * std::sqrt(p_k(k));
  out.rate = rate_phase2_iecrs(out.g_bar, tau, n_c);
  out.trace = {out.rate};
  out.wall_seconds = {0.0};
  return out;
}

namespace {

Phase2Result sca_run(const RVec& amp, const Delays& tau, int n_c, const ScaOptions& opts, CVec g_bar) {
  const int K = static_cast<int>(amp.size());
  detail::Stopwatch clock;
  Phase2Result out;
  for (int k = 0; k < K; ++k) {
    if (amp(k) == 0.0) {
      g_bar(k) = 0.0;
    } else if (std::abs(g_bar(k)) > amp(k)) {
      g_bar(k) *= amp(k) / std::abs(g_bar(k));
    }
  }
  double rate = rate_phase2_iecrs(g_bar, tau, n_c);
  out.trace.push_back(rate);
  out.wall_seconds.push_back(clock.seconds());
  out.converged = false;

  VariableLayout layout;
  const int v = layout.add_complex("v", K, 1);
  const int n = layout.size();
  std::vector<CVec> phasors(K);
  for (int k = 0; k < K; ++k) {
    phasors[k] = CVec(n_c);
    for (int i = 1; i <= n_c; ++i) {
      const long long idx = (static_cast<long long>(tau[k]) * i) % n_c;
      phasors[k](i - 1) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(idx) / n_c);
    }
  }

  for (int it = 0; it < opts.max_iter; ++it) {
    const CVec G = ofdm_gains(g_bar, tau, n_c);
    SubproblemSpec spec;
    spec.layout = layout;
    spec.options = opts.solver;
    spec.objective = RVec::Zero(n);
    const double weight = 1.0 / (n_c * kLn2);
    for (int i = 0; i < n_c; ++i) {
      LogTerm term;
      term.a = RVec::Zero(n);
      term.alpha = 1.0 - std::norm(G(i));
      term.weight = weight;
      for (int k = 0; k < K; ++k) {
        // 2 Re(conj(G) amp e^{-j theta} (v_re + j v_im))
        const cd coef = std::conj(G(i)) * amp(k) * phasors[k](i);
        const int idx = layout.complex_index(v, k);
        term.a(idx) = 2.0 * coef.real();
        term.a(idx + 1) = -2.0 * coef.imag();
      }
      spec.log_terms.push_back(std::move(term));
    }
    for (int k = 0; k < K; ++k) {
      ConstraintBuilder b(n);
      b.add_complex_square({{layout.complex_index(v, k), cd(1.0)}}, 0.0);
      b.add_rhs(1.0);
      spec.constraints.push_back(b.build("mue_power_" + std::to_string(k + 1)));
    }
    CMat vs(K, 1);
    for (int k = 0; k < K; ++k) vs(k, 0) = amp(k) > 0.0 ? g_bar(k) / amp(k) * (1.0 - 1e-7) : cd(0.0);
    spec.initial = RVec::Zero(n);
    layout.set_complex_block(v, vs, spec.initial);

    const SubproblemResult res = solve(spec);
    ++out.iterations;
    if (res.status == SolveStatus::Infeasible) break;
    const CMat v_new = layout.complex_block(v, res.x);
    CVec g_new(K);
    for (int k = 0; k < K; ++k) {
      cd vk = v_new(k, 0);
      if (std::abs(vk) > 1.0) vk /= std::abs(vk);
      g_new(k) = amp(k) * vk;
    }
    const double rate_new = rate_phase2_iecrs(g_new, tau, n_c);
    if (!(rate_new >= rate)) {
      out.converged = true;
      break;
    }
    const double gain = rate_new - rate;
    g_bar = g_new;
    rate = rate_new;
    out.trace.push_back(rate);
    out.wall_seconds.push_back(clock.seconds());
    if (gain <= opts.rel_tol * std::abs(rate)) {
      out.converged = true;
      break;
    }
  }
  out.g_bar = g_bar;
  out.rate = rate;
  return out;
}

}  // namespace

Phase2Result solve_phase2_sca(const CVec& g, const Delays& tau, const RVec& p_k, int n_c,
                              const ScaOptions& opts) {
  const int K = static_cast<int>(g.size());
  if (p_k.size() != K || static_cast<int>(tau.size()) != K) {
    throw std::invalid_argument("solve_phase2_sca: size mismatch");
  }
  RVec amp(K);
  for (int k = 0; k < K; ++k) amp(k) = std::abs(g(k)) * std::sqrt(p_k(k));
  if (opts.initial) {
    if (opts.initial->size() != K) throw std::invalid_argument("solve_phase2_sca: bad initial gains");
    return sca_run(amp, tau, n_c, opts, *opts.initial);
  }
  const CVec low = solve_phase2_low(g, tau, p_k, n_c).g_bar;
  Phase2Result best = sca_run(amp, tau, n_c, opts, low);
  std::mt19937_64 rng(0x5ca0u + static_cast<std::uint64_t>(K));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int s = 0; s < opts.extra_starts; ++s) {
    CVec start = low;
    for (int k = 0; k < K; ++k) {
      const double theta = s == 0 ? std::numbers::pi * k * k / K : phase(rng);
      start(k) *= std::polar(1.0, theta);
    }
    Phase2Result run = sca_run(amp, tau, n_c, opts, start);
    if (run.rate > best.rate) best = std::move(run);
  }
  return best;
}

CMat omega_matrix(const Delays& tau, int n_c) {
  if (n_c < 1) throw std::invalid_argument("omega_matrix: N_c must be positive");
  const int K = static_cast<int>(tau.size());
  CMat omega = CMat::Zero(K, K);
  for (int i = 1; i <= n_c; ++i) {
    CVec w(K);
    for (int k = 0; k < K; ++k) {
      const long long idx = (static_cast<long long>(tau[k]) * i) % n_c;
      w(k) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(idx) / n_c);
    }
    omega.noalias() += w * w.adjoint();
  }
  return omega;
}

const char* to_string(Phase2Method m) {
  switch (m) {
    case Phase2Method::Auto: return "auto";
    case Phase2Method::Sca: return "sca";
    case Phase2Method::Low: return "low";
  }
  return "?";
}

RVec mue_powers(const SceneConfig& config) {
  return RVec::Constant(config.num_mues, config.mue_power_watt());
}

int prefactor_cp(const SceneConfig& config, const Channels& channels, bool exact) {
  return exact ? cyclic_prefix(config, channels) : 0;
}

Phase2Method resolve_phase2(Phase2Method m, int n_c) {
  if (m != Phase2Method::Auto) return m;
  return n_c > 512 ? Phase2Method::Low : Phase2Method::Sca;
}

IecrsSolution assemble_iecrs(const Channels& channels, const SceneConfig& config,
                             const Phase1Result& p1, const Phase2Result& p2,
                             Phase2Method method, bool exact_prefactor) {
  IecrsSolution sol;
  sol.phase1 = p1;
  sol.phase2 = p2;
  sol.phase2_method = method;
  sol.precoders.F = p1.F;
  sol.precoders.c = p1.c;
  sol.precoders.g_bar = p2.g_bar;
  const int cp = prefactor_cp(config, channels, exact_prefactor);
  const double r2 = rate_phase2_iecrs(p2.g_bar, channels.tau, config.num_subcarriers, cp);
  sol.report = combine_rates_iecrs(p1.c, iecrs_rates(channels.H, p1.F), r2);
  return sol;
}

IecrsSolution solve_iecrs(const Channels& channels, const SceneConfig& config,
                          const IecrsOptions& opts) {
  validate(config);
  const Phase1Result p1 = solve_phase1(channels.H, config.ap_power_watt(), opts.ao);
  const Phase2Method method = resolve_phase2(opts.phase2, config.num_subcarriers);
  const RVec p_k = mue_powers(config);
  const Phase2Result p2 =
      method == Phase2Method::Low
          ? solve_phase2_low(channels.g, channels.tau, p_k, config.num_subcarriers)
          : solve_phase2_sca(channels.g, channels.tau, p_k, config.num_subcarriers, opts.sca);
  return assemble_iecrs(channels, config, p1, p2, method, opts.exact_prefactor);
}

CVec realized_gains(const CVec& g_bar_design, const CVec& g_design, const CVec& g_true) {
  if (g_bar_design.size() != g_design.size() || g_design.size() != g_true.size()) {
    throw std::invalid_argument("realized_gains: size mismatch");
  }
  CVec out(g_true.size());
  for (int k = 0; k < g_true.size(); ++k) {
    const cd f = g_design(k) == cd(0.0) ? cd(0.0) : g_bar_design(k) / g_design(k);
    out(k) = g_true(k) * f;
  }
  return out;
}

RateReport evaluate_iecrs(const IecrsPrecoders& design, const CVec& g_design, const Channels& truth,
                          int n_c, int cp_len) {
  const CVec g_bar = realized_gains(design.g_bar, g_design, truth.g);
  const double r2 = rate_phase2_iecrs(g_bar, truth.tau, n_c, cp_len);
  return combine_rates_iecrs(design.c, iecrs_rates(truth.H, design.F), r2);
}

void write_trace_csv(std::ostream& os, const std::vector<double>& trace,
                     const std::vector<double>& wall_seconds, const std::string& value_name) {
  os << "iteration," << value_name << ",wall_s\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << i << ',' << trace[i] << ',';
    if (i < wall_seconds.size()) os << wall_seconds[i];
    os << '\n';
  }
  os.precision(old);
}

}  // namespace ecrs
