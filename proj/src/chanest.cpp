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

#include "ecrs/chanest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace ecrs {

void validate(const PilotConfig& cfg) {
  if (cfg.n_p < 1) throw std::invalid_argument("pilot length must be positive");
  if (cfg.roots.empty()) throw std::invalid_argument("no pilot roots");
  if (cfg.tau_max < 0) throw std::invalid_argument("tau_max must be nonnegative");
  if (cfg.n_r < cfg.n_p + cfg.tau_max) throw std::invalid_argument("receive window shorter than N_p + tau_max");
  std::vector<int> sorted = cfg.roots;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("pilot roots must be distinct");
  }
  const int n_zc = zc_base_length(cfg.n_p);
  for (int r : cfg.roots) {
    if (r < 1 || (n_zc > 1 && r >= n_zc) || std::gcd(r, cfg.n_p) != 1) {
      throw std::invalid_argument("pilot root " + std::to_string(r) + " invalid for N_p = " +
                                  std::to_string(cfg.n_p));
    }
  }
}

std::vector<int> assign_roots(int n_p, int num_mues) {
  if (n_p < 1 || num_mues < 1) throw std::invalid_argument("assign_roots: bad arguments");
  std::vector<int> roots;
  const int limit = std::max(2, zc_base_length(n_p));
  for (int r = 1; r < limit && static_cast<int>(roots.size()) < num_mues; ++r) {
    if (std::gcd(r, n_p) == 1) roots.push_back(r);
  }
  if (static_cast<int>(roots.size()) < num_mues) {
    throw std::invalid_argument("N_p = " + std::to_string(n_p) + " has fewer than " +
                                std::to_string(num_mues) + " coprime roots");
  }
  return roots;
}

PilotConfig make_pilot_config(int n_p, int num_mues, double power_dbm, int tau_max) {
  PilotConfig cfg;
  cfg.n_p = n_p;
  cfg.roots = assign_roots(n_p, num_mues);
  cfg.power_dbm = power_dbm;
  cfg.tau_max = tau_max;
  cfg.n_r = n_p + tau_max;
  validate(cfg);
  return cfg;
}

int zc_base_length(int n_p) {
  if (n_p < 1) throw std::invalid_argument("pilot length must be positive");
  auto prime = [](int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d) {
      if (n % d == 0) return false;
    }
    return true;
  };
  int n = n_p;
  while (n > 2 && !prime(n)) --n;
  return n;
}

CMat gen_pilots(const PilotConfig& cfg) {
  validate(cfg);
  const long long n = zc_base_length(cfg.n_p);
  CMat pilots(cfg.n_p, cfg.num_mues());
  for (int k = 0; k < cfg.num_mues(); ++k) {
    const long long r = cfg.roots[k];
    for (long long i = 0; i < cfg.n_p; ++i) {
      const long long m = i % n;
      // Phase pi * q / N_zc with q reduced mod 2 N_zc for accuracy.
      const long long q = (r * ((m * (m + 1)) % (2 * n))) % (2 * n);
      pilots(i, k) = std::polar(1.0, -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n));
    }
  }
  return pilots;
}

CVec shifted_pilot(const CVec& psi, int tau, int n_r) {
  if (tau < 0 || tau + psi.size() > n_r) throw std::invalid_argument("shifted_pilot: shift outside window");
  CVec out = CVec::Zero(n_r);
  out.segment(tau, psi.size()) = psi;
  return out;
}

CVec simulate_pilot_rx(const CMat& pilots, const CVec& g, const Delays& tau, const PilotConfig& cfg,
                       std::optional<std::uint64_t> noise_seed) {
  validate(cfg);
  const int K = cfg.num_mues();
  if (pilots.cols() != K || pilots.rows() != cfg.n_p || g.size() != K || static_cast<int>(tau.size()) != K) {
    throw std::invalid_argument("simulate_pilot_rx: size mismatch");
  }
  const double amp = std::sqrt(cfg.power_watt());
  CVec y = CVec::Zero(cfg.n_r);
  for (int k = 0; k < K; ++k) {
    if (tau[k] < 0 || tau[k] > cfg.tau_max) {
      throw std::invalid_argument("simulate_pilot_rx: delay " + std::to_string(tau[k]) + " exceeds tau_max");
    }
    y.segment(tau[k], cfg.n_p) += amp * g(k) * pilots.col(k);
  }
  if (noise_seed) {
    std::mt19937_64 rng(*noise_seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (int i = 0; i < cfg.n_r; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      y(i) += cd(re, im);
    }
  }
  return y;
}

DelayEstimate estimate_delays(const CVec& y, const CMat& pilots, const PilotConfig& cfg) {
  validate(cfg);
  if (y.size() != cfg.n_r || pilots.rows() != cfg.n_p || pilots.cols() != cfg.num_mues()) {
    throw std::invalid_argument("estimate_delays: size mismatch");
  }
  DelayEstimate out;
  for (int k = 0; k < cfg.num_mues(); ++k) {
    RVec profile(cfg.tau_max + 1);
    int best = 0;
    for (int tau = 0; tau <= cfg.tau_max; ++tau) {
      profile(tau) = std::abs(pilots.col(k).dot(y.segment(tau, cfg.n_p)));
      if (profile(tau) > profile(best)) best = tau;
    }
    out.tau_hat.push_back(best);
    out.profiles.push_back(std::move(profile));
  }
  return out;
}

GainEstimate estimate_gains(const CVec& y, const CMat& pilots, const Delays& tau_hat, const PilotConfig& cfg) {
  validate(cfg);
  const int K = cfg.num_mues();
  if (static_cast<int>(tau_hat.size()) != K || y.size() != cfg.n_r) {
    throw std::invalid_argument("estimate_gains: size mismatch");
  }
  CMat psi(cfg.n_r, K);
  for (int k = 0; k < K; ++k) psi.col(k) = shifted_pilot(pilots.col(k), tau_hat[k], cfg.n_r);
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(psi);
  GainEstimate out;
  out.rank_deficient = cod.rank() < K;
  out.g_hat = cod.solve(y) / std::sqrt(cfg.power_watt());
  return out;
}

EstimationResult estimate_channel(const Channels& truth, const PilotConfig& cfg,
                                  std::optional<std::uint64_t> noise_seed) {
  const CMat pilots = gen_pilots(cfg);
  const CVec y = simulate_pilot_rx(pilots, truth.g, truth.tau, cfg, noise_seed);
  DelayEstimate delays = estimate_delays(y, pilots, cfg);
  const GainEstimate gains = estimate_gains(y, pilots, delays.tau_hat, cfg);
  EstimationResult out;
  out.tau_hat = delays.tau_hat;
  out.g_hat = gains.g_hat;
  out.rank_deficient = gains.rank_deficient;
  out.profiles = std::move(delays.profiles);
  int wrong = 0;
  for (int k = 0; k < cfg.num_mues(); ++k) wrong += out.tau_hat[k] != truth.tau[k];
  out.der = static_cast<double>(wrong) / cfg.num_mues();
  const double energy = truth.g.squaredNorm();
  out.nmse = energy > 0.0 ? (out.g_hat - truth.g).squaredNorm() / energy : 0.0;
  return out;
}

EstimationMetrics metrics(std::span<const Channels> truth, std::span<const EstimationResult> estimates) {
  if (truth.size() != estimates.size() || truth.empty()) {
    throw std::invalid_argument("metrics: need matching, nonempty run lists");
  }
  EstimationMetrics m;
  m.runs = static_cast<int>(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const Channels& t = truth[i];
    const EstimationResult& e = estimates[i];
    const int K = t.num_mues();
    if (static_cast<int>(e.tau_hat.size()) != K || e.g_hat.size() != K) {
      throw std::invalid_argument("metrics: estimate size mismatch");
    }
    int wrong = 0;
    for (int k = 0; k < K; ++k) wrong += e.tau_hat[k] != t.tau[k];
    m.der += static_cast<double>(wrong) / K;
    const double energy = t.g.squaredNorm();
    m.nmse += energy > 0.0 ? (e.g_hat - t.g).squaredNorm() / energy : 0.0;
  }
  m.der /= m.runs;
  m.nmse /= m.runs;
  return m;
}

Channels with_estimates(const Channels& truth, const EstimationResult& est) {
  Channels out = truth;
  out.g = est.g_hat;
  out.tau = est.tau_hat;
  return out;
}

void write_pilots_csv(std::ostream& os, const CMat& pilots) {
  const auto old = os.precision(17);
  os << "k,m,re,im\n";
  for (int k = 0; k < pilots.cols(); ++k) {
    for (int m = 0; m < pilots.rows(); ++m) {
      os << k << ',' << m << ',' << pilots(m, k).real() << ',' << pilots(m, k).imag() << '\n';
    }
  }
  os.precision(old);
}

void write_profiles_csv(std::ostream& os, const std::vector<RVec>& profiles) {
  const auto old = os.precision(17);
  os << "k,tau,magnitude\n";
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    for (int tau = 0; tau < profiles[k].size(); ++tau) os << k << ',' << tau << ',' << profiles[k](tau) << '\n';
  }
  os.precision(old);
}

}  // namespace ecrs
