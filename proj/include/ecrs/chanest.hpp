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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ecrs/scene.hpp"

namespace ecrs {

struct PilotConfig {
  int n_p = 101;           ///< pilot length
  std::vector<int> roots;  ///< one Zadoff-Chu root per mUE
  double power_dbm = 0.0;  ///< pilot transmit power of every mUE
  int n_r = 0;             ///< receive window length
  int tau_max = 0;         ///< largest delay searched

  int num_mues() const { return static_cast<int>(roots.size()); }
  double power_watt() const { return dbm_to_watt(power_dbm); }
};

/// Throws std::invalid_argument unless the window covers every shift and the
/// roots are distinct, in [1, N_zc) and coprime with N_p.
void validate(const PilotConfig& cfg);

/// The K smallest positive integers below N_zc that are coprime with n_p.
std::vector<int> assign_roots(int n_p, int num_mues);

/// Config with assigned roots and N_r = N_p + tau_max.
PilotConfig make_pilot_config(int n_p, int num_mues, double power_dbm, int tau_max);

/// Length of the underlying Zadoff-Chu sequence: the largest prime not above
/// N_p (N_p itself when it is prime, 1 or 2).
int zc_base_length(int n_p);

/// Zadoff-Chu pilots exp(-j pi r m (m+1) / N_zc), one column per root,
/// cyclically extended to N_p when N_p is not prime. Every column has squared
/// norm N_p.
CMat gen_pilots(const PilotConfig& cfg);

/// [0_tau; psi; 0] of length n_r.
CVec shifted_pilot(const CVec& psi, int tau, int n_r);

/// y = sqrt(P) Psi g + z with unit-variance circular Gaussian noise; no noise
/// when noise_seed is empty.
CVec simulate_pilot_rx(const CMat& pilots, const CVec& g, const Delays& tau, const PilotConfig& cfg,
                       std::optional<std::uint64_t> noise_seed);

struct DelayEstimate {
  Delays tau_hat;
  std::vector<RVec> profiles;  ///< |r_k(tau)| for tau = 0..tau_max
};

/// Maximum-projection delay search; ties go to the smallest delay.
DelayEstimate estimate_delays(const CVec& y, const CMat& pilots, const PilotConfig& cfg);

struct GainEstimate {
  CVec g_hat;
  bool rank_deficient = false;  ///< pseudo-inverse fallback was used
};

/// Least-squares gains divided by sqrt(P), so g_hat estimates g.
GainEstimate estimate_gains(const CVec& y, const CMat& pilots, const Delays& tau_hat,
                            const PilotConfig& cfg);

struct EstimationResult {
  Delays tau_hat;
  CVec g_hat;
  double der = 0.0;   ///< fraction of mUEs with a wrong delay in this run
  double nmse = 0.0;  ///< |g_hat - g|^2 / |g|^2 in this run
  bool rank_deficient = false;
  std::vector<RVec> profiles;
};

/// Pilots, reception, delay and gain estimation for one channel draw.
EstimationResult estimate_channel(const Channels& truth, const PilotConfig& cfg,
                                  std::optional<std::uint64_t> noise_seed);

struct EstimationMetrics {
  double der = 0.0;
  double nmse = 0.0;
  int runs = 0;
};

/// Averages the per-mUE delay mismatch and the gain NMSE over runs.
EstimationMetrics metrics(std::span<const Channels> truth, std::span<const EstimationResult> estimates);

/// Copy of the channels with g and tau replaced by their estimates.
Channels with_estimates(const Channels& truth, const EstimationResult& est);

/// "k,m,re,im" rows.
void write_pilots_csv(std::ostream& os, const CMat& pilots);
/// "k,tau,magnitude" rows.
void write_profiles_csv(std::ostream& os, const std::vector<RVec>& profiles);

}  // namespace ecrs
