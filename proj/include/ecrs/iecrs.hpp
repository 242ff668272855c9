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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecrs/rates.hpp"
#include "ecrs/scene.hpp"
#include "ecrs/subsolver.hpp"

namespace ecrs {

/// Controls for the WMMSE alternating-optimization loops (both schemes).
struct AoOptions {
  double rel_tol = 1e-4;  ///< stop when t0 improves by less than this fraction
  double abs_tol = 1e-9;
  int max_iter = 200;
  bool pin_private_common = false;  ///< force C_k = 0 (NOMA baselines)
  SolverOptions solver{1e-8, 1e-8, 2000, 50.0, 1e-10};
};

struct Phase1Result {
  CMat F;
  RVec c;   ///< (C_1..C_K, C_d)
  double t0 = 0.0;
  std::vector<double> t0_trace;  ///< t0 before the first and after every AO step
  std::vector<double> wall_seconds;  ///< elapsed time at each trace entry
  int iterations = 0;
  bool converged = false;
  int solver_failures = 0;
};

/// First phase: maximizes min{R_1..R_K, C_d} over F and the rate split.
/// Starts from init_mrt_svd unless `initial` is given.
Phase1Result solve_phase1(const CMat& H, double p_ap, const AoOptions& opts = {},
                          const CMat* initial = nullptr);

struct ScaOptions {
  double rel_tol = 1e-4;
  int max_iter = 200;
  SolverOptions solver{1e-8, 1e-9, 2000, 20.0, 1e-10};
  std::optional<CVec> initial;  ///< starting g_bar; defaults to the LOW solution
  /// Extra starts with the LOW amplitudes and fixed phase patterns (a chirp,
  /// then seeded random phases). The zero-phase start is a stationary point
  /// of the rate, so a single run from it never moves. Ignored when
  /// `initial` is set.
  int extra_starts = 3;
};

struct Phase2Result {
  CVec g_bar;
  double rate = 0.0;             ///< exact R_d^(2)
  std::vector<double> trace;     ///< exact R_d^(2) at every accepted iterate
  std::vector<double> wall_seconds;
  int iterations = 0;
  bool converged = true;
};

/// Second phase by successive convex approximation of the OFDM sum-log rate.
Phase2Result solve_phase2_sca(const CVec& g, const Delays& tau, const RVec& p_k, int n_c,
                              const ScaOptions& opts = {});

/// Full power with zero phase on every mUE.
Phase2Result solve_phase2_low(const CVec& g, const Delays& tau, const RVec& p_k, int n_c);

/// Omega = sum_n Omega_n Omega_n^H with Omega_{n,k} = exp(j 2 pi tau_k n / N_c).
CMat omega_matrix(const Delays& tau, int n_c);

enum class Phase2Method { Auto, Sca, Low };

const char* to_string(Phase2Method m);

struct IecrsOptions {
  AoOptions ao;
  ScaOptions sca;
  Phase2Method phase2 = Phase2Method::Auto;  ///< Auto: LOW when N_c > 512
  bool exact_prefactor = false;  ///< use 1/(N_c + L) in the second-phase rate
};

struct IecrsSolution {
  IecrsPrecoders precoders;
  RateReport report;
  Phase1Result phase1;
  Phase2Result phase2;
  Phase2Method phase2_method = Phase2Method::Sca;
};

RVec mue_powers(const SceneConfig& config);

/// Cyclic-prefix length entering the rate prefactor (0 for the approximation).
int prefactor_cp(const SceneConfig& config, const Channels& channels, bool exact);

Phase2Method resolve_phase2(Phase2Method m, int n_c);

IecrsSolution solve_iecrs(const Channels& channels, const SceneConfig& config,
                          const IecrsOptions& opts = {});

/// Assembles the IeCRS report for given phase outputs.
IecrsSolution assemble_iecrs(const Channels& channels, const SceneConfig& config,
                             const Phase1Result& p1, const Phase2Result& p2,
                             Phase2Method method, bool exact_prefactor);

/// Effective gains realized on the true channel when the mUE precoders were
/// designed for estimated gains.
CVec realized_gains(const CVec& g_bar_design, const CVec& g_design, const CVec& g_true);

/// Rates of an IeCRS design on the true channel; the design may have been
/// computed from estimated (g, tau).
RateReport evaluate_iecrs(const IecrsPrecoders& design, const CVec& g_design,
                          const Channels& truth, int n_c, int cp_len = 0);

/// Writes "iteration,<value_name>,wall_s" rows.
void write_trace_csv(std::ostream& os, const std::vector<double>& trace,
                     const std::vector<double>& wall_seconds, const std::string& value_name);

}  // namespace ecrs
