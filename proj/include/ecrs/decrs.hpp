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
#include <string>
#include <vector>

#include "ecrs/iecrs.hpp"

namespace ecrs {

struct DecrsOptions {
  AoOptions ao;
};

struct DecrsSolution {
  DecrsPrecoders precoders;
  RateReport report;
  double t0 = 0.0;
  RVec t;  ///< per-mUE dUE slack t_k at the final iterate
  std::vector<double> t0_trace;
  std::vector<double> wall_seconds;
  int iterations = 0;
  bool converged = false;
  int solver_failures = 0;
  bool pinned = false;
};

/// Joint first-phase precoders, mUE gains and rate split for DeCRS.
/// Starts from init_mrt_decrs and full mUE power unless initial values are given.
DecrsSolution solve_decrs(const Channels& channels, const SceneConfig& config,
                          const DecrsOptions& opts = {}, const CMat* initial_F = nullptr,
                          const CVec* initial_g_bar = nullptr);

/// Lower-level entry used by the scheme wrappers.
DecrsSolution solve_decrs(const CMat& H, const CVec& g, double p_ap, const RVec& p_k,
                          const DecrsOptions& opts = {}, const CMat* initial_F = nullptr,
                          const CVec* initial_g_bar = nullptr);

struct DecrsAudit {
  RateReport report;        ///< recomputed from the rate formulas
  double t0_gap = 0.0;      ///< |(-t0) - min_rate|
  double power_excess = 0.0;
  double mue_power_excess = 0.0;
  bool passed = false;
  std::vector<std::string> issues;
};

/// Recomputes every rate of a DeCRS solution from first principles and checks
/// the split, the power budgets and the optimizer's t0.
DecrsAudit decrs_rate_audit(const DecrsPrecoders& solution, double t0, const Channels& channels,
                            double p_ap, const RVec& p_k, double tol = 1e-6);

/// Rates of a DeCRS design on the true channel.
RateReport evaluate_decrs(const DecrsPrecoders& design, const CVec& g_design,
                          const Channels& truth);

}  // namespace ecrs
