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

#include "ecrs/types.hpp"

namespace ecrs {

/// Per-mUE achievable rates of the common stream (decoded first) and the
/// private stream (decoded after SIC), in bits per channel use.
struct StreamRates {
  RVec common;
  RVec priv;
};

/// IeCRS first-phase layout: F = [f_c, f_1..f_K], c = (C_1..C_K, C_d).
struct IecrsPrecoders {
  CMat F;
  RVec c;
  CVec g_bar;
};

/// DeCRS first-phase layout: F = [f_c1..f_cK, f_1..f_K],
/// c = (C_1..C_K, C_d1..C_dK).
struct DecrsPrecoders {
  CMat F;
  RVec c;
  CVec g_bar;
};

struct RateReport {
  RVec mue;            ///< R_k = R_pk + C_k
  double due = 0.0;    ///< R_d
  RVec due_common;     ///< C_d (IeCRS, size 1) or C_dk (DeCRS)
  RVec due_phase2;     ///< R_d^(2) (IeCRS, size 1) or R_dk^(2) (DeCRS)
  double min_rate = 0.0;
  double wasted_common = 0.0;  ///< C_d - R_d, IeCRS only
  std::vector<std::string> violations;

  bool consistent() const { return violations.empty(); }
};

StreamRates iecrs_rates(const CMat& H, const CMat& F);
StreamRates decrs_rates(const CMat& H, const CMat& F);

/// g~_n = sum_k g_bar_k exp(-j 2 pi tau_k n / N_c), n = 1..N_c (entry n-1).
CVec ofdm_gains(const CVec& g_bar, const Delays& tau, int n_c);

/// Second-phase IeCRS rate. With cp_len = 0 the prefactor is 1/N_c (the
/// large-N_c approximation); otherwise 1/(N_c + cp_len).
double rate_phase2_iecrs(const CVec& g_bar, const Delays& tau, int n_c, int cp_len = 0);

/// Second-phase DeCRS rates with every other mUE treated as interference.
RVec rate_phase2_decrs(const CVec& g_bar);

/// Violations of the common-rate constraints beyond this are reported.
inline constexpr double kCommonRateTol = 1e-9;

RateReport combine_rates_iecrs(const RVec& c, const StreamRates& rates, double r_phase2);
RateReport combine_rates_decrs(const RVec& c, const StreamRates& rates, const RVec& r_phase2);

/// Exact max-min rate split for fixed precoders. Returns the split c and
/// writes the achieved max-min value. With pin_private_common all C_k = 0.
RVec max_min_split_iecrs(const StreamRates& rates, bool pin_private_common, double* value);
RVec max_min_split_decrs(const StreamRates& rates, const RVec& r_phase2, bool pin_private_common,
                         double* value);

/// Receive equalizers and WMMSE weights for every stream type. The dUE
/// entries are used by DeCRS only.
struct MmseReceivers {
  CVec w_c, w_p, w_d;
  RVec mu_c, mu_p, mu_d;
};

struct MseSuite {
  RVec eps_c, eps_p, eps_d;
  RVec xi_c, xi_p, xi_d;
};

MseSuite mse_suite_iecrs(const CMat& H, const CMat& F, const MmseReceivers& rx);
MmseReceivers mmse_update_iecrs(const CMat& H, const CMat& F);

MseSuite mse_suite_decrs(const CMat& H, const CMat& F, const CVec& g_bar, const MmseReceivers& rx);
MmseReceivers mmse_update_decrs(const CMat& H, const CMat& F, const CVec& g_bar);

void write_rate_report_csv_header(std::ostream& os);
void write_rate_report_csv_row(std::ostream& os, const std::string& label, const RateReport& r);

}  // namespace ecrs
