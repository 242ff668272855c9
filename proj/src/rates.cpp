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

#include "ecrs/rates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ecrs {
namespace {

// |h_k^H f_j|^2 for every (mUE, stream) pair.
RMat received_powers(const CMat& H, const CMat& F) {
  if (H.rows() != F.rows()) throw std::invalid_argument("rates: H and F row counts differ");
  return (H.adjoint() * F).cwiseAbs2();
}

double log2_1p(double x) { return std::log1p(x) / kLn2; }

std::string fmt_violation(const char* what, int k, double excess) {
  std::ostringstream os;
  os << what << " violated for mUE " << k << " by " << std::setprecision(3) << excess;
  return os.str();
}

}  // namespace

StreamRates iecrs_rates(const CMat& H, const CMat& F) {
  const int K = static_cast<int>(H.cols());
  if (F.cols() != K + 1) throw std::invalid_argument("iecrs_rates: F must have K+1 columns");
  const RMat P = received_powers(H, F);
  StreamRates r{RVec(K), RVec(K)};
  for (int k = 0; k < K; ++k) {
    const double priv_total = P.row(k).tail(K).sum();
    const double own = P(k, k + 1);
    r.common(k) = log2_1p(P(k, 0) / (priv_total + 1.0));
    r.priv(k) = log2_1p(own / (priv_total - own + 1.0));
  }
  return r;
}

StreamRates decrs_rates(const CMat& H, const CMat& F) {
  const int K = static_cast<int>(H.cols());
  if (F.cols() != 2 * K) throw std::invalid_argument("decrs_rates: F must have 2K columns");
  const RMat P = received_powers(H, F);
  StreamRates r{RVec(K), RVec(K)};
  for (int k = 0; k < K; ++k) {
    const double all = P.row(k).sum();
    const double own_c = P(k, k);
    const double own_p = P(k, K + k);
    r.common(k) = log2_1p(own_c / (all - own_c + 1.0));
    r.priv(k) = log2_1p(own_p / (all - own_c - own_p + 1.0));
  }
  return r;
}

CVec ofdm_gains(const CVec& g_bar, const Delays& tau, int n_c) {
  if (n_c < 1) throw std::invalid_argument("ofdm_gains: N_c must be >= 1");
  if (static_cast<Eigen::Index>(tau.size()) != g_bar.size()) {
    throw std::invalid_argument("ofdm_gains: delay and gain lengths differ");
  }
  CVec out = CVec::Zero(n_c);
  for (int k = 0; k < g_bar.size(); ++k) {
    if (tau[k] < 0) throw std::invalid_argument("ofdm_gains: negative delay");
    for (int n = 1; n <= n_c; ++n) {
      // reduce the phase index modulo N_c before scaling to keep it exact
      const long long idx = (static_cast<long long>(tau[k]) * n) % n_c;
      out(n - 1) += g_bar(k) * std::polar(1.0, -2.0 * std::numbers::pi * idx / n_c);
    }
  }
  return out;
}

double rate_phase2_iecrs(const CVec& g_bar, const Delays& tau, int n_c, int cp_len) {
  const CVec gt = ofdm_gains(g_bar, tau, n_c);
  double sum = 0.0;
  for (int n = 0; n < n_c; ++n) sum += log2_1p(std::norm(gt(n)));
  return sum / (n_c + cp_len);
}

RVec rate_phase2_decrs(const CVec& g_bar) {
  const RVec p = g_bar.cwiseAbs2();
  const double total = p.sum();
  RVec r(p.size());
  for (int k = 0; k < p.size(); ++k) r(k) = log2_1p(p(k) / (total - p(k) + 1.0));
  return r;
}

RateReport combine_rates_iecrs(const RVec& c, const StreamRates& rates, double r_phase2) {
  const int K = static_cast<int>(rates.priv.size());
  if (c.size() != K + 1) throw std::invalid_argument("combine_rates_iecrs: c must have K+1 entries");
  RateReport rep;
  rep.mue = rates.priv + c.head(K);
  const double c_d = c(K);
  rep.due_common = RVec::Constant(1, c_d);
  rep.due_phase2 = RVec::Constant(1, r_phase2);
  rep.due = std::min(c_d, r_phase2);
  rep.wasted_common = c_d - rep.due;
  rep.min_rate = std::min(rep.mue.minCoeff(), rep.due);

  const double common_load = c.sum();
  for (int k = 0; k < K; ++k) {
    const double excess = common_load - rates.common(k);
    if (excess > kCommonRateTol) rep.violations.push_back(fmt_violation("common rate", k, excess));
  }
  for (int i = 0; i <= K; ++i) {
    if (c(i) < -kCommonRateTol) rep.violations.push_back(fmt_violation("nonnegative split", i, -c(i)));
  }
  return rep;
}

RateReport combine_rates_decrs(const RVec& c, const StreamRates& rates, const RVec& r_phase2) {
  const int K = static_cast<int>(rates.priv.size());
  if (c.size() != 2 * K || r_phase2.size() != K) {
    throw std::invalid_argument("combine_rates_decrs: inconsistent sizes");
  }
  RateReport rep;
  rep.mue = rates.priv + c.head(K);
  rep.due_common = c.tail(K);
  rep.due_phase2 = r_phase2;
  rep.due = rep.due_common.cwiseMin(r_phase2).sum();
  rep.min_rate = std::min(rep.mue.minCoeff(), rep.due);
  for (int k = 0; k < K; ++k) {
    const double excess = c(k) + c(K + k) - rates.common(k);
    if (excess > kCommonRateTol) rep.violations.push_back(fmt_violation("common rate", k, excess));
  }
  for (int i = 0; i < 2 * K; ++i) {
    if (c(i) < -kCommonRateTol) rep.violations.push_back(fmt_violation("nonnegative split", i, -c(i)));
  }
  return rep;
}

RVec max_min_split_iecrs(const StreamRates& rates, bool pin_private_common, double* value) {
  const int K = static_cast<int>(rates.priv.size());
  const double budget = std::max(0.0, rates.common.minCoeff());
  RVec c = RVec::Zero(K + 1);
  double t = 0.0;
  if (pin_private_common) {
    c(K) = budget;
    t = std::min(budget, rates.priv.minCoeff());
  } else {
    // Solve t + sum_k max(0, t - R_pk) = budget over the sorted breakpoints.
    std::vector<double> p(rates.priv.data(), rates.priv.data() + K);
    std::sort(p.begin(), p.end());
    double prefix = 0.0;
    for (int j = 0; j <= K; ++j) {
      t = (budget + prefix) / (1.0 + j);
      if (j == K || t <= p[j]) break;
      prefix += p[j];
    }
    for (int k = 0; k < K; ++k) c(k) = std::max(0.0, t - rates.priv(k));
    c(K) = t;
  }
  if (value) *value = t;
  return c;
}

RVec max_min_split_decrs(const StreamRates& rates, const RVec& r_phase2, bool pin_private_common,
                         double* value) {
  const int K = static_cast<int>(rates.priv.size());
  auto private_part = [&](double t, int k) {
    return pin_private_common ? 0.0 : std::max(0.0, t - rates.priv(k));
  };
  auto feasible = [&](double t) {
    double due = 0.0;
    for (int k = 0; k < K; ++k) {
      const double ck = private_part(t, k);
      if (rates.priv(k) + ck < t || ck > rates.common(k)) return false;
      due += std::min(rates.common(k) - ck, r_phase2(k));
    }
    return due >= t;
  };
  double lo = 0.0;
  double hi = (rates.priv + rates.common).minCoeff();
  hi = std::max(0.0, std::min(hi, r_phase2.sum()));
  if (feasible(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
  }
  RVec c(2 * K);
  for (int k = 0; k < K; ++k) {
    c(k) = private_part(lo, k);
    c(K + k) = std::max(0.0, rates.common(k) - c(k));
  }
  if (value) *value = lo;
  return c;
}

MseSuite mse_suite_iecrs(const CMat& H, const CMat& F, const MmseReceivers& rx) {
  const int K = static_cast<int>(H.cols());
  const CMat HF = H.adjoint() * F;
  const RMat P = HF.cwiseAbs2();
  MseSuite s;
  s.eps_c.resize(K);
  s.eps_p.resize(K);
  for (int k = 0; k < K; ++k) {
    const double t_c = P.row(k).sum() + 1.0;
    const double t_p = t_c - P(k, 0);
    s.eps_c(k) = std::norm(rx.w_c(k)) * t_c - 2.0 * (rx.w_c(k) * HF(k, 0)).real() + 1.0;
    s.eps_p(k) = std::norm(rx.w_p(k)) * t_p - 2.0 * (rx.w_p(k) * HF(k, k + 1)).real() + 1.0;
  }
  s.xi_c = rx.mu_c.cwiseProduct(s.eps_c) - rx.mu_c.array().log().matrix();
  s.xi_p = rx.mu_p.cwiseProduct(s.eps_p) - rx.mu_p.array().log().matrix();
  return s;
}

MmseReceivers mmse_update_iecrs(const CMat& H, const CMat& F) {
  const int K = static_cast<int>(H.cols());
  const CMat HF = H.adjoint() * F;
  const RMat P = HF.cwiseAbs2();
  MmseReceivers rx;
  rx.w_c.resize(K);
  rx.w_p.resize(K);
  rx.mu_c.resize(K);
  rx.mu_p.resize(K);
  for (int k = 0; k < K; ++k) {
    const double t_c = P.row(k).sum() + 1.0;
    const double t_p = t_c - P(k, 0);
    rx.w_c(k) = std::conj(HF(k, 0)) / t_c;
    rx.w_p(k) = std::conj(HF(k, k + 1)) / t_p;
    rx.mu_c(k) = t_c / (t_c - P(k, 0));
    rx.mu_p(k) = t_p / (t_p - P(k, k + 1));
  }
  return rx;
}

MseSuite mse_suite_decrs(const CMat& H, const CMat& F, const CVec& g_bar, const MmseReceivers& rx) {
  const int K = static_cast<int>(H.cols());
  const CMat HF = H.adjoint() * F;
  const RMat P = HF.cwiseAbs2();
  const double t_d = g_bar.squaredNorm() + 1.0;
  MseSuite s;
  s.eps_c.resize(K);
  s.eps_p.resize(K);
  s.eps_d.resize(K);
  for (int k = 0; k < K; ++k) {
    const double t_c = P.row(k).sum() + 1.0;
    const double t_p = t_c - P(k, k);
    s.eps_c(k) = std::norm(rx.w_c(k)) * t_c - 2.0 * (rx.w_c(k) * HF(k, k)).real() + 1.0;
    s.eps_p(k) = std::norm(rx.w_p(k)) * t_p - 2.0 * (rx.w_p(k) * HF(k, K + k)).real() + 1.0;
    s.eps_d(k) = std::norm(rx.w_d(k)) * t_d - 2.0 * (rx.w_d(k) * g_bar(k)).real() + 1.0;
  }
  s.xi_c = rx.mu_c.cwiseProduct(s.eps_c) - rx.mu_c.array().log().matrix();
  s.xi_p = rx.mu_p.cwiseProduct(s.eps_p) - rx.mu_p.array().log().matrix();
  s.xi_d = rx.mu_d.cwiseProduct(s.eps_d) - rx.mu_d.array().log().matrix();
  return s;
}

MmseReceivers mmse_update_decrs(const CMat& H, const CMat& F, const CVec& g_bar) {
  const int K = static_cast<int>(H.cols());
  const CMat HF = H.adjoint() * F;
  const RMat P = HF.cwiseAbs2();
  const double t_d = g_bar.squaredNorm() + 1.0;
  MmseReceivers rx;
  rx.w_c.resize(K);
  rx.w_p.resize(K);
  rx.w_d.resize(K);
  rx.mu_c.resize(K);
  rx.mu_p.resize(K);
  rx.mu_d.resize(K);
  for (int k = 0; k < K; ++k) {
    const double t_c = P.row(k).sum() + 1.0;
    const double t_p = t_c - P(k, k);
    rx.w_c(k) = std::conj(HF(k, k)) / t_c;
    rx.w_p(k) = std::conj(HF(k, K + k)) / t_p;
    rx.w_d(k) = std::conj(g_bar(k)) / t_d;
    rx.mu_c(k) = t_c / (t_c - P(k, k));
    rx.mu_p(k) = t_p / (t_p - P(k, K + k));
    rx.mu_d(k) = t_d / (t_d - std::norm(g_bar(k)));
  }
  return rx;
}

void write_rate_report_csv_header(std::ostream& os) {
  os << "label,min_rate,due_rate,wasted_common,mue_rates,due_common,due_phase2,violations\n";
}

void write_rate_report_csv_row(std::ostream& os, const std::string& label, const RateReport& r) {
  auto join = [](const RVec& v) {
    std::ostringstream s;
    s << std::setprecision(12);
    for (int i = 0; i < v.size(); ++i) s << (i ? ";" : "") << v(i);
    return s.str();
  };
  os << std::setprecision(12) << label << ',' << r.min_rate << ',' << r.due << ',' << r.wasted_common
     << ',' << join(r.mue) << ',' << join(r.due_common) << ',' << join(r.due_phase2) << ','
     << r.violations.size() << '\n';
}

}  // namespace ecrs
