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

#include "ecrs/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace ecrs {

namespace {

CVec unit_or_zero(const CVec& h) {
  const double n = h.norm();
  return n > 0.0 ? CVec(h / n) : CVec(CVec::Zero(h.size()));
}

// Dominant left singular vector. When the top singular value is repeated
// the SVD basis is arbitrary; project the sum of the unit channels onto the
// dominant subspace instead so every mUE sees the same share.
CVec dominant_direction(const CMat& H, const Eigen::JacobiSVD<CMat>& svd) {
  const RVec& s = svd.singularValues();
  int dim = 1;
  while (dim < s.size() && s(dim) >= s(0) * (1.0 - 1e-9)) ++dim;
  const CVec u0 = svd.matrixU().col(0);
  if (dim == 1) return u0;
  CVec sum = CVec::Zero(H.rows());
  for (int k = 0; k < H.cols(); ++k) sum += unit_or_zero(H.col(k));
  const CMat U = svd.matrixU().leftCols(dim);
  const CVec proj = U * (U.adjoint() * sum);
  return proj.norm() > 1e-12 ? CVec(proj / proj.norm()) : u0;
}

}  // namespace

CMat init_mrt_svd(const CMat& H, double p_ap, double common_share) {
  const int K = static_cast<int>(H.cols());
  if (K < 1) throw std::invalid_argument("init_mrt_svd: no mUEs");
  if (!(common_share >= 0.0 && common_share <= 1.0)) {
    throw std::invalid_argument("init_mrt_svd: common share outside [0, 1]");
  }
  CMat F = CMat::Zero(H.rows(), K + 1);
  if (H.norm() == 0.0 || p_ap <= 0.0) return F;
  Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinU);
  F.col(0) = dominant_direction(H, svd) * std::sqrt(common_share * p_ap);
  const double per_private = (1.0 - common_share) * p_ap / K;
  for (int k = 0; k < K; ++k) F.col(k + 1) = unit_or_zero(H.col(k)) * std::sqrt(per_private);
  // Renormalize in case some h_k vanish.
  const double total = F.squaredNorm();
  if (total > 0.0) F *= std::sqrt(p_ap / total);
  return F;
}

CMat init_mrt_decrs(const CMat& H, double p_ap) {
  const int K = static_cast<int>(H.cols());
  if (K < 1) throw std::invalid_argument("init_mrt_decrs: no mUEs");
  CMat F = CMat::Zero(H.rows(), 2 * K);
  if (p_ap <= 0.0) return F;
  const double per_stream = p_ap / (2.0 * K);
  for (int k = 0; k < K; ++k) {
    const CVec u = unit_or_zero(H.col(k)) * std::sqrt(per_stream);
    F.col(k) = u;
    F.col(K + k) = u;
  }
  return F;
}

IecrsSolution solve_ic_noma(const Channels& channels, const SceneConfig& config,
                            const IecrsOptions& opts) {
  IecrsOptions pinned = opts;
  pinned.ao.pin_private_common = true;
  return solve_iecrs(channels, config, pinned);
}

DecrsSolution solve_dc_noma(const Channels& channels, const SceneConfig& config,
                            const DecrsOptions& opts) {
  DecrsOptions pinned = opts;
  pinned.ao.pin_private_common = true;
  return solve_decrs(channels, config, pinned);
}

Phase2Result solve_phase2_st(const CVec& g, const RVec& p_k) {
  if (g.size() != p_k.size()) throw std::invalid_argument("solve_phase2_st: size mismatch");
  Phase2Result out;
  out.g_bar = CVec(g.size());
  double amplitude = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    out.g_bar(k) = std::abs(g(k)) * std::sqrt(p_k(k));
    amplitude += out.g_bar(k).real();
  }
  out.rate = std::log2(1.0 + amplitude * amplitude);
  out.trace = {out.rate};
  out.wall_seconds = {0.0};
  return out;
}

IecrsSolution solve_st(const Channels& channels, const SceneConfig& config,
                       const IecrsOptions& opts) {
  validate(config);
  const Phase1Result p1 = solve_phase1(channels.H, config.ap_power_watt(), opts.ao);
  Channels aligned = channels;
  std::fill(aligned.tau.begin(), aligned.tau.end(), 0);
  const Phase2Result p2 = solve_phase2_st(channels.g, mue_powers(config));
  return assemble_iecrs(aligned, config, p1, p2, Phase2Method::Low, opts.exact_prefactor);
}

}  // namespace ecrs
