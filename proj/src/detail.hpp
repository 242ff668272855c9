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

#include <chrono>

#include "ecrs/types.hpp"

namespace ecrs::detail {

/// Orthonormal basis of the column span of H (numerical rank).
inline CMat span_basis(const CMat& H) {
  Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) return CMat(H.rows(), 0);
  int r = 0;
  while (r < s.size() && s(r) > 1e-12 * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Scales z into the open unit ball with a small margin.
inline void shrink_into_unit_ball(CMat& z, double margin = 1e-7) {
  const double n2 = z.squaredNorm();
  if (n2 > 1.0 - margin) z *= std::sqrt((1.0 - margin) / n2);
}

}  // namespace ecrs::detail
