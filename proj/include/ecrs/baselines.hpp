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

#include "ecrs/decrs.hpp"
#include "ecrs/iecrs.hpp"

namespace ecrs {

/// IeCRS start: f_c along the dominant left singular vector of H, f_k along
/// h_k, with `common_share` of P_AP on f_c and the rest split evenly.
CMat init_mrt_svd(const CMat& H, double p_ap, double common_share = 0.5);

/// DeCRS start: f_ck = f_k = h_k/|h_k| with P_AP/(2K) on every stream.
CMat init_mrt_decrs(const CMat& H, double p_ap);

/// IeCRS with every C_k pinned to zero.
IecrsSolution solve_ic_noma(const Channels& channels, const SceneConfig& config,
                            const IecrsOptions& opts = {});

/// DeCRS with every C_k pinned to zero.
DecrsSolution solve_dc_noma(const Channels& channels, const SceneConfig& config,
                            const DecrsOptions& opts = {});

/// Second phase with all mUE signals in one tap: co-phased full power.
Phase2Result solve_phase2_st(const CVec& g, const RVec& p_k);

/// IeCRS first phase with the simultaneous-arrival second phase.
IecrsSolution solve_st(const Channels& channels, const SceneConfig& config,
                       const IecrsOptions& opts = {});

}  // namespace ecrs
