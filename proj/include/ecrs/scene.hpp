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
#include <string>

#include "ecrs/types.hpp"

namespace ecrs {

/// Physical and system constants of one deployment. Powers are in dBm, the
/// linear accessors return watts.
struct SceneConfig {
  int n_v = 4;  ///< vertical UPA elements
  int n_h = 4;  ///< horizontal UPA elements
  int num_mues = 5;
  double carrier_hz = 0.3e12;
  double bandwidth_hz = 1e9;
  double sampling_hz = 1e9;
  double noise_dbm_per_hz = -174.0;
  double ap_power_dbm = 20.0;
  double mue_power_dbm = 0.0;  ///< transmit power of every mUE
  double pathloss_exponent = 2.0;
  /// Path loss at 1 m. Unset means free-space loss at the carrier.
  std::optional<double> beta0_db;
  int num_subcarriers = 256;
  /// Cyclic prefix in taps. Unset means max tau of the realized scene.
  std::optional<int> cp_len;
  Vec3 ap_pos{0.0, 4.0, 1.0};
  Vec3 due_pos{8.0, 4.0, 0.0};
  Vec3 mue_box_lo{2.0, 0.0, 0.0};
  Vec3 mue_box_hi{6.0, 8.0, 0.0};
  std::uint64_t rng_seed = 1;

  int num_antennas() const { return n_v * n_h; }
  double noise_power_watt() const;
  double ap_power_watt() const { return dbm_to_watt(ap_power_dbm); }
  double mue_power_watt() const { return dbm_to_watt(mue_power_dbm); }
  double beta0_linear() const;
};

/// Throws std::invalid_argument on the first violated invariant.
void validate(const SceneConfig& config);

/// Downlink channels (columns h_k), cooperative gains g_k and tap delays.
/// H and g are already divided by the noise standard deviation.
struct Channels {
  CMat H;
  CVec g;
  Delays tau;
  std::vector<Vec3> positions;

  int num_mues() const { return static_cast<int>(g.size()); }
  int num_antennas() const { return static_cast<int>(H.rows()); }
};

double pathloss(double distance_m, const SceneConfig& config);

/// UPA response with the array in the y-z plane at the AP: the vertical
/// phase progression uses sin(elevation), the horizontal one the direction
/// cosine along y.
CVec steering_vector(const Vec3& from, const Vec3& to, int n_v, int n_h);

int delay_taps(double distance_m, double sampling_hz);

/// Largest tap delay any mUE position inside the box can produce.
int max_delay_taps(const SceneConfig& config);

Channels sample_scene(const SceneConfig& config, std::uint64_t seed);
inline Channels sample_scene(const SceneConfig& config) {
  return sample_scene(config, config.rng_seed);
}

/// Effective cyclic prefix: config.cp_len or max(tau).
int cyclic_prefix(const SceneConfig& config, const Channels& channels);

/// Channels CSV layout, one row per complex entry:
///   kind,k,n,re,im,tau
/// kind=h: n is the antenna index, tau empty.
/// kind=g: n=0, tau is the tap delay of mUE k.
/// kind=pos: n in {0,1,2} is the coordinate, re the value in meters.
void write_channels_csv(std::ostream& os, const Channels& channels);
Channels read_channels_csv(std::istream& is);

}  // namespace ecrs
