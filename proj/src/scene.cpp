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

#include "ecrs/scene.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ecrs {

double SceneConfig::noise_power_watt() const {
  return dbm_to_watt(noise_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

double SceneConfig::beta0_linear() const {
  if (beta0_db) return db_to_linear(*beta0_db);
  const double r = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_hz);
  return r * r;
}

void validate(const SceneConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SceneConfig: " + what); };
  if (c.n_v < 1 || c.n_h < 1) fail("antenna grid must be at least 1x1");
  if (c.num_mues < 1) fail("num_mues must be >= 1");
  if (c.num_subcarriers < 1) fail("num_subcarriers must be >= 1");
  if (c.cp_len && *c.cp_len < 0) fail("cp_len must be >= 0");
  if (!(c.bandwidth_hz > 0.0)) fail("bandwidth must be positive");
  if (!(c.sampling_hz > 0.0)) fail("sampling rate must be positive");
  if (!(c.carrier_hz > 0.0)) fail("carrier must be positive");
  if (!(c.pathloss_exponent > 0.0)) fail("path-loss exponent must be positive");
  for (double w : {c.noise_power_watt(), c.ap_power_watt(), c.mue_power_watt(), c.beta0_linear()}) {
    if (!(w > 0.0) || !std::isfinite(w)) fail("derived linear powers must be positive and finite");
  }
  for (int i = 0; i < 3; ++i) {
    if (c.mue_box_lo[i] > c.mue_box_hi[i]) fail("mue box corners must be ordered");
  }
}

double pathloss(double distance_m, const SceneConfig& config) {
  if (!(distance_m > 0.0)) throw std::domain_error("pathloss: distance must be positive");
  return config.beta0_linear() * std::pow(distance_m, -config.pathloss_exponent);
}

CVec steering_vector(const Vec3& from, const Vec3& to, int n_v, int n_h) {
  const Vec3 v = to - from;
  const double dist = v.norm();
  const double sin_elev = v.z() / dist;
  const double horiz = v.y() / dist;  // cos(elevation) * cos(azimuth from the y axis)
  CVec a(n_v * n_h);
  for (int iv = 0; iv < n_v; ++iv) {
    for (int ih = 0; ih < n_h; ++ih) {
      const double phase = std::numbers::pi * (iv * sin_elev + ih * horiz);
      a(iv * n_h + ih) = std::polar(1.0, phase);
    }
  }
  return a;
}

int delay_taps(double distance_m, double sampling_hz) {
  return static_cast<int>(std::lround(sampling_hz * distance_m / kSpeedOfLight));
}

int max_delay_taps(const SceneConfig& config) {
  double d_max = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    Vec3 p;
    for (int i = 0; i < 3; ++i) p[i] = (corner >> i) & 1 ? config.mue_box_hi[i] : config.mue_box_lo[i];
    d_max = std::max(d_max, (p - config.due_pos).norm());
  }
  return delay_taps(d_max, config.sampling_hz);
}

Channels sample_scene(const SceneConfig& config, std::uint64_t seed) {
  validate(config);
  const int K = config.num_mues;
  const int nt = config.num_antennas();
  const double noise_std = std::sqrt(config.noise_power_watt());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Channels ch;
  ch.H.resize(nt, K);
  ch.g.resize(K);
  ch.tau.resize(K);
  ch.positions.resize(K);

  for (int k = 0; k < K; ++k) {
    Vec3 p;
    double d_ap = 0.0;
    double d_due = 0.0;
    int attempts = 0;
    do {
      if (++attempts > 1000) throw std::invalid_argument("sample_scene: mUE box collapses onto the AP or dUE");
      for (int i = 0; i < 3; ++i) {
        p[i] = config.mue_box_lo[i] + (config.mue_box_hi[i] - config.mue_box_lo[i]) * unit(rng);
      }
      d_ap = (p - config.ap_pos).norm();
      d_due = (p - config.due_pos).norm();
    } while (d_ap <= 0.0 || d_due <= 0.0);
    const double theta = 2.0 * std::numbers::pi * unit(rng);

    ch.positions[k] = p;
    ch.H.col(k) = std::sqrt(pathloss(d_ap, config)) / noise_std *
                  steering_vector(config.ap_pos, p, config.n_v, config.n_h);
    ch.g(k) = std::polar(std::sqrt(pathloss(d_due, config)) / noise_std, theta);
    ch.tau[k] = delay_taps(d_due, config.sampling_hz);
  }
  return ch;
}

int cyclic_prefix(const SceneConfig& config, const Channels& channels) {
  if (config.cp_len) return *config.cp_len;
  return channels.tau.empty() ? 0 : *std::max_element(channels.tau.begin(), channels.tau.end());
}

void write_channels_csv(std::ostream& os, const Channels& ch) {
  os << "kind,k,n,re,im,tau\n";
  os << std::setprecision(17);
  for (int k = 0; k < ch.H.cols(); ++k) {
    for (int n = 0; n < ch.H.rows(); ++n) {
      os << "h," << k << ',' << n << ',' << ch.H(n, k).real() << ',' << ch.H(n, k).imag() << ",\n";
    }
  }
  for (int k = 0; k < ch.g.size(); ++k) {
    os << "g," << k << ",0," << ch.g(k).real() << ',' << ch.g(k).imag() << ',' << ch.tau[k] << '\n';
  }
  for (std::size_t k = 0; k < ch.positions.size(); ++k) {
    for (int i = 0; i < 3; ++i) os << "pos," << k << ',' << i << ',' << ch.positions[k][i] << ",0,\n";
  }
}

Channels read_channels_csv(std::istream& is) {
  struct Row {
    std::string kind;
    int k, n;
    double re, im;
    int tau;
  };
  std::vector<Row> rows;
  std::string line;
  std::getline(is, line);
  if (line.rfind("kind,", 0) != 0) throw std::runtime_error("channels csv: missing header");
  int max_k = -1, max_n = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field[6];
    for (int i = 0; i < 6; ++i) std::getline(ss, field[i], ',');
    Row r{field[0], std::stoi(field[1]), std::stoi(field[2]), std::stod(field[3]),
          std::stod(field[4]), field[5].empty() ? 0 : std::stoi(field[5])};
    max_k = std::max(max_k, r.k);
    if (r.kind == "h") max_n = std::max(max_n, r.n);
    rows.push_back(r);
  }
  Channels ch;
  ch.H = CMat::Zero(max_n + 1, max_k + 1);
  ch.g = CVec::Zero(max_k + 1);
  ch.tau.assign(max_k + 1, 0);
  for (const Row& r : rows) {
    if (r.kind == "h") {
      ch.H(r.n, r.k) = cd(r.re, r.im);
    } else if (r.kind == "g") {
      ch.g(r.k) = cd(r.re, r.im);
      ch.tau[r.k] = r.tau;
    } else if (r.kind == "pos") {
      if (ch.positions.size() <= static_cast<std::size_t>(r.k)) ch.positions.resize(r.k + 1, Vec3::Zero());
      ch.positions[r.k][r.n] = r.re;
    } else {
      throw std::runtime_error("channels csv: unknown kind '" + r.kind + "'");
    }
  }
  return ch;
}

}  // namespace ecrs
