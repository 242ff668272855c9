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
#include <vector>

#include "ecrs/iecrs.hpp"
#include "ecrs/scene.hpp"

namespace ecrs {

enum class ExperimentKind {
  RateVsK,
  DerNmseVsNp,
  DerNmseVsPower,
  RateVsKLowPower,
  RateVsKImperfectCsi,
  LemmaCheck,
};

enum class Scheme { IeCRS, LOW, DeCRS, IC_NOMA, DC_NOMA, ST };

const char* to_string(ExperimentKind k);
const char* to_string(Scheme s);
ExperimentKind parse_experiment_kind(const std::string& s);
Scheme parse_scheme(const std::string& s);
Phase2Method parse_phase2(const std::string& s);

struct Experiment {
  ExperimentKind kind = ExperimentKind::RateVsK;
  /// K values, pilot lengths, pilot powers (dBm) or subcarrier counts,
  /// depending on the kind.
  std::vector<double> grid;
  int scenes = 100;
  std::vector<Scheme> schemes;
  SceneConfig base;
  std::string output;  ///< CSV path; empty writes nowhere
  std::uint64_t master_seed = 1;
  int threads = 0;  ///< 0 = hardware concurrency
  Phase2Method phase2 = Phase2Method::Auto;
  int pilot_length = 100;
  std::optional<double> pilot_power_dbm;  ///< defaults to the mUE power
  bool noiseless_pilots = false;
};

/// Defaults for each kind: grids, antenna counts and powers of the standard
/// sweeps, 100 scenes per point.
Experiment default_experiment(ExperimentKind kind);

/// Throws std::invalid_argument on an empty grid, nonpositive scene count or
/// a scheme that does not fit the kind.
void validate(const Experiment& e);

struct ResultRow {
  double x = 0.0;
  std::string scheme;
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  int scenes = 0;  ///< successful scenes
  int failed = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::uint64_t config_hash = 0;

  int failed_rows() const;
  const ResultRow* find(double x, const std::string& scheme, const std::string& metric) const;
};

/// Deterministic child seed (splitmix64 over the inputs).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Runs every kind except RateVsKImperfectCsi (see run_imperfect_csi).
/// Scheme failures are counted per row; the run continues.
ExperimentResult run(const Experiment& e);

/// Estimates (tau, g) from pilots, optimizes on the estimates and evaluates on
/// the true channel; rows carry min_rate_perfect, min_rate_imperfect and gap.
ExperimentResult run_imperfect_csi(const Experiment& e);

/// Dispatches on the kind.
ExperimentResult run_any(const Experiment& e);

/// CSV with '#' metadata lines. Byte-identical for identical inputs.
void write_csv(std::ostream& os, const Experiment& e, const ExperimentResult& r);
/// Writes to e.output when set.
void write_csv_file(const Experiment& e, const ExperimentResult& r);

// JSON configuration. Keys mirror the struct field names.
std::string scene_config_to_json(const SceneConfig& c);
SceneConfig scene_config_from_json(const std::string& text);
std::string experiment_to_json(const Experiment& e);
Experiment experiment_from_json(const std::string& text);
SceneConfig load_scene_config(const std::string& path);
Experiment load_experiment(const std::string& path);

std::uint64_t fnv1a(const std::string& text);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ecrs
