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

#include "ecrs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "ecrs/baselines.hpp"
#include "ecrs/chanest.hpp"
#include "ecrs/decrs.hpp"

namespace ecrs {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::RateVsK, "rate_vs_K"},
    {ExperimentKind::DerNmseVsNp, "der_nmse_vs_Np"},
    {ExperimentKind::DerNmseVsPower, "der_nmse_vs_power"},
    {ExperimentKind::RateVsKLowPower, "rate_vs_K_low_power"},
    {ExperimentKind::RateVsKImperfectCsi, "rate_vs_K_imperfect_csi"},
    {ExperimentKind::LemmaCheck, "lemma_check"},
};

constexpr std::pair<Scheme, const char*> kSchemeNames[] = {
    {Scheme::IeCRS, "IeCRS"}, {Scheme::LOW, "LOW"},         {Scheme::DeCRS, "DeCRS"},
    {Scheme::IC_NOMA, "IC-NOMA"}, {Scheme::DC_NOMA, "DC-NOMA"}, {Scheme::ST, "ST"},
};

const std::vector<Scheme> kAllSchemes = {Scheme::IeCRS, Scheme::LOW,     Scheme::DeCRS,
                                         Scheme::IC_NOMA, Scheme::DC_NOMA, Scheme::ST};

bool is_rate_kind(ExperimentKind k) {
  return k == ExperimentKind::RateVsK || k == ExperimentKind::RateVsKLowPower ||
         k == ExperimentKind::RateVsKImperfectCsi;
}

bool is_estimation_kind(ExperimentKind k) {
  return k == ExperimentKind::DerNmseVsNp || k == ExperimentKind::DerNmseVsPower;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One value per (series) for a single work item; NaN marks a failure.
struct ItemValues {
  std::vector<double> v;
};

struct Series {
  std::string scheme;
  std::string metric;
};

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  unsigned n = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, count)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  if (n <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

SceneConfig point_config(const Experiment& e, double x) {
  SceneConfig cfg = e.base;
  if (is_rate_kind(e.kind)) cfg.num_mues = static_cast<int>(std::lround(x));
  return cfg;
}

// Min-rates of the requested schemes on `truth`, with designs computed from
// `design` (the same channels under perfect CSI). Shares the first phase
// between IeCRS, LOW and ST and the second phase between IeCRS and IC-NOMA.
std::vector<double> scheme_rates(const Channels& truth, const Channels& design, const SceneConfig& cfg,
                                 const std::vector<Scheme>& schemes, Phase2Method phase2) {
  std::vector<double> out(schemes.size(), kNaN);
  const int n_c = cfg.num_subcarriers;
  const RVec p_k = mue_powers(cfg);
  const double p_ap = cfg.ap_power_watt();
  std::optional<Phase1Result> p1;
  std::optional<Phase1Result> p1_pinned;
  std::optional<Phase2Result> p2;
  auto first = [&]() -> const Phase1Result& {
    if (!p1) p1 = solve_phase1(design.H, p_ap);
    return *p1;
  };
  auto first_pinned = [&]() -> const Phase1Result& {
    if (!p1_pinned) {
      AoOptions o;
      o.pin_private_common = true;
      p1_pinned = solve_phase1(design.H, p_ap, o);
    }
    return *p1_pinned;
  };
  auto second = [&]() -> const Phase2Result& {
    if (!p2) {
      p2 = resolve_phase2(phase2, n_c) == Phase2Method::Low
               ? solve_phase2_low(design.g, design.tau, p_k, n_c)
               : solve_phase2_sca(design.g, design.tau, p_k, n_c);
    }
    return *p2;
  };
  auto iecrs_eval = [&](const Phase1Result& a, const Phase2Result& b, const Channels& t) {
    IecrsPrecoders prec{a.F, a.c, b.g_bar};
    return evaluate_iecrs(prec, design.g, t, n_c).min_rate;
  };
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    try {
      switch (schemes[i]) {
        case Scheme::IeCRS: out[i] = iecrs_eval(first(), second(), truth); break;
        case Scheme::LOW:
          out[i] = iecrs_eval(first(), solve_phase2_low(design.g, design.tau, p_k, n_c), truth);
          break;
        case Scheme::IC_NOMA: out[i] = iecrs_eval(first_pinned(), second(), truth); break;
        case Scheme::ST: {
          Channels aligned = truth;
          std::fill(aligned.tau.begin(), aligned.tau.end(), 0);
          out[i] = iecrs_eval(first(), solve_phase2_st(design.g, p_k), aligned);
          break;
        }
        case Scheme::DeCRS:
        case Scheme::DC_NOMA: {
          DecrsOptions o;
          o.ao.pin_private_common = schemes[i] == Scheme::DC_NOMA;
          const DecrsSolution s = solve_decrs(design.H, design.g, p_ap, p_k, o);
          out[i] = evaluate_decrs(s.precoders, design.g, truth).min_rate;
          break;
        }
      }
    } catch (const std::exception&) {
      out[i] = kNaN;
    }
  }
  return out;
}

PilotConfig pilot_config(const Experiment& e, const SceneConfig& cfg, double x) {
  int n_p = e.pilot_length;
  double power = e.pilot_power_dbm.value_or(cfg.mue_power_dbm);
  if (e.kind == ExperimentKind::DerNmseVsNp) n_p = static_cast<int>(std::lround(x));
  if (e.kind == ExperimentKind::DerNmseVsPower) power = x;
  return make_pilot_config(n_p, cfg.num_mues, power, max_delay_taps(cfg));
}

std::vector<Series> series_for(const Experiment& e) {
  std::vector<Series> s;
  if (e.kind == ExperimentKind::LemmaCheck) {
    s.push_back({"omega", "max_dev"});
  } else if (is_estimation_kind(e.kind)) {
    s.push_back({"MP-LS", "DER"});
    s.push_back({"MP-LS", "NMSE"});
  } else if (e.kind == ExperimentKind::RateVsKImperfectCsi) {
    for (Scheme sc : e.schemes) {
      s.push_back({to_string(sc), "min_rate_perfect"});
      s.push_back({to_string(sc), "min_rate_imperfect"});
      s.push_back({to_string(sc), "gap"});
    }
  } else {
    for (Scheme sc : e.schemes) s.push_back({to_string(sc), "min_rate"});
  }
  return s;
}

ItemValues run_item(const Experiment& e, double x, std::uint64_t scene_seed, std::uint64_t noise_seed) {
  ItemValues out;
  const SceneConfig cfg = point_config(e, x);
  if (e.kind == ExperimentKind::LemmaCheck) {
    const int n_c = static_cast<int>(std::lround(x));
    std::mt19937_64 rng(scene_seed);
    const int K = std::uniform_int_distribution<int>(1, std::min(8, n_c))(rng);
    std::vector<int> residues(n_c);
    std::iota(residues.begin(), residues.end(), 0);
    std::shuffle(residues.begin(), residues.end(), rng);
    Delays tau(K);
    for (int k = 0; k < K; ++k) tau[k] = residues[k] + n_c * std::uniform_int_distribution<int>(0, 1)(rng);
    const CMat omega = omega_matrix(tau, n_c);
    const CMat ref = CMat::Identity(K, K) * static_cast<double>(n_c);
    out.v.push_back((omega - ref).cwiseAbs().maxCoeff());
    return out;
  }
  const Channels truth = sample_scene(cfg, scene_seed);
  if (is_estimation_kind(e.kind)) {
    const PilotConfig pc = pilot_config(e, cfg, x);
    const EstimationResult est =
        estimate_channel(truth, pc, e.noiseless_pilots ? std::nullopt : std::optional<std::uint64_t>(noise_seed));
    out.v = {est.der, est.nmse};
    return out;
  }
  if (e.kind == ExperimentKind::RateVsKImperfectCsi) {
    const PilotConfig pc = pilot_config(e, cfg, x);
    const EstimationResult est =
        estimate_channel(truth, pc, e.noiseless_pilots ? std::nullopt : std::optional<std::uint64_t>(noise_seed));
    const Channels estimated = with_estimates(truth, est);
    const std::vector<double> perfect = scheme_rates(truth, truth, cfg, e.schemes, e.phase2);
    const std::vector<double> imperfect = scheme_rates(truth, estimated, cfg, e.schemes, e.phase2);
    for (std::size_t i = 0; i < e.schemes.size(); ++i) {
      out.v.push_back(perfect[i]);
      out.v.push_back(imperfect[i]);
      out.v.push_back(perfect[i] - imperfect[i]);
    }
    return out;
  }
  out.v = scheme_rates(truth, truth, cfg, e.schemes, e.phase2);
  return out;
}

ExperimentResult run_grid(const Experiment& e) {
  validate(e);
  const std::vector<Series> series = series_for(e);
  const std::size_t points = e.grid.size();
  const std::size_t scenes = static_cast<std::size_t>(e.scenes);
  std::vector<ItemValues> items(points * scenes);
  parallel_for(items.size(), e.threads, [&](std::size_t idx) {
    const std::size_t p = idx / scenes;
    const std::size_t s = idx % scenes;
    ItemValues v;
    try {
      // Seeds ignore the grid point: every point sees the same scenes and
      // noise, so differences along the grid are paired.
      v = run_item(e, e.grid[p], derive_seed(e.master_seed, s, 0), derive_seed(e.master_seed, s, 1));
    } catch (const std::exception&) {
      v.v.clear();
    }
    if (v.v.size() != series.size()) v.v.assign(series.size(), kNaN);
    items[idx] = std::move(v);
  });

  ExperimentResult result;
  result.config_hash = fnv1a(experiment_to_json(e));
  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t j = 0; j < series.size(); ++j) {
      ResultRow row;
      row.x = e.grid[p];
      row.scheme = series[j].scheme;
      row.metric = series[j].metric;
      double sum = 0.0;
      double sum_sq = 0.0;
      for (std::size_t s = 0; s < scenes; ++s) {
        const double val = items[p * scenes + s].v[j];
        if (std::isnan(val)) {
          ++row.failed;
          continue;
        }
        ++row.scenes;
        sum += val;
        sum_sq += val * val;
      }
      if (row.scenes > 0) {
        row.mean = sum / row.scenes;
        if (row.scenes > 1) {
          const double var = std::max(0.0, (sum_sq - row.scenes * row.mean * row.mean) / (row.scenes - 1));
          row.stderr_ = std::sqrt(var / row.scenes);
        }
      } else {
        row.mean = kNaN;
      }
      result.rows.push_back(row);
    }
    if (e.kind == ExperimentKind::LemmaCheck) {
      ResultRow worst;
      worst.x = e.grid[p];
      worst.scheme = "omega";
      worst.metric = "max_dev_worst";
      for (std::size_t s = 0; s < scenes; ++s) {
        const double val = items[p * scenes + s].v[0];
        if (std::isnan(val)) {
          ++worst.failed;
        } else {
          ++worst.scenes;
          worst.mean = std::max(worst.mean, val);
        }
      }
      result.rows.push_back(worst);
    }
  }
  return result;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json scene_json(const SceneConfig& c) {
  json j;
  j["n_v"] = c.n_v;
  j["n_h"] = c.n_h;
  j["num_mues"] = c.num_mues;
  j["carrier_hz"] = c.carrier_hz;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["sampling_hz"] = c.sampling_hz;
  j["noise_dbm_per_hz"] = c.noise_dbm_per_hz;
  j["ap_power_dbm"] = c.ap_power_dbm;
  j["mue_power_dbm"] = c.mue_power_dbm;
  j["pathloss_exponent"] = c.pathloss_exponent;
  j["beta0_db"] = c.beta0_db ? json(*c.beta0_db) : json(nullptr);
  j["num_subcarriers"] = c.num_subcarriers;
  j["cp_len"] = c.cp_len ? json(*c.cp_len) : json(nullptr);
  j["ap_pos"] = vec3_json(c.ap_pos);
  j["due_pos"] = vec3_json(c.due_pos);
  j["mue_box_lo"] = vec3_json(c.mue_box_lo);
  j["mue_box_hi"] = vec3_json(c.mue_box_hi);
  j["rng_seed"] = c.rng_seed;
  return j;
}

void apply_scene_json(const json& j, SceneConfig& c) {
  if (!j.is_object()) throw std::invalid_argument("scene config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "n_v") c.n_v = v.get<int>();
    else if (k == "n_h") c.n_h = v.get<int>();
    else if (k == "num_mues") c.num_mues = v.get<int>();
    else if (k == "carrier_hz") c.carrier_hz = v.get<double>();
    else if (k == "bandwidth_hz") c.bandwidth_hz = v.get<double>();
    else if (k == "sampling_hz") c.sampling_hz = v.get<double>();
    else if (k == "noise_dbm_per_hz") c.noise_dbm_per_hz = v.get<double>();
    else if (k == "ap_power_dbm") c.ap_power_dbm = v.get<double>();
    else if (k == "mue_power_dbm") c.mue_power_dbm = v.get<double>();
    else if (k == "pathloss_exponent") c.pathloss_exponent = v.get<double>();
    else if (k == "beta0_db") c.beta0_db = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    else if (k == "num_subcarriers") c.num_subcarriers = v.get<int>();
    else if (k == "cp_len") c.cp_len = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
    else if (k == "ap_pos") c.ap_pos = vec3_from(v);
    else if (k == "due_pos") c.due_pos = vec3_from(v);
    else if (k == "mue_box_lo") c.mue_box_lo = vec3_from(v);
    else if (k == "mue_box_hi") c.mue_box_hi = vec3_from(v);
    else if (k == "rng_seed") c.rng_seed = v.get<std::uint64_t>();
    else throw std::invalid_argument("unknown scene config key '" + k + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

const char* to_string(Scheme s) {
  for (const auto& [scheme, name] : kSchemeNames) {
    if (scheme == s) return name;
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (const auto& [kind, name] : kKindNames) {
    if (s == name) return kind;
  }
  throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

Scheme parse_scheme(const std::string& s) {
  for (const auto& [scheme, name] : kSchemeNames) {
    if (s == name) return scheme;
  }
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

Phase2Method parse_phase2(const std::string& s) {
  if (s == "auto") return Phase2Method::Auto;
  if (s == "sca") return Phase2Method::Sca;
  if (s == "low") return Phase2Method::Low;
  throw std::invalid_argument("unknown second-phase method '" + s + "'");
}

Experiment default_experiment(ExperimentKind kind) {
  Experiment e;
  e.kind = kind;
  switch (kind) {
    case ExperimentKind::RateVsK:
      e.grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      e.schemes = kAllSchemes;
      e.base.n_v = 4;
      e.base.n_h = 8;
      break;
    case ExperimentKind::RateVsKLowPower:
      e.grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      e.schemes = kAllSchemes;
      e.base.ap_power_dbm = -10.0;
      e.base.mue_power_dbm = -10.0;
      break;
    case ExperimentKind::RateVsKImperfectCsi:
      e.grid = {2, 4, 6, 8, 10};
      e.schemes = {Scheme::IeCRS, Scheme::DeCRS};
      e.pilot_length = 500;
      break;
    case ExperimentKind::DerNmseVsNp:
      e.grid = {50, 100, 200, 400};
      e.pilot_power_dbm = 0.0;
      break;
    case ExperimentKind::DerNmseVsPower:
      e.grid = {-20, -10, 0, 10};
      break;
    case ExperimentKind::LemmaCheck:
      e.grid = {16, 64, 256};
      break;
  }
  return e;
}

void validate(const Experiment& e) {
  validate(e.base);
  if (e.grid.empty()) throw std::invalid_argument("experiment grid is empty");
  if (e.scenes < 1) throw std::invalid_argument("scenes per point must be at least 1");
  if (is_rate_kind(e.kind)) {
    if (e.schemes.empty()) throw std::invalid_argument("no schemes selected");
    for (double x : e.grid) {
      if (x < 1 || x != std::round(x)) throw std::invalid_argument("K grid values must be positive integers");
    }
  } else if (!e.schemes.empty()) {
    throw std::invalid_argument(std::string("schemes do not apply to ") + to_string(e.kind));
  }
  if (e.kind == ExperimentKind::DerNmseVsNp || e.kind == ExperimentKind::LemmaCheck) {
    for (double x : e.grid) {
      if (x < 1 || x != std::round(x)) throw std::invalid_argument("grid values must be positive integers");
    }
  }
}

int ExperimentResult::failed_rows() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.failed > 0; }));
}

const ResultRow* ExperimentResult::find(double x, const std::string& scheme, const std::string& metric) const {
  for (const ResultRow& r : rows) {
    if (r.x == x && r.scheme == scheme && r.metric == metric) return &r;
  }
  return nullptr;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

ExperimentResult run(const Experiment& e) {
  if (e.kind == ExperimentKind::RateVsKImperfectCsi) {
    throw std::invalid_argument("use run_imperfect_csi for rate_vs_K_imperfect_csi");
  }
  return run_grid(e);
}

ExperimentResult run_imperfect_csi(const Experiment& e) {
  if (e.kind != ExperimentKind::RateVsKImperfectCsi) {
    throw std::invalid_argument("run_imperfect_csi needs kind rate_vs_K_imperfect_csi");
  }
  return run_grid(e);
}

ExperimentResult run_any(const Experiment& e) {
  return e.kind == ExperimentKind::RateVsKImperfectCsi ? run_imperfect_csi(e) : run(e);
}

void write_csv(std::ostream& os, const Experiment& e, const ExperimentResult& r) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.config_hash));
  os << "# ecrs " << kVersion << '\n';
  os << "# kind: " << to_string(e.kind) << '\n';
  os << "# master_seed: " << e.master_seed << '\n';
  os << "# config_hash: " << hash << '\n';
  os << "# scenes_per_point: " << e.scenes << '\n';
  os << "# columns: x = grid value; mean and stderr over successful scenes; failed = scenes that threw\n";
  os << "x,scheme,metric,mean,stderr,scenes,failed\n";
  for (const ResultRow& row : r.rows) {
    os << format_double(row.x) << ',' << row.scheme << ',' << row.metric << ',' << format_double(row.mean) << ','
       << format_double(row.stderr_) << ',' << row.scenes << ',' << row.failed << '\n';
  }
}

void write_csv_file(const Experiment& e, const ExperimentResult& r) {
  if (e.output.empty()) return;
  std::ofstream out(e.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + e.output);
  write_csv(out, e, r);
}

std::string scene_config_to_json(const SceneConfig& c) { return scene_json(c).dump(2); }

SceneConfig scene_config_from_json(const std::string& text) {
  SceneConfig c;
  apply_scene_json(json::parse(text), c);
  validate(c);
  return c;
}

std::string experiment_to_json(const Experiment& e) {
  json j;
  j["kind"] = to_string(e.kind);
  j["grid"] = e.grid;
  j["scenes"] = e.scenes;
  json schemes = json::array();
  for (Scheme s : e.schemes) schemes.push_back(to_string(s));
  j["schemes"] = schemes;
  j["base"] = scene_json(e.base);
  j["master_seed"] = e.master_seed;
  j["phase2"] = to_string(e.phase2);
  j["pilot_length"] = e.pilot_length;
  j["pilot_power_dbm"] = e.pilot_power_dbm ? json(*e.pilot_power_dbm) : json(nullptr);
  j["noiseless_pilots"] = e.noiseless_pilots;
  return j.dump(2);
}

Experiment experiment_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("experiment needs a 'kind'");
  Experiment e = default_experiment(parse_experiment_kind(j.at("kind").get<std::string>()));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "kind") continue;
    if (k == "grid") e.grid = v.get<std::vector<double>>();
    else if (k == "scenes") e.scenes = v.get<int>();
    else if (k == "schemes") {
      e.schemes.clear();
      for (const auto& s : v) e.schemes.push_back(parse_scheme(s.get<std::string>()));
    } else if (k == "base") apply_scene_json(v, e.base);
    else if (k == "output") e.output = v.get<std::string>();
    else if (k == "master_seed") e.master_seed = v.get<std::uint64_t>();
    else if (k == "threads") e.threads = v.get<int>();
    else if (k == "phase2") e.phase2 = parse_phase2(v.get<std::string>());
    else if (k == "pilot_length") e.pilot_length = v.get<int>();
    else if (k == "pilot_power_dbm") e.pilot_power_dbm = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    else if (k == "noiseless_pilots") e.noiseless_pilots = v.get<bool>();
    else throw std::invalid_argument("unknown experiment key '" + k + "'");
  }
  validate(e);
  return e;
}

SceneConfig load_scene_config(const std::string& path) { return scene_config_from_json(read_file(path)); }

Experiment load_experiment(const std::string& path) { return experiment_from_json(read_file(path)); }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ecrs
