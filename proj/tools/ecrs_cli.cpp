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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecrs/baselines.hpp"
#include "ecrs/chanest.hpp"
#include "ecrs/decrs.hpp"
#include "ecrs/harness.hpp"

namespace {

using namespace ecrs;

struct SweepArgs {
  std::string experiment_path;
  std::string kind;
  std::vector<double> grid;
  int scenes = 0;
  std::vector<std::string> schemes;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
  std::string phase2;
  int pilot_length = 0;
  bool noiseless = false;
};

void add_sweep_options(CLI::App* app, SweepArgs& a) {
  app->add_option("--experiment", a.experiment_path, "Experiment JSON file");
  app->add_option("--kind", a.kind, "Experiment kind (overrides the file)");
  app->add_option("--grid", a.grid, "Grid values")->delimiter(',');
  app->add_option("--scenes", a.scenes, "Scenes per grid point");
  app->add_option("--schemes", a.schemes, "Schemes: IeCRS,LOW,DeCRS,IC-NOMA,DC-NOMA,ST")->delimiter(',');
  app->add_option("--config", a.config_path, "Scene config JSON applied as the base");
  app->add_option("--seed", a.seed, "Master seed");
  app->add_option("--out", a.out, "CSV output path (stdout when empty)");
  app->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
  app->add_option("--phase2", a.phase2, "IeCRS second phase: auto, sca or low");
  app->add_option("--pilot-length", a.pilot_length, "Pilot length N_p");
  app->add_flag("--noiseless-pilots", a.noiseless, "Disable pilot noise");
}

Experiment build_experiment(const SweepArgs& a, ExperimentKind fallback) {
  Experiment e = a.experiment_path.empty() ? default_experiment(fallback) : load_experiment(a.experiment_path);
  if (!a.kind.empty()) {
    const ExperimentKind k = parse_experiment_kind(a.kind);
    if (k != e.kind) {
      const Experiment d = default_experiment(k);
      e.kind = k;
      e.grid = d.grid;
      e.schemes = d.schemes;
      e.base = d.base;
      e.pilot_length = d.pilot_length;
      e.pilot_power_dbm = d.pilot_power_dbm;
    }
  }
  if (!a.config_path.empty()) e.base = load_scene_config(a.config_path);
  if (!a.grid.empty()) e.grid = a.grid;
  if (a.scenes > 0) e.scenes = a.scenes;
  if (!a.schemes.empty()) {
    e.schemes.clear();
    for (const auto& s : a.schemes) e.schemes.push_back(parse_scheme(s));
  }
  if (a.seed) e.master_seed = *a.seed;
  if (!a.out.empty()) e.output = a.out;
  if (a.threads > 0) e.threads = a.threads;
  if (!a.phase2.empty()) e.phase2 = parse_phase2(a.phase2);
  if (a.pilot_length > 0) e.pilot_length = a.pilot_length;
  if (a.noiseless) e.noiseless_pilots = true;
  validate(e);
  return e;
}

int run_sweep(const Experiment& e) {
  const ExperimentResult r = run_any(e);
  if (e.output.empty()) {
    write_csv(std::cout, e, r);
  } else {
    write_csv_file(e, r);
    std::cerr << "wrote " << r.rows.size() << " rows to " << e.output << '\n';
  }
  const int failed = r.failed_rows();
  if (failed > 0) std::cerr << failed << " rows had failed scenes\n";
  return failed > 0 ? 1 : 0;
}

SceneConfig scene_from(const std::string& path) {
  return path.empty() ? SceneConfig{} : load_scene_config(path);
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative rate-splitting simulator for two-phase THz downlinks"};
  app.require_subcommand(1);

  SweepArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte Carlo sweep and write CSV");
  add_sweep_options(simulate, sim);

  SweepArgs est_sweep;
  std::uint64_t est_seed = 1;
  std::optional<std::uint64_t> noise_seed;
  int est_np = 101;
  std::optional<double> est_power;
  std::string pilots_csv, profiles_csv;
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate delays and gains for one scene, or sweep with --kind");
  add_sweep_options(estimate, est_sweep);
  estimate->add_option("--scene-seed", est_seed, "Scene seed for the single-scene mode");
  estimate->add_option("--noise-seed", noise_seed, "Pilot noise seed (default: scene seed + 1)");
  estimate->add_option("--np", est_np, "Pilot length for the single-scene mode");
  estimate->add_option("--power", est_power, "Pilot power in dBm (default: mUE power)");
  estimate->add_option("--pilots-csv", pilots_csv, "Write the pilot matrix");
  estimate->add_option("--profiles-csv", profiles_csv, "Write the projection profiles");

  int lemma_vectors = 100;
  std::vector<double> lemma_nc{16, 64, 256};
  std::uint64_t lemma_seed = 1;
  double lemma_tol = 1e-9;
  std::string lemma_out;
  CLI::App* lemma = app.add_subcommand("lemma-check", "Check Omega = N_c I over random distinct delays");
  lemma->add_option("--vectors", lemma_vectors, "Random delay vectors per N_c");
  lemma->add_option("--nc", lemma_nc, "Subcarrier counts")->delimiter(',');
  lemma->add_option("--seed", lemma_seed, "Master seed");
  lemma->add_option("--tol", lemma_tol, "Largest allowed entrywise deviation");
  lemma->add_option("--out", lemma_out, "CSV output path");

  std::string audit_config, audit_scheme = "DeCRS", channels_csv, trace_csv, report_csv;
  std::uint64_t audit_seed = 1;
  std::optional<int> audit_k;
  CLI::App* audit = app.add_subcommand("audit", "Solve one scene and recompute every rate from scratch");
  audit->add_option("--config", audit_config, "Scene config JSON");
  audit->add_option("--seed", audit_seed, "Scene seed");
  audit->add_option("--mues", audit_k, "Override the number of mUEs");
  audit->add_option("--scheme", audit_scheme, "DeCRS, DC-NOMA, IeCRS or IC-NOMA");
  audit->add_option("--channels-csv", channels_csv, "Write the channels");
  audit->add_option("--trace-csv", trace_csv, "Write the t0 convergence trace");
  audit->add_option("--report-csv", report_csv, "Write the rate report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_sweep(build_experiment(sim, ExperimentKind::RateVsK));

    if (*estimate) {
      if (!est_sweep.kind.empty() || !est_sweep.experiment_path.empty()) {
        return run_sweep(build_experiment(est_sweep, ExperimentKind::DerNmseVsNp));
      }
      const SceneConfig cfg = scene_from(est_sweep.config_path);
      const Channels truth = sample_scene(cfg, est_seed);
      const PilotConfig pc =
          make_pilot_config(est_np, cfg.num_mues, est_power.value_or(cfg.mue_power_dbm), max_delay_taps(cfg));
      std::optional<std::uint64_t> ns = est_sweep.noiseless ? std::nullopt
                                                            : std::optional<std::uint64_t>(noise_seed.value_or(est_seed + 1));
      const EstimationResult r = estimate_channel(truth, pc, ns);
      std::printf("k,tau,tau_hat,g_abs,g_hat_abs\n");
      for (int k = 0; k < cfg.num_mues; ++k) {
        std::printf("%d,%d,%d,%.6g,%.6g\n", k + 1, truth.tau[k], r.tau_hat[k], std::abs(truth.g(k)),
                    std::abs(r.g_hat(k)));
      }
      std::printf("# DER %.6g NMSE %.6g%s\n", r.der, r.nmse, r.rank_deficient ? " (rank-deficient LS)" : "");
      write_file(pilots_csv, [&](std::ostream& os) { write_pilots_csv(os, gen_pilots(pc)); });
      write_file(profiles_csv, [&](std::ostream& os) { write_profiles_csv(os, r.profiles); });
      return 0;
    }

    if (*lemma) {
      Experiment e = default_experiment(ExperimentKind::LemmaCheck);
      e.grid = lemma_nc;
      e.scenes = lemma_vectors;
      e.master_seed = lemma_seed;
      e.output = lemma_out;
      const ExperimentResult r = run(e);
      write_csv_file(e, r);
      double worst = 0.0;
      for (const ResultRow& row : r.rows) {
        if (row.metric == "max_dev_worst") {
          std::printf("N_c=%g worst |Omega - N_c I| = %.3g\n", row.x, row.mean);
          worst = std::max(worst, row.mean);
        }
      }
      const bool ok = worst <= lemma_tol && r.failed_rows() == 0;
      std::printf("%s\n", ok ? "PASS" : "FAIL");
      return ok ? 0 : 1;
    }

    if (*audit) {
      SceneConfig cfg = scene_from(audit_config);
      if (audit_k) cfg.num_mues = *audit_k;
      validate(cfg);
      const Channels ch = sample_scene(cfg, audit_seed);
      write_file(channels_csv, [&](std::ostream& os) { write_channels_csv(os, ch); });
      const Scheme scheme = parse_scheme(audit_scheme);
      bool ok = true;
      if (scheme == Scheme::DeCRS || scheme == Scheme::DC_NOMA) {
        const DecrsSolution s = scheme == Scheme::DeCRS ? solve_decrs(ch, cfg) : solve_dc_noma(ch, cfg);
        const DecrsAudit a = decrs_rate_audit(s.precoders, s.t0, ch, cfg.ap_power_watt(), mue_powers(cfg));
        std::printf("min_rate %.9g  -t0 %.9g  gap %.3g  iterations %d\n", a.report.min_rate, -s.t0, a.t0_gap,
                    s.iterations);
        for (const auto& issue : a.issues) std::printf("issue: %s\n", issue.c_str());
        ok = a.passed;
        write_file(trace_csv, [&](std::ostream& os) { write_trace_csv(os, s.t0_trace, s.wall_seconds, "t0"); });
        write_file(report_csv, [&](std::ostream& os) {
          write_rate_report_csv_header(os);
          write_rate_report_csv_row(os, audit_scheme, a.report);
        });
      } else if (scheme == Scheme::IeCRS || scheme == Scheme::IC_NOMA) {
        const IecrsSolution s = scheme == Scheme::IeCRS ? solve_iecrs(ch, cfg) : solve_ic_noma(ch, cfg);
        const RateReport rep = combine_rates_iecrs(s.precoders.c, iecrs_rates(ch.H, s.precoders.F),
                                                   rate_phase2_iecrs(s.precoders.g_bar, ch.tau, cfg.num_subcarriers));
        const double first_phase = std::min(rep.mue.minCoeff(), rep.due_common(0));
        const double gap = std::abs(-s.phase1.t0 - first_phase);
        std::printf("min_rate %.9g  first-phase min %.9g  -t0 %.9g  gap %.3g  wasted C_d %.6g\n", rep.min_rate,
                    first_phase, -s.phase1.t0, gap, rep.wasted_common);
        for (const auto& v : rep.violations) std::printf("issue: %s\n", v.c_str());
        const double excess = s.precoders.F.squaredNorm() - cfg.ap_power_watt();
        if (excess > 1e-8 * std::max(1.0, cfg.ap_power_watt())) {
          std::printf("issue: AP power budget exceeded\n");
          ok = false;
        }
        ok = ok && rep.consistent() && gap <= 1e-6;
        write_file(trace_csv,
                   [&](std::ostream& os) { write_trace_csv(os, s.phase1.t0_trace, s.phase1.wall_seconds, "t0"); });
        write_file(report_csv, [&](std::ostream& os) {
          write_rate_report_csv_header(os);
          write_rate_report_csv_row(os, audit_scheme, rep);
        });
      } else {
        throw std::invalid_argument("audit supports DeCRS, DC-NOMA, IeCRS and IC-NOMA");
      }
      std::printf("%s\n", ok ? "PASS" : "FAIL");
      return ok ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
