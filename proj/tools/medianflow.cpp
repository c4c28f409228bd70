// medianflow: command-line front end for runs, sweeps, median experiments,
// the chaos oracle and the invariant suite.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "medianflow/experiment.hpp"
#include "medianflow/fft.hpp"
#include "medianflow/verify.hpp"

using namespace medianflow;

namespace {

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string output_dir;
  int threads = 0;
};

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("MEDIANFLOW_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

ExperimentConfig prepare(const Common& c, const std::string& kind) {
  auto cfg = load_config(c.config_path);
  if (c.seed_set) cfg.noise.seed = c.seed;
  if (!c.output_dir.empty()) cfg.experiment.output_dir = c.output_dir;
  cfg.experiment.kind = kind;
  validate(cfg);
  std::filesystem::create_directories(cfg.experiment.output_dir);
  return cfg;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("config", c.config_path, "configuration file (section.key = value)")->required()->check(CLI::ExistingFile);
  app->add_option_function<std::uint64_t>(
      "--seed", [&c](std::uint64_t s) { c.seed = s, c.seed_set = true; }, "override noise.seed");
  app->add_option("--output-dir", c.output_dir, "override experiment.output_dir");
  app->add_option("--threads", c.threads, "ensemble width (default MEDIANFLOW_THREADS or 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medianflow: passive scalars and linearised Navier-Stokes in stochastic 2D flow"};
  app.require_subcommand(1);

  Common run_c, sweep_c, median_c, chaos_c;
  std::string checkpoint;
  bool resume = false;
  auto* run_cmd = app.add_subcommand("run", "single runs (one per ensemble member)");
  add_common(run_cmd, run_c);
  run_cmd->add_option("--checkpoint", checkpoint, "checkpoint file (single-member runs)");
  run_cmd->add_flag("--resume", resume, "continue from --checkpoint");
  auto* sweep_cmd = app.add_subcommand("sweep", "kappa sweep with log-log fits");
  add_common(sweep_cmd, sweep_c);
  auto* median_cmd = app.add_subcommand("median", "stopping-time experiments for each M0");
  add_common(median_cmd, median_c);
  auto* chaos_cmd = app.add_subcommand("chaos", "first-chaos variance table");
  add_common(chaos_cmd, chaos_c);
  app.add_subcommand("verify", "invariant suite at pinned seeds");

  CLI11_PARSE(app, argc, argv);
  keep_buffers_on_heap();

  try {
    if (run_cmd->parsed()) {
      auto cfg = prepare(run_c, "run");
      const auto seeds = ensemble_seeds(cfg);
      if (!checkpoint.empty() && seeds.size() != 1) throw std::invalid_argument("--checkpoint needs ensemble_size = 1");
      if (resume && checkpoint.empty()) throw std::invalid_argument("--resume needs --checkpoint");
      std::vector<RunRecord> recs(seeds.size());
      parallel_for(int(seeds.size()), resolve_threads(run_c.threads), [&](int i) {
        RunOptions o;
        const std::string stem = cfg.experiment.output_dir + "/";
        const std::string tag = std::to_string(seeds[std::size_t(i)]);
        o.csv_path = stem + "timeseries_" + tag + ".csv";
        o.checkpoint_path = checkpoint;
        o.resume = resume;
        o.snapshot_dir = cfg.experiment.output_dir + "/snapshots";
        recs[std::size_t(i)] = run(cfg, seeds[std::size_t(i)], o);
        write_text(stem + "record_" + tag + ".json", record_json(recs[std::size_t(i)]));
      });
      for (const auto& r : recs)
        std::cout << "seed " << r.seed << ": lambda_hat = " << r.lambda_hat << " +- " << r.lambda_se
                  << ", FK residual/T = " << r.fk_residual / std::max(r.t_scalar, 1e-300) << "\n";
    } else if (sweep_cmd->parsed()) {
      auto cfg = prepare(sweep_c, "sweep");
      auto s = sweep(cfg, resolve_threads(sweep_c.threads));
      write_sweep_csv(s, cfg.experiment.output_dir + "/sweep.csv");
      write_text(cfg.experiment.output_dir + "/sweep_summary.json", sweep_summary_json(s, cfg));
      for (const auto& r : s.rows) std::cout << "kappa " << r.kappa << ": lambda_hat = " << r.lambda_hat << "\n";
    } else if (median_cmd->parsed()) {
      auto cfg = prepare(median_c, "median");
      auto s = median_experiment(cfg, resolve_threads(median_c.threads));
      write_text(cfg.experiment.output_dir + "/median_summary.json", median_summary_json(s, cfg));
      for (const auto& m : s)
        std::cout << "M0 " << m.M0 << ": P(tau <= t_star) = " << m.hit_probability.estimate << " ["
                  << m.hit_probability.lower << ", " << m.hit_probability.upper << "], mean median at horizon "
                  << m.median_at_horizon.mean << ", max eta " << m.eta_max << " (cap " << m.eta_cap << ")\n";
    } else if (chaos_cmd->parsed()) {
      auto cfg = prepare(chaos_c, "chaos");
      auto rows = chaos_table(cfg);
      write_chaos_csv(rows, cfg.experiment.output_dir + "/chaos.csv");
      for (const auto& r : rows)
        if (r.ell == "total")
          std::cout << r.op << " kappa " << r.kappa << " M " << r.M << ": closed " << r.var_closed << ", mc "
                    << r.var_mc << " +- " << r.mc_stderr << ", ratio " << r.ratio_lower_bound << "\n";
    } else {
      bool ok = true;
      for (const auto& c : run_verify()) {
        std::cout << format_check(c) << "\n";
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
