#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medianflow/chaos.hpp"
#include "medianflow/config.hpp"
#include "medianflow/flow.hpp"
#include "medianflow/lyapunov.hpp"
#include "medianflow/scalar.hpp"
#include "medianflow/stats.hpp"

namespace medianflow {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kTimeseriesHeader = "# medianflow timeseries schema_version=1";
inline constexpr const char* kTimeseriesColumns =
    "t,log_amp,lambda_inst,fk_grad,fk_stretch,median,quantile2,filament,u_l2,u_h1";

/// Equal energy on every active mode with M0 - 1 < |k| <= M0, phases from `rng`,
/// unit norm. All energy sits in one shell, so the spectral median is M0.
SpectralField annulus_field(const WaveGrid& g, int M0, Rng& rng);
/// scalar.rho0: mode:<m> (cosine pair at (m, 0)), annulus:<M0>, file:<path>.
SpectralField initial_scalar(const ExperimentConfig& cfg, const WaveGrid& g, std::uint64_t seed);
/// flow.u0: zero, random:<decay> (unit-enstrophy random vorticity), file:<path>.
SpectralField initial_vorticity(const ExperimentConfig& cfg, const WaveGrid& g, std::uint64_t seed);

WaveGrid grid_from(const ExperimentConfig& cfg);

/// Flow and scalar advanced together on one time grid. The flow is burnt in
/// alone first; the scalar then starts from rho0 at scalar time 0.
class CoupledSimulation {
 public:
  CoupledSimulation(const ExperimentConfig& cfg, std::uint64_t seed, const SpectralField& rho0, double h);

  void burn_in(double t_burn);
  /// One coupled step of size h. Returns the scalar log increment.
  double step();

  const WaveGrid& grid() const { return grid_; }
  const FlowState& flow() const { return flow_; }
  const ScalarState& scalar() const { return scalar_; }
  const FlowSamples& samples() const { return now_; }
  const FKAccumulator& fk() const { return fk_; }
  double h() const { return h_; }
  long steps() const { return steps_; }
  Rng& rng() { return rng_; }

  /// Snapshot of everything needed to continue bit-for-bit.
  std::string save_state() const;
  void load_state(const std::string& json);

 private:
  WaveGrid grid_;
  NoiseModel model_;
  double h_;
  FlowStepper flow_stepper_;
  ScalarStepper scalar_stepper_;
  Rng rng_;
  FlowState flow_;
  ScalarState scalar_;
  FlowSamples now_;
  FKAccumulator fk_;
  long steps_ = 0;
  bool lns_;
};

struct RunOptions {
  std::string csv_path;         // time series (empty: none)
  std::string checkpoint_path;  // empty: no checkpoints
  bool resume = false;          // continue from checkpoint_path
  long stop_after_steps = -1;   // interrupt after this many coupled steps (checkpoint written)
  std::string snapshot_dir;     // MFLD snapshots when experiment.snapshot_every > 0
};

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  double kappa = 0.0;
  std::string op;
  double lambda_hat = 0.0;
  double lambda_se = 0.0;
  double fk_grad_mean = 0.0;     // int_grad / T
  double fk_stretch_mean = 0.0;  // int_stretch / T
  double fk_residual = 0.0;      // log_growth + int_grad + int_stretch
  double t_scalar = 0.0;
  long steps = 0;
  int final_median = 0;
  double mean_median = 0.0;
  double mean_filament = 0.0;
  double wall_seconds = 0.0;
  bool completed = false;
};

/// Single seeded run: burn-in, co-evolution, CSV rows every experiment.output_every steps.
RunRecord run(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opts = {});

/// Ensemble member seeds: seed_for(noise.seed, i).
std::vector<std::uint64_t> ensemble_seeds(const ExperimentConfig& cfg);

struct SweepRow {
  double kappa = 0.0;
  double lambda_hat = 0.0;
  double stderr_ = 0.0;
  double mean_filament = 0.0;
  double mean_median = 0.0;
};
struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by kappa
  std::optional<LineFit> filament_fit;  // log filament vs log kappa
  std::optional<LineFit> decay_fit;     // log(-lambda_hat) vs log kappa
  std::string filament_fit_error, decay_fit_error;
};
SweepResult sweep(const ExperimentConfig& cfg, int threads = 1);

struct StoppingResult {
  StoppingRecord record;
  double horizon = 0.0;
  int median_at_horizon = 0;
  MedianTrace trace;  // every `trace_every` steps when requested
};
/// Annulus rho0 at M0, run to max(horizon_factor t_star(M0), time eta is decided).
StoppingResult run_stopping_experiment(const ExperimentConfig& cfg, int M0, std::uint64_t seed, int trace_every = 0);

struct MedianSummary {
  int M0 = 0;
  std::vector<StoppingResult> runs;
  Interval hit_probability;   // P(tau(M0) <= t_star(M0))
  MeanSe median_at_horizon;
  double horizon = 0.0;
  double t_star = 0.0;
  double eta_cap = 0.0;
  double eta_mean = 0.0, eta_max = 0.0;
  bool eta_within_cap = true;
};
std::vector<MedianSummary> median_experiment(const ExperimentConfig& cfg, int threads = 1);

struct ChaosRow {
  std::string ell;  // "l1:l2" or "total"
  double kappa = 0.0, M = 0.0, t = 0.0;
  double var_closed = 0.0;
  double var_mc = 0.0, mc_stderr = 0.0;  // NaN when the MC was skipped
  double ratio_lower_bound = 0.0;
  std::string op;
};
std::vector<ChaosRow> chaos_table(const ExperimentConfig& cfg);

// Writers. Every CSV begins with a `# medianflow <kind> schema_version=1` line,
// every JSON document carries "schema_version".
std::string record_json(const RunRecord& r);
std::string stopping_json(const StoppingResult& r);
std::string median_summary_json(const std::vector<MedianSummary>& s, const ExperimentConfig& cfg);
void write_sweep_csv(const SweepResult& s, const std::string& path);
std::string sweep_summary_json(const SweepResult& s, const ExperimentConfig& cfg);
void write_chaos_csv(const std::vector<ChaosRow>& rows, const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Runs `count` independent jobs on up to `threads` workers; job i writes slot i.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

}  // namespace medianflow
