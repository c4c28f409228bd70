#pragma once

#include <limits>
#include <vector>

#include "medianflow/flow.hpp"
#include "medianflow/scalar.hpp"

namespace medianflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Time integrals behind the Furstenberg-Khasminskii identity
///   log_growth + int_grad (+ int_stretch) = 0 in continuous time.
struct FKAccumulator {
  double t_accum = 0.0;
  double int_grad = 0.0;     // int kappa ||grad pi||^2
  double int_stretch = 0.0;  // int <pi, Lap u . grad^{-1} pi> (LNS only)
  double log_growth = 0.0;   // sum of log_amp increments
  long n_samples = 0;

  double residual() const { return log_growth + int_grad + int_stretch; }
};

/// Adds one step of length h, evaluated at the left end point (`before`, `u`),
/// together with the log_amp increment that the step produced.
void accumulate_fk(FKAccumulator& acc, const ScalarState& before, const FlowSamples& u, double h,
                   double log_increment);

/// Instantaneous log-derivative <pi, kappa Lap pi - L[u] pi>.
double log_derivative(const ScalarState& s, const FlowSamples& u);

struct MedianTrace {
  std::vector<double> times;
  std::vector<int> median;
  std::vector<int> quantile2;
  std::vector<double> filament;
};

void record_median(MedianTrace& trace, const ScalarState& state);

/// lambda kappa^{-1} M^{-2} log M with lambda = alpha/2 + 5.
double t_star(double kappa, double M, double alpha);
double t_star_delta(double kappa, double M, double alpha, double delta);

struct LambdaEstimate {
  double lambda = 0.0;
  double std_err = 0.0;
  int batches = 0;
};

/// (log_amp(T) - log_amp(t_burn)) / (T - t_burn) with a batch-means standard
/// error over `batches` equal windows. `times` must be increasing.
LambdaEstimate estimate_lambda(const std::vector<double>& times, const std::vector<double>& log_amp, double t_burn,
                               int batches = 10);

/// Finite-difference derivative of ||H_M rho|| / ||L_M rho|| across one step and
/// the bound M (||u||_inf [+ ||Lap u||_inf]) (1 + ratio^2).
struct DriftSample {
  double lhs = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};
DriftSample ratio_drift_diagnostic(const ScalarState& before, const ScalarState& after, const VectorField& u,
                                   double M);
double high_low_ratio(const SpectralField& f, double M);

/// Stopping times of one median trajectory.
struct StoppingRecord {
  int M0 = 0;
  double kappa = 0.0, delta = 0.0, q = 0.0, alpha = 0.0;
  double tau = kInf;        // inf{t : M(rho_t) < M0 - 1}
  double sigma = kInf;      // inf{t : M^(2)(rho_t) > M0}
  double sigma_bar = 0.0;   // sigma wedge t_star_delta(M0)
  double eta = kInf;        // sigma_{i_fin} of the iterated construction
  int i_fin = -1;
  int L = 0;
  double eta_cap = 0.0;     // sum_{i <= L} t_star_delta(Mhat_i)
  bool hit_within_tstar = false;
  double t_star = 0.0;
  std::vector<double> tau_i;    // tau_0 = 0, tau_1, ...
  std::vector<double> sigma_i;  // sigma_0, ...
  std::uint64_t seed = 0;
  bool complete = false;        // eta and tau/sigma resolved or horizon reached
};

/// Online evaluation of the iterated stopping construction: Mhat_i = (M0 - i) v kappa^{-q},
/// sigma_i = inf{t >= tau_i : M^(2) >= Mhat_i} wedge (tau_i + t_star_delta(Mhat_i)),
/// tau_{i+1} = inf{t >= tau_i : M <= Mhat_{i+1}}, L = min{i : Mhat_i <= kappa^{-q}},
/// i_fin = min{i : sigma_i < tau_{i+1}} wedge L, eta = sigma_{i_fin}.
/// Observations are the discrete sample times of the simulation.
class StoppingTracker {
 public:
  StoppingTracker(int M0, double kappa, double alpha, double delta, double q);

  /// Feeds the state at time t (first call at t = 0).
  void observe(double t, int median, int quantile2);
  /// True once eta is determined.
  bool eta_done() const { return eta_done_; }
  const StoppingRecord& record() const { return rec_; }
  double mhat(int i) const;
  /// Closes the record at the final time: unresolved times stay infinite.
  void finish(double t_end);

 private:
  StoppingRecord rec_;
  double floor_;  // kappa^{-q}
  int stage_ = 0;
  bool eta_done_ = false;
  double tau_stage_ = 0.0;
  double sigma_stage_ = kInf;
};

}  // namespace medianflow
