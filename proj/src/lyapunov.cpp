#include "medianflow/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"

namespace medianflow {

void accumulate_fk(FKAccumulator& acc, const ScalarState& before, const FlowSamples& u, double h,
                   double log_increment) {
  const double g = sobolev_norm(before.pi, 1.0);
  acc.int_grad += h * before.kappa * g * g;
  if (before.op == OpKind::LNS) acc.int_stretch += h * stretching_term(u, before.pi);
  acc.log_growth += log_increment;
  acc.t_accum += h;
  ++acc.n_samples;
}

double log_derivative(const ScalarState& s, const FlowSamples& u) {
  return inner(s.pi, laplacian(s.pi) * s.kappa - apply_L(u, s.pi, s.op));
}

void record_median(MedianTrace& trace, const ScalarState& state) {
  trace.times.push_back(state.t);
  trace.median.push_back(spectral_quantile(state.pi, 1.0));
  trace.quantile2.push_back(spectral_quantile(state.pi, 2.0));
  trace.filament.push_back(filament_scale(state.pi));
}

double t_star(double kappa, double M, double alpha) {
  if (!(M >= 2.0)) throw std::invalid_argument("t_star needs M >= 2");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("t_star needs kappa in (0, 1]");
  return (alpha / 2.0 + 5.0) / kappa / (M * M) * std::log(M);
}

double t_star_delta(double kappa, double M, double alpha, double delta) {
  return t_star(kappa, M, alpha) * std::pow(M, delta);
}

LambdaEstimate estimate_lambda(const std::vector<double>& times, const std::vector<double>& log_amp, double t_burn,
                               int batches) {
  if (times.size() != log_amp.size() || times.size() < 2) throw std::invalid_argument("estimate_lambda: bad series");
  if (batches < 2) throw std::invalid_argument("estimate_lambda: need at least 2 batches");
  const double T = times.back();
  if (!(T > t_burn)) throw std::invalid_argument("estimate_lambda: run shorter than burn-in");
  // Interpolated log_amp at arbitrary time inside the series.
  auto at = [&](double t) {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return log_amp.front();
    if (it == times.end()) return log_amp.back();
    std::size_t i = std::size_t(it - times.begin());
    double t0 = times[i - 1], t1 = times[i];
    double w = t1 > t0 ? (t - t0) / (t1 - t0) : 1.0;
    return (1.0 - w) * log_amp[i - 1] + w * log_amp[i];
  };
  LambdaEstimate est;
  est.batches = batches;
  const double span = T - t_burn;
  est.lambda = (at(T) - at(t_burn)) / span;
  std::vector<double> slopes;
  for (int b = 0; b < batches; ++b) {
    double a = t_burn + span * b / batches, e = t_burn + span * (b + 1) / batches;
    slopes.push_back((at(e) - at(a)) / (e - a));
  }
  double mean = 0.0, var = 0.0;
  for (double m : slopes) mean += m / batches;
  for (double m : slopes) var += (m - mean) * (m - mean) / (batches - 1);
  est.std_err = std::sqrt(var / batches);
  return est;
}

double high_low_ratio(const SpectralField& f, double M) {
  double lo = sobolev_norm(project_low(f, M), 0.0);
  if (lo == 0.0) throw DegenerateField("ratio drift: vanishing low-frequency norm");
  return sobolev_norm(project_high(f, M), 0.0) / lo;
}

DriftSample ratio_drift_diagnostic(const ScalarState& before, const ScalarState& after, const VectorField& u,
                                   double M) {
  const double h = after.t - before.t;
  if (!(h > 0.0)) throw std::invalid_argument("ratio drift needs two distinct times");
  DriftSample d;
  d.ratio = high_low_ratio(before.pi, M);
  d.lhs = (high_low_ratio(after.pi, M) - d.ratio) / h;
  double speed = sup_norm(u);
  if (before.op == OpKind::LNS) speed += sup_norm(laplacian(u));
  d.bound = M * speed * (1.0 + d.ratio * d.ratio);
  return d;
}

StoppingTracker::StoppingTracker(int M0, double kappa, double alpha, double delta, double q) {
  if (!(q > 2.0)) throw std::invalid_argument("experiment.q must exceed 2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("experiment.delta must lie in (0, 1)");
  floor_ = std::pow(kappa, -q);
  if (floor_ < 2.0) throw std::invalid_argument("kappa^{-q} must be at least 2 for t_star to be defined");
  if (M0 < 2) throw std::invalid_argument("M0 must be at least 2");
  rec_.M0 = M0;
  rec_.kappa = kappa;
  rec_.alpha = alpha;
  rec_.delta = delta;
  rec_.q = q;
  rec_.t_star = t_star(kappa, M0, alpha);
  rec_.L = std::max(0, int(std::ceil(M0 - floor_)));
  for (int i = 0; i <= rec_.L; ++i) rec_.eta_cap += t_star_delta(kappa, mhat(i), alpha, delta);
  rec_.tau_i.push_back(0.0);
}

double StoppingTracker::mhat(int i) const { return std::max(double(rec_.M0 - i), floor_); }

void StoppingTracker::observe(double t, int median, int quantile2) {
  if (rec_.tau == kInf && median < rec_.M0 - 1) rec_.tau = t;
  if (rec_.sigma == kInf && quantile2 > rec_.M0) rec_.sigma = t;
  while (!eta_done_) {
    const int i = stage_;
    const double cap = tau_stage_ + t_star_delta(rec_.kappa, mhat(i), rec_.alpha, rec_.delta);
    auto finish_at = [&](double when) {
      rec_.sigma_i.push_back(when);
      rec_.eta = when;
      rec_.i_fin = i;
      eta_done_ = true;
    };
    if (t > cap) {
      // The cap fell between observations and no level crossing was seen before it.
      finish_at(cap);
      break;
    }
    const bool sigma_hit = quantile2 >= mhat(i) || t == cap;
    if (i == rec_.L) {
      if (sigma_hit) finish_at(t);
      break;
    }
    if (median <= mhat(i + 1)) {
      // tau_{i+1} = t <= sigma_i, so this stage does not end the construction.
      rec_.sigma_i.push_back(sigma_hit ? t : std::numeric_limits<double>::quiet_NaN());
      ++stage_;
      tau_stage_ = t;
      rec_.tau_i.push_back(t);
      continue;
    }
    if (sigma_hit) finish_at(t);
    break;
  }
}

void StoppingTracker::finish(double t_end) {
  const double tsd0 = t_star_delta(rec_.kappa, rec_.M0, rec_.alpha, rec_.delta);
  if (rec_.sigma < kInf || t_end >= tsd0) rec_.sigma_bar = std::min(rec_.sigma, tsd0);
  else rec_.sigma_bar = kInf;
  rec_.hit_within_tstar = rec_.tau <= rec_.t_star;
  rec_.complete = eta_done_;
}

}  // namespace medianflow
