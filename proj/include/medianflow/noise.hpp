#pragma once

#include <cstdint>
#include <vector>

#include "medianflow/field.hpp"
#include "medianflow/random.hpp"

namespace medianflow {

/// Divergence-free forcing with covariance sigma^2 delta(t-s) |k|^{-alpha} per mode,
/// written as P xi = sum_k e_k (i k_perp/|k|^{1+alpha/2}) d zeta^k.
///
/// Every active mode is forced unless k_max > 0, in which case only
/// 0 < |k| <= k_max is (used for like-for-like comparisons with truncated sums).
/// sigma = 0 is allowed as a deterministic control.
class NoiseModel {
 public:
  NoiseModel(WaveGrid grid, double alpha = 12.0, double sigma = 1.0, std::uint64_t seed = 0, double k_max = 0.0);

  const WaveGrid& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }
  double k_max() const { return k_max_; }

  /// Forced Hermitian-pair representatives in canonical (dense index) order.
  const std::vector<std::size_t>& forced() const { return forced_; }
  bool is_forced(Wavenumber k) const;
  /// |k|^{1-alpha/2} per dense index (0 off the active set).
  const std::vector<double>& vorticity_scale() const { return omega_scale_; }

 private:
  WaveGrid grid_;
  double alpha_;
  double sigma_;
  std::uint64_t seed_;
  double k_max_;
  std::vector<std::size_t> forced_;
  std::vector<double> omega_scale_;
};

/// Brownian increments d zeta^k over a step h: E|dz|^2 = sigma^2 h, E dz^2 = 0,
/// dz^{-k} = conj dz^k. One draw per forced pair in canonical order.
SpectralField sample_zeta_increments(const NoiseModel& model, double h, Rng& rng);

/// (i k_perp/|k|^{1+alpha/2}) dz^k, divergence free.
VectorField forcing_velocity(const NoiseModel& model, const SpectralField& zeta);
/// |k|^{1-alpha/2} dz^k, the curl of forcing_velocity.
SpectralField vorticity_forcing(const NoiseModel& model, const SpectralField& zeta);

VectorField forcing_velocity_increment(const NoiseModel& model, double h, Rng& rng);
SpectralField vorticity_forcing_increment(const NoiseModel& model, double h, Rng& rng);

/// Exact Ornstein-Uhlenbeck step e^{-decay h} c + eta with
/// E|eta|^2 = drive_var (1 - e^{-2 decay h})/(2 decay) (drive_var h when decay = 0).
Complex ou_update(Complex coeff, double decay, double drive_var, double h, Rng& rng);
double ou_increment_variance(double decay, double drive_var, double h);

/// Per-step stochastic-convolution increments shared by the vorticity and the
/// Gaussian process X:
///   eta^k = int_t^{t+h} e^{-|k|^2 (t+h-s)} d zeta^k_s.
/// The vorticity receives |k|^{1-alpha/2} eta^k and X receives
/// (i k_perp/|k|^{1+alpha/2}) eta^k, so both see one noise path.
///
/// With substeps = s > 1 each step of size h is assembled from s fine draws of
/// size h/s, eta = sum_i e^{-|k|^2 h (s-1-i)/s} eta_i. A run at (h, s = 2) and a
/// run at (h/2, s = 1) with the same seed therefore share one noise path.
class OuIncrements {
 public:
  OuIncrements(const NoiseModel& model, double h, int substeps = 1);

  double h() const { return h_; }
  /// Draws the next eta (zero field when sigma = 0; no RNG is consumed then).
  SpectralField next(Rng& rng) const;
  /// exp(-|k|^2 h) for every dense index (used by integrating factors).
  const std::vector<double>& decay() const { return decay_; }

 private:
  const NoiseModel* model_;
  double h_;
  int substeps_;
  std::vector<double> decay_;
  std::vector<double> fine_decay_;  // per forced pair
  std::vector<double> fine_std2_;   // E|eta_i|^2 per forced pair
};

}  // namespace medianflow
