#include "medianflow/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace medianflow {

NoiseModel::NoiseModel(WaveGrid grid, double alpha, double sigma, std::uint64_t seed, double k_max)
    : grid_(std::move(grid)), alpha_(alpha), sigma_(sigma), seed_(seed), k_max_(k_max) {
  if (!(alpha > 10.0)) throw std::invalid_argument("noise.alpha must exceed 10, got " + std::to_string(alpha));
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("noise.sigma must be finite and nonnegative");
  if (k_max < 0.0) throw std::invalid_argument("noise k_max must be nonnegative");
  for (std::size_t idx : grid_.pair_representatives())
    if (is_forced(grid_.wavenumber(idx))) forced_.push_back(idx);
  omega_scale_.assign(grid_.size(), 0.0);
  const double e = 0.5 - 0.25 * alpha;
  for (std::size_t idx : grid_.active_index()) omega_scale_[idx] = std::pow(double(grid_.wavenumber(idx).norm2()), e);
}

bool NoiseModel::is_forced(Wavenumber k) const {
  if (!grid_.is_active(k)) return false;
  return k_max_ <= 0.0 || double(k.norm2()) <= k_max_ * k_max_ * (1.0 + 1e-12);
}

SpectralField sample_zeta_increments(const NoiseModel& model, double h, Rng& rng) {
  if (!(h >= 0.0)) throw std::invalid_argument("noise increment needs h >= 0");
  SpectralField z(model.grid());
  const double var = model.sigma() * model.sigma() * h;
  for (std::size_t idx : model.forced()) z.set_at(idx, rng.complex_normal(var));
  return z;
}

VectorField forcing_velocity(const NoiseModel& model, const SpectralField& zeta) {
  const auto& g = model.grid();
  VectorField out(g);
  auto& a = out.c1.raw();
  auto& b = out.c2.raw();
  for (std::size_t idx : g.active_index()) {
    Complex z = zeta.at(idx);
    if (z == Complex{}) continue;
    Wavenumber k = g.wavenumber(idx);
    Wavenumber p = Wavenumber{g.odd_component(k.k1), g.odd_component(k.k2)}.perp();
    double s = std::pow(double(k.norm2()), -0.5 - 0.25 * model.alpha());
    a[idx] = Complex(0.0, p.k1 * s) * z;
    b[idx] = Complex(0.0, p.k2 * s) * z;
  }
  out.divergence_free = true;
  return out;
}

SpectralField vorticity_forcing(const NoiseModel& model, const SpectralField& zeta) {
  SpectralField out(zeta.grid());
  auto& o = out.raw();
  const auto& scale = model.vorticity_scale();
  for (std::size_t idx : zeta.grid().active_index()) o[idx] = scale[idx] * zeta.at(idx);
  return out;
}

VectorField forcing_velocity_increment(const NoiseModel& model, double h, Rng& rng) {
  return forcing_velocity(model, sample_zeta_increments(model, h, rng));
}

SpectralField vorticity_forcing_increment(const NoiseModel& model, double h, Rng& rng) {
  return vorticity_forcing(model, sample_zeta_increments(model, h, rng));
}

double ou_increment_variance(double decay, double drive_var, double h) {
  if (decay == 0.0) return drive_var * h;
  return drive_var * (-std::expm1(-2.0 * decay * h)) / (2.0 * decay);
}

Complex ou_update(Complex coeff, double decay, double drive_var, double h, Rng& rng) {
  return std::exp(-decay * h) * coeff + rng.complex_normal(ou_increment_variance(decay, drive_var, h));
}

OuIncrements::OuIncrements(const NoiseModel& model, double h, int substeps)
    : model_(&model), h_(h), substeps_(substeps) {
  if (!(h > 0.0)) throw std::invalid_argument("time step must be positive");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const auto& g = model.grid();
  decay_.assign(g.size(), 1.0);
  for (std::size_t idx : g.active_index()) decay_[idx] = std::exp(-double(g.wavenumber(idx).norm2()) * h);
  const double hf = h / substeps;
  const double s2 = model.sigma() * model.sigma();
  for (std::size_t idx : model.forced()) {
    double a = double(g.wavenumber(idx).norm2());
    fine_decay_.push_back(std::exp(-a * hf));
    fine_std2_.push_back(ou_increment_variance(a, s2, hf));
  }
}

SpectralField OuIncrements::next(Rng& rng) const {
  SpectralField eta(model_->grid());
  if (model_->sigma() == 0.0) return eta;
  const auto& forced = model_->forced();
  std::vector<Complex> acc(forced.size());
  for (int s = 0; s < substeps_; ++s)
    for (std::size_t p = 0; p < forced.size(); ++p) acc[p] = fine_decay_[p] * acc[p] + rng.complex_normal(fine_std2_[p]);
  for (std::size_t p = 0; p < forced.size(); ++p) eta.set_at(forced[p], acc[p]);
  return eta;
}

}  // namespace medianflow
