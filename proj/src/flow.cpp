#include "medianflow/flow.hpp"

#include <cmath>
#include <sstream>

#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"

namespace medianflow {

FlowState::FlowState(SpectralField vorticity, double time)
    : w(std::move(vorticity)), u(biot_savart(w)), t(time) {}

void FlowState::set_vorticity(SpectralField vorticity) {
  w = std::move(vorticity);
  u = biot_savart(w);
}

FlowSamples sample_flow(const VectorField& u, bool with_laplacian) {
  FlowSamples s;
  s.zero = u.c1.is_zero() && u.c2.is_zero();
  s.u1 = product_space::sample(u.c1);
  s.u2 = product_space::sample(u.c2);
  if (with_laplacian) {
    s.lap1 = product_space::sample(laplacian(u.c1));
    s.lap2 = product_space::sample(laplacian(u.c2));
  }
  double m2 = 0.0;
  for (std::size_t i = 0; i < s.u1.size(); ++i) m2 = std::max(m2, s.u1[i] * s.u1[i] + s.u2[i] * s.u2[i]);
  s.max_speed = std::sqrt(m2);
  return s;
}

FlowSamples interpolate(const FlowSamples& a, const FlowSamples& b, double theta) {
  auto mix = [theta](const AlignedBuffer<double>& x, const AlignedBuffer<double>& y) {
    AlignedBuffer<double> out(x.size(), AlignedBuffer<double>::NoInit{});
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (1.0 - theta) * x[i] + theta * y[i];
    return out;
  };
  FlowSamples s;
  s.zero = a.zero && b.zero;
  s.u1 = mix(a.u1, b.u1);
  s.u2 = mix(a.u2, b.u2);
  if (a.has_laplacian() && b.has_laplacian()) {
    s.lap1 = mix(a.lap1, b.lap1);
    s.lap2 = mix(a.lap2, b.lap2);
  }
  double m2 = 0.0;
  for (std::size_t i = 0; i < s.u1.size(); ++i) m2 = std::max(m2, s.u1[i] * s.u1[i] + s.u2[i] * s.u2[i]);
  s.max_speed = std::sqrt(m2);
  return s;
}

double cfl_limit(const WaveGrid& grid, double max_speed, double cfl) {
  if (max_speed <= 0.0) return INFINITY;
  return cfl / (grid.n() * max_speed);
}

void require_finite(const SpectralField& f, const std::string& what, double t) {
  for (Complex c : f.coefficients()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream os;
      os << "non-finite " << what << " at t=" << t;
      throw NumericalError(os.str());
    }
  }
}

FlowStepper::FlowStepper(const NoiseModel& model, double h, int substeps, double cfl)
    : model_(&model), inc_(model, h, substeps), cfl_(cfl) {}

SpectralField FlowStepper::step(FlowState& state, Rng& rng, const FlowSamples* now) const {
  const auto& g = model_->grid();
  require_same_grid(g, state.w.grid(), "FlowStepper::step");
  const double h = inc_.h();

  FlowSamples local;
  if (!now) {
    local = sample_flow(state.u, false);
    now = &local;
  }
  if (h > cfl_limit(g, now->max_speed, cfl_)) {
    std::ostringstream os;
    os << "CFL guard: h=" << h << " exceeds " << cfl_ << "/(n max|u|) = " << cfl_limit(g, now->max_speed, cfl_)
       << " at t=" << state.t << " (max|u|=" << now->max_speed << ")";
    throw CflViolation(os.str());
  }

  SpectralField next = state.w;
  if (!now->zero) {
    // N = u . grad w, dealiased.
    auto gw = grad(state.w);
    auto d1 = product_space::sample(gw.c1);
    auto d2 = product_space::sample(gw.c2);
    for (std::size_t i = 0; i < d1.size(); ++i) d1[i] = now->u1[i] * d1[i] + now->u2[i] * d2[i];
    auto N = product_space::project(g, d1);
    next -= N * h;
  }
  auto& raw = next.raw();
  const auto& decay = inc_.decay();
  for (std::size_t idx : g.active_index()) raw[idx] *= decay[idx];

  SpectralField eta = inc_.next(rng);
  if (model_->sigma() != 0.0) next += vorticity_forcing(*model_, eta);

  require_finite(next, "vorticity", state.t + h);
  state.set_vorticity(std::move(next));
  state.t += h;
  return eta;
}

FlowState sns_step(const FlowState& state, const NoiseModel& model, double h, Rng& rng, double cfl) {
  FlowStepper stepper(model, h, 1, cfl);
  FlowState out = state;
  stepper.step(out, rng);
  return out;
}

void XProcess::advance(const NoiseModel& model, const OuIncrements& inc, const SpectralField& eta) {
  const auto& decay = inc.decay();
  for (std::size_t idx : x_.grid().active_index()) {
    x_.c1.raw()[idx] *= decay[idx];
    x_.c2.raw()[idx] *= decay[idx];
  }
  if (model.sigma() != 0.0) x_ += forcing_velocity(model, eta);
  x_.divergence_free = true;
  t_ += inc.h();
}

VectorField div_sym_tensor(const VectorField& a, const VectorField& b) {
  const auto& g = a.grid();
  auto a1 = product_space::sample(a.c1), a2 = product_space::sample(a.c2);
  auto b1 = product_space::sample(b.c1), b2 = product_space::sample(b.c2);
  AlignedBuffer<double> t11(a1.size()), t12(a1.size()), t22(a1.size());
  for (std::size_t i = 0; i < a1.size(); ++i) {
    t11[i] = a1[i] * b1[i];
    t22[i] = a2[i] * b2[i];
    t12[i] = 0.5 * (a1[i] * b2[i] + a2[i] * b1[i]);
  }
  auto T11 = product_space::project(g, t11);
  auto T12 = product_space::project(g, t12);
  auto T22 = product_space::project(g, t22);
  // (div T)_i = d_1 T_i1 + d_2 T_i2
  VectorField row1(T11, T12), row2(T12, T22);
  return VectorField(div(row1), div(row2));
}

VectorField psi_bilinear(const std::vector<VectorField>& w1, const std::vector<VectorField>& w2, double t,
                         double step) {
  if (!(step > 0.0) || !(t >= 0.0)) throw std::invalid_argument("psi_bilinear: need t >= 0 and step > 0");
  const long N = std::lround(t / step);
  if (std::abs(N * step - t) > 1e-9 * std::max(1.0, t))
    throw std::invalid_argument("psi_bilinear: t is not a multiple of the quadrature step");
  if (long(w1.size()) < N + 1 || long(w2.size()) < N + 1)
    throw std::invalid_argument("psi_bilinear: trajectories do not cover [0, t]");
  if (w1.empty()) throw std::invalid_argument("psi_bilinear: empty trajectory");
  VectorField acc(w1[0].grid());
  for (long i = 0; i <= N; ++i) {
    double wgt = (i == 0 || i == N) ? 0.5 * step : step;
    if (N == 0) wgt = 0.0;
    acc += wgt * heat_propagate(div_sym_tensor(w1[i], w2[i]), t - i * step);
  }
  auto out = leray_project(acc);
  out *= -1.0;
  out.divergence_free = true;
  return out;
}

double log_lyapunov_functional(const VectorField& u, double r, double beta, double c_star) {
  double hb = sobolev_norm(u, beta);
  double h1 = sobolev_norm(u, 1.0);
  return r * std::log1p(hb * hb) + c_star * h1 * h1;
}

double lyapunov_functional(const VectorField& u, double r, double beta, double c_star) {
  if (r < 1.0) throw std::invalid_argument("lyapunov_functional: r must be >= 1");
  if (!(c_star > 0.0)) throw std::invalid_argument("lyapunov_functional: c_star must be positive");
  return std::exp(log_lyapunov_functional(u, r, beta, c_star));
}

}  // namespace medianflow
