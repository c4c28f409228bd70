#include "medianflow/scalar.hpp"

#include <cmath>
#include <stdexcept>

#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"

namespace medianflow {

OpKind parse_op_kind(const std::string& text) {
  if (text == "adv" || text == "ADV") return OpKind::ADV;
  if (text == "lns" || text == "LNS") return OpKind::LNS;
  throw std::invalid_argument("unknown operator '" + text + "' (expected adv or lns)");
}

std::string to_string(OpKind op) { return op == OpKind::ADV ? "adv" : "lns"; }

TimeScheme parse_scheme(const std::string& text) {
  if (text == "euler") return TimeScheme::Euler;
  if (text == "rk4") return TimeScheme::RK4;
  throw std::invalid_argument("unknown scalar scheme '" + text + "' (expected euler or rk4)");
}

std::string to_string(TimeScheme s) { return s == TimeScheme::Euler ? "euler" : "rk4"; }

ScalarState::ScalarState(const SpectralField& rho0, OpKind op_kind, double diffusivity, double time)
    : pi(rho0), t(time), op(op_kind), kappa(diffusivity) {
  if (!(diffusivity > 0.0 && diffusivity <= 1.0))
    throw std::invalid_argument("scalar.kappa must lie in (0, 1]");
  double norm = sobolev_norm(rho0, 0.0);
  if (norm == 0.0) throw DegenerateField("initial scalar is zero");
  pi *= 1.0 / norm;
  log_amp = std::log(norm);
}

namespace {

SpectralField apply_L_fused(const FlowSamples& u, const SpectralField& rho, OpKind op) {
  const auto& g = rho.grid();
  if (u.zero) return SpectralField(g);
  auto gr = grad(rho);
  auto a1 = product_space::sample(gr.c1);
  auto a2 = product_space::sample(gr.c2);
  for (std::size_t i = 0; i < a1.size(); ++i) a1[i] = u.u1[i] * a1[i] + u.u2[i] * a2[i];
  if (op == OpKind::LNS) {
    if (!u.has_laplacian()) throw std::logic_error("LNS operator needs Laplacian samples of u");
    auto ig = inv_grad(rho);
    auto b1 = product_space::sample(ig.c1);
    auto b2 = product_space::sample(ig.c2);
    for (std::size_t i = 0; i < a1.size(); ++i) a1[i] += u.lap1[i] * b1[i] + u.lap2[i] * b2[i];
  }
  return product_space::project(g, a1);
}

}  // namespace

SpectralField apply_L(const FlowSamples& u, const SpectralField& rho, OpKind op) {
  return apply_L_fused(u, rho, op);
}

SpectralField apply_L(const VectorField& u, const SpectralField& rho, OpKind op) {
  require_same_grid(u.grid(), rho.grid(), "apply_L");
  return apply_L_fused(sample_flow(u, op == OpKind::LNS), rho, op);
}

double lns_coefficient(Wavenumber k, Wavenumber j) {
  return double(dot(k.perp(), j)) * (1.0 / double(k.norm2()) - 1.0 / double(j.norm2()));
}

SpectralField apply_L_direct(const SpectralField& w, const SpectralField& rho) {
  const auto& g = w.grid();
  require_same_grid(g, rho.grid(), "apply_L_direct");
  if (g.n() > 32) throw std::invalid_argument("apply_L_direct is O(n^4); refusing n > 32");
  SpectralField out(g);
  const auto& ks = g.active();
  const auto& idx = g.active_index();
  for (std::size_t b = 0; b < ks.size(); ++b) {
    Wavenumber l = ks[b];
    Complex s = 0.0;
    for (std::size_t a = 0; a < ks.size(); ++a) {
      Wavenumber k = ks[a];
      Wavenumber j = l - k;
      if (!g.is_active(j)) continue;
      s -= lns_coefficient(k, j) * w.at(idx[a]) * rho[j];
    }
    out.raw()[idx[b]] = s;
  }
  return out;
}

VectorField R_operator(const VectorField& u, const SpectralField& rho) {
  require_same_grid(u.grid(), rho.grid(), "R_operator");
  const auto& g = rho.grid();
  auto r = product_space::sample(rho);
  auto q = product_space::sample(inv_laplacian(rho) * -1.0);  // (-Lap)^{-1} rho
  auto u1 = product_space::sample(u.c1), u2 = product_space::sample(u.c2);
  auto l1 = product_space::sample(laplacian(u.c1)), l2 = product_space::sample(laplacian(u.c2));
  for (std::size_t i = 0; i < r.size(); ++i) {
    u1[i] = u1[i] * r[i] + l1[i] * q[i];
    u2[i] = u2[i] * r[i] + l2[i] * q[i];
  }
  return VectorField(product_space::project(g, u1), product_space::project(g, u2));
}

double stretching_term(const FlowSamples& u, const SpectralField& pi) {
  if (u.zero) return 0.0;
  if (!u.has_laplacian()) throw std::logic_error("stretching term needs Laplacian samples of u");
  auto ig = inv_grad(pi);
  auto b1 = product_space::sample(ig.c1);
  auto b2 = product_space::sample(ig.c2);
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] = u.lap1[i] * b1[i] + u.lap2[i] * b2[i];
  return inner(pi, product_space::project(pi.grid(), b1));
}

double stretching_term(const VectorField& u, const SpectralField& pi) {
  return stretching_term(sample_flow(u, true), pi);
}

ScalarStepper::ScalarStepper(OpKind op, double kappa, double h, TimeScheme scheme, double cfl)
    : op_(op), kappa_(kappa), h_(h), scheme_(scheme), cfl_(cfl) {
  if (!(h > 0.0)) throw std::invalid_argument("scalar step must be positive");
  if (!(cfl >= 0.0)) throw std::invalid_argument("scalar cfl must be nonnegative");
}

SpectralField ScalarStepper::rhs(const FlowSamples& u, const SpectralField& pi) const {
  auto r = apply_L_fused(u, pi, op_);
  r *= -1.0;
  return r;
}

const ScalarStepper::Decay& ScalarStepper::decay_for(const WaveGrid& g, int m) const {
  auto it = decay_.find(m);
  if (it != decay_.end() && it->second.full.size() == g.size()) return it->second;
  Decay& d = decay_[m];
  const double dt = h_ / m;
  d.full.assign(g.size(), 1.0);
  d.half.assign(g.size(), 1.0);
  for (std::size_t idx : g.active_index()) {
    double a = kappa_ * double(g.wavenumber(idx).norm2());
    d.full[idx] = std::exp(-a * dt);
    d.half[idx] = std::exp(-0.5 * a * dt);
  }
  return d;
}

double ScalarStepper::step(ScalarState& s, const FlowSamples& now, const FlowSamples& next) const {
  const auto& g = s.pi.grid();
  int m = 1;
  if (cfl_ > 0.0 && !(now.zero && next.zero)) {
    double speed = std::max(now.max_speed, next.max_speed);
    m = std::max(1, int(std::ceil(h_ * g.n() * speed / cfl_ - 1e-12)));
  }
  last_substeps_ = m;
  const Decay& d = decay_for(g, m);
  if (m == 1) return advance(s, now, next, h_, d);
  double inc = 0.0;
  FlowSamples a = interpolate(now, next, 0.0);
  for (int j = 1; j <= m; ++j) {
    FlowSamples b = j == m ? interpolate(now, next, 1.0) : interpolate(now, next, double(j) / m);
    inc += advance(s, a, b, h_ / m, d);
    a = std::move(b);
  }
  return inc;
}

double ScalarStepper::advance(ScalarState& s, const FlowSamples& now, const FlowSamples& next, double h,
                              const Decay& dec) const {
  const auto& g = s.pi.grid();
  const auto& act = g.active_index();
  const auto& p = s.pi.coefficients();
  const auto& full = dec.full;
  const auto& half = dec.half;
  SpectralField out(g);
  auto& o = out.raw();
  if (scheme_ == TimeScheme::Euler || (now.zero && next.zero)) {
    if (now.zero) {
      for (std::size_t i : act) o[i] = full[i] * p[i];
    } else {
      auto a = rhs(now, s.pi);
      for (std::size_t i : act) o[i] = full[i] * (p[i] + h * a.at(i));
    }
  } else {
    // Lawson integrating-factor RK4 with u linear in time across the step.
    FlowSamples mid = interpolate(now, next, 0.5);
    SpectralField y(g);
    auto& yr = y.raw();
    auto a = rhs(now, s.pi);
    for (std::size_t i : act) yr[i] = half[i] * (p[i] + 0.5 * h * a.at(i));
    auto b = rhs(mid, y);
    for (std::size_t i : act) yr[i] = half[i] * p[i] + 0.5 * h * b.at(i);
    auto c = rhs(mid, y);
    for (std::size_t i : act) yr[i] = full[i] * p[i] + h * half[i] * c.at(i);
    auto d = rhs(next, y);
    for (std::size_t i : act)
      o[i] = full[i] * p[i] + (h / 6.0) * (full[i] * a.at(i) + 2.0 * half[i] * (b.at(i) + c.at(i)) + d.at(i));
  }
  require_finite(out, "scalar", s.t + h);
  double norm = sobolev_norm(out, 0.0);
  if (!(norm > 0.0)) throw NumericalError("scalar norm vanished at t=" + std::to_string(s.t + h));
  out *= 1.0 / norm;
  s.pi = std::move(out);
  double inc = std::log(norm);
  s.log_amp += inc;
  s.t += h;
  return inc;
}

ScalarState scalar_step(const ScalarState& state, const VectorField& u, double h) {
  ScalarStepper stepper(state.op, state.kappa, h, TimeScheme::Euler);
  auto samples = sample_flow(u, state.op == OpKind::LNS);
  ScalarState out = state;
  stepper.step(out, samples, samples);
  return out;
}

SpectralField phi_bilinear(const std::vector<VectorField>& u, const std::vector<SpectralField>& w, double kappa,
                           double t, OpKind op, double step) {
  if (!(step > 0.0) || !(t >= 0.0)) throw std::invalid_argument("phi_bilinear: need t >= 0 and step > 0");
  const long N = std::lround(t / step);
  if (std::abs(N * step - t) > 1e-9 * std::max(1.0, t))
    throw std::invalid_argument("phi_bilinear: t is not a multiple of the quadrature step");
  if (u.empty() || w.empty() || long(u.size()) < N + 1 || long(w.size()) < N + 1)
    throw std::invalid_argument("phi_bilinear: trajectories do not cover [0, t]");
  SpectralField acc(w[0].grid());
  if (N == 0) return acc;
  for (long i = 0; i <= N; ++i) {
    double wgt = (i == 0 || i == N) ? 0.5 * step : step;
    acc += heat_propagate(apply_L(u[i], w[i], op), t - i * step, kappa) * wgt;
  }
  acc *= -1.0;
  return acc;
}

PhiIntegrator::PhiIntegrator(const SpectralField& rho0, double kappa, double h, OpKind op)
    : y_(rho0), acc_(rho0.grid()), last_(rho0.grid()), kappa_(kappa), h_(h), op_(op) {
  const auto& g = rho0.grid();
  decay_.assign(g.size(), 1.0);
  for (std::size_t idx : g.active_index()) decay_[idx] = std::exp(-kappa * double(g.wavenumber(idx).norm2()) * h);
}

void PhiIntegrator::push(const VectorField& u) {
  const auto& g = y_.grid();
  if (samples_ > 0) {
    // Move to the next sample time: A <- P_h (A + c g_prev), Y <- P_h Y.
    const double c = samples_ == 1 ? 0.5 : 1.0;
    auto& a = acc_.raw();
    auto& y = y_.raw();
    for (std::size_t idx : g.active_index()) {
      a[idx] = decay_[idx] * (a[idx] + c * last_.at(idx));
      y[idx] *= decay_[idx];
    }
  }
  last_ = apply_L(u, y_, op_);
  ++samples_;
}

SpectralField PhiIntegrator::value() const {
  SpectralField out(y_.grid());
  if (samples_ <= 1) return out;
  out = acc_ + last_ * 0.5;
  out *= -h_;
  return out;
}

}  // namespace medianflow
