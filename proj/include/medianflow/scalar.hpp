#pragma once

#include <map>
#include <string>
#include <vector>

#include "medianflow/field.hpp"
#include "medianflow/flow.hpp"

namespace medianflow {

enum class OpKind { ADV, LNS };
OpKind parse_op_kind(const std::string& text);
std::string to_string(OpKind op);

/// Time discretization of the scalar equation. Euler is the exponential
/// (integrating-factor) Euler scheme; RK4 is the integrating-factor RK4 of
/// Lawson, used where the advective CFL of Euler is prohibitive (small kappa).
enum class TimeScheme { Euler, RK4 };
TimeScheme parse_scheme(const std::string& text);
std::string to_string(TimeScheme s);

/// Projective scalar: rho = exp(log_amp) * pi with ||pi|| = 1.
struct ScalarState {
  SpectralField pi;
  double log_amp = 0.0;
  double t = 0.0;
  OpKind op = OpKind::ADV;
  double kappa = 1.0;

  ScalarState(const SpectralField& rho0, OpKind op_kind, double diffusivity, double time = 0.0);
  SpectralField rho() const { return pi * std::exp(log_amp); }
};

/// ADV: u . grad rho.  LNS: u . grad rho + Lap u . grad(-Lap)^{-1} rho.
SpectralField apply_L(const VectorField& u, const SpectralField& rho, OpKind op);
/// Same operator from pre-sampled velocity (fused: one forward transform).
SpectralField apply_L(const FlowSamples& u, const SpectralField& rho, OpKind op);

/// c_{k,j} = <k_perp, j>(|k|^{-2} - |j|^{-2}) in the vorticity form of the LNS operator.
double lns_coefficient(Wavenumber k, Wavenumber j);
/// Exact double sum L[u]rho(l) = -sum_{j+k=l} c_{k,j} w^(k) rho^(j), u = biot_savart(w).
/// The minus sign is i * i from the derivatives i k_perp and i j, which the
/// coefficient above leaves out. O(n^4); refuses n > 32.
SpectralField apply_L_direct(const SpectralField& w, const SpectralField& rho);

/// R[u]rho = u rho + (Lap u)(-Lap)^{-1} rho, so that div R = apply_L(., ., LNS).
VectorField R_operator(const VectorField& u, const SpectralField& rho);

/// <pi, Lap u . grad(-Lap)^{-1} pi>, the stretching term of the LNS log-derivative.
double stretching_term(const FlowSamples& u, const SpectralField& pi);
double stretching_term(const VectorField& u, const SpectralField& pi);

class ScalarStepper {
 public:
  /// cfl > 0 splits a step into m = ceil(h n max|u| / cfl) equal substeps, with
  /// the velocity interpolated linearly between the two end samples. 0 keeps one.
  ScalarStepper(OpKind op, double kappa, double h, TimeScheme scheme = TimeScheme::Euler, double cfl = 0.0);

  /// Advances by h with velocity samples at the start and end of the step
  /// (RK4 interpolates linearly for the midpoint). Renormalizes pi and adds
  /// log of the growth factor to log_amp. Returns that increment.
  double step(ScalarState& s, const FlowSamples& now, const FlowSamples& next) const;

  double h() const { return h_; }
  TimeScheme scheme() const { return scheme_; }
  /// Substeps the last call used.
  int last_substeps() const { return last_substeps_; }

 private:
  struct Decay {
    std::vector<double> full, half;  // e^{-kappa |k|^2 dt}, e^{-kappa |k|^2 dt/2}
  };
  SpectralField rhs(const FlowSamples& u, const SpectralField& pi) const;
  const Decay& decay_for(const WaveGrid& g, int m) const;
  double advance(ScalarState& s, const FlowSamples& now, const FlowSamples& next, double dt, const Decay& d) const;

  OpKind op_;
  double kappa_;
  double h_;
  TimeScheme scheme_;
  double cfl_;
  mutable std::map<int, Decay> decay_;  // by substep count, built on first use
  mutable int last_substeps_ = 1;
};

/// One exponential Euler step with frozen u (pi <- e^{kappa Lap h}(pi - h L pi), renormalize).
ScalarState scalar_step(const ScalarState& state, const VectorField& u, double h);

/// Phi[u, w]_t = -int_0^t P^kappa_{t-s} L[u_s] w_s ds by the trapezoid rule on
/// trajectories sampled at s_i = i * step.
SpectralField phi_bilinear(const std::vector<VectorField>& u, const std::vector<SpectralField>& w, double kappa,
                           double t, OpKind op, double step);

/// Streaming evaluation of Phi[u, Y] for a heat-flow Y_s = P^kappa_s rho0 with a
/// trapezoid rule, applying P^kappa_h once per step instead of storing the path.
class PhiIntegrator {
 public:
  PhiIntegrator(const SpectralField& rho0, double kappa, double h, OpKind op);
  /// Feeds u at the next sample time s_i = i h (the first call is s = 0).
  void push(const VectorField& u);
  /// Phi[u, Y] at the time of the last pushed sample.
  SpectralField value() const;
  double t() const { return samples_ > 0 ? (samples_ - 1) * h_ : 0.0; }

 private:
  SpectralField y_;      // Y at the current sample time
  SpectralField acc_;    // trapezoid sum excluding the last half weight
  SpectralField last_;   // L[u_i] Y_i at the last sample
  std::vector<double> decay_;
  double kappa_, h_;
  OpKind op_;
  long samples_ = 0;
};

}  // namespace medianflow
