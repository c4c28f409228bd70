#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "medianflow/fft.hpp"
#include "medianflow/field.hpp"
#include "medianflow/noise.hpp"

namespace medianflow {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Vorticity of the stochastic Navier-Stokes flow (unit viscosity) with the
/// velocity u = biot_savart(w) kept in sync.
struct FlowState {
  SpectralField w;
  VectorField u;
  double t = 0.0;

  explicit FlowState(SpectralField vorticity, double time = 0.0);
  void set_vorticity(SpectralField vorticity);
};

/// Velocity (and optionally its Laplacian) sampled on the padded product lattice.
struct FlowSamples {
  AlignedBuffer<double> u1, u2;
  AlignedBuffer<double> lap1, lap2;  // empty unless requested
  double max_speed = 0.0;
  bool zero = false;  // u identically zero; products can be skipped

  bool has_laplacian() const { return lap1.size() > 0; }
};

FlowSamples sample_flow(const VectorField& u, bool with_laplacian);
/// Pointwise (1 - theta) a + theta b; both must carry the same fields.
FlowSamples interpolate(const FlowSamples& a, const FlowSamples& b, double theta);

/// Largest stable step allowed by the guard h <= cfl / (n max|u|).
double cfl_limit(const WaveGrid& grid, double max_speed, double cfl);

/// Exponential Euler step for the vorticity form dw + u.grad w dt = Lap w dt + curl P xi:
///   w^ <- e^{-|k|^2 h} (w^ - h N^(w)) + |k|^{1-alpha/2} eta^k,
/// with eta from OuIncrements (exact stochastic convolution per mode).
class FlowStepper {
 public:
  FlowStepper(const NoiseModel& model, double h, int substeps = 1, double cfl = 0.5);

  const NoiseModel& model() const { return *model_; }
  const OuIncrements& increments() const { return inc_; }
  double h() const { return inc_.h(); }
  double cfl() const { return cfl_; }

  /// Advances the state by h. `now` must sample state.u; pass nullptr to sample here.
  /// Returns the eta field that was applied (feeds XProcess on the same path).
  SpectralField step(FlowState& state, Rng& rng, const FlowSamples* now = nullptr) const;

 private:
  const NoiseModel* model_;
  OuIncrements inc_;
  double cfl_;
};

/// Convenience wrapper with substeps = 1.
FlowState sns_step(const FlowState& state, const NoiseModel& model, double h, Rng& rng, double cfl = 0.5);

/// Gaussian solution of dX - Lap X dt = P xi, X(0) = u0, advanced exactly per mode.
class XProcess {
 public:
  explicit XProcess(VectorField u0) : x_(std::move(u0)) { x_.divergence_free = true; }

  const VectorField& value() const { return x_; }
  double t() const { return t_; }
  /// Uses the same eta as FlowStepper::step so that u - X is the remainder psi.
  void advance(const NoiseModel& model, const OuIncrements& inc, const SpectralField& eta);

 private:
  VectorField x_;
  double t_ = 0.0;
};

/// Stepper form of X for the given model and step.
class XStepper {
 public:
  XStepper(VectorField u0, const NoiseModel& model, double h, int substeps = 1)
      : x_(std::move(u0)), model_(&model), inc_(model, h, substeps) {}
  const VectorField& step(Rng& rng) {
    x_.advance(*model_, inc_, inc_.next(rng));
    return x_.value();
  }
  const XProcess& process() const { return x_; }

 private:
  XProcess x_;
  const NoiseModel* model_;
  OuIncrements inc_;
};

/// Psi[w1, w2]_t = -int_0^t P_{t-s} Leray div(w1 (x)_s w2) ds by the trapezoid rule over
/// trajectories sampled at s_i = i * step, i = 0..N with N step = t.
VectorField psi_bilinear(const std::vector<VectorField>& w1, const std::vector<VectorField>& w2, double t,
                         double step);

/// Symmetrized div(a (x)_s b)_i = (1/2) sum_j d_j (a_i b_j + b_i a_j).
VectorField div_sym_tensor(const VectorField& a, const VectorField& b);

/// log V_{r,beta}(u) = r log(1 + ||u||_{H^beta}^2) + c_star ||u||_{H^1}^2.
double log_lyapunov_functional(const VectorField& u, double r, double beta, double c_star);
double lyapunov_functional(const VectorField& u, double r, double beta, double c_star);
inline double default_beta(double alpha) { return (alpha - 3.0) / 2.0; }

/// Throws NumericalError naming `what` if any coefficient is not finite.
void require_finite(const SpectralField& f, const std::string& what, double t);

}  // namespace medianflow
