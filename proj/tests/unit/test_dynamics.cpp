#include <gtest/gtest.h>

#include <cmath>

#include "medianflow/flow.hpp"
#include "medianflow/lyapunov.hpp"
#include "medianflow/noise.hpp"
#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"
#include "medianflow/random.hpp"
#include "medianflow/scalar.hpp"

using namespace medianflow;

namespace {

SpectralField pair(const WaveGrid& g, Wavenumber k, Complex c = 1.0) {
  SpectralField f(g);
  f.set(k, c);
  return f;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
  return m;
}

double max_diff(const VectorField& a, const VectorField& b) { return std::max(max_diff(a.c1, b.c1), max_diff(a.c2, b.c2)); }

VectorField random_velocity(const WaveGrid& g, std::uint64_t seed, double decay = 3.0) {
  Rng rng(seed);
  return biot_savart(random_field(g, rng, decay));
}

}  // namespace

// ---------------------------------------------------------------- noise

TEST(Noise, OuIncrementVarianceClosedForm) {
  EXPECT_NEAR(ou_increment_variance(1.0, 1.0, 0.1), 0.0906346234, 1e-9);
  EXPECT_DOUBLE_EQ(ou_increment_variance(0.0, 2.0, 0.1), 0.2);
}

TEST(Noise, OuUpdateIsExactInDistribution) {
  Rng rng(7);
  const double decay = 2.0, h = 0.3;
  double m = 0.0, m2 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    Complex c = ou_update(1.0, decay, 1.0, h, rng);
    m += c.real();
    m2 += std::norm(c - std::exp(-decay * h));
  }
  EXPECT_NEAR(m / n, std::exp(-0.6), 4.0 * std::sqrt(0.2 / n));
  EXPECT_NEAR(m2 / n, (1.0 - std::exp(-1.2)) / 4.0, 0.03 * (1.0 - std::exp(-1.2)) / 4.0);
}

TEST(Noise, ZetaIncrementsHaveComplexBrownianMoments) {
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 2.0);
  Rng rng(3);
  const double h = 0.01;
  double e2 = 0.0, z2 = 0.0;
  const int n = 4000;
  const auto rep = model.forced().front();
  for (int i = 0; i < n; ++i) {
    auto z = sample_zeta_increments(model, h, rng);
    EXPECT_LT(z.hermitian_defect(), 1e-15);
    e2 += std::norm(z.at(rep));
    z2 += (z.at(rep) * z.at(rep)).real();
  }
  EXPECT_NEAR(e2 / n, 4.0 * h, 0.1 * 4.0 * h);
  EXPECT_NEAR(z2 / n, 0.0, 0.1 * 4.0 * h);
}

TEST(Noise, ForcingIsDivergenceFreeWithMatchingCurl) {
  auto g = make_grid(16);
  NoiseModel model(g, 11.0, 1.0);
  Rng rng(5);
  auto z = sample_zeta_increments(model, 0.1, rng);
  auto v = forcing_velocity(model, z);
  EXPECT_LT(divergence_defect(v), 1e-14);
  EXPECT_LT(max_diff(curl(v), vorticity_forcing(model, z)), 1e-14);
  // Per-mode variance |k|^{-alpha} of the velocity forcing: |v^(k)| = |k|^{-alpha/2} |dz|.
  Wavenumber k{2, 1};
  double vk = std::sqrt(std::norm(v.c1[k]) + std::norm(v.c2[k]));
  EXPECT_NEAR(vk, std::pow(5.0, -2.75) * std::abs(z[k]), 1e-15);
}

TEST(Noise, KmaxRestrictsForcedModes) {
  auto g = make_grid(32);
  NoiseModel model(g, 12.0, 1.0, 0, 3.0);
  for (std::size_t idx : model.forced()) EXPECT_LE(g.wavenumber(idx).norm2(), 9);
  EXPECT_TRUE(model.is_forced({3, 0}));
  EXPECT_FALSE(model.is_forced({3, 1}));
  // 0 < |k| <= 3 holds 28 lattice points, 14 pairs.
  EXPECT_EQ(model.forced().size(), 14u);
}

TEST(Noise, RejectsRoughForcing) {
  auto g = make_grid(16);
  EXPECT_THROW(NoiseModel(g, 10.0), std::invalid_argument);
  EXPECT_THROW(NoiseModel(g, 12.0, -1.0), std::invalid_argument);
}

TEST(Noise, OuIncrementsVarianceAndDeterminism) {
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 1.5);
  const double h = 0.05;
  OuIncrements inc(model, h);
  Rng a(11), b(11);
  EXPECT_EQ(max_diff(inc.next(a), inc.next(b)), 0.0);
  Wavenumber k{1, 1};
  double s = 0.0;
  const int n = 20000;
  Rng rng(12);
  for (int i = 0; i < n; ++i) s += std::norm(inc.next(rng)[k]);
  const double expect = ou_increment_variance(2.0, 2.25, h);
  EXPECT_NEAR(s / n, expect, 0.04 * expect);
}

TEST(Noise, SubstepsShareTheFinePath) {
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 1.0);
  const double h = 0.02;
  OuIncrements coarse(model, h, 2), fine(model, h / 2, 1);
  Rng a(99), b(99);
  auto eta = coarse.next(a);
  auto e0 = fine.next(b);
  auto e1 = fine.next(b);
  SpectralField combined = heat_propagate(e0, h / 2) + e1;
  EXPECT_LT(max_diff(eta, combined), 1e-15);
}

TEST(Noise, ZeroSigmaConsumesNoRandomness) {
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 0.0);
  OuIncrements inc(model, 0.1);
  Rng rng(4), ref(4);
  EXPECT_TRUE(inc.next(rng).is_zero());
  EXPECT_EQ(rng.normal(), ref.normal());
}

// ---------------------------------------------------------------- flow

TEST(Flow, SingleModeDecaysExactlyWithoutNoise) {
  auto g = make_grid(32);
  NoiseModel model(g, 12.0, 0.0);
  FlowState s(pair(g, {2, 0}, 0.7));
  FlowStepper stepper(model, 0.01);
  Rng rng(1);
  for (int i = 0; i < 10; ++i) stepper.step(s, rng);
  EXPECT_NEAR((s.w[Wavenumber{2, 0}].real()), 0.7 * std::exp(-0.4), 1e-14);
  EXPECT_NEAR(s.t, 0.1, 1e-15);
  EXPECT_LT(max_diff(s.u, biot_savart(s.w)), 1e-15);
}

TEST(Flow, ZeroStaysZeroWithoutNoise) {
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 0.0);
  FlowState s{SpectralField(g)};
  FlowStepper stepper(model, 0.05);
  Rng rng(1);
  for (int i = 0; i < 5; ++i) stepper.step(s, rng);
  EXPECT_TRUE(s.w.is_zero());
}

TEST(Flow, DeterministicStepConvergesAtFirstOrder) {
  auto g = make_grid(32);
  NoiseModel model(g, 12.0, 0.0);
  Rng rng(8);
  auto w0 = random_field(g, rng, 2.0);
  w0 *= 4.0 / sobolev_norm(w0, 0.0);
  auto run = [&](double h) {
    FlowState s(w0);
    FlowStepper st(model, h, 1, 10.0);
    Rng r(0);
    long n = std::lround(0.2 / h);
    for (long i = 0; i < n; ++i) st.step(s, r);
    return s.w;
  };
  auto a = run(0.01), b = run(0.005), c = run(0.0025);
  double e1 = sobolev_norm(a - b, 0.0), e2 = sobolev_norm(b - c, 0.0);
  EXPECT_GT(e1 / e2, 1.7);
  EXPECT_LT(e1 / e2, 2.3);
}

TEST(Flow, CflGuardThrows) {
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 0.0);
  FlowState s(pair(g, {1, 0}, 100.0));
  FlowStepper stepper(model, 0.1);
  Rng rng(1);
  EXPECT_THROW(stepper.step(s, rng), CflViolation);
}

TEST(Flow, GaussianProcessWithoutNoiseIsHeatFlow) {
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 0.0);
  auto u0 = random_velocity(g, 2);
  XStepper x(u0, model, 0.03);
  Rng rng(1);
  for (int i = 0; i < 4; ++i) x.step(rng);
  EXPECT_LT(max_diff(x.process().value(), heat_propagate(u0, 0.12)), 1e-14);
}

TEST(Flow, GaussianProcessEnergyMatchesClosedForm) {
  auto g = make_grid(16);
  const double alpha = 10.5, t = 0.4;
  NoiseModel model(g, alpha, 1.0);
  double expect = 0.0;
  for (Wavenumber k : g.active()) {
    double k2 = double(k.norm2());
    expect += std::pow(k2, -alpha / 2.0) * (1.0 - std::exp(-2.0 * k2 * t)) / (2.0 * k2);
  }
  const int paths = 3000;
  double s = 0.0, s2 = 0.0;
  for (int p = 0; p < paths; ++p) {
    XStepper x(VectorField(g), model, 0.1);
    Rng rng(seed_for(21, p));
    for (int i = 0; i < 4; ++i) x.step(rng);
    double e = std::pow(sobolev_norm(x.process().value(), 0.0), 2);
    s += e;
    s2 += e * e;
  }
  double mean = s / paths, se = std::sqrt((s2 / paths - mean * mean) / paths);
  EXPECT_NEAR(mean, expect, 4.0 * se);
}

TEST(Flow, FlowMinusGaussianIsRemainder) {
  // With identical eta the difference u - X obeys a noise-free equation: at w0 = 0
  // and one step the nonlinearity vanishes, so u = X exactly.
  auto g = make_grid(16);
  NoiseModel model(g, 12.0, 1.0);
  FlowStepper st(model, 0.05);
  FlowState s{SpectralField(g)};
  XProcess x{VectorField(g)};
  Rng rng(3);
  auto eta = st.step(s, rng);
  x.advance(model, st.increments(), eta);
  EXPECT_LT(max_diff(s.u, x.value()), 1e-16);
}

TEST(Flow, PsiVanishesOnShearAndIsSymmetric) {
  auto g = make_grid(16);
  VectorField shear(g);
  shear.c1.set({0, 1}, Complex(0.0, 0.5));
  std::vector<VectorField> a(3, shear);
  EXPECT_LT(sobolev_norm(psi_bilinear(a, a, 0.2, 0.1), 0.0), 1e-15);
  std::vector<VectorField> u, v;
  for (int i = 0; i < 3; ++i) {
    u.push_back(random_velocity(g, 10 + i));
    v.push_back(random_velocity(g, 20 + i));
  }
  auto p = psi_bilinear(u, v, 0.2, 0.1);
  EXPECT_LT(max_diff(p, psi_bilinear(v, u, 0.2, 0.1)), 1e-14);
  EXPECT_LT(divergence_defect(p), 1e-13);
  EXPECT_THROW(psi_bilinear(u, v, 0.3, 0.1), std::invalid_argument);
}

TEST(Flow, LyapunovFunctionalExample) {
  auto g = make_grid(16);
  VectorField u(g);
  u.c2.set({1, 0}, 1.0);  // ||u||^2 = 2 in every H^s
  EXPECT_NEAR(lyapunov_functional(u, 1.0, default_beta(12.0), 0.01), 3.0 * std::exp(0.02), 1e-12);
  EXPECT_NEAR(log_lyapunov_functional(u, 2.0, 4.5, 0.01), 2.0 * std::log(3.0) + 0.02, 1e-12);
  EXPECT_THROW(lyapunov_functional(u, 0.5, 4.5, 0.01), std::invalid_argument);
}

// ---------------------------------------------------------------- scalar

TEST(Scalar, AdvectionIsSkewAdjoint) {
  auto g = make_grid(32);
  auto u = random_velocity(g, 4);
  Rng rng(5);
  auto rho = random_field(g, rng, 0.5);
  EXPECT_LT(std::abs(inner(rho, apply_L(u, rho, OpKind::ADV))), 1e-12 * sobolev_norm(rho, 1.0));
}

TEST(Scalar, FusedOperatorMatchesDirectSum) {
  auto g = make_grid(16);
  Rng rng(6);
  auto w = random_field(g, rng, 1.0);
  auto rho = random_field(g, rng, 1.0);
  auto direct = apply_L_direct(w, rho);
  auto fused = apply_L(biot_savart(w), rho, OpKind::LNS);
  EXPECT_LT(max_diff(direct, fused), 1e-12);
  EXPECT_THROW(apply_L_direct(SpectralField(make_grid(64)), SpectralField(make_grid(64))), std::invalid_argument);
}

TEST(Scalar, LnsCoefficientExamples) {
  EXPECT_DOUBLE_EQ(lns_coefficient({1, 0}, {1, 1}), -0.5);
  EXPECT_DOUBLE_EQ(lns_coefficient({1, 0}, {0, 1}), 0.0);  // equal moduli
  EXPECT_DOUBLE_EQ(lns_coefficient({2, 0}, {1, 0}), 0.0);  // parallel
  EXPECT_DOUBLE_EQ(lns_coefficient({0, 2}, {1, 1}), -0.5);
}

TEST(Scalar, DivergenceOfRIsLns) {
  auto g = make_grid(32);
  auto u = random_velocity(g, 7);
  Rng rng(8);
  auto rho = random_field(g, rng, 1.0);
  EXPECT_LT(max_diff(div(R_operator(u, rho)), apply_L(u, rho, OpKind::LNS)), 1e-12);
}

TEST(Scalar, HeatDecayWithoutFlow) {
  auto g = make_grid(16);
  ScalarState s(pair(g, {3, 0}, 2.0), OpKind::ADV, 0.2);
  EXPECT_NEAR(s.log_amp, std::log(2.0 * std::sqrt(2.0)), 1e-15);
  ScalarStepper st(OpKind::ADV, 0.2, 0.05, TimeScheme::RK4);
  auto z = sample_flow(VectorField(g), false);
  double inc = st.step(s, z, z);
  EXPECT_NEAR(inc, -0.2 * 9.0 * 0.05, 1e-14);
  EXPECT_NEAR(sobolev_norm(s.pi, 0.0), 1.0, 1e-15);
}

TEST(Scalar, LogDerivativeIsDissipationForAdvection) {
  auto g = make_grid(32);
  auto u = sample_flow(random_velocity(g, 9), false);
  Rng rng(10);
  ScalarState s(random_field(g, rng, 1.0), OpKind::ADV, 0.05);
  double gnorm = sobolev_norm(s.pi, 1.0);
  EXPECT_NEAR(log_derivative(s, u), -0.05 * gnorm * gnorm, 1e-12);
}

TEST(Scalar, RungeKuttaIsFourthOrderForFrozenFlow) {
  auto g = make_grid(32);
  auto u = sample_flow(random_velocity(g, 11, 4.0), false);
  Rng rng(12);
  auto rho0 = random_field(g, rng, 2.0);
  auto run = [&](double h) {
    ScalarState s(rho0, OpKind::ADV, 0.05);
    ScalarStepper st(OpKind::ADV, 0.05, h, TimeScheme::RK4);
    long n = std::lround(0.4 / h);
    for (long i = 0; i < n; ++i) st.step(s, u, u);
    return s.rho();
  };
  auto a = run(0.04), b = run(0.02), c = run(0.01);
  double r = sobolev_norm(a - b, 0.0) / sobolev_norm(b - c, 0.0);
  EXPECT_GT(r, 12.0);
  EXPECT_LT(r, 20.0);
}

TEST(Scalar, PhiIntegratorMatchesTrapezoidAndClosedForm) {
  auto g = make_grid(16);
  const double kappa = 0.3, t = 0.8, h = 0.01;
  VectorField u(g);
  u.c2.set({1, 0}, 1.0);
  auto rho0 = pair(g, {0, 2});
  long n = std::lround(t / h);
  std::vector<VectorField> us(n + 1, u);
  std::vector<SpectralField> ws;
  PhiIntegrator integ(rho0, kappa, h, OpKind::ADV);
  for (long i = 0; i <= n; ++i) {
    ws.push_back(heat_propagate(rho0, i * h, kappa));
    integ.push(u);
  }
  auto trap = phi_bilinear(us, ws, kappa, t, OpKind::ADV, h);
  EXPECT_LT(max_diff(trap, integ.value()), 1e-14);
  // u^(k) . i j rho^(j) = 2i at l = (1, 2).
  const double a = 5.0 * kappa, b = 4.0 * kappa;
  Complex exact = Complex(0.0, -2.0) * (std::exp(-b * t) - std::exp(-a * t)) / (a - b);
  EXPECT_NEAR(std::abs(integ.value()[Wavenumber{1, 2}] - exact), 0.0, 1e-4 * std::abs(exact));
}

TEST(Scalar, RejectsBadDiffusivityAndZeroData) {
  auto g = make_grid(16);
  EXPECT_THROW(ScalarState(pair(g, {1, 0}), OpKind::ADV, 0.0), std::invalid_argument);
  EXPECT_THROW(ScalarState(pair(g, {1, 0}), OpKind::ADV, 1.5), std::invalid_argument);
  EXPECT_THROW(ScalarState(SpectralField(g), OpKind::ADV, 0.5), DegenerateField);
  EXPECT_THROW(parse_op_kind("foo"), std::invalid_argument);
  EXPECT_EQ(parse_scheme("rk4"), TimeScheme::RK4);
}
