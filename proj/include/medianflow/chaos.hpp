#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "medianflow/field.hpp"
#include "medianflow/scalar.hpp"

namespace medianflow {

/// First-chaos problem: Phi[X~, Y]_t projected onto low frequencies, where X~ is
/// the Gaussian velocity started from zero and Y_s = exp(kappa s Lap) rho0.
struct ChaosSpec {
  SpectralField rho0;
  double kappa = 0.1;
  double t = 1.0;
  std::vector<Wavenumber> ell_set;  // empty: every 0 < |l| <= radius(op)
  int k_max = 0;                    // 0: the grid cutoff
  OpKind op = OpKind::ADV;
  double alpha = 12.0;
  double sigma = 1.0;

  explicit ChaosSpec(SpectralField r) : rho0(std::move(r)) {}
};

/// Projection radius: 1 for ADV, sqrt 2 for LNS.
double chaos_radius(OpKind op);
std::vector<Wavenumber> default_ell_set(OpKind op);

struct ChaosVariance {
  std::vector<Wavenumber> ell;
  std::vector<double> per_ell;  // E|Phi^(l)|^2
  double total = 0.0;           // sum over ell
};

/// E|Phi^(l)|^2 = sigma^2 sum_k g^2 <l, k_perp>^2 |rho0^(l-k)|^2 |k|^{-alpha-2} int_0^t I(s)^2 ds,
/// I(s) = int_s^t e^{-kappa|l|^2(t-r)} e^{-kappa|l-k|^2 r} e^{-|k|^2(r-s)} dr in closed form,
/// g = 1 (ADV) or 1 - |k|^2/|l-k|^2 (LNS). The s-integral is adaptive Gauss-Kronrod.
ChaosVariance first_chaos_variance(const ChaosSpec& spec);
ChaosVariance first_chaos_variance_adv(ChaosSpec spec);
ChaosVariance first_chaos_variance_lns(ChaosSpec spec);

/// Closed form of the inner time integral I(s).
double chaos_inner_integral(double a, double b, double c, double t, double s);
/// int_0^t I(s)^2 ds with a = kappa|l|^2, b = kappa|l-k|^2, c = |k|^2.
double chaos_time_integral(double a, double b, double c, double t);

/// total / (kappa^{-1} M^{-6} ||rho0||^2_{H^{-s}}), s = alpha/2 (ADV) or alpha/2 + 1 (LNS).
double lower_bound_ratio(const ChaosSpec& spec, double M);

/// sum over the 8 lattice points 0 < |l| <= sqrt 2 of (|l|^2 - 2<k,l>)^2 <k_perp,l>^2.
long geometric_sum(Wavenumber k);

/// sum_k |k|^{-2a} ||e_k phi||^2_{H^{-a}} against ||phi||^2_{H^{-a}}, k over the grid's active set.
std::pair<double, double> norm_equivalence_check(const SpectralField& phi, double alpha);
/// sum_k |k|^{-2a} ||e_k (1 - |k|^2 (-Lap)^{-1}) psi||^2_{H^{-(a+1)}} against ||psi||^2_{H^{-(a+1)}}.
std::pair<double, double> lns_norm_equivalence_check(const SpectralField& psi, double alpha);

/// Monte Carlo over exact OU paths of X~ with trapezoid quadrature of Phi.
struct ChaosMcConfig {
  int paths = 2000;
  double h = 2e-3;          // rounded so that t is a whole number of steps
  std::uint64_t seed = 1;
  bool adv = true;
  bool lns = true;
};

struct ChaosMcEstimate {
  std::vector<Wavenumber> ell;
  std::vector<double> mean;     // per ell, E|Phi^(l)|^2
  std::vector<double> stderr_;  // per ell
  double total = 0.0;
  double total_stderr = 0.0;
  double first_moment_z = 0.0;  // max |mean Re/Im Phi^(l)| / its standard error
};

struct ChaosMcResult {
  ChaosMcEstimate adv, lns;
  int paths = 0;
  double h = 0.0;
};

/// `spec` supplies rho0, kappa, t, alpha, sigma and k_max; its op is ignored (both
/// operators are evaluated on the same paths when requested).
ChaosMcResult chaos_monte_carlo(const ChaosSpec& spec, const ChaosMcConfig& cfg);

}  // namespace medianflow
