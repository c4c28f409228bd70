#include "medianflow/chaos.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "medianflow/flow.hpp"
#include "medianflow/noise.hpp"
#include "medianflow/norms.hpp"
#include "medianflow/random.hpp"

namespace medianflow {

double chaos_radius(OpKind op) { return op == OpKind::ADV ? 1.0 : std::sqrt(2.0); }

std::vector<Wavenumber> default_ell_set(OpKind op) {
  const long r2 = op == OpKind::ADV ? 1 : 2;
  std::vector<Wavenumber> out;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      Wavenumber l{a, b};
      if (l.norm2() > 0 && l.norm2() <= r2) out.push_back(l);
    }
  return out;
}

double chaos_inner_integral(double a, double b, double c, double t, double s) {
  const double d = a - b - c;
  const double u = t - s;
  const double lead = std::exp(-a * u - b * s);
  if (std::abs(d * u) < 1e-300) return lead * u;
  return lead * std::expm1(d * u) / d;
}

double chaos_time_integral(double a, double b, double c, double t) {
  auto f = [&](double s) {
    double v = chaos_inner_integral(a, b, c, t, s);
    return v * v;
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, t, 20, 1e-10, &err);
}

namespace {

void validate(const ChaosSpec& spec) {
  if (!(spec.t > 0.0)) throw std::invalid_argument("chaos: t must be positive");
  if (!(spec.kappa > 0.0)) throw std::invalid_argument("chaos: kappa must be positive");
  const int K = spec.rho0.grid().cutoff();
  if (spec.k_max < 0 || spec.k_max > K) throw std::invalid_argument("chaos: k_max must lie in [0, grid cutoff] (0 means the cutoff)");
}

int effective_kmax(const ChaosSpec& spec) { return spec.k_max > 0 ? spec.k_max : spec.rho0.grid().cutoff(); }

}  // namespace

ChaosVariance first_chaos_variance(const ChaosSpec& spec) {
  validate(spec);
  const auto& g = spec.rho0.grid();
  const int kmax = effective_kmax(spec);
  if (kmax == 0) throw std::invalid_argument("chaos: k_max must be positive");
  ChaosVariance out;
  out.ell = spec.ell_set.empty() ? default_ell_set(spec.op) : spec.ell_set;
  const double r2 = chaos_radius(spec.op) * chaos_radius(spec.op) * (1.0 + 1e-12);
  const double s2 = spec.sigma * spec.sigma;
  for (Wavenumber l : out.ell) {
    if (double(l.norm2()) > r2) throw std::invalid_argument("chaos: ell outside the projection ball");
    double var = 0.0;
    // Only j = l - k in the support of rho0 contributes.
    for (std::size_t idx : g.active_index()) {
      Complex r = spec.rho0.at(idx);
      if (r == Complex{}) continue;
      Wavenumber j = g.wavenumber(idx);
      Wavenumber k = l - j;
      const long k2 = k.norm2();
      if (k2 == 0 || double(k2) > double(kmax) * kmax * (1.0 + 1e-12)) continue;
      const double geo = double(dot(l, k.perp()));
      if (geo == 0.0) continue;
      double weight = geo * geo;
      if (spec.op == OpKind::LNS) {
        double gl = 1.0 - double(k2) / double(j.norm2());
        weight *= gl * gl;
        if (weight == 0.0) continue;
      }
      const double a = spec.kappa * double(l.norm2());
      const double b = spec.kappa * double(j.norm2());
      const double c = double(k2);
      var += weight * std::norm(r) * std::pow(double(k2), -0.5 * spec.alpha - 1.0) *
             chaos_time_integral(a, b, c, spec.t);
    }
    out.per_ell.push_back(s2 * var);
    out.total += s2 * var;
  }
  return out;
}

ChaosVariance first_chaos_variance_adv(ChaosSpec spec) {
  spec.op = OpKind::ADV;
  return first_chaos_variance(spec);
}

ChaosVariance first_chaos_variance_lns(ChaosSpec spec) {
  spec.op = OpKind::LNS;
  return first_chaos_variance(spec);
}

double lower_bound_ratio(const ChaosSpec& spec, double M) {
  const double s = spec.op == OpKind::ADV ? spec.alpha / 2.0 : spec.alpha / 2.0 + 1.0;
  const double n0 = sobolev_norm(spec.rho0, 0.0);
  if (n0 == 0.0) throw DegenerateField("lower_bound_ratio: zero initial datum");
  const double hneg = sobolev_norm(spec.rho0, -s) / n0;
  const double reference = std::pow(M, -6.0) / spec.kappa * hneg * hneg;
  return first_chaos_variance(spec).total / (n0 * n0) / reference;
}

long geometric_sum(Wavenumber k) {
  if (k.norm2() == 0) throw std::invalid_argument("geometric_sum: k must be nonzero");
  long sum = 0;
  for (Wavenumber l : default_ell_set(OpKind::LNS)) {
    long a = l.norm2() - 2 * dot(k, l);
    long b = dot(k.perp(), l);
    sum += a * a * b * b;
  }
  return sum;
}

std::pair<double, double> norm_equivalence_check(const SpectralField& phi, double alpha) {
  const auto& g = phi.grid();
  double lhs = 0.0;
  for (Wavenumber k : g.active()) {
    const double wk = std::pow(double(k.norm2()), -alpha);
    double inner_sum = 0.0;
    for (std::size_t idx : g.active_index()) {
      double e = std::norm(phi.at(idx));
      if (e == 0.0) continue;
      long q = (g.wavenumber(idx) + k).norm2();
      if (q == 0) continue;
      inner_sum += std::pow(double(q), -alpha) * e;
    }
    lhs += wk * inner_sum;
  }
  double rhs = sobolev_norm(phi, -alpha);
  return {lhs, rhs * rhs};
}

std::pair<double, double> lns_norm_equivalence_check(const SpectralField& psi, double alpha) {
  const auto& g = psi.grid();
  double lhs = 0.0;
  for (Wavenumber k : g.active()) {
    const double k2 = double(k.norm2());
    const double wk = std::pow(k2, -alpha);
    double inner_sum = 0.0;
    for (std::size_t idx : g.active_index()) {
      double e = std::norm(psi.at(idx));
      if (e == 0.0) continue;
      Wavenumber j = g.wavenumber(idx);
      long q = (j + k).norm2();
      if (q == 0) continue;
      double m = 1.0 - k2 / double(j.norm2());
      inner_sum += std::pow(double(q), -alpha - 1.0) * m * m * e;
    }
    lhs += wk * inner_sum;
  }
  double rhs = sobolev_norm(psi, -(alpha + 1.0));
  return {lhs, rhs * rhs};
}

namespace {

struct Moments {
  std::vector<double> s, s2;           // |Phi^(l)|^2 moments
  std::vector<double> re, re2, im, im2;
  std::vector<double> tot;             // per-path totals for the total's error
  explicit Moments(std::size_t m) : s(m), s2(m), re(m), re2(m), im(m), im2(m) {}

  void add(const SpectralField& phi, const std::vector<Wavenumber>& ell) {
    double total = 0.0;
    for (std::size_t i = 0; i < ell.size(); ++i) {
      Complex c = phi[ell[i]];
      double e = std::norm(c);
      s[i] += e;
      s2[i] += e * e;
      re[i] += c.real();
      re2[i] += c.real() * c.real();
      im[i] += c.imag();
      im2[i] += c.imag() * c.imag();
      total += e;
    }
    tot.push_back(total);
  }

  ChaosMcEstimate finish(const std::vector<Wavenumber>& ell, int n) const {
    ChaosMcEstimate est;
    est.ell = ell;
    auto se = [n](double sum, double sum2) {
      double m = sum / n;
      double var = std::max(0.0, (sum2 - n * m * m) / (n - 1));
      return std::sqrt(var / n);
    };
    for (std::size_t i = 0; i < ell.size(); ++i) {
      est.mean.push_back(s[i] / n);
      est.stderr_.push_back(se(s[i], s2[i]));
      double zr = se(re[i], re2[i]);
      double zi = se(im[i], im2[i]);
      if (zr > 0) est.first_moment_z = std::max(est.first_moment_z, std::abs(re[i] / n) / zr);
      if (zi > 0) est.first_moment_z = std::max(est.first_moment_z, std::abs(im[i] / n) / zi);
    }
    double ts = 0.0, ts2 = 0.0;
    for (double v : tot) {
      ts += v;
      ts2 += v * v;
    }
    est.total = ts / n;
    est.total_stderr = se(ts, ts2);
    return est;
  }
};

}  // namespace

ChaosMcResult chaos_monte_carlo(const ChaosSpec& spec, const ChaosMcConfig& cfg) {
  validate(spec);
  if (cfg.paths < 2) throw std::invalid_argument("chaos MC needs at least 2 paths");
  const auto& g = spec.rho0.grid();
  const long steps = std::max(1L, std::lround(spec.t / cfg.h));
  const double h = spec.t / double(steps);
  NoiseModel model(g, spec.alpha, spec.sigma, cfg.seed, effective_kmax(spec));
  const auto ell_adv = default_ell_set(OpKind::ADV);
  const auto ell_lns = default_ell_set(OpKind::LNS);
  Moments madv(ell_adv.size()), mlns(ell_lns.size());

  for (int p = 0; p < cfg.paths; ++p) {
    Rng rng(seed_for(cfg.seed, std::uint64_t(p)));
    XStepper x(VectorField(g), model, h);
    PhiIntegrator padv(spec.rho0, spec.kappa, h, OpKind::ADV);
    PhiIntegrator plns(spec.rho0, spec.kappa, h, OpKind::LNS);
    if (cfg.adv) padv.push(x.process().value());
    if (cfg.lns) plns.push(x.process().value());
    for (long i = 0; i < steps; ++i) {
      const auto& u = x.step(rng);
      if (cfg.adv) padv.push(u);
      if (cfg.lns) plns.push(u);
    }
    if (cfg.adv) madv.add(padv.value(), ell_adv);
    if (cfg.lns) mlns.add(plns.value(), ell_lns);
  }
  ChaosMcResult out;
  out.paths = cfg.paths;
  out.h = h;
  if (cfg.adv) out.adv = madv.finish(ell_adv, cfg.paths);
  if (cfg.lns) out.lns = mlns.finish(ell_lns, cfg.paths);
  return out;
}

}  // namespace medianflow
