#include "medianflow/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "medianflow/chaos.hpp"
#include "medianflow/experiment.hpp"
#include "medianflow/lyapunov.hpp"
#include "medianflow/noise.hpp"
#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"
#include "medianflow/random.hpp"
#include "medianflow/snapshot.hpp"

namespace medianflow {

VerifyHooks::VerifyHooks() : leray([](const VectorField& v) { return leray_project(v); }) {}

namespace {

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
  return m;
}

Check below(const std::string& name, double value, double limit, std::string detail = {}) {
  return {name, value <= limit, value, limit, std::move(detail)};
}

}  // namespace

SpectralField brute_force_product(const SpectralField& a, const SpectralField& b) {
  const auto& g = a.grid();
  SpectralField out(g);
  for (std::size_t i : g.active_index())
    for (std::size_t j : g.active_index()) {
      Wavenumber l = g.wavenumber(i) + g.wavenumber(j);
      if (l.norm2() == 0 || !g.is_active(l)) continue;
      out.raw()[g.index(l)] += a.at(i) * b.at(j);
    }
  return out;
}

std::vector<Check> run_verify(const VerifyHooks& hooks) {
  std::vector<Check> out;
  auto g32 = make_grid(32), g16 = make_grid(16);
  Rng rng(20240601);

  {
    VectorField v(random_field(g32, rng, 1.0), random_field(g32, rng, 1.0));
    auto p = hooks.leray(v);
    out.push_back(below("leray divergence", divergence_defect(p), 1e-12));
    out.push_back(below("leray idempotent", std::max(max_diff(hooks.leray(p).c1, p.c1), max_diff(hooks.leray(p).c2, p.c2)),
                        1e-12));
  }
  {
    auto w = random_field(g32, rng, 1.0);
    auto u = biot_savart(w);
    out.push_back(below("biot_savart divergence", divergence_defect(u), 1e-12));
    out.push_back(below("curl o biot_savart = id", max_diff(curl(u), w), 1e-12));
    auto f = random_field(g32, rng, 1.0);
    out.push_back(below("div o inv_grad = -id", max_diff(div(inv_grad(f)), f * -1.0), 1e-12,
                        "multiplier i k/|k|^2, i.e. grad (-Lap)^{-1}"));
    out.push_back(below("div o grad = laplacian", max_diff(div(grad(f)), laplacian(f)), 1e-9));
  }
  {
    auto a = random_field(g16, rng, 0.0), b = random_field(g16, rng, 0.0);
    out.push_back(below("dealiased product vs convolution (n=16)", max_diff(dealiased_product(a, b), brute_force_product(a, b)),
                        1e-10));
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      auto w = random_field(g16, rng, 1.0), rho = random_field(g16, rng, 1.0);
      auto d = apply_L_direct(w, rho);
      worst = std::max(worst, sobolev_norm(apply_L(biot_savart(w), rho, OpKind::LNS) - d, 0.0) / sobolev_norm(d, 0.0));
    }
    out.push_back(below("LNS composite vs direct sum (relative)", worst, 1e-10));
    auto u = biot_savart(random_field(g32, rng, 2.0));
    auto rho = random_field(g32, rng, 1.0);
    out.push_back(below("advection skew symmetry", std::abs(inner(rho, apply_L(u, rho, OpKind::ADV))), 1e-12));
  }
  {
    NoiseModel model(g32, 12.0, 1.0);
    auto z = sample_zeta_increments(model, 0.1, rng);
    auto v = forcing_velocity(model, z);
    out.push_back(below("forcing divergence", divergence_defect(v), 1e-12));
    out.push_back(below("curl of velocity forcing = vorticity forcing", max_diff(curl(v), vorticity_forcing(model, z)),
                        1e-14));
  }
  {
    ExperimentConfig cfg;
    cfg.grid.n = 16;
    cfg.noise.sigma = 0.0;
    cfg.flow.dt = 0.01;
    cfg.flow.t_total = 1.0;
    cfg.scalar.kappa = 0.3;
    cfg.scalar.rho0 = "mode:2";
    auto r = run(cfg, 1);
    out.push_back(below("heat control lambda_hat = -kappa m^2", std::abs(r.lambda_hat + 1.2), 1e-10));
    out.push_back(below("heat control FK residual", std::abs(r.fk_residual), 1e-10));
    auto r2 = run(cfg, 1);
    out.push_back(below("repeatable run", std::abs(r.lambda_hat - r2.lambda_hat), 0.0));
  }
  {
    const double a = 0.1, b = 0.4, c = 13.0, t = 3.0;
    const int n = 100000;
    double hstep = t / n, sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = chaos_inner_integral(a, b, c, t, (i + 0.5) * hstep);
      sum += v * v;
    }
    double q = chaos_time_integral(a, b, c, t);
    out.push_back(below("chaos time integral vs midpoint rule", std::abs(q - sum * hstep) / q, 1e-6));
  }
  {
    out.push_back({"geometric_sum((1,0)) = 34", geometric_sum({1, 0}) == 34, double(geometric_sum({1, 0})), 34.0, ""});
    double cmin = 1e300;
    for (int k1 = -30; k1 <= 30; ++k1)
      for (int k2 = -30; k2 <= 30; ++k2) {
        Wavenumber k{k1, k2};
        if (k.norm2() == 0 || k.norm2() > 900) continue;
        cmin = std::min(cmin, double(geometric_sum(k)) / double(k.norm2() * k.norm2()));
      }
    Check c{"geometric constant min Q/|k|^4 (|k| <= 30)", cmin > 0.0, cmin, 0.0, "empirical c"};
    out.push_back(c);
  }
  {
    auto phi = random_field(g16, rng, 0.0);
    auto [l1, r1] = norm_equivalence_check(phi, 2.0);
    auto [l3, r3] = norm_equivalence_check(phi * 3.0, 2.0);
    out.push_back(below("norm equivalence ratio scale invariant", std::abs(l3 / r3 - l1 / r1) / (l1 / r1), 1e-12));
  }
  out.push_back(below("t_star(0.1, 10, 12) reference", std::abs(t_star(0.1, 10, 12) - 2.5328436022934504), 1e-9));
  {
    auto f = random_field(g16, rng, 1.0);
    std::stringstream ss;
    write_snapshot(ss, f);
    out.push_back(below("snapshot round trip", max_diff(read_snapshot(ss, g16), f), 0.0));
  }
  return out;
}

std::string format_check(const Check& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s  %-48s value=%.3e limit=%.3e", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.limit);
  std::string s = buf;
  if (!c.detail.empty()) s += "  (" + c.detail + ")";
  return s;
}

}  // namespace medianflow
