// Acceptance suite: one PASS/FAIL line per headline criterion, tolerances pinned
// below. --fast skips the median-descent ensemble, --slow runs only that.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "medianflow/chaos.hpp"
#include "medianflow/experiment.hpp"
#include "medianflow/fft.hpp"
#include "medianflow/noise.hpp"
#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"
#include "medianflow/random.hpp"
#include "medianflow/verify.hpp"

using namespace medianflow;

namespace {

constexpr std::uint64_t kSeed = 20240601;

int failures = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void report(const std::string& name, bool pass, const std::string& detail, double seconds) {
  std::printf("%s  %-34s %s  [%.1fs]\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

// Runs `body`, which fills pass/detail; exceptions count as failures.
void criterion(const std::string& name, const std::function<void(bool&, std::string&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    body(pass, detail);
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("threw: ") + e.what();
  }
  report(name, pass, detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
  return m;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- criteria

void operator_identities() {
  criterion("operator identities", [](bool& pass, std::string& detail) {
    auto g = make_grid(32), g16 = make_grid(16);
    Rng rng(kSeed);
    double leray = 0, bs = 0, curl_bs = 0, div_ig = 0, prod = 0;
    for (int i = 0; i < 20; ++i) {
      VectorField v(random_field(g, rng, 0.0), random_field(g, rng, 0.0));
      leray = std::max(leray, divergence_defect(leray_project(v)));
      auto w = random_field(g, rng, 0.0);
      auto u = biot_savart(w);
      bs = std::max(bs, divergence_defect(u));
      curl_bs = std::max(curl_bs, max_diff(curl(u), w));
      // inv_grad carries the multiplier i k/|k|^2, i.e. grad (-Lap)^{-1}, so
      // its divergence is minus the identity on mean-zero fields.
      div_ig = std::max(div_ig, max_diff(div(inv_grad(w)), w * -1.0));
      auto a = random_field(g16, rng, 0.0), b = random_field(g16, rng, 0.0);
      prod = std::max(prod, max_diff(dealiased_product(a, b), brute_force_product(a, b)));
    }
    pass = leray <= 1e-12 && bs <= 1e-12 && curl_bs <= 1e-12 && div_ig <= 1e-12 && prod <= 1e-10;
    detail = fmt("div(leray)=%.1e div(bs)=%.1e |curl bs-id|=%.1e |div inv_grad+id|=%.1e |prod-conv|=%.1e "
                 "(limits 1e-12, 1e-10 for prod)",
                 leray, bs, curl_bs, div_ig, prod);
  });
}

void lns_equivalence() {
  criterion("LNS operator equivalence", [](bool& pass, std::string& detail) {
    auto g = make_grid(16);
    Rng rng(kSeed + 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      auto w = random_field(g, rng, 0.0), rho = random_field(g, rng, 0.0);
      auto d = apply_L_direct(w, rho);
      auto c = apply_L(biot_savart(w), rho, OpKind::LNS);
      worst = std::max(worst, sobolev_norm(c - d, 0.0) / sobolev_norm(d, 0.0));
    }
    pass = worst <= 1e-10;
    detail = fmt("max relative error %.2e over 100 inputs (limit 1e-10)", worst);
  });
}

void noise_law() {
  criterion("noise law", [](bool& pass, std::string& detail) {
    auto g = make_grid(16);
    const double alpha = 12.0, sigma = 1.3, h = 0.01;
    NoiseModel model(g, alpha, sigma);
    const Wavenumber ks[] = {{1, 0}, {1, 1}, {2, -1}, {0, 3}};
    const int nk = 4, samples = 10000;
    // Per sample: both components at every test mode.
    std::vector<std::array<Complex, 2>> x(std::size_t(nk) * samples);
    Rng rng(kSeed + 2);
    for (int s = 0; s < samples; ++s) {
      auto xi = forcing_velocity_increment(model, h, rng);
      for (int a = 0; a < nk; ++a) x[std::size_t(s) * nk + a] = {xi.c1[ks[a]], xi.c2[ks[a]]};
    }
    // z-score of a sample mean against its expectation.
    auto zscore = [&](const std::function<double(int)>& f, double expect) {
      double m = 0, m2 = 0;
      for (int s = 0; s < samples; ++s) {
        double v = f(s);
        m += v;
        m2 += v * v;
      }
      m /= samples;
      double var = (m2 / samples - m * m) * samples / (samples - 1.0);
      return std::abs(m - expect) / std::sqrt(var / samples);
    };
    double worst = 0.0;
    int stats = 0;
    for (int a = 0; a < nk; ++a) {
      const Wavenumber kp = ks[a].perp();
      const double s2 = sigma * sigma * h * std::pow(double(ks[a].norm2()), -1.0 - alpha / 2.0);
      auto at = [&](int s, int c) { return x[std::size_t(s) * nk + a][c]; };
      // Full 2x2 covariance sigma^2 h k_perp k_perp^T / |k|^{2+alpha}; its trace is sigma^2 h |k|^-alpha.
      for (int c = 0; c < 2; ++c)
        for (int d = c; d < 2; ++d) {
          const double expect = s2 * double(c == 0 ? kp.k1 : kp.k2) * double(d == 0 ? kp.k1 : kp.k2);
          worst = std::max(worst, zscore([&](int s) { return (at(s, c) * std::conj(at(s, d))).real(); }, expect));
          ++stats;
        }
      // Circular symmetry: E xi^2 = 0 (real and imaginary parts uncorrelated, equal variance).
      for (int part = 0; part < 2; ++part) {
        worst = std::max(worst, zscore([&](int s) {
                                  Complex v = at(s, 0) * at(s, 0) + at(s, 1) * at(s, 1);
                                  return part == 0 ? v.real() : v.imag();
                                },
                                0.0));
        ++stats;
      }
    }
    // Distinct modes are uncorrelated.
    for (int a = 0; a < nk; ++a)
      for (int b = a + 1; b < nk; ++b)
        for (int part = 0; part < 2; ++part) {
          worst = std::max(worst, zscore([&](int s) {
                                    const auto& p = x[std::size_t(s) * nk + a];
                                    const auto& q = x[std::size_t(s) * nk + b];
                                    Complex v = p[0] * std::conj(q[0]) + p[1] * std::conj(q[1]);
                                    return part == 0 ? v.real() : v.imag();
                                  },
                                  0.0));
          ++stats;
        }
    pass = worst <= 3.0;
    detail = fmt("max |z| = %.2f over %d moment checks, %d samples (limit 3 standard errors)", worst, stats, samples);
  });
}

void exact_control() {
  criterion("exactly solvable control", [](bool& pass, std::string& detail) {
    ExperimentConfig c;
    c.grid.n = 16;
    c.noise.sigma = 0.0;
    c.flow.dt = 0.01;
    c.flow.t_total = 2.0;
    c.scalar.rho0 = "mode:3";
    double worst_lambda = 0.0, worst_fk = 0.0;
    for (double kappa : {0.05, 0.1, 0.2, 0.4}) {
      c.scalar.kappa = kappa;
      auto r = run(c, kSeed);
      worst_lambda = std::max(worst_lambda, std::abs(r.lambda_hat + kappa * 9.0));
      worst_fk = std::max(worst_fk, std::abs(r.fk_residual));
    }
    c.experiment.kind = "sweep";
    c.scalar.kappa_list = {0.05, 0.1, 0.2, 0.4};
    auto s = sweep(c);
    const double slope = s.decay_fit ? s.decay_fit->slope : NAN;
    pass = worst_lambda <= 1e-10 && worst_fk <= 1e-10 && std::abs(slope - 1.0) <= 1e-6;
    detail = fmt("|lambda+kappa m^2|=%.1e |FK residual|=%.1e (limit 1e-10), sweep slope %.9f (limit 1 +- 1e-6)",
                 worst_lambda, worst_fk, slope);
  });
}

void fk_identity() {
  criterion("FK identity, full dynamics", [](bool& pass, std::string& detail) {
    ExperimentConfig c;
    c.grid.n = 64;
    c.noise.seed = kSeed;
    c.flow.t_burn = 5.0;
    c.flow.t_total = 20.0;
    c.scalar.kappa = 0.05;
    c.scalar.rho0 = "mode:1";
    c.scalar.scheme = "euler";  // first order, so the residual should halve with h
    c.experiment.output_every = 1000;
    // Step h with each noise increment built from two half steps, against step
    // h/2 with those same half-step increments: both runs see one noise path.
    c.flow.dt = 1e-3;
    c.noise.substeps = 2;
    auto coarse = run(c, kSeed);
    c.flow.dt = 5e-4;
    c.noise.substeps = 1;
    c.flow.t_burn = 5.0;
    auto fine = run(c, kSeed);
    const double rc = std::abs(coarse.fk_residual) / coarse.t_scalar;
    const double rf = std::abs(fine.fk_residual) / fine.t_scalar;
    const double limit = 0.02 * std::abs(coarse.lambda_hat);
    const double ratio = rc / rf;
    pass = rc <= limit && ratio >= 2.0 * 0.8 && ratio <= 2.0 * 1.2;
    detail = fmt("h=1e-3: |res|/T=%.3e vs 0.02|lambda|=%.3e (lambda=%.4f); h/2: %.3e, ratio %.3f (limit 2 +- 20%%)",
                 rc, limit, coarse.lambda_hat, rf, ratio);
  });
}

void chaos_oracle() {
  criterion("chaos oracle (MC vs Ito isometry)", [](bool& pass, std::string& detail) {
    auto g = make_grid(32);
    Rng rng(kSeed + 3);
    const int M = 8;
    ChaosSpec spec(annulus_field(g, M, rng));
    spec.kappa = 0.1;
    spec.t = t_star(0.1, M, 12.0);
    spec.k_max = 8;
    ChaosMcConfig mc;
    mc.paths = 2000;
    mc.seed = kSeed + 4;
    auto est = chaos_monte_carlo(spec, mc);
    pass = true;
    std::string parts;
    for (OpKind op : {OpKind::ADV, OpKind::LNS}) {
      spec.op = op;
      const auto closed = first_chaos_variance(spec);
      const auto& e = op == OpKind::ADV ? est.adv : est.lns;
      const double tol = std::max(0.05 * closed.total, 3.0 * e.total_stderr);
      const double err = std::abs(e.total - closed.total);
      pass = pass && err <= tol && closed.total > 0.0;
      parts += fmt("%s closed %.4e mc %.4e +- %.1e (rel %.2f%%, tol %.2f%%); ", to_string(op).c_str(), closed.total,
                   e.total, e.total_stderr, 100.0 * err / closed.total, 100.0 * tol / closed.total);
    }
    detail = parts + fmt("%d paths, h=%.0e", est.paths, est.h);
  });
}

void lower_bound() {
  criterion("lower-bound structure", [](bool& pass, std::string& detail) {
    // M = 24 needs shells out to |k| ~ 25 and every forced mode, so n = 80 and no k_max.
    auto g = make_grid(80);
    double lo[2] = {INFINITY, INFINITY}, hi[2] = {0, 0};
    bool positive = true;
    for (int M : {8, 12, 16, 24}) {
      Rng rng(seed_for(kSeed, std::uint64_t(M)));
      ChaosSpec spec(annulus_field(g, M, rng));
      for (double kappa : {0.05, 0.1, 0.2}) {
        spec.kappa = kappa;
        spec.t = t_star(kappa, M, 12.0);
        for (int o = 0; o < 2; ++o) {
          spec.op = o == 0 ? OpKind::ADV : OpKind::LNS;
          double r = lower_bound_ratio(spec, M);
          positive = positive && r > 0.0;
          lo[o] = std::min(lo[o], r);
          hi[o] = std::max(hi[o], r);
        }
      }
    }
    const double all = std::max(hi[0], hi[1]) / std::min(lo[0], lo[1]);
    pass = positive && all < 50.0;
    detail = fmt("ADV [%.3f, %.3f], LNS [%.3f, %.3f]; max/min over both %.2f (limit 50)", lo[0], hi[0], lo[1], hi[1],
                 all);
  });
}

void geometric() {
  criterion("geometric non-degeneracy", [](bool& pass, std::string& detail) {
    const long q10 = geometric_sum({1, 0});
    double cmin = INFINITY;
    Wavenumber arg{};
    for (int k1 = -100; k1 <= 100; ++k1)
      for (int k2 = -100; k2 <= 100; ++k2) {
        const long n2 = long(k1) * k1 + long(k2) * k2;
        if (n2 == 0 || n2 > 10000) continue;
        const double c = double(geometric_sum({k1, k2})) / double(n2 * n2);
        if (c < cmin) cmin = c, arg = {k1, k2};
      }
    pass = q10 == 34 && cmin > 0.0;
    detail = fmt("geometric_sum((1,0)) = %ld (expect 34); min Q/|k|^4 over 1<=|k|<=100 = %.4f at (%d,%d)", q10, cmin,
                 arg.k1, arg.k2);
  });
}

void norm_equivalences() {
  criterion("norm equivalences", [](bool& pass, std::string& detail) {
    // Test fields: the library's standard white-coefficient random field.
    auto g = make_grid(32);
    pass = true;
    std::string parts;
    for (double alpha : {2.0, 2.5, 6.0}) {
      Rng rng(kSeed + 5);
      double lo[2] = {INFINITY, INFINITY}, hi[2] = {0, 0};
      for (int i = 0; i < 100; ++i) {
        auto f = random_field(g, rng, 0.0);
        auto [l1, r1] = norm_equivalence_check(f, alpha);
        auto [l2, r2] = lns_norm_equivalence_check(f, alpha);
        lo[0] = std::min(lo[0], l1 / r1), hi[0] = std::max(hi[0], l1 / r1);
        lo[1] = std::min(lo[1], l2 / r2), hi[1] = std::max(hi[1], l2 / r2);
      }
      const double b0 = hi[0] / lo[0], b1 = hi[1] / lo[1];
      pass = pass && b0 <= 5.0 && b1 <= 5.0;
      parts += fmt("a=%g: %.2f/%.2f ", alpha, b0, b1);
    }
    detail = "band max/min (plain/LNS) " + parts + "(limit 5)";
  });
}

void determinism() {
  criterion("determinism", [](bool& pass, std::string& detail) {
    ExperimentConfig c;
    c.grid.n = 32;
    c.noise.seed = kSeed;
    c.flow.dt = 2e-3;
    c.flow.t_burn = 0.5;
    c.flow.t_total = 2.0;
    c.flow.cfl = 2.0;
    c.scalar.kappa = 0.05;
    c.scalar.op = "lns";
    c.scalar.rho0 = "mode:2";
    c.scalar.scheme = "rk4";
    auto dir = std::filesystem::temp_directory_path() / "medianflow_acceptance";
    std::filesystem::create_directories(dir);
    RunOptions a, b;
    a.csv_path = (dir / "a.csv").string();
    b.csv_path = (dir / "b.csv").string();
    run(c, kSeed, a);
    run(c, kSeed, b);
    const auto ta = slurp(a.csv_path), tb = slurp(b.csv_path);
    pass = !ta.empty() && ta == tb;
    detail = fmt("two runs, same config and seed: %zu and %zu bytes, %s", ta.size(), tb.size(),
                 ta == tb ? "byte-identical" : "DIFFER");
  });
}

// Median descent and the eta bound share one ensemble.
void median_descent(int threads) {
  ExperimentConfig c;
  c.grid.n = 128;
  c.noise.alpha = 12.0;
  c.noise.sigma = 1.0;
  c.noise.seed = kSeed;
  c.flow.dt = 0.025;
  c.flow.t_burn = 20.0;
  c.flow.cfl = 40.0;       // the flow step is diffusion-dominated; this only catches blow-up
  c.scalar.kappa = 1e-3;
  c.scalar.scheme = "rk4";
  c.scalar.cfl = 6.0;      // RK4 advection stability with |k| up to sqrt 2 times the cutoff
  c.experiment.kind = "median";
  c.experiment.M0_list = {16};
  c.experiment.ensemble_size = 50;
  c.experiment.delta = 0.2;
  c.experiment.q = 2.5;
  c.experiment.horizon_factor = 5.0;
  validate(c);

  std::vector<MedianSummary> noisy, quiet;
  criterion("median descent", [&](bool& pass, std::string& detail) {
    noisy = median_experiment(c, threads);
    ExperimentConfig q = c;
    q.noise.sigma = 0.0;
    quiet = median_experiment(q, threads);
    const auto& s = noisy.at(0);
    const auto& z = quiet.at(0);
    pass = s.hit_probability.estimate > 0.0 && s.hit_probability.lower > 0.0 && s.median_at_horizon.mean < 16.0 &&
           z.hit_probability.estimate == 0.0;
    detail = fmt("P(tau<=t*)=%.2f Wilson [%.3f, %.3f]; mean median at 5t*=%.2f +- %.2f (< 16); sigma=0: P=%.2f "
                 "(%zu seeds, t*=%.2f)",
                 s.hit_probability.estimate, s.hit_probability.lower, s.hit_probability.upper,
                 s.median_at_horizon.mean, s.median_at_horizon.se, z.hit_probability.estimate, s.runs.size(),
                 s.t_star);
  });
  criterion("eta bound", [&](bool& pass, std::string& detail) {
    if (noisy.empty() || quiet.empty()) throw std::runtime_error("median ensemble did not complete");
    double worst = -INFINITY;
    int n = 0;
    bool ok = true;
    for (const auto* set : {&noisy, &quiet})
      for (const auto& s : *set)
        for (const auto& r : s.runs) {
          ok = ok && r.record.eta <= r.record.eta_cap;
          worst = std::max(worst, r.record.eta - r.record.eta_cap);
          ++n;
        }
    pass = ok;
    detail = fmt("max(eta - cap) = %.3e over %d runs (limit <= 0); cap = %.4e", worst, n, noisy.at(0).eta_cap);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medianflow acceptance suite"};
  bool fast = false, slow = false;
  int threads = 0;
  app.add_flag("--fast", fast, "everything except the median-descent ensemble");
  app.add_flag("--slow", slow, "only the median-descent ensemble and the eta bound");
  app.add_option("--threads", threads, "ensemble width (default MEDIANFLOW_THREADS or 1)");
  CLI11_PARSE(app, argc, argv);
  if (threads <= 0) {
    const char* env = std::getenv("MEDIANFLOW_THREADS");
    threads = env ? std::max(1, std::atoi(env)) : 1;
  }
  keep_buffers_on_heap();

  if (!slow) {
    operator_identities();
    lns_equivalence();
    noise_law();
    exact_control();
    fk_identity();
    chaos_oracle();
    lower_bound();
    geometric();
    norm_equivalences();
    determinism();
  }
  if (!fast) median_descent(threads);
  std::printf("%s: %d failing\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
