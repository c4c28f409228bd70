#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "medianflow/grid.hpp"
#include "medianflow/norms.hpp"
#include "medianflow/operators.hpp"
#include "medianflow/random.hpp"
#include "medianflow/snapshot.hpp"

using namespace medianflow;

namespace {

constexpr double kPi = std::numbers::pi;

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

double max_abs(const SpectralField& a) {
  double m = 0.0;
  for (auto c : a.coefficients()) m = std::max(m, std::abs(c));
  return m;
}

// Continuum coefficients of a lattice field. A Nyquist-row coefficient
// (|k_i| = n/2) is the cosine pair at +-n/2, so it is split evenly.
std::map<std::pair<int, int>, Complex> continuum(const SpectralField& f) {
  const auto& grid = f.grid();
  const int h = grid.n() / 2;
  std::map<std::pair<int, int>, Complex> out;
  for (std::size_t idx : grid.active_index()) {
    Wavenumber k = grid.wavenumber(idx);
    std::vector<int> a{k.k1}, b{k.k2};
    if (std::abs(k.k1) == h) a.push_back(-k.k1);
    if (std::abs(k.k2) == h) b.push_back(-k.k2);
    for (int x : a)
      for (int y : b) out[{x, y}] += f.at(idx) / double(a.size() * b.size());
  }
  return out;
}

// O(n^4) truncated convolution of the continuum coefficients, independent of
// any FFT; continuum wavenumbers +-n/2 fold onto the same lattice site.
SpectralField brute_convolution(const SpectralField& f, const SpectralField& g) {
  const auto& grid = f.grid();
  const int K = grid.cutoff();
  auto cf = continuum(f), cg = continuum(g);
  SpectralField out(grid);
  for (auto& [k, a] : cf) {
    for (auto& [j, b] : cg) {
      Wavenumber l{k.first + j.first, k.second + j.second};
      if (std::abs(l.k1) > K || std::abs(l.k2) > K || (l.k1 == 0 && l.k2 == 0)) continue;
      out.raw()[grid.index(l)] += a * b;
    }
  }
  return out;
}

}  // namespace

TEST(Grid, ActiveCounts) {
  EXPECT_EQ(make_grid(8, {1, 1}).active().size(), 63u);
  auto g12 = make_grid(12, {2, 3});
  EXPECT_EQ(g12.active().size(), 80u);
  EXPECT_EQ(g12.cutoff(), 4);
  EXPECT_THROW(make_grid(7), GridError);
  EXPECT_THROW(make_grid(6), GridError);
  EXPECT_THROW(make_grid(16, {0, 1}), GridError);
}

TEST(Grid, HermitianClosure) {
  for (int n : {8, 12, 16, 32}) {
    for (Fraction fr : {Fraction{1, 1}, Fraction{2, 3}, Fraction{1, 2}}) {
      auto g = make_grid(n, fr);
      for (std::size_t idx : g.active_index()) {
        EXPECT_TRUE(g.active_at(g.conjugate_index(idx)));
        EXPECT_FALSE(g.wavenumber(idx) == (Wavenumber{0, 0}));
      }
      EXPECT_LE(g.active().size(), std::size_t(n * n - 1));
    }
  }
}

TEST(Grid, FractionParsing) {
  EXPECT_EQ(Fraction::parse("2/3"), (Fraction{2, 3}));
  EXPECT_EQ(Fraction::parse("1"), (Fraction{1, 1}));
  EXPECT_EQ(Fraction::parse("0.5"), (Fraction{1, 2}));
  EXPECT_THROW(Fraction::parse("3/2"), GridError);
  EXPECT_THROW(Fraction::parse("abc"), GridError);
}

TEST(Transforms, CosinePair) {
  auto g = make_grid(16);
  auto x = to_physical(pair(g, {1, 0}));
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) EXPECT_NEAR(x(a, b), 2.0 * std::cos(2 * kPi * a / 16), 1e-14);
  auto z = to_physical(SpectralField(g));
  for (double v : z.values) EXPECT_EQ(v, 0.0);
}

TEST(Transforms, RoundTripAndParseval) {
  for (Fraction fr : {Fraction{2, 3}, Fraction{1, 1}}) {
    auto g = make_grid(16, fr);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      auto f = random_field(g, rng);
      auto x = to_physical(f);
      auto back = from_physical(g, x);
      EXPECT_LE(max_diff(back, f), 1e-12 * max_abs(f));
      double ms = 0.0;
      for (double v : x.values) ms += v * v;
      ms /= double(x.values.size());
      // ||f||_{L^2}^2 / (2 pi)^2 equals the mean square of the samples.
      EXPECT_NEAR(ms, std::pow(sobolev_norm(f, 0), 2), 1e-12 * ms);
    }
  }
}

TEST(Transforms, FromPhysicalDropsMeanAndInactive) {
  auto g = make_grid(12);
  PhysicalField x{12, std::vector<double>(144, 3.0)};
  for (int a = 0; a < 12; ++a)
    for (int b = 0; b < 12; ++b) x(a, b) += std::cos(2 * kPi * 5 * a / 12);  // |k1| = 5 > cutoff 4
  EXPECT_LE(max_abs(from_physical(g, x)), 1e-14);
  EXPECT_THROW(from_physical(g, PhysicalField{8, std::vector<double>(64)}), GridError);
}

TEST(Product, Examples) {
  auto g = make_grid(16);
  auto p = dealiased_product(pair(g, {1, 0}), pair(g, {0, 1}));
  for (Wavenumber k : {Wavenumber{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) EXPECT_NEAR(std::abs(p[k] - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(sobolev_norm(p, 0), 2.0, 1e-14);
  auto sq = dealiased_product(pair(g, {1, 0}), pair(g, {1, 0}));
  EXPECT_NEAR(std::abs(sq[{2, 0}] - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(sobolev_norm(sq, 0), std::sqrt(2.0), 1e-14);  // mean 2 removed
}

TEST(Product, MatchesBruteForceConvolution) {
  for (Fraction fr : {Fraction{2, 3}, Fraction{1, 1}, Fraction{1, 2}}) {
    for (int n : {12, 16}) {
      auto g = make_grid(n, fr);
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Rng rng(100 + seed);
        auto f = random_field(g, rng);
        auto h = random_field(g, rng);
        auto fast = dealiased_product(f, h);
        auto slow = brute_convolution(f, h);
        EXPECT_LE(max_diff(fast, slow), 1e-10 * max_abs(slow)) << "n=" << n << " frac=" << fr.str();
      }
    }
  }
}

TEST(Product, GridMismatch) {
  EXPECT_THROW(dealiased_product(SpectralField(make_grid(16)), SpectralField(make_grid(32))), GridError);
}

TEST(Operators, Multipliers) {
  auto g = make_grid(16);
  EXPECT_NEAR(std::abs(laplacian(pair(g, {1, 2}))[{1, 2}] + 5.0), 0.0, 1e-15);
  auto v = inv_grad(pair(g, {2, 0}));
  EXPECT_NEAR(std::abs(v.c1[{2, 0}] - Complex(0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v.c2[{2, 0}]), 0.0, 1e-15);
  auto u = biot_savart(pair(g, {1, 0}, {0.3, -0.7}));
  // i (0,-1) w^ for k = (1,0), |k|^2 = 1
  EXPECT_NEAR(std::abs(u.c1[{1, 0}]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u.c2[{1, 0}] - Complex(0, -1) * Complex(0.3, -0.7)), 0.0, 1e-15);
  EXPECT_TRUE(u.divergence_free);
}

TEST(Operators, Identities) {
  for (Fraction fr : {Fraction{2, 3}, Fraction{1, 1}}) {
    auto g = make_grid(16, fr);
    Rng rng(7);
    auto f = random_field(g, rng);
    auto w = random_field(g, rng);
    VectorField v(random_field(g, rng), random_field(g, rng));
    const double tol = 1e-12;
    auto pv = leray_project(v);
    EXPECT_LE(divergence_defect(pv), tol);
    auto ppv = leray_project(pv);
    EXPECT_LE(max_diff(ppv.c1, pv.c1) + max_diff(ppv.c2, pv.c2), tol);
    EXPECT_LE(divergence_defect(biot_savart(w)), tol);
    if (fr == Fraction{2, 3}) {
      // Away from Nyquist rows the inverses are exact.
      EXPECT_LE(max_diff(div(grad(f)), laplacian(f)), tol * max_abs(laplacian(f)));
      EXPECT_LE(max_diff(curl(biot_savart(w)), w), tol);
      EXPECT_LE(max_diff(-div(inv_grad(f)), f), tol);
      EXPECT_LE(max_diff(laplacian(inv_laplacian(f)), f), tol);
    }
  }
}

TEST(Operators, LerayFixesSolenoidalField) {
  auto g = make_grid(16);
  Rng rng(3);
  auto u = biot_savart(random_field(g, rng));
  auto pu = leray_project(u);
  EXPECT_LE(max_diff(pu.c1, u.c1) + max_diff(pu.c2, u.c2), 1e-15);
}

TEST(Operators, Projections) {
  auto g = make_grid(32);
  auto f = pair(g, {3, 4});
  EXPECT_LE(max_diff(project_low(f, 5), f), 0.0);
  EXPECT_TRUE(project_high(f, 5).is_zero());
  EXPECT_TRUE(project_low(f, 4.9).is_zero());
  Rng rng(11);
  auto r = random_field(g, rng);
  for (double M : {1.0, 2.5, 7.0, 13.0}) {
    double a = sobolev_norm(project_low(r, M), 0), b = sobolev_norm(project_high(r, M), 0);
    double c = sobolev_norm(r, 0);
    EXPECT_NEAR(a * a + b * b, c * c, 1e-12 * c * c);
    EXPECT_LE(max_diff(project_low(r, M) + project_high(r, M), r), 0.0);
  }
}

TEST(Operators, HeatSemigroup) {
  auto g = make_grid(16);
  auto f = pair(g, {1, 0});
  EXPECT_NEAR((heat_propagate(f, 1.0, 1.0)[{1, 0}].real()), std::exp(-1.0), 1e-15);
  Rng rng(2);
  auto r = random_field(g, rng);
  EXPECT_EQ(max_diff(heat_propagate(r, 0.0), r), 0.0);
  auto a = heat_propagate(heat_propagate(r, 0.1, 0.3), 0.2, 0.3);
  auto b = heat_propagate(r, 0.3, 0.3);
  EXPECT_LE(max_diff(a, b), 1e-14 * max_abs(r));
}

TEST(Norms, Sobolev) {
  auto g = make_grid(16);
  for (double s : {-2.0, 0.0, 0.5, 3.0}) {
    EXPECT_NEAR(sobolev_norm(pair(g, {0, 1}), s), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(sobolev_norm(pair(g, {2, 0}), s), std::sqrt(2.0) * std::pow(2.0, s), 1e-13);
  }
  EXPECT_EQ(sobolev_norm(SpectralField(g), 1.0), 0.0);
}

TEST(Norms, Holder) {
  auto g = make_grid(32);
  EXPECT_NEAR(holder_norm(pair(g, {1, 0}), 0.7), 2.0, 1e-13);
  EXPECT_EQ(holder_norm(SpectralField(g), 1.0), 0.0);
  // |k| = 3 sits in block j = 2 (2 < 3 <= 4).
  EXPECT_NEAR(holder_norm(pair(g, Wavenumber{3, 0}), 1.0), 2.0 * 4.0, 1e-12);
  Rng rng(5);
  auto r = random_field(g, rng, 1.0);
  EXPECT_NEAR(holder_norm(r * -3.0, 0.5), 3.0 * holder_norm(r, 0.5), 1e-12 * holder_norm(r, 0.5));
}

TEST(Norms, QuantileExamples) {
  auto g = make_grid(32);
  for (double beta : {0.1, 1.0, 2.0, 10.0}) EXPECT_EQ(spectral_quantile(pair(g, {3, 4}), beta), 5);
  auto two = pair(g, {1, 0}) + pair(g, {3, 0});
  EXPECT_EQ(spectral_median(two), 1);
  EXPECT_THROW(spectral_median(SpectralField(g)), DegenerateField);
}

TEST(Norms, QuantileMatchesLinearScan) {
  auto g = make_grid(32);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto f = random_field(g, rng, seed % 3);
    for (double beta : {0.5, 1.0, 2.0}) {
      int scan = -1;
      for (int M = 1; M <= 32; ++M) {
        if (sobolev_norm(project_high(f, M), 0) <= beta * sobolev_norm(project_low(f, M), 0)) {
          scan = M;
          break;
        }
      }
      EXPECT_EQ(spectral_quantile(f, beta), scan);
      EXPECT_EQ(spectral_quantile(f * -4.5, beta), scan);
    }
    EXPECT_GE(spectral_quantile(f, 1.0), spectral_quantile(f, 2.0));
    EXPECT_GE(spectral_quantile(f, 0.5), spectral_quantile(f, 1.0));
  }
}

TEST(Norms, FilamentScale) {
  auto g = make_grid(16);
  EXPECT_NEAR(filament_scale(pair(g, {0, 3})), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(filament_scale(pair(g, {1, 0}) + pair(g, {0, 2})), std::sqrt(2.0 / 5.0), 1e-15);
  Rng rng(1);
  auto r = random_field(g, rng);
  EXPECT_NEAR(filament_scale(r * 7.0), filament_scale(r), 1e-15);
  EXPECT_THROW(filament_scale(SpectralField(g)), DegenerateField);
}

TEST(Snapshot, RoundTrip) {
  auto g = make_grid(16, {1, 1});
  Rng rng(9);
  auto f = random_field(g, rng);
  std::stringstream ss;
  write_snapshot(ss, f);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.substr(0, 4), "MFLD");
  // 16 header bytes, 24 bytes per +-k pair (255 active modes, 3 self-conjugate).
  EXPECT_EQ(bytes.size(), 16u + 24u * ((255 - 3) / 2 + 3));
  auto back = read_snapshot(ss, g);
  EXPECT_EQ(max_diff(back, f), 0.0);
  std::stringstream bad("MFLX");
  EXPECT_THROW(read_snapshot(bad, g), SnapshotError);
  std::stringstream again(bytes);
  EXPECT_THROW(read_snapshot(again, make_grid(32)), SnapshotError);
}
