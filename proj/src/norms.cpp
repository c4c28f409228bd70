#include "medianflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "medianflow/operators.hpp"

namespace medianflow {

double sobolev_norm(const SpectralField& f, double s) {
  const auto& ks = f.grid().active();
  const auto& idx = f.grid().active_index();
  double sum = 0.0;
  for (std::size_t a = 0; a < ks.size(); ++a) {
    double e = std::norm(f.at(idx[a]));
    if (e == 0.0) continue;
    sum += (s == 0.0 ? 1.0 : std::pow(double(ks[a].norm2()), s)) * e;
  }
  return std::sqrt(sum);
}

double sobolev_norm(const VectorField& v, double s) {
  return std::hypot(sobolev_norm(v.c1, s), sobolev_norm(v.c2, s));
}

double sup_norm(const SpectralField& f) {
  auto x = to_physical(f);
  double m = 0.0;
  for (double v : x.values) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const VectorField& v) {
  auto a = to_physical(v.c1);
  auto b = to_physical(v.c2);
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::hypot(a.values[i], b.values[i]));
  return m;
}

double holder_norm(const SpectralField& f, double beta) {
  const int K = f.grid().cutoff();
  int jmax = 0;
  while ((2 << jmax) <= K) ++jmax;  // floor(log2 K)
  double best = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const long hi = 1L << (2 * j);                       // |k|^2 <= 4^j
    const long lo = j == 0 ? 0 : 1L << (2 * (j - 1));    // |k|^2 > 4^{j-1}
    SpectralField block = f.multiplied([&](Wavenumber k) {
      long q = k.norm2();
      return (q > lo && q <= hi) ? 1.0 : 0.0;
    });
    if (block.is_zero()) continue;
    best = std::max(best, std::pow(2.0, j * beta) * sup_norm(block));
  }
  return best;
}

int spectral_quantile(const SpectralField& f, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("spectral_quantile: beta must be positive");
  const auto& ks = f.grid().active();
  const auto& idx = f.grid().active_index();
  // shell[m] collects modes whose smallest admissible M is m, i.e. (m-1)^2 < |k|^2 <= m^2.
  std::vector<double> shell;
  double total = 0.0;
  for (std::size_t a = 0; a < ks.size(); ++a) {
    double e = std::norm(f.at(idx[a]));
    if (e == 0.0) continue;
    long q = ks[a].norm2();
    long m = std::lround(std::ceil(std::sqrt(double(q))));
    while (m * m < q) ++m;
    while (m > 1 && (m - 1) * (m - 1) >= q) --m;
    if (std::size_t(m) >= shell.size()) shell.resize(m + 1, 0.0);
    shell[m] += e;
    total += e;
  }
  if (total == 0.0) throw DegenerateField("spectral quantile of the zero field is undefined");
  // Suffix sums keep the high-frequency energy free of cancellation.
  std::vector<double> above(shell.size() + 1, 0.0);
  for (std::size_t m = shell.size(); m-- > 0;) above[m] = above[m + 1] + shell[m];
  const double b2 = beta * beta;
  double low = 0.0;
  for (std::size_t M = 1; M < shell.size(); ++M) {
    low += shell[M];
    if (above[M + 1] <= b2 * low) return int(M);
  }
  return int(shell.size() - 1);
}

double filament_scale(const SpectralField& f) {
  double l2 = sobolev_norm(f, 0.0);
  if (l2 == 0.0) throw DegenerateField("filament scale of the zero field is undefined");
  return l2 / sobolev_norm(f, 1.0);
}

}  // namespace medianflow
