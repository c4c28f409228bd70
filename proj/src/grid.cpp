#include "medianflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "medianflow/fft.hpp"

namespace medianflow {

double Wavenumber::norm() const { return std::sqrt(double(norm2())); }

Fraction Fraction::parse(const std::string& text) {
  Fraction f{1, 1};
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      std::size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      if (v == 1.0) return {1, 1};
      // Accept short decimals such as 0.5 exactly.
      int den = 1;
      while (std::abs(v * den - std::round(v * den)) > 1e-12 && den < 1000000) den *= 10;
      f = {int(std::lround(v * den)), den};
    } else {
      f.num = std::stoi(text.substr(0, slash));
      f.den = std::stoi(text.substr(slash + 1));
    }
  } catch (const std::logic_error&) {
    throw GridError("cannot parse fraction '" + text + "'");
  }
  if (f.den <= 0 || f.num <= 0 || f.num > f.den)
    throw GridError("dealias fraction must lie in (0, 1], got '" + text + "'");
  return f;
}

std::string Fraction::str() const { return std::to_string(num) + "/" + std::to_string(den); }

WaveGrid::WaveGrid(int n, Fraction dealias) {
  if (n < 8 || n % 2 != 0) throw GridError("grid size must be an even integer >= 8, got " + std::to_string(n));
  if (dealias.den <= 0 || dealias.num <= 0 || dealias.num > dealias.den)
    throw GridError("dealias fraction must lie in (0, 1]");

  auto d = std::make_shared<Data>();
  d->n = n;
  d->dealias = dealias;
  d->cutoff = int((long(dealias.num) * n) / (2L * dealias.den));
  if (d->cutoff < 1) throw GridError("dealias fraction leaves no active modes");
  int p = std::max(n, 3 * d->cutoff + 1);
  if (p % 2) ++p;
  d->product_n = p;

  const std::size_t total = std::size_t(n) * n;
  d->wavenumber.resize(total);
  d->conjugate.resize(total);
  d->active_mask.assign(total, 0);
  auto wrap = [n](int i) { return i > n / 2 ? i - n : i; };
  auto unwrap = [n](int k) { return ((k % n) + n) % n; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::size_t idx = std::size_t(i) * n + j;
      Wavenumber k{wrap(i), wrap(j)};
      d->wavenumber[idx] = k;
      d->conjugate[idx] = std::size_t(unwrap(-k.k1)) * n + unwrap(-k.k2);
      bool act = !(k.k1 == 0 && k.k2 == 0) && std::abs(k.k1) <= d->cutoff && std::abs(k.k2) <= d->cutoff;
      d->active_mask[idx] = act;
      if (act) {
        d->active.push_back(k);
        d->active_index.push_back(idx);
      }
    }
  }
  for (std::size_t idx : d->active_index)
    if (idx < d->conjugate[idx]) d->representatives.push_back(idx);

  if (2 * d->cutoff < n) {
    auto build = [&](int m) {
      HalfSpectrumSlots t;
      const int hc = m / 2 + 1;
      auto mod = [m](int v) { return ((v % m) + m) % m; };
      for (std::size_t a = 0; a < d->active.size(); ++a) {
        Wavenumber k = d->active[a];
        bool c = k.k2 < 0;
        Wavenumber q = c ? -k : k;
        t.coeff.push_back(d->active_index[a]);
        t.offset.push_back(std::size_t(mod(q.k1)) * hc + q.k2);
        t.conj.push_back(c);
      }
      return t;
    };
    d->slots = build(n);
    d->product_slots = build(p);
  }

  d->plans = std::make_shared<FftPlans>(n);
  d->product_plans = p == n ? d->plans : std::make_shared<FftPlans>(p);
  data_ = std::move(d);
}

bool WaveGrid::is_active(Wavenumber k) const {
  const int n = data_->n;
  if (k.k1 <= -n / 2 || k.k1 > n / 2 || k.k2 <= -n / 2 || k.k2 > n / 2) return false;
  return active_at(index(k));
}

std::size_t WaveGrid::index(Wavenumber k) const {
  const int n = data_->n;
  auto unwrap = [n](int v) { return ((v % n) + n) % n; };
  return std::size_t(unwrap(k.k1)) * n + unwrap(k.k2);
}

WaveGrid make_grid(int n, Fraction dealias) { return WaveGrid(n, dealias); }

void require_same_grid(const WaveGrid& a, const WaveGrid& b, const char* where) {
  if (!(a == b)) throw GridError(std::string(where) + ": grid mismatch");
}

}  // namespace medianflow
