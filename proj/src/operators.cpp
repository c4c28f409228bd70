#include "medianflow/operators.hpp"

#include <cmath>

namespace medianflow {

namespace {

constexpr Complex I{0.0, 1.0};

// Odd-multiplier wavenumber: Nyquist components replaced by zero.
Wavenumber odd_k(const WaveGrid& g, Wavenumber k) { return {g.odd_component(k.k1), g.odd_component(k.k2)}; }

// Visits every active mode with its index and wavenumber.
template <typename Fn>
void for_active(const WaveGrid& g, Fn&& fn) {
  const auto& ks = g.active();
  const auto& idx = g.active_index();
  for (std::size_t a = 0; a < ks.size(); ++a) fn(idx[a], ks[a]);
}

bool within(long norm2, double M) { return double(norm2) <= M * M * (1.0 + 1e-12); }

}  // namespace

VectorField grad(const SpectralField& f) {
  const auto& g = f.grid();
  VectorField out(g);
  auto& a = out.c1.raw();
  auto& b = out.c2.raw();
  for_active(g, [&](std::size_t i, Wavenumber k) {
    Wavenumber q = odd_k(g, k);
    a[i] = I * double(q.k1) * f.at(i);
    b[i] = I * double(q.k2) * f.at(i);
  });
  return out;
}

SpectralField div(const VectorField& v) {
  const auto& g = v.grid();
  require_same_grid(g, v.c2.grid(), "div");
  SpectralField out(g);
  auto& o = out.raw();
  for_active(g, [&](std::size_t i, Wavenumber k) {
    Wavenumber q = odd_k(g, k);
    o[i] = I * (double(q.k1) * v.c1.at(i) + double(q.k2) * v.c2.at(i));
  });
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  return f.multiplied([](Wavenumber k) { return -double(k.norm2()); });
}

SpectralField inv_laplacian(const SpectralField& f) {
  return f.multiplied([](Wavenumber k) { return -1.0 / double(k.norm2()); });
}

VectorField inv_grad(const SpectralField& f) {
  const auto& g = f.grid();
  VectorField out(g);
  auto& a = out.c1.raw();
  auto& b = out.c2.raw();
  for_active(g, [&](std::size_t i, Wavenumber k) {
    Wavenumber q = odd_k(g, k);
    double inv = 1.0 / double(k.norm2());
    a[i] = I * (double(q.k1) * inv) * f.at(i);
    b[i] = I * (double(q.k2) * inv) * f.at(i);
  });
  return out;
}

VectorField laplacian(const VectorField& v) {
  VectorField out(laplacian(v.c1), laplacian(v.c2), v.divergence_free);
  return out;
}

VectorField leray_project(const VectorField& v) {
  const auto& g = v.grid();
  VectorField out(g);
  auto& a = out.c1.raw();
  auto& b = out.c2.raw();
  for_active(g, [&](std::size_t i, Wavenumber k) {
    Wavenumber q = odd_k(g, k);
    const double q2 = double(q.norm2());
    Complex v1 = v.c1.at(i), v2 = v.c2.at(i);
    if (q2 == 0.0) {
      a[i] = v1;
      b[i] = v2;
      return;
    }
    Complex kv = (double(q.k1) * v1 + double(q.k2) * v2) / q2;
    a[i] = v1 - double(q.k1) * kv;
    b[i] = v2 - double(q.k2) * kv;
  });
  out.divergence_free = true;
  return out;
}

VectorField biot_savart(const SpectralField& w) {
  const auto& g = w.grid();
  VectorField out(g);
  auto& a = out.c1.raw();
  auto& b = out.c2.raw();
  for_active(g, [&](std::size_t i, Wavenumber k) {
    Wavenumber p = odd_k(g, k).perp();
    double inv = 1.0 / double(k.norm2());
    a[i] = I * (double(p.k1) * inv) * w.at(i);
    b[i] = I * (double(p.k2) * inv) * w.at(i);
  });
  out.divergence_free = true;
  return out;
}

SpectralField curl(const VectorField& v) {
  const auto& g = v.grid();
  SpectralField out(g);
  auto& o = out.raw();
  for_active(g, [&](std::size_t i, Wavenumber k) {
    Wavenumber q = odd_k(g, k);
    o[i] = I * (double(q.k1) * v.c2.at(i) - double(q.k2) * v.c1.at(i));
  });
  return out;
}

SpectralField project_low(const SpectralField& f, double M) {
  return f.multiplied([M](Wavenumber k) { return within(k.norm2(), M) ? 1.0 : 0.0; });
}

SpectralField project_high(const SpectralField& f, double M) {
  return f.multiplied([M](Wavenumber k) { return within(k.norm2(), M) ? 0.0 : 1.0; });
}

SpectralField heat_propagate(const SpectralField& f, double t, double nu) {
  if (t == 0.0) return f;
  return f.multiplied([s = nu * t](Wavenumber k) { return std::exp(-s * double(k.norm2())); });
}

VectorField heat_propagate(const VectorField& v, double t, double nu) {
  return VectorField(heat_propagate(v.c1, t, nu), heat_propagate(v.c2, t, nu), v.divergence_free);
}

double divergence_defect(const VectorField& v) {
  const auto& g = v.grid();
  double worst = 0.0;
  for_active(g, [&](std::size_t i, Wavenumber k) {
    Complex v1 = v.c1.at(i), v2 = v.c2.at(i);
    double mag = std::sqrt(std::norm(v1) + std::norm(v2));
    if (mag == 0.0) return;
    Wavenumber q = odd_k(g, k);
    double kv = std::abs(double(q.k1) * v1 + double(q.k2) * v2);
    worst = std::max(worst, kv / mag);
  });
  return worst;
}

}  // namespace medianflow
