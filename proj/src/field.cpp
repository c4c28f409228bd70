#include "medianflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace medianflow {

SpectralField::SpectralField(WaveGrid grid) : grid_(std::move(grid)), coeff_(grid_.size()) {}

Complex SpectralField::operator[](Wavenumber k) const {
  const int n = grid_.n();
  if (k.k1 <= -n / 2 || k.k1 > n / 2 || k.k2 <= -n / 2 || k.k2 > n / 2) return {};
  return coeff_[grid_.index(k)];
}

void SpectralField::set(Wavenumber k, Complex c) {
  if (!grid_.is_active(k))
    throw GridError("cannot set inactive mode (" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ")");
  set_at(grid_.index(k), c);
}

void SpectralField::set_at(std::size_t idx, Complex c) {
  if (!grid_.active_at(idx)) throw GridError("cannot set inactive mode");
  std::size_t cj = grid_.conjugate_index(idx);
  if (cj == idx) {
    coeff_[idx] = c.real();
  } else {
    coeff_[idx] = c;
    coeff_[cj] = std::conj(c);
  }
}

bool SpectralField::is_zero() const {
  return std::all_of(coeff_.begin(), coeff_.end(), [](Complex c) { return c == Complex{}; });
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < coeff_.size(); ++i)
    worst = std::max(worst, std::abs(coeff_[grid_.conjugate_index(i)] - std::conj(coeff_[i])));
  return worst;
}

double SpectralField::inactive_leakage() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < coeff_.size(); ++i)
    if (!grid_.active_at(i)) worst = std::max(worst, std::abs(coeff_[i]));
  return worst;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "SpectralField::operator+=");
  for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += other.coeff_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "SpectralField::operator-=");
  for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] -= other.coeff_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeff_) c *= s;
  return *this;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  c1 += o.c1;
  c2 += o.c2;
  divergence_free = divergence_free && o.divergence_free;
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  c1 -= o.c1;
  c2 -= o.c2;
  divergence_free = divergence_free && o.divergence_free;
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  c1 *= s;
  c2 *= s;
  return *this;
}

namespace {

int wrap_mod(int v, int m) { return ((v % m) + m) % m; }

// A lattice coefficient on a Nyquist row (|k_i| = n/2, only active when the
// dealias fraction is 1) stands for the cosine pair at +-n/2: it is spread
// evenly over the continuum wavenumbers +n/2 and -n/2. Returns the number of
// continuum images and writes them to `out`.
int continuum_images(Wavenumber k, int n, Wavenumber out[4]) {
  int a[2] = {k.k1, -k.k1}, b[2] = {k.k2, -k.k2};
  int na = 2 * std::abs(k.k1) == n ? 2 : 1;
  int nb = 2 * std::abs(k.k2) == n ? 2 : 1;
  int c = 0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) out[c++] = {a[i], b[j]};
  return c;
}

// Writes the active coefficients of f into the half spectrum of an m x m
// lattice (m >= n). Entry (r, c) of the half spectrum is entry (r, c) of the
// full Hermitian array for c <= m/2.
void embed_half(const SpectralField& f, const FftPlans& plans, const HalfSpectrumSlots& slots, Complex* half) {
  const int m = plans.m();
  const int hc = m / 2 + 1;
  std::fill(half, half + plans.half_size(), Complex{});
  const auto& grid = f.grid();
  const int n = grid.n();
  if (!slots.coeff.empty()) {
    const Complex* c = f.coefficients().data();
    for (std::size_t a = 0; a < slots.coeff.size(); ++a)
      if (!slots.conj[a]) half[slots.offset[a]] = c[slots.coeff[a]];
    return;
  }
  const auto& ks = grid.active();
  const auto& idx = grid.active_index();
  for (std::size_t a = 0; a < ks.size(); ++a) {
    Wavenumber k = ks[a];
    Wavenumber img[4];
    int count = continuum_images(k, n, img);
    Complex c = f.at(idx[a]) / double(count);
    for (int i = 0; i < count; ++i) {
      int col = wrap_mod(img[i].k2, m);
      if (col > m / 2) continue;
      half[std::size_t(wrap_mod(img[i].k1, m)) * hc + col] += c;
    }
  }
}

Complex full_entry(const Complex* half, int m, int row, int col) {
  const int hc = m / 2 + 1;
  if (col <= m / 2) return half[std::size_t(row) * hc + col];
  return std::conj(half[std::size_t(wrap_mod(-row, m)) * hc + (m - col)]);
}

// Inverse of embed_half on the active set: the lattice coefficient gathers
// every distinct continuum image.
void extract_half(const Complex* half, const FftPlans& plans, const HalfSpectrumSlots& slots, double scale,
                  SpectralField& out) {
  const int m = plans.m();
  const auto& grid = out.grid();
  const int n = grid.n();
  auto& raw = out.raw();
  if (!slots.coeff.empty()) {
    for (std::size_t a = 0; a < slots.coeff.size(); ++a) {
      Complex c = half[slots.offset[a]] * scale;
      raw[slots.coeff[a]] = slots.conj[a] ? std::conj(c) : c;
    }
    return;
  }
  const auto& ks = grid.active();
  const auto& idx = grid.active_index();
  for (std::size_t a = 0; a < ks.size(); ++a) {
    Wavenumber img[4];
    int count = continuum_images(ks[a], n, img);
    Complex c{};
    std::pair<int, int> seen[4];
    int nseen = 0;
    for (int i = 0; i < count; ++i) {
      std::pair<int, int> slot{wrap_mod(img[i].k1, m), wrap_mod(img[i].k2, m)};
      if (std::find(seen, seen + nseen, slot) != seen + nseen) continue;
      seen[nseen++] = slot;
      c += full_entry(half, m, slot.first, slot.second);
    }
    raw[idx[a]] = c * scale;
  }
  // Self-conjugate (Nyquist) modes must be real.
  for (std::size_t a = 0; a < ks.size(); ++a)
    if (grid.conjugate_index(idx[a]) == idx[a]) raw[idx[a]] = raw[idx[a]].real();
}

AlignedBuffer<double> sample_on(const SpectralField& f, const FftPlans& plans, const HalfSpectrumSlots& slots) {
  AlignedBuffer<Complex> half(plans.half_size(), AlignedBuffer<Complex>::NoInit{});
  AlignedBuffer<double> out(plans.real_size(), AlignedBuffer<double>::NoInit{});
  embed_half(f, plans, slots, half.data());
  plans.inverse(half.data(), out.data());
  return out;
}

}  // namespace

PhysicalField to_physical(const SpectralField& f) {
  const auto& plans = f.grid().plans();
  auto buf = sample_on(f, plans, f.grid().slots());
  PhysicalField out{plans.m(), std::vector<double>(buf.data(), buf.data() + buf.size())};
  return out;
}

SpectralField from_physical(const WaveGrid& grid, const PhysicalField& samples) {
  if (samples.n != grid.n() || samples.values.size() != grid.size())
    throw GridError("from_physical: expected " + std::to_string(grid.n()) + "x" + std::to_string(grid.n()) +
                    " samples");
  const auto& plans = grid.plans();
  AlignedBuffer<double> real(plans.real_size());
  std::copy(samples.values.begin(), samples.values.end(), real.data());
  AlignedBuffer<Complex> half(plans.half_size(), AlignedBuffer<Complex>::NoInit{});
  plans.forward(real.data(), half.data());
  SpectralField out(grid);
  extract_half(half.data(), plans, grid.slots(), 1.0 / double(plans.real_size()), out);
  return out;
}

namespace product_space {

AlignedBuffer<double> sample(const SpectralField& f) {
  return sample_on(f, f.grid().product_plans(), f.grid().product_slots());
}

SpectralField project(const WaveGrid& grid, AlignedBuffer<double>& samples) {
  const auto& plans = grid.product_plans();
  AlignedBuffer<Complex> half(plans.half_size(), AlignedBuffer<Complex>::NoInit{});
  plans.forward(samples.data(), half.data());
  SpectralField out(grid);
  extract_half(half.data(), plans, grid.product_slots(), 1.0 / double(plans.real_size()), out);
  return out;
}

}  // namespace product_space

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "dealiased_product");
  auto a = product_space::sample(f);
  auto b = product_space::sample(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return product_space::project(f.grid(), a);
}

double inner(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  double s = 0.0;
  for (std::size_t idx : f.grid().active_index()) {
    Complex a = f.at(idx), b = g.at(idx);
    s += a.real() * b.real() + a.imag() * b.imag();
  }
  return s;
}

double inner(const VectorField& u, const VectorField& v) { return inner(u.c1, v.c1) + inner(u.c2, v.c2); }

}  // namespace medianflow
