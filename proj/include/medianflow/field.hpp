#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "medianflow/fft.hpp"
#include "medianflow/grid.hpp"

namespace medianflow {

/// Mean-zero real field on the torus, held as Hermitian Fourier coefficients.
///
/// Normalization: f(x) = sum_k f^(k) e^{i k.x}, f^(k) = (2 pi)^-2 int f e^{-i k.x}.
/// Coefficients outside the active set are identically zero; the invariant
/// f^(-k) = conj f^(k) is maintained by every mutator.
class SpectralField {
 public:
  explicit SpectralField(WaveGrid grid);

  const WaveGrid& grid() const { return grid_; }

  /// Coefficient at k; zero for inactive or out-of-lattice wavenumbers.
  Complex operator[](Wavenumber k) const;
  Complex at(std::size_t idx) const { return coeff_[idx]; }
  /// Sets f^(k) = c and f^(-k) = conj(c). Self-conjugate modes keep Re c.
  void set(Wavenumber k, Complex c);
  void set_at(std::size_t idx, Complex c);

  std::span<const Complex> coefficients() const { return coeff_; }

  bool is_zero() const;
  /// max_k |f^(-k) - conj f^(k)| over the whole lattice.
  double hermitian_defect() const;
  /// max |f^(k)| over inactive lattice sites (must be zero).
  double inactive_leakage() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  SpectralField operator-() const { return SpectralField(*this) *= -1.0; }

  /// Applies a Fourier multiplier m(k) on the active set. The caller ensures
  /// m(-k) = conj m(k) so that the result stays real.
  template <typename Multiplier>
  SpectralField multiplied(Multiplier&& m) const {
    SpectralField out(grid_);
    const auto& idx = grid_.active_index();
    const auto& ks = grid_.active();
    for (std::size_t a = 0; a < idx.size(); ++a) out.coeff_[idx[a]] = coeff_[idx[a]] * Complex(m(ks[a]));
    return out;
  }

  /// Raw mutable storage for kernels that preserve the invariants themselves.
  std::vector<Complex>& raw() { return coeff_; }

 private:
  WaveGrid grid_;
  std::vector<Complex> coeff_;
};

/// Two-component vector field on the torus.
struct VectorField {
  SpectralField c1;
  SpectralField c2;
  bool divergence_free = false;

  explicit VectorField(const WaveGrid& grid) : c1(grid), c2(grid) {}
  VectorField(SpectralField a, SpectralField b, bool div_free = false)
      : c1(std::move(a)), c2(std::move(b)), divergence_free(div_free) {}

  const WaveGrid& grid() const { return c1.grid(); }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }
};

/// Real samples on an n x n uniform grid, x_(a,b) = 2 pi (a, b) / n, row-major.
struct PhysicalField {
  int n = 0;
  std::vector<double> values;

  double& operator()(int a, int b) { return values[std::size_t(a) * n + b]; }
  double operator()(int a, int b) const { return values[std::size_t(a) * n + b]; }
};

PhysicalField to_physical(const SpectralField& f);
/// Drops the mean and every inactive mode.
SpectralField from_physical(const WaveGrid& grid, const PhysicalField& samples);

/// Active-set truncation of the exact convolution sum_{j+k=l} f^(k) g^(j).
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

/// Samples on the padded product lattice and back; building blocks for
/// fused pseudo-spectral kernels (one forward transform per sum of products).
namespace product_space {
AlignedBuffer<double> sample(const SpectralField& f);
SpectralField project(const WaveGrid& grid, AlignedBuffer<double>& samples);
}  // namespace product_space

/// Euclidean inner product of coefficient vectors, Re sum_k f^(k) conj g^(k).
double inner(const SpectralField& f, const SpectralField& g);
double inner(const VectorField& u, const VectorField& v);

}  // namespace medianflow
