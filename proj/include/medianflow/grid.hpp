#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace medianflow {

using Complex = std::complex<double>;

/// Integer wavenumber on the 2-torus.
struct Wavenumber {
  int k1 = 0;
  int k2 = 0;

  constexpr long norm2() const { return long(k1) * k1 + long(k2) * k2; }
  double norm() const;
  constexpr Wavenumber operator-() const { return {-k1, -k2}; }
  constexpr Wavenumber perp() const { return {k2, -k1}; }
  friend constexpr Wavenumber operator+(Wavenumber a, Wavenumber b) {
    return {a.k1 + b.k1, a.k2 + b.k2};
  }
  friend constexpr Wavenumber operator-(Wavenumber a, Wavenumber b) {
    return {a.k1 - b.k1, a.k2 - b.k2};
  }
  friend constexpr bool operator==(Wavenumber a, Wavenumber b) = default;
};

constexpr long dot(Wavenumber a, Wavenumber b) {
  return long(a.k1) * b.k1 + long(a.k2) * b.k2;
}

/// Exact rational in (0, 1], used for the dealiasing fraction.
struct Fraction {
  int num = 2;
  int den = 3;

  double value() const { return double(num) / den; }
  static Fraction parse(const std::string& text);
  std::string str() const;
  friend bool operator==(const Fraction& a, const Fraction& b) {
    return long(a.num) * b.den == long(b.num) * a.den;
  }
};

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FftPlans;

/// Precomputed map between active coefficients and one half-spectrum lattice.
/// Entry a pairs the dense index of an active mode with its half-spectrum
/// offset; `conj` marks modes read back through Hermitian symmetry (k2 < 0).
struct HalfSpectrumSlots {
  std::vector<std::size_t> coeff;
  std::vector<std::size_t> offset;
  std::vector<unsigned char> conj;
};

/// n x n Fourier lattice with wavenumbers in {-n/2+1, ..., n/2}^2.
///
/// Coefficients are stored densely in row-major order, row index for k1 and
/// column index for k2, both wrapped modulo n. The active set is
/// {k != 0 : |k1|, |k2| <= cutoff} with cutoff = floor(dealias * n / 2).
/// When the cutoff reaches n/2 the Nyquist rows are active; odd Fourier
/// multipliers vanish there (see odd_component).
///
/// Copies are cheap and share immutable lattice tables.
class WaveGrid {
 public:
  WaveGrid(int n, Fraction dealias = {2, 3});

  int n() const { return data_->n; }
  Fraction dealias() const { return data_->dealias; }
  int cutoff() const { return data_->cutoff; }
  std::size_t size() const { return std::size_t(data_->n) * data_->n; }

  /// Padded size on which pseudo-spectral products are alias free.
  int product_size() const { return data_->product_n; }

  const std::vector<Wavenumber>& active() const { return data_->active; }
  const std::vector<std::size_t>& active_index() const { return data_->active_index; }
  /// Active modes k with index(k) < index(-k); one per Hermitian pair.
  const std::vector<std::size_t>& pair_representatives() const { return data_->representatives; }

  bool is_active(Wavenumber k) const;
  std::size_t index(Wavenumber k) const;
  Wavenumber wavenumber(std::size_t idx) const { return data_->wavenumber[idx]; }
  std::size_t conjugate_index(std::size_t idx) const { return data_->conjugate[idx]; }
  bool active_at(std::size_t idx) const { return data_->active_mask[idx] != 0; }

  /// Component used by odd multipliers (i k, i k_perp): zero on Nyquist rows.
  int odd_component(int ki) const { return 2 * ki == data_->n ? 0 : ki; }

  const FftPlans& plans() const { return *data_->plans; }
  const FftPlans& product_plans() const { return *data_->product_plans; }
  /// Slot tables for the base and product lattices; empty when Nyquist rows
  /// are active (those take the general path).
  const HalfSpectrumSlots& slots() const { return data_->slots; }
  const HalfSpectrumSlots& product_slots() const { return data_->product_slots; }

  friend bool operator==(const WaveGrid& a, const WaveGrid& b) {
    return a.data_ == b.data_ || (a.n() == b.n() && a.dealias() == b.dealias());
  }

 private:
  struct Data {
    int n;
    Fraction dealias;
    int cutoff;
    int product_n;
    std::vector<Wavenumber> wavenumber;
    std::vector<std::size_t> conjugate;
    std::vector<unsigned char> active_mask;
    std::vector<Wavenumber> active;
    std::vector<std::size_t> active_index;
    std::vector<std::size_t> representatives;
    std::shared_ptr<const FftPlans> plans;
    std::shared_ptr<const FftPlans> product_plans;
    HalfSpectrumSlots slots;
    HalfSpectrumSlots product_slots;
  };
  std::shared_ptr<const Data> data_;
};

WaveGrid make_grid(int n, Fraction dealias = {2, 3});

void require_same_grid(const WaveGrid& a, const WaveGrid& b, const char* where);

}  // namespace medianflow
