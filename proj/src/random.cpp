#include "medianflow/random.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace medianflow {

Complex Rng::complex_normal(double variance) {
  const double s = std::sqrt(0.5 * variance);
  double re = normal();
  double im = normal();
  return {s * re, s * im};
}

std::string Rng::save() const {
  std::ostringstream os;
  os << engine_ << ' ' << normal_;
  return os.str();
}

void Rng::restore(const std::string& state) {
  std::istringstream is(state);
  is >> engine_ >> normal_;
  if (!is) throw std::runtime_error("corrupt RNG state");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

SpectralField random_field(const WaveGrid& grid, Rng& rng, double decay) {
  SpectralField f(grid);
  for (std::size_t idx : grid.pair_representatives()) {
    double scale = decay == 0.0 ? 1.0 : std::pow(double(grid.wavenumber(idx).norm2()), -0.5 * decay);
    f.set_at(idx, rng.complex_normal(1.0) * scale);
  }
  // Self-conjugate Nyquist modes carry a real coefficient.
  for (std::size_t idx : grid.active_index())
    if (grid.conjugate_index(idx) == idx) f.set_at(idx, rng.normal());
  return f;
}

}  // namespace medianflow
