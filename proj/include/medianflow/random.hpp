#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

#include "medianflow/field.hpp"

namespace medianflow {

/// Explicitly seeded generator plus a normal sampler; both serialize to text so
/// a checkpointed run resumes on the identical stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  /// Circular complex Gaussian with E|z|^2 = variance and E z^2 = 0.
  Complex complex_normal(double variance);

  std::string save() const;
  void restore(const std::string& state);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; seed_for(base, i) is the fixed ensemble seed schedule.
std::uint64_t splitmix64(std::uint64_t x);
inline std::uint64_t seed_for(std::uint64_t base, std::uint64_t member) {
  return splitmix64(base ^ splitmix64(member + 0x9E3779B97F4A7C15ull));
}

/// Hermitian field with independent complex Gaussian coefficients scaled by |k|^{-decay}.
SpectralField random_field(const WaveGrid& grid, Rng& rng, double decay = 0.0);

}  // namespace medianflow
