#pragma once

#include <functional>
#include <string>
#include <vector>

#include "medianflow/field.hpp"

namespace medianflow {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;  // measured quantity
  double limit = 0.0;  // threshold it is compared against
  std::string detail;
};

/// Operators under test. Swapping one for a perturbed version is how the suite's
/// sensitivity is tested.
struct VerifyHooks {
  std::function<VectorField(const VectorField&)> leray;
  VerifyHooks();
};

/// Truncated convolution of the coefficient lists, O(active^2); reference for
/// the dealiased product.
SpectralField brute_force_product(const SpectralField& a, const SpectralField& b);

/// Invariant suite at pinned seeds; finishes in seconds.
std::vector<Check> run_verify(const VerifyHooks& hooks = {});
std::string format_check(const Check& c);

}  // namespace medianflow
