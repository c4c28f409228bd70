#pragma once

#include <numbers>
#include <stdexcept>

#include "medianflow/field.hpp"

namespace medianflow {

/// ||f||_{L^2}^2 = kParseval * sum_k |f^(k)|^2 for the torus of side 2 pi.
/// Every norm below is the coefficient sum without this factor.
inline constexpr double kParseval = 4.0 * std::numbers::pi * std::numbers::pi;

class DegenerateField : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (sum_k |k|^{2s} |f^(k)|^2)^{1/2} over all active k (both members of each pair).
double sobolev_norm(const SpectralField& f, double s);
double sobolev_norm(const VectorField& v, double s);

/// Truncated sharp-annulus surrogate of the C^beta norm:
/// max_j 2^{j beta} sup_x |Delta_j f| with Delta_j keeping 2^{j-1} < |k| <= 2^j,
/// j = 0 .. floor(log2 cutoff).
double holder_norm(const SpectralField& f, double beta);

/// max over grid points of |f(x)|.
double sup_norm(const SpectralField& f);
/// max over grid points of the Euclidean length |v(x)|.
double sup_norm(const VectorField& v);

/// Smallest M in N_* with ||H_M f|| <= beta ||L_M f||. Throws DegenerateField on f = 0.
int spectral_quantile(const SpectralField& f, double beta);
inline int spectral_median(const SpectralField& f) { return spectral_quantile(f, 1.0); }

/// ||f|| / ||grad f||.
double filament_scale(const SpectralField& f);

}  // namespace medianflow
