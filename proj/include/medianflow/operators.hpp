#pragma once

#include "medianflow/field.hpp"

namespace medianflow {

// Fourier multipliers on the active set. Odd multipliers (i k, i k_perp) use
// WaveGrid::odd_component, so on Nyquist rows (only active when the dealias
// fraction is 1) the derivative of the unresolved sine part is zero.

VectorField grad(const SpectralField& f);          // i k f^
SpectralField div(const VectorField& v);           // i k . v^
SpectralField laplacian(const SpectralField& f);   // -|k|^2 f^
SpectralField inv_laplacian(const SpectralField& f);  // -f^/|k|^2
/// grad (-Laplacian)^{-1}, multiplier i k/|k|^2. Note div(inv_grad f) = -f.
VectorField inv_grad(const SpectralField& f);
VectorField laplacian(const VectorField& v);

/// Orthogonal projection onto divergence-free fields, I - k k^T/|k|^2.
VectorField leray_project(const VectorField& v);
/// u^ = i k_perp w^/|k|^2 with k_perp = (k2, -k1).
VectorField biot_savart(const SpectralField& w);
/// i k1 v2^ - i k2 v1^; inverse of biot_savart.
SpectralField curl(const VectorField& v);

/// Keeps |k| <= M (Euclidean, boundary inclusive).
SpectralField project_low(const SpectralField& f, double M);
/// Keeps |k| > M.
SpectralField project_high(const SpectralField& f, double M);

/// exp(nu t Laplacian).
SpectralField heat_propagate(const SpectralField& f, double t, double nu = 1.0);
VectorField heat_propagate(const VectorField& v, double t, double nu = 1.0);

/// Largest |k . v^(k)| / |v^(k)| over active modes; zero for exact solenoidal fields.
double divergence_defect(const VectorField& v);

}  // namespace medianflow
