#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace medianflow {

/// FFTW real<->complex plans for one m x m lattice.
///
/// Half-spectrum layout is m x (m/2 + 1), row-major. Plans use FFTW_ESTIMATE so
/// that repeated runs pick identical algorithms (bitwise reproducibility).
/// Execution is thread safe; planning is serialized internally.
class FftPlans {
 public:
  explicit FftPlans(int m);
  ~FftPlans();
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  int m() const { return m_; }
  std::size_t half_size() const { return std::size_t(m_) * (m_ / 2 + 1); }
  std::size_t real_size() const { return std::size_t(m_) * m_; }

  /// Unnormalized inverse transform: out(x) = sum_k in(k) e^{i k.x}.
  /// `half` is clobbered.
  void inverse(std::complex<double>* half, double* out) const;
  /// Unnormalized forward transform: out(k) = sum_x in(x) e^{-i k.x}.
  /// `real` is clobbered.
  void forward(double* real, std::complex<double>* half) const;

 private:
  int m_;
  void* c2r_ = nullptr;
  void* r2c_ = nullptr;
};

/// 64-byte aligned scratch buffer suitable for FFTW new-array execution.
template <typename T>
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n);
  /// Leaves the contents indeterminate; for buffers a transform overwrites.
  struct NoInit {};
  AlignedBuffer(std::size_t n, NoInit);
  ~AlignedBuffer();
  AlignedBuffer(AlignedBuffer&& other) noexcept;
  AlignedBuffer& operator=(AlignedBuffer&& other) noexcept;
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;

  T* data() { return ptr_; }
  const T* data() const { return ptr_; }
  std::size_t size() const { return n_; }
  T& operator[](std::size_t i) { return ptr_[i]; }
  const T& operator[](std::size_t i) const { return ptr_[i]; }

 private:
  T* ptr_ = nullptr;
  std::size_t n_ = 0;
};

extern template class AlignedBuffer<double>;
extern template class AlignedBuffer<std::complex<double>>;

/// Field buffers are a few hundred kB and churn every step. glibc would hand each
/// one to mmap and page-fault it back in; this keeps them on the heap instead.
/// No-op elsewhere. Call once from main.
void keep_buffers_on_heap();

}  // namespace medianflow
