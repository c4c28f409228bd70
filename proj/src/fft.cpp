#include "medianflow/fft.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <new>
#include <stdexcept>

namespace medianflow {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlans::FftPlans(int m) : m_(m) {
  AlignedBuffer<std::complex<double>> half(half_size());
  AlignedBuffer<double> real(real_size());
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* h = reinterpret_cast<fftw_complex*>(half.data());
  c2r_ = fftw_plan_dft_c2r_2d(m, m, h, real.data(), FFTW_ESTIMATE);
  r2c_ = fftw_plan_dft_r2c_2d(m, m, real.data(), h, FFTW_ESTIMATE);
  if (!c2r_ || !r2c_) throw std::runtime_error("FFTW planning failed");
}

FftPlans::~FftPlans() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(c2r_));
  fftw_destroy_plan(static_cast<fftw_plan>(r2c_));
}

void FftPlans::inverse(std::complex<double>* half, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(half), out);
}

void FftPlans::forward(double* real, std::complex<double>* half) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), real, reinterpret_cast<fftw_complex*>(half));
}

template <typename T>
AlignedBuffer<T>::AlignedBuffer(std::size_t n) : n_(n) {
  ptr_ = static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)));
  if (!ptr_) throw std::bad_alloc();
  std::memset(static_cast<void*>(ptr_), 0, sizeof(T) * n);
}

template <typename T>
AlignedBuffer<T>::AlignedBuffer(std::size_t n, NoInit) : n_(n) {
  ptr_ = static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)));
  if (!ptr_) throw std::bad_alloc();
}

template <typename T>
AlignedBuffer<T>::~AlignedBuffer() {
  if (ptr_) fftw_free(ptr_);
}

template <typename T>
AlignedBuffer<T>::AlignedBuffer(AlignedBuffer&& other) noexcept : ptr_(other.ptr_), n_(other.n_) {
  other.ptr_ = nullptr;
  other.n_ = 0;
}

template <typename T>
AlignedBuffer<T>& AlignedBuffer<T>::operator=(AlignedBuffer&& other) noexcept {
  if (this != &other) {
    if (ptr_) fftw_free(ptr_);
    ptr_ = other.ptr_;
    n_ = other.n_;
    other.ptr_ = nullptr;
    other.n_ = 0;
  }
  return *this;
}

template class AlignedBuffer<double>;
template class AlignedBuffer<std::complex<double>>;

void keep_buffers_on_heap() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace medianflow
