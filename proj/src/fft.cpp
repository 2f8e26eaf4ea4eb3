#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace stripwall::detail {

namespace {
// the FFTW planner is not thread-safe
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("RealFft: length must be >= 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  spec_ = fftw_alloc_complex(n / 2 + 1);
  fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(inv_);
  fftw_free(real_);
  fftw_free(spec_);
}

std::vector<std::complex<double>> RealFft::forward(const std::vector<double>& in) {
  if (static_cast<int>(in.size()) != n_) throw std::invalid_argument("RealFft::forward: size mismatch");
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(fwd_);
  std::vector<std::complex<double>> out(bins());
  std::memcpy(static_cast<void*>(out.data()), spec_, sizeof(fftw_complex) * bins());
  return out;
}

std::vector<double> RealFft::inverse(const std::vector<std::complex<double>>& in) {
  if (static_cast<int>(in.size()) != bins()) throw std::invalid_argument("RealFft::inverse: size mismatch");
  std::memcpy(spec_, in.data(), sizeof(fftw_complex) * bins());
  fftw_execute(inv_);
  return std::vector<double>(real_, real_ + n_);
}

RealFft2::RealFft2(int n0, int n1) : n0_(n0), n1_(n1) {
  if (n0 < 2 || n1 < 2) throw std::invalid_argument("RealFft2: sizes must be >= 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(static_cast<std::size_t>(n0) * n1);
  spec_ = fftw_alloc_complex(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
  fwd_ = fftw_plan_dft_r2c_2d(n0, n1, real_, spec_, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_2d(n0, n1, spec_, real_, FFTW_ESTIMATE);
}

RealFft2::~RealFft2() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(inv_);
  fftw_free(real_);
  fftw_free(spec_);
}

std::vector<std::complex<double>> RealFft2::forward(const std::vector<double>& in) {
  const std::size_t nr = static_cast<std::size_t>(n0_) * n1_;
  const std::size_t nc = static_cast<std::size_t>(n0_) * bins1();
  if (in.size() != nr) throw std::invalid_argument("RealFft2::forward: size mismatch");
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(fwd_);
  std::vector<std::complex<double>> out(nc);
  std::memcpy(static_cast<void*>(out.data()), spec_, sizeof(fftw_complex) * nc);
  return out;
}

std::vector<double> RealFft2::inverse(const std::vector<std::complex<double>>& in) {
  const std::size_t nr = static_cast<std::size_t>(n0_) * n1_;
  const std::size_t nc = static_cast<std::size_t>(n0_) * bins1();
  if (in.size() != nc) throw std::invalid_argument("RealFft2::inverse: size mismatch");
  std::memcpy(spec_, in.data(), sizeof(fftw_complex) * nc);
  fftw_execute(inv_);
  return std::vector<double>(real_, real_ + nr);
}

int good_fft_size(int n) {
  for (int m = std::max(n, 2);; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace stripwall::detail
