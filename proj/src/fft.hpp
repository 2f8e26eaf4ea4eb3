#pragma once

#include <complex>
#include <vector>

#include <fftw3.h>

namespace stripwall::detail {

// Real <-> half-complex 1D transforms of fixed length (unnormalized, FFTW sign
// convention: forward uses exp(-i k x)).
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }
  std::vector<std::complex<double>> forward(const std::vector<double>& in);
  // Result is NOT divided by n.
  std::vector<double> inverse(const std::vector<std::complex<double>>& in);

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

// Same for 2D arrays stored row-major as [n0][n1], half spectrum along n1.
class RealFft2 {
 public:
  RealFft2(int n0, int n1);
  ~RealFft2();
  RealFft2(const RealFft2&) = delete;
  RealFft2& operator=(const RealFft2&) = delete;

  int n0() const { return n0_; }
  int n1() const { return n1_; }
  int bins1() const { return n1_ / 2 + 1; }
  std::vector<std::complex<double>> forward(const std::vector<double>& in);
  std::vector<double> inverse(const std::vector<std::complex<double>>& in);

 private:
  int n0_, n1_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

// Smallest integer >= n of the form 2^a 3^b 5^c.
int good_fft_size(int n);

}  // namespace stripwall::detail
