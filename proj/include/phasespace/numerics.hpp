#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace phasespace {

using cplx = std::complex<double>;

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniform position axis plus its FFT-conjugate momentum axis.
// q_i = q_min + i*dq for i in [0, n); p_j = (j - n/2)*dp for j in [0, n).
class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  QuadratureGrid(double q_min, double q_max, std::size_t n, double hbar = 1.0);

  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }
  std::size_t size() const { return n_; }
  double hbar() const { return hbar_; }
  double length() const { return q_max_ - q_min_; }
  double dq() const { return (q_max_ - q_min_) / static_cast<double>(n_); }
  double dp() const;
  double q(std::size_t i) const { return q_min_ + static_cast<double>(i) * dq(); }
  double p(std::size_t j) const;
  double p_min() const { return p(0); }
  double p_max() const { return p(n_ - 1); }

  std::vector<double> q_axis() const;
  std::vector<double> p_axis() const;

  bool operator==(const QuadratureGrid& o) const {
    return q_min_ == o.q_min_ && q_max_ == o.q_max_ && n_ == o.n_ && hbar_ == o.hbar_;
  }
  bool operator!=(const QuadratureGrid& o) const { return !(*this == o); }

 private:
  double q_min_ = -8.0;
  double q_max_ = 8.0;
  std::size_t n_ = 256;
  double hbar_ = 1.0;
};

QuadratureGrid make_grid(double q_min, double q_max, std::size_t n_q, double hbar = 1.0);

bool is_power_of_two(std::size_t n);

// Row-major dense matrix; row index is q, column index is p unless noted.
template <class T>
class Array2 {
 public:
  Array2() = default;
  Array2(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  T* row(std::size_t i) { return data_.data() + i * cols_; }
  const T* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Array2<double>;
using ComplexMatrix = Array2<cplx>;

// ---- integration -------------------------------------------------------

// Trapezoid rule over uniformly spaced samples (end points weighted 1/2).
double integrate_1d(std::span<const double> samples, double spacing);
cplx integrate_1d(std::span<const cplx> samples, double spacing);

double integrate_2d(const RealMatrix& f, double d0, double d1);
cplx integrate_2d(const ComplexMatrix& f, double d0, double d1);

// ---- FFT ---------------------------------------------------------------

// Unnormalized in-place DFT: sign = -1 computes sum x_k exp(-2 pi i jk/n).
void fft(cplx* data, std::size_t n, int sign);
inline void fft(std::vector<cplx>& v, int sign) { fft(v.data(), v.size(), sign); }

// DFT of every row (contiguous axis) or every column of a matrix.
void fft_rows(ComplexMatrix& a, int sign);
void fft_cols(ComplexMatrix& a, int sign);

// Angular frequencies matching the unshifted DFT output order, 2*pi*fftfreq(n, h).
std::vector<double> angular_frequencies(std::size_t n, double spacing);

// Band-limited resampling of a periodic sequence onto a grid `factor` times finer.
std::vector<cplx> upsample(std::span<const cplx> v, std::size_t factor);

// Evaluate the trigonometric interpolant of samples v (spacing h, first sample at x0)
// at the uniform points y_m = y0 + m*dy, m in [0, m_out). Points farther than one
// sample outside [x0, x0 + n*h) are returned as zero instead of a periodic image.
std::vector<cplx> resample_uniform(std::span<const cplx> v, double x0, double h, double y0,
                                   double dy, std::size_t m_out);

// X_m = sum_j x_j exp(-i (w0 + m dw)(t0 + j h)) for m in [0, m_out), by Bluestein's
// algorithm. Arbitrary (non-periodic) frequency spacing.
std::vector<cplx> chirp_dft(std::span<const cplx> x, double t0, double h, double w0, double dw,
                            std::size_t m_out);

// Four-point Lagrange interpolation of samples f (spacing h, first sample at x0) at x.
// Samples beyond either end count as zero; x outside [x0, x0 + (n-1) h] gives 0.
double cubic_interpolate(std::span<const double> f, double x0, double h, double x);

// Shift a sequence by `shift` (in units of samples) using Fourier phase factors;
// content entering from outside the window is zeroed.
void fourier_shift(cplx* v, std::size_t n, double shift);

// ---- smoothing ---------------------------------------------------------

// Convolution with a normalized Gaussian of widths sigma0 (row index) and sigma1
// (contiguous index), in the Fourier domain. d0/d1 are the sample spacings.
void gaussian_convolve_inplace(RealMatrix& f, double d0, double d1, double sigma0, double sigma1);

// Periodic Gaussian multiplier on the spectrum; used by the s-ordered transforms.
void gaussian_convolve_inplace(ComplexMatrix& f, double d0, double d1, double sigma0,
                               double sigma1);

}  // namespace phasespace
