#include "phasespace/numerics.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <type_traits>
#include <utility>

namespace phasespace {

namespace {

using PlanKey = std::pair<std::size_t, int>;

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(std::size_t n, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find({n, sign});
  if (it != cache.end()) return it->second;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache.emplace(PlanKey{n, sign}, plan);
  return plan;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

QuadratureGrid::QuadratureGrid(double q_min, double q_max, std::size_t n, double hbar)
    : q_min_(q_min), q_max_(q_max), n_(n), hbar_(hbar) {
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_max > q_min))
    throw std::invalid_argument("grid: q_max must exceed q_min");
  if (n < 8 || !is_power_of_two(n))
    throw std::invalid_argument("grid: n_q must be a power of two >= 8");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("grid: hbar must be > 0");
}

double QuadratureGrid::dp() const {
  return 2.0 * std::numbers::pi * hbar_ / (static_cast<double>(n_) * dq());
}

double QuadratureGrid::p(std::size_t j) const {
  return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * dp();
}

std::vector<double> QuadratureGrid::q_axis() const {
  std::vector<double> v(n_);
  for (std::size_t i = 0; i < n_; ++i) v[i] = q(i);
  return v;
}

std::vector<double> QuadratureGrid::p_axis() const {
  std::vector<double> v(n_);
  for (std::size_t j = 0; j < n_; ++j) v[j] = p(j);
  return v;
}

QuadratureGrid make_grid(double q_min, double q_max, std::size_t n_q, double hbar) {
  return QuadratureGrid(q_min, q_max, n_q, hbar);
}

template <class T>
static T trapezoid(std::span<const T> s, double h) {
  if (s.empty()) throw std::invalid_argument("integrate: empty input");
  if (s.size() == 1) return T{};
  T acc = 0.5 * s.front();
  for (std::size_t i = 1; i + 1 < s.size(); ++i) acc += s[i];
  acc += 0.5 * s.back();
  return acc * h;
}

double integrate_1d(std::span<const double> samples, double spacing) {
  return trapezoid(samples, spacing);
}

cplx integrate_1d(std::span<const cplx> samples, double spacing) {
  return trapezoid(samples, spacing);
}

template <class T>
static T trapezoid2(const Array2<T>& f, double d0, double d1) {
  if (f.empty()) throw std::invalid_argument("integrate: empty input");
  std::vector<T> rows(f.rows());
  for (std::size_t i = 0; i < f.rows(); ++i)
    rows[i] = trapezoid(std::span<const T>(f.row(i), f.cols()), d1);
  return trapezoid(std::span<const T>(rows), d0);
}

double integrate_2d(const RealMatrix& f, double d0, double d1) { return trapezoid2(f, d0, d1); }
cplx integrate_2d(const ComplexMatrix& f, double d0, double d1) { return trapezoid2(f, d0, d1); }

void fft(cplx* data, std::size_t n, int sign) {
  if (n == 0) return;
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for(n, sign), p, p);
}

void fft_rows(ComplexMatrix& a, int sign) {
  for (std::size_t i = 0; i < a.rows(); ++i) fft(a.row(i), a.cols(), sign);
}

void fft_cols(ComplexMatrix& a, int sign) {
  std::vector<cplx> col(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) col[i] = a(i, j);
    fft(col, sign);
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) = col[i];
  }
}

std::vector<double> angular_frequencies(std::size_t n, double spacing) {
  std::vector<double> k(n);
  const double scale = 2.0 * std::numbers::pi / (static_cast<double>(n) * spacing);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<long>(i);
    const long half = static_cast<long>(n) / 2;
    k[i] = scale * static_cast<double>(ii < half ? ii : ii - static_cast<long>(n));
  }
  return k;
}

std::vector<cplx> upsample(std::span<const cplx> v, std::size_t factor) {
  const std::size_t n = v.size();
  if (factor <= 1) return {v.begin(), v.end()};
  std::vector<cplx> spec(v.begin(), v.end());
  fft(spec, -1);
  const std::size_t m = n * factor;
  std::vector<cplx> out(m, cplx{});
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < half; ++k) out[k] = spec[k];
  for (std::size_t k = half + 1; k < n; ++k) out[m - n + k] = spec[k];
  // split the Nyquist bin symmetrically
  out[half] = 0.5 * spec[half];
  out[m - half] += 0.5 * spec[half];
  fft(out, +1);
  const double norm = 1.0 / static_cast<double>(n);
  for (auto& x : out) x *= norm;
  return out;
}

void fourier_shift(cplx* v, std::size_t n, double shift) {
  if (shift == 0.0) return;
  fft(v, n, -1);
  const double two_pi = 2.0 * std::numbers::pi;
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == half) {
      v[k] *= std::cos(std::numbers::pi * shift);
      continue;
    }
    const double kk = k < half ? static_cast<double>(k) : static_cast<double>(k) - n;
    const double ph = -two_pi * kk * shift / static_cast<double>(n);
    v[k] *= cplx(std::cos(ph), std::sin(ph));
  }
  fft(v, n, +1);
  const double norm = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double src = static_cast<double>(m) - shift;
    if (src < -0.5 || src > static_cast<double>(n) - 0.5)
      v[m] = 0.0;
    else
      v[m] *= norm;
  }
}

std::vector<cplx> resample_uniform(std::span<const cplx> v, double x0, double h, double y0,
                                   double dy, std::size_t m_out) {
  const std::size_t n = v.size();
  if (n == 0 || m_out == 0) return std::vector<cplx>(m_out);
  std::vector<cplx> spec(v.begin(), v.end());
  fft(spec, -1);
  const double two_pi = 2.0 * std::numbers::pi;
  const long half = static_cast<long>(n / 2);
  // coefficients for k = -n/2..n/2 (Nyquist split), index kk = k + n/2
  const std::size_t K = n + 1;
  std::vector<cplx> a(K);
  const double offset = y0 - x0;
  for (std::size_t kk = 0; kk < K; ++kk) {
    const long k = static_cast<long>(kk) - half;
    const std::size_t src = static_cast<std::size_t>((k % static_cast<long>(n) + static_cast<long>(n)) %
                                                     static_cast<long>(n));
    cplx c = spec[src] / static_cast<double>(n);
    if (k == -half || k == half) c *= 0.5;
    const double ph = two_pi * static_cast<double>(k) * offset / (static_cast<double>(n) * h);
    a[kk] = c * cplx(std::cos(ph), std::sin(ph));
  }
  // g(m) = exp(-i*half*beta*m) * sum_kk a_kk exp(i beta kk m), via Bluestein
  const double beta = two_pi * dy / (static_cast<double>(n) * h);
  auto chirp = [beta](double j) {
    const double ph = 0.5 * beta * j * j;
    return cplx(std::cos(ph), std::sin(ph));
  };
  const std::size_t L = next_pow2(K + m_out - 1);
  std::vector<cplx> u(L, cplx{}), w(L, cplx{});
  for (std::size_t kk = 0; kk < K; ++kk) u[kk] = a[kk] * chirp(static_cast<double>(kk));
  for (std::size_t m = 0; m < m_out; ++m) w[m] = std::conj(chirp(static_cast<double>(m)));
  for (std::size_t kk = 1; kk < K; ++kk) w[L - kk] = std::conj(chirp(static_cast<double>(kk)));
  fft(u, -1);
  fft(w, -1);
  for (std::size_t i = 0; i < L; ++i) u[i] *= w[i];
  fft(u, +1);
  std::vector<cplx> out(m_out);
  const double lo = x0 - h;
  const double hi = x0 + static_cast<double>(n) * h;
  for (std::size_t m = 0; m < m_out; ++m) {
    const double y = y0 + static_cast<double>(m) * dy;
    if (y < lo || y > hi) {
      out[m] = 0.0;
      continue;
    }
    const double md = static_cast<double>(m);
    const double ph = -static_cast<double>(half) * beta * md;
    out[m] = chirp(md) * (u[m] / static_cast<double>(L)) * cplx(std::cos(ph), std::sin(ph));
  }
  return out;
}

std::vector<cplx> chirp_dft(std::span<const cplx> x, double t0, double h, double w0, double dw,
                            std::size_t m_out) {
  const std::size_t n = x.size();
  std::vector<cplx> out(m_out);
  if (n == 0 || m_out == 0) return out;
  const double beta = dw * h;
  auto cis = [](double ph) { return cplx(std::cos(ph), std::sin(ph)); };
  const std::size_t L = next_pow2(n + m_out - 1);
  std::vector<cplx> u(L, cplx{}), k(L, cplx{});
  for (std::size_t j = 0; j < n; ++j) {
    const double jd = static_cast<double>(j);
    u[j] = x[j] * cis(-w0 * jd * h - 0.5 * beta * jd * jd);
  }
  for (std::size_t m = 0; m < m_out; ++m) {
    const double md = static_cast<double>(m);
    k[m] = cis(0.5 * beta * md * md);
  }
  for (std::size_t j = 1; j < n; ++j) {
    const double jd = static_cast<double>(j);
    k[L - j] = cis(0.5 * beta * jd * jd);
  }
  fft(u, -1);
  fft(k, -1);
  for (std::size_t i = 0; i < L; ++i) u[i] *= k[i];
  fft(u, +1);
  const double norm = 1.0 / static_cast<double>(L);
  for (std::size_t m = 0; m < m_out; ++m) {
    const double md = static_cast<double>(m);
    out[m] = u[m] * norm * cis(-0.5 * beta * md * md - (w0 + md * dw) * t0);
  }
  return out;
}

double cubic_interpolate(std::span<const double> f, double x0, double h, double x) {
  const std::size_t n = f.size();
  if (n == 0) return 0.0;
  const double fx = (x - x0) / h;
  if (!(fx >= 0.0 && fx <= static_cast<double>(n - 1))) return 0.0;
  const auto a = static_cast<std::ptrdiff_t>(std::floor(fx));
  const double t = fx - static_cast<double>(a);
  const double w[4] = {-t * (t - 1) * (t - 2) / 6.0, (t + 1) * (t - 1) * (t - 2) / 2.0,
                       -(t + 1) * t * (t - 2) / 2.0, (t + 1) * t * (t - 1) / 6.0};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto j = a - 1 + i;
    if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) acc += w[i] * f[static_cast<std::size_t>(j)];
  }
  return acc;
}

namespace {

template <class M>
void convolve_spectral(M& f, double d0, double d1, double s0, double s1) {
  if (s0 < 0.0 || s1 < 0.0) throw std::invalid_argument("gaussian_convolve_2d: negative width");
  if (s0 == 0.0 && s1 == 0.0) return;
  ComplexMatrix c(f.rows(), f.cols());
  for (std::size_t i = 0; i < f.size(); ++i) c.data()[i] = f.data()[i];
  fft_rows(c, -1);
  fft_cols(c, -1);
  const auto k0 = angular_frequencies(f.rows(), d0);
  const auto k1 = angular_frequencies(f.cols(), d1);
  std::vector<double> g1(f.cols());
  for (std::size_t j = 0; j < f.cols(); ++j) g1[j] = std::exp(-0.5 * s1 * s1 * k1[j] * k1[j]);
  const double norm = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const double g0 = std::exp(-0.5 * s0 * s0 * k0[i] * k0[i]) * norm;
    cplx* r = c.row(i);
    for (std::size_t j = 0; j < f.cols(); ++j) r[j] *= g0 * g1[j];
  }
  fft_cols(c, +1);
  fft_rows(c, +1);
  if constexpr (std::is_same_v<M, RealMatrix>) {
    for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = c.data()[i].real();
  } else {
    f = std::move(c);
  }
}

}  // namespace

void gaussian_convolve_inplace(RealMatrix& f, double d0, double d1, double sigma0,
                               double sigma1) {
  convolve_spectral(f, d0, d1, sigma0, sigma1);
}

void gaussian_convolve_inplace(ComplexMatrix& f, double d0, double d1, double sigma0,
                               double sigma1) {
  convolve_spectral(f, d0, d1, sigma0, sigma1);
}

}  // namespace phasespace
