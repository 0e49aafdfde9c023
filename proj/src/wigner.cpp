#include "phasespace/wigner.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace phasespace {

namespace {

constexpr double kRealTol = 1e-10;
constexpr double kPi = std::numbers::pi;

void require_kind(const PhaseSpaceFunction& w, Kind k, const char* what) {
  if (w.kind != k) throw std::invalid_argument(std::string(what) + ": expects a " + kind_name(k) +
                                               " function, got " + kind_name(w.kind));
}

void require_real(const PhaseSpaceFunction& w, const char* what) {
  if (w.is_complex()) throw std::invalid_argument(std::string(what) + ": expects a real function");
}

// Shared chord transform. chord(i, k, out) writes f(k) for row i, where the fine
// index 2i +- k addresses samples at half the q-spacing.
template <class Chord>
ComplexMatrix chord_transform(const QuadratureGrid& g, Chord&& chord) {
  const std::size_t n = g.size();
  const long ln = static_cast<long>(n);
  ComplexMatrix out(n, n);
  std::vector<cplx> buf(n);
  const double scale = g.dq() / (2.0 * kPi * g.hbar());
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(buf.begin(), buf.end(), cplx{});
    const long c = 2 * static_cast<long>(i);
    const long kmax = std::min(c, 2 * ln - 1 - c);
    for (long k = -std::min(kmax, ln - 1); k <= std::min(kmax, ln - 1); ++k) {
      const cplx f = chord(c, k);
      const auto slot = static_cast<std::size_t>((k + ln) % ln);
      buf[slot] += (k & 1) ? -f : f;
    }
    fft(buf, -1);
    cplx* r = out.row(i);
    for (std::size_t j = 0; j < n; ++j) r[j] = buf[j] * scale;
  }
  return out;
}

PhaseSpaceFunction real_wigner(const QuadratureGrid& g, const ComplexMatrix& c, const char* what) {
  double resid = 0.0;
  for (const auto& x : c.data()) resid = std::max(resid, std::abs(x.imag()));
  if (resid > kRealTol) {
    std::ostringstream os;
    os << what << ": imaginary residue " << resid << " exceeds " << kRealTol;
    throw NumericError(os.str());
  }
  return PhaseSpaceFunction::from_complex(g, Kind::Wigner, 0.0, c, false);
}

ComplexMatrix upsample_2d(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  ComplexMatrix rows(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto u = upsample(std::span<const cplx>(a.row(i), n), 2);
    std::copy(u.begin(), u.end(), rows.row(i));
  }
  ComplexMatrix out(2 * n, 2 * n);
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < 2 * n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = rows(i, j);
    auto u = upsample(col, 2);
    for (std::size_t i = 0; i < 2 * n; ++i) out(i, j) = u[i];
  }
  return out;
}

// Spectral derivative of order r along q (axis 0) or p (axis 1).
RealMatrix spectral_derivative(const RealMatrix& f, double spacing, int axis, int r) {
  const std::size_t n = f.rows();
  ComplexMatrix c(n, f.cols());
  for (std::size_t i = 0; i < f.size(); ++i) c.data()[i] = f.data()[i];
  const std::size_t len = axis == 0 ? n : f.cols();
  const auto k = angular_frequencies(len, spacing);
  std::vector<cplx> mult(len);
  for (std::size_t j = 0; j < len; ++j) {
    mult[j] = std::pow(cplx(0.0, k[j]), r) / static_cast<double>(len);
    if ((r & 1) && j == len / 2) mult[j] = 0.0;
  }
  if (axis == 0) {
    fft_cols(c, -1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) *= mult[i];
    fft_cols(c, +1);
  } else {
    fft_rows(c, -1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) *= mult[j];
    fft_rows(c, +1);
  }
  RealMatrix out(n, f.cols());
  for (std::size_t i = 0; i < f.size(); ++i) out.data()[i] = c.data()[i].real();
  return out;
}

double l2(const RealMatrix& m) {
  double acc = 0.0;
  for (double x : m.data()) acc += x * x;
  return std::sqrt(acc);
}

void check_frame(const OscillatorFrame& f, const QuadratureGrid& g) {
  f.validate();
  if (std::abs(f.hbar - g.hbar()) > 1e-15 * g.hbar())
    throw std::invalid_argument("frame and grid disagree on hbar");
}

}  // namespace

PhaseSpaceFunction wigner_from_wavefunction(const WaveFunction& psi) {
  const auto f = upsample(psi.psi, 2);
  auto c = chord_transform(psi.grid, [&](long c0, long k) {
    return std::conj(f[static_cast<std::size_t>(c0 - k)]) * f[static_cast<std::size_t>(c0 + k)];
  });
  return real_wigner(psi.grid, c, "wigner_from_wavefunction");
}

PhaseSpaceFunction wigner_from_density(const DensityMatrix& rho) {
  const ComplexMatrix r = upsample_2d(rho.rho);
  auto c = chord_transform(rho.grid, [&](long c0, long k) {
    return r(static_cast<std::size_t>(c0 + k), static_cast<std::size_t>(c0 - k));
  });
  return real_wigner(rho.grid, c, "wigner_from_density");
}

PhaseSpaceFunction cross_wigner(const WaveFunction& psi_n, const WaveFunction& psi_m) {
  require_same_grid(psi_n.grid, psi_m.grid, "cross_wigner");
  const auto a = upsample(psi_n.psi, 2);
  const auto b = upsample(psi_m.psi, 2);
  auto c = chord_transform(psi_n.grid, [&](long c0, long k) {
    return std::conj(a[static_cast<std::size_t>(c0 - k)]) * b[static_cast<std::size_t>(c0 + k)];
  });
  return PhaseSpaceFunction::from_complex(psi_n.grid, Kind::Wigner, 0.0, c, true);
}

Marginals marginals(const PhaseSpaceFunction& w) {
  require_real(w, "marginals");
  const std::size_t n = w.n();
  Marginals m;
  m.position.resize(n);
  m.momentum.resize(n);
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i)
    m.position[i] = integrate_1d(std::span<const double>(w.re.row(i), n), w.grid.dp());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = w.re(i, j);
    m.momentum[j] = integrate_1d(col, w.grid.dq());
  }
  return m;
}

double overlap(const PhaseSpaceFunction& w1, const PhaseSpaceFunction& w2) {
  require_same_grid(w1.grid, w2.grid, "overlap");
  require_real(w1, "overlap");
  require_real(w2, "overlap");
  RealMatrix prod(w1.n(), w1.n());
  for (std::size_t i = 0; i < prod.size(); ++i) prod.data()[i] = w1.re.data()[i] * w2.re.data()[i];
  return 2.0 * kPi * w1.grid.hbar() * integrate_2d(prod, w1.grid.dq(), w1.grid.dp());
}

DensityMatrix density_from_wigner(const PhaseSpaceFunction& w) {
  const std::size_t n = w.n();
  const long ln = static_cast<long>(n);
  const ComplexMatrix c = w.to_complex();
  // upsample along q so that every midpoint (q_a + q_b)/2 is a sample
  ComplexMatrix fine(2 * n, n);
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = c(i, j);
    auto u = upsample(col, 2);
    for (std::size_t i = 0; i < 2 * n; ++i) fine(i, j) = u[i];
  }
  fft_rows(fine, +1);
  const double dp = w.grid.dp();
  DensityMatrix out{w.grid, ComplexMatrix(n, n)};
  for (long a = 0; a < ln; ++a) {
    for (long b = 0; b < ln; ++b) {
      const long d = a - b;
      const long ad = d < 0 ? -d : d;
      if (2 * ad > ln) continue;
      const cplx h = fine(static_cast<std::size_t>(a + b), static_cast<std::size_t>((d + ln) % ln));
      double f = (d & 1) ? -dp : dp;
      if (2 * ad == ln) f *= 0.5;
      out.rho(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = f * h;
    }
  }
  return out;
}

PhaseSpaceFunction s_parameterized(const PhaseSpaceFunction& w, double s,
                                   const OscillatorFrame& frame) {
  require_kind(w, Kind::Wigner, "s_parameterized");
  check_frame(frame, w.grid);
  if (s > 0.0)
    throw std::domain_error("s_parameterized: s > 0 distributions are singular and not evaluated");
  if (s == 0.0) return w;
  const double h = frame.hbar, m = frame.mass, om = frame.omega;
  const double sq = std::sqrt(-s * h / (2.0 * m * om));
  const double sp = std::sqrt(-s * m * h * om / 2.0);
  PhaseSpaceFunction out = gaussian_convolve_2d(w, sq, sp);
  out.kind = Kind::SParam;
  out.param = s;
  return out;
}

PhaseSpaceFunction s_parameterized(const PhaseSpaceFunction& w, double s) {
  return s_parameterized(w, s, frame_for(w.grid));
}

PhaseSpaceFunction husimi(const PhaseSpaceFunction& w, double zeta, const OscillatorFrame& frame) {
  require_kind(w, Kind::Wigner, "husimi");
  check_frame(frame, w.grid);
  if (!(zeta > 0.0)) throw std::invalid_argument("husimi: zeta must be > 0");
  const double h = frame.hbar, m = frame.mass;
  PhaseSpaceFunction out =
      gaussian_convolve_2d(w, std::sqrt(h / (2.0 * m * zeta)), std::sqrt(h * m * zeta / 2.0));
  out.kind = Kind::Husimi;
  out.param = zeta;
  return out;
}

PhaseSpaceFunction husimi(const PhaseSpaceFunction& w, double zeta) {
  return husimi(w, zeta, frame_for(w.grid));
}

PhaseSpaceFunction kirkwood(const PhaseSpaceFunction& w, double b) {
  require_kind(w, Kind::Wigner, "kirkwood");
  const std::size_t n = w.n();
  ComplexMatrix c = w.to_complex();
  if (b != 0.0) {
    fft_rows(c, -1);
    fft_cols(c, -1);
    const auto kq = angular_frequencies(n, w.grid.dq());
    const auto kp = angular_frequencies(n, w.grid.dp());
    const double a = -0.5 * w.grid.hbar() * b;
    const double norm = 1.0 / static_cast<double>(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        // Nyquist rows/columns have no unique sign; drop the phase there
        const double ph = (i == n / 2 || j == n / 2) ? 0.0 : a * kq[i] * kp[j];
        c(i, j) *= cplx(std::cos(ph), std::sin(ph)) * norm;
      }
    fft_cols(c, +1);
    fft_rows(c, +1);
  }
  return PhaseSpaceFunction::from_complex(w.grid, Kind::Kirkwood, b, c, true);
}

PhaseSpaceFunction weyl_function(const PhaseSpaceFunction& w) {
  require_kind(w, Kind::Wigner, "weyl_function");
  const auto& g = w.grid;
  const std::size_t n = w.n();
  ComplexMatrix c = w.to_complex();
  for (std::size_t a = 1; a < n; a += 2)
    for (std::size_t b = 0; b < n; ++b) c(a, b) = -c(a, b);
  fft_cols(c, -1);  // row index is now the P index j
  const double half = static_cast<double>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    const double ph = -(static_cast<double>(j) - half) * g.dp() * g.q_min() / g.hbar();
    const cplx e(std::cos(ph), std::sin(ph));
    for (std::size_t b = 0; b < n; ++b) c(j, b) *= (b & 1) ? -e : e;
  }
  fft_rows(c, +1);  // column index is now the Q index i
  const double scale = g.dq() * g.dp();
  const QuadratureGrid out_grid = make_grid(-0.5 * g.length(), 0.5 * g.length(), n, g.hbar());
  PhaseSpaceFunction out(out_grid, Kind::Weyl, 0.0, true);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = c(j, i) * ((i & 1) ? -scale : scale);
      out.re(i, j) = v.real();
      out.im(i, j) = v.imag();
    }
  return out;
}

double expectation(const PhaseSpaceFunction& w, int a, int b) {
  require_real(w, "expectation");
  if (a < 0 || b < 0 || a + b > 4) throw std::invalid_argument("expectation: need a, b >= 0, a + b <= 4");
  const auto& g = w.grid;
  const std::size_t n = w.n();
  double edge = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i < 2 || i + 2 >= n || j < 2 || j + 2 >= n) edge += std::abs(w.re(i, j));
  edge *= g.dq() * g.dp();
  if (edge > 1e-8) {
    std::ostringstream os;
    os << "expectation: " << edge << " of |W| sits on the grid edge; moments unreliable";
    throw NumericError(os.str());
  }
  RealMatrix f(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double qa = std::pow(g.q(i), a);
    for (std::size_t j = 0; j < n; ++j) f(i, j) = qa * std::pow(g.p(j), b) * w.re(i, j);
  }
  return integrate_2d(f, g.dq(), g.dp());
}

Uncertainty uncertainty(const PhaseSpaceFunction& w) {
  const double norm = expectation(w, 0, 0);
  const double mq = expectation(w, 1, 0) / norm, mp = expectation(w, 0, 1) / norm;
  const double vq = expectation(w, 2, 0) / norm - mq * mq;
  const double vp = expectation(w, 0, 2) / norm - mp * mp;
  Uncertainty u;
  u.dq = std::sqrt(std::max(vq, 0.0));
  u.dp = std::sqrt(std::max(vp, 0.0));
  u.product = u.dq * u.dp;
  return u;
}

double negativity_volume(const PhaseSpaceFunction& w) {
  require_real(w, "negativity_volume");
  RealMatrix f(w.n(), w.n());
  for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = std::max(-w.re.data()[i], 0.0);
  return integrate_2d(f, w.grid.dq(), w.grid.dp());
}

StationaryResiduals stationary_residuals(const PhaseSpaceFunction& w, const PolynomialPotential& v,
                                         double energy, double mass) {
  require_real(w, "stationary_residuals");
  if (!(mass > 0.0)) throw std::invalid_argument("stationary_residuals: mass must be > 0");
  const auto& g = w.grid;
  const std::size_t n = w.n();
  const double h = g.hbar(), h2 = h * h, h4 = h2 * h2;
  const int deg = v.degree();
  auto dp = [&](int r) { return spectral_derivative(w.re, g.dp(), 1, r); };
  const RealMatrix dq1 = spectral_derivative(w.re, g.dq(), 0, 1);
  const RealMatrix dq2 = spectral_derivative(w.re, g.dq(), 0, 2);
  const RealMatrix dp1 = dp(1), dp2 = dp(2);
  const RealMatrix dp3 = deg >= 3 ? dp(3) : RealMatrix(n, n);
  const RealMatrix dp4 = deg >= 4 ? dp(4) : RealMatrix(n, n);
  const RealMatrix dp5 = deg >= 5 ? dp(5) : RealMatrix(n, n);
  const RealMatrix dp6 = deg >= 6 ? dp(6) : RealMatrix(n, n);
  RealMatrix l1(n, n), l2m(n, n), stream(n, n), force(n, n), hw(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = g.q(i);
    double d[7];
    for (int r = 0; r <= 6; ++r) d[r] = v.derivative(q, r);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = g.p(j);
      stream(i, j) = -(p / mass) * dq1(i, j);
      force(i, j) = d[1] * dp1(i, j);
      l1(i, j) = stream(i, j) + force(i, j) - h2 / 24.0 * d[3] * dp3(i, j) +
                 h4 / 1920.0 * d[5] * dp5(i, j);
      hw(i, j) = (p * p / (2.0 * mass) + d[0]) * w.re(i, j);
      l2m(i, j) = hw(i, j) - energy * w.re(i, j) - h2 / (8.0 * mass) * dq2(i, j) -
                  h2 / 8.0 * d[2] * dp2(i, j) + h4 / 384.0 * d[4] * dp4(i, j) -
                  h4 * h2 / 46080.0 * d[6] * dp6(i, j);
    }
  }
  StationaryResiduals r;
  const double s1 = l2(stream) + l2(force);
  const double s2 = l2(hw);
  r.r1 = s1 > 0.0 ? l2(l1) / s1 : l2(l1);
  r.r2 = s2 > 0.0 ? l2(l2m) / s2 : l2(l2m);
  return r;
}

PositivityReport hbar_positivity_check(const PhaseSpaceFunction& w,
                                       const std::vector<PhasePoint>& points, double tol,
                                       std::size_t q_padding) {
  require_real(w, "hbar_positivity_check");
  if (points.empty() || points.size() > 16)
    throw std::invalid_argument("hbar_positivity_check: need 1..16 points");
  if (q_padding == 0 || !is_power_of_two(q_padding))
    throw std::invalid_argument("hbar_positivity_check: padding must be a power of two");
  const auto& g = w.grid;
  const std::size_t n = w.n();
  const std::size_t nq = n * q_padding;
  const double du = g.dq() / g.hbar() * 1.0;  // 2 pi / (n dp)
  const double dv = 2.0 * kPi / (static_cast<double>(nq) * g.dq());

  // band check before any work
  for (const auto& pt : points)
    for (const auto& pk : points) {
      const double fu = std::abs(pt.u - pk.u) / du, fv = std::abs(pt.v - pk.v) / dv;
      if (fu >= static_cast<double>(n / 2) - 1.0 || fv >= static_cast<double>(nq / 2) - 1.0)
        throw std::invalid_argument("hbar_positivity_check: point difference outside transform support");
    }

  // T(a, l) over padded q rows: first p -> u, then q -> v
  ComplexMatrix t(nq, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = w.re(i, j);
  fft_rows(t, -1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 1; l < n; l += 2) t(i, l) = -t(i, l);
  fft_cols(t, +1);
  const auto vk = angular_frequencies(nq, g.dq());
  const double scale = g.dq() * g.dp();
  for (std::size_t k = 0; k < nq; ++k) {
    const double ph = g.q_min() * vk[k];
    const cplx e = cplx(std::cos(ph), std::sin(ph)) * scale;
    for (std::size_t l = 0; l < n; ++l) t(k, l) *= e;
  }
  auto at = [&](long kv, long lu) {
    const auto r = static_cast<std::size_t>(((kv % static_cast<long>(nq)) + static_cast<long>(nq)) %
                                            static_cast<long>(nq));
    const auto c = static_cast<std::size_t>(((lu % static_cast<long>(n)) + static_cast<long>(n)) %
                                            static_cast<long>(n));
    return t(r, c);
  };
  auto interp = [&](double u, double v) {
    const double fu = u / du, fv = v / dv;
    const double fu0 = std::floor(fu), fv0 = std::floor(fv);
    const double au = fu - fu0, av = fv - fv0;
    const long iu = static_cast<long>(fu0), iv = static_cast<long>(fv0);
    return (1 - av) * ((1 - au) * at(iv, iu) + au * at(iv, iu + 1)) +
           av * ((1 - au) * at(iv + 1, iu) + au * at(iv + 1, iu + 1));
  };

  const std::size_t m = points.size();
  Eigen::MatrixXcd mat(m, m);
  const double h = g.hbar();
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      const auto& aj = points[j];
      const auto& ak = points[k];
      const double sigma = aj.u * ak.v - ak.u * aj.v;
      const double ph = 0.5 * h * sigma;
      mat(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          cplx(std::cos(ph), std::sin(ph)) * interp(aj.u - ak.u, aj.v - ak.v);
    }
  // symmetrize away interpolation asymmetry
  const Eigen::MatrixXcd herm = 0.5 * (mat + mat.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  PositivityReport rep;
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.pass = rep.min_eigenvalue >= -tol;
  return rep;
}

std::vector<PhasePoint> random_phase_points(std::uint64_t seed, std::size_t m, double u_max,
                                            double v_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> du(-u_max, u_max), dv(-v_max, v_max);
  std::vector<PhasePoint> pts(m);
  for (auto& p : pts) {
    p.u = du(rng);
    p.v = dv(rng);
  }
  return pts;
}

CriticalS critical_s(const PhaseSpaceFunction& w, double step, const OscillatorFrame& frame) {
  require_kind(w, Kind::Wigner, "critical_s");
  if (!(step > 0.0) || step > 0.05) throw std::invalid_argument("critical_s: step must be in (0, 0.05]");
  constexpr double kFloor = -1e-9;
  CriticalS r;
  if (min_value(w) >= kFloor) return r;
  r.determined = true;
  double lo = -1.0, hi = 0.0;
  while (hi - lo > step) {
    const double mid = 0.5 * (lo + hi);
    if (min_value(s_parameterized(w, mid, frame)) >= kFloor)
      lo = mid;
    else
      hi = mid;
  }
  r.lower = lo;
  r.upper = hi;
  return r;
}

CriticalS critical_s(const WaveFunction& psi, double step, const OscillatorFrame& frame) {
  return critical_s(wigner_from_wavefunction(psi), step, frame);
}

CriticalS critical_s(const DensityMatrix& rho, double step, const OscillatorFrame& frame) {
  return critical_s(wigner_from_density(rho), step, frame);
}

}  // namespace phasespace
