#include "phasespace/dynamics.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace phasespace {

namespace {

constexpr double kPi = std::numbers::pi;

// ---- field transforms used by apply_symplectic ----------------------------

// F(q, p) -> F(q - alpha p, p)
void shear_q(ComplexMatrix& f, const QuadratureGrid& g, double alpha) {
  if (alpha == 0.0) return;
  const std::size_t n = g.size();
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = f(i, j);
    fourier_shift(col.data(), n, alpha * g.p(j) / g.dq());
    for (std::size_t i = 0; i < n; ++i) f(i, j) = col[i];
  }
}

// F(q, p) -> F(q, p - beta q)
void shear_p(ComplexMatrix& f, const QuadratureGrid& g, double beta) {
  if (beta == 0.0) return;
  for (std::size_t i = 0; i < g.size(); ++i) fourier_shift(f.row(i), g.size(), beta * g.q(i) / g.dp());
}

void rotate(ComplexMatrix& f, const QuadratureGrid& g, double theta) {
  const int chunks = static_cast<int>(std::ceil(std::abs(theta) / (kPi / 4) - 1e-12));
  if (chunks == 0) return;
  const double th = theta / chunks;
  const double t = -std::tan(0.5 * th), s = std::sin(th);
  for (int c = 0; c < chunks; ++c) {
    shear_q(f, g, t);
    shear_p(f, g, s);
    shear_q(f, g, t);
  }
}

// F(q, p) -> F(q / s, s p)
void scale(ComplexMatrix& f, const QuadratureGrid& g, double s) {
  if (s == 1.0) return;
  const std::size_t n = g.size();
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = f(i, j);
    auto r = resample_uniform(col, g.q_min(), g.dq(), g.q_min() / s, g.dq() / s, n);
    for (std::size_t i = 0; i < n; ++i) f(i, j) = r[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto r = resample_uniform(std::span<const cplx>(f.row(i), n), g.p_min(), g.dp(), s * g.p_min(),
                              s * g.dp(), n);
    std::copy(r.begin(), r.end(), f.row(i));
  }
}

// ---- spectrally refined sampler -------------------------------------------

// Band-limited refinement of W0 by `r` along both axes, then local bicubic
// (4x4 Lagrange) interpolation. Points outside the window read as zero.
class RefinedSampler {
 public:
  RefinedSampler(const PhaseSpaceFunction& w, std::size_t r)
      : g_(w.grid), m_(w.n() * r), fine_(m_, m_) {
    const std::size_t n = w.n();
    ComplexMatrix rows(n, m_);
    std::vector<cplx> tmp(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) tmp[j] = w.re(i, j);
      auto u = upsample(tmp, r);
      std::copy(u.begin(), u.end(), rows.row(i));
    }
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = rows(i, j);
      auto u = upsample(tmp, r);
      for (std::size_t i = 0; i < m_; ++i) fine_(i, j) = u[i].real();
    }
    hq_ = g_.dq() / static_cast<double>(r);
    hp_ = g_.dp() / static_cast<double>(r);
  }

  double operator()(double q, double p) const {
    const double fa = (q - g_.q_min()) / hq_;
    const double fb = (p - g_.p_min()) / hp_;
    const double top = static_cast<double>(m_ - 1);
    if (!(fa >= 0.0 && fa <= top && fb >= 0.0 && fb <= top)) return 0.0;
    const auto a = static_cast<std::ptrdiff_t>(std::floor(fa));
    const auto b = static_cast<std::ptrdiff_t>(std::floor(fb));
    double wa[4], wb[4];
    weights(fa - static_cast<double>(a), wa);
    weights(fb - static_cast<double>(b), wb);
    const auto m = static_cast<std::ptrdiff_t>(m_);
    double acc = 0.0;
    for (int x = 0; x < 4; ++x) {
      const auto i = a - 1 + x;
      if (i < 0 || i >= m) continue;
      double row = 0.0;
      for (int y = 0; y < 4; ++y) {
        const auto j = b - 1 + y;
        if (j < 0 || j >= m) continue;
        row += wb[y] * fine_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
      acc += wa[x] * row;
    }
    return acc;
  }

 private:
  // Lagrange weights for nodes -1, 0, 1, 2 at offset t in [0, 1)
  static void weights(double t, double* w) {
    w[0] = -t * (t - 1) * (t - 2) / 6.0;
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2.0;
    w[2] = -(t + 1) * t * (t - 2) / 2.0;
    w[3] = (t + 1) * t * (t - 1) / 6.0;
  }

  QuadratureGrid g_;
  std::size_t m_;
  RealMatrix fine_;
  double hq_ = 0.0, hp_ = 0.0;
};

// ---- Moyal right-hand side ------------------------------------------------

class MoyalOperator {
 public:
  MoyalOperator(const QuadratureGrid& g, const HamiltonianSpec& h, bool quantum)
      : g_(g), n_(g.size()), kq_(angular_frequencies(n_, g.dq())), coef_(n_, n_) {
    const auto kp = angular_frequencies(n_, g.dp());
    const double hb = g.hbar(), h2 = hb * hb, h4 = h2 * h2;
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double q = g.q(i);
      const double v1 = h.potential.derivative(q, 1);
      const double v3 = quantum ? h.potential.derivative(q, 3) : 0.0;
      const double v5 = quantum ? h.potential.derivative(q, 5) : 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (j == n_ / 2) continue;  // odd operator: drop the Nyquist bin
        const cplx ik(0.0, kp[j]);
        const cplx ik3 = ik * ik * ik;
        coef_(i, j) = (v1 * ik - h2 / 24.0 * v3 * ik3 + h4 / 1920.0 * v5 * ik3 * ik * ik) * inv;
      }
    }
    vel_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) vel_[j] = -g.p(j) / h.mass;
    for (std::size_t i = 0; i < n_; ++i) spectral_radius_p_ = std::max(spectral_radius_p_, row_max(i));
    double kmax = 0.0;
    for (double k : kq_) kmax = std::max(kmax, std::abs(k));
    double vmax = 0.0;
    for (double v : vel_) vmax = std::max(vmax, std::abs(v));
    spectral_radius_q_ = kmax * vmax;
  }

  double spectral_radius() const { return spectral_radius_p_ + spectral_radius_q_; }

  void apply(const RealMatrix& w, RealMatrix& out) {
    ComplexMatrix a(n_, n_), b(n_, n_);
    for (std::size_t i = 0; i < w.size(); ++i) a.data()[i] = b.data()[i] = w.data()[i];
    fft_cols(a, -1);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const cplx m = (i == n_ / 2) ? cplx{} : cplx(0.0, kq_[i] * inv);
      cplx* r = a.row(i);
      for (std::size_t j = 0; j < n_; ++j) r[j] *= m;
    }
    fft_cols(a, +1);
    fft_rows(b, -1);
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] *= coef_.data()[i];
    fft_rows(b, +1);
    out = RealMatrix(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out(i, j) = vel_[j] * a(i, j).real() + b(i, j).real();
  }

 private:
  double row_max(std::size_t i) const {
    double m = 0.0;
    for (std::size_t j = 0; j < n_; ++j) m = std::max(m, std::abs(coef_(i, j)) * static_cast<double>(n_));
    return m;
  }

  QuadratureGrid g_;
  std::size_t n_;
  std::vector<double> kq_;
  ComplexMatrix coef_;
  std::vector<double> vel_;
  double spectral_radius_p_ = 0.0;
  double spectral_radius_q_ = 0.0;
};

void axpy(RealMatrix& y, double a, const RealMatrix& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] += a * x.data()[i];
}

}  // namespace

void HamiltonianSpec::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("hamiltonian: mass must be > 0");
}

void SymplecticMap2D::validate() const {
  if (!std::isfinite(det()) || std::abs(det() - 1.0) > 1e-12)
    throw std::invalid_argument("symplectic map: determinant must be 1");
}

SymplecticMap2D SymplecticMap2D::rotation(double theta) {
  return {std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)};
}

SymplecticMap2D SymplecticMap2D::shear(double t_over_m) { return {1.0, t_over_m, 0.0, 1.0}; }

SymplecticMap2D SymplecticMap2D::squeeze(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("squeeze: s must be > 0");
  return {s, 0.0, 0.0, 1.0 / s};
}

SymplecticMap2D SymplecticMap2D::harmonic(double t, double mass, double omega) {
  const double c = std::cos(omega * t), s = std::sin(omega * t);
  return {c, s / (mass * omega), -mass * omega * s, c};
}

PhaseSpaceFunction moyal_evolve(const PhaseSpaceFunction& w, const HamiltonianSpec& h,
                                const EvolutionConfig& cfg) {
  h.validate();
  if (w.is_complex()) throw std::invalid_argument("moyal_evolve: expects a real function");
  if (!(cfg.dt > 0.0) || cfg.steps < 0) throw std::invalid_argument("moyal_evolve: need dt > 0, steps >= 0");
  const auto& g = w.grid;
  const double p_max = std::max(std::abs(g.p_min()), std::abs(g.p_max()));
  if (cfg.dt > g.dq() * h.mass / p_max) {
    std::ostringstream os;
    os << "moyal_evolve: dt = " << cfg.dt << " exceeds the CFL bound dq*m/p_max = "
       << g.dq() * h.mass / p_max;
    throw std::invalid_argument(os.str());
  }
  MoyalOperator op(g, h, cfg.quantum_terms);
  // RK4 is stable on the imaginary axis up to |lambda dt| = 2*sqrt(2)
  if (op.spectral_radius() * cfg.dt > 2.8) {
    std::ostringstream os;
    os << "moyal_evolve: dt * spectral radius = " << op.spectral_radius() * cfg.dt
       << " is outside the RK4 stability interval; reduce dt or the grid extent";
    throw NumericError(os.str());
  }
  PhaseSpaceFunction out = w;
  const double scale0 = std::max(max_abs(w), 1e-300);
  RealMatrix k1, k2, k3, k4, tmp;
  const double dt = cfg.dt;
  for (int s = 0; s < cfg.steps; ++s) {
    RealMatrix& y = out.re;
    op.apply(y, k1);
    tmp = y;
    axpy(tmp, 0.5 * dt, k1);
    op.apply(tmp, k2);
    tmp = y;
    axpy(tmp, 0.5 * dt, k2);
    op.apply(tmp, k3);
    tmp = y;
    axpy(tmp, dt, k3);
    op.apply(tmp, k4);
    for (std::size_t i = 0; i < y.size(); ++i)
      y.data()[i] += dt / 6.0 * (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]);
    const double m = max_abs(out);
    if (!std::isfinite(m) || m > 100.0 * scale0) {
      std::ostringstream os;
      os << "moyal_evolve: field blew up at step " << s + 1 << " (max |W| = " << m << ")";
      throw NumericError(os.str());
    }
  }
  return out;
}

PhaseSpaceFunction liouville_evolve(const PhaseSpaceFunction& w, const HamiltonianSpec& h, double t,
                                    const LiouvilleOptions& opt, LiouvilleDiagnostics* diag) {
  h.validate();
  if (w.is_complex()) throw std::invalid_argument("liouville_evolve: expects a real function");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("liouville_evolve: dt must be > 0");
  const auto& g = w.grid;
  const std::size_t n = w.n();
  std::size_t r = opt.refine;
  if (r == 0) r = std::max<std::size_t>(1, 1024 / n);
  if (!is_power_of_two(r)) throw std::invalid_argument("liouville_evolve: refine must be a power of two");
  const RefinedSampler sample(w, r);
  const int steps = t == 0.0 ? 0 : static_cast<int>(std::ceil(std::abs(t) / opt.dt - 1e-9));
  const double dt = steps ? -t / steps : 0.0;  // backward in time
  const double m = h.mass;
  auto force = [&](double q) { return -h.potential.derivative(q, 1); };
  PhaseSpaceFunction out(g, w.kind, w.param);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double q = g.q(i), p = g.p(j);
      for (int s = 0; s < steps; ++s) {
        const double q1 = p / m, p1 = force(q);
        const double q2 = (p + 0.5 * dt * p1) / m, p2 = force(q + 0.5 * dt * q1);
        const double q3 = (p + 0.5 * dt * p2) / m, p3 = force(q + 0.5 * dt * q2);
        const double q4 = (p + dt * p3) / m, p4 = force(q + dt * q3);
        q += dt / 6.0 * (q1 + 2 * q2 + 2 * q3 + q4);
        p += dt / 6.0 * (p1 + 2 * p2 + 2 * p3 + p4);
        if (!std::isfinite(q) || !std::isfinite(p)) break;
      }
      out.re(i, j) = (std::isfinite(q) && std::isfinite(p)) ? sample(q, p) : 0.0;
    }
  }
  if (diag) {
    const double m0 = integrate_2d(w);
    diag->mass_loss = m0 != 0.0 ? (m0 - integrate_2d(out)) / m0 : 0.0;
    diag->warned = diag->mass_loss > 1e-6;
  }
  return out;
}

PhaseSpaceFunction apply_symplectic(const PhaseSpaceFunction& w, const SymplecticMap2D& m) {
  m.validate();
  const auto& g = w.grid;
  Eigen::Matrix2d mm;
  mm << m.a, m.b, m.c, m.d;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(mm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d u = svd.matrixU(), v = svd.matrixV();
  const Eigen::Vector2d sv = svd.singularValues();
  if (u.determinant() < 0) {
    u.col(1) *= -1.0;
    v.col(1) *= -1.0;
  }
  // M = U diag(s1, s2) V^T with U, V proper rotations and s1 s2 = 1
  double th_u = std::atan2(u(1, 0), u(0, 0));
  double th_v = -std::atan2(v(1, 0), v(0, 0));  // V^T
  double s = std::sqrt(sv(0) / sv(1));
  // R(pi/2) diag(s, 1/s) R(-pi/2) = diag(1/s, s): move quarter turns between the
  // factors to keep the rotations short (a diagonal M then needs none)
  auto wrap = [](double x) { return std::remainder(x, 2.0 * kPi); };
  double best = std::abs(wrap(th_u)) + std::abs(wrap(th_v));
  const double u0 = th_u, v0 = th_v, s0 = s;
  for (int k = 1; k < 4; ++k) {
    const double tu = wrap(u0 + k * kPi / 2), tv = wrap(v0 - k * kPi / 2);
    if (std::abs(tu) + std::abs(tv) < best - 1e-12) {
      best = std::abs(tu) + std::abs(tv);
      th_u = tu;
      th_v = tv;
      s = (k % 2) ? 1.0 / s0 : s0;
    }
  }
  th_u = wrap(th_u);
  th_v = wrap(th_v);
  ComplexMatrix f = w.to_complex();
  rotate(f, g, th_v);
  scale(f, g, s);
  rotate(f, g, th_u);
  return PhaseSpaceFunction::from_complex(g, w.kind, w.param, f, w.is_complex());
}

std::vector<double> wdf_moments(const PhaseSpaceFunction& w, int k_max) {
  if (w.is_complex()) throw std::invalid_argument("wdf_moments: expects a real function");
  if (k_max < 1 || k_max > 4) throw std::invalid_argument("wdf_moments: k_max must be in 1..4");
  std::vector<double> out;
  RealMatrix pw(w.n(), w.n(), 1.0);
  for (int k = 1; k <= k_max; ++k) {
    for (std::size_t i = 0; i < pw.size(); ++i) pw.data()[i] *= w.re.data()[i];
    const double integral = integrate_2d(pw, w.grid.dq(), w.grid.dp());
    out.push_back(k / std::pow(2.0, k - 1) * integral / (2.0 * kPi));
  }
  return out;
}

WaveFunction split_step_schrodinger(const WaveFunction& psi, const HamiltonianSpec& h, double t,
                                    double dt) {
  h.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("split_step: dt must be > 0");
  const auto& g = psi.grid;
  const std::size_t n = g.size();
  const int steps = t == 0.0 ? 0 : static_cast<int>(std::ceil(std::abs(t) / dt - 1e-9));
  const double tau = steps ? t / steps : 0.0;
  const double hb = g.hbar();
  std::vector<cplx> half_v(n), kin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = -0.5 * tau * h.potential(g.q(i)) / hb;
    half_v[i] = cplx(std::cos(ph), std::sin(ph));
  }
  const auto k = angular_frequencies(n, g.dq());
  for (std::size_t j = 0; j < n; ++j) {
    const double ph = -tau * hb * k[j] * k[j] / (2.0 * h.mass);
    kin[j] = cplx(std::cos(ph), std::sin(ph)) / static_cast<double>(n);
  }
  WaveFunction out = psi;
  const double n0 = psi.norm2();
  auto& v = out.psi;
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= half_v[i];
    fft(v, -1);
    for (std::size_t j = 0; j < n; ++j) v[j] *= kin[j];
    fft(v, +1);
    for (std::size_t i = 0; i < n; ++i) v[i] *= half_v[i];
  }
  const double drift = std::abs(out.norm2() - n0);
  if (drift > 1e-8 * std::max(1, steps)) {
    std::ostringstream os;
    os << "split_step: norm drift " << drift << " over " << steps << " steps";
    throw NumericError(os.str());
  }
  return out;
}

double energy_expectation(const WaveFunction& psi, const HamiltonianSpec& h) {
  const auto& g = psi.grid;
  const std::size_t n = g.size();
  std::vector<cplx> d = psi.psi;
  fft(d, -1);
  const auto k = angular_frequencies(n, g.dq());
  const double hb = g.hbar();
  double kin = 0.0, tot = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    kin += std::norm(d[j]) * hb * hb * k[j] * k[j] / (2.0 * h.mass);
    tot += std::norm(d[j]);
  }
  double pot = 0.0, nrm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pot += std::norm(psi.psi[i]) * h.potential(g.q(i));
    nrm += std::norm(psi.psi[i]);
  }
  return kin / tot + pot / nrm;
}

}  // namespace phasespace
