#include "phasespace/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "phasespace/wigner.hpp"

namespace phasespace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kEdgeTol = 1e-8;

void check_frame(const OscillatorFrame& f, const QuadratureGrid& g) {
  f.validate();
  if (std::abs(f.hbar - g.hbar()) > 1e-15 * g.hbar())
    throw std::invalid_argument("frame and grid disagree on hbar");
}

struct Beams {
  WaveFunction plus;
  WaveFunction minus;
  double norm0 = 0.0;  // |psi+ + psi-|^2
};

Beams make_beams(double d, const OscillatorFrame& frame, const QuadratureGrid& grid) {
  const double a = d / kSqrt2;
  Beams b{build_wavefunction(StateSpec::coherent(a), frame, grid),
          build_wavefunction(StateSpec::coherent(-a), frame, grid), 0.0};
  WaveFunction sum = b.plus;
  for (std::size_t i = 0; i < sum.psi.size(); ++i) sum.psi[i] += b.minus.psi[i];
  b.norm0 = sum.norm2();
  return b;
}

std::size_t snap(const QuadratureGrid& g, double q, const char* what) {
  const double u = (q - g.q_min()) / g.dq();
  const double r = std::round(u);
  if (std::abs(u - r) > 1e-6 || r < 0.0 || r > static_cast<double>(g.size() - 1)) {
    std::ostringstream os;
    os << what << ": q = " << q << " is not a grid node";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(r);
}

// W at the half-integer row index (2 m2 + 1)/2 or the integer row m2/2.
std::vector<double> row_at(const PhaseSpaceFunction& w, std::size_t m2) {
  const std::size_t n = w.n();
  std::vector<double> out(n);
  if (m2 % 2 == 0) {
    const double* r = w.re.row(m2 / 2);
    std::copy(r, r + n, out.begin());
    return out;
  }
  const std::size_t i0 = m2 / 2;
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = w.re(i, j);
    fourier_shift(col.data(), n, -0.5);
    out[j] = col[i0].real();
  }
  return out;
}

cplx chord_integral(const PhaseSpaceFunction& w, std::size_t i1, std::size_t i2) {
  const auto& g = w.grid;
  const auto row = row_at(w, i1 + i2);
  const double y = (static_cast<double>(i1) - static_cast<double>(i2)) * g.dq();
  std::vector<cplx> f(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double ph = -g.p(j) * y / g.hbar();
    f[j] = row[j] * cplx(std::cos(ph), std::sin(ph));
  }
  return integrate_1d(std::span<const cplx>(f), g.dp());
}

void require_intensity(double x, double q, const char* what) {
  if (!(x > 1e-14)) {
    std::ostringstream os;
    os << what << ": zero intensity at q = " << q;
    throw NumericError(os.str());
  }
}

}  // namespace

void TwoBeamSpec::validate() const {
  if (!(d >= 0.0)) throw std::invalid_argument("two-beam: d must be >= 0");
}

PhaseSpaceFunction two_gaussian_wdf(const TwoBeamSpec& spec, const OscillatorFrame& frame,
                                    const QuadratureGrid& grid) {
  spec.validate();
  check_frame(frame, grid);
  const double k = frame.kappa();
  const double hk = frame.hbar * k;
  const double d = spec.d;
  const double w0 = spec.coherent ? 1.0 / (kPi * (2.0 + 2.0 * std::exp(-d * d))) : 0.5 / kPi;
  PhaseSpaceFunction w(grid, Kind::Wigner);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double q = k * grid.q(i);
    const double outer = std::exp(-(q - d) * (q - d)) + std::exp(-(q + d) * (q + d));
    const double env = std::exp(-q * q);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = grid.p(j) / hk;
      double v = outer;
      if (spec.coherent) v += 2.0 * env * std::cos(2.0 * p * d + spec.relative_phase);
      w(i, j) = w0 * std::exp(-p * p) * v / frame.hbar;
    }
  }
  return w;
}

PhaseSpaceFunction two_beam_wdf(const TwoBeamSpec& spec, const OscillatorFrame& frame,
                                const QuadratureGrid& grid) {
  spec.validate();
  check_frame(frame, grid);
  if (spec.coherent) return aharonov_bohm_shift(spec, 0.0, frame, grid);
  const Beams b = make_beams(spec.d, frame, grid);
  auto w = wigner_from_wavefunction(b.plus);
  const auto wm = wigner_from_wavefunction(b.minus);
  for (std::size_t i = 0; i < w.re.size(); ++i)
    w.re.data()[i] = 0.5 * (w.re.data()[i] + wm.re.data()[i]);
  return w;
}

PhaseSpaceFunction aharonov_bohm_shift(const TwoBeamSpec& spec, double delta_phi,
                                       const OscillatorFrame& frame, const QuadratureGrid& grid) {
  spec.validate();
  check_frame(frame, grid);
  if (!spec.coherent) throw std::invalid_argument("aharonov_bohm_shift: needs a coherent spec");
  const Beams b = make_beams(spec.d, frame, grid);
  if (!(b.norm0 > 0.0)) throw NumericError("aharonov_bohm_shift: superposition has zero norm");
  const double phi = spec.relative_phase + delta_phi;
  const cplx ph(std::cos(phi), std::sin(phi));
  const double scale = 1.0 / std::sqrt(b.norm0);
  WaveFunction psi = b.plus;
  for (std::size_t i = 0; i < psi.psi.size(); ++i)
    psi.psi[i] = scale * (b.plus.psi[i] + ph * b.minus.psi[i]);
  if (edge_amplitude(psi) > kEdgeTol)
    throw NumericError("aharonov_bohm_shift: beams leak off the grid");
  return wigner_from_wavefunction(psi);
}

SqueezingPair superposition_squeezing(double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("superposition_squeezing: d must be >= 0");
  const double a2 = d * d / 4.0;
  const double e = std::exp(-a2);
  return {0.5 + a2 / (1.0 + e), 0.5 - a2 * e / (1.0 + e)};
}

SqueezingPair superposition_moments(double d, const QuadratureGrid& grid) {
  if (!(d >= 0.0)) throw std::invalid_argument("superposition_moments: d must be >= 0");
  const std::size_t n = grid.size();
  const double h = grid.dq();
  std::vector<cplx> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.q(i);
    psi[i] = std::exp(-0.5 * (x - 0.5 * d) * (x - 0.5 * d)) +
             std::exp(-0.5 * (x + 0.5 * d) * (x + 0.5 * d));
  }
  if (std::max(std::abs(psi.front()), std::abs(psi.back())) > kEdgeTol)
    throw NumericError("superposition_moments: field leaks off the grid");
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::norm(psi[i]);
    const double x = grid.q(i);
    s0 += r;
    s1 += r * x;
    s2 += r * x * x;
  }
  const double mx = s1 / s0;
  auto spec = psi;
  fft(spec, -1);
  const auto k = angular_frequencies(n, h);
  double t0 = 0.0, t1 = 0.0, t2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = std::norm(spec[j]);
    t0 += r;
    t1 += r * k[j];
    t2 += r * k[j] * k[j];
  }
  const double mk = t1 / t0;
  return {s2 / s0 - mx * mx, t2 / t0 - mk * mk};
}

void PhotonStatistics::validate() const {
  double sum = 0.0;
  for (double x : p) {
    if (x < -1e-12) throw std::invalid_argument("photon statistics: negative probability");
    sum += x;
  }
  if (sum > 1.0 + 1e-4) throw std::invalid_argument("photon statistics: total exceeds 1");
}

double PhotonStatistics::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) m += static_cast<double>(k) * p[k];
  return m;
}

PhotonStatistics photon_statistics_exact(const WaveFunction& psi, const OscillatorFrame& frame,
                                         int n_max, double tail_tol) {
  const auto fe = fock_coefficients(psi, frame, n_max, tail_tol);
  PhotonStatistics s;
  s.cutoff = n_max;
  s.p.resize(fe.coeffs.size());
  for (std::size_t k = 0; k < fe.coeffs.size(); ++k) s.p[k] = std::norm(fe.coeffs[k]);
  s.tail = fe.tail;
  return s;
}

PhotonStatistics photon_statistics_exact(const DensityMatrix& rho, const OscillatorFrame& frame,
                                         int n_max, double tail_tol) {
  PhotonStatistics s;
  s.cutoff = n_max;
  s.p = fock_populations(rho, frame, n_max);
  double sum = 0.0;
  for (double& x : s.p) {
    sum += x;
    x = std::max(x, 0.0);  // quadrature noise
  }
  s.tail = rho.trace().real() - sum;
  if (s.tail > tail_tol) {
    std::ostringstream os;
    os << "photon_statistics_exact: Fock tail " << s.tail << " exceeds " << tail_tol;
    throw NumericError(os.str());
  }
  return s;
}

double mandel_q(const PhotonStatistics& stats, double tail_tol) {
  stats.validate();
  if (stats.tail > tail_tol) {
    std::ostringstream os;
    os << "mandel_q: uncertain tail " << stats.tail << " (limit " << tail_tol << ")";
    throw NumericError(os.str());
  }
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < stats.p.size(); ++k) {
    const double n = static_cast<double>(k);
    m1 += n * stats.p[k];
    m2 += n * (n - 1.0) * stats.p[k];
  }
  if (!(m1 > 1e-12)) throw NumericError("mandel_q: mean photon number is zero");
  return (m2 - m1 * m1) / m1;
}

double quadrature_s(const WaveFunction& psi, double theta, const OscillatorFrame& frame) {
  check_frame(frame, psi.grid);
  if (edge_amplitude(psi) > kEdgeTol)
    throw NumericError("quadrature_s: wavefunction has not decayed at the window edge");
  const auto& g = psi.grid;
  const std::size_t n = g.size();
  const double k = frame.kappa();
  auto dpsi = psi.psi;
  fft(dpsi, -1);
  const auto kq = angular_frequencies(n, g.dq());
  for (std::size_t j = 0; j < n; ++j)
    dpsi[j] *= (j == n / 2 ? 0.0 : kq[j] / (k * static_cast<double>(n)));
  fft(dpsi, +1);  // P psi in units of hbar kappa
  double nrm = 0.0, mq = 0.0, mq2 = 0.0;
  cplx mp{}, mp2{}, mqp{};
  for (std::size_t i = 0; i < n; ++i) {
    const cplx c = std::conj(psi.psi[i]);
    const double q = k * g.q(i);
    nrm += std::norm(psi.psi[i]);
    mq += q * std::norm(psi.psi[i]);
    mq2 += q * q * std::norm(psi.psi[i]);
    mp += c * dpsi[i];
    mp2 += std::norm(dpsi[i]);
    mqp += c * q * dpsi[i];
  }
  const double eq = mq / nrm, ep = mp.real() / nrm;
  const double vq = mq2 / nrm - eq * eq;
  const double vp = mp2.real() / nrm - ep * ep;
  const double cov = mqp.real() / nrm - eq * ep;
  const double c = std::cos(theta), s = std::sin(theta);
  const double var_x = 2.0 * (c * c * vq + s * s * vp - 2.0 * c * s * cov);
  return var_x - 1.0;
}

double intensity(const PhaseSpaceFunction& w, double q) {
  if (w.is_complex()) throw std::invalid_argument("intensity: expects a real function");
  const std::size_t i = snap(w.grid, q, "intensity");
  return integrate_1d(std::span<const double>(w.re.row(i), w.n()), w.grid.dp());
}

cplx g1(const PhaseSpaceFunction& w, double q1, double q2) {
  if (w.is_complex()) throw std::invalid_argument("g1: expects a real function");
  const std::size_t i1 = snap(w.grid, q1, "g1");
  const std::size_t i2 = snap(w.grid, q2, "g1");
  const double a = chord_integral(w, i1, i1).real();
  const double b = chord_integral(w, i2, i2).real();
  require_intensity(a, q1, "g1");
  require_intensity(b, q2, "g1");
  return chord_integral(w, i1, i2) / std::sqrt(a * b);
}

cplx g1(const DensityMatrix& rho, double q1, double q2) {
  const std::size_t i1 = snap(rho.grid, q1, "g1");
  const std::size_t i2 = snap(rho.grid, q2, "g1");
  const double a = rho.rho(i1, i1).real();
  const double b = rho.rho(i2, i2).real();
  require_intensity(a, q1, "g1");
  require_intensity(b, q2, "g1");
  return rho.rho(i2, i1) / std::sqrt(a * b);
}

double visibility(cplx g1_value, double i1, double i2) {
  if (!(i1 > 0.0) || !(i2 > 0.0)) throw NumericError("visibility: zero intensity");
  return 2.0 * std::sqrt(i1 * i2) / (i1 + i2) * std::abs(g1_value);
}

MomentumTransferModel MomentumTransferModel::no_kick(const QuadratureGrid& grid) {
  PhaseSpaceFunction w(grid, Kind::Classical);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) w(i, n / 2) = 1.0 / grid.dp();
  return {w};
}

MomentumTransferModel MomentumTransferModel::gaussian_kick(const QuadratureGrid& grid,
                                                           double sigma_p) {
  if (!(sigma_p > 0.0)) throw std::invalid_argument("gaussian_kick: sigma_p must be > 0");
  const std::size_t n = grid.size();
  std::vector<double> row(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = grid.p(j) / sigma_p;
    row[j] = std::exp(-0.5 * p * p);
  }
  double z = 0.0;
  for (double x : row) z += x * grid.dp();  // periodic sum, as used by the filter
  PhaseSpaceFunction w(grid, Kind::Classical);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = row[j] / z;
  return {w};
}

MomentumTransferModel MomentumTransferModel::flat_kick(const QuadratureGrid& grid,
                                                       double half_width) {
  if (!(half_width >= 0.0)) throw std::invalid_argument("flat_kick: half width must be >= 0");
  const std::size_t n = grid.size();
  std::vector<double> row(n);
  double z = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] = std::abs(grid.p(j)) <= half_width ? 1.0 : 0.0;
    z += row[j];
  }
  PhaseSpaceFunction w(grid, Kind::Classical);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = row[j] / (z * grid.dp());
  return {w};
}

PhaseSpaceFunction which_path_filter(const PhaseSpaceFunction& w_i,
                                     const MomentumTransferModel& model) {
  require_same_grid(w_i.grid, model.w_t.grid, "which_path_filter");
  if (w_i.is_complex() || model.w_t.is_complex())
    throw std::invalid_argument("which_path_filter: expects real functions");
  const std::size_t n = w_i.n();
  ComplexMatrix a(n, n), t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = w_i(i, j);
      // kernel index measured from p = 0, which sits at column n/2
      t(i, (j + n - n / 2) % n) = model.w_t(i, j);
    }
  fft_rows(a, -1);
  fft_rows(t, -1);
  const double scale = w_i.grid.dp() / static_cast<double>(n);
  for (std::size_t k = 0; k < a.size(); ++k) a.data()[k] *= t.data()[k] * scale;
  fft_rows(a, +1);
  PhaseSpaceFunction out = w_i;
  for (std::size_t k = 0; k < a.size(); ++k) out.re.data()[k] = a.data()[k].real();
  return out;
}

cplx visibility_after_transfer(const MomentumTransferModel& model, double d) {
  const auto& w = model.w_t;
  const auto& g = w.grid;
  if (w.is_complex()) throw std::invalid_argument("visibility_after_transfer: real W_t expected");
  if (g.q_min() > 0.0 || g.q(g.size() - 1) < 0.0)
    throw std::invalid_argument("visibility_after_transfer: q = 0 outside the grid");
  const std::size_t n = g.size();
  std::vector<double> col(n);
  std::vector<cplx> f(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = w(i, j);
    const double pn = cubic_interpolate(col, g.q_min(), g.dq(), 0.0);
    const double ph = g.p(j) * d / g.hbar();
    f[j] = pn * cplx(std::cos(ph), std::sin(ph));
  }
  cplx v{};
  for (const cplx& x : f) v += x * g.dp();
  return v;
}

double which_way_knowledge(cplx v) { return std::sqrt(std::max(0.0, 1.0 - std::norm(v))); }

OverlapEstimate area_overlap_estimate(int n, const StateSpec& target, int cells) {
  if (n < 0) throw std::invalid_argument("area_overlap_estimate: n must be >= 0");
  if (cells < 1024) throw std::invalid_argument("area_overlap_estimate: cells must be >= 1024");
  double q0 = 0.0, p0 = 0.0, ax = 0.0, ay = 0.0;
  bool two = false;
  if (const auto* c = std::get_if<CoherentSpec>(&target.v)) {
    q0 = kSqrt2 * c->alpha.real();
    p0 = kSqrt2 * c->alpha.imag();
    ax = ay = kSqrt2;
  } else if (const auto* s = std::get_if<SqueezedSpec>(&target.v)) {
    if (s->alpha.imag() != 0.0)
      throw std::invalid_argument("area_overlap_estimate: squeezed target needs real alpha");
    if (!(s->s > 0.0)) throw std::invalid_argument("area_overlap_estimate: s must be > 0");
    q0 = kSqrt2 * s->alpha.real();
    ax = std::sqrt(2.0 / s->s);
    ay = std::sqrt(2.0 * s->s);
    two = true;
  } else {
    throw std::invalid_argument("area_overlap_estimate: target must be coherent or squeezed");
  }
  const double r_in2 = 2.0 * n;
  const double r_out2 = 2.0 * (n + 1.0);
  auto in_region = [&](double q, double p) {
    const double u = (q - q0) / ax, v = (p - p0) / ay;
    const double r2 = q * q + p * p;
    return u * u + v * v <= 1.0 && r2 >= r_in2 && r2 < r_out2;
  };

  // Counts cell centres inside `f` over the box; cells whose corners disagree are
  // tallied as the resolution error.
  auto count = [&](auto&& f, double x0, double x1, double y0, double y1, double* err) {
    const auto m = static_cast<std::size_t>(cells);
    const double hx = (x1 - x0) / static_cast<double>(m);
    const double hy = (y1 - y0) / static_cast<double>(m);
    std::vector<char> lo(m + 1), hi(m + 1);
    for (std::size_t j = 0; j <= m; ++j) lo[j] = f(x0, y0 + static_cast<double>(j) * hy);
    std::size_t inside = 0, cut = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double xc = x0 + (static_cast<double>(i) + 0.5) * hx;
      const double xr = x0 + static_cast<double>(i + 1) * hx;
      for (std::size_t j = 0; j <= m; ++j) hi[j] = f(xr, y0 + static_cast<double>(j) * hy);
      for (std::size_t j = 0; j < m; ++j) {
        if (f(xc, y0 + (static_cast<double>(j) + 0.5) * hy)) ++inside;
        const int c = lo[j] + lo[j + 1] + hi[j] + hi[j + 1];
        if (c != 0 && c != 4) ++cut;
      }
      std::swap(lo, hi);
    }
    if (err) *err = static_cast<double>(cut) * hx * hy;
    return static_cast<double>(inside) * hx * hy;
  };

  OverlapEstimate out;
  if (!two) {
    out.regions = 1;
    out.area = count(in_region, q0 - ax, q0 + ax, p0 - ay, p0 + ay, &out.resolution_error);
    out.p = out.area / (2.0 * kPi);
    return out;
  }
  // Upper half of the ellipse; the lower region is its mirror image.
  out.regions = 2;
  out.area = count(in_region, q0 - ax, q0 + ax, 0.0, ay, &out.resolution_error);
  if (out.area <= 0.0) return out;
  const double r2 = 2.0 * (n + 0.5);
  const double r = std::sqrt(r2);
  double seg = 0.0;
  const double qa = std::abs(q0);  // chord on the turning-point side
  if (r > qa) {
    auto in_seg = [&](double q, double p) { return q >= qa && q * q + p * p <= r2; };
    double err = 0.0;
    seg = count(in_seg, qa, r, 0.0, r, &err);
    out.resolution_error += err;
  }
  out.phase = seg - 0.25 * kPi;
  const double c = std::cos(out.phase);
  out.p = 4.0 * out.area / (2.0 * kPi) * c * c;
  return out;
}

}  // namespace phasespace
