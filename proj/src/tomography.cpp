#include "phasespace/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "phasespace/wigner.hpp"

namespace phasespace {

namespace {

constexpr double kPi = std::numbers::pi;

void require_wigner(const PhaseSpaceFunction& w, const char* what) {
  if (w.kind != Kind::Wigner || w.is_complex())
    throw std::invalid_argument(std::string(what) + ": expects a real Wigner function");
}

cplx cis(double ph) { return {std::cos(ph), std::sin(ph)}; }

// frequencies k_m = (m - n/2) dk, m = 0..n, with half weight on both ends
struct SliceSpectrum {
  std::size_t count;
  double k0;
  double dk;
  double k(std::size_t m) const { return k0 + static_cast<double>(m) * dk; }
  double weight(std::size_t m) const { return (m == 0 || m + 1 == count) ? 0.5 : 1.0; }
};

SliceSpectrum slice_spectrum(std::size_t n, double dx) {
  const double dk = 2.0 * kPi / (static_cast<double>(n) * dx);
  return {n + 1, -static_cast<double>(n / 2) * dk, dk};
}

// (dk / 2 pi) sum_m w_m c_m exp(i k_m x_l) on x_l = x0 + l dx
std::vector<double> synthesize(const SliceSpectrum& sp, std::vector<cplx> c, double x0, double dx,
                               std::size_t n_x) {
  for (std::size_t m = 0; m < sp.count; ++m) c[m] *= sp.weight(m);
  auto v = chirp_dft(c, sp.k0, sp.dk, -x0, -dx, n_x);
  std::vector<double> out(n_x);
  for (std::size_t l = 0; l < n_x; ++l) out[l] = v[l].real() * sp.dk / (2.0 * kPi);
  return out;
}

// G(q, p) = F(q / a, p / a) for a complex field through band-limited resampling
ComplexMatrix rescale(const ComplexMatrix& f, const QuadratureGrid& g, double a) {
  const std::size_t n = g.size();
  ComplexMatrix out = f;
  std::vector<cplx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = out(i, j);
    auto r = resample_uniform(col, g.q_min(), g.dq(), g.q_min() / a, g.dq() / a, n);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = r[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto r = resample_uniform(std::span<const cplx>(out.row(i), n), g.p_min(), g.dp(), g.p_min() / a,
                              g.dp() / a, n);
    std::copy(r.begin(), r.end(), out.row(i));
  }
  return out;
}

void check_uniform_angles(const std::vector<double>& angles) {
  if (angles.empty()) throw std::invalid_argument("inverse_radon: no angles");
  const double step = kPi / static_cast<double>(angles.size());
  for (std::size_t a = 0; a < angles.size(); ++a)
    if (std::abs(angles[a] - static_cast<double>(a) * step) > 1e-9)
      throw std::invalid_argument("inverse_radon: angles must be a pi / n for a = 0..n-1");
}

}  // namespace

void QuadratureHistogram::validate() const {
  if (pr.rows() != angles.size() || pr.cols() < 2 || !(dx > 0.0))
    throw std::invalid_argument("histogram: shape mismatch or non-positive dx");
  for (std::size_t a = 0; a < angles.size(); ++a) {
    std::span<const double> row(pr.row(a), pr.cols());
    for (double v : row) {
      if (!std::isfinite(v) || v < -1e-10) {
        std::ostringstream os;
        os << "histogram: slice " << a << " has value " << v << " below -1e-10";
        throw std::invalid_argument(os.str());
      }
    }
    const double norm = integrate_1d(row, dx);
    if (std::abs(norm - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "histogram: slice " << a << " integrates to " << std::setprecision(10) << norm;
      throw std::invalid_argument(os.str());
    }
  }
}

std::vector<double> uniform_angles(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t a = 0; a < n; ++a) out[a] = static_cast<double>(a) * kPi / static_cast<double>(n);
  return out;
}

void DetectorModel::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("detector: efficiency must lie in (0, 1]");
}

void BeamSplitter::validate() const {
  if (!(transmittance > 0.0 && transmittance < 1.0 && reflectance > 0.0 && reflectance < 1.0))
    throw std::invalid_argument("beam splitter: T and R must lie in (0, 1)");
  if (std::abs(transmittance + reflectance - 1.0) > 1e-12)
    throw std::invalid_argument("beam splitter: T + R must equal 1");
}

QuadratureHistogram radon_project(const PhaseSpaceFunction& w, const std::vector<double>& angles) {
  require_wigner(w, "radon_project");
  const auto& g = w.grid;
  const std::size_t n = g.size();
  const SliceSpectrum sp = slice_spectrum(n, g.dq());
  const double nyq_q = kPi / g.dq(), nyq_p = kPi / g.dp();
  QuadratureHistogram h;
  h.angles = angles;
  h.x_min = g.q_min();
  h.dx = g.dq();
  h.pr = RealMatrix(angles.size(), n);
  std::vector<cplx> row(n);
  std::vector<std::vector<cplx>> gp(n);
  for (std::size_t a = 0; a < angles.size(); ++a) {
    const double c = std::cos(angles[a]), s = std::sin(angles[a]);
    // int dp W(q_i, p) exp(-i k s p) for every row
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) row[j] = w.re(i, j);
      gp[i] = chirp_dft(row, g.p_min(), g.dp(), sp.k0 * s, sp.dk * s, sp.count);
    }
    std::vector<cplx> spec(sp.count);
    for (std::size_t m = 0; m < sp.count; ++m) {
      const double k = sp.k(m);
      // content outside the sampled band of W is taken as zero
      if (std::abs(k * c) > nyq_q * (1 + 1e-12) || std::abs(k * s) > nyq_p * (1 + 1e-12)) continue;
      const cplx step = cis(-k * c * g.dq());
      cplx ph = cis(-k * c * g.q_min());
      cplx acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += gp[i][m] * ph;
        ph *= step;
      }
      spec[m] = acc * g.dq() * g.dp();
    }
    const auto pr = synthesize(sp, std::move(spec), h.x_min, h.dx, n);
    std::copy(pr.begin(), pr.end(), h.pr.row(a));
  }
  return h;
}

PhaseSpaceFunction inverse_radon(const QuadratureHistogram& hist, const QuadratureGrid& grid,
                                 const ReconstructionOptions& opt, ReconstructionDiagnostics* diag) {
  if (hist.pr.rows() != hist.angles.size() || hist.pr.cols() < 2 || !(hist.dx > 0.0))
    throw std::invalid_argument("inverse_radon: malformed histogram");
  if (!(opt.cutoff_fraction > 0.0 && opt.cutoff_fraction <= 1.0))
    throw std::invalid_argument("inverse_radon: cutoff_fraction must lie in (0, 1]");
  check_uniform_angles(hist.angles);
  const std::size_t n_x = hist.n_x(), n_a = hist.angles.size();
  const double dx = hist.dx;
  // Band-limited ramp kernel sampled in x (h(0) = pi / 2dx^2, h(odd l) = -2 / (pi l^2 dx^2)),
  // applied as a linear convolution through zero padding to at least 2 n_x. Sampling
  // the kernel rather than |k| keeps the correct DC response.
  std::size_t len = 1;
  while (len < 2 * n_x) len <<= 1;
  std::vector<cplx> kern(len);
  for (std::size_t l = 0; l < len; ++l) {
    const long d = l < len / 2 ? static_cast<long>(l) : static_cast<long>(l) - static_cast<long>(len);
    if (d == 0) kern[l] = kPi / (2 * dx * dx);
    else if (d % 2 != 0) kern[l] = -2.0 / (kPi * static_cast<double>(d * d) * dx * dx);
  }
  fft(kern, -1);
  const auto kk = angular_frequencies(len, dx);
  const double k_c = opt.cutoff_fraction * kPi / dx;
  for (std::size_t m = 0; m < len; ++m) {
    const double k = std::abs(kk[m]);
    const double win = k < k_c ? 0.5 * (1.0 + std::cos(kPi * k / k_c)) : 0.0;
    kern[m] *= win * dx / static_cast<double>(len);
  }
  // only the disc seen by every slice can be reconstructed; outside it W is set to 0
  const double r_max = std::min(-hist.x_min, hist.x_min + static_cast<double>(n_x - 1) * dx);
  const double r2 = r_max > 0.0 ? r_max * r_max : 0.0;
  PhaseSpaceFunction out(grid, Kind::Wigner);
  std::vector<cplx> buf(len);
  std::vector<double> filtered(n_x);
  double k_band = 0.0;
  for (std::size_t a = 0; a < n_a; ++a) {
    std::fill(buf.begin(), buf.end(), cplx{});
    for (std::size_t l = 0; l < n_x; ++l) buf[l] = hist.pr(a, l);
    fft(buf, -1);
    double peak = 0.0;
    for (const auto& v : buf) peak = std::max(peak, std::abs(v));
    for (std::size_t m = 0; m < len; ++m) {
      if (peak > 0.0 && std::abs(buf[m]) > 1e-6 * peak) k_band = std::max(k_band, std::abs(kk[m]));
      buf[m] *= kern[m];
    }
    fft(buf, +1);
    for (std::size_t l = 0; l < n_x; ++l) filtered[l] = buf[l].real();
    const double c = std::cos(hist.angles[a]), s = std::sin(hist.angles[a]);
    const double weight = 1.0 / (2.0 * static_cast<double>(n_a));  // (1/2pi) * (pi / n_a)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double q = grid.q(i), qc = q * c;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double p = grid.p(j);
        if (q * q + p * p > r2) continue;
        out.re(i, j) += weight * cubic_interpolate(filtered, hist.x_min, hist.dx, qc + p * s);
      }
    }
  }
  if (diag) {
    diag->warned = n_a < 16;
    diag->message.clear();
    if (diag->warned) {
      std::ostringstream os;
      os << "inverse_radon: only " << n_a << " angles; with slice bandwidth " << k_band
         << " streak artifacts are expected beyond radius " << static_cast<double>(n_a) / std::max(k_band, 1e-300);
      diag->message = os.str();
    }
  }
  return out;
}

PhaseSpaceFunction lossy_detection(const PhaseSpaceFunction& w, const DetectorModel& det,
                                   const OscillatorFrame& frame) {
  require_wigner(w, "lossy_detection");
  det.validate();
  if (det.efficiency == 1.0) return w;
  const double eta = det.efficiency;
  const auto smooth = s_parameterized(w, det.s(), frame);
  auto c = rescale(smooth.to_complex(), w.grid, std::sqrt(eta));
  for (auto& v : c.data()) v /= eta;
  return PhaseSpaceFunction::from_complex(w.grid, Kind::SParam, det.s(), c, false);
}

PhaseSpaceFunction lossy_detection(const PhaseSpaceFunction& w, const DetectorModel& det) {
  return lossy_detection(w, det, frame_for(w.grid));
}

PhaseSpaceFunction eight_port_measure(const PhaseSpaceFunction& w, const BeamSplitter& bs,
                                      const OscillatorFrame& frame) {
  require_wigner(w, "eight_port_measure");
  bs.validate();
  frame.validate();
  const double t = bs.transmittance, r = bs.reflectance;
  const double hb = frame.hbar, mw = frame.mass * frame.omega;
  auto out = gaussian_convolve_2d(w, std::sqrt(hb * r / (2.0 * mw * t)), std::sqrt(hb * mw * t / (2.0 * r)));
  out.kind = Kind::Husimi;
  out.param = frame.omega * t / r;
  return out;
}

PhaseSpaceFunction eight_port_measure(const PhaseSpaceFunction& w, const BeamSplitter& bs) {
  return eight_port_measure(w, bs, frame_for(w.grid));
}

RingResult ring_method(const WaveFunction& psi, const OscillatorFrame& frame,
                       const std::vector<double>& q0s, const std::vector<double>& p0s,
                       int n_fock) {
  if (n_fock < 1) throw std::invalid_argument("ring_method: n_fock must be >= 1");
  frame.validate();
  const auto& g = psi.grid;
  if (std::abs(frame.hbar - g.hbar()) > 1e-12)
    throw std::invalid_argument("ring_method: frame and grid disagree on hbar");
  const std::size_t n = g.size();
  const RealMatrix basis = fock_basis(frame, g, n_fock);
  const double hb = g.hbar();
  const double norm = psi.norm2();
  RingResult res;
  res.q0 = q0s;
  res.p0 = p0s;
  res.w = RealMatrix(q0s.size(), p0s.size());
  res.tail = RealMatrix(q0s.size(), p0s.size());
  std::vector<cplx> shifted(n), disp(n);
  for (std::size_t a = 0; a < q0s.size(); ++a) {
    const double q0 = q0s[a];
    shifted = psi.psi;
    fourier_shift(shifted.data(), n, -q0 / g.dq());  // psi(q + q0)
    for (std::size_t b = 0; b < p0s.size(); ++b) {
      const double p0 = p0s[b];
      for (std::size_t i = 0; i < n; ++i) disp[i] = shifted[i] * cis(-p0 * (g.q(i) + 0.5 * q0) / hb);
      double parity = 0.0, total = 0.0;
      for (int k = 0; k < n_fock; ++k) {
        const double* phi = basis.row(static_cast<std::size_t>(k));
        cplx c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += phi[i] * disp[i];
        const double pk = std::norm(c * g.dq());
        total += pk;
        parity += (k % 2 ? -pk : pk);
      }
      res.w(a, b) = parity / (kPi * hb);
      res.tail(a, b) = norm - total;
      if (res.tail(a, b) > 1e-8) res.insufficient.emplace_back(a, b);
    }
  }
  return res;
}

double free_evolution_angle(double t_d, double mass, double x0, double hbar) {
  if (!(mass > 0.0) || !(x0 > 0.0) || !(hbar > 0.0))
    throw std::invalid_argument("free_evolution_angle: mass, x0 and hbar must be > 0");
  if (t_d < 0.0) throw std::invalid_argument("free_evolution_angle: t_d must be >= 0");
  return std::atan(t_d * hbar / (mass * x0 * x0));
}

QuadratureHistogram sample_histogram(const QuadratureHistogram& hist, std::size_t counts,
                                     std::uint64_t seed) {
  if (counts == 0) throw std::invalid_argument("sample_histogram: counts must be > 0");
  std::mt19937_64 rng(seed);
  QuadratureHistogram out = hist;
  const std::size_t n_x = hist.n_x();
  for (std::size_t a = 0; a < hist.angles.size(); ++a) {
    double mass = 0.0;
    for (std::size_t l = 0; l < n_x; ++l) mass += std::max(hist.pr(a, l), 0.0);
    // multinomial draw as a chain of conditional binomials
    std::size_t left = counts;
    double rest = mass;
    for (std::size_t l = 0; l < n_x; ++l) {
      const double p = std::max(hist.pr(a, l), 0.0);
      std::size_t k = 0;
      if (left > 0 && rest > 0.0) {
        const double f = std::clamp(p / rest, 0.0, 1.0);
        std::binomial_distribution<std::size_t> bin(left, f);
        k = bin(rng);
      }
      left -= k;
      rest -= p;
      out.pr(a, l) = static_cast<double>(k) / (static_cast<double>(counts) * hist.dx);
    }
  }
  return out;
}

void write_histogram_csv(std::ostream& os, const QuadratureHistogram& hist) {
  os << "# angles=" << hist.angles.size() << " x_min=" << std::setprecision(17) << hist.x_min
     << " x_max=" << hist.x_min + static_cast<double>(hist.n_x()) * hist.dx << " n_x=" << hist.n_x()
     << "\n";
  for (std::size_t a = 0; a < hist.angles.size(); ++a) {
    os << hist.angles[a];
    for (std::size_t l = 0; l < hist.n_x(); ++l) os << ',' << hist.pr(a, l);
    os << '\n';
  }
}

QuadratureHistogram read_histogram_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0)
    throw std::invalid_argument("histogram csv: missing '# angles=...' header");
  std::size_t n_a = 0, n_x = 0;
  double x_min = 0.0, x_max = 0.0;
  bool have[4] = {false, false, false, false};
  std::istringstream hs(line.substr(1));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    try {
      if (key == "angles") n_a = std::stoul(val), have[0] = true;
      else if (key == "x_min") x_min = std::stod(val), have[1] = true;
      else if (key == "x_max") x_max = std::stod(val), have[2] = true;
      else if (key == "n_x") n_x = std::stoul(val), have[3] = true;
    } catch (const std::exception&) {
      throw std::invalid_argument("histogram csv: bad header value '" + tok + "'");
    }
  }
  if (!(have[0] && have[1] && have[2] && have[3]) || n_x < 2 || !(x_max > x_min))
    throw std::invalid_argument("histogram csv: header needs angles, x_min, x_max and n_x");
  QuadratureHistogram h;
  h.x_min = x_min;
  h.dx = (x_max - x_min) / static_cast<double>(n_x);
  h.pr = RealMatrix(n_a, n_x);
  h.angles.resize(n_a);
  for (std::size_t a = 0; a < n_a; ++a) {
    if (!std::getline(is, line)) throw std::invalid_argument("histogram csv: fewer rows than angles");
    std::istringstream rs(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(rs, cell, ',')) {
      double v = 0.0;
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        throw std::invalid_argument("histogram csv: bad number '" + cell + "' in row " + std::to_string(a));
      }
      if (col == 0) h.angles[a] = v;
      else if (col <= n_x) h.pr(a, col - 1) = v;
      ++col;
    }
    if (col != n_x + 1)
      throw std::invalid_argument("histogram csv: row " + std::to_string(a) + " has " +
                                  std::to_string(col) + " cells, expected " + std::to_string(n_x + 1));
  }
  return h;
}

}  // namespace phasespace
