#include "phasespace/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace phasespace {

namespace {

constexpr double kEdgeTol = 1e-8;

double sum_norm2(const std::vector<cplx>& v, double dq) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return acc * dq;
}

void normalize(WaveFunction& w) {
  const double n2 = w.norm2();
  if (!(n2 > 0.0)) throw NumericError("state has zero norm on this grid");
  const double s = 1.0 / std::sqrt(n2);
  for (auto& x : w.psi) x *= s;
}

void check_edges(const WaveFunction& w, const char* what) {
  if (edge_amplitude(w) > kEdgeTol) {
    std::ostringstream os;
    os << what << ": state leaks off the grid (edge |psi| = " << edge_amplitude(w) << ")";
    throw NumericError(os.str());
  }
}

WaveFunction coherent(cplx alpha, const OscillatorFrame& f, const QuadratureGrid& g) {
  const double k = f.kappa();
  const double pref = std::pow(k * k / std::numbers::pi, 0.25);
  const double sq2 = std::numbers::sqrt2;
  WaveFunction w{g, std::vector<cplx>(g.size())};
  const cplx c0 = -0.5 * alpha * alpha - 0.5 * std::norm(alpha);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = k * g.q(i);
    w.psi[i] = pref * std::exp(cplx(-0.5 * x * x, 0.0) + sq2 * alpha * x + c0);
  }
  return w;
}

WaveFunction squeezed(cplx alpha, double s, const OscillatorFrame& f, const QuadratureGrid& g) {
  if (!(s > 0.0)) throw std::invalid_argument("squeezed: s must be > 0");
  const double k = f.kappa();
  const double pref = std::pow(s * k * k / std::numbers::pi, 0.25);
  const double sq2 = std::numbers::sqrt2;
  WaveFunction w{g, std::vector<cplx>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx u = k * g.q(i) - sq2 * alpha;
    w.psi[i] = pref * std::exp(-0.5 * s * u * u - s * alpha.imag() * alpha.imag());
  }
  return w;
}

WaveFunction unnormalized(const StateSpec& spec, const OscillatorFrame& f,
                          const QuadratureGrid& g);

WaveFunction combine(const std::vector<SuperpositionTerm>& terms, const OscillatorFrame& f,
                     const QuadratureGrid& g) {
  if (terms.empty()) throw std::invalid_argument("superposition: no terms");
  bool any = false;
  WaveFunction w{g, std::vector<cplx>(g.size())};
  for (const auto& t : terms) {
    if (t.coeff == 0.0) continue;
    any = true;
    WaveFunction part = build_wavefunction(t.spec, f, g);
    for (std::size_t i = 0; i < g.size(); ++i) w.psi[i] += t.coeff * part.psi[i];
  }
  if (!any) throw std::invalid_argument("superposition: all coefficients are zero");
  return w;
}

WaveFunction unnormalized(const StateSpec& spec, const OscillatorFrame& f,
                          const QuadratureGrid& g) {
  const double sq2 = std::numbers::sqrt2;
  return std::visit(
      [&](const auto& s) -> WaveFunction {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockSpec>) {
          if (s.n < 0) throw std::invalid_argument("fock: n must be >= 0");
          RealMatrix b = fock_basis(f, g, s.n + 1);
          WaveFunction w{g, std::vector<cplx>(g.size())};
          for (std::size_t i = 0; i < g.size(); ++i) w.psi[i] = b(static_cast<std::size_t>(s.n), i);
          return w;
        } else if constexpr (std::is_same_v<T, CoherentSpec>) {
          return coherent(s.alpha, f, g);
        } else if constexpr (std::is_same_v<T, SqueezedSpec>) {
          return squeezed(s.alpha, s.s, f, g);
        } else if constexpr (std::is_same_v<T, CatSpec>) {
          const cplx ph(std::cos(s.theta), std::sin(s.theta));
          return combine({{1.0 / sq2, CoherentSpec{s.alpha * ph}},
                          {1.0 / sq2, CoherentSpec{s.alpha * std::conj(ph)}}},
                         f, g);
        } else if constexpr (std::is_same_v<T, TwoGaussianSpec>) {
          if (s.d < 0.0) throw std::invalid_argument("twogauss: d must be >= 0");
          const double a = s.d / sq2;
          return combine({{1.0, CoherentSpec{a}}, {1.0, CoherentSpec{-a}}}, f, g);
        } else if constexpr (std::is_same_v<T, SuperpositionSpec>) {
          return combine(s.terms, f, g);
        } else {
          throw std::invalid_argument("mixed state has no wavefunction; use build_density");
        }
      },
      spec.v);
}

}  // namespace

double OscillatorFrame::kappa() const { return std::sqrt(mass * omega / hbar); }

void OscillatorFrame::validate() const {
  if (!(mass > 0.0) || !(omega > 0.0) || !(hbar > 0.0))
    throw std::invalid_argument("frame: mass, omega and hbar must be > 0");
}

OscillatorFrame frame_for(const QuadratureGrid& g, double mass, double omega) {
  return OscillatorFrame{mass, omega, g.hbar()};
}

bool StateSpec::is_pure() const {
  if (std::holds_alternative<ThermalSpec>(v)) return false;
  if (const auto* sp = std::get_if<SuperpositionSpec>(&v)) {
    for (const auto& t : sp->terms)
      if (!t.spec.is_pure()) return false;
  }
  return true;
}

std::string StateSpec::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockSpec>) {
          os << "fock:n=" << s.n;
        } else if constexpr (std::is_same_v<T, CoherentSpec>) {
          os << "coherent:re=" << s.alpha.real() << ",im=" << s.alpha.imag();
        } else if constexpr (std::is_same_v<T, SqueezedSpec>) {
          os << "squeezed:re=" << s.alpha.real() << ",im=" << s.alpha.imag() << ",s=" << s.s;
        } else if constexpr (std::is_same_v<T, CatSpec>) {
          os << "cat:alpha=" << s.alpha.real();
          if (s.alpha.imag() != 0.0) os << ",im=" << s.alpha.imag();
          os << ",theta=" << s.theta;
        } else if constexpr (std::is_same_v<T, TwoGaussianSpec>) {
          os << "twogauss:d=" << s.d;
        } else if constexpr (std::is_same_v<T, ThermalSpec>) {
          os << "thermal:nbar=" << s.nbar;
          if (s.cutoff > 0) os << ",cutoff=" << s.cutoff;
        } else {
          os << "sup:";
          for (std::size_t i = 0; i < s.terms.size(); ++i) {
            if (i) os << "+";
            const cplx c = s.terms[i].coeff;
            os << "(" << c.real();
            if (c.imag() != 0.0) os << (c.imag() < 0 ? "" : "+") << c.imag() << "i";
            os << ")" << s.terms[i].spec.describe();
          }
        }
      },
      v);
  return os.str();
}

StateSpec superposition(std::vector<SuperpositionTerm> terms) {
  return SuperpositionSpec{std::move(terms)};
}

double WaveFunction::norm2() const { return sum_norm2(psi, grid.dq()); }

cplx DensityMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < rho.rows(); ++i) t += rho(i, i);
  return t * grid.dq();
}

double edge_amplitude(const WaveFunction& w) {
  if (w.psi.empty()) return 0.0;
  return std::max(std::abs(w.psi.front()), std::abs(w.psi.back()));
}

RealMatrix fock_basis(const OscillatorFrame& frame, const QuadratureGrid& g, int count) {
  frame.validate();
  if (count <= 0) return RealMatrix();
  const auto n = g.size();
  const double k = frame.kappa();
  RealMatrix b(static_cast<std::size_t>(count), n);
  const double pref = std::pow(k * k / std::numbers::pi, 0.25);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = k * g.q(i);
    b(0, i) = pref * std::exp(-0.5 * x * x);
  }
  if (count > 1)
    for (std::size_t i = 0; i < n; ++i) b(1, i) = std::numbers::sqrt2 * k * g.q(i) * b(0, i);
  for (int m = 1; m + 1 < count; ++m) {
    const double a = std::sqrt(2.0 / (m + 1));
    const double c = std::sqrt(static_cast<double>(m) / (m + 1));
    for (std::size_t i = 0; i < n; ++i) {
      const auto mu = static_cast<std::size_t>(m);
      b(mu + 1, i) = a * k * g.q(i) * b(mu, i) - c * b(mu - 1, i);
    }
  }
  return b;
}

WaveFunction build_wavefunction(const StateSpec& spec, const OscillatorFrame& frame,
                                const QuadratureGrid& grid) {
  frame.validate();
  if (std::abs(frame.hbar - grid.hbar()) > 1e-15 * grid.hbar())
    throw std::invalid_argument("frame and grid disagree on hbar");
  WaveFunction w = unnormalized(spec, frame, grid);
  normalize(w);
  check_edges(w, "build_wavefunction");
  return w;
}

DensityMatrix density_from_wavefunction(const WaveFunction& w) {
  const auto n = w.grid.size();
  DensityMatrix d{w.grid, ComplexMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d.rho(i, j) = w.psi[i] * std::conj(w.psi[j]);
  return d;
}

DensityMatrix mixture(const std::vector<std::pair<double, DensityMatrix>>& parts) {
  if (parts.empty()) throw std::invalid_argument("mixture: no components");
  DensityMatrix out{parts.front().second.grid,
                    ComplexMatrix(parts.front().second.rho.rows(), parts.front().second.rho.cols())};
  double wsum = 0.0;
  for (const auto& [w, d] : parts) {
    if (w < 0.0) throw std::invalid_argument("mixture: negative weight");
    if (d.grid != out.grid) throw std::invalid_argument("mixture: grid mismatch");
    wsum += w;
    for (std::size_t i = 0; i < d.rho.size(); ++i) out.rho.data()[i] += w * d.rho.data()[i];
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("mixture: weights sum to zero");
  for (auto& x : out.rho.data()) x /= wsum;
  return out;
}

std::vector<double> thermal_weights(double nbar, int cutoff) {
  if (nbar < 0.0) throw std::invalid_argument("thermal: nbar must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(cutoff));
  const double r = nbar / (1.0 + nbar);
  double w = 1.0 / (1.0 + nbar);
  for (int n = 0; n < cutoff; ++n) {
    p[static_cast<std::size_t>(n)] = w;
    w *= r;
  }
  return p;
}

int thermal_cutoff(double nbar, double tail) {
  if (nbar <= 0.0) return 1;
  const double r = nbar / (1.0 + nbar);
  // neglected weight of n >= N is r^N
  return static_cast<int>(std::ceil(std::log(tail) / std::log(r)));
}

DensityMatrix build_density(const StateSpec& spec, const OscillatorFrame& frame,
                            const QuadratureGrid& grid) {
  if (const auto* th = std::get_if<ThermalSpec>(&spec.v)) {
    frame.validate();
    const int needed = thermal_cutoff(th->nbar);
    const int cutoff = th->cutoff > 0 ? th->cutoff : needed;
    if (cutoff < needed)
      throw NumericError("thermal: cutoff " + std::to_string(cutoff) +
                         " leaves neglected weight above 1e-10");
    const auto p = thermal_weights(th->nbar, cutoff);
    RealMatrix b = fock_basis(frame, grid, cutoff);
    double d_lo = 0.0, d_hi = 0.0;
    for (int m = 0; m < cutoff; ++m) {
      const auto mu = static_cast<std::size_t>(m);
      d_lo += p[mu] * b(mu, 0) * b(mu, 0);
      d_hi += p[mu] * b(mu, grid.size() - 1) * b(mu, grid.size() - 1);
    }
    if (std::sqrt(std::max(d_lo, d_hi)) > kEdgeTol)
      throw NumericError("thermal: state leaks off the grid");
    const auto n = grid.size();
    DensityMatrix d{grid, ComplexMatrix(n, n)};
    for (int m = 0; m < cutoff; ++m) {
      const double w = p[static_cast<std::size_t>(m)];
      const double* row = b.row(static_cast<std::size_t>(m));
      for (std::size_t i = 0; i < n; ++i) {
        const double wi = w * row[i];
        cplx* r = d.rho.row(i);
        for (std::size_t j = 0; j < n; ++j) r[j] += wi * row[j];
      }
    }
    return d;
  }
  if (!spec.is_pure()) throw std::invalid_argument("build_density: unsupported mixed spec");
  return density_from_wavefunction(build_wavefunction(spec, frame, grid));
}

FockExpansion fock_coefficients(const WaveFunction& psi, const OscillatorFrame& frame, int n_max,
                                double tail_tol) {
  RealMatrix b = fock_basis(frame, psi.grid, n_max);
  FockExpansion out;
  out.coeffs.resize(static_cast<std::size_t>(n_max));
  const double dq = psi.grid.dq();
  double total = 0.0;
  for (int m = 0; m < n_max; ++m) {
    const double* row = b.row(static_cast<std::size_t>(m));
    cplx acc = 0.0;
    for (std::size_t i = 0; i < psi.psi.size(); ++i) acc += row[i] * psi.psi[i];
    out.coeffs[static_cast<std::size_t>(m)] = acc * dq;
    total += std::norm(acc * dq);
  }
  out.tail = 1.0 - total;
  if (out.tail > tail_tol)
    throw NumericError("fock_coefficients: tail " + std::to_string(out.tail) +
                       " exceeds tolerance; increase the cutoff");
  return out;
}

std::vector<double> fock_populations(const DensityMatrix& rho, const OscillatorFrame& frame,
                                     int n_max) {
  RealMatrix b = fock_basis(frame, rho.grid, n_max);
  const auto n = rho.grid.size();
  const double dq = rho.grid.dq();
  std::vector<double> p(static_cast<std::size_t>(n_max));
  std::vector<cplx> tmp(n);
  for (int m = 0; m < n_max; ++m) {
    const double* row = b.row(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc = 0.0;
      const cplx* r = rho.rho.row(i);
      for (std::size_t j = 0; j < n; ++j) acc += r[j] * row[j];
      tmp[i] = acc;
    }
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += row[i] * tmp[i];
    p[static_cast<std::size_t>(m)] = (acc * dq * dq).real();
  }
  return p;
}

double purity(const DensityMatrix& d) {
  double acc = 0.0;
  for (const auto& x : d.rho.data()) acc += std::norm(x);
  const double dq = d.grid.dq();
  return acc * dq * dq;
}

cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (a.grid != b.grid) throw std::invalid_argument("inner_product: grid mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.psi.size(); ++i) acc += std::conj(a.psi[i]) * b.psi[i];
  return acc * a.grid.dq();
}

CatNormalization cat_normalization(const CatSpec& cat, const OscillatorFrame& frame,
                                   const QuadratureGrid& grid) {
  const double sq2 = std::numbers::sqrt2;
  const cplx ph(std::cos(cat.theta), std::sin(cat.theta));
  WaveFunction sum = combine({{1.0 / sq2, CoherentSpec{cat.alpha * ph}},
                              {1.0 / sq2, CoherentSpec{cat.alpha * std::conj(ph)}}},
                             frame, grid);
  CatNormalization r;
  r.numeric = 1.0 / std::sqrt(sum.norm2());
  const double a = std::abs(cat.alpha);
  const double s2 = std::sin(cat.theta) * std::sin(cat.theta);
  const double c = std::cos(a * a * std::sin(2.0 * cat.theta));
  r.linear_exponent = 1.0 / std::sqrt(1.0 + c * std::exp(-2.0 * a * s2));
  r.quadratic_exponent = 1.0 / std::sqrt(1.0 + c * std::exp(-2.0 * a * a * s2));
  return r;
}

}  // namespace phasespace
