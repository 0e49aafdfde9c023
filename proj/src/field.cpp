#include "phasespace/field.hpp"

#include <algorithm>
#include <cmath>

namespace phasespace {

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Wigner: return "wigner";
    case Kind::SParam: return "sparam";
    case Kind::Husimi: return "husimi";
    case Kind::Kirkwood: return "kirkwood";
    case Kind::Weyl: return "weyl";
    case Kind::Classical: return "classical";
  }
  return "unknown";
}

PhaseSpaceFunction::PhaseSpaceFunction(const QuadratureGrid& g, Kind k, double prm, bool complex)
    : grid(g), kind(k), param(prm), re(g.size(), g.size()) {
  if (complex) im = RealMatrix(g.size(), g.size());
}

ComplexMatrix PhaseSpaceFunction::to_complex() const {
  ComplexMatrix c(re.rows(), re.cols());
  for (std::size_t i = 0; i < re.size(); ++i)
    c.data()[i] = cplx(re.data()[i], is_complex() ? im.data()[i] : 0.0);
  return c;
}

PhaseSpaceFunction PhaseSpaceFunction::from_complex(const QuadratureGrid& g, Kind k, double prm,
                                                    const ComplexMatrix& c, bool keep_imag) {
  PhaseSpaceFunction f(g, k, prm, keep_imag);
  for (std::size_t i = 0; i < c.size(); ++i) {
    f.re.data()[i] = c.data()[i].real();
    if (keep_imag) f.im.data()[i] = c.data()[i].imag();
  }
  return f;
}

double integrate_2d(const PhaseSpaceFunction& f) {
  return integrate_2d(f.re, f.grid.dq(), f.grid.dp());
}

PhaseSpaceFunction gaussian_convolve_2d(const PhaseSpaceFunction& f, double sigma_q,
                                        double sigma_p) {
  PhaseSpaceFunction out = f;
  if (f.is_complex()) {
    ComplexMatrix c = f.to_complex();
    gaussian_convolve_inplace(c, f.grid.dq(), f.grid.dp(), sigma_q, sigma_p);
    out = PhaseSpaceFunction::from_complex(f.grid, f.kind, f.param, c, true);
  } else {
    gaussian_convolve_inplace(out.re, f.grid.dq(), f.grid.dp(), sigma_q, sigma_p);
  }
  return out;
}

double max_abs(const PhaseSpaceFunction& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.re.size(); ++i) {
    const double v = f.is_complex() ? std::hypot(f.re.data()[i], f.im.data()[i])
                                    : std::abs(f.re.data()[i]);
    m = std::max(m, v);
  }
  return m;
}

double min_value(const PhaseSpaceFunction& f) {
  return *std::min_element(f.re.data().begin(), f.re.data().end());
}

double max_value(const PhaseSpaceFunction& f) {
  return *std::max_element(f.re.data().begin(), f.re.data().end());
}

void require_same_grid(const QuadratureGrid& a, const QuadratureGrid& b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

double rms_difference(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  require_same_grid(a.grid, b.grid, "rms_difference");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.re.size(); ++i) {
    double d = a.re.data()[i] - b.re.data()[i];
    acc += d * d;
    if (a.is_complex() || b.is_complex()) {
      const double ai = a.is_complex() ? a.im.data()[i] : 0.0;
      const double bi = b.is_complex() ? b.im.data()[i] : 0.0;
      acc += (ai - bi) * (ai - bi);
    }
  }
  return std::sqrt(acc / static_cast<double>(a.re.size()));
}

double max_difference(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  require_same_grid(a.grid, b.grid, "max_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.re.size(); ++i) {
    const cplx x(a.re.data()[i], a.is_complex() ? a.im.data()[i] : 0.0);
    const cplx y(b.re.data()[i], b.is_complex() ? b.im.data()[i] : 0.0);
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

double l2_distance(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  const double r = rms_difference(a, b);
  const auto& g = a.grid;
  return r * static_cast<double>(g.size()) * std::sqrt(g.dq() * g.dp());
}

}  // namespace phasespace
