#pragma once

#include <cstdint>
#include <string>

#include "phasespace/numerics.hpp"

namespace phasespace {

enum class Kind : std::uint8_t {
  Wigner = 0,
  SParam = 1,
  Husimi = 2,
  Kirkwood = 3,
  Weyl = 4,
  Classical = 5,
};

std::string kind_name(Kind k);

// Samples F(q_i, p_j) on a grid. Real kinds keep `im` empty.
struct PhaseSpaceFunction {
  QuadratureGrid grid;
  Kind kind = Kind::Wigner;
  double param = 0.0;  // s, zeta or b depending on kind
  RealMatrix re;
  RealMatrix im;

  PhaseSpaceFunction() = default;
  PhaseSpaceFunction(const QuadratureGrid& g, Kind k, double prm = 0.0, bool complex = false);

  bool is_complex() const { return !im.empty(); }
  std::size_t n() const { return grid.size(); }
  double operator()(std::size_t i, std::size_t j) const { return re(i, j); }
  double& operator()(std::size_t i, std::size_t j) { return re(i, j); }
  cplx value(std::size_t i, std::size_t j) const {
    return is_complex() ? cplx(re(i, j), im(i, j)) : cplx(re(i, j), 0.0);
  }

  ComplexMatrix to_complex() const;
  static PhaseSpaceFunction from_complex(const QuadratureGrid& g, Kind k, double prm,
                                         const ComplexMatrix& c, bool keep_imag);
};

// Trapezoid double integral over (q, p).
double integrate_2d(const PhaseSpaceFunction& f);

PhaseSpaceFunction gaussian_convolve_2d(const PhaseSpaceFunction& f, double sigma_q,
                                        double sigma_p);

// Elementwise helpers used throughout the tests and reports.
double max_abs(const PhaseSpaceFunction& f);
double min_value(const PhaseSpaceFunction& f);
double max_value(const PhaseSpaceFunction& f);
double rms_difference(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b);
double max_difference(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b);
// sqrt(int int |a - b|^2 dq dp); unlike the per-sample RMS it does not depend on the window
double l2_distance(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b);

void require_same_grid(const QuadratureGrid& a, const QuadratureGrid& b, const char* what);

}  // namespace phasespace
