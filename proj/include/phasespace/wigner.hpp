#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/potential.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

// W(q,p) = (2 pi hbar)^-1 int dx exp(-i p x / hbar) psi*(q - x/2) psi(q + x/2)
PhaseSpaceFunction wigner_from_wavefunction(const WaveFunction& psi);
PhaseSpaceFunction wigner_from_density(const DensityMatrix& rho);

// W_nm with psi_n conjugated: W of sum a_n psi_n is sum a_n* a_m W_nm.
PhaseSpaceFunction cross_wigner(const WaveFunction& psi_n, const WaveFunction& psi_m);

struct Marginals {
  std::vector<double> position;  // int W dp, indexed like the q-axis
  std::vector<double> momentum;  // int W dq, indexed like the p-axis
};
Marginals marginals(const PhaseSpaceFunction& w);

// Tr(rho1 rho2) = 2 pi hbar int int W1 W2
double overlap(const PhaseSpaceFunction& w1, const PhaseSpaceFunction& w2);

// Inverse chord transform. Chords longer than half the window are outside the
// range the forward transform can represent and come back as zero.
DensityMatrix density_from_wigner(const PhaseSpaceFunction& w);

PhaseSpaceFunction s_parameterized(const PhaseSpaceFunction& w, double s,
                                   const OscillatorFrame& frame);
PhaseSpaceFunction s_parameterized(const PhaseSpaceFunction& w, double s);

PhaseSpaceFunction husimi(const PhaseSpaceFunction& w, double zeta, const OscillatorFrame& frame);
PhaseSpaceFunction husimi(const PhaseSpaceFunction& w, double zeta);

// b-ordered distribution: multiplier exp(-i hbar b k_q k_p / 2) on the double spectrum of W.
PhaseSpaceFunction kirkwood(const PhaseSpaceFunction& w, double b);

// W~(Q,P) = int int W(q,p) exp(-i (P q - p Q) / hbar) dq dp on the centred grid
// make_grid(-L/2, L/2, n, hbar).
PhaseSpaceFunction weyl_function(const PhaseSpaceFunction& w);

// <q^a p^b> in symmetric ordering. Throws NumericError if |W| carries more than
// 1e-8 of weight on the outermost rows or columns.
double expectation(const PhaseSpaceFunction& w, int a, int b);

struct Uncertainty {
  double dq = 0.0;
  double dp = 0.0;
  double product = 0.0;
};
Uncertainty uncertainty(const PhaseSpaceFunction& w);

double negativity_volume(const PhaseSpaceFunction& w);

// Norms of L1 W and L2 W scaled by the norms of the classical streaming term and
// of (p^2/2m + V) W respectively.
struct StationaryResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
};
StationaryResiduals stationary_residuals(const PhaseSpaceFunction& w, const PolynomialPotential& v,
                                         double energy, double mass = 1.0);

struct PhasePoint {
  double u = 0.0;
  double v = 0.0;
};

struct PositivityReport {
  bool pass = false;
  double min_eigenvalue = 0.0;
};

// Narcowich-O'Connell test on W~(u,v) = int int W exp[i (q v - u p)].
// `q_padding` zero-pads W along q before the transform to refine the v-spacing
// used for bilinear interpolation.
PositivityReport hbar_positivity_check(const PhaseSpaceFunction& w,
                                       const std::vector<PhasePoint>& points, double tol,
                                       std::size_t q_padding = 8);

// Uniform random points in |u| <= u_max, |v| <= v_max.
std::vector<PhasePoint> random_phase_points(std::uint64_t seed, std::size_t m, double u_max,
                                            double v_max);

struct CriticalS {
  bool determined = false;  // false: W itself is nonnegative, s_c lies above 0
  double lower = 0.0;       // F(lower) >= -1e-9
  double upper = 0.0;       // F(upper) <  -1e-9
  double value() const { return 0.5 * (lower + upper); }
};

CriticalS critical_s(const PhaseSpaceFunction& w, double step, const OscillatorFrame& frame);
CriticalS critical_s(const WaveFunction& psi, double step, const OscillatorFrame& frame);
CriticalS critical_s(const DensityMatrix& rho, double step, const OscillatorFrame& frame);

}  // namespace phasespace
