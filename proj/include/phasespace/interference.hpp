#pragma once

#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

// Two coherent beams centred at Q = +d and Q = -d. The phase multiplies the -d beam.
struct TwoBeamSpec {
  double d = 0.0;
  double relative_phase = 0.0;
  bool coherent = true;

  void validate() const;
};

// Closed form in (Q, P) = (kappa q, p / (hbar kappa)), converted to a density in (q, p):
// W0 e^{-P^2} {e^{-(Q-d)^2} + e^{-(Q+d)^2} + 2 e^{-Q^2} cos(2 P d + phase)} / hbar with
// W0 = 1 / (pi (2 + 2 e^{-d^2})). The incoherent variant keeps the outer terms, W0 = 1/(2 pi).
PhaseSpaceFunction two_gaussian_wdf(const TwoBeamSpec& spec, const OscillatorFrame& frame,
                                    const QuadratureGrid& grid);

// The same field built on the grid and transformed numerically. Incoherent beams are the
// equal-weight mixture of the two components.
PhaseSpaceFunction two_beam_wdf(const TwoBeamSpec& spec, const OscillatorFrame& frame,
                                const QuadratureGrid& grid);

// Numeric WDF with an extra phase on the -d component. The normalization W0 of the
// phase-free superposition is kept, so the outer terms do not move.
PhaseSpaceFunction aharonov_bohm_shift(const TwoBeamSpec& spec, double delta_phi,
                                       const OscillatorFrame& frame, const QuadratureGrid& grid);

struct SqueezingPair {
  double var_q = 0.0;
  double var_k = 0.0;
};

// Variances of e^{-(x - d/2)^2/2} + e^{-(x + d/2)^2/2}; d is the full separation.
SqueezingPair superposition_squeezing(double d);
// Same quantities by direct moment integration of the sampled field.
SqueezingPair superposition_moments(double d, const QuadratureGrid& grid);

struct PhotonStatistics {
  std::vector<double> p;  // P_n, n = 0..cutoff-1
  int cutoff = 0;
  double tail = 0.0;      // 1 - sum P_n

  void validate() const;
  double mean() const;
};

// Throws NumericError if the Fock tail exceeds tail_tol.
PhotonStatistics photon_statistics_exact(const WaveFunction& psi, const OscillatorFrame& frame,
                                         int n_max, double tail_tol = 1e-8);
PhotonStatistics photon_statistics_exact(const DensityMatrix& rho, const OscillatorFrame& frame,
                                         int n_max, double tail_tol = 1e-8);

// (<n(n-1)> - <n>^2) / <n>. Refuses a tail above tail_tol or a zero mean.
double mandel_q(const PhotonStatistics& stats, double tail_tol = 1e-8);

// <:X^2:> - <X>^2 for X = a e^{i theta} + a^+ e^{-i theta}. Refuses a wavefunction
// that has not decayed at the window edge.
double quadrature_s(const WaveFunction& psi, double theta, const OscillatorFrame& frame);

// G(q1, q2) = int dp exp(-i p (q1 - q2) / hbar) W((q1 + q2)/2, p), normalized by
// sqrt(G(q1,q1) G(q2,q2)). Points are snapped to grid nodes; a midpoint between nodes is
// reached by a half-sample Fourier shift. Zero intensity at either point throws.
cplx g1(const PhaseSpaceFunction& w, double q1, double q2);
// rho(q2, q1) / sqrt(rho(q1,q1) rho(q2,q2)), which equals the WDF route above.
cplx g1(const DensityMatrix& rho, double q1, double q2);
double intensity(const PhaseSpaceFunction& w, double q);

// 2 sqrt(I1 I2) / (I1 + I2) |g1|
double visibility(cplx g1_value, double i1, double i2);

// W_t(q, p) of a momentum-transferring device.
struct MomentumTransferModel {
  PhaseSpaceFunction w_t;

  static MomentumTransferModel no_kick(const QuadratureGrid& grid);
  static MomentumTransferModel gaussian_kick(const QuadratureGrid& grid, double sigma_p);
  // Flat over |p| <= half_width; a half width beyond the window covers every p node.
  static MomentumTransferModel flat_kick(const QuadratureGrid& grid, double half_width);
};

// W_f(q, p) = int dp' W_i(q, p - p') W_t(q, p'), a circular convolution along each row.
PhaseSpaceFunction which_path_filter(const PhaseSpaceFunction& w_i,
                                     const MomentumTransferModel& model);

// V = sum_j P(p_j) exp(i p_j d / hbar) dp with P(p) = W_t(0, p); a plain periodic sum.
cplx visibility_after_transfer(const MomentumTransferModel& model, double d);

// sqrt(1 - |V|^2)
double which_way_knowledge(cplx v);

struct OverlapEstimate {
  double p = 0.0;       // semiclassical P_n
  double phase = 0.0;   // phi_n = S_n - pi/4 (two-region case), 0 for one region
  double area = 0.0;    // area of one overlap region, in units of hbar
  int regions = 0;
  double resolution_error = 0.0;  // area of cells cut by a boundary
};

// Band n is the annulus 2n <= Q^2 + P^2 < 2(n+1). Coherent targets are discs of radius
// sqrt 2 about (sqrt2 Re a, sqrt2 Im a); squeezed targets with real alpha are ellipses of
// semi-axes sqrt(2/s), sqrt(2 s). Both have area 2 pi. Areas by counting cell centres on a
// cells x cells lattice over the target's bounding box.
OverlapEstimate area_overlap_estimate(int n, const StateSpec& target, int cells = 1024);

}  // namespace phasespace
