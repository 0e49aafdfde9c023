#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

// pr(x_l, theta_a) for x_l = x_min + l dx. Row a of `pr` belongs to angles[a].
struct QuadratureHistogram {
  std::vector<double> angles;
  double x_min = 0.0;
  double dx = 0.0;
  RealMatrix pr;

  std::size_t n_x() const { return pr.cols(); }
  double x(std::size_t l) const { return x_min + static_cast<double>(l) * dx; }
  // slice normalization within 1e-6 and pr >= -1e-10
  void validate() const;
};

// theta_a = a pi / n, a = 0..n-1
std::vector<double> uniform_angles(std::size_t n);

struct DetectorModel {
  double efficiency = 1.0;  // eta in (0, 1]

  void validate() const;
  double s() const { return -(1.0 - efficiency) / efficiency; }
};

struct BeamSplitter {
  double transmittance = 0.5;
  double reflectance = 0.5;

  void validate() const;  // T + R = 1 within 1e-12, both in (0, 1)
};

// pr(x, theta) = int W(x cos - p sin, x sin + p cos) dp, sampled on the q-axis of W.
QuadratureHistogram radon_project(const PhaseSpaceFunction& w, const std::vector<double>& angles);

struct ReconstructionOptions {
  double cutoff_fraction = 1.0;  // Hann window edge as a fraction of the x-Nyquist frequency
};

struct ReconstructionDiagnostics {
  bool warned = false;
  std::string message;
};

// Filtered backprojection: ramp filter with a Hann window. Angles must be uniform on
// [0, pi). Nodes outside the disc covered by every slice (radius min(-x_min, x_max))
// are left at zero. Fewer than 16 angles sets the warning in `diag`.
PhaseSpaceFunction inverse_radon(const QuadratureHistogram& hist, const QuadratureGrid& grid,
                                 const ReconstructionOptions& opt = {},
                                 ReconstructionDiagnostics* diag = nullptr);

// eta^-1 F_s(q / sqrt(eta), p / sqrt(eta)) with s = -(1 - eta)/eta; smoothing first,
// then the coordinate and amplitude rescaling.
PhaseSpaceFunction lossy_detection(const PhaseSpaceFunction& w, const DetectorModel& det,
                                   const OscillatorFrame& frame);
PhaseSpaceFunction lossy_detection(const PhaseSpaceFunction& w, const DetectorModel& det);

// Gaussian smoothing with variances hbar R / (2 m omega T) along q and
// hbar m omega T / (2 R) along p.
PhaseSpaceFunction eight_port_measure(const PhaseSpaceFunction& w, const BeamSplitter& bs,
                                      const OscillatorFrame& frame);
PhaseSpaceFunction eight_port_measure(const PhaseSpaceFunction& w, const BeamSplitter& bs);

// Displaced-parity sampling of W at the probe points (q0s[i], p0s[j]).
struct RingResult {
  std::vector<double> q0;
  std::vector<double> p0;
  RealMatrix w;     // W(q0[i], p0[j])
  RealMatrix tail;  // 1 - sum_n P_n at each point
  std::vector<std::pair<std::size_t, std::size_t>> insufficient;  // points with tail > 1e-8
};

RingResult ring_method(const WaveFunction& psi, const OscillatorFrame& frame,
                       const std::vector<double>& q0s, const std::vector<double>& p0s, int n_fock);

// theta = atan(t_d hbar / (m x0^2))
double free_evolution_angle(double t_d, double mass, double x0, double hbar = 1.0);

// Multinomial resampling of every slice with `counts` events; returns normalized densities.
QuadratureHistogram sample_histogram(const QuadratureHistogram& hist, std::size_t counts,
                                     std::uint64_t seed);

// `# angles=<n> x_min=<..> x_max=<..> n_x=<..>` then one row per angle: theta, pr values
void write_histogram_csv(std::ostream& os, const QuadratureHistogram& hist);
QuadratureHistogram read_histogram_csv(std::istream& is);

}  // namespace phasespace
