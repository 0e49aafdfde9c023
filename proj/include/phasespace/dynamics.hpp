#pragma once

#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/potential.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

struct HamiltonianSpec {
  double mass = 1.0;
  PolynomialPotential potential;

  void validate() const;
  double operator()(double q, double p) const { return p * p / (2.0 * mass) + potential(q); }
};

// x -> M x with M = [[a, b], [c, d]] acting on (q, p).
struct SymplecticMap2D {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  void validate() const;  // |det - 1| <= 1e-12
  SymplecticMap2D inverse() const { return {d, -b, -c, a}; }
  SymplecticMap2D operator*(const SymplecticMap2D& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  static SymplecticMap2D rotation(double theta);
  // free flight for time t: q -> q + t p / m
  static SymplecticMap2D shear(double t_over_m);
  static SymplecticMap2D squeeze(double s);  // diag(s, 1/s)
  // exact harmonic flow for time t
  static SymplecticMap2D harmonic(double t, double mass, double omega);
};

struct EvolutionConfig {
  double dt = 1e-3;
  int steps = 0;
  bool quantum_terms = true;
};

// RK4 on the Moyal equation with spectral derivatives. The hbar^2 and hbar^4
// terms are included when cfg.quantum_terms is set.
PhaseSpaceFunction moyal_evolve(const PhaseSpaceFunction& w, const HamiltonianSpec& h,
                                const EvolutionConfig& cfg);

struct LiouvilleOptions {
  double dt = 0.01;         // internal RK4 step for the characteristics
  std::size_t refine = 0;   // spectral refinement of W0 before bicubic sampling; 0 = auto
};

struct LiouvilleDiagnostics {
  double mass_loss = 0.0;
  bool warned = false;  // mass loss above 1e-6
};

// W(x, t) = W0(phi_{-t}(x)) with the classical flow phi, integrated per node.
PhaseSpaceFunction liouville_evolve(const PhaseSpaceFunction& w, const HamiltonianSpec& h, double t,
                                    const LiouvilleOptions& opt = {},
                                    LiouvilleDiagnostics* diag = nullptr);

// W_f(x) = W_i(M^-1 x). Rotations go through three-shear factorizations and the
// remaining squeeze through band-limited rescaling of each axis.
PhaseSpaceFunction apply_symplectic(const PhaseSpaceFunction& w, const SymplecticMap2D& m);

// I_k = (k / 2^(k-1)) int int W^k dq dp / (2 pi), for k = 1..k_max
std::vector<double> wdf_moments(const PhaseSpaceFunction& w, int k_max);

// Strang splitting: half potential step, kinetic step in momentum space, half potential step.
WaveFunction split_step_schrodinger(const WaveFunction& psi, const HamiltonianSpec& h, double t,
                                    double dt);

// <H> of a wavefunction with spectral kinetic energy.
double energy_expectation(const WaveFunction& psi, const HamiltonianSpec& h);

}  // namespace phasespace
