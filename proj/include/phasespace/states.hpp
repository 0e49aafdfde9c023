#pragma once

#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "phasespace/numerics.hpp"

namespace phasespace {

struct OscillatorFrame {
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 1.0;

  double kappa() const;  // sqrt(m*omega/hbar)
  void validate() const;
};

OscillatorFrame frame_for(const QuadratureGrid& g, double mass = 1.0, double omega = 1.0);

struct FockSpec {
  int n = 0;
};
struct CoherentSpec {
  cplx alpha{0.0, 0.0};
};
// psi ~ exp[-s (kappa q - sqrt2 alpha)^2 / 2]; mean momentum is sqrt2 * s * Im(alpha) * hbar*kappa.
struct SqueezedSpec {
  cplx alpha{0.0, 0.0};
  double s = 1.0;
};
// Equal-weight superposition of |alpha e^{i theta}> and |alpha e^{-i theta}>.
struct CatSpec {
  cplx alpha{0.0, 0.0};
  double theta = 0.0;
};
// Two in-phase coherent components centred at Q = +d and Q = -d.
struct TwoGaussianSpec {
  double d = 0.0;
};
struct ThermalSpec {
  double nbar = 0.0;
  int cutoff = 0;  // 0 picks the smallest cutoff with neglected weight < 1e-10
};

struct StateSpec;

struct SuperpositionTerm;
struct SuperpositionSpec {
  std::vector<SuperpositionTerm> terms;
};

struct StateSpec {
  using Variant = std::variant<FockSpec, CoherentSpec, SqueezedSpec, CatSpec, TwoGaussianSpec,
                               SuperpositionSpec, ThermalSpec>;
  Variant v;

  StateSpec() : v(FockSpec{}) {}
  template <class T>
    requires std::is_constructible_v<Variant, T>
  StateSpec(T x) : v(std::move(x)) {}

  bool is_pure() const;
  std::string describe() const;

  static StateSpec fock(int n) { return FockSpec{n}; }
  static StateSpec coherent(cplx a) { return CoherentSpec{a}; }
  static StateSpec squeezed(cplx a, double s) { return SqueezedSpec{a, s}; }
  static StateSpec cat(cplx a, double theta) { return CatSpec{a, theta}; }
  static StateSpec two_gaussian(double d) { return TwoGaussianSpec{d}; }
  static StateSpec thermal(double nbar, int cutoff = 0) { return ThermalSpec{nbar, cutoff}; }
};

struct SuperpositionTerm {
  cplx coeff;
  StateSpec spec;
};

StateSpec superposition(std::vector<SuperpositionTerm> terms);

struct WaveFunction {
  QuadratureGrid grid;
  std::vector<cplx> psi;

  double norm2() const;
};

// rho(i, j) = <q_i|rho|q_j>
struct DensityMatrix {
  QuadratureGrid grid;
  ComplexMatrix rho;

  cplx trace() const;
};

WaveFunction build_wavefunction(const StateSpec& spec, const OscillatorFrame& frame,
                                const QuadratureGrid& grid);
DensityMatrix build_density(const StateSpec& spec, const OscillatorFrame& frame,
                            const QuadratureGrid& grid);

DensityMatrix density_from_wavefunction(const WaveFunction& psi);
DensityMatrix mixture(const std::vector<std::pair<double, DensityMatrix>>& parts);

// Hermite functions psi_0..psi_{count-1} sampled on the grid, by the two-term recurrence.
RealMatrix fock_basis(const OscillatorFrame& frame, const QuadratureGrid& grid, int count);

struct FockExpansion {
  std::vector<cplx> coeffs;  // c_n = <n|psi>, n = 0..N-1
  double tail = 0.0;         // 1 - sum |c_n|^2
};

// Throws NumericError when the tail exceeds tail_tol.
FockExpansion fock_coefficients(const WaveFunction& psi, const OscillatorFrame& frame, int n_max,
                                double tail_tol = 1.0);
std::vector<double> fock_populations(const DensityMatrix& rho, const OscillatorFrame& frame,
                                     int n_max);

double purity(const DensityMatrix& rho);
cplx inner_product(const WaveFunction& a, const WaveFunction& b);  // <a|b>

// Normalization of the cat superposition: numerical value and the two closed forms
// {1 + cos(a^2 sin 2t) exp(-2 a sin^2 t)}^(-1/2) and the variant with a^2 in the exponent.
struct CatNormalization {
  double numeric = 0.0;
  double linear_exponent = 0.0;
  double quadratic_exponent = 0.0;
};
CatNormalization cat_normalization(const CatSpec& cat, const OscillatorFrame& frame,
                                   const QuadratureGrid& grid);

// Largest |psi| over the first and last samples.
double edge_amplitude(const WaveFunction& psi);

// Bose-Einstein weights p_n = nbar^n / (1+nbar)^(n+1), n < cutoff.
std::vector<double> thermal_weights(double nbar, int cutoff);
int thermal_cutoff(double nbar, double tail = 1e-10);

}  // namespace phasespace
