#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "phasespace/dynamics.hpp"
#include "phasespace/wigner.hpp"

using namespace phasespace;

namespace {
constexpr double kPi = std::numbers::pi;
const OscillatorFrame kFrame{};
// +-14 keeps dp = 0.22: rotated and sheared states narrow in p stay resolved
const QuadratureGrid kRot = make_grid(-14, 14, 256);
// dq ~ dp, so structure rotated from q into p stays resolved; dt = 0.005 is inside
// the RK4 stability region
const QuadratureGrid kHarm = make_grid(-14, 14, 128);
const QuadratureGrid kQuartic = make_grid(-6, 6, 128);

HamiltonianSpec harmonic() { return {1.0, PolynomialPotential::harmonic(1.0, 1.0)}; }
HamiltonianSpec free_particle() { return {1.0, PolynomialPotential({0.0})}; }

PhaseSpaceFunction wig(const StateSpec& s, const QuadratureGrid& g) {
  return wigner_from_wavefunction(build_wavefunction(s, kFrame, g));
}

double rms(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) { return rms_difference(a, b); }

PhaseSpaceFunction moyal_for(const PhaseSpaceFunction& w, const HamiltonianSpec& h, double t,
                             double dt, bool quantum = true) {
  const int steps = static_cast<int>(std::lround(t / dt));
  return moyal_evolve(w, h, {t / steps, steps, quantum});
}
}  // namespace

// ---- types ----------------------------------------------------------------

TEST(Hamiltonian, RejectsNonPositiveMass) {
  EXPECT_THROW((HamiltonianSpec{0.0, PolynomialPotential::harmonic(1, 1)}.validate()),
               std::invalid_argument);
  EXPECT_THROW((HamiltonianSpec{-1.0, PolynomialPotential::harmonic(1, 1)}.validate()),
               std::invalid_argument);
  EXPECT_DOUBLE_EQ(harmonic()(1.0, 2.0), 2.5);
}

TEST(Symplectic, FactoriesHaveUnitDeterminant) {
  for (const auto& m : {SymplecticMap2D::rotation(0.7), SymplecticMap2D::shear(1.3),
                        SymplecticMap2D::squeeze(2.5), SymplecticMap2D::harmonic(0.4, 2.0, 1.5)}) {
    EXPECT_NO_THROW(m.validate());
    const auto id = m * m.inverse();
    EXPECT_NEAR(id.a, 1.0, 1e-14);
    EXPECT_NEAR(id.b, 0.0, 1e-14);
    EXPECT_NEAR(id.c, 0.0, 1e-14);
    EXPECT_NEAR(id.d, 1.0, 1e-14);
  }
}

TEST(Symplectic, RejectsNonUnitDeterminant) {
  SymplecticMap2D m{1.0, 0.0, 0.0, 1.0 + 1e-9};
  EXPECT_THROW(m.validate(), std::invalid_argument);
  auto w = wig(StateSpec::fock(0), kRot);
  EXPECT_THROW(apply_symplectic(w, m), std::invalid_argument);
  EXPECT_THROW(SymplecticMap2D::squeeze(0.0), std::invalid_argument);
}

// ---- apply_symplectic ---------------------------------------------------

TEST(ApplySymplectic, IdentityIsIdentity) {
  auto w = wig(StateSpec::cat(1.5, kPi / 2), kRot);
  EXPECT_LT(max_difference(apply_symplectic(w, {}), w), 1e-13);
}

TEST(ApplySymplectic, QuarterTurnSwapsMarginals) {
  auto w = wig(StateSpec::squeezed(cplx(0.8, -0.3), 2.0), kRot);
  auto r = apply_symplectic(w, SymplecticMap2D::rotation(kPi / 2));
  const auto m0 = marginals(w), m1 = marginals(r);
  // (q, p) -> (-p, q): new position density is the old momentum density reflected.
  // The hbar = 1 grid has dq != dp, so compare through linear interpolation on q.
  const auto& g = kRot;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double q = g.q(i);
    const double x = (-q - g.p_min()) / g.dp();
    if (x < 0 || x > static_cast<double>(g.size() - 2)) continue;
    const auto k = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(k);
    const double ref = (1 - f) * m0.momentum[k] + f * m0.momentum[k + 1];
    worst = std::max(worst, std::abs(m1.position[i] - ref));
  }
  EXPECT_LT(worst, 1e-2);  // linear interpolation on dp = 0.22
  // exact check: the rotated state is the squeezed state with rotated parameters
  EXPECT_NEAR(expectation(r, 1, 0), -expectation(w, 0, 1), 1e-10);
  EXPECT_NEAR(expectation(r, 0, 1), expectation(w, 1, 0), 1e-10);
  EXPECT_NEAR(expectation(r, 2, 0), expectation(w, 0, 2), 1e-9);
}

TEST(ApplySymplectic, RotationMatchesRotatedCoherentState) {
  const cplx a(1.0, 0.4);
  for (double th : {0.3, kPi / 2, 2.0, -2.7}) {
    auto r = apply_symplectic(wig(StateSpec::coherent(a), kRot), SymplecticMap2D::rotation(th));
    // phase-space rotation by th is alpha -> alpha e^{i th}
    auto ref = wig(StateSpec::coherent(a * std::polar(1.0, th)), kRot);
    EXPECT_LT(max_difference(r, ref), 1e-9) << th;
  }
}

TEST(ApplySymplectic, SqueezeMatchesSqueezedVacuum) {
  for (double s : {0.5, 2.0, 3.0}) {
    auto w = wig(StateSpec::fock(0), kRot);
    auto r = apply_symplectic(w, SymplecticMap2D::squeeze(1.0 / std::sqrt(s)));
    auto ref = wig(StateSpec::squeezed(0.0, s), kRot);
    EXPECT_LT(max_difference(r, ref), 1e-6) << s;
  }
}

TEST(ApplySymplectic, CompositionAndMoments) {
  const auto m1 = SymplecticMap2D::shear(0.6) * SymplecticMap2D::rotation(0.9);
  const auto m2 = SymplecticMap2D::squeeze(1.3) * SymplecticMap2D::rotation(-0.4);
  auto w = wig(StateSpec::cat(cplx(1.0, 0.3), 0.8), kRot);
  auto once = apply_symplectic(w, m1 * m2);
  auto twice = apply_symplectic(apply_symplectic(w, m2), m1);
  EXPECT_LT(max_difference(once, twice), 1e-8);
  // mass and first moments
  EXPECT_NEAR(integrate_2d(once), integrate_2d(w), 1e-6);
  const auto m = m1 * m2;
  const double q0 = expectation(w, 1, 0), p0 = expectation(w, 0, 1);
  EXPECT_NEAR(expectation(once, 1, 0), m.a * q0 + m.b * p0, 1e-8);
  EXPECT_NEAR(expectation(once, 0, 1), m.c * q0 + m.d * p0, 1e-8);
}

TEST(ApplySymplectic, MomentsAndPurityInvariant) {
  auto w = wig(StateSpec::cat(1.5, kPi / 2), kRot);
  const auto i0 = wdf_moments(w, 4);
  const double pur0 = overlap(w, w);
  for (const auto& m : {SymplecticMap2D::rotation(1.1), SymplecticMap2D::squeeze(1.4),
                        SymplecticMap2D::shear(0.5) * SymplecticMap2D::rotation(-0.6)}) {
    auto r = apply_symplectic(w, m);
    const auto i1 = wdf_moments(r, 4);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(i1[k] / i0[k], 1.0, 1e-6) << k;
    EXPECT_NEAR(overlap(r, r), pur0, 1e-6);
  }
}

// ---- wdf_moments -------------------------------------------------------

TEST(Moments, VacuumValues) {
  auto w = wig(StateSpec::fock(0), kRot);
  const auto ik = wdf_moments(w, 4);
  ASSERT_EQ(ik.size(), 4u);
  // W = exp(-q^2 - p^2)/pi: int W^k = 1/(k pi^(k-1))
  for (int k = 1; k <= 4; ++k) {
    const double ref = k / std::pow(2.0, k - 1) / (k * std::pow(kPi, k - 1)) / (2 * kPi);
    EXPECT_NEAR(ik[k - 1], ref, 1e-12) << k;
  }
  // purity relation: I_2 = Tr(rho^2) / (2 pi hbar) / (2 pi) with Tr(rho^2) = 1
  EXPECT_NEAR(ik[1], 1.0 / (4 * kPi * kPi), 1e-12);
  EXPECT_THROW(wdf_moments(w, 5), std::invalid_argument);
  EXPECT_THROW(wdf_moments(w, 0), std::invalid_argument);
}

// ---- liouville_evolve ----------------------------------------------------

TEST(Liouville, FreeParticleIsShear) {
  auto w = wig(StateSpec::coherent(cplx(0.5, 0.6)), kRot);
  for (double t : {0.5, 1.5}) {
    auto lv = liouville_evolve(w, free_particle(), t);
    auto sh = apply_symplectic(w, SymplecticMap2D::shear(t));
    EXPECT_LT(max_difference(lv, sh), 1e-6) << t;
  }
}

TEST(Liouville, HarmonicIsRotationAndPreservesRange) {
  auto w = wig(StateSpec::fock(2), kRot);
  const double t = 0.8;
  LiouvilleDiagnostics d;
  auto lv = liouville_evolve(w, harmonic(), t, {}, &d);
  auto rot = apply_symplectic(w, SymplecticMap2D::harmonic(t, 1.0, 1.0));
  EXPECT_LT(max_difference(lv, rot), 1e-4);
  EXPECT_LE(max_value(lv), max_value(w) + 1e-3);
  EXPECT_GE(min_value(lv), min_value(w) - 1e-3);
  EXPECT_FALSE(d.warned);
  EXPECT_LT(std::abs(d.mass_loss), 1e-6);
}

TEST(Liouville, ChargesLossWhenLeavingGrid) {
  auto w = wig(StateSpec::coherent(cplx(0.0, 3.0)), kRot);
  LiouvilleDiagnostics d;
  auto lv = liouville_evolve(w, free_particle(), 4.0, {}, &d);
  EXPECT_TRUE(d.warned);
  EXPECT_GT(d.mass_loss, 0.5);
  EXPECT_TRUE(std::isfinite(max_abs(lv)));
}

// ---- moyal_evolve --------------------------------------------------------

TEST(Moyal, HarmonicFullPeriodReturns) {
  for (const auto& s : {StateSpec::coherent(1.0), StateSpec::fock(3), StateSpec::cat(1.2, kPi / 2)}) {
    auto w = wig(s, kHarm);
    auto out = moyal_for(w, harmonic(), 2 * kPi, 0.005);
    EXPECT_LT(rms(out, w), 1e-4) << s.describe();
    EXPECT_NEAR(integrate_2d(out), integrate_2d(w), 1e-6 * 2 * kPi);
  }
}

TEST(Moyal, HarmonicEqualsLiouvilleEqualsRotation) {
  for (const auto& s : {StateSpec::coherent(cplx(1.0, 0.5)), StateSpec::fock(2)}) {
    auto w = wig(s, kHarm);
    for (double t : {0.7, 2.0}) {
      auto my = moyal_for(w, harmonic(), t, 0.005);
      auto lv = liouville_evolve(w, harmonic(), t);
      auto rot = apply_symplectic(w, SymplecticMap2D::harmonic(t, 1.0, 1.0));
      EXPECT_LT(rms(my, rot), 1e-4) << s.describe() << " t=" << t;
      EXPECT_LT(rms(lv, rot), 1e-4) << s.describe() << " t=" << t;
      EXPECT_LT(rms(my, lv), 1e-4) << s.describe() << " t=" << t;
    }
  }
}

TEST(Moyal, QuartcMatchesSplitStepOracle) {
  const HamiltonianSpec h{1.0, PolynomialPotential::quartic(0.25)};
  auto psi = build_wavefunction(StateSpec::squeezed(cplx(0.6, 0.2), 2.0), kFrame, kQuartic);
  const double t = 0.5;
  auto w0 = wigner_from_wavefunction(psi);
  auto oracle = wigner_from_wavefunction(split_step_schrodinger(psi, h, t, 1e-4));
  auto quantum = moyal_for(w0, h, t, 1e-3, true);
  auto classical = moyal_for(w0, h, t, 1e-3, false);
  const double e_q = rms(quantum, oracle), e_c = rms(classical, oracle);
  std::printf("quartic: rms quantum %.3e classical %.3e\n", e_q, e_c);
  EXPECT_LT(e_q, 1e-3);
  EXPECT_GT(e_c, 5 * e_q);
  EXPECT_NEAR(integrate_2d(quantum), integrate_2d(w0), 1e-6 * t);
}

TEST(Moyal, CubicMatchesSplitStepOracle) {
  const HamiltonianSpec h{1.0, PolynomialPotential({0.0, 0.0, 0.5, 0.05})};
  auto psi = build_wavefunction(StateSpec::squeezed(cplx(0.3, 0.4), 2.0), kFrame, kQuartic);
  const double t = 1.0;
  auto w0 = wigner_from_wavefunction(psi);
  auto oracle = wigner_from_wavefunction(split_step_schrodinger(psi, h, t, 1e-4));
  auto quantum = moyal_for(w0, h, t, 1e-3, true);
  EXPECT_LT(rms(quantum, oracle), 1e-3);
}

TEST(Moyal, ClassicalModeIsLiouvilleTransport) {
  const HamiltonianSpec h{1.0, PolynomialPotential::quartic(0.25)};
  auto w0 = wig(StateSpec::squeezed(cplx(0.6, 0.2), 2.0), kQuartic);
  auto classical = moyal_for(w0, h, 0.3, 1e-3, false);
  auto lv = liouville_evolve(w0, h, 0.3, {1e-3, 0});
  EXPECT_LT(rms(classical, lv), 1e-4);
}

TEST(Moyal, EvenPowersOfHbar) {
  // the same unit-width Gaussian W0 evolved at hbar and hbar/2; the discrepancy is
  // measured in the window-independent L2 norm since dp scales with hbar
  const HamiltonianSpec h{1.0, PolynomialPotential::quartic(0.25)};
  double disc[2];
  for (int k = 0; k < 2; ++k) {
    const double hb = k == 0 ? 1.0 : 0.5;
    const auto g = make_grid(-8, 8, 128, hb);
    PhaseSpaceFunction w(g, Kind::Classical);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double q = g.q(i) - 0.8, p = g.p(j) - 0.3;
        w(i, j) = std::exp(-q * q - p * p) / kPi;
      }
    const double t = 0.5;
    disc[k] = l2_distance(moyal_for(w, h, t, 2.5e-4, true), moyal_for(w, h, t, 2.5e-4, false));
  }
  const double ratio = disc[0] / disc[1];
  std::printf("hbar halving ratio %.3f\n", ratio);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(Moyal, RejectsUnstableSteps) {
  auto w = wig(StateSpec::fock(0), kHarm);
  EXPECT_THROW(moyal_evolve(w, harmonic(), {0.05, 10, true}), std::invalid_argument);  // CFL
  EXPECT_THROW(moyal_evolve(w, harmonic(), {0.0, 10, true}), std::invalid_argument);
  EXPECT_THROW(moyal_evolve(w, {0.0, PolynomialPotential::harmonic(1, 1)}, {0.005, 1, true}),
               std::invalid_argument);
  // fine grid: CFL holds but the p-derivative spectrum is outside the RK4 region
  auto wf = wig(StateSpec::fock(0), make_grid(-8, 8, 512));
  const double cfl = 0.03125 / wf.grid.p_max();
  EXPECT_THROW(moyal_evolve(wf, harmonic(), {0.95 * cfl, 1, true}), NumericError);
}

// ---- split_step_schrodinger -----------------------------------------------

TEST(SplitStep, FreeParticleEhrenfest) {
  auto psi = build_wavefunction(StateSpec::coherent(cplx(-1.0, 0.7)), kFrame, make_grid(-10, 10, 256));
  auto mean_q = [](const WaveFunction& f) {
    double s = 0, n = 0;
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
      s += std::norm(f.psi[i]) * f.grid.q(i);
      n += std::norm(f.psi[i]);
    }
    return s / n;
  };
  const double p0 = std::sqrt(2.0) * 0.7;
  const double t = 1.0;
  auto out = split_step_schrodinger(psi, free_particle(), t, 1e-2);
  EXPECT_NEAR(mean_q(out), mean_q(psi) + p0 * t, 1e-6);
  EXPECT_NEAR(out.norm2(), 1.0, 1e-6);
}

TEST(SplitStep, HarmonicCoherentPeriodFidelity) {
  auto psi = build_wavefunction(StateSpec::coherent(cplx(1.0, -0.5)), kFrame, make_grid(-10, 10, 256));
  auto out = split_step_schrodinger(psi, harmonic(), 2 * kPi, 1e-3);
  const double fid = std::norm(inner_product(psi, out));
  EXPECT_GT(fid, 1.0 - 1e-6);
}

TEST(SplitStep, QuarticEnergyConserved) {
  const HamiltonianSpec h{1.0, PolynomialPotential::quartic(0.25)};
  auto psi = build_wavefunction(StateSpec::squeezed(cplx(0.6, 0.2), 2.0), kFrame, kQuartic);
  const double e0 = energy_expectation(psi, h);
  auto out = split_step_schrodinger(psi, h, 1.0, 1e-4);
  EXPECT_NEAR(energy_expectation(out, h), e0, 1e-6);
  EXPECT_NEAR(out.norm2(), psi.norm2(), 1e-6);
}

TEST(SplitStep, HarmonicGroundEnergy) {
  auto psi = build_wavefunction(StateSpec::fock(0), kFrame, kRot);
  EXPECT_NEAR(energy_expectation(psi, harmonic()), 0.5, 1e-10);
  EXPECT_THROW(split_step_schrodinger(psi, harmonic(), 1.0, 0.0), std::invalid_argument);
}
