#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "phasespace/dynamics.hpp"
#include "phasespace/interference.hpp"
#include "phasespace/wigner.hpp"

using namespace phasespace;

namespace {
constexpr double kPi = std::numbers::pi;
const OscillatorFrame kFrame{};
const QuadratureGrid kWide = make_grid(-16, 16, 512);

double w0_of(double d) { return 1.0 / (kPi * (2.0 + 2.0 * std::exp(-d * d))); }

std::size_t node(const QuadratureGrid& g, double q) {
  return static_cast<std::size_t>(std::lround((q - g.q_min()) / g.dq()));
}

std::vector<double> local_maxima(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  std::vector<double> out;
  for (std::size_t k = lo; k <= hi; ++k)
    if (v[k] > v[k - 1] && v[k] > v[k + 1]) out.push_back(static_cast<double>(k));
  return out;
}

// |int M(p) exp(i p y / hbar) dp| of the momentum marginal
double fringe_component(const PhaseSpaceFunction& w, double y) {
  const auto m = marginals(w).momentum;
  std::vector<cplx> f(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double ph = w.grid.p(j) * y / w.grid.hbar();
    f[j] = m[j] * cplx(std::cos(ph), std::sin(ph));
  }
  return std::abs(integrate_1d(std::span<const cplx>(f), w.grid.dp()));
}
}  // namespace

TEST(TwoGaussian, ClosedFormMatchesNumericWdf) {
  for (double d : {0.0, 1.0, 2.0, 3.0}) {
    for (bool coh : {true, false}) {
      const TwoBeamSpec spec{d, 0.0, coh};
      const auto num = two_beam_wdf(spec, kFrame, kWide);
      const auto cf = two_gaussian_wdf(spec, kFrame, kWide);
      EXPECT_LT(rms_difference(num, cf), 1e-6) << "d=" << d << " coherent=" << coh;
      EXPECT_NEAR(integrate_2d(cf), 1.0, 1e-10);
    }
  }
}

TEST(TwoGaussian, PointValuesOfClosedForm) {
  // +-8 window: p node spacing 2 pi / 16 puts pi/8 and pi/4 on the grid
  const auto g = make_grid(-8, 8, 512);
  const double d = 2.0;
  const auto w = two_gaussian_wdf({d, 0.0, true}, kFrame, g);
  const std::size_t i0 = node(g, 0.0);
  const std::size_t n = g.size();
  const double p1 = kPi / (4 * d), p2 = kPi / (2 * d);
  ASSERT_NEAR(g.p(n / 2 + 1), p1, 1e-12);
  ASSERT_NEAR(g.p(n / 2 + 2), p2, 1e-12);
  EXPECT_NEAR(w(i0, n / 2 + 1), w0_of(d) * 2.0 * std::exp(-4.0) * std::exp(-p1 * p1), 1e-15);
  EXPECT_LT(w(i0, n / 2 + 2), -0.1);
}

TEST(TwoGaussian, IncoherentIsNonnegativeAndCoherentIsNot) {
  for (double d : {0.5, 2.0, 3.0}) {
    const auto inc = two_beam_wdf({d, 0.0, false}, kFrame, kWide);
    EXPECT_GE(min_value(inc), -1e-9);
    EXPECT_LT(negativity_volume(inc), 1e-8);
    EXPECT_GE(min_value(two_gaussian_wdf({d, 0.0, false}, kFrame, kWide)), 0.0);
    const double neg = negativity_volume(two_beam_wdf({d, 0.0, true}, kFrame, kWide));
    EXPECT_GT(neg, d >= 2.0 ? 1e-3 : 1e-6) << d;
  }
}

TEST(TwoGaussian, CrossTermIsLocalAndItsIntegralDecays) {
  for (double d : {1.0, 2.0, 3.0}) {
    const auto coh = two_beam_wdf({d, 0.0, true}, kFrame, kWide);
    const auto inc = two_beam_wdf({d, 0.0, false}, kFrame, kWide);
    auto cross = coh;
    const double r = w0_of(d) * 2.0 * kPi;  // outer-term weight relative to the mixture
    for (std::size_t k = 0; k < cross.re.size(); ++k)
      cross.re.data()[k] = coh.re.data()[k] - r * inc.re.data()[k];
    const auto m = marginals(cross).position;
    const std::size_t i0 = node(kWide, 0.0);
    // int cos(2Pd) e^{-P^2} dP = sqrt(pi) e^{-d^2}
    EXPECT_NEAR(m[i0], 2.0 * w0_of(d) * std::sqrt(kPi) * std::exp(-d * d), 1e-9);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (std::abs(m[i]) > std::abs(m[arg])) arg = i;
    EXPECT_EQ(arg, i0);
    // envelope e^{-Q^2} sampled one unit off centre
    EXPECT_NEAR(m[node(kWide, 1.0)] / m[i0], std::exp(-1.0), 1e-6);
  }
}

TEST(Squeezing, ClosedFormValues) {
  const auto z = superposition_squeezing(0.0);
  EXPECT_DOUBLE_EQ(z.var_q, 0.5);
  EXPECT_DOUBLE_EQ(z.var_k, 0.5);
  const double e = std::exp(-1.0);
  const auto s = superposition_squeezing(2.0);
  EXPECT_NEAR(s.var_q, 0.5 + 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(s.var_k, 0.5 - e / (1.0 + e), 1e-15);
  const auto far = superposition_squeezing(8.0);
  EXPECT_LT(far.var_k, 0.5);
  EXPECT_GT(far.var_k, 0.5 - 1e-5);
  EXPECT_THROW(superposition_squeezing(-1.0), std::invalid_argument);
}

TEST(Squeezing, MatchesMomentIntegration) {
  const auto g = make_grid(-16, 16, 1024);
  for (double d : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
    const auto cf = superposition_squeezing(d);
    const auto mm = superposition_moments(d, g);
    EXPECT_NEAR(mm.var_q, cf.var_q, 1e-6) << d;
    EXPECT_NEAR(mm.var_k, cf.var_k, 1e-6) << d;
    if (d > 0.0) EXPECT_LT(mm.var_k, 0.5);
  }
}

TEST(Squeezing, MomentsAgreeWithWignerUncertainty) {
  // the same field is twogauss with half-separation d/2 in Q units
  const double d = 2.0;
  const auto w = wigner_from_wavefunction(
      build_wavefunction(StateSpec::two_gaussian(d / 2), kFrame, kWide));
  const auto u = uncertainty(w);
  const auto cf = superposition_squeezing(d);
  EXPECT_NEAR(u.dq * u.dq, cf.var_q, 1e-6);
  EXPECT_NEAR(u.dp * u.dp, cf.var_k, 1e-6);
}

TEST(Statistics, MandelQForReferenceStates) {
  const int nmax = 60;
  for (int n : {1, 3, 7}) {
    const auto st = photon_statistics_exact(build_wavefunction(StateSpec::fock(n), kFrame, kWide),
                                            kFrame, nmax);
    EXPECT_NEAR(mandel_q(st), -1.0, 1e-8) << n;
  }
  for (double a : {0.7, 1.5, 2.0}) {
    const auto st = photon_statistics_exact(
        build_wavefunction(StateSpec::coherent(a), kFrame, kWide), kFrame, nmax);
    EXPECT_NEAR(mandel_q(st), 0.0, 1e-6) << a;
    EXPECT_NEAR(st.mean(), a * a, 1e-8);
  }
  const auto rho = build_density(StateSpec::thermal(1.0), kFrame, kWide);
  const auto th = photon_statistics_exact(rho, kFrame, nmax);
  EXPECT_NEAR(mandel_q(th), 1.0, 1e-4);
}

TEST(Statistics, MandelQRefusals) {
  const auto vac = photon_statistics_exact(build_wavefunction(StateSpec::fock(0), kFrame, kWide),
                                           kFrame, 10);
  EXPECT_THROW(mandel_q(vac), NumericError);
  PhotonStatistics trunc{{0.5, 0.3}, 2, 0.2};
  EXPECT_THROW(mandel_q(trunc), NumericError);
  const auto psi = build_wavefunction(StateSpec::coherent(3.0), kFrame, kWide);
  EXPECT_THROW(photon_statistics_exact(psi, kFrame, 5), NumericError);
  PhotonStatistics bad{{0.7, 0.6}, 2, 0.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Statistics, ExactCoherentPoissonValue) {
  const auto st = photon_statistics_exact(
      build_wavefunction(StateSpec::coherent(2.0), kFrame, kWide), kFrame, 60);
  const double p4 = 256.0 / 24.0 * std::exp(-4.0);
  EXPECT_NEAR(p4, 0.1954, 1e-4);
  EXPECT_NEAR(st.p[4], p4, 1e-9);
  double sum = 0.0;
  for (double x : st.p) sum += x;
  EXPECT_NEAR(sum + st.tail, 1.0, 1e-12);
  EXPECT_LT(st.tail, 1e-8);
}

TEST(Statistics, SqueezedVacuumHasOnlyEvenPhotonNumbers) {
  const auto g = make_grid(-16, 16, 1024);
  const auto st = photon_statistics_exact(
      build_wavefunction(StateSpec::squeezed(0.0, 3.0), kFrame, g), kFrame, 100, 1e-6);
  for (std::size_t n = 1; n < st.p.size(); n += 2) EXPECT_LT(st.p[n], 1e-10) << n;
  EXPECT_GT(st.p[2], 0.05);
}

TEST(QuadratureS, GaussianMomentOracle) {
  const auto g = make_grid(-10, 10, 512);
  const auto vac = build_wavefunction(StateSpec::fock(0), kFrame, g);
  EXPECT_NEAR(quadrature_s(vac, 0.3, kFrame), 0.0, 1e-9);
  const auto coh = build_wavefunction(StateSpec::coherent(cplx(1.0, 0.5)), kFrame, g);
  EXPECT_NEAR(quadrature_s(coh, 1.1, kFrame), 0.0, 1e-9);
  for (double s : {2.0, 4.0}) {
    const auto sq = build_wavefunction(StateSpec::squeezed(0.0, s), kFrame, g);
    // var Q = 1/(2s), var P = s/2
    EXPECT_NEAR(quadrature_s(sq, 0.0, kFrame), 1.0 / s - 1.0, 1e-9);
    EXPECT_NEAR(quadrature_s(sq, kPi / 2, kFrame), s - 1.0, 1e-9);
    EXPECT_LT(quadrature_s(sq, 0.0, kFrame), 0.0);
  }
  const auto f1 = build_wavefunction(StateSpec::fock(1), kFrame, g);
  EXPECT_NEAR(quadrature_s(f1, 0.7, kFrame), 2.0, 1e-9);
}

TEST(QuadratureS, RefusesLeakingState) {
  const auto g = make_grid(-8, 8, 256);
  WaveFunction psi{g, std::vector<cplx>(g.size(), cplx(0.1, 0.0))};
  EXPECT_THROW(quadrature_s(psi, 0.0, kFrame), NumericError);
}

TEST(Coherence, PureSuperpositionIsFullyCoherent) {
  const double d = 2.0;
  const auto w = two_beam_wdf({d, 0.0, true}, kFrame, kWide);
  const auto g = g1(w, d, -d);
  EXPECT_NEAR(std::abs(g), 1.0, 1e-6);
  EXPECT_NEAR(visibility(g, intensity(w, d), intensity(w, -d)), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(g1(w, 0.5, 0.5) - 1.0), 0.0, 1e-12);
  for (double q1 : {-1.0, 0.25, 1.5})
    for (double q2 : {-2.0, 0.0, 0.75}) EXPECT_LE(std::abs(g1(w, q1, q2)), 1.0 + 1e-8);
}

TEST(Coherence, WignerAndDensityRoutesAgree) {
  const auto psi = build_wavefunction(StateSpec::cat(cplx(1.5, 0.3), 0.6), kFrame, kWide);
  const auto rho = density_from_wavefunction(psi);
  const auto w = wigner_from_wavefunction(psi);
  const double h = kWide.dq();
  // even and odd index sums, so on-grid and half-sample midpoints
  const std::pair<double, double> pts[] = {{0.0, 1.0}, {-1.0, 2.0 + h}, {0.5 - h, -0.75}};
  for (auto [a, b] : pts) {
    const cplx gw = g1(w, a, b), gr = g1(rho, a, b);
    EXPECT_NEAR(std::abs(gw - gr), 0.0, 1e-6) << a << "," << b;
  }
}

TEST(Coherence, IncoherentMixtureShowsNoFringes) {
  const double d = 3.0;
  const auto w = two_beam_wdf({d, 0.0, false}, kFrame, kWide);
  const auto g = g1(w, d, -d);
  EXPECT_LT(std::abs(g), 1e-6);
  EXPECT_LT(visibility(g, intensity(w, d), intensity(w, -d)), 1e-6);
}

TEST(Coherence, ZeroIntensityAndOffGridPointsThrow) {
  const auto w = two_beam_wdf({1.0, 0.0, true}, kFrame, kWide);
  EXPECT_THROW(g1(w, 11.5, 0.0), NumericError);
  EXPECT_THROW(g1(w, 0.01, 0.0), std::invalid_argument);
  EXPECT_THROW(visibility(1.0, 0.0, 1.0), NumericError);
  EXPECT_NEAR(visibility(0.5, 1.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(visibility(1.0, 1.0, 4.0), 0.8, 1e-15);
}

TEST(WhichPath, NoKickIsIdentity) {
  const auto w = two_beam_wdf({1.5, 0.0, true}, kFrame, kWide);
  const auto m = MomentumTransferModel::no_kick(kWide);
  EXPECT_LT(max_difference(which_path_filter(w, m), w), 1e-13);
  EXPECT_NEAR(std::abs(visibility_after_transfer(m, 2.0) - 1.0), 0.0, 1e-12);
}

TEST(WhichPath, FilterPreservesPositionMarginal) {
  const auto w = two_beam_wdf({1.0, 0.0, true}, kFrame, kWide);
  for (double s : {0.3, 1.0}) {
    const auto f = which_path_filter(w, MomentumTransferModel::gaussian_kick(kWide, s));
    const auto a = marginals(w).position, b = marginals(f).position;
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    EXPECT_LT(e, 1e-10) << s;
  }
}

TEST(WhichPath, GaussianKickVisibilitySweep) {
  const double sep = 2.0;
  for (int k = 0; k < 10; ++k) {
    const double s = 0.3 + 0.1 * k;
    const cplx v = visibility_after_transfer(MomentumTransferModel::gaussian_kick(kWide, s), sep);
    EXPECT_NEAR(std::abs(v), std::exp(-s * s * sep * sep / 2.0), 1e-4) << s;
    EXPECT_LE(std::abs(v), 1.0 + 1e-8);
    const double kk = which_way_knowledge(v);
    EXPECT_LE(std::norm(v) + kk * kk, 1.0 + 1e-6);
  }
}

TEST(WhichPath, FringeContrastOfFilteredWdfMatchesVisibility) {
  // beams at Q = +-1, so the slit separation is 2
  const double sep = 2.0;
  const auto w = two_beam_wdf({sep / 2, 0.0, true}, kFrame, kWide);
  const double base = fringe_component(w, sep);
  for (double s : {0.4, 0.8}) {
    const auto m = MomentumTransferModel::gaussian_kick(kWide, s);
    const double ratio = fringe_component(which_path_filter(w, m), sep) / base;
    EXPECT_NEAR(ratio, std::abs(visibility_after_transfer(m, sep)), 1e-3) << s;
  }
}

TEST(WhichPath, PerfectWhichPathDeviceErasesFringes) {
  const auto m = MomentumTransferModel::flat_kick(kWide, 1e9);
  EXPECT_LT(std::abs(visibility_after_transfer(m, 2.0)), 1e-3);
  const auto wide = MomentumTransferModel::flat_kick(kWide, 20.0);
  EXPECT_LT(std::abs(visibility_after_transfer(wide, 2.0)), 0.05);
}

TEST(AharonovBohm, ZeroPhaseIsIdentity) {
  const TwoBeamSpec spec{2.0, 0.0, true};
  EXPECT_LT(max_difference(aharonov_bohm_shift(spec, 0.0, kFrame, kWide),
                           two_beam_wdf(spec, kFrame, kWide)),
            1e-15);
  EXPECT_THROW(aharonov_bohm_shift({2.0, 0.0, false}, 1.0, kFrame, kWide), std::invalid_argument);
}

TEST(AharonovBohm, OnlyCrossTermMoves) {
  const TwoBeamSpec spec{2.0, 0.0, true};
  auto avg = [&](double phi) {
    auto a = aharonov_bohm_shift(spec, phi, kFrame, kWide);
    const auto b = aharonov_bohm_shift(spec, phi + kPi, kFrame, kWide);
    for (std::size_t k = 0; k < a.re.size(); ++k)
      a.re.data()[k] = 0.5 * (a.re.data()[k] + b.re.data()[k]);
    return a;
  };
  const auto auto0 = avg(0.0);
  for (double phi : {0.7, 1.3, 2.9}) {
    EXPECT_LT(max_difference(avg(phi), auto0), 1e-8) << phi;
    const auto num = aharonov_bohm_shift(spec, phi, kFrame, kWide);
    const auto cf = two_gaussian_wdf({spec.d, phi, true}, kFrame, kWide);
    EXPECT_LT(rms_difference(num, cf), 1e-6) << phi;
  }
  // the outer terms alone are the closed-form outer terms
  auto outer = two_gaussian_wdf({spec.d, 0.0, false}, kFrame, kWide);
  const double r = w0_of(spec.d) * 2.0 * kPi;
  for (double& x : outer.re.data()) x *= r;
  EXPECT_LT(rms_difference(auto0, outer), 1e-6);
}

TEST(AharonovBohm, HalfTurnFlipsFringes) {
  const TwoBeamSpec spec{2.0, 0.0, true};
  const auto w0 = aharonov_bohm_shift(spec, 0.0, kFrame, kWide);
  const auto wpi = aharonov_bohm_shift(spec, kPi, kFrame, kWide);
  double e = 0.0, crossmax = 0.0;
  for (std::size_t k = 0; k < w0.re.size(); ++k) {
    const double a = 0.5 * (w0.re.data()[k] + wpi.re.data()[k]);
    const double c0 = w0.re.data()[k] - a, c1 = wpi.re.data()[k] - a;
    e = std::max(e, std::abs(c0 + c1));
    crossmax = std::max(crossmax, std::abs(c0));
  }
  EXPECT_LT(e, 1e-8);
  EXPECT_GT(crossmax, 0.05);
  // p-marginal: maximum at p = 0 becomes a minimum
  const auto m0 = marginals(w0).momentum, m1 = marginals(wpi).momentum;
  const std::size_t j0 = kWide.size() / 2;
  EXPECT_GT(m0[j0], m0[j0 + 3]);
  EXPECT_LT(m1[j0], m1[j0 + 3]);
  EXPECT_GT(m0[j0], m1[j0]);
}

TEST(AharonovBohm, PositionEnvelopeFixedBehindSlitsAndFringesMoveAfterPropagation) {
  const TwoBeamSpec spec{4.0, 0.0, true};
  const auto a = aharonov_bohm_shift(spec, 0.0, kFrame, kWide);
  const auto b = aharonov_bohm_shift(spec, kPi, kFrame, kWide);
  const auto ma = marginals(a).position, mb = marginals(b).position;
  double e = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) e = std::max(e, std::abs(ma[i] - mb[i]));
  // the two cross terms differ by sign; each integrates over p to 2 W0 sqrt(pi) e^{-d^2}
  EXPECT_LT(e, 4.0 * w0_of(spec.d) * std::sqrt(kPi) * std::exp(-16.0) * 1.01);

  const TwoBeamSpec near{1.5, 0.0, true};
  const auto fa = apply_symplectic(aharonov_bohm_shift(near, 0.0, kFrame, kWide),
                                   SymplecticMap2D::shear(2.0));
  const auto fb = apply_symplectic(aharonov_bohm_shift(near, kPi, kFrame, kWide),
                                   SymplecticMap2D::shear(2.0));
  const auto qa = marginals(fa).position, qb = marginals(fb).position;
  const std::size_t i0 = node(kWide, 0.0);
  EXPECT_GT(qa[i0] - qb[i0], 0.05);
}

TEST(AreaOverlap, CoherentSingleRegionTracksPoisson) {
  const double a = 4.0;
  for (int n = 12; n <= 20; ++n) {
    const auto est = area_overlap_estimate(n, StateSpec::coherent(a));
    const double exact = std::pow(a * a, n) * std::exp(-a * a) / std::tgamma(n + 1.0);
    EXPECT_EQ(est.regions, 1);
    EXPECT_EQ(est.phase, 0.0);
    EXPECT_NEAR(est.p / exact, 1.0, 0.25) << n;
    EXPECT_LT(est.resolution_error, 0.05 * est.area);
  }
  EXPECT_EQ(area_overlap_estimate(80, StateSpec::coherent(a)).p, 0.0);
}

TEST(AreaOverlap, BandsTileTheDisc) {
  double sum = 0.0;
  for (int n = 0; n < 60; ++n) sum += area_overlap_estimate(n, StateSpec::coherent(3.0)).p;
  EXPECT_NEAR(sum, 1.0, 1e-3);
}

TEST(AreaOverlap, SqueezedVacuumParity) {
  for (int n = 0; n < 20; ++n) {
    const auto est = area_overlap_estimate(n, StateSpec::squeezed(0.0, 25.0));
    EXPECT_EQ(est.regions, 2);
    if (n % 2) EXPECT_LT(est.p, 1e-4) << n;
    else EXPECT_GT(est.p, 1e-3) << n;
  }
}

TEST(AreaOverlap, DisplacedSqueezedPeaksMatchExact) {
  const double s = 25.0, a = 0.5;
  const auto g = make_grid(-16, 16, 1024);
  const auto st = photon_statistics_exact(
      build_wavefunction(StateSpec::squeezed(a, s), kFrame, g), kFrame, 100, 1e-2);
  // bands reached by the ellipse tip sqrt(2 s) on both sides of the window checked
  const std::size_t hi = 23;
  std::vector<double> est(hi + 2);
  for (std::size_t n = 0; n < est.size(); ++n)
    est[n] = area_overlap_estimate(static_cast<int>(n), StateSpec::squeezed(a, s)).p;
  EXPECT_EQ(local_maxima(est, 1, hi), local_maxima(st.p, 1, hi));
  for (std::size_t n = 1; n <= hi; ++n)
    if (st.p[n] < 1e-3) EXPECT_LT(est[n], 5e-3) << n;
}

TEST(AreaOverlap, Refusals) {
  EXPECT_THROW(area_overlap_estimate(3, StateSpec::fock(2)), std::invalid_argument);
  EXPECT_THROW(area_overlap_estimate(3, StateSpec::squeezed(cplx(0.0, 1.0), 4.0)),
               std::invalid_argument);
  EXPECT_THROW(area_overlap_estimate(3, StateSpec::coherent(1.0), 256), std::invalid_argument);
  EXPECT_THROW(area_overlap_estimate(-1, StateSpec::coherent(1.0)), std::invalid_argument);
}
