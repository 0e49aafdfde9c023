#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "phasespace/io.hpp"
#include "phasespace/wigner.hpp"

using namespace phasespace;

namespace {
const OscillatorFrame kFrame{};
const QuadratureGrid kGrid = make_grid(-8, 8, 64);

PhaseSpaceFunction sample_real() {
  return wigner_from_wavefunction(build_wavefunction(StateSpec::cat(2.0, 1.2), kFrame, kGrid));
}

PhaseSpaceFunction sample_complex() {
  auto w = sample_real();
  w.kind = Kind::Weyl;
  w.im = w.re;
  for (double& x : w.im.data()) x = std::sin(1e3 * x) / 3.0;
  w.param = -0.125;
  return w;
}

void expect_bit_equal(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  ASSERT_EQ(a.grid, b.grid);
  EXPECT_EQ(a.kind, b.kind);
  EXPECT_EQ(a.param, b.param);
  ASSERT_EQ(a.is_complex(), b.is_complex());
  EXPECT_EQ(std::memcmp(a.re.data().data(), b.re.data().data(), a.re.size() * sizeof(double)), 0);
  if (a.is_complex())
    EXPECT_EQ(std::memcmp(a.im.data().data(), b.im.data().data(), a.im.size() * sizeof(double)),
              0);
}

std::string io_error_of(auto&& f) {
  try {
    f();
  } catch (const IoError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST(GridBinary, RoundTripIsBitExact) {
  for (const auto& f : {sample_real(), sample_complex()}) {
    std::stringstream ss;
    write_grid_binary(ss, f);
    expect_bit_equal(read_grid_binary(ss), f);
  }
}

TEST(GridBinary, HeaderLayout) {
  std::stringstream ss;
  const auto f = sample_real();
  write_grid_binary(ss, f);
  const std::string b = ss.str();
  ASSERT_EQ(b.size(), 4u + 8u + 5 * 8u + 2u + 8u + 64u * 64u * 8u);
  EXPECT_EQ(b.substr(0, 4), "PSQ1");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 64u);  // little-endian n_q
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[52], 0);  // kind code Wigner
  EXPECT_EQ(b[53], 0);  // real
}

TEST(GridBinary, DiagnosticsCarryOffsets) {
  std::stringstream ss;
  write_grid_binary(ss, sample_real());
  std::string b = ss.str();
  std::string bad = b;
  bad[0] = 'X';
  EXPECT_NE(io_error_of([&] {
              std::istringstream is(bad);
              read_grid_binary(is);
            }).find("offset 0"),
            std::string::npos);
  const std::string cut = b.substr(0, 1000);
  const auto msg = io_error_of([&] {
    std::istringstream is(cut);
    read_grid_binary(is);
  });
  EXPECT_NE(msg.find("truncated"), std::string::npos);
  EXPECT_NE(msg.find("offset 1000"), std::string::npos) << msg;
  std::string kind = b;
  kind[52] = 9;
  EXPECT_NE(io_error_of([&] {
              std::istringstream is(kind);
              read_grid_binary(is);
            }).find("kind"),
            std::string::npos);
  EXPECT_NE(io_error_of([&] {
              std::istringstream is(b + "x");
              read_grid_binary(is);
            }).find("trailing"),
            std::string::npos);
}

TEST(GridCsv, RoundTripWithin17Digits) {
  for (const auto& f : {sample_real(), sample_complex()}) {
    std::stringstream ss;
    write_grid_csv(ss, f);
    // 17 significant digits round-trip doubles exactly
    expect_bit_equal(read_grid_csv(ss), f);
  }
}

TEST(GridCsv, LayoutAndLineDiagnostics) {
  std::stringstream ss;
  write_grid_csv(ss, sample_real());
  std::string text = ss.str();
  EXPECT_EQ(text.rfind("# format=psq-grid\n", 0), 0u);
  EXPECT_NE(text.find("# kind=wigner\n"), std::string::npos);
  // corrupt a value on data row 3 (header is 8 lines, then the p row)
  std::istringstream lines(text);
  std::string line, rebuilt;
  for (int k = 1; std::getline(lines, line); ++k) {
    if (k == 12) line.replace(line.find(',') + 1, 3, "abc");
    rebuilt += line + "\n";
  }
  const auto msg = io_error_of([&] {
    std::istringstream is(rebuilt);
    read_grid_csv(is);
  });
  EXPECT_NE(msg.find("line 12"), std::string::npos) << msg;
  const auto short_msg = io_error_of([&] {
    std::istringstream is(text.substr(0, text.size() / 2));
    read_grid_csv(is);
  });
  EXPECT_NE(short_msg.find("data rows"), std::string::npos) << short_msg;
}

TEST(Pgm, HeaderRangeAndOrientation) {
  const auto f = sample_real();
  std::stringstream ss;
  const auto r = write_pgm(ss, f);
  EXPECT_EQ(r.min, min_value(f));
  EXPECT_EQ(r.max, max_value(f));
  const std::string b = ss.str();
  const std::string head = "P5\n64 64\n255\n";
  ASSERT_EQ(b.substr(0, head.size()), head);
  ASSERT_EQ(b.size(), head.size() + 64u * 64u);
  // the darkest pixel sits at the grid minimum: column i = q index, row = n-1-j
  std::size_t imin = 0, jmin = 0;
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j)
      if (f(i, j) < f(imin, jmin)) imin = i, jmin = j;
  EXPECT_EQ(static_cast<unsigned char>(b[head.size() + (63 - jmin) * 64 + imin]), 0u);
  EXPECT_EQ(pgm_sidecar({-0.5, 0.25}), "min=-0.5 max=0.25\n");
}

TEST(StateFiles, RoundTrips) {
  const auto psi = build_wavefunction(StateSpec::coherent(cplx(1.0, -0.5)), kFrame, kGrid);
  const auto rho = build_density(StateSpec::thermal(0.5), kFrame, make_grid(-12, 12, 64));
  for (const StateData& s : {StateData(psi), StateData(rho)}) {
    for (int csv = 0; csv < 2; ++csv) {
      std::stringstream ss;
      csv ? write_state_csv(ss, s) : write_state_binary(ss, s);
      const StateData back = csv ? read_state_csv(ss) : read_state_binary(ss);
      ASSERT_EQ(back.index(), s.index());
      if (const auto* w = std::get_if<WaveFunction>(&s)) {
        EXPECT_EQ(std::get<WaveFunction>(back).psi, w->psi);
        EXPECT_EQ(std::get<WaveFunction>(back).grid, w->grid);
      } else {
        EXPECT_EQ(std::get<DensityMatrix>(back).rho.data(), std::get<DensityMatrix>(s).rho.data());
      }
    }
  }
}

TEST(StateSpecText, ParsesEveryTag) {
  EXPECT_EQ(parse_state_spec("fock:n=3").describe(), "fock:n=3");
  const auto c = parse_state_spec("coherent:re=1,im=0.5");
  EXPECT_EQ(std::get<CoherentSpec>(c.v).alpha, cplx(1.0, 0.5));
  const auto s = parse_state_spec("squeezed:re=1,im=0,s=3");
  EXPECT_EQ(std::get<SqueezedSpec>(s.v).s, 3.0);
  const auto cat = parse_state_spec("cat:alpha=2,theta=1.5708");
  EXPECT_EQ(std::get<CatSpec>(cat.v).theta, 1.5708);
  EXPECT_EQ(std::get<TwoGaussianSpec>(parse_state_spec("twogauss:d=2").v).d, 2.0);
  const auto th = parse_state_spec("thermal:nbar=1");
  EXPECT_EQ(std::get<ThermalSpec>(th.v).nbar, 1.0);
  EXPECT_FALSE(th.is_pure());
  const auto sup = parse_state_spec("sup:(1)fock:n=0+(0.5+0.5i)coherent:re=1e+0,im=0+(-2i)fock:n=2");
  const auto& terms = std::get<SuperpositionSpec>(sup.v).terms;
  ASSERT_EQ(terms.size(), 3u);
  EXPECT_EQ(terms[0].coeff, cplx(1.0, 0.0));
  EXPECT_EQ(terms[1].coeff, cplx(0.5, 0.5));
  EXPECT_EQ(std::get<CoherentSpec>(terms[1].spec.v).alpha, cplx(1.0, 0.0));
  EXPECT_EQ(terms[2].coeff, cplx(0.0, -2.0));
}

TEST(StateSpecText, RejectsMalformedSpecs) {
  for (const char* bad : {"fock", "fock:n=-1", "fock:n=1.5", "fock:m=1", "squeezed:re=1",
                          "squeezed:s=0", "blob:x=1", "sup:", "sup:(0)fock:n=0",
                          "sup:(1)sup:(1)fock:n=0", "coherent:re=abc", "twogauss:d=-1"})
    EXPECT_THROW(parse_state_spec(bad), std::invalid_argument) << bad;
}

TEST(Potential, ParsesCoefficients) {
  const auto v = parse_potential("0, 0, 0.5, 0.05");
  EXPECT_EQ(v.degree(), 3);
  EXPECT_DOUBLE_EQ(v(2.0), 2.0 + 0.4);
  EXPECT_THROW(parse_potential("1,x"), std::invalid_argument);
}

TEST(Config, FileValuesAndDiagnostics) {
  RunConfig cfg;
  std::istringstream is(
      "# desk grid\nq_min = -10\nq_max = 10  # window\nn_q = 256\nlambda_bar = 0.5\n"
      "seed = 7\ntol.tail = 1e-6\nformat = csv\n");
  apply_config(cfg, is);
  EXPECT_EQ(cfg.q_min, -10.0);
  EXPECT_EQ(cfg.n_q, 256u);
  EXPECT_EQ(cfg.hbar, 0.5);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.tol.at("tail"), 1e-6);
  EXPECT_EQ(cfg.grid(), make_grid(-10, 10, 256, 0.5));
  std::istringstream bad("q_min = -1\nbogus = 3\n");
  RunConfig c2;
  try {
    apply_config(c2, bad, "run.cfg");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:2"), std::string::npos) << e.what();
  }
  std::istringstream noeq("q_min -1\n");
  EXPECT_THROW(apply_config(c2, noeq), IoError);
  RunConfig c3;
  EXPECT_EQ(c3.seed, 0u);
  EXPECT_THROW(apply_config_value(c3, "format", "png"), std::invalid_argument);
  EXPECT_THROW(apply_config_value(c3, "tol.nonexistent", "1"), std::invalid_argument);
}

TEST(Formats, ByExtension) {
  EXPECT_EQ(format_for_path("a.csv"), FileFormat::Csv);
  EXPECT_EQ(format_for_path("a.pgm"), FileFormat::Pgm);
  EXPECT_EQ(format_for_path("a.psq"), FileFormat::Binary);
  EXPECT_EQ(parse_format("bin"), FileFormat::Binary);
  EXPECT_THROW(parse_format("png"), std::invalid_argument);
}
