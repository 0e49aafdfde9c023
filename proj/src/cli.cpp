#include "phasespace/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "phasespace/dynamics.hpp"
#include "phasespace/interference.hpp"
#include "phasespace/io.hpp"
#include "phasespace/tomography.hpp"
#include "phasespace/wigner.hpp"

namespace phasespace {

namespace {

struct Globals {
  std::string config;
  double q_min = 0, q_max = 0, hbar = 0, mass = 0, omega = 0;
  std::size_t n_q = 0;
  std::uint64_t seed = 0;
  std::string output, format;
  std::vector<std::string> tol;
};

struct GlobalOptions {
  CLI::Option *config, *q_min, *q_max, *n_q, *hbar, *mass, *omega, *seed, *output, *format, *tol;
};

RunConfig make_config(const Globals& g, const GlobalOptions& o) {
  RunConfig cfg;
  if (o.config->count()) {
    std::ifstream is(g.config);
    if (!is) throw IoError("cannot open config '" + g.config + "'");
    apply_config(cfg, is, g.config);
  }
  if (o.q_min->count()) cfg.q_min = g.q_min;
  if (o.q_max->count()) cfg.q_max = g.q_max;
  if (o.n_q->count()) cfg.n_q = g.n_q;
  if (o.hbar->count()) cfg.hbar = g.hbar;
  if (o.mass->count()) cfg.mass = g.mass;
  if (o.omega->count()) cfg.omega = g.omega;
  if (o.seed->count()) cfg.seed = g.seed;
  if (o.output->count()) cfg.output = g.output;
  if (o.format->count()) {
    parse_format(g.format);
    cfg.format = g.format;
  }
  for (const auto& t : g.tol) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--tol expects name=value");
    apply_config_value(cfg, "tol." + t.substr(0, eq), t.substr(eq + 1));
  }
  return cfg;
}

const std::string& need_output(const RunConfig& cfg) {
  if (cfg.output.empty()) throw std::invalid_argument("no output path (use -o or 'output =')");
  return cfg.output;
}

FileFormat output_format(const RunConfig& cfg) {
  return cfg.format.empty() ? format_for_path(cfg.output) : parse_format(cfg.format);
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

// A state file if the path exists, otherwise a state spec built on the configured grid.
StateData state_input(const std::string& input, const RunConfig& cfg) {
  if (std::filesystem::exists(input)) return load_state(input);
  const StateSpec spec = parse_state_spec(input);
  if (spec.is_pure()) return build_wavefunction(spec, cfg.frame(), cfg.grid());
  return build_density(spec, cfg.frame(), cfg.grid());
}

PhaseSpaceFunction wigner_of(const StateData& s) {
  if (const auto* w = std::get_if<WaveFunction>(&s)) return wigner_from_wavefunction(*w);
  return wigner_from_density(std::get<DensityMatrix>(s));
}

const QuadratureGrid& grid_of(const StateData& s) {
  if (const auto* w = std::get_if<WaveFunction>(&s)) return w->grid;
  return std::get<DensityMatrix>(s).grid;
}

OscillatorFrame frame_on(const RunConfig& cfg, const QuadratureGrid& g) {
  OscillatorFrame f{cfg.mass, cfg.omega, g.hbar()};
  f.validate();
  return f;
}

double value_at_origin(const PhaseSpaceFunction& w) {
  const auto& g = w.grid;
  const std::size_t n = g.size();
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = w.re(i, n / 2);
  return cubic_interpolate(col, g.q_min(), g.dq(), 0.0);
}

std::string analysis_report(const std::string& source, const PhaseSpaceFunction& w,
                            const DensityMatrix* rho, const RunConfig& cfg,
                            const std::string& potential, const double* energy, int fock_max,
                            double* normalization) {
  std::ostringstream os;
  const auto& g = w.grid;
  const OscillatorFrame frame = frame_on(cfg, g);
  os << "source = " << source << "\n"
     << "kind = " << kind_name(w.kind) << "\n"
     << "grid = q[" << num(g.q_min()) << ", " << num(g.q_max()) << ") n=" << g.size()
     << " hbar=" << num(g.hbar()) << "\n";
  const double norm = integrate_2d(w);
  *normalization = norm;
  os << "normalization = " << num(norm) << "\n";
  if (w.is_complex()) return os.str();
  os << "min = " << num(min_value(w)) << "\n"
     << "max = " << num(max_value(w)) << "\n"
     << "W(0,0) = " << num(value_at_origin(w)) << "\n";
  if (w.kind != Kind::Wigner) return os.str();
  os << "purity = " << num(overlap(w, w)) << "\n";
  try {
    const auto u = uncertainty(w);
    os << "delta_q = " << num(u.dq) << "\n"
       << "delta_p = " << num(u.dp) << "\n"
       << "delta_q_delta_p = " << num(u.product) << "\n";
  } catch (const NumericError& e) {
    os << "delta_q = unavailable (" << e.what() << ")\n";
  }
  os << "negativity_volume = " << num(negativity_volume(w)) << "\n";
  const auto ik = wdf_moments(w, 4);
  for (std::size_t k = 0; k < ik.size(); ++k) os << "I_" << k + 1 << " = " << num(ik[k]) << "\n";
  try {
    const DensityMatrix r = rho ? *rho : density_from_wigner(w);
    const auto st = photon_statistics_exact(r, frame, fock_max, cfg.tol.at("tail"));
    os << "mean_n = " << num(st.mean()) << "\n"
       << "mandel_q = " << num(mandel_q(st, cfg.tol.at("tail"))) << "\n";
  } catch (const std::exception& e) {  // NumericError, or populations of an unnormalized input
    os << "mandel_q = unavailable (" << e.what() << ")\n";
  }
  const auto sc = critical_s(w, 0.01, frame);
  if (sc.determined)
    os << "s_c = " << num(sc.value()) << " [" << num(sc.lower) << ", " << num(sc.upper) << "]\n";
  else
    os << "s_c = none (W is nonnegative)\n";
  const HamiltonianSpec h{cfg.mass, potential.empty()
                                        ? PolynomialPotential::harmonic(cfg.mass, cfg.omega)
                                        : parse_potential(potential)};
  double e = 0.0;
  if (energy) {
    e = *energy;
  } else {
    RealMatrix hw(g.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) hw(i, j) = h(g.q(i), g.p(j)) * w.re(i, j);
    e = integrate_2d(hw, g.dq(), g.dp());
  }
  const auto res = stationary_residuals(w, h.potential, e, h.mass);
  os << "energy = " << num(e) << "\n"
     << "residual_1 = " << num(res.r1) << "\n"
     << "residual_2 = " << num(res.r2) << "\n";
  return os.str();
}

void write_probe_csv(const std::string& path, const RingResult& r) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  double tail = 0.0;
  for (double t : r.tail.data()) tail = std::max(tail, t);
  os << "# format=psq-probe\n# kind=ring\n# max_tail=" << std::setprecision(17) << tail
     << "\n# insufficient=" << r.insufficient.size() << "\n";
  for (std::size_t j = 0; j < r.p0.size(); ++j) os << (j ? "," : "") << r.p0[j];
  os << "\n";
  for (std::size_t i = 0; i < r.q0.size(); ++i) {
    os << r.q0[i];
    for (std::size_t j = 0; j < r.p0.size(); ++j) os << "," << r.w(i, j);
    os << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"psq: phase-space quantum toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  GlobalOptions o{};
  o.config = app.add_option("--config", g.config, "key = value configuration file");
  o.q_min = app.add_option("--q-min", g.q_min, "grid start");
  o.q_max = app.add_option("--q-max", g.q_max, "grid end (exclusive)");
  o.n_q = app.add_option("--n-q", g.n_q, "grid size, power of two");
  o.hbar = app.add_option("--hbar,--lambda-bar", g.hbar, "reduced Planck constant");
  o.mass = app.add_option("--mass", g.mass, "oscillator mass");
  o.omega = app.add_option("--omega", g.omega, "oscillator frequency");
  o.seed = app.add_option("--seed", g.seed, "seed for sampling");
  o.output = app.add_option("-o,--output", g.output, "output path");
  o.format = app.add_option("--format", g.format, "csv | bin | pgm (default: by extension)");
  o.tol = app.add_option("--tol", g.tol, "tolerance override name=value (tail, norm)");

  std::string input, potential, reference, report;
  double s_param = 0.0, zeta = 0.0, b_param = 0.0, t_end = 0.0, dt = 0.0, cutoff = 1.0;
  double eta = 1.0, trans = 0.5, energy = 0.0;
  bool weyl = false, classical = false, liouville = false, ring = false, density = false,
       check = false;
  std::size_t angles = 0, counts = 0, stride = 16;
  int n_fock = 64, fock_max = 80;

  auto* c_state = app.add_subcommand("state", "build a wavefunction or density file");
  c_state->add_option("spec", input, "state spec, e.g. fock:n=1")->required();
  c_state->add_flag("--density", density, "write a density matrix even for pure states");

  auto* c_wig = app.add_subcommand("wigner", "phase-space function of a state");
  c_wig->add_option("input", input, "state file or state spec")->required();
  auto* o_s = c_wig->add_option("--s", s_param, "s-ordered function");
  auto* o_z = c_wig->add_option("--zeta", zeta, "Husimi function with squeeze zeta");
  auto* o_b = c_wig->add_option("--b", b_param, "b-ordered (Kirkwood) function");
  auto* o_w = c_wig->add_flag("--weyl", weyl, "Weyl (ambiguity) function");
  o_s->excludes(o_z)->excludes(o_b)->excludes(o_w);
  o_z->excludes(o_b)->excludes(o_w);
  o_b->excludes(o_w);

  auto* c_evo = app.add_subcommand("evolve", "propagate a Wigner grid");
  c_evo->add_option("input", input, "grid file")->required();
  c_evo->add_option("--potential", potential, "c0,c1,... of V(q)")->required();
  c_evo->add_option("--t", t_end, "final time")->required();
  c_evo->add_option("--dt", dt, "time step")->required();
  auto* o_cl = c_evo->add_flag("--classical", classical, "drop the hbar correction terms");
  auto* o_li = c_evo->add_flag("--liouville", liouville, "transport along classical characteristics");
  o_cl->excludes(o_li);

  auto* c_proj = app.add_subcommand("project", "quadrature histograms of a grid");
  c_proj->add_option("input", input, "grid file")->required();
  c_proj->add_option("--angles", angles, "number of uniform angles on [0, pi)")->required();
  c_proj->add_option("--counts", counts, "resample each slice with this many events");

  auto* c_rec = app.add_subcommand("reconstruct", "filtered backprojection of a histogram");
  c_rec->add_option("input", input, "histogram csv")->required();
  c_rec->add_option("--cutoff", cutoff, "Hann cutoff as a fraction of Nyquist");

  auto* c_meas = app.add_subcommand("measure", "detector models");
  c_meas->add_option("input", input, "grid file (state file or spec for --ring)")->required();
  auto* o_eta = c_meas->add_option("--eta", eta, "homodyne efficiency");
  auto* o_t = c_meas->add_option("--T", trans, "eight-port transmittance");
  auto* o_r = c_meas->add_flag("--ring", ring, "displaced-parity sampling");
  c_meas->add_option("--stride", stride, "probe every stride-th node (ring)");
  c_meas->add_option("--n-fock", n_fock, "Fock cutoff (ring)");
  o_eta->excludes(o_t)->excludes(o_r);
  o_t->excludes(o_r);

  auto* c_an = app.add_subcommand("analyze", "text report of a grid or state file");
  c_an->add_option("input", input, "grid or state file")->required();
  c_an->add_option("--report", report, "write the report here instead of stdout");
  c_an->add_option("--potential", potential, "c0,c1,... for the stationary residuals");
  auto* o_en = c_an->add_option("--energy", energy, "energy for the residuals (default <H>)");
  c_an->add_option("--reference", reference, "grid file to compare against");
  c_an->add_option("--fock-max", fock_max, "Fock cutoff for photon statistics");
  c_an->add_flag("--check", check, "exit 2 if normalization misses tol.norm");

  auto* c_ren = app.add_subcommand("render", "PGM image of a grid file");
  c_ren->add_option("input", input, "grid file")->required();

  std::vector<std::string> argv_s{"psq"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = make_config(g, o);
    if (c_state->parsed()) {
      const StateSpec spec = parse_state_spec(input);
      const StateData s = (spec.is_pure() && !density)
                              ? StateData(build_wavefunction(spec, cfg.frame(), cfg.grid()))
                              : StateData(build_density(spec, cfg.frame(), cfg.grid()));
      save_state(need_output(cfg), s, output_format(cfg));
    } else if (c_wig->parsed()) {
      const StateData s = state_input(input, cfg);
      const OscillatorFrame frame = frame_on(cfg, grid_of(s));
      PhaseSpaceFunction w = wigner_of(s);
      if (o_s->count()) w = s_parameterized(w, s_param, frame);
      if (o_z->count()) w = husimi(w, zeta, frame);
      if (o_b->count()) w = kirkwood(w, b_param);
      if (weyl) w = weyl_function(w);
      save_grid(need_output(cfg), w, output_format(cfg));
    } else if (c_evo->parsed()) {
      const auto w = load_grid(input);
      const HamiltonianSpec h{cfg.mass, parse_potential(potential)};
      if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("need dt > 0 and t >= 0");
      const long steps = std::lround(t_end / dt);
      if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
        throw std::invalid_argument("t must be a whole number of dt steps");
      PhaseSpaceFunction res;
      if (liouville) {
        LiouvilleDiagnostics diag;
        res = liouville_evolve(w, h, t_end, LiouvilleOptions{dt, 0}, &diag);
        if (diag.warned) err << "warning: mass loss " << diag.mass_loss << " through the window edge\n";
      } else {
        res = moyal_evolve(w, h, EvolutionConfig{dt, static_cast<int>(steps), !classical});
      }
      save_grid(need_output(cfg), res, output_format(cfg));
    } else if (c_proj->parsed()) {
      const auto w = load_grid(input);
      auto hist = radon_project(w, uniform_angles(angles));
      if (counts > 0) hist = sample_histogram(hist, counts, cfg.seed);
      std::ofstream os(need_output(cfg));
      if (!os) throw IoError("cannot write '" + cfg.output + "'");
      write_histogram_csv(os, hist);
    } else if (c_rec->parsed()) {
      std::ifstream is(input);
      if (!is) throw IoError("cannot open '" + input + "'");
      QuadratureHistogram hist;
      try {
        hist = read_histogram_csv(is);
      } catch (const std::invalid_argument& e) {
        throw IoError(input + ": " + e.what());
      }
      ReconstructionDiagnostics diag;
      const auto w = inverse_radon(hist, cfg.grid(), ReconstructionOptions{cutoff}, &diag);
      if (diag.warned) err << "warning: " << diag.message << "\n";
      save_grid(need_output(cfg), w, output_format(cfg));
    } else if (c_meas->parsed()) {
      if (ring) {
        const StateData s = state_input(input, cfg);
        const auto* psi = std::get_if<WaveFunction>(&s);
        if (!psi) throw std::invalid_argument("--ring needs a pure state");
        if (stride == 0) throw std::invalid_argument("--stride must be >= 1");
        const OscillatorFrame frame = frame_on(cfg, psi->grid);
        std::vector<double> q0s, p0s;
        const double scale = frame.hbar * frame.kappa() * frame.kappa();
        for (std::size_t i = 0; i < psi->grid.size(); i += stride) {
          q0s.push_back(psi->grid.q(i));
          p0s.push_back(scale * psi->grid.q(i));
        }
        const auto r = ring_method(*psi, frame, q0s, p0s, n_fock);
        if (!r.insufficient.empty())
          err << "warning: Fock cutoff " << n_fock << " leaves tail > 1e-8 at "
              << r.insufficient.size() << " probe points\n";
        write_probe_csv(need_output(cfg), r);
      } else {
        const auto w = load_grid(input);
        const OscillatorFrame frame = frame_on(cfg, w.grid);
        PhaseSpaceFunction res;
        if (o_t->count())
          res = eight_port_measure(w, BeamSplitter{trans, 1.0 - trans}, frame);
        else if (o_eta->count())
          res = lossy_detection(w, DetectorModel{eta}, frame);
        else
          throw std::invalid_argument("measure needs one of --eta, --T, --ring");
        save_grid(need_output(cfg), res, output_format(cfg));
      }
    } else if (c_an->parsed()) {
      PhaseSpaceFunction w;
      DensityMatrix rho;
      bool have_rho = false;
      if (is_grid_file(input)) {
        w = load_grid(input);
      } else {
        const StateData s = load_state(input);
        w = wigner_of(s);
        rho = std::holds_alternative<DensityMatrix>(s)
                  ? std::get<DensityMatrix>(s)
                  : density_from_wavefunction(std::get<WaveFunction>(s));
        have_rho = true;
      }
      double norm = 0.0;
      std::string text = analysis_report(input, w, have_rho ? &rho : nullptr, cfg, potential,
                                         o_en->count() ? &energy : nullptr, fock_max, &norm);
      if (!reference.empty()) {
        const auto ref = load_grid(reference);
        if (ref.grid != w.grid) {
          std::ostringstream os;
          os << "grid mismatch: " << input << " has q[" << w.grid.q_min() << ", "
             << w.grid.q_max() << ") n=" << w.grid.size() << " hbar=" << w.grid.hbar() << ", "
             << reference << " has q[" << ref.grid.q_min() << ", " << ref.grid.q_max()
             << ") n=" << ref.grid.size() << " hbar=" << ref.grid.hbar();
          throw std::invalid_argument(os.str());
        }
        text += "reference = " + reference + "\n";
        text += "rms_difference = " + num(rms_difference(w, ref)) + "\n";
        text += "max_difference = " + num(max_difference(w, ref)) + "\n";
      }
      if (report.empty()) {
        out << text;
      } else {
        std::ofstream os(report);
        if (!os) throw IoError("cannot write '" + report + "'");
        os << text;
      }
      if (check && std::abs(norm - 1.0) > cfg.tol.at("norm")) {
        std::ostringstream os;
        os << "normalization " << norm << " misses 1 by more than " << cfg.tol.at("norm");
        throw NumericError(os.str());
      }
    } else if (c_ren->parsed()) {
      save_grid(need_output(cfg), load_grid(input), FileFormat::Pgm);
    }
  } catch (const IoError& e) {
    err << "psq: i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    err << "psq: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "psq: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "psq: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace phasespace
