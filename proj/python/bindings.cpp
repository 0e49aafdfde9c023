#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasespace/dynamics.hpp"
#include "phasespace/interference.hpp"
#include "phasespace/io.hpp"
#include "phasespace/tomography.hpp"
#include "phasespace/wigner.hpp"

namespace py = pybind11;
using namespace phasespace;

namespace {

template <class T>
py::array_t<T> to_numpy(const Array2<T>& a) {
  py::array_t<T> out({a.rows(), a.cols()});
  std::copy(a.data().begin(), a.data().end(), out.mutable_data());
  return out;
}

template <class T>
py::array_t<T> to_numpy(const std::vector<T>& v) {
  py::array_t<T> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

RealMatrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  RealMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

py::object values(const PhaseSpaceFunction& f) {
  if (!f.is_complex()) return to_numpy(f.re);
  return to_numpy(f.to_complex());
}

PhaseSpaceFunction make_function(const QuadratureGrid& g,
                                 const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                                 Kind kind, double param) {
  RealMatrix m = from_numpy(a);
  if (m.rows() != g.size() || m.cols() != g.size())
    throw std::invalid_argument("array shape does not match the grid");
  PhaseSpaceFunction f(g, kind, param);
  f.re = std::move(m);
  return f;
}

StateSpec as_spec(const py::object& s) {
  if (py::isinstance<py::str>(s)) return parse_state_spec(s.cast<std::string>());
  return s.cast<StateSpec>();
}

}  // namespace

PYBIND11_MODULE(phasespace, m) {
  m.doc() = "Phase-space quasiprobability distributions on a uniform quadrature grid";

  py::register_exception<NumericError>(m, "NumericError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<QuadratureGrid>(m, "Grid")
      .def(py::init<double, double, std::size_t, double>(), py::arg("q_min"), py::arg("q_max"),
           py::arg("n"), py::arg("hbar") = 1.0)
      .def_property_readonly("q_min", &QuadratureGrid::q_min)
      .def_property_readonly("q_max", &QuadratureGrid::q_max)
      .def_property_readonly("n", &QuadratureGrid::size)
      .def_property_readonly("hbar", &QuadratureGrid::hbar)
      .def_property_readonly("dq", &QuadratureGrid::dq)
      .def_property_readonly("dp", &QuadratureGrid::dp)
      .def_property_readonly("q", [](const QuadratureGrid& g) { return to_numpy(g.q_axis()); })
      .def_property_readonly("p", [](const QuadratureGrid& g) { return to_numpy(g.p_axis()); })
      .def("__eq__", &QuadratureGrid::operator==)
      .def("__repr__", [](const QuadratureGrid& g) {
        return "Grid(" + std::to_string(g.q_min()) + ", " + std::to_string(g.q_max()) + ", " +
               std::to_string(g.size()) + ", hbar=" + std::to_string(g.hbar()) + ")";
      });

  py::class_<OscillatorFrame>(m, "Frame")
      .def(py::init([](double mass, double omega, double hbar) {
             OscillatorFrame f{mass, omega, hbar};
             f.validate();
             return f;
           }),
           py::arg("mass") = 1.0, py::arg("omega") = 1.0, py::arg("hbar") = 1.0)
      .def_readonly("mass", &OscillatorFrame::mass)
      .def_readonly("omega", &OscillatorFrame::omega)
      .def_readonly("hbar", &OscillatorFrame::hbar);
  m.def("frame_for", &frame_for, py::arg("grid"), py::arg("mass") = 1.0, py::arg("omega") = 1.0);

  py::enum_<Kind>(m, "Kind")
      .value("Wigner", Kind::Wigner)
      .value("SParam", Kind::SParam)
      .value("Husimi", Kind::Husimi)
      .value("Kirkwood", Kind::Kirkwood)
      .value("Weyl", Kind::Weyl)
      .value("Classical", Kind::Classical);

  py::class_<PhaseSpaceFunction>(m, "PhaseSpaceFunction")
      .def(py::init(&make_function), py::arg("grid"), py::arg("values"),
           py::arg("kind") = Kind::Wigner, py::arg("param") = 0.0)
      .def_readonly("grid", &PhaseSpaceFunction::grid)
      .def_readonly("kind", &PhaseSpaceFunction::kind)
      .def_readonly("param", &PhaseSpaceFunction::param)
      .def_property_readonly("is_complex", &PhaseSpaceFunction::is_complex)
      // rows follow q, columns follow p
      .def_property_readonly("values", &values)
      .def("integral", [](const PhaseSpaceFunction& f) { return integrate_2d(f); });

  py::class_<StateSpec>(m, "StateSpec")
      .def(py::init(&parse_state_spec), py::arg("text"))
      .def_property_readonly("is_pure", &StateSpec::is_pure)
      .def("__repr__", &StateSpec::describe);
  py::implicitly_convertible<std::string, StateSpec>();

  py::class_<WaveFunction>(m, "WaveFunction")
      .def_readonly("grid", &WaveFunction::grid)
      .def_property_readonly("psi", [](const WaveFunction& w) { return to_numpy(w.psi); })
      .def("norm2", &WaveFunction::norm2);
  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def_readonly("grid", &DensityMatrix::grid)
      .def_property_readonly("rho", [](const DensityMatrix& r) { return to_numpy(r.rho); })
      .def("trace", &DensityMatrix::trace);

  m.def(
      "wavefunction",
      [](const py::object& spec, const QuadratureGrid& g, double mass, double omega) {
        return build_wavefunction(as_spec(spec), frame_for(g, mass, omega), g);
      },
      py::arg("spec"), py::arg("grid"), py::arg("mass") = 1.0, py::arg("omega") = 1.0);
  m.def(
      "density",
      [](const py::object& spec, const QuadratureGrid& g, double mass, double omega) {
        return build_density(as_spec(spec), frame_for(g, mass, omega), g);
      },
      py::arg("spec"), py::arg("grid"), py::arg("mass") = 1.0, py::arg("omega") = 1.0);
  m.def("fock_populations", &fock_populations, py::arg("rho"), py::arg("frame"), py::arg("n_max"));

  // ---- quasiprobabilities ----
  m.def("wigner", &wigner_from_wavefunction, py::arg("psi"));
  m.def("wigner", &wigner_from_density, py::arg("rho"));
  m.def(
      "wigner",
      [](const py::object& spec, const QuadratureGrid& g, double mass, double omega) {
        const StateSpec s = as_spec(spec);
        const auto frame = frame_for(g, mass, omega);
        return s.is_pure() ? wigner_from_wavefunction(build_wavefunction(s, frame, g))
                           : wigner_from_density(build_density(s, frame, g));
      },
      py::arg("spec"), py::arg("grid"), py::arg("mass") = 1.0, py::arg("omega") = 1.0);
  m.def("density_from_wigner", &density_from_wigner, py::arg("w"));
  m.def("s_parameterized",
        py::overload_cast<const PhaseSpaceFunction&, double, const OscillatorFrame&>(
            &s_parameterized),
        py::arg("w"), py::arg("s"), py::arg("frame"));
  m.def("s_parameterized", py::overload_cast<const PhaseSpaceFunction&, double>(&s_parameterized),
        py::arg("w"), py::arg("s"));
  m.def("husimi",
        py::overload_cast<const PhaseSpaceFunction&, double, const OscillatorFrame&>(&husimi),
        py::arg("w"), py::arg("zeta"), py::arg("frame"));
  m.def("husimi", py::overload_cast<const PhaseSpaceFunction&, double>(&husimi), py::arg("w"),
        py::arg("zeta") = 1.0);
  m.def("kirkwood", &kirkwood, py::arg("w"), py::arg("b"));
  m.def("weyl_function", &weyl_function, py::arg("w"));

  m.def("marginals", [](const PhaseSpaceFunction& w) {
    const auto mg = marginals(w);
    return py::make_tuple(to_numpy(mg.position), to_numpy(mg.momentum));
  });
  m.def("overlap", &overlap, py::arg("w1"), py::arg("w2"));
  m.def("expectation", &expectation, py::arg("w"), py::arg("a"), py::arg("b"));
  m.def("uncertainty", [](const PhaseSpaceFunction& w) {
    const auto u = uncertainty(w);
    return py::make_tuple(u.dq, u.dp, u.product);
  });
  m.def("negativity_volume", &negativity_volume, py::arg("w"));
  m.def(
      "critical_s",
      [](const PhaseSpaceFunction& w, double step, const OscillatorFrame& frame) -> py::object {
        const auto c = critical_s(w, step, frame);
        if (!c.determined) return py::none();
        return py::make_tuple(c.lower, c.upper);
      },
      py::arg("w"), py::arg("step"), py::arg("frame"));

  // ---- dynamics ----
  m.def(
      "moyal_evolve",
      [](const PhaseSpaceFunction& w, const std::vector<double>& potential, double dt, int steps,
         double mass, bool quantum_terms) {
        const HamiltonianSpec h{mass, PolynomialPotential(potential)};
        return moyal_evolve(w, h, EvolutionConfig{dt, steps, quantum_terms});
      },
      py::arg("w"), py::arg("potential"), py::arg("dt"), py::arg("steps"), py::arg("mass") = 1.0,
      py::arg("quantum_terms") = true);
  m.def(
      "liouville_evolve",
      [](const PhaseSpaceFunction& w, const std::vector<double>& potential, double t,
         double mass) {
        const HamiltonianSpec h{mass, PolynomialPotential(potential)};
        return liouville_evolve(w, h, t);
      },
      py::arg("w"), py::arg("potential"), py::arg("t"), py::arg("mass") = 1.0);
  m.def(
      "apply_symplectic",
      [](const PhaseSpaceFunction& w, double a, double b, double c, double d) {
        return apply_symplectic(w, SymplecticMap2D{a, b, c, d});
      },
      py::arg("w"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));
  m.def("wdf_moments", &wdf_moments, py::arg("w"), py::arg("k_max") = 4);

  // ---- tomography ----
  py::class_<QuadratureHistogram>(m, "QuadratureHistogram")
      .def_readonly("angles", &QuadratureHistogram::angles)
      .def_readonly("x_min", &QuadratureHistogram::x_min)
      .def_readonly("dx", &QuadratureHistogram::dx)
      .def_property_readonly("pr", [](const QuadratureHistogram& h) { return to_numpy(h.pr); });
  m.def("uniform_angles", &uniform_angles, py::arg("n"));
  m.def("radon_project", &radon_project, py::arg("w"), py::arg("angles"));
  m.def(
      "inverse_radon",
      [](const QuadratureHistogram& h, const QuadratureGrid& g, double cutoff) {
        return inverse_radon(h, g, ReconstructionOptions{cutoff});
      },
      py::arg("hist"), py::arg("grid"), py::arg("cutoff_fraction") = 1.0);
  m.def(
      "lossy_detection",
      [](const PhaseSpaceFunction& w, double eta) { return lossy_detection(w, DetectorModel{eta}); },
      py::arg("w"), py::arg("eta"));
  m.def(
      "eight_port_measure",
      [](const PhaseSpaceFunction& w, double t) {
        return eight_port_measure(w, BeamSplitter{t, 1.0 - t});
      },
      py::arg("w"), py::arg("transmittance") = 0.5);

  // ---- interference ----
  m.def(
      "two_gaussian_wdf",
      [](double d, double phase, bool coherent, const QuadratureGrid& g) {
        return two_gaussian_wdf(TwoBeamSpec{d, phase, coherent}, frame_for(g), g);
      },
      py::arg("d"), py::arg("relative_phase"), py::arg("coherent"), py::arg("grid"));
  m.def(
      "mandel_q",
      [](const DensityMatrix& rho, int n_max, double tail_tol) {
        return mandel_q(photon_statistics_exact(rho, frame_for(rho.grid), n_max, tail_tol),
                        tail_tol);
      },
      py::arg("rho"), py::arg("n_max") = 80, py::arg("tail_tol") = 1e-8);
  m.def(
      "g1",
      [](const PhaseSpaceFunction& w, double q1, double q2) { return g1(w, q1, q2); },
      py::arg("w"), py::arg("q1"), py::arg("q2"));
  m.def("visibility", &visibility, py::arg("g1"), py::arg("i1"), py::arg("i2"));

  // ---- files ----
  m.def(
      "save_grid",
      [](const std::string& path, const PhaseSpaceFunction& f) {
        save_grid(path, f, format_for_path(path));
      },
      py::arg("path"), py::arg("f"));
  m.def("load_grid", &load_grid, py::arg("path"));
}
