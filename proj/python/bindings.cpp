#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ewlat/io.hpp"
#include "ewlat/lattice.hpp"
#include "ewlat/shapeopt.hpp"
#include "ewlat/spectrum.hpp"
#include "ewlat/verify.hpp"

namespace py = pybind11;
using namespace ewlat;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Electroweak vortex lattice solver";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<PhysParams>(m, "PhysParams")
      .def_readonly("g", &PhysParams::g)
      .def_readonly("gprime", &PhysParams::gprime)
      .def_readonly("lam", &PhysParams::lambda)
      .def_readonly("n", &PhysParams::n)
      .def_readonly("e", &PhysParams::e)
      .def_readonly("theta", &PhysParams::theta)
      .def_readonly("b_star", &PhysParams::b_star)
      .def_readonly("m_w", &PhysParams::m_w)
      .def_readonly("m_z", &PhysParams::m_z)
      .def_readonly("m_h", &PhysParams::m_h)
      .def("xi_of_b", &PhysParams::xi_of_b)
      .def("mu_of_b", &PhysParams::mu_of_b);

  m.def("from_masses", &from_masses, py::arg("M_W"), py::arg("M_Z"), py::arg("M_H"), py::arg("n") = 1);
  m.def("from_couplings", &from_couplings, py::arg("g"), py::arg("gprime"), py::arg("lam"), py::arg("phi0") = 1.0,
        py::arg("n") = 1);

  m.def(
      "reduce_tau",
      [](cplx tau) {
        const auto [r, mat] = reduce_to_fundamental(tau);
        return py::make_tuple(r, std::vector<int>(mat.begin(), mat.end()));
      },
      py::arg("tau"), "Reduced tau and the SL(2,Z) matrix [a, b, c, d] mapping tau to it.");

  m.def(
      "shape_functions",
      [](const PhysParams& p, cplx tau, int N) {
        const ShapeSample s = shape_at(p, tau, N);
        return py::dict(py::arg("alpha") = s.alpha, py::arg("eta") = s.eta, py::arg("beta") = s.beta);
      },
      py::arg("params"), py::arg("tau"), py::arg("N") = 64);

  m.def(
      "stability",
      [](const PhysParams& p, double b) {
        const StabilityResult r = stability_verdict(p, b);
        return py::make_tuple(std::string(to_string(r.verdict)), r.eigenvalue);
      },
      py::arg("params"), py::arg("b"));

  m.def(
      "landau_levels",
      [](int n, cplx tau, int N, int count) {
        SpectrumOptions opt;
        opt.extrapolate = true;
        return magnetic_laplacian_spectrum(LatticeShape(tau), n, N, count, opt).extrapolated;
      },
      py::arg("n"), py::arg("tau"), py::arg("N") = 32, py::arg("count") = 4);

  m.def(
      "verify",
      [](const std::string& config_json) {
        const RunConfig c = parse_config(nlohmann::json::parse(config_json.empty() ? "{}" : config_json));
        py::list out;
        for (const CheckResult& r : run_verify(c))
          out.append(py::make_tuple(r.module, r.name, r.value, r.tol, r.passed));
        return out;
      },
      py::arg("config_json") = "");
}
