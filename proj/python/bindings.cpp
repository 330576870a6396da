#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delyap/config.hpp"
#include "delyap/ddesim.hpp"
#include "delyap/errors.hpp"
#include "delyap/odec.hpp"
#include "delyap/spectrum.hpp"

namespace py = pybind11;
using namespace delyap;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Delay Lyapunov matrices for systems with a distributed delay";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SpectrumConditionViolated>(m, "SpectrumConditionViolated",
                                                    error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<SimulationBlowUp>(m, "SimulationBlowUp", error.ptr());

  py::class_<TimeDelaySystem>(m, "TimeDelaySystem")
      .def(py::init([](Matrix A0, Matrix A1, Matrix Ad, Matrix Bd, Matrix Cd, double h) {
             TimeDelaySystem s{std::move(A0), std::move(A1), std::move(Ad),
                               std::move(Bd), std::move(Cd), h};
             require_valid(s);
             return s;
           }),
           py::arg("A0"), py::arg("A1"), py::arg("Ad"), py::arg("Bd"), py::arg("Cd"),
           py::arg("h"))
      .def_readonly("A0", &TimeDelaySystem::A0)
      .def_readonly("A1", &TimeDelaySystem::A1)
      .def_readonly("Ad", &TimeDelaySystem::Ad)
      .def_readonly("Bd", &TimeDelaySystem::Bd)
      .def_readonly("Cd", &TimeDelaySystem::Cd)
      .def_readonly("h", &TimeDelaySystem::h)
      .def_property_readonly("n", &TimeDelaySystem::n)
      .def_property_readonly("nd", &TimeDelaySystem::nd)
      .def("kernel_at", [](const TimeDelaySystem& s, double theta) { return kernel_at(s, theta); });

  m.def("sincos_system", &make_sincos_system, py::arg("A0"), py::arg("A1"), py::arg("B0"),
        py::arg("B1"), py::arg("frequency"), py::arg("h"));
  m.def("example1_system", &example1_system);

  py::class_<SpectrumReport>(m, "SpectrumReport")
      .def_readonly("sigma_min", &SpectrumReport::sigma_min)
      .def_readonly("sigma_min_relative", &SpectrumReport::sigma_min_relative)
      .def_readonly("ns", &SpectrumReport::ns)
      .def_property_readonly("verdict", [](const SpectrumReport& r) {
        return std::string(to_string(r.verdict));
      });

  m.def("check", [](const TimeDelaySystem& s) { return check(assemble(s)); });

  py::class_<ResidualReport>(m, "ResidualReport")
      .def_readonly("dde", &ResidualReport::dde)
      .def_readonly("algebraic", &ResidualReport::algebraic)
      .def_readonly("collapsed", &ResidualReport::collapsed)
      .def_readonly("flip", &ResidualReport::flip)
      .def_readonly("symmetry", &ResidualReport::symmetry)
      .def_readonly("endpoint", &ResidualReport::endpoint);

  py::class_<LyapunovSolution>(m, "LyapunovSolution")
      .def("P", &LyapunovSolution::P_at, py::arg("tau"))
      .def("omega", [](const LyapunovSolution& s, int k, double tau) {
             return s.evaluate_omega(tau).block(k);
           }, py::arg("k"), py::arg("tau") = 0.0)
      .def_property_readonly("omega0", [](const LyapunovSolution& s) {
        return Vector(s.omega0().stacked());
      })
      .def_property_readonly("spectrum", [](const LyapunovSolution& s) {
        return s.diagnostics().spectrum;
      })
      .def_property_readonly("near_singular", [](const LyapunovSolution& s) {
        return s.diagnostics().near_singular;
      })
      .def("certify", [](const LyapunovSolution& s, int points) {
             return certify(s, uniform_grid(s.h(), points));
           }, py::arg("points") = 11);

  m.def("solve", [](const TimeDelaySystem& s, const Matrix& q) { return solve(s, Weight(q)); },
        py::arg("system"), py::arg("Q"));

  m.def("oracle_P", [](const TimeDelaySystem& s, const Matrix& q,
                       const std::vector<double>& taus, double T, double dt) {
          OracleOptions o;
          o.T = T;
          o.dt = dt;
          return oracle_P(s, q, taus, o).P;
        },
        py::arg("system"), py::arg("Q"), py::arg("taus"), py::arg("T") = 0.0,
        py::arg("dt") = 0.0);

  m.def("cost", [](const TimeDelaySystem& s, const Matrix& q, const Vector& x0, double T,
                   double dt) {
          const Trajectory tr = simulate(s, HistorySpec::point_mass(x0), T, dt);
          return cost_quadrature(tr, q).value;
        },
        py::arg("system"), py::arg("Q"), py::arg("x0"), py::arg("T"), py::arg("dt"));

  m.def("load_system", [](const std::string& path) {
    const RunConfig c = load_config(path);
    return py::make_tuple(c.system, c.Q);
  }, py::arg("path"));
}
