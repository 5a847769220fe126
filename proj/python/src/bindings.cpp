#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "dualrdm/error.hpp"
#include "dualrdm/fci.hpp"
#include "dualrdm/hamiltonians.hpp"
#include "dualrdm/newton_dual.hpp"

namespace py = pybind11;
using namespace dualrdm;

namespace {

std::string conditions_text(const std::vector<Condition>& cs) {
  std::string out;
  for (const Condition c : cs) out += (out.empty() ? "" : ",") + to_string(c);
  return out;
}

py::dict iteration_dict(const NewtonIteration& it) {
  py::dict d;
  d["mu"] = it.mu;
  d["delta"] = it.delta;
  d["derivative"] = it.derivative;
  d["slope"] = it.slope ? py::cast(*it.slope) : py::none();
  d["inner_iterations"] = it.inner_iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dual reduced-density-matrix solver";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", error.ptr());
  py::register_exception<NewtonError>(m, "NewtonError", error.ptr());
  py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);

  m.def("pair_index", &pair_index, py::arg("i"), py::arg("j"), py::arg("r"));

  py::class_<IntegralSet>(m, "IntegralSet")
      .def_readonly("n_spatial", &IntegralSet::n_spatial)
      .def_readonly("n_electrons", &IntegralSet::n_electrons)
      .def_readonly("h_core", &IntegralSet::h_core)
      .def_readonly("e_core", &IntegralSet::e_core)
      .def("eri", py::overload_cast<int, int, int, int>(&IntegralSet::eri_at, py::const_), py::arg("p"), py::arg("q"),
           py::arg("r"), py::arg("s"), "Chemists' (pq|rs), 0-based.")
      .def("to_fcidump", [](const IntegralSet& ints) {
        std::ostringstream os;
        write_fcidump(os, ints);
        return os.str();
      });

  m.def("load_fcidump", py::overload_cast<const std::filesystem::path&>(&load_fcidump), py::arg("path"));
  m.def(
      "parse_fcidump",
      [](const std::string& text) {
        std::istringstream in(text);
        return load_fcidump(in);
      },
      py::arg("text"));
  m.def("hubbard_dimer", &hubbard_dimer, py::arg("t") = 1.0, py::arg("U") = 4.0);
  m.def("random_two_body", &random_two_body, py::arg("seed"), py::arg("r"), py::arg("n_electrons"),
        py::arg("scale") = 1.0);

  py::class_<SpinOrbitalIntegrals>(m, "SpinOrbitalIntegrals")
      .def_property_readonly("n_spin_orbitals", [](const SpinOrbitalIntegrals& s) { return s.basis.n_spin_orbitals; })
      .def_property_readonly("n_electrons", [](const SpinOrbitalIntegrals& s) { return s.basis.n_electrons; })
      .def_readonly("one_body", &SpinOrbitalIntegrals::one_body)
      .def_readonly("e_core", &SpinOrbitalIntegrals::e_core)
      .def("v", &SpinOrbitalIntegrals::v, "Antisymmetrized <ij||kl>.");
  m.def("spinify", &spinify, py::arg("integrals"));

  py::class_<ReducedHamiltonian>(m, "ReducedHamiltonian")
      .def_property_readonly("k_matrix", [](const ReducedHamiltonian& k) { return k.k_matrix.matrix(); })
      .def_property_readonly("n_spin_orbitals", [](const ReducedHamiltonian& k) { return k.basis.n_spin_orbitals; })
      .def_property_readonly("n_electrons", [](const ReducedHamiltonian& k) { return k.basis.n_electrons; })
      .def_readonly("e_core", &ReducedHamiltonian::e_core)
      .def_readonly("aufbau_energy", &ReducedHamiltonian::aufbau_energy);
  m.def("build_reduced_hamiltonian", &build_reduced_hamiltonian, py::arg("integrals"));

  m.def(
      "solve_fci",
      [](const SpinOrbitalIntegrals& ints, std::size_t cap) {
        const FciResult fci = solve_fci(ints, cap);
        py::dict d;
        d["energy"] = fci.state.energy;
        d["dimension"] = fci.basis.size();
        d["coefficients"] = fci.state.coefficients;
        d["rdm2"] = contract_2rdm(fci.basis, fci.state.coefficients).matrix();
        return d;
      },
      py::arg("integrals"), py::arg("cap") = kDefaultDeterminantCap,
      "Ground state by full CI; rdm2 is the pair-basis 2-RDM.");

  py::class_<ProjectionOptions>(m, "ProjectionOptions")
      .def(py::init<>())
      .def_readwrite("gradient_tolerance", &ProjectionOptions::gradient_tolerance)
      .def_readwrite("max_iterations", &ProjectionOptions::max_iterations)
      .def_readwrite("memory", &ProjectionOptions::memory)
      .def_readwrite("wolfe_c1", &ProjectionOptions::wolfe_c1)
      .def_readwrite("wolfe_c2", &ProjectionOptions::wolfe_c2)
      .def_readwrite("distance_floor", &ProjectionOptions::distance_floor)
      .def_readwrite("inner_scale", &ProjectionOptions::inner_scale)
      .def_property(
          "conditions", [](const ProjectionOptions& o) { return conditions_text(o.conditions); },
          [](ProjectionOptions& o, const std::string& text) { o.conditions = parse_conditions(text); });

  py::class_<ProjectionResult>(m, "ProjectionResult")
      .def_readonly("distance", &ProjectionResult::distance)
      .def_readonly("derivative", &ProjectionResult::derivative)
      .def_readonly("inner_iterations", &ProjectionResult::inner_iterations)
      .def_readonly("gradient_norm", &ProjectionResult::gradient_norm)
      .def_readonly("exact", &ProjectionResult::exact)
      .def_property_readonly("a_mu", [](const ProjectionResult& r) { return r.a_mu.matrix(); })
      .def_property_readonly("residual", [](const ProjectionResult& r) { return r.residual.matrix(); });

  m.def(
      "project",
      [](const ReducedHamiltonian& k, double mu, const ProjectionOptions& opts) { return project(k, mu, nullptr, opts); },
      py::arg("k"), py::arg("mu"), py::arg("options") = ProjectionOptions{}, py::call_guard<py::gil_scoped_release>());

  py::class_<NewtonConfig>(m, "NewtonConfig")
      .def(py::init<>())
      .def_readwrite("mu0", &NewtonConfig::mu0)
      .def_readwrite("damping", &NewtonConfig::damping)
      .def_readwrite("epsilon", &NewtonConfig::epsilon)
      .def_readwrite("max_outer", &NewtonConfig::max_outer)
      .def_readwrite("confirm", &NewtonConfig::confirm)
      .def_readwrite("projection", &NewtonConfig::projection);

  py::class_<NewtonTrace>(m, "NewtonTrace")
      .def_readonly("mu_star", &NewtonTrace::mu_star)
      .def_readonly("energy", &NewtonTrace::energy)
      .def_readonly("termination", &NewtonTrace::termination)
      .def_readonly("total_inner_iterations", &NewtonTrace::total_inner_iterations)
      .def_readonly("probe_above_delta", &NewtonTrace::probe_above_delta)
      .def_readonly("probe_below_delta", &NewtonTrace::probe_below_delta)
      .def_readonly("confirmed", &NewtonTrace::confirmed)
      .def_property_readonly("iterations", [](const NewtonTrace& t) {
        py::list out;
        for (const auto& it : t.iterations) out.append(iteration_dict(it));
        return out;
      });

  m.def("solve_dual", &solve_dual, py::arg("k"), py::arg("config") = NewtonConfig{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<CurvePoint>(m, "CurvePoint")
      .def_readonly("mu", &CurvePoint::mu)
      .def_readonly("delta", &CurvePoint::delta)
      .def_readonly("derivative", &CurvePoint::derivative)
      .def_readonly("inner_iterations", &CurvePoint::inner_iterations)
      .def_readonly("error", &CurvePoint::error);

  m.def("sample_delta_curve", &sample_delta_curve, py::arg("k"), py::arg("mu_grid"),
        py::arg("options") = ProjectionOptions{}, py::arg("threads") = 0u, py::call_guard<py::gil_scoped_release>());
}
