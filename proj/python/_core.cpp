#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "toda/acceptance.hpp"
#include "toda/ansatz.hpp"
#include "toda/bubbles.hpp"
#include "toda/config.hpp"
#include "toda/corrector.hpp"
#include "toda/diagnostics.hpp"
#include "toda/error.hpp"
#include "toda/meanfield.hpp"
#include "toda/report.hpp"

namespace py = pybind11;
using namespace toda;

namespace {

SparseOperator make_operator(const RunConfig& c) {
  return assemble_laplacian(build_grid(c.domain, c.resolution(), c.delta_min));
}

RunConfig config_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// Long computations release the GIL; results cross as JSON text.
template <class F>
std::string run_json(F&& f) {
  py::gil_scoped_release release;
  return dump(f());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical core of the SU(3) Toda blow-up construction";

  auto base = py::register_exception<Error>(m, "TodaError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());

  py::class_<RunConfig>(m, "Config")
      .def(py::init<>())
      .def_static("from_file", &load_config, py::arg("path"))
      .def_static("from_string", &config_from_string, py::arg("text"))
      .def_property_readonly("rho", &RunConfig::rho)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("solve_lambda", &RunConfig::solve_lambda)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def("lambdas", &RunConfig::lambdas)
      .def("canonical", [](const RunConfig& c) { return canonical_form(c); })
      .def("hash", [](const RunConfig& c) { return config_hash(c); })
      .def("validate", [](const RunConfig& c) { validate(c); });

  m.def("bubble_value", [](double alpha, double delta, double r) { return bubble_value({alpha, delta}, r); },
        py::arg("alpha"), py::arg("delta"), py::arg("r"));
  m.def(
      "bubble_mass",
      [](double alpha, double delta, double R) {
        const BubbleMass b = bubble_mass({alpha, delta}, R);
        return py::dict(py::arg("closed_form") = b.closed_form, py::arg("quadrature") = b.quadrature,
                        py::arg("quadrature_error") = b.quadrature_error);
      },
      py::arg("alpha"), py::arg("delta"), py::arg("R"));
  m.def(
      "weighted_identities",
      [](double alpha) {
        const WeightedIdentities w = weighted_identities(alpha);
        return py::dict(py::arg("values") = w.values, py::arg("closed_form") = w.closed_form,
                        py::arg("stated") = w.stated, py::arg("error_bounds") = w.error_bounds);
      },
      py::arg("alpha"));
  m.def(
      "disk_meanfield",
      [](double rho, double radius) {
        const DiskMeanField d(radius, rho);
        return py::dict(py::arg("z0") = d.z0(), py::arg("mass_integral") = d.mass_integral());
      },
      py::arg("rho"), py::arg("radius") = 1.0);
  m.def(
      "compute_deltas",
      [](double lambda, double rho, double z0, double mass, double h00) {
        const Deltas d = compute_deltas(lambda, rho, z0, mass, h00);
        return py::make_tuple(d.delta1, d.delta2);
      },
      py::arg("lambda_"), py::arg("rho"), py::arg("z0"), py::arg("mass_integral"), py::arg("h00") = 0.0);
  m.def(
      "change_of_variables",
      [](const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) {
        if (u1.size() != u2.size()) throw ArgumentError("u1 and u2 differ in length");
        const FieldPair v = change_of_variables({ScalarField(nullptr, u1), ScalarField(nullptr, u2)});
        return py::make_tuple(v.first.values, v.second.values);
      },
      py::arg("u1"), py::arg("u2"));

  m.def("meanfield_json", [](const RunConfig& c) {
    return run_json([&] { return to_json(solve_meanfield(make_operator(c), c.rho())); });
  });
  m.def("ansatz_json", [](const RunConfig& c) {
    return run_json([&] {
      const Background bg = make_background(make_operator(c), c.rho());
      std::vector<ResidualReport> reps;
      for (double l : c.lambdas()) reps.push_back(residual(assemble_ansatz(bg, l), c.p_grid));
      Json rows = Json::array();
      for (const ResidualReport& r : reps) rows.push_back(to_json(r));
      return Json{{"reports", rows}, {"fits", to_json(fit_rates(reps))}};
    });
  });
  m.def("solve_json", [](const RunConfig& c) {
    return run_json([&] {
      const Background bg = make_background(make_operator(c), c.rho());
      CorrectorOptions opt;
      opt.epsilon = c.epsilon;
      return to_json(newton_correct(assemble_ansatz(bg, c.solve_lambda), opt));
    });
  });
  m.def(
      "criterion_json",
      [](const RunConfig& c, int id) {
        return run_json([&] {
          const CriterionResult r = AcceptanceSuite(c).run(id);
          return Json{{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary}, {"data", r.data}};
        });
      },
      py::arg("config"), py::arg("id"));
  m.attr("module_versions") = module_versions();
}
