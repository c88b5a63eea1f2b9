// JSON-in, JSON-out surface of the library; the Python package wraps it with dicts.

#include <sstream>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covlab/builtins.hpp"
#include "covlab/errors.hpp"
#include "covlab/kernels.hpp"
#include "covlab/oracle.hpp"
#include "covlab/quadrature.hpp"
#include "covlab/theorem_suite.hpp"

namespace py = pybind11;
using covlab::json;

namespace {

std::string check_json(const std::string& theorem, const std::string& config) {
  const covlab::CheckInput in = covlab::check_input_from_json(json::parse(config), covlab::QuadratureSpec{});
  return covlab::check(theorem, in).to_json().dump();
}

std::string suite_json(const std::string& config) {
  const json j = config.empty() ? json::object() : json::parse(config);
  return covlab::run_suite(covlab::SuiteConfig::from_json(j)).to_json().dump();
}

std::string kernel_csv(const std::string& measure, std::size_t grid) {
  std::ostringstream os;
  covlab::write_kernel_csv(os, covlab::HoeffdingKernel(covlab::Measure1D::from_json(json::parse(measure))), grid);
  return os.str();
}

double kernel_value(const std::string& measure, double x, double y) {
  return covlab::HoeffdingKernel(covlab::Measure1D::from_json(json::parse(measure)))(x, y);
}

std::pair<double, double> covariance_json(const std::string& measure, const std::string& f, const std::string& g,
                                          const std::string& quadrature) {
  const covlab::ProductMeasure mu = covlab::ProductMeasure::from_json(json::parse(measure));
  const covlab::QuadratureSpec spec =
      quadrature.empty() ? covlab::QuadratureSpec{} : covlab::QuadratureSpec::from_json(json::parse(quadrature));
  const covlab::Estimate e = covlab::covariance(mu, covlab::function_from_json(json::parse(f), mu.dim()),
                                                covlab::function_from_json(json::parse(g), mu.dim(), nullptr, "g"),
                                                spec);
  return {e.value, e.error};
}

std::string oracle_json(std::uint64_t seed, std::size_t instances) {
  json arr = json::array();
  bool ok = true;
  for (const auto& l : covlab::oracle::verify_battery(seed, instances)) {
    arr.push_back({{"identity", l.identity},
                   {"instances", l.instances},
                   {"max_residual", l.max_residual},
                   {"tolerance", l.tolerance},
                   {"pass", l.pass()}});
    ok = ok && l.pass();
  }
  return json{{"seed", seed}, {"instances", instances}, {"pass", ok}, {"identities", arr}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Covariance-inequality verification core";
  py::register_exception<covlab::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<covlab::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<json::exception>(m, "JSONError", PyExc_ValueError);

  m.def("theorem_ids", &covlab::theorem_ids, "Builtin theorem ids in suite order");
  m.def("check", &check_json, py::arg("theorem"), py::arg("config"),
        "Run one checker on a check config (JSON string); returns the report as JSON");
  m.def("run_suite", &suite_json, py::arg("config") = std::string(), py::call_guard<py::gil_scoped_release>());
  m.def("kernel_csv", &kernel_csv, py::arg("measure"), py::arg("grid") = 200);
  m.def("kernel", &kernel_value, py::arg("measure"), py::arg("x"), py::arg("y"));
  m.def("covariance", &covariance_json, py::arg("measure"), py::arg("f"), py::arg("g"),
        py::arg("quadrature") = std::string(), "Returns (value, error estimate)");
  m.def("oracle_verify", &oracle_json, py::arg("seed") = 20240601, py::arg("instances") = 500,
        py::call_guard<py::gil_scoped_release>());
}
