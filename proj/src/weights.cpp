#include <cmath>
#include <memory>

#include "covlab/builtins.hpp"
#include "covlab/errors.hpp"
#include "covlab/measures.hpp"
#include "covlab/quadrature.hpp"
#include "covlab/sum.hpp"

namespace covlab {

Weight::Weight(std::size_t index, Scalar a, Scalar a_prime, Scalar A, std::string name, json source)
    : index_(index),
      a_(std::move(a)),
      a_prime_(std::move(a_prime)),
      A_(std::move(A)),
      name_(std::move(name)),
      source_(std::move(source)) {}

Weight Weight::unit(const Measure1D& m, std::size_t index) {
  const double mean = m.mean();
  return Weight(
      index, [](double) { return 1.0; }, [](double) { return 0.0; }, [mean](double x) { return x - mean; }, "unit",
      json("unit"));
}

std::vector<Weight> unit_weights(const ProductMeasure& m) {
  std::vector<Weight> out;
  for (std::size_t i = 0; i < m.dim(); ++i) out.push_back(Weight::unit(m.factor(i), i));
  return out;
}

Weight centered_primitive(const Measure1D& m, Weight::Scalar a, const QuadratureSpec& spec, std::size_t index,
                          Weight::Scalar a_prime, Weight::Scalar primitive, std::string name, json source) {
  const Interval box = m.truncated_support(spec.trunc_eps);
  constexpr int kProbes = 21;
  for (int k = 0; k < kProbes; ++k) {
    const double x = box.lo + box.width() * (k + 0.5) / kProbes;
    const double v = a(x);
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError("weights", "weight a must be positive and finite (fails at x=" + std::to_string(x) + ")");
  }
  if (!primitive) {
    auto table = std::make_shared<Primitive1D>(a, box, 32, 16, m.breakpoints(), 0.5 * (box.lo + box.hi));
    primitive = [table](double x) { return (*table)(x); };
  }
  if (!a_prime) {
    a_prime = [a](double x) {
      const double h = std::cbrt(2.2e-16) * (1.0 + std::abs(x));
      return (a(x + h) - a(x - h)) / (2.0 * h);
    };
  }
  const Rule1D rule = measure_rule(m, spec);
  CompensatedSum mean, magnitude;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double v = primitive(rule.nodes[k]);
    if (!std::isfinite(v)) throw NumericalError("weight primitive diverges at x=" + std::to_string(rule.nodes[k]));
    mean.add(rule.weights[k] * v);
    magnitude.add(rule.weights[k] * std::abs(v));
  }
  const double c = -mean.value();
  Weight::Scalar A = [primitive, c](double x) { return primitive(x) + c; };

  CompensatedSum check;
  for (std::size_t k = 0; k < rule.size(); ++k) check.add(rule.weights[k] * A(rule.nodes[k]));
  const double tau_id = 1e-10 * (1.0 + magnitude.value());
  if (std::abs(check.value()) > tau_id) throw NumericalError("weight primitive could not be centered");
  double prev = A(box.lo);
  for (int k = 1; k <= 4 * kProbes; ++k) {
    const double v = A(box.lo + box.width() * k / (4.0 * kProbes));
    if (!(v > prev)) throw NumericalError("weight primitive is not strictly increasing");
    prev = v;
  }
  return Weight(index, std::move(a), std::move(a_prime), std::move(A), std::move(name), std::move(source));
}

Weight weight_from_json(const json& j, const Measure1D& m, std::size_t index, const QuadratureSpec& spec,
                        const std::string& field) {
  std::string kind;
  json params = json::object();
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object() && j.contains("builtin")) {
    kind = j.at("builtin").get<std::string>();
    params = j.value("params", json::object());
  } else if (j.is_object() && j.contains("expr")) {
    const FunctionSpec a = parse_expression(j.at("expr").get<std::string>(), 1);
    return centered_primitive(
        m, [a](double x) { return a(x); }, spec, index, {}, {}, "expr", j);
  } else {
    throw ConfigError(field, "must be \"unit\", a builtin weight object or an expression");
  }
  if (kind == "unit") return Weight::unit(m, index);
  if (kind == "poly2") {
    const double b = params.value("b", 1.0);
    if (!(b >= 0.0)) throw ConfigError(field + ".params.b", "must be non-negative");
    return centered_primitive(
        m, [b](double x) { return 1.0 + b * x * x; }, spec, index, [b](double x) { return 2.0 * b * x; },
        [b](double x) { return x + b * x * x * x / 3.0; }, "poly2", json{{"builtin", "poly2"}, {"params", {{"b", b}}}});
  }
  if (kind == "cosh") {
    const double b = params.value("b", 1.0);
    if (!(b > 0.0)) throw ConfigError(field + ".params.b", "must be positive");
    return centered_primitive(
        m, [b](double x) { return std::cosh(b * x); }, spec, index, [b](double x) { return b * std::sinh(b * x); },
        [b](double x) { return std::sinh(b * x) / b; }, "cosh", json{{"builtin", "cosh"}, {"params", {{"b", b}}}});
  }
  if (kind == "potential_curvature") {
    if (!m.has_potential()) throw ConfigError(field, "potential_curvature needs a measure with a potential");
    const Measure1D mm = m;
    auto a = [mm](double x) { return mm.potential_d2(x); };
    auto a1 = [mm](double x) {
      const double h = std::cbrt(2.2e-16) * (1.0 + std::abs(x));
      return (mm.potential_d2(x + h) - mm.potential_d2(x - h)) / (2.0 * h);
    };
    return centered_primitive(
        m, a, spec, index, a1, [mm](double x) { return mm.potential_d1(x); }, "potential_curvature",
        json{{"builtin", "potential_curvature"}});
  }
  throw ConfigError(field, "unknown weight '" + kind + "'");
}

}  // namespace covlab
