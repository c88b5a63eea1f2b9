#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covlab/measures.hpp"
#include "covlab/spec.hpp"

namespace covlab {

using Point = std::span<const double>;

enum class Property {
  convex,
  log_concave,
  quasi_concave,
  even,
  unconditional,
  coordinatewise_convex,
  coordinatewise_quasi_concave,
  positive,
};

const char* property_name(Property p);
Property property_from_string(const std::string& s);

/// A scalar function on ℝ^d. Missing derivative evaluators fall back to central differences.
class FunctionSpec {
 public:
  using ValueFn = std::function<double(Point)>;
  using PartialFn = std::function<double(std::size_t, Point)>;
  using SecondFn = std::function<double(std::size_t, std::size_t, Point)>;

  FunctionSpec() = default;
  FunctionSpec(std::size_t dim, ValueFn value, PartialFn partial = {}, SecondFn second = {},
               std::string name = "anonymous", json source = json());

  static FunctionSpec constant(std::size_t dim, double c);
  static FunctionSpec coordinate(std::size_t dim, std::size_t i);
  /// Wraps a univariate callable with optional analytic first and second derivatives.
  static FunctionSpec univariate(std::function<double(double)> f, std::function<double(double)> d1 = {},
                                 std::function<double(double)> d2 = {}, std::string name = "univariate");

  std::size_t dim() const noexcept { return dim_; }
  bool valid() const noexcept { return static_cast<bool>(value_); }

  double operator()(Point x) const { return value_(x); }
  double operator()(double x) const { return value_(Point(&x, 1)); }
  double partial(std::size_t i, Point x) const;
  double second(std::size_t i, std::size_t j, Point x) const;
  double derivative(double x) const { return partial(0, Point(&x, 1)); }
  double second_derivative(double x) const { return second(0, 0, Point(&x, 1)); }
  Eigen::VectorXd gradient(Point x) const;
  Eigen::MatrixXd hessian(Point x) const;
  /// Central-difference partial derivative, ignoring any analytic evaluator.
  double fd_partial(std::size_t i, Point x) const;

  bool has_analytic_gradient() const noexcept { return static_cast<bool>(partial_); }
  bool has_analytic_hessian() const noexcept { return static_cast<bool>(second_); }

  const std::set<Property>& declared() const noexcept { return declared_; }
  FunctionSpec& declare(Property p) {
    declared_.insert(p);
    return *this;
  }
  const std::string& name() const noexcept { return name_; }
  const json& source() const noexcept { return source_; }
  FunctionSpec& set_source(json s) {
    source_ = std::move(s);
    return *this;
  }

  // Combinators. Derivative evaluators are propagated whenever the operands have them.
  FunctionSpec operator+(const FunctionSpec& o) const;
  FunctionSpec operator-(const FunctionSpec& o) const;
  FunctionSpec scaled(double c) const;
  FunctionSpec plus_constant(double c) const;
  /// exp(h) for this function h.
  FunctionSpec exp() const;
  /// x ↦ f(x − shift).
  FunctionSpec shifted(std::vector<double> shift) const;

  /// When the function is known as exp(h), `log_form()` is h. Lets −ln f and positivity be
  /// evaluated where f itself underflows.
  const FunctionSpec* log_form() const noexcept { return log_.get(); }
  FunctionSpec& set_log_form(const FunctionSpec& h) {
    log_ = std::make_shared<const FunctionSpec>(h);
    return *this;
  }
  double log_value(Point x) const { return log_ ? (*log_)(x) : std::log(value_(x)); }

 private:
  std::size_t dim_ = 0;
  ValueFn value_;
  PartialFn partial_;
  SecondFn second_;
  std::set<Property> declared_;
  std::string name_;
  json source_;
  std::shared_ptr<const FunctionSpec> log_;
};

// Derivatives of φ = −ln f for a positive f.
double neg_log_partial(const FunctionSpec& f, std::size_t i, Point x);
double neg_log_second(const FunctionSpec& f, std::size_t i, std::size_t j, Point x);

/// Probe points and random-check budget inside a box.
struct ProbeSpec {
  std::vector<Interval> box;
  std::size_t points_per_axis = 21;
  std::size_t samples = 4096;
  std::size_t grid_dim_cap = 3;
  std::size_t random_checks = 1000;
  std::uint64_t seed = 1;

  static ProbeSpec for_measure(const ProductMeasure& mu, double eps = 1e-9);
  static ProbeSpec for_box(std::vector<Interval> box);
  std::size_t dim() const noexcept { return box.size(); }
  /// Tensor grid for d ≤ grid_dim_cap, Halton points otherwise.
  std::vector<std::vector<double>> points() const;
  std::string describe() const;
};

struct Certification {
  Property property = Property::convex;
  bool pass = true;
  double worst = 0.0;                           // most negative normalized slack
  std::vector<std::vector<double>> witness;     // violating point(s), empty on pass
  std::string detail;
};

Certification certify(const FunctionSpec& f, Property property, const ProbeSpec& probe);

enum class Sign { positive, negative, zero, mixed };
const char* sign_symbol(Sign s);

struct SignEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  Sign sign_f = Sign::zero;
  Sign sign_g = Sign::zero;
  bool compatible = true;
};

struct SignConditionReport {
  std::string condition;
  std::vector<SignEntry> entries;
  bool pass = true;
  std::string probe;
  json to_json() const;
};

/// Known ids: cond-l2-fg-mod, cond-l2-fg, cond-a-i, cond-a-ij, cond-l2-idem, cond-ii-phi-g,
/// cond-ij-phi-g, cond-ii-phi-psi, cond-ij-phi-psi, cond-V-i, cond-V-ij. An empty weight list
/// means a ≡ 1. cond-V-* read the potentials of `mu`.
SignConditionReport check_sign_condition(const FunctionSpec& f, const FunctionSpec& g,
                                         const std::vector<Weight>& weights, const std::string& condition,
                                         const ProbeSpec& probe, const ProductMeasure* mu = nullptr);

/// Sign of a sampled quantity, where each sample carries its own tolerance.
Sign classify_sign(const std::vector<double>& values, const std::vector<double>& tolerances);

struct LayerCakeLevel {
  double t = 0.0;
  double r = 0.0;  // level set is [−r, r]
};

struct LayerCake {
  double max_value = 0.0;
  double dt = 0.0;
  std::vector<LayerCakeLevel> levels;
  /// Σ Δt·1_{[−r(t_k), r(t_k)]}(x).
  double reconstruct(double x) const;
};

/// Layer-cake decomposition of a non-negative, even, quasi-concave univariate function on [−R, R].
LayerCake layer_cake_decompose(const FunctionSpec& f, std::size_t levels, double R);

}  // namespace covlab
