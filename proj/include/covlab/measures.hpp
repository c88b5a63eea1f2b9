#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "covlab/spec.hpp"

namespace covlab {

struct Atom {
  double position = 0.0;
  double probability = 0.0;
};

enum class Family {
  gaussian,
  uniform,
  exponential,
  logistic,
  discrete,
  gaussian_scale_mixture,
  grid_density,
};

const char* family_name(Family f);

struct GaussianParams {
  double mean;
  double sigma;
};
struct UniformParams {
  double lo;
  double hi;
};
struct ExponentialParams {
  double rate;
};
struct LogisticParams {
  double loc;
  double scale;
};
struct DiscreteParams {
  std::vector<Atom> atoms;       // sorted, strictly positive probabilities
  std::vector<double> cumulative;  // cumulative[k] = P(X <= atoms[k].position)
};
struct MixtureComponent {
  double sigma;
  double weight;
};
struct ScaleMixtureParams {
  std::vector<MixtureComponent> components;
};
struct GridDensityParams {
  std::vector<double> grid;
  std::vector<double> values;      // normalized density values at grid nodes
  std::vector<double> cumulative;  // CDF at grid nodes
};

/// A probability measure on the real line.
class Measure1D {
 public:
  static Measure1D gaussian(double mean, double sigma);
  static Measure1D uniform(double lo, double hi);
  static Measure1D exponential(double rate);
  static Measure1D logistic(double loc, double scale);
  static Measure1D discrete(std::vector<Atom> atoms);
  static Measure1D gaussian_scale_mixture(std::vector<MixtureComponent> components);
  static Measure1D grid_density(std::vector<double> grid, std::vector<double> values);

  static Measure1D from_json(const json& j, const std::string& field = "measure");
  json to_json() const;
  std::string describe() const;

  Family family() const noexcept { return family_; }
  bool is_discrete() const noexcept { return family_ == Family::discrete; }

  double pdf(double x) const;
  /// Right-continuous distribution function P(X <= x).
  double cdf(double x) const;
  /// Survival function P(X > x), accurate in the upper tail.
  double sf(double x) const;
  double quantile(double p) const;
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  Interval support() const;
  /// [quantile(eps), quantile(1-eps)], or exact bounds where the support is bounded.
  Interval truncated_support(double eps) const;
  /// Points inside the support where the density or the CDF is not smooth.
  std::vector<double> breakpoints() const;
  const std::vector<Atom>& atoms() const;

  /// True when the law of X equals the law of -X.
  bool is_even(double tol = 1e-9) const;
  /// True when the density is log-concave (family-level fact, probe-checked for grids and mixtures).
  bool is_log_concave() const;

  /// Potential V = -log(density) and its derivatives, for absolutely continuous families.
  bool has_potential() const noexcept;
  double potential(double x) const;
  double potential_d1(double x) const;
  double potential_d2(double x) const;

  const auto& params() const noexcept { return params_; }

 private:
  using Params = std::variant<GaussianParams, UniformParams, ExponentialParams, LogisticParams,
                              DiscreteParams, ScaleMixtureParams, GridDensityParams>;
  Measure1D(Family f, Params p);
  void finalize_moments();
  double pdf_d1(double x) const;
  double pdf_d2(double x) const;

  Family family_;
  Params params_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// μ_1 ⊗ … ⊗ μ_d.
class ProductMeasure {
 public:
  ProductMeasure() = default;
  explicit ProductMeasure(std::vector<Measure1D> factors);
  ProductMeasure(const Measure1D& m, std::size_t dim);

  static ProductMeasure from_json(const json& j, const std::string& field = "measure");
  json to_json() const;
  std::string describe() const;

  std::size_t dim() const noexcept { return factors_.size(); }
  const Measure1D& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<Measure1D>& factors() const noexcept { return factors_; }
  bool is_symmetric() const;
  std::vector<Interval> truncated_box(double eps) const;

 private:
  std::vector<Measure1D> factors_;
};

/// Row-major n×d array of sample points.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> data;
  std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
  const double* row(std::size_t k) const { return data.data() + k * dim; }
};

/// Inverse-CDF sampling, deterministic given the seed and independent of the thread count.
PointSet sample(const ProductMeasure& m, std::size_t n, std::uint64_t seed);

/// A positive weight a on one coordinate together with its μ-centered primitive A.
class Weight {
 public:
  using Scalar = std::function<double(double)>;

  Weight() = default;
  Weight(std::size_t index, Scalar a, Scalar a_prime, Scalar A, std::string name, json source);

  /// a ≡ 1, A(x) = x − mean.
  static Weight unit(const Measure1D& m, std::size_t index = 0);

  double a(double x) const { return a_(x); }
  double a_prime(double x) const { return a_prime_(x); }
  double A(double x) const { return A_(x); }
  std::size_t index() const noexcept { return index_; }
  bool is_unit() const noexcept { return name_ == "unit"; }
  const std::string& name() const noexcept { return name_; }
  const json& source() const noexcept { return source_; }

 private:
  std::size_t index_ = 0;
  Scalar a_, a_prime_, A_;
  std::string name_;
  json source_;
};

/// Builds A(x) = ∫_{x0}^x a + c with x0 the midpoint of the truncated support and c chosen so that
/// E_μ[A] = 0. `primitive` may supply an exact antiderivative; otherwise it is tabulated numerically.
Weight centered_primitive(const Measure1D& m, Weight::Scalar a, const QuadratureSpec& spec,
                          std::size_t index = 0, Weight::Scalar a_prime = {},
                          Weight::Scalar primitive = {}, std::string name = "custom",
                          json source = json());

/// Weight JSON: "unit", {"builtin":"unit"|"poly2"|"cosh"|"potential_curvature", "params":{...}}
/// or {"expr":"..."} (a function of x).
Weight weight_from_json(const json& j, const Measure1D& m, std::size_t index,
                        const QuadratureSpec& spec, const std::string& field = "weights");

std::vector<Weight> unit_weights(const ProductMeasure& m);

}  // namespace covlab
