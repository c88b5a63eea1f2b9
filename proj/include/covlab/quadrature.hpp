#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "covlab/functions.hpp"
#include "covlab/measures.hpp"
#include "covlab/spec.hpp"

namespace covlab {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss–Legendre nodes and weights on [−1, 1].
const Rule1D& gauss_legendre(int order);

/// Splits `iv` into `panels` equal panels, further cut at the given breakpoints.
std::vector<Interval> panel_partition(Interval iv, int panels, const std::vector<double>& breakpoints = {});

Rule1D composite_gauss_legendre(Interval iv, int order, int panels, const std::vector<double>& breakpoints = {});

/// Expectation rule for the measure pushed forward by clipping to its truncated support:
/// density-weighted Gauss–Legendre nodes inside the box, plus atoms at the two ends that carry
/// the tail masses. Discrete measures use their atoms.
Rule1D measure_rule(const Measure1D& m, const QuadratureSpec& spec);

/// Tensor product of one-dimensional rules, iterated in lexicographic order (last axis fastest).
class TensorRule {
 public:
  explicit TensorRule(std::vector<Rule1D> axes);
  static TensorRule for_measure(const ProductMeasure& mu, const QuadratureSpec& spec);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  const Rule1D& axis(std::size_t i) const { return axes_.at(i); }
  void point(std::size_t k, double* out) const;
  double weight(std::size_t k) const { return weights_[k]; }

  /// values[f][k] = fns[f](node k), evaluated in parallel with a fixed layout.
  std::vector<std::vector<double>> evaluate(const std::vector<std::function<double(Point)>>& fns) const;
  /// Σ_k w_k v_k with compensated summation in node order.
  double sum(const std::vector<double>& values) const;

 private:
  std::vector<Rule1D> axes_;
  std::size_t size_ = 1;
  std::vector<double> weights_;
};

/// Lebesgue integral over a box with the composite tensor Gauss–Legendre rule.
Estimate integrate(const std::function<double(Point)>& fn, const std::vector<Interval>& box,
                   const QuadratureSpec& spec, const std::vector<std::vector<double>>& breakpoints = {});

/// ∬_{iv×iv} fn(x,y) dx dy with the inner integral split at y = x.
Estimate integrate_diagonal_split(const std::function<double(double, double)>& fn, Interval iv,
                                  const QuadratureSpec& spec, const std::vector<double>& breakpoints = {});

/// True when the spec integrates `mu` with deterministic tensor rules rather than Monte Carlo.
bool deterministic(const ProductMeasure& mu, const QuadratureSpec& spec);

Estimate expectation(const ProductMeasure& mu, const std::function<double(Point)>& fn, const QuadratureSpec& spec);

/// Two-pass centered covariance. The error is |Δ| between the spec and its halved order on the
/// deterministic path, and the Monte Carlo standard error otherwise.
Estimate covariance(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                    const QuadratureSpec& spec);

/// Cov(f_i, g_j) for all pairs, from one shared rule. `error` (optional) receives |Δ| per entry.
Eigen::MatrixXd covariance_matrix(const ProductMeasure& mu, const std::vector<FunctionSpec>& fs,
                                  const std::vector<FunctionSpec>& gs, const QuadratureSpec& spec,
                                  Eigen::MatrixXd* error = nullptr);

/// Same, for a fixed rule (no error estimate).
Eigen::MatrixXd covariance_matrix_on(const TensorRule& rule, const std::vector<FunctionSpec>& fs,
                                     const std::vector<FunctionSpec>& gs);

/// x ↦ ∫_{x0}^{x} f(t) dt, tabulated by panel and completed with a local Gauss rule.
class Primitive1D {
 public:
  Primitive1D(std::function<double(double)> f, Interval box, int order = 32, int panels = 16,
              const std::vector<double>& breakpoints = {}, double x0 = NAN);
  double operator()(double x) const;
  Interval box() const noexcept { return box_; }

 private:
  double from_lo(double x) const;
  std::function<double(double)> f_;
  Interval box_;
  int order_;
  std::vector<double> edges_;
  std::vector<double> cumulative_;
  double offset_ = 0.0;
};

}  // namespace covlab
