#pragma once

#include <functional>
#include <vector>

#include "covlab/functions.hpp"
#include "covlab/kernels.hpp"
#include "covlab/measures.hpp"
#include "covlab/report.hpp"
#include "covlab/spec.hpp"

namespace covlab {

/// f_k(x_1..x_k) = ∫ f dμ_{k+1} … dμ_d, evaluated with a tensor rule over the trailing coordinates.
/// k = d returns f itself; k = 0 is not a function (use `marginal_mean`).
FunctionSpec marginalize(const FunctionSpec& f, const ProductMeasure& mu, std::size_t k, const QuadratureSpec& spec);
double marginal_mean(const FunctionSpec& f, const ProductMeasure& mu, const QuadratureSpec& spec);

/// Certifies that f_k is unconditional and coordinatewise quasi-concave on a probe grid.
std::vector<Certification> marginal_inheritance(const FunctionSpec& f, const ProductMeasure& mu, std::size_t k,
                                                const QuadratureSpec& spec);

struct TermDecomposition {
  std::vector<Estimate> terms;
  Estimate total;        // Σ terms
  Estimate covariance;   // Cov_μ(f,g) by direct quadrature (or Monte Carlo)
  bool monte_carlo = false;
  double residual() const { return total.value - covariance.value; }
  double error() const { return total.error + covariance.error; }
  json to_json() const;
};

/// Σ_k E_{x<k}[Cov_{μ_k}(f_k, g_k)], nested tensor quadrature.
TermDecomposition tensorization_decompose(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                          const QuadratureSpec& spec);

/// ½ Σ_i E[Δ_i f(X,X′) Δ̃_i g(X,X′)] with X, X′ drawn independently from seeds derived from `seed`.
/// Term errors and the total error are standard errors.
TermDecomposition duplication_covariance(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                         std::size_t n_samples, std::uint64_t seed, const QuadratureSpec& spec);

/// ∬ L(x) k_{μ_i}(x_i, x′_i) R(x_1..x_{i−1}, x′_i, x′_{i+1}..x′_d) dx_i dx′_i dμ(x_{−i}) dμ(x′_{−i}).
/// The integral factorizes: for each node of the leading coordinates, L and R are averaged over
/// their own trailing coordinates and the remaining two-dimensional kernel integral is one-dimensional
/// in structure. R receives the point (x_{<i}, x′_i, x′_{>i}).
Estimate fiber_integral(const ProductMeasure& mu, std::size_t i, const std::function<double(Point)>& L,
                        const std::function<double(Point)>& R, const QuadratureSpec& spec);

/// Per-coordinate terms ∬ ∂_i f(x) k_{μ_i} ∂_i g(x_{<i}, x′_{≥i}) against Cov_μ(f,g). Above
/// det_dim_cap the terms are the duplication estimates, which agree term by term.
TermDecomposition product_hoeffding_identity(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                             const QuadratureSpec& spec);

struct ProductRelationTerm {
  Estimate Z;            // normalizer of the i-th induced measure
  double Z_cov_form = NAN;  // Cov(F_i, A_i) with ∂_i F_i = a_i·f (variant 2), NaN when not defined
  Estimate cov;          // covariance of the derivative quotients under the i-th induced measure
  Estimate dropped;      // Z·E[p]·E[q], the product of the two first-moment integrals over Z
  json to_json() const;
};

struct ProductRelationResult {
  int variant = 1;
  bool weighted = false;
  std::vector<Hypothesis> hypotheses;
  bool hypotheses_pass = true;
  Estimate lhs;                        // Cov_μ(f,g)
  std::vector<ProductRelationTerm> terms;
  Estimate rhs;                        // Σ Z_i cov_i + Σ dropped_i
  Estimate reduced_rhs;                // Σ Z_i cov_i alone
  double residual() const { return lhs.value - rhs.value; }
  double error() const { return lhs.error + rhs.error; }
  json to_json() const;
};

/// Product covariance relation, variants 1–3 with optional per-coordinate weights (empty = a ≡ 1).
/// Variant 2 records orthogonality of f to every A_i; variant 3 records symmetry of μ, evenness of
/// the weights, f and g. Hypotheses are reported, never enforced, so dropped terms stay visible.
ProductRelationResult product_relation_residual(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                                int variant, const std::vector<Weight>& weights,
                                                const QuadratureSpec& spec);

/// ln of the Lebesgue density of the i-th f-weighted induced measure on ℝ^{2d}, up to a constant.
/// Points are laid out as (x_1..x_d, x′_1..x′_d); `signs` (optional) flips coordinates first.
std::function<double(std::span<const double>)> induced_log_density(const ProductMeasure& mu, const FunctionSpec* f,
                                                                     std::size_t i, const Weight* weight = nullptr,
                                                                     std::vector<double> signs = {});

/// The box in ℝ^{2d} used for Holley probes: the truncated box, doubled and pulled 1% inward.
std::vector<Interval> induced_probe_box(const ProductMeasure& mu, double trunc_eps);

}  // namespace covlab
