#pragma once

#include <optional>
#include <vector>

#include "covlab/functions.hpp"
#include "covlab/kernels.hpp"
#include "covlab/measures.hpp"
#include "covlab/report.hpp"
#include "covlab/spec.hpp"

namespace covlab {

enum class InducedKind { plain, f_weighted, fg_weighted };
const char* induced_kind_name(InducedKind k);

/// Probability measure on ℝ² with density w_L(x) k(x,y) w_R(y) / Z, where w_L = a·f (or a) and
/// w_R = a·g (or a).
class InducedMeasure2D {
 public:
  InducedMeasure2D(InducedKind kind, HoeffdingKernel kernel, Estimate Z, double Z_cov_form);

  InducedKind kind() const noexcept { return kind_; }
  const HoeffdingKernel& kernel() const noexcept { return kernel_; }
  /// Normalizer by direct integration of the weighted kernel.
  const Estimate& Z() const noexcept { return Z_; }
  /// Normalizer from its covariance expression: Var(A), Cov(F_a, A) or Cov(F_a, G_a).
  double Z_cov_form() const noexcept { return Z_cov_; }
  double density(double x, double y) const { return kernel_(x, y) / Z_.value; }

  /// E[p(x) q(y)] under the induced measure.
  Estimate expectation(const HoeffdingKernel::Scalar& p, const HoeffdingKernel::Scalar& q,
                       const QuadratureSpec& spec) const;
  Estimate covariance(const HoeffdingKernel::Scalar& p, const HoeffdingKernel::Scalar& q,
                      const QuadratureSpec& spec) const;

 private:
  InducedKind kind_;
  HoeffdingKernel kernel_;
  Estimate Z_;
  double Z_cov_;
};

/// `weight` null means a ≡ 1 with A(x) = x − mean.
InducedMeasure2D induced_measure(const Measure1D& mu, InducedKind kind, const FunctionSpec* f, const FunctionSpec* g,
                                 const Weight* weight, const QuadratureSpec& spec);

struct HoeffdingResult {
  Estimate lhs;  // Cov(f, g)
  Estimate rhs;  // ∬ f'(x) k(x,y) g'(y) dx dy
};
HoeffdingResult hoeffding_identity(const Measure1D& mu, const FunctionSpec& f, const FunctionSpec& g,
                                   const QuadratureSpec& spec);

struct RelationResult {
  int variant = 1;
  bool weighted = false;
  std::vector<Hypothesis> hypotheses;
  bool hypotheses_pass = true;
  Estimate lhs;  // Cov(f,g)/Z − C₁C₂/Z² with Z in covariance form
  Estimate rhs;  // covariance of the derivative quotients under the induced measure
  double Z_direct = 0.0;
  double Z_cov_form = 0.0;
  // Variant 1 only: Z²·rhs against det[[Var A, Cov(A,f)],[Cov(A,g), Cov(f,g)]].
  double det_form = 0.0;
  double det_scaled_rhs = 0.0;
  bool det_consistent = true;
  double residual() const { return lhs.value - rhs.value; }
  double error() const { return lhs.error + rhs.error; }
  json to_json() const;
};

/// Hoeffding covariance relation, variant 1 (any f, g), 2 (f > 0) or 3 (f, g > 0), optionally
/// with a weight a whose centered primitive A replaces x.
RelationResult relation_residual(const Measure1D& mu, const FunctionSpec& f, const FunctionSpec& g, int variant,
                                 const Weight* weight, const QuadratureSpec& spec);

}  // namespace covlab
