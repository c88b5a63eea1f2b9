#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covlab/functions.hpp"

namespace covlab::fn {

/// coef · h(scale · (x_coord − shift)) for a named univariate shape h.
/// Shapes: identity, square, cube, quartic, neg_square, exp, cosh, softplus, sqrt1p, gauss,
/// cauchy, sech, logcosh, sin.
struct Atom1D {
  std::string kind = "square";
  double coef = 1.0;
  double scale = 1.0;
  double shift = 0.0;
  std::size_t coord = 0;
  int id = -1;  // resolved shape index; set by the builders, looked up from `kind` when negative

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  json to_json() const;
  static Atom1D from_json(const json& j, const std::string& field);
};

FunctionSpec atom(const Atom1D& a);
FunctionSpec linear(std::vector<double> w, double c = 0.0);
/// ½ xᵀQx + bᵀx + c.
FunctionSpec quadratic(Eigen::MatrixXd Q, Eigen::VectorXd b, double c = 0.0);
/// (1/β) ln Σ exp(β x_i).
FunctionSpec softmax_free_energy(double beta, std::size_t d);
/// exp(−(½ xᵀPx + bᵀx + c)).
FunctionSpec exp_quadratic(Eigen::MatrixXd P, Eigen::VectorXd b, double c = 0.0);
/// exp(wᵀx + c).
FunctionSpec exp_linear(std::vector<double> w, double c = 0.0);
/// 1 / (1 + xᵀPx).
FunctionSpec inverse_quadratic(Eigen::MatrixXd P);
/// Σ_k atoms[k](x_{coord_k}).
FunctionSpec separable(std::size_t d, std::vector<Atom1D> atoms);
/// Π_i factors[i](x_i).
FunctionSpec product(std::vector<Atom1D> factors);
/// Σ_k c_k x^k on the real line.
FunctionSpec poly1d(std::vector<double> coeffs);
/// One term c·h(s·(wᵀx) − t) of a ridge sum; `atom.coord` is unused.
struct RidgeTerm {
  Atom1D atom;
  std::vector<double> w;
};
/// ½ xᵀQx + bᵀx + c + Σ_k terms[k].
FunctionSpec ridge(Eigen::MatrixXd Q, Eigen::VectorXd b, double c, std::vector<RidgeTerm> terms);

struct Monomial {
  double coef = 1.0;
  std::vector<int> powers;
};
/// Σ_k coef_k Π_i x_i^{p_ki}.
FunctionSpec monomials(std::size_t d, std::vector<Monomial> terms);

/// x ↦ h(D(x − center)) with D = diag(scale).
FunctionSpec standardized(const FunctionSpec& h, std::vector<double> center, std::vector<double> scale);

/// x ↦ Φ(A_1(x_1), …, A_d(x_d)).
FunctionSpec on_weights(const FunctionSpec& phi, const std::vector<Weight>& weights);

}  // namespace covlab::fn

namespace covlab {

/// Parses the JSON function schema. `weights` is consulted by {"on_weights": …}.
FunctionSpec function_from_json(const json& j, std::size_t dim, const std::vector<Weight>* weights = nullptr,
                                const std::string& field = "f");

/// Parses an expression in x1..xd (x is an alias of x1).
FunctionSpec parse_expression(const std::string& text, std::size_t dim);
/// Largest variable index used by an expression (x counts as 1).
std::size_t expression_dimension(const std::string& text);

}  // namespace covlab
