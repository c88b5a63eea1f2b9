#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covlab/functions.hpp"
#include "covlab/measures.hpp"
#include "covlab/spec.hpp"

namespace covlab {

/// Determinant of a row-major n×n block, closed form for n ≤ 3.
double small_det(const double* a, std::size_t n);

/// Ordered collocation determinants of a function tuple.
struct ChebyshevSystem {
  std::vector<FunctionSpec> members;  // univariate
  std::size_t size() const noexcept { return members.size(); }
};

enum class ChebyshevMode { minors, derivative };

struct TupleReport {
  std::string name;
  bool pass = true;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double worst = 0.0;            // smallest determinant over the product of row sup-norms
  std::vector<double> witness;   // ordered tuple attaining `worst` when the check fails
  std::string detail;
  json to_json() const;
};

/// det(f_i(t_j)) on `trials` ordered tuples t_1 < … < t_r drawn uniformly in `box`.
double collocation_det(const ChebyshevSystem& sys, const std::vector<double>& t);

/// D(x1,x2,x3) = det[[1,1,1],[u(x_k)],[U(x_k)]] ≥ −τ on ordered triples.
TupleReport assumption_C_check(const FunctionSpec& u, const FunctionSpec& U, Interval box, std::size_t trials,
                               std::uint64_t seed);

/// ε(σ)·D(x_σ) ≥ −τ for random triples and random permutations σ.
TupleReport permutation_sign_check(const FunctionSpec& u, const FunctionSpec& U, Interval box, std::size_t trials,
                                   std::uint64_t seed);

/// Derivative mode drops the leading constant member and tests (f_2', …, f_r').
TupleReport chebyshev_certify(const ChebyshevSystem& sys, ChebyshevMode mode, Interval box, std::size_t trials,
                              std::uint64_t seed);

struct ChebyshevAgreement {
  TupleReport minors, derivative;
  bool agree = true;
};
ChebyshevAgreement chebyshev_cross_validate(const ChebyshevSystem& sys, Interval box, std::size_t trials,
                                            std::uint64_t seed);

struct AndreevResult {
  Estimate lhs;  // det(E[f_i g_j])
  Estimate rhs;  // (1/n!) E[det(f_i(X_j)) det(g_i(X_j))] over n independent copies
  double residual() const { return lhs.value - rhs.value; }
  double error() const { return lhs.error + rhs.error; }
};

AndreevResult andreev_lhs_rhs(const Measure1D& mu, const std::vector<FunctionSpec>& fs,
                              const std::vector<FunctionSpec>& gs, const QuadratureSpec& spec);

struct DetCovResult {
  std::vector<TupleReport> hypotheses;  // (1,F…) and (1,G…) collocation checks
  bool hypotheses_pass = true;
  Eigen::MatrixXd cov;
  Estimate det;
  double bordered = 0.0;  // det of the (n+1)×(n+1) moment matrix of (1,F) against (1,G)
  bool bordered_agree = true;
};

/// det Cov(F,G). The Chebyshev hypotheses are certified and reported; the determinant is
/// computed either way so that callers can decide what a failed hypothesis means. With n = 2, F = (u,U) and
/// G = (v,V) the determinant is Cov(u,v)Cov(U,V) − Cov(u,V)Cov(U,v).
DetCovResult det_cov_matrix(const Measure1D& mu, const std::vector<FunctionSpec>& F,
                            const std::vector<FunctionSpec>& G, const QuadratureSpec& spec,
                            std::size_t trials = 2000, std::uint64_t seed = 1);

}  // namespace covlab
