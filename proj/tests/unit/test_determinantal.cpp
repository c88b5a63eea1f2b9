#include <cmath>

#include "covlab/builtins.hpp"
#include "covlab/determinantal.hpp"
#include "doctest.h"

using namespace covlab;

namespace {
FunctionSpec e(const std::string& t) { return parse_expression(t, 1); }
}  // namespace

TEST_SUITE("determinantal") {
  TEST_CASE("small determinants") {
    const double a2[] = {1, 2, 3, 4};
    CHECK(small_det(a2, 2) == doctest::Approx(-2.0));
    const double a3[] = {2, 0, 1, 1, 3, 2, 1, 1, 1};
    CHECK(small_det(a3, 3) == doctest::Approx(2 * (3 - 2) - 0 + 1 * (1 - 3)));
    const double a4[] = {1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 3, 0, 0, 0, 0, 4};
    CHECK(small_det(a4, 4) == doctest::Approx(24.0));
  }

  TEST_CASE("collocation determinant of a Vandermonde system") {
    const ChebyshevSystem v{{e("1"), e("x"), e("x^2")}};
    // Π_{i<j}(t_j − t_i) at (0, 1, 2).
    CHECK(collocation_det(v, {0.0, 1.0, 2.0}) == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("assumption C on pairs") {
    const Interval box{0.1, 2.0};
    CHECK(assumption_C_check(e("x"), e("x^2"), box, 2000, 1).pass);
    CHECK(assumption_C_check(e("exp(-x)"), e("-exp(-2*x)"), box, 2000, 1).pass);
    const TupleReport bad = assumption_C_check(e("x"), e("-x^2"), box, 2000, 1);
    CHECK_FALSE(bad.pass);
    CHECK(bad.witness.size() == 3);
    CHECK(bad.to_json().contains("worst"));
  }

  TEST_CASE("permutation signs follow the ordered check") {
    const Interval box{0.1, 2.0};
    CHECK(permutation_sign_check(e("x"), e("x^2"), box, 1000, 2).pass);
    CHECK_FALSE(permutation_sign_check(e("x"), e("-x^2"), box, 1000, 2).pass);
  }

  TEST_CASE("Chebyshev certification in both modes") {
    const ChebyshevSystem good{{e("1"), e("x"), e("exp(x)")}};
    const ChebyshevAgreement a = chebyshev_cross_validate(good, {-2.0, 2.0}, 1000, 3);
    CHECK(a.minors.pass);
    CHECK(a.derivative.pass);
    CHECK(a.agree);

    const ChebyshevSystem bad{{e("1"), e("x"), e("sin(x)")}};
    CHECK_FALSE(chebyshev_certify(bad, ChebyshevMode::minors, {0.0, 10.0}, 2000, 3).pass);
    CHECK_FALSE(chebyshev_certify(bad, ChebyshevMode::derivative, {0.0, 10.0}, 2000, 3).pass);
  }

  TEST_CASE("Andreev identity") {
    QuadratureSpec spec;
    const Measure1D u = Measure1D::uniform(0.0, 1.0);
    // det [[1, 1/2], [1/2, 1/3]] = 1/12.
    const AndreevResult r = andreev_lhs_rhs(u, {e("1"), e("x")}, {e("1"), e("x")}, spec);
    CHECK(r.lhs.value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(r.rhs.value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    const AndreevResult s = andreev_lhs_rhs(Measure1D::gaussian(0.0, 1.0), {e("1"), e("x"), e("x^2")},
                                            {e("1"), e("sin(x)"), e("x^2")}, spec);
    CHECK(std::abs(s.residual()) <= 1e-9 + s.error());
  }

  TEST_CASE("determinant of covariance matrices") {
    QuadratureSpec spec;
    const Measure1D u = Measure1D::uniform(0.0, 1.0);
    const DetCovResult one = det_cov_matrix(u, {e("x")}, {e("x")}, spec, 200, 1);
    CHECK(one.det.value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

    // Var X = 1/12, Cov(X, X²) = 1/12, Var X² = 4/45, so det = 4/540 − 1/144 = 1/2160.
    const DetCovResult two = det_cov_matrix(u, {e("x"), e("x^2")}, {e("x"), e("x^2")}, spec, 500, 1);
    CHECK(two.hypotheses_pass);
    CHECK(two.det.value == doctest::Approx(1.0 / 2160.0).epsilon(1e-10));
    CHECK(two.bordered_agree);
    CHECK(two.bordered == doctest::Approx(two.det.value).epsilon(1e-8));
  }
}
