#include <cmath>

#include "covlab/builtins.hpp"
#include "covlab/relations1d.hpp"
#include "doctest.h"

using namespace covlab;

namespace {
FunctionSpec e(const std::string& t) { return parse_expression(t, 1); }
const Measure1D kUniform = Measure1D::uniform(0.0, 1.0);
}  // namespace

TEST_SUITE("relations1d") {
  TEST_CASE("plain induced normalizer is the variance") {
    QuadratureSpec spec;
    const InducedMeasure2D m = induced_measure(kUniform, InducedKind::plain, nullptr, nullptr, nullptr, spec);
    CHECK(m.Z().value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(m.Z_cov_form() == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(m.density(0.5, 0.5) == doctest::Approx(0.25 * 12.0).epsilon(1e-12));
    // The density integrates to one.
    CHECK(m.expectation([](double) { return 1.0; }, [](double) { return 1.0; }, spec).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("f-weighted with f = 1 reduces to the plain measure") {
    QuadratureSpec spec;
    const FunctionSpec one = e("1");
    const InducedMeasure2D w = induced_measure(kUniform, InducedKind::f_weighted, &one, nullptr, nullptr, spec);
    const InducedMeasure2D p = induced_measure(kUniform, InducedKind::plain, nullptr, nullptr, nullptr, spec);
    CHECK(w.Z().value == doctest::Approx(p.Z().value).epsilon(1e-13));
    for (double x : {0.1, 0.6})
      for (double y : {0.3, 0.9}) CHECK(w.density(x, y) == doctest::Approx(p.density(x, y)).epsilon(1e-13));
  }

  TEST_CASE("fg-weighted normalizer") {
    QuadratureSpec spec;
    const FunctionSpec f = e("exp(-x)");
    const InducedMeasure2D m = induced_measure(kUniform, InducedKind::fg_weighted, &f, &f, nullptr, spec);
    // Var(e^{-X}) for X uniform on [0,1].
    const double expected = (1.0 - std::exp(-2.0)) / 2.0 - std::pow(1.0 - std::exp(-1.0), 2);
    CHECK(m.Z().value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(m.Z_cov_form() == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("one-dimensional Hoeffding identity") {
    QuadratureSpec spec;
    spec.trunc_eps = 1e-13;
    for (const Measure1D& mu : {kUniform, Measure1D::gaussian(0.5, 1.3), Measure1D::logistic(0.0, 1.0)}) {
      CAPTURE(mu.describe());
      const HoeffdingResult r = hoeffding_identity(mu, e("x^3"), e("sin(x)"), spec);
      CHECK(r.lhs.value == doctest::Approx(r.rhs.value).epsilon(1e-7));
    }
    const HoeffdingResult u = hoeffding_identity(kUniform, e("x"), e("x"), spec);
    CHECK(u.lhs.value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(u.rhs.value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  }

  TEST_CASE("variant one") {
    QuadratureSpec spec;
    // f = g = x: Cov/Z − Cov(A,f)²/Z² = 1 − 1.
    const RelationResult lin = relation_residual(kUniform, e("x"), e("x"), 1, nullptr, spec);
    CHECK(std::abs(lin.lhs.value) < 1e-12);
    CHECK(std::abs(lin.residual()) < 1e-10);

    // Standard Gaussian, f = g = x²: Cov(x², x²) = 2 and Cov(x, x²) = 0.
    spec.trunc_eps = 1e-13;
    const RelationResult sq = relation_residual(Measure1D::gaussian(0.0, 1.0), e("x^2"), e("x^2"), 1, nullptr, spec);
    CHECK(sq.lhs.value == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(sq.residual()) <= 1e-7 + sq.error());
    CHECK(sq.det_consistent);
    CHECK(sq.Z_direct == doctest::Approx(sq.Z_cov_form).epsilon(1e-9));
  }

  TEST_CASE("variants two and three") {
    QuadratureSpec spec;
    const Measure1D mu = Measure1D::uniform(-1.0, 1.0);
    const RelationResult v2 = relation_residual(mu, e("exp(x)"), e("x^3-x"), 2, nullptr, spec);
    CHECK(v2.hypotheses_pass);
    CHECK(std::abs(v2.residual()) <= 1e-9 + v2.error());
    const RelationResult v3 = relation_residual(mu, e("1+x^2"), e("exp(x^2)"), 3, nullptr, spec);
    CHECK(v3.hypotheses_pass);
    CHECK(std::abs(v3.residual()) <= 1e-9 + v3.error());
    CHECK(v3.to_json().contains("hypotheses"));
    // A non-positive f violates the variant-two hypothesis.
    CHECK_FALSE(relation_residual(mu, e("x"), e("x"), 2, nullptr, spec).hypotheses_pass);
  }

  TEST_CASE("weighted relation") {
    QuadratureSpec spec;
    const Weight w = centered_primitive(kUniform, [](double x) { return 1.0 + x; }, spec, 0,
                                        [](double) { return 1.0; });
    const RelationResult r = relation_residual(kUniform, e("x^2"), e("exp(x)"), 1, &w, spec);
    CHECK(r.weighted);
    CHECK(std::abs(r.residual()) <= 1e-9 + r.error());
  }
}
