#include <cmath>

#include "covlab/builtins.hpp"
#include "covlab/product_identities.hpp"
#include "doctest.h"

using namespace covlab;

namespace {
FunctionSpec e(const std::string& t, std::size_t d) { return parse_expression(t, d); }
ProductMeasure unit_square(std::size_t d = 2) { return ProductMeasure(Measure1D::uniform(0.0, 1.0), d); }
}  // namespace

TEST_SUITE("product_identities") {
  TEST_CASE("marginals") {
    QuadratureSpec spec;
    const FunctionSpec f = e("x1*x2", 2);
    const FunctionSpec f1 = marginalize(f, unit_square(), 1, spec);
    for (double x : {0.0, 0.3, 1.0}) CHECK(f1(x) == doctest::Approx(x / 2.0).epsilon(1e-14));
    CHECK(marginal_mean(f, unit_square(), spec) == doctest::Approx(0.25).epsilon(1e-14));
    const FunctionSpec same = marginalize(f, unit_square(), 2, spec);
    const std::vector<double> p{0.2, 0.7};
    CHECK(same(p) == doctest::Approx(0.14));
  }

  TEST_CASE("marginals inherit unconditional quasi-concavity") {
    QuadratureSpec spec;
    const ProductMeasure mu(Measure1D::gaussian(0.0, 1.0), 2);
    for (const auto& c : marginal_inheritance(e("exp(-x1^2-x1^2*x2^2-x2^4)", 2), mu, 1, spec)) {
      CAPTURE(property_name(c.property));
      CHECK(c.pass);
    }
  }

  TEST_CASE("tensorization") {
    QuadratureSpec spec;
    const TermDecomposition sum = tensorization_decompose(unit_square(), e("x1+x2", 2), e("x1+x2", 2), spec);
    REQUIRE(sum.terms.size() == 2);
    CHECK(sum.terms[0].value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(sum.terms[1].value == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

    // Cov(x1x2, x1x2) = 1/9 − 1/16, split as Var(x1/2) + E[x1²]·Var(x2) = 1/48 + 1/36.
    const TermDecomposition prod = tensorization_decompose(unit_square(), e("x1*x2", 2), e("x1*x2", 2), spec);
    CHECK(prod.terms[0].value == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
    CHECK(prod.terms[1].value == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
    CHECK(prod.total.value == doctest::Approx(7.0 / 144.0).epsilon(1e-12));
    CHECK(prod.covariance.value == doctest::Approx(7.0 / 144.0).epsilon(1e-12));
    CHECK(std::abs(prod.residual()) < 1e-12);
  }

  TEST_CASE("duplication estimator") {
    QuadratureSpec spec;
    const TermDecomposition lin = duplication_covariance(unit_square(), e("x1+x2", 2), e("x1+x2", 2), 200000, 3, spec);
    CHECK(std::abs(lin.total.value - 1.0 / 6.0) <= 4.0 * lin.total.error);
    const TermDecomposition zero =
        duplication_covariance(unit_square(), FunctionSpec::constant(2, 2.0), e("x1", 2), 1000, 3, spec);
    CHECK(zero.total.value == 0.0);
    const TermDecomposition cube =
        duplication_covariance(unit_square(3), e("x1*x2*x3", 3), e("x1*x2*x3", 3), 200000, 5, spec);
    CHECK(std::abs(cube.total.value - (1.0 / 27.0 - 1.0 / 64.0)) <= 4.0 * cube.total.error);
    // Deterministic given the seed.
    CHECK(duplication_covariance(unit_square(), e("x1*x2", 2), e("x1", 2), 1000, 9, spec).total.value ==
          duplication_covariance(unit_square(), e("x1*x2", 2), e("x1", 2), 1000, 9, spec).total.value);
  }

  TEST_CASE("product Hoeffding identity") {
    QuadratureSpec spec;
    const TermDecomposition r = product_hoeffding_identity(unit_square(), e("x1*x2", 2), e("x1*x2", 2), spec);
    REQUIRE(r.terms.size() == 2);
    CHECK(r.terms[0].value == doctest::Approx(1.0 / 48.0).epsilon(1e-10));
    CHECK(r.terms[1].value == doctest::Approx(1.0 / 36.0).epsilon(1e-10));
    const ProductMeasure mu({Measure1D::gaussian(0.0, 1.0), Measure1D::logistic(0.0, 0.5)});
    const TermDecomposition g = product_hoeffding_identity(mu, e("sin(x1)+x1*x2", 2), e("x2^3+x1", 2), spec);
    CHECK(std::abs(g.residual()) <= 1e-7 + g.error());
  }

  TEST_CASE("product relation") {
    QuadratureSpec spec;
    const ProductMeasure mu(Measure1D::uniform(-1.0, 1.0), 2);
    const ProductRelationResult r =
        product_relation_residual(mu, e("exp(x1+x2)", 2), e("x1*x2+x2", 2), 1, {}, spec);
    REQUIRE(r.terms.size() == 2);
    CHECK(std::abs(r.residual()) <= 1e-8 + r.error());
    CHECK(r.to_json().contains("terms"));
    const ProductRelationResult v3 =
        product_relation_residual(mu, e("1+x1^2*x2^2", 2), e("exp(x1^2+x2^2)", 2), 3, {}, spec);
    CHECK(v3.hypotheses_pass);
    CHECK(std::abs(v3.residual()) <= 1e-8 + v3.error());
  }

  TEST_CASE("induced density box") {
    const ProductMeasure mu(Measure1D::uniform(0.0, 1.0), 2);
    const auto box = induced_probe_box(mu, 1e-9);
    REQUIRE(box.size() == 4);
    for (const auto& iv : box) {
      CHECK(iv.lo > 0.0);
      CHECK(iv.hi < 1.0);
    }
    const auto logd = induced_log_density(mu, nullptr, 0);
    const std::vector<double> p{0.3, 0.5, 0.6, 0.5};
    CHECK(std::isfinite(logd(p)));
  }
}
