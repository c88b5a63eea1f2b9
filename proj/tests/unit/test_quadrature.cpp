#include <cmath>

#include "covlab/builtins.hpp"
#include "covlab/quadrature.hpp"
#include "doctest.h"

using namespace covlab;

namespace {
FunctionSpec x1() { return FunctionSpec::coordinate(1, 0); }
FunctionSpec expr(const std::string& t) { return parse_expression(t, 1); }
}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre exactness") {
    for (int order : {2, 5, 16, 64}) {
      const Rule1D& r = gauss_legendre(order);
      REQUIRE(r.size() == static_cast<std::size_t>(order));
      double mass = 0.0, top = 0.0;
      const int deg = 2 * order - 2;  // even and ≤ 2n − 1
      for (std::size_t k = 0; k < r.size(); ++k) {
        mass += r.weights[k];
        top += r.weights[k] * std::pow(r.nodes[k], deg);
      }
      CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(top == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-12));
    }
  }

  TEST_CASE("box integrals") {
    QuadratureSpec spec;
    CHECK(integrate([](Point x) { return x[0]; }, {{0.0, 1.0}}, spec).value == doctest::Approx(0.5).epsilon(1e-15));
    const Estimate m = integrate_diagonal_split([](double x, double y) { return std::min(x, y); }, {0.0, 1.0}, spec);
    CHECK(m.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(m.error < 1e-12);
    const Estimate xy = integrate([](Point x) { return x[0] * x[1] * x[1]; }, {{0.0, 1.0}, {0.0, 2.0}}, spec);
    CHECK(xy.value == doctest::Approx(0.5 * 8.0 / 3.0).epsilon(1e-14));
  }

  TEST_CASE("panel partition honours breakpoints") {
    const auto panels = panel_partition({0.0, 1.0}, 2, {0.3});
    REQUIRE(panels.size() == 3);
    CHECK(panels[0].hi == 0.3);
    CHECK(panels[1].lo == 0.3);
    CHECK(panels[2].hi == 1.0);
    // A kink at 0.3 is integrated exactly once it is a breakpoint.
    const Rule1D r = composite_gauss_legendre({0.0, 1.0}, 8, 2, {0.3});
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * std::abs(r.nodes[k] - 0.3);
    CHECK(s == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
  }

  TEST_CASE("Gaussian normalization and tails") {
    QuadratureSpec spec;
    const Measure1D g = Measure1D::gaussian(0.0, 1.0);
    const Interval box = g.truncated_support(1e-12);
    const double mass = integrate([&](Point x) { return g.pdf(x[0]); }, {box}, spec).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    const Rule1D r = measure_rule(g, spec);
    double total = 0.0;
    for (double w : r.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("covariances") {
    QuadratureSpec spec;
    const ProductMeasure u(Measure1D::uniform(0.0, 1.0), 1);
    CHECK(covariance(u, x1(), x1(), spec).value == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    const ProductMeasure sym(Measure1D::uniform(-1.0, 1.0), 1);
    CHECK(covariance(sym, expr("x^3"), x1(), spec).value == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(std::abs(covariance(u, FunctionSpec::constant(1, 3.0), expr("exp(x)"), spec).value) < 1e-15);
    const ProductMeasure g(Measure1D::gaussian(0.0, 1.0), 1);
    spec.trunc_eps = 1e-14;
    CHECK(covariance(g, expr("x^2"), expr("x^2"), spec).value == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("covariance is bilinear and symmetric") {
    QuadratureSpec spec;
    const ProductMeasure mu({Measure1D::logistic(0.0, 1.0), Measure1D::exponential(2.0)});
    const FunctionSpec f = parse_expression("x1*x2 + sin(x1)", 2);
    const FunctionSpec g = parse_expression("x2^2 - x1", 2);
    const FunctionSpec h = parse_expression("exp(-x1^2) + x2", 2);
    const double lhs = covariance(mu, f.scaled(2.0) + g, h, spec).value;
    const double rhs = 2.0 * covariance(mu, f, h, spec).value + covariance(mu, g, h, spec).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(covariance(mu, f, h, spec).value == doctest::Approx(covariance(mu, h, f, spec).value).epsilon(1e-13));

    const Eigen::MatrixXd C = covariance_matrix(mu, {f, g}, {h, f}, spec);
    CHECK(C(0, 0) == doctest::Approx(covariance(mu, f, h, spec).value).epsilon(1e-12));
    CHECK(C(1, 1) == doctest::Approx(covariance(mu, g, f, spec).value).epsilon(1e-12));
  }

  TEST_CASE("Monte Carlo fallback above the dimension cap") {
    QuadratureSpec spec;
    spec.det_dim_cap = 2;
    spec.mc_samples = 200000;
    const ProductMeasure mu(Measure1D::uniform(0.0, 1.0), 3);
    REQUIRE_FALSE(deterministic(mu, spec));
    const FunctionSpec f = parse_expression("x1+x2+x3", 3);
    const Estimate c = covariance(mu, f, f, spec);
    CHECK(c.error > 0.0);
    CHECK(std::abs(c.value - 0.25) < 5.0 * c.error);
    // Same seed, same answer.
    CHECK(covariance(mu, f, f, spec).value == c.value);
  }

  TEST_CASE("tabulated primitive") {
    const Primitive1D P([](double t) { return std::cos(t); }, {0.0, 3.0}, 32, 8, {}, 0.0);
    for (double x : {0.0, 0.4, 1.7, 3.0}) CHECK(P(x) == doctest::Approx(std::sin(x)).epsilon(1e-13));
  }

  TEST_CASE("spec coarsening") {
    QuadratureSpec spec;
    spec.order = 32;
    spec.panels = 4;
    spec.max_tensor_nodes = 300000;
    const QuadratureSpec s3 = spec.for_dimension(3);
    const double per_axis = static_cast<double>(s3.order) * s3.panels;
    CHECK(std::pow(per_axis, 3) <= 300000.0);
    CHECK(spec.for_dimension(1).order == 32);
    CHECK(spec.halved().order == 16);
    QuadratureSpec bad;
    bad.order = 0;
    CHECK_THROWS(bad.validate());
  }
}
