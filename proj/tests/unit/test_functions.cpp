#include <cmath>

#include "covlab/builtins.hpp"
#include "covlab/functions.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

FunctionSpec expr(const std::string& text, std::size_t d = 1) { return parse_expression(text, d); }

ProbeSpec box1(double lo, double hi) { return ProbeSpec::for_box({{lo, hi}}); }

}  // namespace

TEST_SUITE("functions") {
  TEST_CASE("certification of the one-dimensional examples") {
    CHECK(certify(fn::poly1d({0.0, 0.0, 1.0}), Property::convex, box1(-3, 3)).pass);
    CHECK(certify(expr("exp(-x^2)"), Property::log_concave, box1(-3, 3)).pass);

    const FunctionSpec bump = expr("1/(1+x^2)");
    CHECK(certify(bump, Property::quasi_concave, box1(-3, 3)).pass);
    CHECK(certify(bump, Property::even, box1(-3, 3)).pass);
    const Certification c = certify(bump, Property::convex, box1(-3, 3));
    CHECK_FALSE(c.pass);
    CHECK(c.worst < 0.0);
    REQUIRE_FALSE(c.witness.empty());
    // 1/(1+x²) is concave on |x| < 1/√3.
    CHECK(std::abs(c.witness.front()[0]) < 1.0 / std::sqrt(3.0));
  }

  TEST_CASE("certification rejects non-members") {
    CHECK_FALSE(certify(expr("-x^2"), Property::convex, box1(-2, 2)).pass);
    CHECK_FALSE(certify(expr("exp(x^4)"), Property::log_concave, box1(-2, 2)).pass);
    CHECK_FALSE(certify(expr("x^2"), Property::quasi_concave, box1(-2, 2)).pass);
    CHECK_FALSE(certify(expr("x"), Property::even, box1(-2, 2)).pass);
    CHECK(certify(expr("x1^2+x2^4", 2), Property::unconditional, ProbeSpec::for_box({{-2, 2}, {-2, 2}})).pass);
    CHECK_FALSE(certify(expr("x1*x2", 2), Property::unconditional, ProbeSpec::for_box({{-2, 2}, {-2, 2}})).pass);
  }

  TEST_CASE("multivariate convexity") {
    const ProbeSpec box = ProbeSpec::for_box({{-2, 2}, {-2, 2}});
    CHECK(certify(fn::softmax_free_energy(2.0, 2), Property::convex, box).pass);
    CHECK(certify(expr("x1^2+x1*x2+x2^2", 2), Property::convex, box).pass);
    CHECK_FALSE(certify(expr("x1^2+3*x1*x2+x2^2", 2), Property::convex, box).pass);
  }

  TEST_CASE("sign conditions") {
    const ProbeSpec box = ProbeSpec::for_box({{-1, 1}, {-1, 1}});
    const FunctionSpec f = expr("x1*x2", 2);
    CHECK(check_sign_condition(f, f, {}, "cond-l2-fg", box).pass);

    const SignConditionReport r =
        check_sign_condition(expr("x1^2-x2^2", 2), expr("x1^2+x2^2", 2), {}, "cond-l2-fg", box);
    CHECK_FALSE(r.pass);
    bool found_incompatible = false;
    for (const auto& e : r.entries) {
      if (!e.compatible) {
        found_incompatible = true;
        CHECK(e.i == 1);
        CHECK(e.j == 1);
      }
    }
    CHECK(found_incompatible);
    CHECK(r.to_json().contains("entries"));
    CHECK_THROWS(check_sign_condition(f, f, {}, "cond-unknown", box));
  }

  TEST_CASE("softmax Hessian signs") {
    const FunctionSpec sm = fn::softmax_free_energy(1.5, 3);
    const std::vector<double> x{0.2, -0.7, 1.1};
    const Eigen::MatrixXd H = sm.hessian(x);
    for (int i = 0; i < 3; ++i) {
      CHECK(H(i, i) > 0.0);
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(H(i, j) < 0.0);
    }
    // Rows sum to zero because the free energy shifts by c along (1, 1, 1).
    for (int i = 0; i < 3; ++i) CHECK(std::abs(H.row(i).sum()) < 1e-12);
    // Analytic Hessian versus differences of the analytic gradient.
    const double h = 1e-5;
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Eigen::VectorXd fd = (sm.gradient(xp) - sm.gradient(xm)) / (2 * h);
      for (int i = 0; i < 3; ++i) CHECK(H(i, static_cast<int>(j)) == doctest::Approx(fd(i)).epsilon(1e-7));
    }
  }

  TEST_CASE("classify_sign") {
    CHECK(classify_sign({1.0, 2.0}, {1e-9, 1e-9}) == Sign::positive);
    CHECK(classify_sign({-1.0, 0.0}, {1e-9, 1e-9}) == Sign::negative);
    CHECK(classify_sign({1e-12, -1e-12}, {1e-9, 1e-9}) == Sign::zero);
    CHECK(classify_sign({1.0, -1.0}, {1e-9, 1e-9}) == Sign::mixed);
  }

  TEST_CASE("layer cake of a Gaussian bump") {
    const FunctionSpec g = expr("exp(-x^2)");
    const LayerCake lc = layer_cake_decompose(g, 200, 6.0);
    CHECK(lc.max_value == doctest::Approx(1.0));
    REQUIRE(lc.levels.size() == 200);
    for (const auto& level : lc.levels) {
      if (level.t >= 1.0) continue;
      CHECK(level.r == doctest::Approx(std::sqrt(-std::log(level.t))).epsilon(1e-9));
    }
    const FunctionSpec shifted = expr("exp(-x^2+1)");
    const LayerCake two = layer_cake_decompose(shifted, 2, 6.0);
    // t_1 = e/2 solves e^{1−r²} = e/2, r = √(ln 2).
    CHECK(two.levels.front().r == doctest::Approx(std::sqrt(std::log(2.0))).epsilon(1e-9));
  }

  TEST_CASE("layer cake reconstruction of a tent") {
    const FunctionSpec tent = FunctionSpec::univariate([](double x) { return std::max(0.0, 1.0 - std::abs(x)); });
    const LayerCake lc = layer_cake_decompose(tent, 1000, 2.0);
    double worst = 0.0;
    for (int k = -200; k <= 200; ++k) {
      const double x = k / 100.0;
      worst = std::max(worst, std::abs(lc.reconstruct(x) - tent(x)));
    }
    CHECK(worst <= 2e-3);
    CHECK_THROWS(layer_cake_decompose(expr("x^2"), 10, 1.0));
  }

  TEST_CASE("finite differences agree with analytic gradients") {
    const FunctionSpec q = fn::quadratic((Eigen::MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished(),
                                         Eigen::Vector2d(0.3, -0.2), 1.0);
    REQUIRE(q.has_analytic_gradient());
    for (const auto& x : std::vector<std::vector<double>>{{0.0, 0.0}, {1.0, -2.0}, {-0.3, 0.7}}) {
      for (std::size_t i = 0; i < 2; ++i) CHECK(q.fd_partial(i, x) == doctest::Approx(q.partial(i, x)).epsilon(1e-7));
    }
    const FunctionSpec e = expr("sin(x1)*exp(x2)", 2);
    const std::vector<double> x{0.4, -0.3};
    CHECK(e.partial(0, x) == doctest::Approx(std::cos(0.4) * std::exp(-0.3)).epsilon(1e-7));
    CHECK(e.partial(1, x) == doctest::Approx(std::sin(0.4) * std::exp(-0.3)).epsilon(1e-7));
  }

  TEST_CASE("log form survives underflow") {
    const FunctionSpec h = expr("-x^2");
    const FunctionSpec f = h.exp();
    const double x = 40.0;
    CHECK(f(x) == 0.0);
    CHECK(f.log_value(Point(&x, 1)) == doctest::Approx(-1600.0));
    CHECK(neg_log_second(f, 0, 0, Point(&x, 1)) == doctest::Approx(2.0).epsilon(1e-6));
  }

  TEST_CASE("expression parsing") {
    CHECK(expression_dimension("x1 + x3") == 3);
    CHECK(expression_dimension("x^2") == 1);
    const FunctionSpec p = expr("2*x1 - x2^3 + cosh(x1)", 2);
    const std::vector<double> x{0.5, 2.0};
    CHECK(p(x) == doctest::Approx(1.0 - 8.0 + std::cosh(0.5)));
    CHECK_THROWS(parse_expression("x1 +", 1));
    CHECK_THROWS(parse_expression("foo(x)", 1));
  }
}
