#include <cmath>
#include <fstream>

#include "covlab/builtins.hpp"
#include "covlab/errors.hpp"
#include "covlab/theorem_suite.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

json load(const std::string& rel) {
  std::ifstream in(std::string(COVLAB_SOURCE_DIR) + "/" + rel);
  REQUIRE(in.good());
  return json::parse(in);
}

CheckInput input_1d(const Measure1D& m, const std::string& f, const std::string& g) {
  CheckInput in;
  in.mu = ProductMeasure({m});
  in.f = parse_expression(f, 1);
  in.g = parse_expression(g, 1);
  return in;
}

}  // namespace

TEST_SUITE("theorem_suite") {
  TEST_CASE("verdict taxonomy") {
    CHECK(decide_verdict(false, 1.0, 1e-6, 0.0) == Verdict::hypothesis_failed);
    CHECK(decide_verdict(true, -1.0, 1e-6, 0.0) == Verdict::fail);
    CHECK(decide_verdict(true, 1.0, 1e-6, 0.0) == Verdict::pass);
    CHECK(decide_verdict(true, 1e-8, 1e-6, 1e-7) == Verdict::inconclusive);
    CHECK(decide_verdict(true, 1e-8, 1e-6, 1e-9) == Verdict::pass);
    CHECK(decide_verdict(true, NAN, 1e-6, 0.0) == Verdict::inconclusive);
    CHECK(std::string(verdict_name(Verdict::inconclusive)) == "NUMERICALLY_INCONCLUSIVE");
  }

  TEST_CASE("linear functions give equality") {
    const CheckInput in = check_input_from_json(load("configs/examples/t121_linear.json"), QuadratureSpec{});
    const CheckReport r = check("T1.2.1", in);
    CHECK(std::abs(r.margin) <= 1e-9);
    CHECK(r.verdict != Verdict::fail);
    CHECK(r.seed == 1);
    const json j = r.to_json();
    CHECK(j.at("theorem_id") == "T1.2.1");
    CHECK(j.contains("tolerance"));
  }

  TEST_CASE("three-moment corollary on the cube") {
    const CheckReport r = check("C4.7", check_input_from_json(load("configs/examples/c47_cubic.json"), QuadratureSpec{}));
    CHECK(r.margin == doctest::Approx(1.0 / 7.0 - 3.0 / 25.0).epsilon(1e-6));
    CHECK(r.verdict == Verdict::pass);
  }

  TEST_CASE("Gaussian analytic case") {
    const CheckReport r =
        check("T1.2.2", check_input_from_json(load("configs/examples/t122_gaussian.json"), QuadratureSpec{}));
    // Cov(e^{−x²}, x²) = 3^{−3/2} − 3^{−1/2}; the inequality is Cov ≤ 0.
    CHECK(r.lhs == doctest::Approx(std::pow(3.0, -1.5) - std::pow(3.0, -0.5)).epsilon(1e-6));
    CHECK(r.verdict == Verdict::pass);
  }

  TEST_CASE("missing hypothesis is not a failure") {
    const SuiteResult res = run_suite(SuiteConfig::from_json(load("configs/examples/t15_no_unconditional.json")));
    REQUIRE(res.reports.size() == 1);
    CHECK(res.reports[0].verdict == Verdict::hypothesis_failed);
    CHECK(res.exit_code() == 0);
    bool witnessed = false;
    for (const auto& h : res.reports[0].hypotheses)
      if (!h.pass) witnessed = true;
    CHECK(witnessed);
  }

  TEST_CASE("mutant checker fails") {
    const SuiteResult res = run_suite(SuiteConfig::from_json(load("configs/examples/mutant.json")));
    CHECK(res.fail_count() > 0);
    CHECK(res.exit_code() == 1);

    register_checker("T1.2.1", [](const CheckInput& in) {
      CheckReport r;
      r.theorem_id = "T1.2.1";
      r.seed = in.seed;
      r.margin = -1.0;
      r.tolerance = 1e-6;
      r.verdict = decide_verdict(true, r.margin, r.tolerance, 0.0);
      return r;
    });
    CHECK(check("T1.2.1", input_1d(Measure1D::uniform(0, 1), "x", "x")).verdict == Verdict::fail);
    reset_checkers();
    CHECK(check("T1.2.1", input_1d(Measure1D::uniform(0, 1), "x", "x")).verdict != Verdict::fail);
  }

  TEST_CASE("scale invariance") {
    const Measure1D mu = Measure1D::logistic(0.2, 0.9);
    const CheckReport base = check("T1.2.1", input_1d(mu, "x^2", "exp(x)"));
    for (double c : {0.5, 3.0}) {
      CheckInput in = input_1d(mu, "x^2", "exp(x)");
      in.f = in.f.scaled(c);
      in.g = in.g.scaled(c);
      const CheckReport r = check("T1.2.1", in);
      CHECK(r.lhs == doctest::Approx(c * c * base.lhs).epsilon(1e-10));
      CHECK(r.rhs == doctest::Approx(c * c * base.rhs).epsilon(1e-10));
      CHECK(r.verdict == base.verdict);
    }
  }

  TEST_CASE("unit-weight theorem matches its corollary") {
    CheckInput in;
    in.mu = ProductMeasure({Measure1D::uniform(-1, 1), Measure1D::gaussian(0, 1)});
    in.f = parse_expression("x1^2 + x1*x2 + x2^2", 2);
    in.g = parse_expression("exp(x1/2) + x2^4", 2);
    const CheckReport a = check("T1.3", in);
    const CheckReport b = check("C1.4", in);
    CHECK(a.lhs == b.lhs);
    CHECK(a.rhs == b.rhs);
    CHECK(a.margin == b.margin);
    CHECK(a.verdict == b.verdict);
  }

  TEST_CASE("Gaussian consistency in one dimension") {
    CheckInput in = input_1d(Measure1D::gaussian(0.0, 1.0), "x^4 + x", "cosh(x/2)");
    in.spec.trunc_eps = 1e-13;
    const CheckReport line = check("T1.2.1", in);
    const CheckReport gauss = check("T1.1.1", in);
    CHECK(line.margin == doctest::Approx(gauss.margin).epsilon(1e-9));
  }

  TEST_CASE("unknown ids and malformed configs") {
    CHECK_THROWS_AS(check("NOPE", input_1d(Measure1D::uniform(0, 1), "x", "x")), ConfigError);
    CHECK_THROWS_AS(SuiteConfig::from_json(json::parse(R"({"bogus": 1})")), ConfigError);
    CHECK_THROWS_AS(SuiteConfig::from_json(json::parse(R"({"theorems": ["T9.9"]})")), ConfigError);
    CHECK_THROWS_AS(check_input_from_json(json::parse(R"({"f": {"expr": "x"}})"), QuadratureSpec{}), ConfigError);
    CHECK(expand_theorem_ids({"T1.2*"}) == std::vector<std::string>{"T1.2.1", "T1.2.2", "T1.2.3"});
  }

  TEST_CASE("corpus is deterministic and passes") {
    SuiteConfig cfg = SuiteConfig::defaults();
    cfg.theorems = {"T1.2.1", "T1.2.2", "T1.2.3", "C4.7"};
    cfg.instances = 4;
    const SuiteResult a = run_suite(cfg), b = run_suite(cfg);
    REQUIRE(a.reports.size() == 16);
    CHECK(a.fail_count() == 0);
    CHECK(a.to_json().dump() == b.to_json().dump());
    for (const auto& r : a.reports) {
      CAPTURE(r.theorem_id);
      CHECK(r.verdict == Verdict::pass);
      // Every report can be replayed from its own echo.
      const CheckReport again = check(r.theorem_id, check_input_from_json(r.input, r.spec));
      CHECK(again.margin == doctest::Approx(r.margin).epsilon(1e-9));
    }
  }

  TEST_CASE("monotonicity probe") {
    QuadratureSpec spec;
    spec.order = 32;
    spec.panels = 4;
    const MonotonicityProbe convex = coord_increase_probe(parse_expression("x1^2 + x2^4", 2), {0.5, 1.0, 1.5}, spec);
    CHECK(convex.min_difference >= -1e-6);
    const MonotonicityProbe bump =
        coord_increase_probe(parse_expression("exp(-x1^2 - x2^2)", 2), {0.5, 1.0, 1.5}, spec);
    CHECK(bump.max_difference <= 1e-6);
  }
}
