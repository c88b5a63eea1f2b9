#include <cmath>

#include "covlab/builtins.hpp"
#include "covlab/oracle.hpp"
#include "doctest.h"

using namespace covlab;
using namespace covlab::oracle;

namespace {
FunctionSpec e(const std::string& t, std::size_t d = 1) { return parse_expression(t, d); }
const std::vector<Atom> kCoin{{0.0, 0.5}, {1.0, 0.5}};
const std::vector<Atom> kThree{{-1.0, 1.0 / 3}, {0.0, 1.0 / 3}, {1.0, 1.0 / 3}};
}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("exact moments") {
    const DiscreteProduct coin({kCoin});
    CHECK(exact_covariance(coin, e("x"), e("x")) == doctest::Approx(0.25).epsilon(1e-15));
    const DiscreteProduct three({kThree});
    CHECK(exact_expectation(three, e("x")) == doctest::Approx(0.0));
    CHECK(std::abs(exact_covariance(three, e("x"), e("x^2"))) < 1e-15);
    CHECK(exact_covariance(three, e("x^2"), e("x^2")) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    const DiscreteProduct sq({kCoin, kThree});
    CHECK(sq.atom_count() == 6);
    double mass = 0.0;
    sq.for_each([&](const std::vector<double>&, double p) { mass += p; });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("cell kernel") {
    const auto K = cell_kernel(kThree);
    REQUIRE(K.size() == 2);
    CHECK(K[0][0] == doctest::Approx(2.0 / 9.0));
    CHECK(K[0][1] == doctest::Approx(1.0 / 9.0));
    CHECK(K[1][1] == doctest::Approx(2.0 / 9.0));
  }

  TEST_CASE("exact Hoeffding") {
    const Sides s = exact_hoeffding(kCoin, e("x"), e("x"));
    CHECK(s.lhs == doctest::Approx(0.25));
    CHECK(s.rhs == doctest::Approx(0.25));
    const Sides t = exact_hoeffding(kThree, e("x^3+x"), e("exp(x)"));
    CHECK(std::abs(t.residual()) < 1e-14);
    const Sides c = exact_hoeffding(kThree, e("5"), e("x"));
    CHECK(c.lhs == 0.0);
    CHECK(c.rhs == 0.0);
    const Sides q = exact_hoeffding(kThree, e("x^2"), e("x^2"));
    CHECK(q.lhs == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(q.rhs == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  }

  TEST_CASE("exact Andreev") {
    // det [[1, 1/2], [1/2, 1/2]] = 1/4.
    const Sides s = exact_andreev(kCoin, {e("1"), e("x")}, {e("1"), e("x")});
    CHECK(s.lhs == doctest::Approx(0.25));
    CHECK(s.rhs == doctest::Approx(0.25));
    const Sides flat = exact_andreev(kCoin, {e("1"), e("x")}, {e("1"), e("2")});
    CHECK(std::abs(flat.lhs) < 1e-15);
    CHECK(std::abs(flat.rhs) < 1e-15);
    const Sides cubic = exact_andreev(kThree, {e("1"), e("x"), e("x^2")}, {e("1"), e("x"), e("x^2")});
    CHECK(std::abs(cubic.residual()) < 1e-14);
    // Moment matrix [[1,0,2/3],[0,2/3,0],[2/3,0,2/3]] has determinant 2/3·(2/3 − 4/9).
    CHECK(cubic.lhs == doctest::Approx(4.0 / 27.0).epsilon(1e-13));
    const Sides b = exact_bivariate_andreev(kThree, {e("x"), e("x^2")}, {e("x"), e("x^2")});
    CHECK(std::abs(b.residual()) < 1e-14);
    // Cov matrix on the three-point measure is diag(2/3, 2/9).
    CHECK(b.lhs == doctest::Approx(4.0 / 27.0).epsilon(1e-13));
  }

  TEST_CASE("exact product identities") {
    const DiscreteProduct dp({kCoin, kThree});
    const FunctionSpec f = e("x1*x2+x2^2", 2), g = e("exp(x1)-x2", 2);
    std::vector<double> terms;
    for (const Sides& s : {exact_tensorization(dp, f, g, &terms), exact_duplication(dp, f, g),
                           exact_product_hoeffding(dp, f, g)})
      CHECK(std::abs(s.residual()) < 1e-13);
    CHECK(terms.size() == 2);
  }

  TEST_CASE("battery") {
    for (const BatteryLine& line : verify_battery(7, 60)) {
      CAPTURE(line.identity);
      CHECK(line.instances == 60);
      CHECK(line.pass());
    }
  }
}
