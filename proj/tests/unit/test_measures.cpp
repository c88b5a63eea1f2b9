#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "covlab/measures.hpp"
#include "covlab/quadrature.hpp"
#include "doctest.h"

using namespace covlab;

namespace {

Measure1D coin() { return Measure1D::discrete({{0.0, 0.5}, {1.0, 0.5}}); }

std::vector<Measure1D> continuous_families() {
  return {Measure1D::gaussian(0.3, 1.7),
          Measure1D::uniform(-1.0, 2.0),
          Measure1D::exponential(1.5),
          Measure1D::logistic(-0.5, 0.8),
          Measure1D::gaussian_scale_mixture({{0.5, 1.0}, {1.5, 2.0}}),
          Measure1D::grid_density({-1.0, 0.0, 1.0, 2.0}, {0.2, 1.0, 0.5, 0.1})};
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("cdf at reference points") {
    CHECK(Measure1D::uniform(0.0, 1.0).cdf(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(coin().cdf(0.3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Measure1D::gaussian(0.0, 1.0).cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("cdf is right-continuous at atoms") {
    const Measure1D m = coin();
    CHECK(m.cdf(-1e-12) == 0.0);
    CHECK(m.cdf(0.0) == doctest::Approx(0.5));
    CHECK(m.cdf(1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("truncated support") {
    const Interval u = Measure1D::uniform(0.0, 1.0).truncated_support(1e-9);
    CHECK(u.lo == 0.0);
    CHECK(u.hi == 1.0);
    const Interval d = coin().truncated_support(0.3);
    CHECK(d.lo == 0.0);
    CHECK(d.hi == 1.0);
    // Independent quantile from Boost.
    const double z = boost::math::quantile(boost::math::complement(boost::math::normal(0.0, 1.0), 1e-9));
    const Interval g = Measure1D::gaussian(0.0, 1.0).truncated_support(1e-9);
    CHECK(g.hi == doctest::Approx(z).epsilon(1e-10));
    CHECK(g.lo == doctest::Approx(-z).epsilon(1e-10));
  }

  TEST_CASE("centered primitives") {
    QuadratureSpec spec;
    const Weight unit_u = Weight::unit(Measure1D::uniform(0.0, 1.0));
    CHECK(unit_u.A(0.8) == doctest::Approx(0.3).epsilon(1e-14));
    const Weight unit_g = Weight::unit(Measure1D::gaussian(0.0, 1.0));
    CHECK(unit_g.A(1.25) == doctest::Approx(1.25).epsilon(1e-14));

    // a(x) = 2x on uniform(0,1): A(x) = x² − 1/3. The primitive is tabulated numerically here.
    const Measure1D u = Measure1D::uniform(0.0, 1.0);
    const Weight w = centered_primitive(u, [](double x) { return 2.0 * x; }, spec);
    for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(w.A(x) == doctest::Approx(x * x - 1.0 / 3.0).epsilon(1e-10));
    // Midpoint-rule mean over a 10^4 grid is an independent check of the centering.
    double mean = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) mean += w.A((k + 0.5) / n) / n;
    CHECK(std::abs(mean) < 1e-8);
  }

  TEST_CASE("sampling is deterministic and consistent") {
    const ProductMeasure u(Measure1D::uniform(0.0, 1.0), 1);
    const PointSet a = sample(u, 3, 7), b = sample(u, 3, 7);
    REQUIRE(a.size() == 3);
    CHECK(a.data == b.data);
    for (double x : a.data) CHECK((x >= 0.0 && x <= 1.0));

    const PointSet c = sample(ProductMeasure(coin(), 1), 100000, 1);
    double m = 0.0;
    for (double x : c.data) m += x;
    CHECK(std::abs(m / 1e5 - 0.5) < 0.01);

    const PointSet g = sample(ProductMeasure(Measure1D::gaussian(0.0, 1.0), 2), 100000, 1);
    double s00 = 0, s11 = 0, s01 = 0, m0 = 0, m1 = 0;
    const double n = static_cast<double>(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      m0 += g.row(k)[0] / n;
      m1 += g.row(k)[1] / n;
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.row(k)[0] - m0, y = g.row(k)[1] - m1;
      s00 += x * x / n;
      s11 += y * y / n;
      s01 += x * y / n;
    }
    CHECK(std::abs(s00 - 1.0) < 0.02);
    CHECK(std::abs(s11 - 1.0) < 0.02);
    CHECK(std::abs(s01) < 0.02);
  }

  TEST_CASE("density mass over the truncated support") {
    QuadratureSpec spec;
    spec.order = 64;
    spec.panels = 16;
    for (const auto& m : continuous_families()) {
      CAPTURE(m.describe());
      const Interval box = m.truncated_support(1e-12);
      const double mass = integrate([&](Point x) { return m.pdf(x[0]); }, {box}, spec, {m.breakpoints()}).value;
      CHECK(mass >= 1.0 - 1e-8);
      CHECK(mass <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("moments match the quadrature") {
    QuadratureSpec spec;
    spec.trunc_eps = 1e-14;
    for (const auto& m : continuous_families()) {
      CAPTURE(m.describe());
      const ProductMeasure pm({m});
      const double mean = expectation(pm, [](Point x) { return x[0]; }, spec).value;
      const double second = expectation(pm, [](Point x) { return x[0] * x[0]; }, spec).value;
      CHECK(mean == doctest::Approx(m.mean()).epsilon(1e-8));
      CHECK(second - mean * mean == doctest::Approx(m.variance()).epsilon(1e-7));
    }
  }

  TEST_CASE("json round trip and validation") {
    const json j = json::parse(R"({"family":"gaussian","params":{"mean":1.0,"sigma":2.0}})");
    const Measure1D m = Measure1D::from_json(j);
    CHECK(m.mean() == 1.0);
    CHECK(m.variance() == doctest::Approx(4.0));
    CHECK(Measure1D::from_json(m.to_json()).to_json() == m.to_json());
    CHECK_THROWS(Measure1D::from_json(json::parse(R"({"family":"gaussian","params":{"sigma":-1}})")));
    CHECK_THROWS(Measure1D::from_json(json::parse(R"({"family":"nope"})")));
  }

  TEST_CASE("symmetry and log-concavity flags") {
    CHECK(Measure1D::gaussian(0.0, 2.0).is_even());
    CHECK_FALSE(Measure1D::gaussian(0.5, 2.0).is_even());
    CHECK(Measure1D::discrete({{-1.0, 0.25}, {1.0, 0.25}, {0.0, 0.5}}).is_even());
    CHECK(Measure1D::logistic(0.0, 1.0).is_log_concave());
    CHECK_FALSE(Measure1D::gaussian_scale_mixture({{0.3, 1.0}, {3.0, 1.0}}).is_log_concave());
  }
}
