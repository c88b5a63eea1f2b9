#include <cmath>
#include <sstream>

#include "covlab/kernels.hpp"
#include "doctest.h"

using namespace covlab;

TEST_SUITE("kernels") {
  TEST_CASE("kernel values") {
    const HoeffdingKernel u(Measure1D::uniform(0.0, 1.0));
    CHECK(u(0.5, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(u(0.2, 0.7) == doctest::Approx(0.06).epsilon(1e-15));
    CHECK(u(0.7, 0.2) == doctest::Approx(0.06).epsilon(1e-15));
    CHECK(u(-1.0, 0.5) == 0.0);
    CHECK(u(0.5, 2.0) == 0.0);
    const HoeffdingKernel coin(Measure1D::discrete({{0.0, 0.5}, {1.0, 0.5}}));
    CHECK(coin(0.0, 0.0) == doctest::Approx(0.25));
    CHECK(coin(0.5, 0.9) == doctest::Approx(0.25));
    CHECK(coin(1.0, 1.0) == 0.0);
  }

  TEST_CASE("kernel agrees with F(min) - F(x)F(y)") {
    const Measure1D m = Measure1D::logistic(0.3, 0.7);
    const HoeffdingKernel k(m);
    for (double x : {-2.0, -0.1, 0.4, 1.5})
      for (double y : {-1.0, 0.3, 2.5}) {
        const double naive = m.cdf(std::min(x, y)) - m.cdf(x) * m.cdf(y);
        CHECK(k(x, y) == doctest::Approx(naive).epsilon(1e-12));
        CHECK(k(x, y) == k(y, x));
        CHECK(k(x, y) >= 0.0);
      }
  }

  TEST_CASE("kernel mass equals the variance") {
    QuadratureSpec spec;
    spec.trunc_eps = 1e-14;
    CHECK(kernel_mass(HoeffdingKernel(Measure1D::uniform(0.0, 1.0)), spec).value ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(kernel_mass(HoeffdingKernel(Measure1D::gaussian(0.0, 1.0)), spec).value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(kernel_mass(HoeffdingKernel(Measure1D::discrete({{0.0, 0.5}, {1.0, 0.5}})), spec).value ==
          doctest::Approx(0.25).epsilon(1e-12));
    const Measure1D e = Measure1D::exponential(2.0);
    CHECK(kernel_mass(HoeffdingKernel(e), spec).value == doctest::Approx(e.variance()).epsilon(1e-8));
  }

  TEST_CASE("weighted bilinear form") {
    QuadratureSpec spec;
    const HoeffdingKernel k(Measure1D::uniform(0.0, 1.0));
    // ∬ 2x k(x,y) 2y dx dy = Cov(X², Y²) on the diagonal, i.e. Var(X²) = 1/5 − 1/9.
    const Estimate v = kernel_bilinear(k, [](double x) { return 2.0 * x; }, [](double y) { return 2.0 * y; }, spec);
    CHECK(v.value == doctest::Approx(1.0 / 5.0 - 1.0 / 9.0).epsilon(1e-12));
  }

  TEST_CASE("order-two minor") {
    const HoeffdingKernel k(Measure1D::uniform(0.0, 1.0));
    // [[0.2·0.7, 0.2·0.2], [0.3·0.5, 0.5·0.2]] has determinant 0.014 − 0.006.
    CHECK(kernel_minor(k, {0.2, 0.5}, {0.3, 0.8}) == doctest::Approx(0.008).epsilon(1e-13));
    const MinorReport r = tp_minor_check(k, 2, 500, 3);
    CHECK(r.pass);
    CHECK(r.trials == 500);
  }

  TEST_CASE("Gaussian kernel is totally positive of order four") {
    const HoeffdingKernel k(Measure1D::gaussian(0.0, 1.0));
    for (std::size_t n = 2; n <= 4; ++n) {
      const MinorReport r = tp_minor_check(k, n, 300, 11);
      CAPTURE(n);
      CHECK(r.pass);
      CHECK(r.worst >= -1e-12);
    }
  }

  TEST_CASE("Holley lattice condition") {
    const std::vector<Interval> box{{-1.0, 1.0}, {-1.0, 1.0}};
    CHECK(holley_check([](std::span<const double> x) { return x[0] * x[1]; }, box, 2000, 5).pass);
    const HolleyReport bad = holley_check([](std::span<const double> x) { return -x[0] * x[1]; }, box, 2000, 5);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst < 0.0);
    CHECK(bad.witness_x.size() == 2);
    CHECK(holley_check([](std::span<const double> x) { return std::sin(x[0]) + x[1] * x[1]; }, box, 2000, 5).pass);
  }

  TEST_CASE("csv dump") {
    std::ostringstream os;
    write_kernel_csv(os, HoeffdingKernel(Measure1D::uniform(0.0, 1.0)), 3);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,k");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 9);
  }
}
