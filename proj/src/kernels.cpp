#include "covlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/quadrature.hpp"
#include "covlab/sum.hpp"

namespace covlab {

HoeffdingKernel::HoeffdingKernel(Measure1D mu) : mu_(std::move(mu)) {}

HoeffdingKernel::HoeffdingKernel(Measure1D mu, Scalar left, Scalar right)
    : mu_(std::move(mu)), left_(std::move(left)), right_(std::move(right)) {}

double HoeffdingKernel::base(double x, double y) const {
  const double lo = std::min(x, y), hi = std::max(x, y);
  return mu_.cdf(lo) * mu_.sf(hi);
}

double HoeffdingKernel::operator()(double x, double y) const { return left(x) * base(x, y) * right(y); }

namespace {

double bilinear_once(const HoeffdingKernel& k, const HoeffdingKernel::Scalar& L, const HoeffdingKernel::Scalar& R,
                     int order, int panels, double eps) {
  const Measure1D& mu = k.measure();
  const Interval box = mu.truncated_support(eps);
  const auto parts = panel_partition(box, panels, mu.breakpoints());
  const Rule1D& gl = gauss_legendre(order);

  // u(y) = F(y) b(y) R(y) feeds the region y < x, s(y) = S(y) b(y) R(y) the region y > x.
  auto u_and_s = [&](double y, double& u, double& s) {
    const double r = k.right(y) * R(y);
    u = mu.cdf(y) * r;
    s = mu.sf(y) * r;
  };
  auto segment = [&](double a, double b, double& iu, double& is) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    CompensatedSum su, ss;
    for (std::size_t m = 0; m < gl.size(); ++m) {
      double u, s;
      u_and_s(mid + half * gl.nodes[m], u, s);
      su.add(gl.weights[m] * u);
      ss.add(gl.weights[m] * s);
    }
    iu = half * su.value();
    is = half * ss.value();
  };

  const std::size_t P = parts.size();
  std::vector<double> panel_u(P), panel_s(P);
  for (std::size_t p = 0; p < P; ++p) segment(parts[p].lo, parts[p].hi, panel_u[p], panel_s[p]);
  CompensatedSum total_s_acc;
  for (double v : panel_s) total_s_acc.add(v);
  const double total_s = total_s_acc.value();

  std::vector<double> contrib(P, 0.0);
  parallel_for(P, [&](std::size_t p) {
    CompensatedSum before_u, before_s;
    for (std::size_t q = 0; q < p; ++q) {
      before_u.add(panel_u[q]);
      before_s.add(panel_s[q]);
    }
    const double half = 0.5 * parts[p].width(), mid = 0.5 * (parts[p].lo + parts[p].hi);
    CompensatedSum acc;
    for (std::size_t m = 0; m < gl.size(); ++m) {
      const double x = mid + half * gl.nodes[m];
      double iu, is;
      segment(parts[p].lo, x, iu, is);
      const double below = before_u.value() + iu;
      const double above = total_s - before_s.value() - is;
      const double v = k.left(x) * L(x) * (mu.sf(x) * below + mu.cdf(x) * above);
      if (!std::isfinite(v)) throw NumericalError("kernel integrand is not finite at x=" + std::to_string(x));
      acc.add(half * gl.weights[m] * v);
    }
    contrib[p] = acc.value();
  });
  CompensatedSum total;
  for (double v : contrib) total.add(v);
  return total.value();
}

}  // namespace

Estimate kernel_bilinear(const HoeffdingKernel& k, const HoeffdingKernel::Scalar& L, const HoeffdingKernel::Scalar& R,
                         const QuadratureSpec& spec) {
  const double full = bilinear_once(k, L, R, spec.order, spec.panels, spec.trunc_eps);
  const double half = bilinear_once(k, L, R, spec.halved().order, spec.panels, spec.trunc_eps);
  return {full, std::abs(full - half)};
}

Estimate kernel_mass(const HoeffdingKernel& k, const QuadratureSpec& spec) {
  auto one = [](double) { return 1.0; };
  return kernel_bilinear(k, one, one, spec);
}

double kernel_minor(const HoeffdingKernel& k, const std::vector<double>& s, const std::vector<double>& t) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = k(s[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]);
  return m.fullPivLu().determinant();
}

namespace {

bool ordered_tuple(std::mt19937_64& rng, const Interval& box, std::size_t n, std::vector<double>& out) {
  std::uniform_real_distribution<double> u(box.lo, box.hi);
  out.resize(n);
  for (auto& v : out) v = u(rng);
  std::sort(out.begin(), out.end());
  const double gap = 1e-6 * box.width();
  for (std::size_t i = 1; i < n; ++i)
    if (out[i] - out[i - 1] < gap) return false;
  return true;
}

}  // namespace

MinorReport tp_minor_check(const HoeffdingKernel& k, std::size_t n, std::size_t trials, std::uint64_t seed,
                           double trunc_eps) {
  if (n < 2) throw std::invalid_argument("minor order must be at least 2");
  const Interval box = k.measure().truncated_support(trunc_eps);
  struct Trial {
    double value = 0.0;
    std::vector<double> s, t;
  };
  std::vector<Trial> results(trials);
  parallel_for(trials, [&](std::size_t trial) {
    std::mt19937_64 rng(derive_seed(seed, trial));
    Trial& r = results[trial];
    while (!ordered_tuple(rng, box, n, r.s) || !ordered_tuple(rng, box, n, r.t)) {
    }
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) m(i, j) = k(r.s[static_cast<std::size_t>(i)], r.t[static_cast<std::size_t>(j)]);
    double scale = 1.0;
    for (Eigen::Index i = 0; i < N; ++i) scale *= m.row(i).cwiseAbs().maxCoeff();
    r.value = scale > 0.0 ? m.fullPivLu().determinant() / scale : 0.0;
  });
  MinorReport report;
  report.order = n;
  report.trials = trials;
  report.seed = seed;
  for (std::size_t i = 0; i < trials; ++i) {
    if (i == 0 || results[i].value < report.worst) {
      report.worst = results[i].value;
      report.worst_s = results[i].s;
      report.worst_t = results[i].t;
    }
  }
  report.pass = report.worst >= -1e-10;
  return report;
}

HolleyReport holley_check(const std::function<double(std::span<const double>)>& H, const std::vector<Interval>& box,
                          std::size_t pairs, std::uint64_t seed) {
  const std::size_t m = box.size();
  HolleyReport report;
  report.pairs = pairs;
  std::mt19937_64 rng(seed);
  std::vector<double> x(m), y(m), lo(m), hi(m);
  bool first = true;
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_real_distribution<double> u(box[i].lo, box[i].hi);
      x[i] = u(rng);
      y[i] = u(rng);
      lo[i] = std::min(x[i], y[i]);
      hi[i] = std::max(x[i], y[i]);
    }
    const double hx = H(x), hy = H(y), hl = H(lo), hh = H(hi);
    if (!std::isfinite(hx) || !std::isfinite(hy) || !std::isfinite(hl) || !std::isfinite(hh))
      throw NumericalError("Holley check: H is not finite at a probe pair");
    const double v = hl + hh - hx - hy;
    const double scale = 1.0 + std::max({std::abs(hx), std::abs(hy), std::abs(hl), std::abs(hh)});
    const double normalized = v / scale;
    if (first || normalized < report.worst) {
      report.worst = normalized;
      report.witness_x = x;
      report.witness_y = y;
      first = false;
    }
  }
  report.pass = report.worst >= -1e-7;
  if (report.pass) {
    report.witness_x.clear();
    report.witness_y.clear();
  }
  return report;
}

void write_kernel_csv(std::ostream& out, const HoeffdingKernel& k, std::size_t grid, double trunc_eps) {
  if (grid == 0) throw ConfigError("grid", "must be positive");
  const Interval box = k.measure().truncated_support(trunc_eps);
  std::vector<double> g(grid);
  for (std::size_t i = 0; i < grid; ++i)
    g[i] = grid == 1 ? 0.5 * (box.lo + box.hi) : box.lo + box.width() * static_cast<double>(i) / static_cast<double>(grid - 1);
  if (grid > 1) g.back() = box.hi;
  out << "x,y,k\n";
  char buf[96];
  for (double x : g) {
    for (double y : g) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, y, k(x, y));
      out << buf;
    }
  }
}

}  // namespace covlab
