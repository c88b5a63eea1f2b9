// Randomized inputs for the theorem suite. Every generator builds its functions so that the hypotheses
// hold by construction; the checkers then re-certify them independently.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "covlab/builtins.hpp"
#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/quadrature.hpp"
#include "covlab/theorem_suite.hpp"

namespace covlab {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  double sign() { return coin() ? 1.0 : -1.0; }
  const std::string& pick(const std::vector<std::string>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 rng_;
};

const std::vector<std::string> kConvex{"square", "softplus", "logcosh", "sqrt1p"};
const std::vector<std::string> kEvenConvex{"square", "logcosh", "sqrt1p"};
const std::vector<std::string> kEvenUnimodal{"gauss", "cauchy", "sech"};

// ---- Measures -------------------------------------------------------------------------------------

enum class Pool { any, symmetric, symmetric_bounded, symmetric_log_concave, potential, light_tailed_symmetric, centered_mixture };

Measure1D discrete_measure(Draw& r, bool symmetric) {
  std::vector<Atom> atoms;
  if (symmetric) {
    const int pairs = r.integer(1, 3);
    for (int k = 0; k < pairs; ++k) {
      const double x = r.uniform(0.2, 2.0), p = r.uniform(0.2, 1.0);
      atoms.push_back({x, p});
      atoms.push_back({-x, p});
    }
    if (pairs == 1 || r.coin()) atoms.push_back({0.0, r.uniform(0.2, 1.0)});
  } else {
    const int n = r.integer(3, 6);
    for (int k = 0; k < n; ++k) atoms.push_back({r.uniform(-2.0, 2.0), r.uniform(0.1, 1.0)});
  }
  return Measure1D::discrete(std::move(atoms));
}

Measure1D mixture_measure(Draw& r) {
  std::vector<MixtureComponent> comps;
  const int k = r.integer(1, 3);
  for (int i = 0; i < k; ++i) comps.push_back({r.uniform(0.4, 1.6), r.uniform(0.2, 1.0)});
  return Measure1D::gaussian_scale_mixture(std::move(comps));
}

Measure1D draw_measure(Draw& r, Pool pool) {
  switch (pool) {
    case Pool::any:
      switch (r.integer(0, 6)) {
        case 0: return Measure1D::gaussian(r.uniform(-1.0, 1.0), r.uniform(0.5, 1.5));
        case 1: {
          const double lo = r.uniform(-2.0, 0.0);
          return Measure1D::uniform(lo, lo + r.uniform(0.5, 3.0));
        }
        case 2: return Measure1D::exponential(r.uniform(0.5, 2.0));
        case 3: return Measure1D::logistic(r.uniform(-1.0, 1.0), r.uniform(0.3, 1.0));
        case 4: return discrete_measure(r, false);
        case 5: return mixture_measure(r);
        default: return draw_measure(r, Pool::symmetric);
      }
    case Pool::symmetric:
      switch (r.integer(0, 4)) {
        case 0: return Measure1D::gaussian(0.0, r.uniform(0.5, 1.5));
        case 1: {
          const double h = r.uniform(0.5, 2.0);
          return Measure1D::uniform(-h, h);
        }
        case 2: return Measure1D::logistic(0.0, r.uniform(0.3, 1.0));
        case 3: return mixture_measure(r);
        default: return discrete_measure(r, true);
      }
    case Pool::symmetric_bounded:
      if (r.coin()) return discrete_measure(r, true);
      {
        const double h = r.uniform(0.5, 2.0);
        return Measure1D::uniform(-h, h);
      }
    case Pool::symmetric_log_concave:
      switch (r.integer(0, 2)) {
        case 0: return Measure1D::gaussian(0.0, r.uniform(0.5, 1.5));
        case 1: {
          const double h = r.uniform(0.5, 2.0);
          return Measure1D::uniform(-h, h);
        }
        default: return Measure1D::logistic(0.0, r.uniform(0.3, 1.0));
      }
    case Pool::potential:
      if (r.coin()) return Measure1D::gaussian(r.uniform(-1.0, 1.0), r.uniform(0.5, 1.5));
      return Measure1D::logistic(r.uniform(-1.0, 1.0), r.uniform(0.3, 1.0));
    case Pool::light_tailed_symmetric:
      switch (r.integer(0, 3)) {
        case 0: return Measure1D::gaussian(0.0, r.uniform(0.5, 1.5));
        case 1: {
          const double h = r.uniform(0.5, 2.0);
          return Measure1D::uniform(-h, h);
        }
        case 2: return mixture_measure(r);
        default: return discrete_measure(r, true);
      }
    case Pool::centered_mixture:
      if (r.coin(0.3)) return Measure1D::gaussian(0.0, r.uniform(0.5, 1.5));
      return mixture_measure(r);
  }
  return Measure1D::gaussian(0.0, 1.0);
}

ProductMeasure draw_product(Draw& r, std::size_t d, Pool pool) {
  std::vector<Measure1D> fs;
  for (std::size_t i = 0; i < d; ++i) fs.push_back(draw_measure(r, pool));
  return ProductMeasure(std::move(fs));
}

std::vector<double> std_devs(const ProductMeasure& mu) {
  std::vector<double> s;
  for (const auto& m : mu.factors()) s.push_back(std::sqrt(m.variance()));
  return s;
}

std::vector<double> means(const ProductMeasure& mu) {
  std::vector<double> s;
  for (const auto& m : mu.factors()) s.push_back(m.mean());
  return s;
}

std::vector<double> inverse(std::vector<double> v) {
  for (double& x : v) x = 1.0 / x;
  return v;
}

// ---- Weights ----------------------------------------------------------------------------------------

bool bounded(const Measure1D& m) {
  const Interval s = m.support();
  return std::isfinite(s.lo) && std::isfinite(s.hi);
}

// cosh primitives grow exponentially; only Gaussian-type or bounded factors keep products of them integrable.
bool allows_cosh(const Measure1D& m) {
  return bounded(m) || m.family() == Family::gaussian || m.family() == Family::gaussian_scale_mixture;
}

std::vector<Weight> draw_weights(Draw& r, const ProductMeasure& mu, const QuadratureSpec& spec) {
  std::vector<Weight> out;
  for (std::size_t i = 0; i < mu.dim(); ++i) {
    const Measure1D& m = mu.factor(i);
    const double sd = std::sqrt(m.variance());
    switch (r.integer(0, allows_cosh(m) ? 2 : 1)) {
      case 0: out.push_back(Weight::unit(m, i)); break;
      case 1:
        out.push_back(weight_from_json({{"builtin", "poly2"}, {"params", {{"b", r.uniform(0.05, 0.5) / (sd * sd)}}}},
                                       m, i, spec));
        break;
      default:
        out.push_back(
            weight_from_json({{"builtin", "cosh"}, {"params", {{"b", r.uniform(0.2, 0.8) / sd}}}}, m, i, spec));
    }
  }
  return out;
}

std::vector<double> primitive_scales(const ProductMeasure& mu, const std::vector<Weight>& w, const QuadratureSpec& spec) {
  std::vector<double> s;
  for (std::size_t i = 0; i < mu.dim(); ++i) {
    const Weight wi = w[i];
    const FunctionSpec A = FunctionSpec::univariate([wi](double x) { return wi.A(x); });
    const double var = covariance(ProductMeasure({mu.factor(i)}), A, A, spec).value;
    s.push_back(1.0 / std::sqrt(var));
  }
  return s;
}

// ---- Function building blocks (in standardized coordinates) ---------------------------------------

struct Ridge {
  explicit Ridge(std::size_t d)
      : Q(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))),
        b(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d))),
        dim(d) {}
  Eigen::MatrixXd Q;
  Eigen::VectorXd b;
  double c = 0.0;
  std::vector<fn::RidgeTerm> terms;
  std::size_t dim;

  void add(const std::string& kind, double coef, double scale, double shift, std::vector<double> w) {
    fn::Atom1D a;
    a.kind = kind;
    a.coef = coef;
    a.scale = scale;
    a.shift = shift;
    terms.push_back({a, std::move(w)});
  }
  void add_axis(std::size_t i, const std::string& kind, double coef, double scale, double shift) {
    std::vector<double> w(dim, 0.0);
    w[i] = 1.0;
    add(kind, coef, scale, shift, std::move(w));
  }
  FunctionSpec build() const { return fn::ridge(Q, b, c, terms); }
};

Eigen::MatrixXd random_psd(Draw& r, std::size_t d, double scale) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd B(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) B(i, j) = r.uniform(-1.0, 1.0);
  return scale * (B * B.transpose()) / static_cast<double>(d);
}

std::vector<double> random_direction(Draw& r, std::size_t d, bool nonnegative) {
  std::vector<double> w(d);
  double n = 0.0;
  for (double& x : w) {
    x = nonnegative ? r.uniform(0.0, 1.0) : r.uniform(-1.0, 1.0);
    n += x * x;
  }
  n = std::sqrt(std::max(n, 1e-12));
  for (double& x : w) x /= n;
  return w;
}

FunctionSpec convex_function(Draw& r, std::size_t d, bool allow_exp) {
  Ridge h(d);
  if (r.coin(0.7)) h.Q = random_psd(r, d, r.uniform(0.1, 1.0));
  for (std::size_t i = 0; i < d; ++i) h.b(static_cast<Eigen::Index>(i)) = r.uniform(-1.0, 1.0);
  const int terms = r.integer(1, 3);
  for (int k = 0; k < terms; ++k) {
    if (allow_exp && r.coin(0.25))
      h.add("exp", r.uniform(0.2, 1.0), r.uniform(0.1, 0.4), r.uniform(-1.0, 1.0), random_direction(r, d, false));
    else
      h.add(r.pick(kConvex), r.uniform(0.2, 1.5), r.uniform(0.3, 1.5), r.uniform(-1.0, 1.0),
            random_direction(r, d, false));
  }
  return h.build();
}

FunctionSpec even_convex_function(Draw& r, std::size_t d) {
  Ridge h(d);
  h.Q = random_psd(r, d, r.uniform(0.1, 1.0)) +
        r.uniform(0.05, 0.3) * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const int terms = r.integer(0, 2);
  for (int k = 0; k < terms; ++k)
    h.add(r.pick(kEvenConvex), r.uniform(0.2, 1.0), r.uniform(0.3, 1.5), 0.0, random_direction(r, d, false));
  return h.build();
}

FunctionSpec log_concave_even(Draw& r, std::size_t d) { return even_convex_function(r, d).scaled(-1.0).exp(); }

FunctionSpec even_quasi_concave(Draw& r, std::size_t d) {
  switch (r.integer(0, 2)) {
    case 0: return log_concave_even(r, d);
    case 1: return even_convex_function(r, d).scaled(-1.0);
    default: {
      const Eigen::MatrixXd P =
          random_psd(r, d, r.uniform(0.3, 1.5)) +
          0.2 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      return fn::inverse_quadratic(P);
    }
  }
}

// Hessian entries of the result have the signs of S (diagonal included) everywhere.
FunctionSpec sign_pattern_function(Draw& r, const Eigen::MatrixXd& S) {
  const std::size_t d = static_cast<std::size_t>(S.rows());
  Ridge h(d);
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    h.b(i) = r.uniform(-1.0, 1.0);
    h.Q(i, i) = S(i, i) * r.uniform(0.2, 1.0);
    for (Eigen::Index j = i + 1; j < S.rows(); ++j) h.Q(i, j) = h.Q(j, i) = S(i, j) * r.uniform(0.05, 0.4);
  }
  for (std::size_t i = 0; i < d; ++i)
    if (r.coin())
      h.add_axis(i, r.pick(kConvex), S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) * r.uniform(0.1, 1.0),
                 r.uniform(0.3, 1.2), r.uniform(-1.0, 1.0));
  return h.build();
}

Eigen::MatrixXd random_signs(Draw& r, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) S(i, j) = S(j, i) = r.sign();
  return S;
}

// Even in each variable, entrywise non-negative Hessian.
FunctionSpec nonneg_hessian_even(Draw& r, std::size_t d, bool quadratic) {
  Ridge h(d);
  if (quadratic)
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i)
      for (Eigen::Index j = i; j < static_cast<Eigen::Index>(d); ++j)
        h.Q(i, j) = h.Q(j, i) = r.uniform(0.0, i == j ? 0.15 : 0.05);
  const int terms = r.integer(1, 3);
  for (int k = 0; k < terms; ++k)
    h.add("logcosh", r.uniform(0.2, 0.8), r.uniform(0.3, 0.8), 0.0, random_direction(r, d, true));
  return h.build();
}

// Entrywise non-negative Hessian, no symmetry.
FunctionSpec nonneg_hessian(Draw& r, std::size_t d) {
  Ridge h(d);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
    h.b(i) = r.uniform(-1.0, 1.0);
    for (Eigen::Index j = i; j < static_cast<Eigen::Index>(d); ++j)
      h.Q(i, j) = h.Q(j, i) = r.uniform(0.0, i == j ? 1.0 : 0.5);
  }
  const int terms = r.integer(1, 3);
  for (int k = 0; k < terms; ++k)
    h.add(r.pick(kConvex), r.uniform(0.2, 1.0), r.uniform(0.3, 1.2), r.uniform(-1.0, 1.0),
          random_direction(r, d, true));
  return h.build();
}

FunctionSpec monomial_sum(std::size_t d, const std::vector<fn::Monomial>& terms) {
  return terms.empty() ? FunctionSpec::constant(d, 0.0) : fn::monomials(d, terms);
}

std::vector<int> powers(std::size_t d, std::initializer_list<std::pair<std::size_t, int>> entries) {
  std::vector<int> p(d, 0);
  for (const auto& [i, k] : entries) p[i] = k;
  return p;
}

// Univariate h in z with h^{(n)} ≥ 0: positive exponentials of increasing type plus c·z^n and lower-order terms.
FunctionSpec chebyshev_top(Draw& r, int n) {
  Ridge h(1);
  const int terms = r.integer(1, 2);
  for (int k = 0; k < terms; ++k) h.add("exp", r.uniform(0.2, 1.0), r.uniform(0.2, 0.6), r.uniform(-1.0, 1.0), {1.0});
  std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k < n; ++k) coeffs[static_cast<std::size_t>(k)] = r.uniform(-1.0, 1.0);
  coeffs[static_cast<std::size_t>(n)] = r.coin() ? r.uniform(0.0, 1.0) : 0.0;
  return h.build() + fn::poly1d(coeffs);
}

FunctionSpec power_of_z(int k) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  c.back() = 1.0;
  return fn::poly1d(c);
}

// ---- Orthogonalization by shift ---------------------------------------------------------------------

// f_s(x) = exp(−φ((x − m)/σ − s)) with s chosen so that Cov_μ(f_s, x) = 0. Empty when no sign change is found.
FunctionSpec orthogonal_log_concave(const Measure1D& m, const FunctionSpec& phi, const QuadratureSpec& spec) {
  const double mean = m.mean(), sd = std::sqrt(m.variance());
  const ProductMeasure pm({m});
  const FunctionSpec x = FunctionSpec::coordinate(1, 0);
  const FunctionSpec base = phi.scaled(-1.0).exp();
  auto make = [&](double s) { return fn::standardized(base, {mean + s * sd}, {1.0 / sd}); };
  auto cov = [&](double s) {
    return covariance_matrix(pm, {make(s)}, {x}, spec, nullptr)(0, 0);
  };
  double prev_s = -4.0, prev = cov(prev_s);
  for (int k = 1; k <= 32; ++k) {
    const double s = -4.0 + 8.0 * k / 32.0;
    const double v = cov(s);
    if (prev == 0.0) return make(prev_s);
    if ((prev < 0.0) != (v < 0.0)) {
      std::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(cov, prev_s, s, prev, v,
                                                          boost::math::tools::eps_tolerance<double>(52), iters);
      const double a = root.first, b = root.second;
      return make(std::abs(cov(a)) <= std::abs(cov(b)) ? a : b);
    }
    prev_s = s;
    prev = v;
  }
  return FunctionSpec();
}

// ---- Generators -----------------------------------------------------------------------------------

std::size_t dim_1_to_3(Draw& r) { return static_cast<std::size_t>(r.integer(1, 3)); }

using Generator = CheckInput (*)(Draw&, const QuadratureSpec&);

CheckInput gen_gaussian_convex(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = ProductMeasure(Measure1D::gaussian(0.0, 1.0), d);
  in.f = convex_function(r, d, true);
  in.g = convex_function(r, d, true);
  return in;
}

CheckInput gen_gaussian_log_concave(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = ProductMeasure(Measure1D::gaussian(0.0, 1.0), d);
  in.f = log_concave_even(r, d);
  in.g = convex_function(r, d, true);
  return in;
}

CheckInput gen_gaussian_quasi_concave(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = ProductMeasure(Measure1D::gaussian(0.0, 1.0), d);
  in.f = even_quasi_concave(r, d);
  in.g = even_quasi_concave(r, d);
  return in;
}

CheckInput gen_line_convex(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  in.mu = draw_product(r, 1, Pool::any);
  const auto c = means(in.mu), s = inverse(std_devs(in.mu));
  in.f = fn::standardized(convex_function(r, 1, true), c, s);
  in.g = fn::standardized(convex_function(r, 1, true), c, s);
  return in;
}

CheckInput gen_line_log_concave(Draw& r, const QuadratureSpec& spec) {
  CheckInput in;
  for (int attempt = 0; attempt < 20 && !in.f.valid(); ++attempt) {
    in.mu = draw_product(r, 1, Pool::any);
    in.f = orthogonal_log_concave(in.mu.factor(0), convex_function(r, 1, false), spec);
  }
  if (!in.f.valid()) throw NumericalError("could not orthogonalize a log-concave function");
  in.g = fn::standardized(convex_function(r, 1, true), means(in.mu), inverse(std_devs(in.mu)));
  return in;
}

CheckInput gen_line_quasi_concave(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  in.mu = draw_product(r, 1, Pool::any);
  const double inv = 1.0 / std::sqrt(in.mu.factor(0).variance());
  auto draw = [&] {
    Ridge h(1);
    const int terms = r.integer(1, 3);
    for (int k = 0; k < terms; ++k) h.add(r.pick(kEvenUnimodal), r.uniform(0.2, 1.5), r.uniform(0.3, 1.5) * inv, 0.0, {1.0});
    if (r.coin(0.3)) h.Q(0, 0) = -r.uniform(0.05, 0.5) * inv * inv;
    return h.build();
  };
  in.f = draw();
  in.g = draw();
  return in;
}

CheckInput gen_weighted_product(Draw& r, const QuadratureSpec& spec, bool weighted, Pool pool) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = draw_product(r, d, pool);
  in.weights = weighted ? draw_weights(r, in.mu, spec) : std::vector<Weight>{};
  const std::vector<Weight> w = weighted ? in.weights : unit_weights(in.mu);
  const auto scale = primitive_scales(in.mu, w, spec);
  const Eigen::MatrixXd S = random_signs(r, d);
  auto lift = [&](const FunctionSpec& h) {
    return fn::on_weights(fn::standardized(h, std::vector<double>(d, 0.0), scale), w);
  };
  in.f = lift(sign_pattern_function(r, S));
  in.g = lift(sign_pattern_function(r, S));
  return in;
}

CheckInput gen_hu_weighted(Draw& r, const QuadratureSpec& spec) { return gen_weighted_product(r, spec, true, Pool::any); }
CheckInput gen_hu_unit(Draw& r, const QuadratureSpec& spec) { return gen_weighted_product(r, spec, false, Pool::any); }

CheckInput gen_potential(Draw& r, const QuadratureSpec& spec) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = draw_product(r, d, Pool::potential);
  for (std::size_t i = 0; i < d; ++i) {
    const Measure1D& m = in.mu.factor(i);
    if (m.family() == Family::gaussian && r.coin())
      in.weights.push_back(Weight::unit(m, i));
    else
      in.weights.push_back(weight_from_json({{"builtin", "potential_curvature"}}, m, i, spec));
  }
  const auto scale = primitive_scales(in.mu, in.weights, spec);
  const Eigen::MatrixXd S = random_signs(r, d);
  auto lift = [&](const FunctionSpec& h) {
    return fn::on_weights(fn::standardized(h, std::vector<double>(d, 0.0), scale), in.weights);
  };
  in.f = lift(sign_pattern_function(r, S));
  in.g = lift(sign_pattern_function(r, S));
  return in;
}

CheckInput gen_unconditional(Draw& r, const QuadratureSpec& spec) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = draw_product(r, d, Pool::symmetric);
  std::vector<Weight> w;
  for (std::size_t i = 0; i < d; ++i) {
    const Measure1D& m = in.mu.factor(i);
    const double sd = std::sqrt(m.variance());
    if (r.coin())
      w.push_back(Weight::unit(m, i));
    else
      w.push_back(weight_from_json({{"builtin", "poly2"}, {"params", {{"b", r.uniform(0.05, 0.5) / (sd * sd)}}}}, m, i,
                                   spec));
  }
  in.weights = w;
  const auto scale = primitive_scales(in.mu, w, spec);
  std::vector<double> s(d);
  for (auto& x : s) x = r.sign();
  // Unconditional member: even pieces per axis plus y_i² y_j² couplings between axes of equal sign.
  Ridge u(d);
  std::vector<fn::Monomial> couplings;
  for (std::size_t i = 0; i < d; ++i) {
    u.Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = s[i] * r.uniform(0.1, 1.0);
    if (r.coin()) u.add_axis(i, r.pick(kEvenConvex), s[i] * r.uniform(0.1, 1.0), r.uniform(0.3, 1.2), 0.0);
    for (std::size_t j = i + 1; j < d; ++j)
      if (s[i] == s[j] && r.coin()) couplings.push_back({s[i] * r.uniform(0.02, 0.2), powers(d, {{i, 2}, {j, 2}})});
  }
  // Partner: diagonal curvature of the same signs, arbitrary couplings.
  Ridge v(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    v.b(ii) = r.uniform(-1.0, 1.0);
    v.Q(ii, ii) = s[i] * r.uniform(0.1, 1.0);
    for (std::size_t j = i + 1; j < d; ++j) v.Q(ii, static_cast<Eigen::Index>(j)) = v.Q(static_cast<Eigen::Index>(j), ii) = r.uniform(-0.5, 0.5);
    if (r.coin()) v.add_axis(i, r.pick(kConvex), s[i] * r.uniform(0.1, 1.0), r.uniform(0.3, 1.2), r.uniform(-1.0, 1.0));
  }
  auto lift = [&](const FunctionSpec& h) {
    return fn::on_weights(fn::standardized(h, std::vector<double>(d, 0.0), scale), w);
  };
  FunctionSpec a = lift(u.build() + monomial_sum(d, couplings));
  FunctionSpec b = lift(v.build());
  if (r.coin()) std::swap(a, b);
  in.f = a;
  in.g = b;
  return in;
}

CheckInput gen_tensor_log_concave(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = draw_product(r, d, Pool::symmetric_log_concave);
  const auto zero = std::vector<double>(d, 0.0);
  const auto inv = inverse(std_devs(in.mu));
  // φ: per-axis even convex pieces plus γ(Σ z_i²)².
  Ridge phi(d);
  std::vector<fn::Monomial> quartic;
  for (std::size_t i = 0; i < d; ++i) {
    phi.Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = r.uniform(0.1, 1.0);
    if (r.coin()) phi.add_axis(i, r.pick(kEvenConvex), r.uniform(0.1, 1.0), r.uniform(0.3, 1.2), 0.0);
  }
  if (r.coin()) {
    const double gamma = r.uniform(0.01, 0.1);
    for (std::size_t i = 0; i < d; ++i) {
      quartic.push_back({gamma, powers(d, {{i, 4}})});
      for (std::size_t j = i + 1; j < d; ++j) quartic.push_back({2.0 * gamma, powers(d, {{i, 2}, {j, 2}})});
    }
  }
  in.f = fn::standardized((phi.build() + monomial_sum(d, quartic)).scaled(-1.0).exp(), zero, inv);
  // g: convex along every axis, arbitrary couplings.
  Ridge g(d);
  std::vector<fn::Monomial> mixed;
  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    g.b(ii) = r.uniform(-1.0, 1.0);
    g.Q(ii, ii) = r.uniform(0.0, 1.0);
    for (std::size_t j = i + 1; j < d; ++j) {
      g.Q(ii, static_cast<Eigen::Index>(j)) = g.Q(static_cast<Eigen::Index>(j), ii) = r.uniform(-1.0, 1.0);
      if (r.coin(0.3)) mixed.push_back({r.uniform(0.0, 0.2), powers(d, {{i, 2}, {j, 2}})});
    }
    if (r.coin()) g.add_axis(i, r.pick(kConvex), r.uniform(0.1, 1.0), r.uniform(0.3, 1.2), r.uniform(-1.0, 1.0));
  }
  if (d == 3 && r.coin()) mixed.push_back({r.uniform(-0.3, 0.3), powers(d, {{0, 1}, {1, 1}, {2, 1}})});
  in.g = fn::standardized(g.build() + monomial_sum(d, mixed), zero, inv);
  return in;
}

CheckInput gen_tensor_quasi_concave(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = draw_product(r, d, Pool::any);
  const auto inv = inverse(std_devs(in.mu));
  auto draw = [&] {
    FunctionSpec sum;
    const int K = r.integer(1, 2);
    for (int k = 0; k < K; ++k) {
      std::vector<fn::Atom1D> factors(d);
      for (std::size_t i = 0; i < d; ++i) {
        factors[i].kind = r.pick(kEvenUnimodal);
        factors[i].coef = i == 0 ? r.uniform(0.3, 1.5) : 1.0;
        factors[i].scale = r.uniform(0.4, 1.5) * inv[i];
        factors[i].shift = 0.0;
        factors[i].coord = i;
      }
      const FunctionSpec p = fn::product(factors);
      sum = sum.valid() ? sum + p : p;
    }
    std::vector<fn::Monomial> neg;
    if (r.coin(0.3)) {
      const std::size_t i = static_cast<std::size_t>(r.integer(0, static_cast<int>(d) - 1));
      neg.push_back({-r.uniform(0.02, 0.2) * inv[i] * inv[i], powers(d, {{i, 2}})});
    }
    return neg.empty() ? sum : sum + fn::monomials(d, neg);
  };
  in.f = draw();
  in.g = draw();
  return in;
}

CheckInput gen_global(Draw& r, const QuadratureSpec& spec, bool weighted, bool both_log) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = draw_product(r, d, weighted && r.coin() ? Pool::symmetric_bounded : Pool::symmetric);
  std::vector<Weight> w;
  for (std::size_t i = 0; i < d; ++i) {
    const Measure1D& m = in.mu.factor(i);
    const double sd = std::sqrt(m.variance());
    // exp(Ψ) of a non-affine convex Ψ on a lifted primitive is only integrable on bounded factors.
    if (!weighted || !bounded(m) || r.coin(0.3))
      w.push_back(Weight::unit(m, i));
    else if (r.coin())
      w.push_back(weight_from_json({{"builtin", "poly2"}, {"params", {{"b", r.uniform(0.05, 0.5) / (sd * sd)}}}}, m, i,
                                   spec));
    else
      w.push_back(weight_from_json({{"builtin", "cosh"}, {"params", {{"b", r.uniform(0.2, 0.8) / sd}}}}, m, i, spec));
  }
  if (weighted) in.weights = w;
  const bool any_weight = std::any_of(w.begin(), w.end(), [](const Weight& x) { return !x.is_unit(); });
  const auto scale = primitive_scales(in.mu, w, spec);
  auto lift = [&](const FunctionSpec& h) {
    return fn::on_weights(fn::standardized(h, std::vector<double>(d, 0.0), scale), w);
  };
  in.f = lift(nonneg_hessian_even(r, d, !any_weight).exp());
  in.g = both_log ? lift(nonneg_hessian_even(r, d, !any_weight).exp()) : lift(nonneg_hessian(r, d));
  return in;
}

CheckInput gen_global_g(Draw& r, const QuadratureSpec& s) { return gen_global(r, s, true, false); }
CheckInput gen_global_psi(Draw& r, const QuadratureSpec& s) { return gen_global(r, s, true, true); }
CheckInput gen_global_g_unit(Draw& r, const QuadratureSpec& s) { return gen_global(r, s, false, false); }
CheckInput gen_global_psi_unit(Draw& r, const QuadratureSpec& s) { return gen_global(r, s, false, true); }

CheckInput gen_det_cov(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  in.mu = draw_product(r, 1, Pool::any);
  const int n = r.integer(1, 3);
  const std::vector<double> c = means(in.mu), s = inverse(std_devs(in.mu));
  for (auto* tuple : {&in.F, &in.G}) {
    for (int k = 1; k < n; ++k) tuple->push_back(fn::standardized(power_of_z(k), c, s));
    tuple->push_back(fn::standardized(chebyshev_top(r, n), c, s));
  }
  in.options = {{"trials", 500}};
  return in;
}

CheckInput gen_three_moment(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  in.mu = draw_product(r, 1, r.coin() ? Pool::symmetric : Pool::any);
  const std::vector<double> c = means(in.mu), s = inverse(std_devs(in.mu));
  in.f = fn::standardized(chebyshev_top(r, 3), c, s);
  in.g = fn::standardized(chebyshev_top(r, 3), c, s);
  in.options = {{"trials", 500}};
  return in;
}

CheckInput gen_free_energy(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  in.mu = draw_product(r, static_cast<std::size_t>(r.integer(2, 3)), Pool::any);
  in.options = {{"alpha", r.uniform(0.3, 3.0)}, {"beta", r.uniform(0.3, 3.0)}};
  return in;
}

double tail_scale(const Measure1D& m) {
  if (const auto* p = std::get_if<ScaleMixtureParams>(&m.params())) {
    double s = 0.0;
    for (const auto& c : p->components) s = std::max(s, c.sigma);
    return s;
  }
  return std::sqrt(m.variance());
}

CheckInput gen_tilted(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  const std::size_t d = static_cast<std::size_t>(r.integer(2, 3));
  in.mu = draw_product(r, d, Pool::light_tailed_symmetric);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i)
    worst = std::max(worst, tail_scale(in.mu.factor(i)) * tail_scale(in.mu.factor(i + 1)));
  std::vector<double> theta(d);
  for (auto& t : theta) t = r.uniform(0.0, 1.0);
  in.options = {{"J", r.uniform(0.0, 0.3) / worst}, {"theta", theta}};
  return in;
}

CheckInput gen_mixture(Draw& r, const QuadratureSpec&) {
  CheckInput in;
  const std::size_t d = dim_1_to_3(r);
  in.mu = draw_product(r, d, Pool::centered_mixture);
  const auto zero = std::vector<double>(d, 0.0);
  const auto inv = inverse(std_devs(in.mu));
  in.f = fn::standardized(log_concave_even(r, d), zero, inv);
  in.g = fn::standardized(convex_function(r, d, true), zero, inv);
  in.options = {{"lemma_probe", d <= 2}};
  return in;
}

Generator generator_for(const std::string& id) {
  static const std::vector<std::pair<std::string, Generator>> table{
      {"T1.1.1", gen_gaussian_convex},
      {"T1.1.2", gen_gaussian_log_concave},
      {"T1.1.3", gen_gaussian_quasi_concave},
      {"T1.2.1", gen_line_convex},
      {"T1.2.2", gen_line_log_concave},
      {"T1.2.3", gen_line_quasi_concave},
      {"T1.3", gen_hu_weighted},
      {"C1.4", gen_hu_unit},
      {"T1.5", gen_unconditional},
      {"T1.8.1", gen_tensor_log_concave},
      {"T1.8.2", gen_tensor_quasi_concave},
      {"T1.9.1", gen_global_g},
      {"T1.9.2", gen_global_psi},
      {"C1.10.1", gen_global_g_unit},
      {"C1.10.2", gen_global_psi_unit},
      {"T4.3", gen_det_cov},
      {"C4.7", gen_three_moment},
      {"T5.3", gen_potential},
      {"EX9.1", gen_free_energy},
      {"EX9.2", gen_tilted},
      {"TA.1", gen_mixture},
  };
  for (const auto& [name, g] : table)
    if (name == id) return g;
  throw ConfigError("theorems", "no corpus generator for theorem id '" + id + "'");
}

}  // namespace

std::vector<CheckInput> corpus_instances(const std::string& theorem_id, std::size_t count, std::uint64_t seed,
                                         const QuadratureSpec& spec) {
  const Generator gen = generator_for(theorem_id);
  std::vector<CheckInput> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Draw r(derive_seed(seed, k));
    CheckInput in = gen(r, spec);
    in.spec = spec;
    in.spec.seed = derive_seed(seed, k + (std::uint64_t{1} << 32));
    in.seed = in.spec.seed;
    in.echo = describe_input(in);
    in.echo["corpus"] = {{"theorem", theorem_id}, {"instance", k}, {"seed", seed}};
    out.push_back(std::move(in));
  }
  return out;
}

}  // namespace covlab
