#include "covlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/sum.hpp"

namespace covlab {

namespace {

Rule1D compute_gauss_legendre(int n) {
  Rule1D r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    r.nodes[lo] = -x;
    r.nodes[hi] = x;
    r.weights[lo] = w;
    r.weights[hi] = w;
  }
  return r;
}

void append_panel(Rule1D& out, double a, double b, const Rule1D& gl) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < gl.size(); ++k) {
    out.nodes.push_back(mid + half * gl.nodes[k]);
    out.weights.push_back(half * gl.weights[k]);
  }
}

[[noreturn]] void non_finite(Point x, double v) {
  std::ostringstream os;
  os << "integrand is " << v << " at node (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  throw NumericalError(os.str());
}

}  // namespace

const Rule1D& gauss_legendre(int order) {
  static std::mutex guard;
  static std::map<int, Rule1D> cache;
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

std::vector<Interval> panel_partition(Interval iv, int panels, const std::vector<double>& breakpoints) {
  std::vector<double> edges;
  for (int p = 0; p <= panels; ++p) edges.push_back(iv.lo + iv.width() * p / panels);
  edges.back() = iv.hi;
  for (double b : breakpoints)
    if (b > iv.lo && b < iv.hi) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  std::vector<Interval> out;
  const double tiny = 1e-14 * (1.0 + std::abs(iv.lo) + std::abs(iv.hi));
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    if (edges[k + 1] - edges[k] > tiny) out.push_back({edges[k], edges[k + 1]});
  return out;
}

Rule1D composite_gauss_legendre(Interval iv, int order, int panels, const std::vector<double>& breakpoints) {
  const Rule1D& gl = gauss_legendre(order);
  Rule1D out;
  for (const auto& p : panel_partition(iv, panels, breakpoints)) append_panel(out, p.lo, p.hi, gl);
  return out;
}

Rule1D measure_rule(const Measure1D& m, const QuadratureSpec& spec) {
  Rule1D r;
  if (m.is_discrete()) {
    for (const auto& a : m.atoms()) {
      r.nodes.push_back(a.position);
      r.weights.push_back(a.probability);
    }
    return r;
  }
  const Interval box = m.truncated_support(spec.trunc_eps);
  const double left = m.cdf(box.lo);
  const double right = m.sf(box.hi);
  if (left > 0.0) {
    r.nodes.push_back(box.lo);
    r.weights.push_back(left);
  }
  const Rule1D inner = composite_gauss_legendre(box, spec.order, spec.panels, m.breakpoints());
  for (std::size_t k = 0; k < inner.size(); ++k) {
    r.nodes.push_back(inner.nodes[k]);
    r.weights.push_back(inner.weights[k] * m.pdf(inner.nodes[k]));
  }
  if (right > 0.0) {
    r.nodes.push_back(box.hi);
    r.weights.push_back(right);
  }
  return r;
}

TensorRule::TensorRule(std::vector<Rule1D> axes) : axes_(std::move(axes)) {
  for (const auto& a : axes_) size_ *= a.size();
  weights_.resize(size_);
  for (std::size_t k = 0; k < size_; ++k) {
    double w = 1.0;
    for (std::size_t i = axes_.size(), r = k; i-- > 0;) {
      const std::size_t n = axes_[i].size();
      w *= axes_[i].weights[r % n];
      r /= n;
    }
    weights_[k] = w;
  }
}

TensorRule TensorRule::for_measure(const ProductMeasure& mu, const QuadratureSpec& spec) {
  std::vector<Rule1D> axes;
  for (const auto& f : mu.factors()) axes.push_back(measure_rule(f, spec));
  return TensorRule(std::move(axes));
}

void TensorRule::point(std::size_t k, double* out) const {
  for (std::size_t i = axes_.size(); i-- > 0;) {
    const std::size_t n = axes_[i].size();
    out[i] = axes_[i].nodes[k % n];
    k /= n;
  }
}

std::vector<std::vector<double>> TensorRule::evaluate(const std::vector<std::function<double(Point)>>& fns) const {
  std::vector<std::vector<double>> values(fns.size(), std::vector<double>(size_));
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (size_ + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> x(dim());
    const std::size_t end = std::min(size_, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k) {
      point(k, x.data());
      for (std::size_t f = 0; f < fns.size(); ++f) {
        const double v = fns[f](x);
        if (!std::isfinite(v)) non_finite(x, v);
        values[f][k] = v;
      }
    }
  });
  return values;
}

double TensorRule::sum(const std::vector<double>& values) const {
  CompensatedSum s;
  for (std::size_t k = 0; k < size_; ++k) s.add(weight(k) * values[k]);
  return s.value();
}

namespace {

double integrate_once(const std::function<double(Point)>& fn, const std::vector<Interval>& box, int order,
                      int panels, const std::vector<std::vector<double>>& breakpoints) {
  std::vector<Rule1D> axes;
  for (std::size_t i = 0; i < box.size(); ++i)
    axes.push_back(composite_gauss_legendre(box[i], order, panels,
                                            i < breakpoints.size() ? breakpoints[i] : std::vector<double>{}));
  TensorRule rule(std::move(axes));
  return rule.sum(rule.evaluate({fn})[0]);
}

}  // namespace

Estimate integrate(const std::function<double(Point)>& fn, const std::vector<Interval>& box,
                   const QuadratureSpec& spec, const std::vector<std::vector<double>>& breakpoints) {
  const QuadratureSpec s = spec.for_dimension(box.size());
  const double full = integrate_once(fn, box, s.order, s.panels, breakpoints);
  const double half = integrate_once(fn, box, s.halved().order, s.panels, breakpoints);
  return {full, std::abs(full - half)};
}

namespace {

double diagonal_once(const std::function<double(double, double)>& fn, Interval iv, int order, int panels,
                     const std::vector<double>& breakpoints) {
  const Rule1D& gl = gauss_legendre(order);
  const auto parts = panel_partition(iv, panels, breakpoints);
  CompensatedSum total;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    Rule1D outer;
    append_panel(outer, parts[p].lo, parts[p].hi, gl);
    for (std::size_t k = 0; k < outer.size(); ++k) {
      const double x = outer.nodes[k];
      Rule1D inner;
      for (std::size_t q = 0; q < parts.size(); ++q) {
        if (q == p) {
          append_panel(inner, parts[q].lo, x, gl);
          append_panel(inner, x, parts[q].hi, gl);
        } else {
          append_panel(inner, parts[q].lo, parts[q].hi, gl);
        }
      }
      CompensatedSum s;
      for (std::size_t m = 0; m < inner.size(); ++m) {
        const double v = fn(x, inner.nodes[m]);
        if (!std::isfinite(v)) {
          const double pt[2] = {x, inner.nodes[m]};
          non_finite(Point(pt, 2), v);
        }
        s.add(inner.weights[m] * v);
      }
      total.add(outer.weights[k] * s.value());
    }
  }
  return total.value();
}

}  // namespace

Estimate integrate_diagonal_split(const std::function<double(double, double)>& fn, Interval iv,
                                  const QuadratureSpec& spec, const std::vector<double>& breakpoints) {
  const QuadratureSpec s = spec.for_dimension(2);
  const double full = diagonal_once(fn, iv, s.order, s.panels, breakpoints);
  const double half = diagonal_once(fn, iv, s.halved().order, s.panels, breakpoints);
  return {full, std::abs(full - half)};
}

bool deterministic(const ProductMeasure& mu, const QuadratureSpec& spec) {
  return mu.dim() <= static_cast<std::size_t>(spec.det_dim_cap);
}

Estimate expectation(const ProductMeasure& mu, const std::function<double(Point)>& fn, const QuadratureSpec& spec) {
  if (!deterministic(mu, spec)) {
    const PointSet pts = sample(mu, spec.mc_samples, spec.seed);
    const std::size_t n = pts.size();
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = fn(Point(pts.row(k), pts.dim));
    CompensatedSum s;
    for (double x : v) s.add(x);
    const double mean = s.value() / static_cast<double>(n);
    CompensatedSum q;
    for (double x : v) q.add((x - mean) * (x - mean));
    return {mean, std::sqrt(q.value() / static_cast<double>(n - 1) / static_cast<double>(n))};
  }
  const QuadratureSpec s = spec.for_dimension(mu.dim());
  auto once = [&](const QuadratureSpec& q) {
    const TensorRule rule = TensorRule::for_measure(mu, q);
    return rule.sum(rule.evaluate({fn})[0]);
  };
  const double full = once(s);
  return {full, std::abs(full - once(s.halved()))};
}

namespace {

double centered_covariance(const TensorRule& rule, const std::vector<double>& fv, const std::vector<double>& gv) {
  const double mf = rule.sum(fv), mg = rule.sum(gv);
  CompensatedSum s;
  for (std::size_t k = 0; k < rule.size(); ++k) s.add(rule.weight(k) * (fv[k] - mf) * (gv[k] - mg));
  return s.value();
}

}  // namespace

Estimate covariance(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                    const QuadratureSpec& spec) {
  if (f.dim() != mu.dim() || g.dim() != mu.dim())
    throw std::invalid_argument("function dimension does not match the measure");
  if (!deterministic(mu, spec)) {
    const PointSet pts = sample(mu, spec.mc_samples, spec.seed);
    const std::size_t n = pts.size();
    std::vector<double> fv(n), gv(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Point x(pts.row(k), pts.dim);
      fv[k] = f(x);
      gv[k] = g(x);
    }
    CompensatedSum sf, sg;
    for (std::size_t k = 0; k < n; ++k) {
      sf.add(fv[k]);
      sg.add(gv[k]);
    }
    const double mf = sf.value() / n, mg = sg.value() / n;
    CompensatedSum c;
    for (std::size_t k = 0; k < n; ++k) c.add((fv[k] - mf) * (gv[k] - mg));
    const double cov = c.value() / static_cast<double>(n - 1);
    CompensatedSum q;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = (fv[k] - mf) * (gv[k] - mg) - cov;
      q.add(r * r);
    }
    return {cov, std::sqrt(q.value() / static_cast<double>(n - 1) / static_cast<double>(n))};
  }
  const QuadratureSpec s = spec.for_dimension(mu.dim());
  auto once = [&](const QuadratureSpec& q) {
    const TensorRule rule = TensorRule::for_measure(mu, q);
    auto v = rule.evaluate({[&f](Point x) { return f(x); }, [&g](Point x) { return g(x); }});
    return centered_covariance(rule, v[0], v[1]);
  };
  const double full = once(s);
  return {full, std::abs(full - once(s.halved()))};
}

Eigen::MatrixXd covariance_matrix_on(const TensorRule& rule, const std::vector<FunctionSpec>& fs,
                                     const std::vector<FunctionSpec>& gs) {
  std::vector<std::function<double(Point)>> fns;
  for (const auto& f : fs) fns.push_back([f](Point x) { return f(x); });
  for (const auto& g : gs) fns.push_back([g](Point x) { return g(x); });
  const auto v = rule.evaluate(fns);
  Eigen::MatrixXd c(static_cast<Eigen::Index>(fs.size()), static_cast<Eigen::Index>(gs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < gs.size(); ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = centered_covariance(rule, v[i], v[fs.size() + j]);
  return c;
}

Eigen::MatrixXd covariance_matrix(const ProductMeasure& mu, const std::vector<FunctionSpec>& fs,
                                  const std::vector<FunctionSpec>& gs, const QuadratureSpec& spec,
                                  Eigen::MatrixXd* error) {
  if (!deterministic(mu, spec)) {
    const PointSet pts = sample(mu, spec.mc_samples, spec.seed);
    const std::size_t n = pts.size(), nf = fs.size(), ng = gs.size();
    std::vector<std::vector<double>> fv(nf, std::vector<double>(n)), gv(ng, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const Point x(pts.row(k), pts.dim);
      for (std::size_t a = 0; a < nf; ++a) fv[a][k] = fs[a](x);
      for (std::size_t b = 0; b < ng; ++b) gv[b][k] = gs[b](x);
    }
    auto center = [n](std::vector<double>& v) {
      CompensatedSum s;
      for (double x : v) s.add(x);
      const double m = s.value() / static_cast<double>(n);
      for (double& x : v) x -= m;
    };
    for (auto& v : fv) center(v);
    for (auto& v : gv) center(v);
    Eigen::MatrixXd c(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(ng));
    Eigen::MatrixXd e(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(ng));
    for (std::size_t a = 0; a < nf; ++a)
      for (std::size_t b = 0; b < ng; ++b) {
        CompensatedSum s;
        for (std::size_t k = 0; k < n; ++k) s.add(fv[a][k] * gv[b][k]);
        const double cov = s.value() / static_cast<double>(n - 1);
        CompensatedSum q;
        for (std::size_t k = 0; k < n; ++k) {
          const double r = fv[a][k] * gv[b][k] - cov;
          q.add(r * r);
        }
        c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cov;
        e(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            std::sqrt(q.value() / static_cast<double>(n - 1) / static_cast<double>(n));
      }
    if (error) *error = e;
    return c;
  }
  const QuadratureSpec s = spec.for_dimension(mu.dim());
  const Eigen::MatrixXd full = covariance_matrix_on(TensorRule::for_measure(mu, s), fs, gs);
  if (error) *error = (full - covariance_matrix_on(TensorRule::for_measure(mu, s.halved()), fs, gs)).cwiseAbs();
  return full;
}

Primitive1D::Primitive1D(std::function<double(double)> f, Interval box, int order, int panels,
                         const std::vector<double>& breakpoints, double x0)
    : f_(std::move(f)), box_(box), order_(order) {
  const auto parts = panel_partition(box, panels, breakpoints);
  edges_.push_back(box.lo);
  cumulative_.push_back(0.0);
  const Rule1D& gl = gauss_legendre(order);
  CompensatedSum acc;
  for (const auto& p : parts) {
    Rule1D r;
    append_panel(r, p.lo, p.hi, gl);
    for (std::size_t k = 0; k < r.size(); ++k) acc.add(r.weights[k] * f_(r.nodes[k]));
    edges_.push_back(p.hi);
    cumulative_.push_back(acc.value());
  }
  offset_ = std::isnan(x0) ? 0.0 : from_lo(x0);
}

double Primitive1D::from_lo(double x) const {
  const Rule1D& gl = gauss_legendre(order_);
  auto segment = [&](double a, double b) {
    Rule1D r;
    append_panel(r, a, b, gl);
    CompensatedSum s;
    for (std::size_t k = 0; k < r.size(); ++k) s.add(r.weights[k] * f_(r.nodes[k]));
    return s.value();
  };
  if (x <= box_.lo) return -segment(x, box_.lo);
  if (x >= box_.hi) return cumulative_.back() + segment(box_.hi, x);
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t p = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return cumulative_[p] + segment(edges_[p], x);
}

double Primitive1D::operator()(double x) const { return from_lo(x) - offset_; }

}  // namespace covlab
