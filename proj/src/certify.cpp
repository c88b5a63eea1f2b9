#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "covlab/errors.hpp"
#include "covlab/functions.hpp"

namespace covlab {

namespace {

constexpr double kSignTol = 1e-7;
constexpr double kSymTol = 1e-8;

double uniform_in(std::mt19937_64& rng, const Interval& iv) {
  std::uniform_real_distribution<double> u(iv.lo, iv.hi);
  return u(rng);
}

std::vector<double> random_point(std::mt19937_64& rng, const std::vector<Interval>& box) {
  std::vector<double> x(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) x[i] = uniform_in(rng, box[i]);
  return x;
}

double checked(double v, Point x, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << " is not finite at (";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    throw NumericalError(os.str());
  }
  return v;
}

// Tracks the most negative slack; ties go to the lexicographically smallest witness.
struct Violations {
  bool any = false;
  double worst = 0.0;
  std::vector<std::vector<double>> witness;

  void record(double slack, std::vector<std::vector<double>> pts) {
    if (!any || slack < worst || (slack == worst && pts < witness)) {
      worst = slack;
      witness = std::move(pts);
    }
    any = true;
  }
};

std::uint64_t property_stream(Property p) { return 0x51ED270B27ULL * (static_cast<std::uint64_t>(p) + 1); }

double min_eigenvalue(const Eigen::MatrixXd& h) {
  if (h.rows() == 1) return h(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Hessian of −ln f from derivatives of f.
Eigen::MatrixXd neg_log_hessian(const FunctionSpec& f, Point x) {
  if (const FunctionSpec* h = f.log_form()) return -h->hessian(x);
  const double v = f(x);
  const Eigen::VectorXd g = f.gradient(x);
  const Eigen::MatrixXd h = f.hessian(x);
  return -h / v + g * g.transpose() / (v * v);
}

// Slope determinant on random ordered triples along random lines (or coordinate lines).
void triple_checks(const std::function<double(Point)>& h, const ProbeSpec& probe, bool coordinate_lines,
                   std::mt19937_64& rng, Violations& out) {
  const std::size_t d = probe.dim();
  for (std::size_t trial = 0; trial < probe.random_checks; ++trial) {
    const std::vector<double> a = random_point(rng, probe.box);
    std::vector<double> b = coordinate_lines ? a : random_point(rng, probe.box);
    if (coordinate_lines) {
      const std::size_t k = static_cast<std::size_t>(rng() % d);
      b[k] = uniform_in(rng, probe.box[k]);
    }
    std::vector<double> t = {0.0, 1.0, std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
    std::sort(t.begin(), t.end());
    if (t[1] - t[0] < 1e-6 || t[2] - t[1] < 1e-6) continue;
    std::vector<std::vector<double>> pts(3, std::vector<double>(d));
    double v[3];
    for (int m = 0; m < 3; ++m) {
      for (std::size_t i = 0; i < d; ++i) pts[m][i] = a[i] + t[m] * (b[i] - a[i]);
      v[m] = checked(h(pts[m]), pts[m], "function value");
    }
    const double D = (t[1] - t[0]) * (v[2] - v[1]) - (t[2] - t[1]) * (v[1] - v[0]);
    const double scale = (t[2] - t[0]) * (1.0 + std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])}));
    if (D < -kSignTol * scale) out.record(D / scale, pts);
  }
}

void quasi_concave_checks(const FunctionSpec& f, const ProbeSpec& probe, bool coordinate_lines,
                          std::mt19937_64& rng, Violations& out) {
  const std::size_t d = probe.dim();
  for (std::size_t trial = 0; trial < probe.random_checks; ++trial) {
    const std::vector<double> a = random_point(rng, probe.box);
    std::vector<double> b = coordinate_lines ? a : random_point(rng, probe.box);
    if (coordinate_lines) {
      const std::size_t k = static_cast<std::size_t>(rng() % d);
      b[k] = uniform_in(rng, probe.box[k]);
    }
    const double fa = checked(f(a), a, "function value");
    const double fb = checked(f(b), b, "function value");
    const double lower = std::min(fa, fb);
    for (double lam : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      std::vector<double> m(d);
      for (std::size_t i = 0; i < d; ++i) m[i] = lam * a[i] + (1.0 - lam) * b[i];
      const double fm = checked(f(m), m, "function value");
      const double tol = kSignTol * (1.0 + std::max(std::abs(fa), std::abs(fb)));
      if (fm < lower - tol) out.record((fm - lower) / (1.0 + std::abs(lower)), {a, b, m});
    }
  }
}

}  // namespace

ProbeSpec ProbeSpec::for_measure(const ProductMeasure& mu, double eps) {
  ProbeSpec p;
  p.box = mu.truncated_box(eps);
  return p;
}

ProbeSpec ProbeSpec::for_box(std::vector<Interval> box) {
  ProbeSpec p;
  p.box = std::move(box);
  return p;
}

std::vector<std::vector<double>> ProbeSpec::points() const {
  const std::size_t d = dim();
  std::vector<std::vector<double>> out;
  if (d <= grid_dim_cap) {
    const std::size_t n = std::max<std::size_t>(points_per_axis, 2);
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= n;
    out.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t k = 0; k < total; ++k) {
      std::vector<double> x(d);
      for (std::size_t i = 0; i < d; ++i)
        x[i] = box[i].lo + box[i].width() * static_cast<double>(idx[i]) / static_cast<double>(n - 1);
      out.push_back(std::move(x));
      for (std::size_t i = d; i-- > 0;) {
        if (++idx[i] < n) break;
        idx[i] = 0;
      }
    }
    return out;
  }
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  out.reserve(samples);
  for (std::size_t k = 1; k <= samples; ++k) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      const unsigned b = primes[i % 16];
      double f = 1.0, r = 0.0;
      for (std::size_t n = k; n > 0; n /= b) {
        f /= b;
        r += f * static_cast<double>(n % b);
      }
      x[i] = box[i].lo + box[i].width() * r;
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::string ProbeSpec::describe() const {
  std::ostringstream os;
  if (dim() <= grid_dim_cap) {
    os << "tensor grid " << points_per_axis << "^" << dim();
  } else {
    os << "Halton " << samples << " points";
  }
  os << " on [";
  for (std::size_t i = 0; i < box.size(); ++i) os << (i ? " x " : "") << box[i].lo << "," << box[i].hi;
  os << "]";
  return os.str();
}

Certification certify(const FunctionSpec& f, Property property, const ProbeSpec& probe) {
  if (probe.dim() != f.dim()) throw std::invalid_argument("probe box dimension does not match the function");
  Certification cert;
  cert.property = property;
  const std::size_t d = f.dim();
  const auto pts = probe.points();
  std::mt19937_64 rng(probe.seed ^ property_stream(property));
  Violations v;

  auto require_positive = [&]() {
    for (const auto& x : pts) {
      if (const FunctionSpec* h = f.log_form()) {
        const double lx = (*h)(x);
        if (std::isnan(lx) || lx == -INFINITY) v.record(0.0, {x});
        continue;
      }
      const double fx = checked(f(x), x, "function value");
      if (!(fx > 0.0)) v.record(fx, {x});
    }
  };

  switch (property) {
    case Property::positive:
      require_positive();
      break;
    case Property::even:
      for (const auto& x : pts) {
        std::vector<double> m(x);
        for (auto& c : m) c = -c;
        const double a = checked(f(x), x, "function value"), b = checked(f(m), m, "function value");
        const double tol = kSymTol * (1.0 + std::abs(a));
        if (std::abs(a - b) > tol) v.record(-std::abs(a - b) / (1.0 + std::abs(a)), {x});
      }
      break;
    case Property::unconditional: {
      std::vector<std::vector<double>> signs;
      if (d <= 10) {
        for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
          std::vector<double> s(d);
          for (std::size_t i = 0; i < d; ++i) s[i] = (mask >> i) & 1U ? -1.0 : 1.0;
          signs.push_back(s);
        }
      } else {
        for (int k = 0; k < 64; ++k) {
          std::vector<double> s(d);
          for (auto& c : s) c = (rng() & 1U) ? -1.0 : 1.0;
          signs.push_back(s);
        }
      }
      for (const auto& x : pts) {
        const double a = checked(f(x), x, "function value");
        for (const auto& s : signs) {
          std::vector<double> m(x);
          for (std::size_t i = 0; i < d; ++i) m[i] *= s[i];
          const double b = checked(f(m), m, "function value");
          if (std::abs(a - b) > kSymTol * (1.0 + std::abs(a))) {
            v.record(-std::abs(a - b) / (1.0 + std::abs(a)), {x});
            break;
          }
        }
      }
      break;
    }
    case Property::convex:
    case Property::coordinatewise_convex: {
      const bool coord = property == Property::coordinatewise_convex;
      for (const auto& x : pts) {
        const Eigen::MatrixXd h = f.hessian(x);
        if (!h.allFinite()) checked(NAN, x, "Hessian");
        const double scale = std::abs(f(x)) + h.cwiseAbs().maxCoeff();
        const double low = coord ? h.diagonal().minCoeff() : min_eigenvalue(h);
        const double tol = kSignTol * (1.0 + scale);
        if (low < -tol) v.record(low / (1.0 + scale), {x});
      }
      triple_checks([&](Point x) { return f(x); }, probe, coord, rng, v);
      break;
    }
    case Property::log_concave: {
      require_positive();
      if (v.any) break;
      for (const auto& x : pts) {
        const Eigen::MatrixXd h = neg_log_hessian(f, x);
        if (!h.allFinite()) checked(NAN, x, "Hessian of -log f");
        const double scale = h.cwiseAbs().maxCoeff();
        const double low = min_eigenvalue(h);
        if (low < -kSignTol * (1.0 + scale)) v.record(low / (1.0 + scale), {x});
      }
      triple_checks([&](Point x) { return -f.log_value(x); }, probe, false, rng, v);
      break;
    }
    case Property::quasi_concave:
      quasi_concave_checks(f, probe, false, rng, v);
      break;
    case Property::coordinatewise_quasi_concave:
      quasi_concave_checks(f, probe, true, rng, v);
      break;
  }
  cert.pass = !v.any;
  cert.worst = v.worst;
  cert.witness = std::move(v.witness);
  std::ostringstream os;
  os << property_name(property) << (cert.pass ? " holds" : " violated") << " on " << probe.describe();
  cert.detail = os.str();
  return cert;
}

const char* sign_symbol(Sign s) {
  switch (s) {
    case Sign::positive: return "+";
    case Sign::negative: return "-";
    case Sign::zero: return "0";
    case Sign::mixed: return "mixed";
  }
  return "?";
}

Sign classify_sign(const std::vector<double>& values, const std::vector<double>& tolerances) {
  bool pos = false, neg = false;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > tolerances[k]) pos = true;
    if (values[k] < -tolerances[k]) neg = true;
  }
  if (pos && neg) return Sign::mixed;
  if (pos) return Sign::positive;
  if (neg) return Sign::negative;
  return Sign::zero;
}

json SignConditionReport::to_json() const {
  json e = json::array();
  for (const auto& s : entries)
    e.push_back({{"i", s.i}, {"j", s.j}, {"sign_f", sign_symbol(s.sign_f)}, {"sign_g", sign_symbol(s.sign_g)},
                 {"compatible", s.compatible}});
  return json{{"condition", condition}, {"pass", pass}, {"probe", probe}, {"entries", e}};
}

namespace {

enum class Quantity { hessian_mod, neg_log_mod, potential_ratio };
enum class Rule { equal, nonpos_nonneg, both_nonpos };

struct ConditionShape {
  bool diagonal = false;
  bool off_diagonal = false;
  Quantity qf = Quantity::hessian_mod;
  Quantity qg = Quantity::hessian_mod;
  Rule rule = Rule::equal;
};

ConditionShape shape_of(const std::string& c) {
  if (c == "cond-l2-fg-mod" || c == "cond-l2-fg") return {true, true};
  if (c == "cond-a-i" || c == "cond-l2-idem" || c == "cond-V-i") return {true, false};
  if (c == "cond-a-ij") return {false, true};
  if (c == "cond-ii-phi-g") return {true, false, Quantity::neg_log_mod, Quantity::hessian_mod, Rule::nonpos_nonneg};
  if (c == "cond-ij-phi-g") return {false, true, Quantity::neg_log_mod, Quantity::hessian_mod, Rule::nonpos_nonneg};
  if (c == "cond-ii-phi-psi") return {true, false, Quantity::neg_log_mod, Quantity::neg_log_mod, Rule::both_nonpos};
  if (c == "cond-ij-phi-psi") return {false, true, Quantity::neg_log_mod, Quantity::neg_log_mod, Rule::both_nonpos};
  if (c == "cond-V-ij") return {false, true, Quantity::potential_ratio, Quantity::potential_ratio, Rule::equal};
  throw ConfigError("condition", "unknown sign condition '" + c + "'");
}

// A_k / V_k' on factor k; removable singularity at the mode handled by a_k / V_k''.
double potential_ratio(const Weight& w, const Measure1D& m, double x) {
  if (w.name() == "potential_curvature") return 1.0;
  const double v1 = m.potential_d1(x);
  const double v2 = m.potential_d2(x);
  if (std::abs(v1) <= 1e-7 * (1.0 + std::abs(x)) * std::max(v2, 1e-300)) return w.a(x) / v2;
  return w.A(x) / v1;
}

}  // namespace

SignConditionReport check_sign_condition(const FunctionSpec& f, const FunctionSpec& g,
                                         const std::vector<Weight>& weights, const std::string& condition,
                                         const ProbeSpec& probe, const ProductMeasure* mu) {
  const ConditionShape shape = shape_of(condition);
  const std::size_t d = f.dim();
  if (g.dim() != d) throw std::invalid_argument("f and g dimensions differ");
  if (!weights.empty() && weights.size() != d) throw ConfigError("weights", "need one weight per coordinate");
  if ((shape.qf == Quantity::potential_ratio) && (mu == nullptr || mu->dim() != d))
    throw ConfigError("measure", condition + " requires the product measure potentials");
  if (shape.qf == Quantity::potential_ratio && weights.empty())
    throw ConfigError("weights", condition + " requires explicit weights");

  auto a = [&](std::size_t i, double x) { return weights.empty() ? 1.0 : weights[i].a(x); };
  auto a1 = [&](std::size_t i, double x) { return weights.empty() ? 0.0 : weights[i].a_prime(x); };

  // Value of the conditioned quantity and a local scale used for the tolerance band.
  auto evaluate = [&](const FunctionSpec& h, Quantity q, std::size_t i, std::size_t j, Point x,
                      double& scale) -> double {
    switch (q) {
      case Quantity::hessian_mod: {
        scale = std::abs(h(x)) + std::abs(h.partial(i, x));
        const double ai = a(i, x[i]);
        double v = h.second(i, j, x) / ai;
        if (i == j) v -= h.partial(i, x) * a1(i, x[i]) / (ai * ai);
        return v;
      }
      case Quantity::neg_log_mod: {
        const double hp = neg_log_partial(h, i, x);
        scale = std::abs(hp) + std::abs(neg_log_partial(h, j, x));
        const double ai = a(i, x[i]);
        double v = neg_log_second(h, i, j, x) / ai;
        if (i == j) v -= hp * a1(i, x[i]) / (ai * ai);
        return v;
      }
      case Quantity::potential_ratio: {
        // ∂_i ∂_j (h · r_j(x_j)) for i < j, with r_j = A_j / V_j'.
        const Measure1D& m = mu->factor(j);
        const double xj = x[j];
        const double r = potential_ratio(weights[j], m, xj);
        const double step = std::cbrt(2.2e-16) * (1.0 + std::abs(xj));
        const double rp = (potential_ratio(weights[j], m, xj + step) - potential_ratio(weights[j], m, xj - step)) /
                          (2.0 * step);
        scale = std::abs(h(x)) + std::abs(h.partial(i, x));
        return r * h.second(i, j, x) + rp * h.partial(i, x);
      }
    }
    return 0.0;
  };

  SignConditionReport report;
  report.condition = condition;
  report.probe = probe.describe();
  const auto pts = probe.points();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      if (i == j && !shape.diagonal) continue;
      if (i != j && !shape.off_diagonal) continue;
      std::vector<double> vf, tf, vg, tg;
      vf.reserve(pts.size());
      for (const auto& x : pts) {
        double s = 0.0;
        const double qf = checked(evaluate(f, shape.qf, i, j, x, s), x, "sign-condition quantity of f");
        vf.push_back(qf);
        tf.push_back(kSignTol * (1.0 + s));
        const double qg = checked(evaluate(g, shape.qg, i, j, x, s), x, "sign-condition quantity of g");
        vg.push_back(qg);
        tg.push_back(kSignTol * (1.0 + s));
      }
      SignEntry e{i, j, classify_sign(vf, tf), classify_sign(vg, tg), true};
      const bool mixed = e.sign_f == Sign::mixed || e.sign_g == Sign::mixed;
      switch (shape.rule) {
        case Rule::equal:
          e.compatible = !mixed && (e.sign_f == e.sign_g || e.sign_f == Sign::zero || e.sign_g == Sign::zero);
          break;
        case Rule::nonpos_nonneg:
          e.compatible = (e.sign_f == Sign::negative || e.sign_f == Sign::zero) &&
                         (e.sign_g == Sign::positive || e.sign_g == Sign::zero);
          break;
        case Rule::both_nonpos:
          e.compatible = (e.sign_f == Sign::negative || e.sign_f == Sign::zero) &&
                         (e.sign_g == Sign::negative || e.sign_g == Sign::zero);
          break;
      }
      report.pass = report.pass && e.compatible;
      report.entries.push_back(e);
    }
  }
  return report;
}

double LayerCake::reconstruct(double x) const {
  const double ax = std::abs(x);
  std::size_t count = 0;
  for (const auto& l : levels)
    if (ax <= l.r) ++count;
  return dt * static_cast<double>(count);
}

LayerCake layer_cake_decompose(const FunctionSpec& f, std::size_t levels, double R) {
  if (f.dim() != 1) throw std::invalid_argument("layer-cake decomposition needs a univariate function");
  if (levels == 0) throw std::invalid_argument("levels must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
  // Even quasi-concave functions are non-increasing on [0, R]; verify on a fine grid.
  constexpr int kGrid = 4000;
  double prev = f(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double x = R * k / kGrid;
    const double v = checked(f(x), Point(&x, 1), "function value");
    const double mirror = f(-x);
    if (v < -1e-12) throw NumericalError("layer cake requires f >= 0");
    if (std::abs(v - mirror) > kSymTol * (1.0 + std::abs(v))) throw NumericalError("layer cake requires an even f");
    if (v > prev + 1e-12 * (1.0 + std::abs(prev))) {
      std::ostringstream os;
      os << "non-quasi-concave input: level set at t=" << 0.5 * (v + prev) << " is not an interval";
      throw NumericalError(os.str());
    }
    prev = v;
  }
  LayerCake out;
  out.max_value = f(0.0);
  out.dt = out.max_value / static_cast<double>(levels);
  for (std::size_t k = 1; k <= levels; ++k) {
    const double t = out.dt * static_cast<double>(k);
    double r;
    if (f(R) >= t) {
      r = R;
    } else {
      double lo = 0.0, hi = R;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + R); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= t ? lo : hi) = mid;
      }
      r = lo;
    }
    out.levels.push_back({t, r});
  }
  return out;
}

}  // namespace covlab
