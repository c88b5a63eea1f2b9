#include "checkers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "covlab/builtins.hpp"
#include "covlab/determinantal.hpp"
#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/product_identities.hpp"
#include "covlab/quadrature.hpp"

namespace covlab::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// First-order error propagation for the few arithmetic steps between covariances and margins.
Estimate operator+(Estimate a, Estimate b) { return {a.value + b.value, a.error + b.error}; }
Estimate operator-(Estimate a, Estimate b) { return {a.value - b.value, a.error + b.error}; }
Estimate operator*(Estimate a, Estimate b) {
  return {a.value * b.value, std::abs(a.value) * b.error + std::abs(b.value) * a.error + a.error * b.error};
}
Estimate operator/(Estimate a, Estimate b) {
  const double v = a.value / b.value;
  return {v, (a.error + std::abs(v) * b.error) / std::abs(b.value)};
}

enum class Sense { at_least, at_most };

FunctionSpec lifted_primitive(const Weight& w, std::size_t i, std::size_t d) {
  return FunctionSpec(
      d, [w, i](Point x) { return w.A(x[i]); }, [w, i](std::size_t k, Point x) { return k == i ? w.a(x[i]) : 0.0; },
      [w, i](std::size_t k, std::size_t l, Point x) { return (k == i && l == i) ? w.a_prime(x[i]) : 0.0; },
      "A_" + std::to_string(i + 1));
}

json certification_witness(const Certification& c) {
  json w{{"worst", c.worst}, {"detail", c.detail}};
  if (!c.witness.empty()) w["point"] = c.witness.front();
  return w;
}

const FunctionSpec& need(const FunctionSpec& f, const char* field) {
  if (!f.valid()) throw ConfigError(field, "function is required for this theorem");
  return f;
}

struct Table {
  Eigen::MatrixXd c, e;
  Estimate operator()(std::size_t i, std::size_t j) const {
    return {c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))};
  }
};

class Context {
 public:
  Context(std::string id, const CheckInput& in) : in_(in), d_(in.mu.dim()) {
    if (d_ == 0) throw ConfigError("measure", "dimension must be positive");
    rep_.theorem_id = std::move(id);
    rep_.seed = in.seed;
    rep_.spec = in.spec;
    rep_.input = in.echo;
    rep_.monte_carlo = !deterministic(in.mu, in.spec);
    probe_ = ProbeSpec::for_measure(in.mu, in.spec.trunc_eps);
    probe_.points_per_axis = d_ == 1 ? 41 : (d_ == 2 ? 21 : 11);
    probe_.seed = derive_seed(in.seed, 0x5eed);
    weights_ = in.weights.empty() ? unit_weights(in.mu) : in.weights;
    if (weights_.size() != d_) throw ConfigError("weights", "need one weight per coordinate");
    box_ = in.mu.truncated_box(in.spec.trunc_eps);
  }

  std::size_t dim() const { return d_; }
  const CheckInput& in() const { return in_; }
  const std::vector<Weight>& weights() const { return weights_; }
  const std::vector<Interval>& box() const { return box_; }
  CheckReport& report() { return rep_; }

  bool require(std::string name, bool pass, json witness = json()) {
    rep_.hypotheses.push_back({std::move(name), pass, pass ? json() : std::move(witness)});
    return pass;
  }

  Certification certification(const FunctionSpec& f, Property p) const { return covlab::certify(f, p, probe_); }

  bool certify(const std::string& name, const FunctionSpec& f, Property p) {
    const Certification c = certification(f, p);
    return require(name, c.pass, certification_witness(c));
  }

  bool sign_condition(const std::string& condition, const FunctionSpec& f, const FunctionSpec& g) {
    const SignConditionReport r = check_sign_condition(f, g, weights_, condition, probe_, &in_.mu);
    return require("sign condition " + condition, r.pass, r.to_json());
  }

  bool dimension_one() { return require("measure is one-dimensional", d_ == 1, json{{"dimension", d_}}); }

  bool standard_gaussian() {
    json bad = json::array();
    for (std::size_t i = 0; i < d_; ++i) {
      const Measure1D& m = in_.mu.factor(i);
      const auto* p = std::get_if<GaussianParams>(&m.params());
      if (p == nullptr || std::abs(p->mean) > 1e-12 || std::abs(p->sigma - 1.0) > 1e-12)
        bad.push_back({{"coordinate", i}, {"measure", m.describe()}});
    }
    return require("measure is the standard Gaussian", bad.empty(), json{{"offending", bad}});
  }

  bool marginals_even() {
    json bad = json::array();
    for (std::size_t i = 0; i < d_; ++i)
      if (!in_.mu.factor(i).is_even()) bad.push_back(i);
    return require("marginals even", bad.empty(), json{{"coordinates", bad}});
  }

  bool marginals_log_concave() {
    json bad = json::array();
    for (std::size_t i = 0; i < d_; ++i)
      if (!in_.mu.factor(i).is_log_concave()) bad.push_back(i);
    return require("marginals log-concave", bad.empty(), json{{"coordinates", bad}});
  }

  bool symmetric() { return require("product measure symmetric", in_.mu.is_symmetric()); }

  bool weights_positive() {
    for (std::size_t i = 0; i < d_; ++i)
      for (int k = 0; k <= 200; ++k) {
        const double x = box_[i].lo + box_[i].width() * k / 200.0;
        const double a = weights_[i].a(x);
        if (!(a > 0.0)) return require("weights positive", false, json{{"coordinate", i}, {"x", x}, {"a", a}});
      }
    return require("weights positive", true);
  }

  bool weights_even() {
    for (std::size_t i = 0; i < d_; ++i) {
      const double r = std::min(std::abs(box_[i].lo), std::abs(box_[i].hi));
      for (int k = 1; k <= 64; ++k) {
        const double x = r * k / 64.0;
        const double a = weights_[i].a(x), b = weights_[i].a(-x);
        if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(a)))
          return require("weights even", false, json{{"coordinate", i}, {"x", x}, {"a(x)", a}, {"a(-x)", b}});
      }
    }
    return require("weights even", true);
  }

  /// Functions followed by the lifted centered primitives A_1..A_d.
  std::vector<FunctionSpec> with_primitives(std::vector<FunctionSpec> fs) const {
    for (std::size_t i = 0; i < d_; ++i) fs.push_back(lifted_primitive(weights_[i], i, d_));
    return fs;
  }

  Table covariances(const std::vector<FunctionSpec>& fs) const {
    Table t;
    t.c = covariance_matrix(in_.mu, fs, fs, in_.spec, &t.e);
    return t;
  }

  /// |Cov(f, A_i)| within a relative band of the Cauchy–Schwarz bound, or within the numerical error.
  bool orthogonal(const std::string& label, const Table& t, std::size_t f_index, std::size_t first_primitive) {
    json entries = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < d_; ++i) {
      const Estimate c = t(f_index, first_primitive + i);
      const double bound = std::sqrt(std::abs(t(f_index, f_index).value * t(first_primitive + i, first_primitive + i).value));
      const double tol = 1e-8 * bound + (rep_.monte_carlo ? 4.0 : 3.0) * c.error + 1e-300;
      const bool pass = std::abs(c.value) <= tol;
      ok = ok && pass;
      entries.push_back({{"coordinate", i}, {"cov", c.value}, {"tolerance", tol}});
    }
    return require(label, ok, json{{"covariances", entries}});
  }

  CheckReport structural_failure() {
    rep_.lhs = rep_.rhs = rep_.margin = kNaN;
    rep_.error = rep_.tolerance = kNaN;
    rep_.verdict = Verdict::hypothesis_failed;
    return rep_;
  }

  CheckReport finish(Estimate lhs, Estimate rhs, Sense sense) {
    rep_.lhs = lhs.value;
    rep_.rhs = rhs.value;
    rep_.margin = sense == Sense::at_least ? lhs.value - rhs.value : rhs.value - lhs.value;
    rep_.error = lhs.error + rhs.error;
    if (in_.tolerance)
      rep_.tolerance = *in_.tolerance;
    else
      rep_.tolerance = rep_.monte_carlo ? 4.0 * rep_.error : std::max(1e-6, 3.0 * rep_.error);
    rep_.diagnostics["sense"] = sense == Sense::at_least ? "lhs >= rhs" : "lhs <= rhs";
    rep_.verdict = decide_verdict(rep_.hypotheses_pass(), rep_.margin, rep_.tolerance, rep_.error);
    return rep_;
  }

 private:
  const CheckInput& in_;
  std::size_t d_;
  CheckReport rep_;
  ProbeSpec probe_;
  std::vector<Weight> weights_;
  std::vector<Interval> box_;
};

void reject_weights(const CheckInput& in, const char* id) {
  for (const auto& w : in.weights)
    if (!w.is_unit()) throw ConfigError("weights", std::string(id) + " is the a = 1 case and takes no weights");
}

Estimate cov_sum(const Table& t, std::size_t nfun, std::size_t d, bool divide) {
  Estimate rhs{0.0, 0.0};
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t k = nfun + i;
    Estimate term = t(0, k) * t(1, k);
    if (divide) term = term / t(k, k);
    rhs = rhs + term;
  }
  return rhs;
}

// ---- Gaussian theorems -------------------------------------------------------------------------

CheckReport gaussian_convex(const CheckInput& in) {
  Context c("T1.1.1", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.standard_gaussian();
  c.certify("f convex", f, Property::convex);
  c.certify("g convex", g, Property::convex);
  const Table t = c.covariances(c.with_primitives({f, g}));
  return c.finish(t(0, 1), cov_sum(t, 2, c.dim(), false), Sense::at_least);
}

CheckReport gaussian_log_concave(const CheckInput& in) {
  Context c("T1.1.2", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.standard_gaussian();
  c.certify("f log-concave", f, Property::log_concave);
  c.certify("g convex", g, Property::convex);
  const Table t = c.covariances(c.with_primitives({f, g}));
  c.orthogonal("f orthogonal to every coordinate", t, 0, 2);
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_most);
}

CheckReport gaussian_quasi_concave(const CheckInput& in) {
  Context c("T1.1.3", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.standard_gaussian();
  c.certify("f even", f, Property::even);
  c.certify("g even", g, Property::even);
  c.certify("f quasi-concave", f, Property::quasi_concave);
  c.certify("g quasi-concave", g, Property::quasi_concave);
  const Table t = c.covariances({f, g});
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_least);
}

// ---- One-dimensional theorems --------------------------------------------------------------------

CheckReport line_convex(const CheckInput& in) {
  Context c("T1.2.1", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  if (!c.dimension_one()) return c.structural_failure();
  c.certify("f convex", f, Property::convex);
  c.certify("g convex", g, Property::convex);
  const Table t = c.covariances({f, g, FunctionSpec::coordinate(1, 0)});
  c.report().diagnostics["variance"] = t(2, 2).value;
  return c.finish(t(2, 2) * t(0, 1), t(0, 2) * t(1, 2), Sense::at_least);
}

CheckReport line_log_concave(const CheckInput& in) {
  Context c("T1.2.2", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  if (!c.dimension_one()) return c.structural_failure();
  c.certify("f log-concave", f, Property::log_concave);
  c.certify("g convex", g, Property::convex);
  const Table t = c.covariances({f, g, FunctionSpec::coordinate(1, 0)});
  c.orthogonal("f orthogonal to x", t, 0, 2);
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_most);
}

CheckReport line_quasi_concave(const CheckInput& in) {
  Context c("T1.2.3", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  if (!c.dimension_one()) return c.structural_failure();
  c.certify("f even", f, Property::even);
  c.certify("g even", g, Property::even);
  c.certify("f quasi-concave", f, Property::quasi_concave);
  c.certify("g quasi-concave", g, Property::quasi_concave);
  const Table t = c.covariances({f, g});
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_least);
}

// ---- Tensorized theorems ---------------------------------------------------------------------------

// Shared by T1.3 and C1.4 so that the a ≡ 1 case yields the same report under both ids.
CheckReport weighted_product(const std::string& id, const CheckInput& in) {
  Context c(id, in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  const bool unit = std::all_of(c.weights().begin(), c.weights().end(), [](const Weight& w) { return w.is_unit(); });
  c.weights_positive();
  c.sign_condition(unit ? "cond-l2-fg" : "cond-l2-fg-mod", f, g);
  const Table t = c.covariances(c.with_primitives({f, g}));
  return c.finish(t(0, 1), cov_sum(t, 2, c.dim(), true), Sense::at_least);
}

CheckReport unconditional_tensor(const CheckInput& in) {
  Context c("T1.5", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.marginals_even();
  c.weights_even();
  c.weights_positive();
  c.sign_condition("cond-l2-idem", f, g);
  const Certification cf = c.certification(f, Property::unconditional);
  const Certification cg = c.certification(g, Property::unconditional);
  c.require("f or g unconditional", cf.pass || cg.pass,
            json{{"f", certification_witness(cf)}, {"g", certification_witness(cg)}});
  const Table t = c.covariances({f, g});
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_least);
}

CheckReport tensor_log_concave(const CheckInput& in) {
  Context c("T1.8.1", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.marginals_even();
  c.marginals_log_concave();
  c.certify("f positive", f, Property::positive);
  c.certify("f unconditional", f, Property::unconditional);
  c.certify("f log-concave", f, Property::log_concave);
  c.certify("g coordinatewise convex", g, Property::coordinatewise_convex);
  const Table t = c.covariances({f, g});
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_most);
}

CheckReport tensor_quasi_concave(const CheckInput& in) {
  Context c("T1.8.2", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.certify("f unconditional", f, Property::unconditional);
  c.certify("g unconditional", g, Property::unconditional);
  c.certify("f coordinatewise quasi-concave", f, Property::coordinatewise_quasi_concave);
  c.certify("g coordinatewise quasi-concave", g, Property::coordinatewise_quasi_concave);
  const Table t = c.covariances({f, g});
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_least);
}

// ---- Global (duplication) theorems ----------------------------------------------------------------

CheckReport global_phi_g(const std::string& id, const CheckInput& in) {
  Context c(id, in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.weights_positive();
  c.certify("f positive", f, Property::positive);
  c.sign_condition("cond-ii-phi-g", f, g);
  c.sign_condition("cond-ij-phi-g", f, g);
  const Table t = c.covariances(c.with_primitives({f, g}));
  c.orthogonal("f orthogonal to every A_i", t, 0, 2);
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_least);
}

CheckReport global_phi_psi(const std::string& id, const CheckInput& in) {
  Context c(id, in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  c.weights_positive();
  c.certify("f positive", f, Property::positive);
  c.certify("g positive", g, Property::positive);
  c.sign_condition("cond-ii-phi-psi", f, g);
  c.sign_condition("cond-ij-phi-psi", f, g);
  c.symmetric();
  c.weights_even();
  c.certify("f even", f, Property::even);
  c.certify("g even", g, Property::even);
  const Table t = c.covariances({f, g});
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_least);
}

// ---- Determinantal theorems ------------------------------------------------------------------------

CheckReport det_cov(const CheckInput& in) {
  Context c("T4.3", in);
  if (!c.dimension_one()) return c.structural_failure();
  std::vector<FunctionSpec> F = in.F, G = in.G;
  if (F.empty() && in.f.valid()) F = {in.f};
  if (G.empty() && in.g.valid()) G = {in.g};
  if (F.empty() || G.empty()) throw ConfigError("F", "T4.3 needs the tuples F and G (or f and g)");
  if (F.size() != G.size()) throw ConfigError("G", "F and G must have the same length");
  const std::size_t trials = in.options.value("trials", std::size_t{2000});
  const DetCovResult r = det_cov_matrix(in.mu.factor(0), F, G, in.spec, trials, derive_seed(in.seed, 43));
  for (const auto& h : r.hypotheses) c.require(h.name, h.pass, h.to_json());
  json cov = json::array();
  for (Eigen::Index i = 0; i < r.cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.cov.cols(); ++j) row.push_back(r.cov(i, j));
    cov.push_back(row);
  }
  c.report().diagnostics["cov"] = cov;
  c.report().diagnostics["bordered_determinant"] = r.bordered;
  c.report().diagnostics["bordered_agree"] = r.bordered_agree;
  return c.finish(r.det, {0.0, 0.0}, Sense::at_least);
}

CheckReport three_moment(const CheckInput& in) {
  Context c("C4.7", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  if (!c.dimension_one()) return c.structural_failure();
  const FunctionSpec x = FunctionSpec::coordinate(1, 0);
  const FunctionSpec x2 = fn::poly1d({0.0, 0.0, 1.0});
  const std::size_t trials = in.options.value("trials", std::size_t{2000});
  for (const auto& [name, h] : {std::pair<const char*, const FunctionSpec*>{"f", &f}, {"g", &g}}) {
    const ChebyshevSystem sys{{FunctionSpec::constant(1, 1.0), x, x2, *h}};
    const TupleReport r = chebyshev_certify(sys, ChebyshevMode::minors, c.box()[0], trials,
                                            derive_seed(in.seed, name[0] == 'f' ? 47 : 53));
    c.require(std::string("(1, x, x^2, ") + name + ") Chebyshev", r.pass, r.to_json());
  }
  const Table t = c.covariances({x, x2, f, g});
  const Estimate v1 = t(0, 0), v2 = t(1, 1), c12 = t(0, 1);
  const Estimate a1 = t(0, 2), a2 = t(1, 2), b1 = t(0, 3), b2 = t(1, 3), cfg = t(2, 3);
  const double s = std::sqrt(v1.value);
  const double gram = v1.value * v2.value - c12.value * c12.value;
  if (!c.require("1, x, x^2 linearly independent in L2(mu)", gram > 1e-10 * v1.value * v2.value && v2.value > 0.0,
                 json{{"gram_determinant", gram}, {"var_x", v1.value}, {"var_x2", v2.value}}))
    return c.structural_failure();
  const Estimate m1 = expectation(in.mu, [](Point p) { return p[0]; }, in.spec);
  const Estimate m3 = expectation(in.mu, [](Point p) { return p[0] * p[0] * p[0]; }, in.spec);
  const bool centered = std::abs(m1.value) <= 1e-10 * s + 3.0 * m1.error &&
                        std::abs(m3.value) <= 1e-10 * s * s * s + 3.0 * m3.error;
  c.report().diagnostics["form"] = centered ? "centered" : "general";
  if (centered) return c.finish(cfg, a1 * b1 / v1 + a2 * b2 / v2, Sense::at_least);
  const Estimate lhs = cfg * (v1 * v2 - c12 * c12);
  const Estimate rhs = a1 * v2 * b1 - a1 * c12 * b2 - a2 * c12 * b1 + a2 * v1 * b2;
  return c.finish(lhs, rhs, Sense::at_least);
}

// ---- Potential form -----------------------------------------------------------------------------------

// f_k(x_1..x_k)·A_k/V_k'·e^{−V_k} at both truncation endpoints of coordinate k, on a small grid of the
// leading coordinates, relative to the size of f_k at the same points.
json technical_limit(const CheckInput& in, const std::vector<Weight>& weights, const std::vector<Interval>& box,
                     bool& pass) {
  const std::size_t d = in.mu.dim();
  QuadratureSpec coarse = in.spec;
  coarse.order = std::min(coarse.order, 24);
  coarse.panels = std::min(coarse.panels, 4);
  json out = json::array();
  pass = true;
  for (std::size_t k = 0; k < d; ++k) {
    const FunctionSpec fk = marginalize(in.f, in.mu, k + 1, coarse);
    const Measure1D& m = in.mu.factor(k);
    const std::size_t lead_points = k == 0 ? 1 : 5;
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= lead_points;
    double worst = 0.0;
    std::vector<double> worst_at;
    for (std::size_t n = 0; n < total; ++n) {
      std::vector<double> x(k + 1);
      std::size_t r = n;
      for (std::size_t i = 0; i < k; ++i) {
        x[i] = box[i].lo + box[i].width() * (0.1 + 0.8 * static_cast<double>(r % lead_points) / (lead_points - 1));
        r /= lead_points;
      }
      x[k] = 0.5 * (box[k].lo + box[k].hi);
      const double scale = std::max(1.0, std::abs(fk(x)));
      for (double e : {box[k].lo, box[k].hi}) {
        x[k] = e;
        const double v1 = m.potential_d1(e);
        const double ratio = weights[k].A(e) / v1;
        const double value = std::abs(fk(x) * ratio * m.pdf(e)) / scale;
        if (!std::isfinite(value) || value > worst) {
          worst = std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
          worst_at = x;
        }
      }
    }
    const bool ok = worst <= 1e-6;
    pass = pass && ok;
    out.push_back({{"coordinate", k}, {"worst_relative", std::isfinite(worst) ? json(worst) : json("inf")},
                   {"at", worst_at}, {"pass", ok}});
  }
  return out;
}

CheckReport potential_tensor(const CheckInput& in) {
  Context c("T5.3", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  json bad = json::array();
  for (std::size_t i = 0; i < c.dim(); ++i) {
    const Measure1D& m = in.mu.factor(i);
    const Interval s = m.support();
    if (!m.has_potential() || std::isfinite(s.lo) || std::isfinite(s.hi)) bad.push_back(i);
  }
  if (!c.require("marginals have positive smooth densities on the line", bad.empty(), json{{"coordinates", bad}}))
    return c.structural_failure();
  c.weights_positive();
  c.sign_condition("cond-V-i", f, g);
  c.sign_condition("cond-V-ij", f, g);
  bool limit_ok = true;
  const json limit = technical_limit(in, c.weights(), c.box(), limit_ok);
  c.require("boundary terms vanish at the truncation endpoints", limit_ok, json{{"endpoints", limit}});
  c.report().diagnostics["boundary_terms"] = limit;
  const Table t = c.covariances(c.with_primitives({f, g}));
  return c.finish(t(0, 1), cov_sum(t, 2, c.dim(), true), Sense::at_least);
}

// ---- Examples ---------------------------------------------------------------------------------------

CheckReport free_energy(const CheckInput& in) {
  reject_weights(in, "EX9.1");
  Context c("EX9.1", in);
  const double alpha = in.options.value("alpha", 1.0), beta = in.options.value("beta", 2.0);
  if (!(alpha > 0.0)) throw ConfigError("options.alpha", "must be positive");
  if (!(beta > 0.0)) throw ConfigError("options.beta", "must be positive");
  const FunctionSpec fa = fn::softmax_free_energy(alpha, c.dim());
  const FunctionSpec fb = fn::softmax_free_energy(beta, c.dim());
  c.sign_condition("cond-l2-fg", fa, fb);
  const Table t = c.covariances(c.with_primitives({fa, fb}));
  c.report().diagnostics["alpha"] = alpha;
  c.report().diagnostics["beta"] = beta;
  return c.finish(t(0, 1), cov_sum(t, 2, c.dim(), true), Sense::at_least);
}

CheckReport tilted_second_moment(const CheckInput& in) {
  reject_weights(in, "EX9.2");
  Context c("EX9.2", in);
  const std::size_t d = c.dim();
  if (d > 3) throw ConfigError("measure", "EX9.2 integrates the tilted density directly and supports d <= 3");
  const double J = in.options.value("J", 0.2);
  std::vector<double> theta(d, 1.0);
  if (in.options.contains("theta")) theta = in.options.at("theta").get<std::vector<double>>();
  if (theta.size() != d) throw ConfigError("options.theta", "must have one entry per coordinate");
  c.symmetric();
  c.require("J non-negative", J >= 0.0, json{{"J", J}});
  c.require("theta non-negative", std::all_of(theta.begin(), theta.end(), [](double t) { return t >= 0.0; }),
            json{{"theta", theta}});
  auto chain = [d](Point x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) s += x[i] * x[i + 1];
    return s;
  };
  auto proj2 = [theta](Point x) {
    double s = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) s += theta[i] * x[i];
    return s * s;
  };
  const Estimate Z = expectation(in.mu, [&](Point x) { return std::exp(J * chain(x)); }, in.spec);
  const Estimate num = expectation(in.mu, [&](Point x) { return proj2(x) * std::exp(J * chain(x)); }, in.spec);
  const Estimate plain = expectation(in.mu, proj2, in.spec);
  c.require("tilted measure normalizable", std::isfinite(Z.value) && Z.value > 0.0, json{{"Z", Z.value}});
  c.report().diagnostics["Z_J"] = Z.value;
  c.report().diagnostics["J"] = J;
  c.report().diagnostics["theta"] = theta;
  return c.finish(num / Z, plain, Sense::at_least);
}

CheckReport mixture_gaussian(const CheckInput& in) {
  Context c("TA.1", in);
  const auto& f = need(in.f, "f");
  const auto& g = need(in.g, "g");
  json bad = json::array();
  for (std::size_t i = 0; i < c.dim(); ++i) {
    const Measure1D& m = in.mu.factor(i);
    const auto* gp = std::get_if<GaussianParams>(&m.params());
    const bool ok = m.family() == Family::gaussian_scale_mixture || (gp != nullptr && std::abs(gp->mean) <= 1e-12);
    if (!ok) bad.push_back({{"coordinate", i}, {"measure", m.describe()}});
  }
  c.require("marginals are centered Gaussian scale mixtures", bad.empty(), json{{"offending", bad}});
  c.certify("f log-concave", f, Property::log_concave);
  c.certify("f even", f, Property::even);
  c.certify("g convex", g, Property::convex);
  if (in.options.value("lemma_probe", true)) {
    std::vector<double> sigmas{0.5, 0.75, 1.0, 1.5, 2.0};
    if (in.options.contains("sigmas")) sigmas = in.options.at("sigmas").get<std::vector<double>>();
    QuadratureSpec ps = in.spec;
    ps.det_dim_cap = std::max<int>(ps.det_dim_cap, static_cast<int>(c.dim()));
    const MonotonicityProbe pg = coord_increase_probe(g, sigmas, ps);
    const MonotonicityProbe pf = coord_increase_probe(f, sigmas, ps);
    c.report().diagnostics["lemma_probe"] = {
        {"g", pg.to_json()},
        {"f", pf.to_json()},
        {"g_increasing", pg.min_difference >= -1e-6 - pg.error},
        {"f_decreasing", pf.max_difference <= 1e-6 + pf.error}};
  }
  const Table t = c.covariances({f, g});
  return c.finish(t(0, 1), {0.0, 0.0}, Sense::at_most);
}

}  // namespace

std::map<std::string, Checker> builtin_checkers() {
  std::map<std::string, Checker> m;
  m["T1.1.1"] = gaussian_convex;
  m["T1.1.2"] = gaussian_log_concave;
  m["T1.1.3"] = gaussian_quasi_concave;
  m["T1.2.1"] = line_convex;
  m["T1.2.2"] = line_log_concave;
  m["T1.2.3"] = line_quasi_concave;
  m["T1.3"] = [](const CheckInput& in) { return weighted_product("T1.3", in); };
  m["C1.4"] = [](const CheckInput& in) {
    reject_weights(in, "C1.4");
    return weighted_product("C1.4", in);
  };
  m["T1.5"] = unconditional_tensor;
  m["T1.8.1"] = tensor_log_concave;
  m["T1.8.2"] = tensor_quasi_concave;
  m["T1.9.1"] = [](const CheckInput& in) { return global_phi_g("T1.9.1", in); };
  m["T1.9.2"] = [](const CheckInput& in) { return global_phi_psi("T1.9.2", in); };
  m["C1.10.1"] = [](const CheckInput& in) {
    reject_weights(in, "C1.10.1");
    return global_phi_g("C1.10.1", in);
  };
  m["C1.10.2"] = [](const CheckInput& in) {
    reject_weights(in, "C1.10.2");
    return global_phi_psi("C1.10.2", in);
  };
  m["T4.3"] = det_cov;
  m["C4.7"] = three_moment;
  m["T5.3"] = potential_tensor;
  m["EX9.1"] = free_energy;
  m["EX9.2"] = tilted_second_moment;
  m["TA.1"] = mixture_gaussian;
  return m;
}

}  // namespace covlab::detail
