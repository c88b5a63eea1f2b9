#include "covlab/builtins.hpp"

#include <cmath>

#include "covlab/errors.hpp"

namespace covlab::fn {

namespace {

struct Shape {
  double v, d1, d2;
};

enum ShapeId { identity, square, neg_square, cube, quartic, exp_, cosh_, softplus, sqrt1p, gauss, cauchy, sech, logcosh, sin_ };

const char* const kShapeNames[] = {"identity", "square", "neg_square", "cube", "quartic", "exp", "cosh",
                                   "softplus", "sqrt1p", "gauss", "cauchy", "sech", "logcosh", "sin"};

int shape_id(const std::string& kind) {
  for (int k = 0; k <= sin_; ++k)
    if (kind == kShapeNames[k]) return k;
  throw ConfigError("kind", "unknown univariate shape '" + kind + "'");
}

double shape_value(int id, double z) {
  switch (id) {
    case identity: return z;
    case square: return z * z;
    case neg_square: return -z * z;
    case cube: return z * z * z;
    case quartic: return z * z * z * z;
    case exp_: return std::exp(z);
    case cosh_: return std::cosh(z);
    case softplus: return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    case sqrt1p: return std::sqrt(1.0 + z * z);
    case gauss: return std::exp(-z * z);
    case cauchy: return 1.0 / (1.0 + z * z);
    case sech: return 1.0 / std::cosh(z);
    case logcosh: {
      const double a = std::abs(z);
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
    default: return std::sin(z);
  }
}

Shape shape(int id, double z) {
  switch (id) {
    case identity: return {z, 1.0, 0.0};
    case square: return {z * z, 2.0 * z, 2.0};
    case neg_square: return {-z * z, -2.0 * z, -2.0};
    case cube: return {z * z * z, 3.0 * z * z, 6.0 * z};
    case quartic: return {z * z * z * z, 4.0 * z * z * z, 12.0 * z * z};
    case exp_: {
      const double e = std::exp(z);
      return {e, e, e};
    }
    case cosh_: return {std::cosh(z), std::sinh(z), std::cosh(z)};
    case softplus: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return {shape_value(softplus, z), s, s * (1.0 - s)};
    }
    case sqrt1p: {
      const double r = std::sqrt(1.0 + z * z);
      return {r, z / r, 1.0 / (r * r * r)};
    }
    case gauss: {
      const double e = std::exp(-z * z);
      return {e, -2.0 * z * e, (4.0 * z * z - 2.0) * e};
    }
    case cauchy: {
      const double q = 1.0 + z * z;
      return {1.0 / q, -2.0 * z / (q * q), (6.0 * z * z - 2.0) / (q * q * q)};
    }
    case sech: {
      const double s = 1.0 / std::cosh(z), t = std::tanh(z);
      return {s, -s * t, s * (t * t - s * s)};
    }
    case logcosh: {
      const double s = 1.0 / std::cosh(z);
      return {shape_value(logcosh, z), std::tanh(z), s * s};
    }
    default: return {std::sin(z), std::cos(z), -std::sin(z)};
  }
}

std::vector<double> vec(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "must be an array of numbers");
  return j.get<std::vector<double>>();
}

Eigen::MatrixXd matrix(const json& j, std::size_t d, const std::string& field) {
  if (j.is_number()) return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) * j.get<double>();
  if (!j.is_array() || j.size() != d) throw ConfigError(field, "must be a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!j[i].is_array() || j[i].size() != d) throw ConfigError(field, "rows must have length " + std::to_string(d));
    for (std::size_t k = 0; k < d; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
  }
  return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

Eigen::Map<const Eigen::VectorXd> as_vec(Point x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

double Atom1D::value(double x) const { return coef * shape_value(id >= 0 ? id : shape_id(kind), scale * (x - shift)); }
double Atom1D::d1(double x) const { return coef * scale * shape(id >= 0 ? id : shape_id(kind), scale * (x - shift)).d1; }
double Atom1D::d2(double x) const {
  return coef * scale * scale * shape(id >= 0 ? id : shape_id(kind), scale * (x - shift)).d2;
}

json Atom1D::to_json() const {
  return json{{"kind", kind}, {"coef", coef}, {"scale", scale}, {"shift", shift}, {"coord", coord}};
}

Atom1D Atom1D::from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "must be an object");
  Atom1D a;
  a.kind = j.value("kind", std::string("square"));
  a.coef = j.value("coef", 1.0);
  a.scale = j.value("scale", 1.0);
  a.shift = j.value("shift", 0.0);
  a.coord = j.value("coord", std::size_t{0});
  try {
    a.id = shape_id(a.kind);
  } catch (const ConfigError& e) {
    throw ConfigError(field + ".kind", e.what());
  }
  return a;
}

FunctionSpec atom(const Atom1D& given) {
  Atom1D a = given;
  a.id = shape_id(a.kind);
  return FunctionSpec(
      1, [a](Point x) { return a.value(x[0]); }, [a](std::size_t, Point x) { return a.d1(x[0]); },
      [a](std::size_t, std::size_t, Point x) { return a.d2(x[0]); }, "atom:" + a.kind,
      json{{"builtin", "atom"}, {"params", a.to_json()}});
}

FunctionSpec linear(std::vector<double> w, double c) {
  const std::size_t d = w.size();
  return FunctionSpec(
      d,
      [w, c](Point x) {
        double s = c;
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
        return s;
      },
      [w](std::size_t i, Point) { return w[i]; }, [](std::size_t, std::size_t, Point) { return 0.0; }, "linear",
      json{{"builtin", "linear"}, {"params", {{"w", w}, {"c", c}}}});
}

FunctionSpec quadratic(Eigen::MatrixXd Q, Eigen::VectorXd b, double c) {
  const auto d = static_cast<std::size_t>(Q.rows());
  Q = 0.5 * (Q + Q.transpose()).eval();
  json src{{"builtin", "quadratic"},
           {"params", {{"Q", matrix_json(Q)}, {"b", std::vector<double>(b.data(), b.data() + b.size())}, {"c", c}}}};
  return FunctionSpec(
      d, [Q, b, c](Point x) { auto v = as_vec(x); return 0.5 * v.dot(Q * v) + b.dot(v) + c; },
      [Q, b](std::size_t i, Point x) { return Q.row(static_cast<Eigen::Index>(i)).dot(as_vec(x)) + b(static_cast<Eigen::Index>(i)); },
      [Q](std::size_t i, std::size_t j, Point) { return Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); },
      "quadratic", src);
}

FunctionSpec softmax_free_energy(double beta, std::size_t d) {
  if (!(beta > 0.0)) throw ConfigError("params.beta", "must be positive");
  auto probs = [beta](Point x) {
    double m = x[0];
    for (double v : x) m = std::max(m, v);
    std::vector<double> p(x.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (p[i] = std::exp(beta * (x[i] - m)));
    for (auto& v : p) v /= s;
    return p;
  };
  return FunctionSpec(
      d,
      [beta](Point x) {
        double m = x[0];
        for (double v : x) m = std::max(m, v);
        double s = 0.0;
        for (double v : x) s += std::exp(beta * (v - m));
        return m + std::log(s) / beta;
      },
      [probs](std::size_t i, Point x) { return probs(x)[i]; },
      [probs, beta](std::size_t i, std::size_t j, Point x) {
        const auto p = probs(x);
        return beta * ((i == j ? p[i] : 0.0) - p[i] * p[j]);
      },
      "softmax_free_energy", json{{"builtin", "softmax_free_energy"}, {"params", {{"beta", beta}}}});
}

FunctionSpec exp_quadratic(Eigen::MatrixXd P, Eigen::VectorXd b, double c) {
  const auto d = static_cast<std::size_t>(P.rows());
  P = 0.5 * (P + P.transpose()).eval();
  json src{{"builtin", "exp_quadratic"},
           {"params", {{"P", matrix_json(P)}, {"b", std::vector<double>(b.data(), b.data() + b.size())}, {"c", c}}}};
  auto q = [P, b, c](Point x) { auto v = as_vec(x); return 0.5 * v.dot(P * v) + b.dot(v) + c; };
  auto qi = [P, b](std::size_t i, Point x) {
    return P.row(static_cast<Eigen::Index>(i)).dot(as_vec(x)) + b(static_cast<Eigen::Index>(i));
  };
  return FunctionSpec(
      d, [q](Point x) { return std::exp(-q(x)); }, [q, qi](std::size_t i, Point x) { return -std::exp(-q(x)) * qi(i, x); },
      [q, qi, P](std::size_t i, std::size_t j, Point x) {
        return std::exp(-q(x)) * (qi(i, x) * qi(j, x) - P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      },
      "exp_quadratic", src);
}

FunctionSpec exp_linear(std::vector<double> w, double c) {
  const std::size_t d = w.size();
  auto e = [w, c](Point x) {
    double s = c;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return std::exp(s);
  };
  return FunctionSpec(
      d, e, [e, w](std::size_t i, Point x) { return w[i] * e(x); },
      [e, w](std::size_t i, std::size_t j, Point x) { return w[i] * w[j] * e(x); }, "exp_linear",
      json{{"builtin", "exp_linear"}, {"params", {{"w", w}, {"c", c}}}});
}

FunctionSpec inverse_quadratic(Eigen::MatrixXd P) {
  const auto d = static_cast<std::size_t>(P.rows());
  P = 0.5 * (P + P.transpose()).eval();
  auto s = [P](Point x) { auto v = as_vec(x); return v.dot(P * v); };
  auto si = [P](std::size_t i, Point x) { return 2.0 * P.row(static_cast<Eigen::Index>(i)).dot(as_vec(x)); };
  return FunctionSpec(
      d, [s](Point x) { return 1.0 / (1.0 + s(x)); },
      [s, si](std::size_t i, Point x) {
        const double q = 1.0 + s(x);
        return -si(i, x) / (q * q);
      },
      [s, si, P](std::size_t i, std::size_t j, Point x) {
        const double q = 1.0 + s(x);
        return 2.0 * si(i, x) * si(j, x) / (q * q * q) -
               2.0 * P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / (q * q);
      },
      "inverse_quadratic", json{{"builtin", "inverse_quadratic"}, {"params", {{"P", matrix_json(P)}}}});
}

FunctionSpec separable(std::size_t d, std::vector<Atom1D> atoms) {
  for (auto& a : atoms) {
    if (a.coord >= d) throw ConfigError("params.terms.coord", "coordinate index out of range");
    a.id = shape_id(a.kind);
  }
  json terms = json::array();
  for (const auto& a : atoms) terms.push_back(a.to_json());
  return FunctionSpec(
      d,
      [atoms](Point x) {
        double s = 0.0;
        for (const auto& a : atoms) s += a.value(x[a.coord]);
        return s;
      },
      [atoms](std::size_t i, Point x) {
        double s = 0.0;
        for (const auto& a : atoms)
          if (a.coord == i) s += a.d1(x[i]);
        return s;
      },
      [atoms](std::size_t i, std::size_t j, Point x) {
        if (i != j) return 0.0;
        double s = 0.0;
        for (const auto& a : atoms)
          if (a.coord == i) s += a.d2(x[i]);
        return s;
      },
      "separable", json{{"builtin", "separable"}, {"params", {{"terms", terms}}}});
}

FunctionSpec product(std::vector<Atom1D> factors) {
  const std::size_t d = factors.size();
  for (auto& a : factors) a.id = shape_id(a.kind);
  json fs = json::array();
  for (const auto& a : factors) fs.push_back(a.to_json());
  auto rest = [factors](Point x, std::size_t skip1, std::size_t skip2) {
    double p = 1.0;
    for (std::size_t k = 0; k < factors.size(); ++k)
      if (k != skip1 && k != skip2) p *= factors[k].value(x[k]);
    return p;
  };
  return FunctionSpec(
      d, [rest, d](Point x) { return rest(x, d, d); },
      [rest, factors, d](std::size_t i, Point x) { return factors[i].d1(x[i]) * rest(x, i, d); },
      [rest, factors, d](std::size_t i, std::size_t j, Point x) {
        if (i == j) return factors[i].d2(x[i]) * rest(x, i, d);
        return factors[i].d1(x[i]) * factors[j].d1(x[j]) * rest(x, i, j);
      },
      "product", json{{"builtin", "product"}, {"params", {{"factors", fs}}}});
}

FunctionSpec poly1d(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  auto horner = [](const std::vector<double>& c, double x) {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
  };
  std::vector<double> c1, c2;
  for (std::size_t k = 1; k < coeffs.size(); ++k) c1.push_back(static_cast<double>(k) * coeffs[k]);
  for (std::size_t k = 1; k < c1.size(); ++k) c2.push_back(static_cast<double>(k) * c1[k]);
  return FunctionSpec(
      1, [coeffs, horner](Point x) { return horner(coeffs, x[0]); },
      [c1, horner](std::size_t, Point x) { return horner(c1, x[0]); },
      [c2, horner](std::size_t, std::size_t, Point x) { return horner(c2, x[0]); }, "poly",
      json{{"builtin", "poly"}, {"params", {{"coeffs", coeffs}}}});
}

FunctionSpec ridge(Eigen::MatrixXd Q, Eigen::VectorXd b, double c, std::vector<RidgeTerm> terms) {
  const auto d = static_cast<std::size_t>(Q.rows());
  if (static_cast<std::size_t>(b.size()) != d) throw ConfigError("params.b", "length must match Q");
  Q = 0.5 * (Q + Q.transpose()).eval();
  json tj = json::array();
  for (auto& t : terms) {
    if (t.w.size() != d) throw ConfigError("params.terms.w", "length must match the dimension");
    t.atom.id = shape_id(t.atom.kind);
    json a = t.atom.to_json();
    a.erase("coord");
    a["w"] = t.w;
    tj.push_back(a);
  }
  json src{{"builtin", "ridge"},
           {"params",
            {{"Q", matrix_json(Q)}, {"b", std::vector<double>(b.data(), b.data() + b.size())}, {"c", c}, {"terms", tj}}}};
  auto proj = [](const RidgeTerm& t, Point x) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.w.size(); ++i) s += t.w[i] * x[i];
    return s;
  };
  return FunctionSpec(
      d,
      [Q, b, c, terms, proj](Point x) {
        const auto v = as_vec(x);
        double s = 0.5 * v.dot(Q * v) + b.dot(v) + c;
        for (const auto& t : terms) s += t.atom.value(proj(t, x));
        return s;
      },
      [Q, b, terms, proj](std::size_t i, Point x) {
        const auto ii = static_cast<Eigen::Index>(i);
        double s = Q.row(ii).dot(as_vec(x)) + b(ii);
        for (const auto& t : terms) s += t.w[i] * t.atom.d1(proj(t, x));
        return s;
      },
      [Q, terms, proj](std::size_t i, std::size_t j, Point x) {
        double s = Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        for (const auto& t : terms) s += t.w[i] * t.w[j] * t.atom.d2(proj(t, x));
        return s;
      },
      "ridge", std::move(src));
}

FunctionSpec monomials(std::size_t d, std::vector<Monomial> terms) {
  json tj = json::array();
  for (const auto& m : terms) {
    if (m.powers.size() != d) throw ConfigError("params.terms.powers", "need one power per coordinate");
    for (int p : m.powers)
      if (p < 0) throw ConfigError("params.terms.powers", "powers must be non-negative");
    tj.push_back({{"coef", m.coef}, {"powers", m.powers}});
  }
  // Coefficient and value of ∂^k x^p.
  auto dpow = [](double x, int p, int k) {
    if (k > p) return 0.0;
    double c = 1.0;
    for (int r = 0; r < k; ++r) c *= static_cast<double>(p - r);
    return c * std::pow(x, p - k);
  };
  auto eval = [terms, dpow](Point x, std::size_t i, int ki, std::size_t j, int kj) {
    double s = 0.0;
    for (const auto& m : terms) {
      double p = m.coef;
      for (std::size_t r = 0; r < m.powers.size() && p != 0.0; ++r) {
        int k = 0;
        if (r == i) k += ki;
        if (r == j) k += kj;
        p *= dpow(x[r], m.powers[r], k);
      }
      s += p;
    }
    return s;
  };
  return FunctionSpec(
      d, [eval, d](Point x) { return eval(x, d, 0, d, 0); },
      [eval, d](std::size_t i, Point x) { return eval(x, i, 1, d, 0); },
      [eval](std::size_t i, std::size_t j, Point x) { return eval(x, i, 1, j, 1); }, "monomials",
      json{{"builtin", "monomials"}, {"params", {{"terms", tj}}}});
}

FunctionSpec standardized(const FunctionSpec& h, std::vector<double> center, std::vector<double> scale) {
  const std::size_t d = h.dim();
  if (center.size() != d) throw ConfigError("center", "must have one entry per coordinate");
  if (scale.size() != d) throw ConfigError("scale", "must have one entry per coordinate");
  auto map = [center, scale](Point x) {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = scale[i] * (x[i] - center[i]);
    return z;
  };
  FunctionSpec out(
      d, [h, map](Point x) { return h(map(x)); },
      [h, map, scale](std::size_t i, Point x) { return scale[i] * h.partial(i, map(x)); },
      [h, map, scale](std::size_t i, std::size_t j, Point x) { return scale[i] * scale[j] * h.second(i, j, map(x)); },
      "standardized(" + h.name() + ")", json{{"standardize", h.source()}, {"center", center}, {"scale", scale}});
  if (h.log_form()) out.set_log_form(standardized(*h.log_form(), center, scale));
  return out;
}

FunctionSpec on_weights(const FunctionSpec& phi, const std::vector<Weight>& weights) {
  const std::size_t d = phi.dim();
  if (weights.size() != d) throw ConfigError("weights", "need one weight per coordinate");
  auto lift = [weights](Point x) {
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = weights[i].A(x[i]);
    return u;
  };
  json wsrc = json::array();
  for (const auto& w : weights) wsrc.push_back(w.source());
  FunctionSpec out(
      d, [phi, lift](Point x) { return phi(lift(x)); },
      [phi, lift, weights](std::size_t i, Point x) { return phi.partial(i, lift(x)) * weights[i].a(x[i]); },
      [phi, lift, weights](std::size_t i, std::size_t j, Point x) {
        const auto u = lift(x);
        double v = phi.second(i, j, u) * weights[i].a(x[i]) * weights[j].a(x[j]);
        if (i == j) v += phi.partial(i, u) * weights[i].a_prime(x[i]);
        return v;
      },
      "on_weights(" + phi.name() + ")", json{{"on_weights", phi.source()}, {"weights", wsrc}});
  if (phi.log_form()) out.set_log_form(on_weights(*phi.log_form(), weights));
  return out;
}

}  // namespace covlab::fn

namespace covlab {

namespace {

void apply_declared(FunctionSpec& f, const json& j, const std::string& field) {
  if (!j.contains("declared")) return;
  if (!j.at("declared").is_array()) throw ConfigError(field + ".declared", "must be an array");
  for (const auto& p : j.at("declared")) {
    try {
      f.declare(property_from_string(p.get<std::string>()));
    } catch (const ConfigError& e) {
      throw ConfigError(field + ".declared", e.what());
    }
  }
}

}  // namespace

FunctionSpec function_from_json(const json& j, std::size_t dim, const std::vector<Weight>* weights,
                                const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "must be an object");
  FunctionSpec f;
  const json params = j.value("params", json::object());
  const std::string pf = field + ".params";
  auto p_vec = [&](const char* key, std::size_t n, double fill) {
    if (!params.contains(key)) return std::vector<double>(n, fill);
    auto v = fn::vec(params.at(key), pf + "." + key);
    if (v.size() != n) throw ConfigError(pf + "." + key, "must have length " + std::to_string(n));
    return v;
  };
  try {
    if (j.contains("expr")) {
      if (!j.at("expr").is_string()) throw ConfigError(field + ".expr", "must be a string");
      f = parse_expression(j.at("expr").get<std::string>(), dim);
    } else if (j.contains("builtin")) {
      const std::string name = j.at("builtin").get<std::string>();
      if (name == "linear") {
        f = fn::linear(p_vec("w", dim, 1.0), params.value("c", 0.0));
      } else if (name == "quadratic") {
        const auto b = p_vec("b", dim, 0.0);
        f = fn::quadratic(fn::matrix(params.value("Q", json(2.0)), dim, pf + ".Q"),
                          Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(dim)),
                          params.value("c", 0.0));
      } else if (name == "softmax_free_energy") {
        f = fn::softmax_free_energy(params.value("beta", 1.0), dim);
      } else if (name == "exp_quadratic") {
        const auto b = p_vec("b", dim, 0.0);
        f = fn::exp_quadratic(fn::matrix(params.value("P", json(2.0)), dim, pf + ".P"),
                              Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(dim)),
                              params.value("c", 0.0));
      } else if (name == "exp_linear") {
        f = fn::exp_linear(p_vec("w", dim, 1.0), params.value("c", 0.0));
      } else if (name == "inverse_quadratic") {
        f = fn::inverse_quadratic(fn::matrix(params.value("P", json(1.0)), dim, pf + ".P"));
      } else if (name == "separable") {
        std::vector<fn::Atom1D> atoms;
        const json& terms = params.value("terms", json::array());
        for (std::size_t k = 0; k < terms.size(); ++k)
          atoms.push_back(fn::Atom1D::from_json(terms[k], pf + ".terms[" + std::to_string(k) + "]"));
        f = fn::separable(dim, std::move(atoms));
      } else if (name == "product") {
        std::vector<fn::Atom1D> atoms;
        const json& fs = params.value("factors", json::array());
        if (fs.size() != dim) throw ConfigError(pf + ".factors", "need one factor per coordinate");
        for (std::size_t k = 0; k < fs.size(); ++k)
          atoms.push_back(fn::Atom1D::from_json(fs[k], pf + ".factors[" + std::to_string(k) + "]"));
        f = fn::product(std::move(atoms));
      } else if (name == "ridge") {
        const auto b = p_vec("b", dim, 0.0);
        std::vector<fn::RidgeTerm> terms;
        const json& ts = params.value("terms", json::array());
        for (std::size_t k = 0; k < ts.size(); ++k) {
          const std::string tf = pf + ".terms[" + std::to_string(k) + "]";
          fn::RidgeTerm t{fn::Atom1D::from_json(ts[k], tf), fn::vec(ts[k].value("w", json::array()), tf + ".w")};
          if (t.w.size() != dim) throw ConfigError(tf + ".w", "must have length " + std::to_string(dim));
          terms.push_back(std::move(t));
        }
        f = fn::ridge(fn::matrix(params.value("Q", json(0.0)), dim, pf + ".Q"),
                      Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(dim)),
                      params.value("c", 0.0), std::move(terms));
      } else if (name == "monomials") {
        std::vector<fn::Monomial> terms;
        const json& ts = params.value("terms", json::array());
        for (std::size_t k = 0; k < ts.size(); ++k) {
          const std::string tf = pf + ".terms[" + std::to_string(k) + "]";
          if (!ts[k].is_object() || !ts[k].contains("powers")) throw ConfigError(tf, "needs coef and powers");
          fn::Monomial m{ts[k].value("coef", 1.0), ts[k].at("powers").get<std::vector<int>>()};
          if (m.powers.size() != dim) throw ConfigError(tf + ".powers", "must have length " + std::to_string(dim));
          terms.push_back(std::move(m));
        }
        f = fn::monomials(dim, std::move(terms));
      } else if (name == "atom") {
        if (dim != 1) throw ConfigError(field + ".builtin", "atom is univariate");
        f = fn::atom(fn::Atom1D::from_json(params, pf));
      } else if (name == "poly") {
        if (dim != 1) throw ConfigError(field + ".builtin", "poly is univariate");
        f = fn::poly1d(fn::vec(params.value("coeffs", json::array()), pf + ".coeffs"));
      } else if (name == "constant") {
        f = FunctionSpec::constant(dim, params.value("c", 0.0));
      } else if (name == "coordinate") {
        const std::size_t i = params.value("i", std::size_t{0});
        if (i >= dim) throw ConfigError(pf + ".i", "coordinate index out of range");
        f = FunctionSpec::coordinate(dim, i);
      } else {
        throw ConfigError(field + ".builtin", "unknown builtin '" + name + "'");
      }
    } else if (j.contains("standardize")) {
      f = function_from_json(j.at("standardize"), dim, weights, field + ".standardize");
      f = fn::standardized(f, fn::vec(j.value("center", json(std::vector<double>(dim, 0.0))), field + ".center"),
                           fn::vec(j.value("scale", json(std::vector<double>(dim, 1.0))), field + ".scale"));
    } else if (j.contains("sum")) {
      const json& terms = j.at("sum");
      if (!terms.is_array() || terms.empty()) throw ConfigError(field + ".sum", "must be a non-empty array");
      f = function_from_json(terms[0], dim, weights, field + ".sum[0]");
      for (std::size_t k = 1; k < terms.size(); ++k)
        f = f + function_from_json(terms[k], dim, weights, field + ".sum[" + std::to_string(k) + "]");
    } else if (j.contains("scale")) {
      f = function_from_json(j.at("of"), dim, weights, field + ".of").scaled(j.at("scale").get<double>());
    } else if (j.contains("exp_of")) {
      f = function_from_json(j.at("exp_of"), dim, weights, field + ".exp_of").exp();
    } else if (j.contains("shift")) {
      f = function_from_json(j.at("of"), dim, weights, field + ".of").shifted(fn::vec(j.at("shift"), field + ".shift"));
    } else if (j.contains("on_weights")) {
      if (weights == nullptr || weights->size() != dim)
        throw ConfigError(field + ".on_weights", "requires one weight per coordinate");
      if (j.contains("weights")) {
        json expected = json::array();
        for (const auto& w : *weights) expected.push_back(w.source());
        if (j.at("weights") != expected)
          throw ConfigError(field + ".weights", "must match the weights of the check (" + expected.dump() + ")");
      }
      f = fn::on_weights(function_from_json(j.at("on_weights"), dim, weights, field + ".on_weights"), *weights);
    } else {
      throw ConfigError(field, "needs one of builtin, expr, standardize, sum, scale, exp_of, shift, on_weights");
    }
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("malformed function: ") + e.what());
  }
  if (f.dim() != dim) throw ConfigError(field, "function dimension does not match the measure dimension");
  apply_declared(f, j, field);
  f.set_source(j);
  return f;
}

}  // namespace covlab
