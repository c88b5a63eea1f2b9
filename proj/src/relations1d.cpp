#include "covlab/relations1d.hpp"

#include <cmath>
#include <memory>

#include "covlab/errors.hpp"
#include "covlab/quadrature.hpp"

namespace covlab {

const char* induced_kind_name(InducedKind k) {
  switch (k) {
    case InducedKind::plain:
      return "plain";
    case InducedKind::f_weighted:
      return "f_weighted";
    case InducedKind::fg_weighted:
      return "fg_weighted";
  }
  return "?";
}

InducedMeasure2D::InducedMeasure2D(InducedKind kind, HoeffdingKernel kernel, Estimate Z, double Z_cov_form)
    : kind_(kind), kernel_(std::move(kernel)), Z_(Z), Z_cov_(Z_cov_form) {}

Estimate InducedMeasure2D::expectation(const HoeffdingKernel::Scalar& p, const HoeffdingKernel::Scalar& q,
                                       const QuadratureSpec& spec) const {
  const Estimate I = kernel_bilinear(kernel_, p, q, spec);
  const double v = I.value / Z_.value;
  return {v, I.error / Z_.value + std::abs(v) * Z_.error / Z_.value};
}

Estimate InducedMeasure2D::covariance(const HoeffdingKernel::Scalar& p, const HoeffdingKernel::Scalar& q,
                                      const QuadratureSpec& spec) const {
  auto one = [](double) { return 1.0; };
  const Estimate pq = expectation(p, q, spec);
  const Estimate ep = expectation(p, one, spec);
  const Estimate eq = expectation(one, q, spec);
  return {pq.value - ep.value * eq.value, pq.error + std::abs(eq.value) * ep.error + std::abs(ep.value) * eq.error};
}

namespace {

struct Setup {
  Measure1D mu;
  ProductMeasure pm;
  Interval box;
  Weight w;
};

Setup make_setup(const Measure1D& mu, const Weight* weight, const QuadratureSpec& spec) {
  return {mu, ProductMeasure(mu, 1), mu.truncated_support(spec.trunc_eps), weight ? *weight : Weight::unit(mu, 0)};
}

// x ↦ ∫ a·h, tabulated on the truncated support.
FunctionSpec weighted_primitive(const Setup& s, const FunctionSpec& h, const std::string& name) {
  auto a = s.w;
  auto prim = std::make_shared<Primitive1D>([a, h](double x) { return a.a(x) * h(x); }, s.box, 32, 16,
                                            s.mu.breakpoints());
  return FunctionSpec::univariate([prim](double x) { return (*prim)(x); },
                                  [a, h](double x) { return a.a(x) * h(x); }, {}, name);
}

FunctionSpec primitive_A(const Setup& s) {
  auto a = s.w;
  return FunctionSpec::univariate([a](double x) { return a.A(x); }, [a](double x) { return a.a(x); }, {}, "A");
}

}  // namespace

InducedMeasure2D induced_measure(const Measure1D& mu, InducedKind kind, const FunctionSpec* f, const FunctionSpec* g,
                                 const Weight* weight, const QuadratureSpec& spec) {
  if (kind != InducedKind::plain && f == nullptr) throw ConfigError("f", "weighted induced measure needs f");
  if (kind == InducedKind::fg_weighted && g == nullptr) throw ConfigError("g", "fg-weighted induced measure needs g");
  const Setup s = make_setup(mu, weight, spec);
  const Weight w = s.w;
  HoeffdingKernel::Scalar left = [w](double x) { return w.a(x); };
  HoeffdingKernel::Scalar right = left;
  if (kind != InducedKind::plain) {
    const FunctionSpec ff = *f;
    left = [w, ff](double x) { return w.a(x) * ff(x); };
  }
  if (kind == InducedKind::fg_weighted) {
    const FunctionSpec gg = *g;
    right = [w, gg](double x) { return w.a(x) * gg(x); };
  }
  HoeffdingKernel k(mu, left, right);
  const Estimate Z = kernel_mass(k, spec);
  const FunctionSpec A = primitive_A(s);
  double Zc = 0.0;
  switch (kind) {
    case InducedKind::plain:
      Zc = covariance(s.pm, A, A, spec).value;
      break;
    case InducedKind::f_weighted:
      Zc = covariance(s.pm, weighted_primitive(s, *f, "F_a"), A, spec).value;
      break;
    case InducedKind::fg_weighted:
      Zc = covariance(s.pm, weighted_primitive(s, *f, "F_a"), weighted_primitive(s, *g, "G_a"), spec).value;
      break;
  }
  if (!(Z.value > 1e-14 * (1.0 + Z.error)) || !(Z.value > Z.error)) {
    throw NumericalError(std::string("degenerate induced measure (") + induced_kind_name(kind) +
                         "): normalizer Z = " + std::to_string(Z.value));
  }
  return InducedMeasure2D(kind, std::move(k), Z, Zc);
}

HoeffdingResult hoeffding_identity(const Measure1D& mu, const FunctionSpec& f, const FunctionSpec& g,
                                   const QuadratureSpec& spec) {
  HoeffdingResult r;
  r.lhs = covariance(ProductMeasure(mu, 1), f, g, spec);
  HoeffdingKernel k(mu);
  r.rhs = kernel_bilinear(
      k, [&](double x) { return f.derivative(x); }, [&](double y) { return g.derivative(y); }, spec);
  return r;
}

json RelationResult::to_json() const {
  json hyps = json::array();
  for (const auto& h : hypotheses) hyps.push_back(h.to_json());
  json j{{"variant", variant},         {"weighted", weighted},   {"hypotheses", hyps},
         {"lhs", lhs.value},           {"rhs", rhs.value},       {"residual", residual()},
         {"error", error()},           {"Z_direct", Z_direct},   {"Z_cov_form", Z_cov_form}};
  if (variant == 1) {
    j["det_form"] = det_form;
    j["det_scaled_rhs"] = det_scaled_rhs;
    j["det_consistent"] = det_consistent;
  }
  return j;
}

namespace {

// Cov(f,g)/Z − C₁C₂/Z² and the determinant form, all from one quadrature spec.
struct LhsParts {
  double lhs = 0.0;
  double Z = 0.0;
  double det = 0.0;
};

LhsParts lhs_parts(const Setup& s, const FunctionSpec& f, const FunctionSpec& g, int variant,
                   const QuadratureSpec& spec) {
  const FunctionSpec A = primitive_A(s);
  const double cfg = covariance(s.pm, f, g, spec).value;
  LhsParts p;
  double c1 = 0.0, c2 = 0.0;
  if (variant == 1) {
    p.Z = covariance(s.pm, A, A, spec).value;
    c1 = covariance(s.pm, f, A, spec).value;
    c2 = covariance(s.pm, g, A, spec).value;
    p.det = p.Z * cfg - c1 * c2;
  } else {
    const FunctionSpec Fa = weighted_primitive(s, f, "F_a");
    if (variant == 2) {
      p.Z = covariance(s.pm, Fa, A, spec).value;
      c1 = covariance(s.pm, f, A, spec).value;
    } else {
      const FunctionSpec Ga = weighted_primitive(s, g, "G_a");
      p.Z = covariance(s.pm, Fa, Ga, spec).value;
      c1 = covariance(s.pm, f, Ga, spec).value;
    }
    c2 = covariance(s.pm, Fa, g, spec).value;
  }
  p.lhs = cfg / p.Z - c1 * c2 / (p.Z * p.Z);
  return p;
}

}  // namespace

RelationResult relation_residual(const Measure1D& mu, const FunctionSpec& f, const FunctionSpec& g, int variant,
                                 const Weight* weight, const QuadratureSpec& spec) {
  if (variant < 1 || variant > 3) throw ConfigError("variant", "must be 1, 2 or 3");
  const Setup s = make_setup(mu, weight, spec);
  RelationResult r;
  r.variant = variant;
  r.weighted = weight != nullptr && !weight->is_unit();

  const ProbeSpec probe = ProbeSpec::for_measure(s.pm, spec.trunc_eps);
  if (variant >= 2) {
    const Certification c = certify(f, Property::positive, probe);
    r.hypotheses.push_back({"f positive", c.pass, c.pass ? json() : json(c.witness)});
  }
  if (variant == 3) {
    const Certification c = certify(g, Property::positive, probe);
    r.hypotheses.push_back({"g positive", c.pass, c.pass ? json() : json(c.witness)});
  }
  for (const auto& h : r.hypotheses) r.hypotheses_pass = r.hypotheses_pass && h.pass;
  if (!r.hypotheses_pass) return r;

  const LhsParts full = lhs_parts(s, f, g, variant, spec);
  const LhsParts half = lhs_parts(s, f, g, variant, spec.halved());
  r.lhs = {full.lhs, std::abs(full.lhs - half.lhs)};
  r.Z_cov_form = full.Z;

  const InducedKind kind =
      variant == 1 ? InducedKind::plain : (variant == 2 ? InducedKind::f_weighted : InducedKind::fg_weighted);
  const InducedMeasure2D ind = induced_measure(mu, kind, &f, &g, &s.w, spec);
  r.Z_direct = ind.Z().value;

  const Weight w = s.w;
  HoeffdingKernel::Scalar p, q;
  switch (variant) {
    case 1:
      p = [&f, w](double x) { return f.derivative(x) / w.a(x); };
      q = [&g, w](double y) { return g.derivative(y) / w.a(y); };
      break;
    case 2:  // −φ'/a with φ = −ln f
      p = [&f, w](double x) { return f.derivative(x) / (f(x) * w.a(x)); };
      q = [&g, w](double y) { return g.derivative(y) / w.a(y); };
      break;
    default:  // φ'/a and ψ'/a
      p = [&f, w](double x) { return -f.derivative(x) / (f(x) * w.a(x)); };
      q = [&g, w](double y) { return -g.derivative(y) / (g(y) * w.a(y)); };
      break;
  }
  r.rhs = ind.covariance(p, q, spec);

  if (variant == 1) {
    r.det_form = full.det;
    r.det_scaled_rhs = full.Z * full.Z * r.rhs.value;
    const double scale = full.Z * (std::abs(full.det) + full.Z * (std::abs(full.lhs) + 1.0));
    r.det_consistent =
        std::abs(r.det_form - r.det_scaled_rhs) <= 1e-9 * scale + full.Z * full.Z * (r.rhs.error + r.lhs.error);
  }
  return r;
}

}  // namespace covlab
