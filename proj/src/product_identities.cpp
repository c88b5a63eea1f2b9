#include "covlab/product_identities.hpp"

#include <cmath>
#include <memory>

#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/quadrature.hpp"
#include "covlab/sum.hpp"

namespace covlab {

namespace {

TensorRule sub_rule(const ProductMeasure& mu, std::size_t from, std::size_t to, const QuadratureSpec& q) {
  std::vector<Rule1D> axes;
  for (std::size_t j = from; j < to; ++j) axes.push_back(measure_rule(mu.factor(j), q));
  return TensorRule(std::move(axes));
}

json estimate_json(const Estimate& e) { return json{{"value", e.value}, {"error", e.error}}; }

// Resolution for nested rules over `dims` coordinates at once.
QuadratureSpec nested_spec(const QuadratureSpec& spec, std::size_t dims) {
  return dims <= 1 ? spec : spec.for_dimension(dims);
}

}  // namespace

FunctionSpec marginalize(const FunctionSpec& f, const ProductMeasure& mu, std::size_t k, const QuadratureSpec& spec) {
  const std::size_t d = mu.dim();
  if (k == 0 || k > d) throw ConfigError("level", "marginalization level must lie in 1..d");
  if (k == d) return f;
  auto rule = std::make_shared<TensorRule>(sub_rule(mu, k, d, nested_spec(spec, d - k)));
  FunctionSpec src = f;
  FunctionSpec out(
      k,
      [rule, src, k, d](Point x) {
        std::vector<double> y(d);
        std::copy(x.begin(), x.end(), y.begin());
        CompensatedSum s;
        for (std::size_t v = 0; v < rule->size(); ++v) {
          rule->point(v, y.data() + k);
          s.add(rule->weight(v) * src(y));
        }
        return s.value();
      },
      {}, {}, f.name() + "_marg" + std::to_string(k));
  return out;
}

double marginal_mean(const FunctionSpec& f, const ProductMeasure& mu, const QuadratureSpec& spec) {
  return expectation(mu, [&f](Point x) { return f(x); }, spec).value;
}

std::vector<Certification> marginal_inheritance(const FunctionSpec& f, const ProductMeasure& mu, std::size_t k,
                                                const QuadratureSpec& spec) {
  const FunctionSpec fk = marginalize(f, mu, k, spec);
  auto box = mu.truncated_box(spec.trunc_eps);
  box.resize(k);
  ProbeSpec probe = ProbeSpec::for_box(box);
  probe.points_per_axis = 11;
  probe.random_checks = 300;
  return {certify(fk, Property::unconditional, probe), certify(fk, Property::coordinatewise_quasi_concave, probe)};
}

json TermDecomposition::to_json() const {
  json t = json::array();
  for (const auto& e : terms) t.push_back(estimate_json(e));
  return json{{"terms", t},
              {"total", estimate_json(total)},
              {"covariance", estimate_json(covariance)},
              {"residual", residual()},
              {"monte_carlo", monte_carlo}};
}

namespace {

std::vector<double> tensorization_terms(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                        const QuadratureSpec& q) {
  const std::size_t d = mu.dim();
  std::vector<double> terms(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const TensorRule before = sub_rule(mu, 0, k, q);
    const Rule1D axis = measure_rule(mu.factor(k), q);
    const TensorRule after = sub_rule(mu, k + 1, d, q);
    std::vector<double> per_u(before.size(), 0.0);
    parallel_for(before.size(), [&](std::size_t u) {
      std::vector<double> x(d);
      before.point(u, x.data());
      std::vector<double> fk(axis.size()), gk(axis.size());
      for (std::size_t s = 0; s < axis.size(); ++s) {
        x[k] = axis.nodes[s];
        CompensatedSum sf, sg;
        for (std::size_t v = 0; v < after.size(); ++v) {
          after.point(v, x.data() + k + 1);
          const double w = after.weight(v);
          sf.add(w * f(x));
          sg.add(w * g(x));
        }
        fk[s] = sf.value();
        gk[s] = sg.value();
      }
      CompensatedSum mf, mg;
      for (std::size_t s = 0; s < axis.size(); ++s) {
        mf.add(axis.weights[s] * fk[s]);
        mg.add(axis.weights[s] * gk[s]);
      }
      CompensatedSum c;
      for (std::size_t s = 0; s < axis.size(); ++s)
        c.add(axis.weights[s] * (fk[s] - mf.value()) * (gk[s] - mg.value()));
      per_u[u] = before.weight(u) * c.value();
    });
    CompensatedSum t;
    for (double v : per_u) t.add(v);
    terms[k] = t.value();
  }
  return terms;
}

}  // namespace

TermDecomposition tensorization_decompose(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                          const QuadratureSpec& spec) {
  const QuadratureSpec q = nested_spec(spec, mu.dim());
  const auto full = tensorization_terms(mu, f, g, q);
  const auto half = tensorization_terms(mu, f, g, q.halved());
  TermDecomposition r;
  CompensatedSum total;
  double err = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) {
    r.terms.push_back({full[k], std::abs(full[k] - half[k])});
    total.add(full[k]);
    err += r.terms.back().error;
  }
  r.total = {total.value(), err};
  r.covariance = covariance(mu, f, g, spec);
  r.monte_carlo = !deterministic(mu, spec);
  return r;
}

TermDecomposition duplication_covariance(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                         std::size_t n_samples, std::uint64_t seed, const QuadratureSpec& spec) {
  if (n_samples < 2) throw ConfigError("mc_samples", "need at least two samples");
  const std::size_t d = mu.dim();
  const PointSet X = sample(mu, n_samples, derive_seed(seed, 0));
  const PointSet Xp = sample(mu, n_samples, derive_seed(seed, 1));
  // values[i * n + s] = ½ Δ_i f · Δ̃_i g for sample s
  std::vector<double> values(d * n_samples);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> x(d), xi(d), hi(d), lo(d);
    const std::size_t end = std::min(n_samples, (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < end; ++s) {
      const double* a = X.row(s);
      const double* b = Xp.row(s);
      std::copy(a, a + d, x.begin());
      const double fx = f(x);
      for (std::size_t i = 0; i < d; ++i) {
        xi = x;
        xi[i] = b[i];
        const double df = fx - f(xi);
        // (x_1..x_i, x′_{i+1}..x′_d) and (x_1..x_{i−1}, x′_i..x′_d)
        for (std::size_t j = 0; j < d; ++j) {
          hi[j] = j <= i ? a[j] : b[j];
          lo[j] = j < i ? a[j] : b[j];
        }
        const double dg = g(hi) - g(lo);
        values[i * n_samples + s] = 0.5 * df * dg;
      }
    }
  });
  TermDecomposition r;
  r.monte_carlo = true;
  const double n = static_cast<double>(n_samples);
  std::vector<double> per_sample(n_samples, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    CompensatedSum s;
    for (std::size_t k = 0; k < n_samples; ++k) {
      s.add(values[i * n_samples + k]);
      per_sample[k] += values[i * n_samples + k];
    }
    const double mean = s.value() / n;
    CompensatedSum v;
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double dev = values[i * n_samples + k] - mean;
      v.add(dev * dev);
    }
    r.terms.push_back({mean, std::sqrt(v.value() / (n - 1.0) / n)});
  }
  CompensatedSum s;
  for (double v : per_sample) s.add(v);
  const double mean = s.value() / n;
  CompensatedSum v;
  for (double x : per_sample) v.add((x - mean) * (x - mean));
  r.total = {mean, std::sqrt(v.value() / (n - 1.0) / n)};
  r.covariance = covariance(mu, f, g, spec);
  return r;
}

Estimate fiber_integral(const ProductMeasure& mu, std::size_t i, const std::function<double(Point)>& L,
                        const std::function<double(Point)>& R, const QuadratureSpec& spec) {
  const std::size_t d = mu.dim();
  if (i >= d) throw std::out_of_range("fiber_integral: coordinate index");
  const QuadratureSpec q = d == 1 ? spec : spec.for_dimension(d + 1);
  const TensorRule before = sub_rule(mu, 0, i, q);
  const TensorRule after = sub_rule(mu, i + 1, d, q);
  const HoeffdingKernel k(mu.factor(i));
  CompensatedSum value;
  double error = 0.0;
  std::vector<double> u(d);
  for (std::size_t b = 0; b < before.size(); ++b) {
    before.point(b, u.data());
    const std::vector<double> lead(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(i));
    auto average = [&after, lead, i, d](const std::function<double(Point)>& h) {
      return [&after, &h, lead, i, d](double s) {
        thread_local std::vector<double> y;
        y.assign(d, 0.0);
        std::copy(lead.begin(), lead.end(), y.begin());
        y[i] = s;
        CompensatedSum acc;
        for (std::size_t v = 0; v < after.size(); ++v) {
          after.point(v, y.data() + i + 1);
          acc.add(after.weight(v) * h(y));
        }
        return acc.value();
      };
    };
    const Estimate e = kernel_bilinear(k, average(L), average(R), q);
    const double w = before.weight(b);
    value.add(w * e.value);
    error += w * e.error;
  }
  return {value.value(), error};
}

TermDecomposition product_hoeffding_identity(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                             const QuadratureSpec& spec) {
  if (!deterministic(mu, spec)) {
    return duplication_covariance(mu, f, g, spec.mc_samples, spec.seed, spec);
  }
  TermDecomposition r;
  CompensatedSum total;
  double err = 0.0;
  for (std::size_t i = 0; i < mu.dim(); ++i) {
    const Estimate t = fiber_integral(
        mu, i, [&f, i](Point x) { return f.partial(i, x); }, [&g, i](Point y) { return g.partial(i, y); }, spec);
    r.terms.push_back(t);
    total.add(t.value);
    err += t.error;
  }
  r.total = {total.value(), err};
  r.covariance = covariance(mu, f, g, spec);
  return r;
}

json ProductRelationTerm::to_json() const {
  json j{{"Z", estimate_json(Z)}, {"cov", estimate_json(cov)}, {"dropped", estimate_json(dropped)}};
  if (std::isfinite(Z_cov_form)) j["Z_cov_form"] = Z_cov_form;
  return j;
}

json ProductRelationResult::to_json() const {
  json hyps = json::array();
  for (const auto& h : hypotheses) hyps.push_back(h.to_json());
  json t = json::array();
  for (const auto& x : terms) t.push_back(x.to_json());
  return json{{"variant", variant},          {"weighted", weighted},
              {"hypotheses", hyps},          {"lhs", estimate_json(lhs)},
              {"rhs", estimate_json(rhs)},   {"reduced_rhs", estimate_json(reduced_rhs)},
              {"residual", residual()},      {"error", error()},
              {"terms", t}};
}

namespace {

// Cov_μ(F_i, A_i(x_i)) with F_i(x) = ∫^{x_i} h(x_1..s..x_d) ds along coordinate i.
double fiber_primitive_covariance(const ProductMeasure& mu, std::size_t i, const std::function<double(Point)>& h,
                                  const Weight& w, const QuadratureSpec& spec) {
  const std::size_t d = mu.dim();
  const QuadratureSpec q = nested_spec(spec, d);
  std::vector<Rule1D> others;
  for (std::size_t j = 0; j < d; ++j)
    if (j != i) others.push_back(measure_rule(mu.factor(j), q));
  const TensorRule rest(std::move(others));
  const Rule1D axis = measure_rule(mu.factor(i), q);
  const Interval box = mu.factor(i).truncated_support(spec.trunc_eps);
  const std::size_t n = rest.size() * axis.size();
  std::vector<double> F(n), A(n), W(n);
  parallel_for(rest.size(), [&](std::size_t r) {
    std::vector<double> others_pt(d > 0 ? d - 1 : 0), x(d);
    rest.point(r, others_pt.data());
    for (std::size_t j = 0, m = 0; j < d; ++j)
      if (j != i) x[j] = others_pt[m++];
    Primitive1D prim(
        [&](double s) {
          std::vector<double> y = x;
          y[i] = s;
          return h(y);
        },
        box, 32, 16, mu.factor(i).breakpoints());
    for (std::size_t s = 0; s < axis.size(); ++s) {
      const std::size_t idx = r * axis.size() + s;
      F[idx] = prim(axis.nodes[s]);
      A[idx] = w.A(axis.nodes[s]);
      W[idx] = rest.weight(r) * axis.weights[s];
    }
  });
  CompensatedSum mf, ma;
  for (std::size_t k = 0; k < n; ++k) {
    mf.add(W[k] * F[k]);
    ma.add(W[k] * A[k]);
  }
  CompensatedSum c;
  for (std::size_t k = 0; k < n; ++k) c.add(W[k] * (F[k] - mf.value()) * (A[k] - ma.value()));
  return c.value();
}

bool weight_is_even(const Weight& w, Interval box) {
  for (int k = 0; k <= 40; ++k) {
    const double x = box.lo + box.width() * k / 40.0;
    if (std::abs(w.a(x) - w.a(-x)) > 1e-9 * (1.0 + std::abs(w.a(x)))) return false;
  }
  return true;
}

}  // namespace

ProductRelationResult product_relation_residual(const ProductMeasure& mu, const FunctionSpec& f, const FunctionSpec& g,
                                                int variant, const std::vector<Weight>& weights_in,
                                                const QuadratureSpec& spec) {
  if (variant < 1 || variant > 3) throw ConfigError("variant", "must be 1, 2 or 3");
  const std::size_t d = mu.dim();
  if (!deterministic(mu, spec))
    throw ConfigError("measure", "product covariance relations are evaluated deterministically only (d <= det_dim_cap)");
  const std::vector<Weight> weights = weights_in.empty() ? unit_weights(mu) : weights_in;
  if (weights.size() != d) throw ConfigError("weights", "need one weight per coordinate");

  ProductRelationResult r;
  r.variant = variant;
  for (const auto& w : weights) r.weighted = r.weighted || !w.is_unit();

  const ProbeSpec probe = ProbeSpec::for_measure(mu, spec.trunc_eps);
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

  // Hypotheses under which the dropped terms vanish, recorded for the caller.
  if (variant == 2) {
    bool ortho = true;
    json detail = json::array();
    for (std::size_t i = 0; i < d; ++i) {
      const Weight w = weights[i];
      const FunctionSpec Ai(
          d, [w, i](Point x) { return w.A(x[i]); }, {}, {}, "A");
      const Estimate c = covariance(mu, f, Ai, spec);
      const bool ok = std::abs(c.value) <= std::max(1e-8, 3.0 * c.error);
      ortho = ortho && ok;
      detail.push_back(c.value);
    }
    r.hypotheses.push_back({"f orthogonal to every A_i", ortho, ortho ? json() : detail});
  } else if (variant == 3) {
    const auto box = mu.truncated_box(spec.trunc_eps);
    bool even_w = true;
    for (std::size_t i = 0; i < d; ++i) even_w = even_w && weight_is_even(weights[i], box[i]);
    const Certification cf = certify(f, Property::even, probe), cg = certify(g, Property::even, probe);
    r.hypotheses.push_back({"measure symmetric", mu.is_symmetric(), json()});
    r.hypotheses.push_back({"weights even", even_w, json()});
    r.hypotheses.push_back({"f even", cf.pass, cf.pass ? json() : json(cf.witness)});
    r.hypotheses.push_back({"g even", cg.pass, cg.pass ? json() : json(cg.witness)});
  }

  r.lhs = covariance(mu, f, g, spec);

  CompensatedSum rhs, reduced;
  double rhs_err = 0.0, reduced_err = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const Weight w = weights[i];
    std::function<double(Point)> wl, wr, p, q;
    const std::size_t ii = i;
    if (variant == 1) {
      wl = [w, ii](Point x) { return w.a(x[ii]); };
      wr = wl;
      p = [&f, w, ii](Point x) { return f.partial(ii, x) / w.a(x[ii]); };
      q = [&g, w, ii](Point y) { return g.partial(ii, y) / w.a(y[ii]); };
    } else if (variant == 2) {
      wl = [&f, w, ii](Point x) { return w.a(x[ii]) * f(x); };
      wr = [w, ii](Point y) { return w.a(y[ii]); };
      p = [&f, w, ii](Point x) { return f.partial(ii, x) / (f(x) * w.a(x[ii])); };
      q = [&g, w, ii](Point y) { return g.partial(ii, y) / w.a(y[ii]); };
    } else {
      wl = [&f, w, ii](Point x) { return w.a(x[ii]) * f(x); };
      wr = [&g, w, ii](Point y) { return w.a(y[ii]) * g(y); };
      p = [&f, w, ii](Point x) { return -f.partial(ii, x) / (f(x) * w.a(x[ii])); };
      q = [&g, w, ii](Point y) { return -g.partial(ii, y) / (g(y) * w.a(y[ii])); };
    }
    auto times = [](const std::function<double(Point)>& a, const std::function<double(Point)>& b) {
      return std::function<double(Point)>([a, b](Point x) { return a(x) * b(x); });
    };
    ProductRelationTerm t;
    t.Z = fiber_integral(mu, i, wl, wr, spec);
    if (!(t.Z.value > 0.0)) throw NumericalError("degenerate induced measure: Z_" + std::to_string(i + 1) + " <= 0");
    const Estimate Ipq = fiber_integral(mu, i, times(wl, p), times(wr, q), spec);
    const Estimate Ip = fiber_integral(mu, i, times(wl, p), wr, spec);
    const Estimate Iq = fiber_integral(mu, i, wl, times(wr, q), spec);
    const double Z = t.Z.value;
    const double ep = Ip.value / Z, eq = Iq.value / Z;
    t.cov = {Ipq.value / Z - ep * eq, (Ipq.error + std::abs(eq) * Ip.error + std::abs(ep) * Iq.error) / Z +
                                          std::abs(Ipq.value / Z) * t.Z.error / Z};
    t.dropped = {Ip.value * Iq.value / Z, (std::abs(Iq.value) * Ip.error + std::abs(Ip.value) * Iq.error) / Z};
    if (variant == 2) t.Z_cov_form = fiber_primitive_covariance(mu, i, wl, w, spec);
    if (variant == 1) t.Z_cov_form = covariance(mu, FunctionSpec(d, [w, ii](Point x) { return w.A(x[ii]); }),
                                                FunctionSpec(d, [w, ii](Point x) { return w.A(x[ii]); }), spec)
                                         .value;
    reduced.add(Z * t.cov.value);
    reduced_err += Z * t.cov.error + std::abs(t.cov.value) * t.Z.error;
    rhs.add(Z * t.cov.value + t.dropped.value);
    rhs_err += Z * t.cov.error + std::abs(t.cov.value) * t.Z.error + t.dropped.error;
    r.terms.push_back(t);
  }
  r.rhs = {rhs.value(), rhs_err};
  r.reduced_rhs = {reduced.value(), reduced_err};
  return r;
}

std::function<double(std::span<const double>)> induced_log_density(const ProductMeasure& mu, const FunctionSpec* f,
                                                                     std::size_t i, const Weight* weight,
                                                                     std::vector<double> signs) {
  const std::size_t d = mu.dim();
  if (i >= d) throw std::out_of_range("induced_log_density: coordinate index");
  if (signs.empty()) signs.assign(d, 1.0);
  std::shared_ptr<FunctionSpec> fp = f ? std::make_shared<FunctionSpec>(*f) : nullptr;
  std::shared_ptr<Weight> wp = weight ? std::make_shared<Weight>(*weight) : nullptr;
  const ProductMeasure m = mu;
  return [m, fp, wp, i, d, signs](std::span<const double> z) {
    std::vector<double> x(d), y(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = signs[j] * z[j];
      y[j] = signs[j] * z[d + j];
    }
    const Measure1D& mi = m.factor(i);
    double v = std::log(mi.cdf(std::min(x[i], y[i])) * mi.sf(std::max(x[i], y[i])));
    if (fp) v += std::log((*fp)(x));
    if (wp) v += std::log(wp->a(x[i])) + std::log(wp->a(y[i]));
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      v += std::log(m.factor(j).pdf(x[j])) + std::log(m.factor(j).pdf(y[j]));
    }
    return v;
  };
}

std::vector<Interval> induced_probe_box(const ProductMeasure& mu, double trunc_eps) {
  auto box = mu.truncated_box(trunc_eps);
  for (auto& b : box) {
    const double m = 0.01 * b.width();
    b = {b.lo + m, b.hi - m};
  }
  auto doubled = box;
  doubled.insert(doubled.end(), box.begin(), box.end());
  return doubled;
}

}  // namespace covlab
