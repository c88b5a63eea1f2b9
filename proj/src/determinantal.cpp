#include "covlab/determinantal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/quadrature.hpp"
#include "covlab/sum.hpp"

namespace covlab {

namespace {

constexpr double kDetTol = 1e-10;

double det_over_scale(const std::vector<double>& m, std::size_t n) {
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row = std::max(row, std::abs(m[i * n + j]));
    scale *= row;
  }
  if (!(scale > 0.0)) return 0.0;
  return small_det(m.data(), n) / scale;
}

void draw_ordered(std::mt19937_64& rng, Interval box, std::size_t n, std::vector<double>& t) {
  std::uniform_real_distribution<double> u(box.lo, box.hi);
  const double gap = 1e-6 * box.width();
  for (;;) {
    t.resize(n);
    for (auto& v : t) v = u(rng);
    std::sort(t.begin(), t.end());
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) ok = ok && t[i] - t[i - 1] >= gap;
    if (ok) return;
  }
}

// Runs `eval` on independent ordered tuples and keeps the lowest index among the worst values.
TupleReport sample_tuples(const std::string& name, std::size_t n, Interval box, std::size_t trials, std::uint64_t seed,
                          const std::function<double(const std::vector<double>&)>& eval) {
  std::vector<double> values(trials);
  std::vector<std::vector<double>> tuples(trials);
  parallel_for(trials, [&](std::size_t k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    draw_ordered(rng, box, n, tuples[k]);
    values[k] = eval(tuples[k]);
  });
  TupleReport r;
  r.name = name;
  r.trials = trials;
  r.seed = seed;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    if (!std::isfinite(values[k])) throw NumericalError(name + ": determinant is not finite");
    if (k == 0 || values[k] < r.worst) {
      r.worst = values[k];
      arg = k;
    }
  }
  r.pass = trials == 0 || r.worst >= -kDetTol;
  if (!r.pass) r.witness = tuples[arg];
  return r;
}

}  // namespace

double small_det(const double* a, std::size_t n) {
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return a[0];
    case 2:
      return a[0] * a[3] - a[1] * a[2];
    case 3:
      return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
             a[2] * (a[3] * a[7] - a[4] * a[6]);
    default: {
      const auto N = static_cast<Eigen::Index>(n);
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(a, N, N);
      return m.partialPivLu().determinant();
    }
  }
}

json TupleReport::to_json() const {
  json j{{"name", name}, {"verdict", pass ? "pass" : "fail"}, {"trials", trials}, {"seed", seed}, {"worst", worst}};
  if (!witness.empty()) j["witness"] = witness;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

double collocation_det(const ChebyshevSystem& sys, const std::vector<double>& t) {
  const std::size_t n = sys.size();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = sys.members[i](t[j]);
  return small_det(m.data(), n);
}

TupleReport assumption_C_check(const FunctionSpec& u, const FunctionSpec& U, Interval box, std::size_t trials,
                               std::uint64_t seed) {
  return sample_tuples("assumption (C) for (" + u.name() + ", " + U.name() + ")", 3, box, trials, seed,
                       [&](const std::vector<double>& t) {
                         std::vector<double> m{1.0, 1.0, 1.0, u(t[0]), u(t[1]), u(t[2]), U(t[0]), U(t[1]), U(t[2])};
                         return det_over_scale(m, 3);
                       });
}

TupleReport permutation_sign_check(const FunctionSpec& u, const FunctionSpec& U, Interval box, std::size_t trials,
                                   std::uint64_t seed) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  static const double signs[6] = {1, -1, -1, 1, 1, -1};
  return sample_tuples("permuted (C) sign for (" + u.name() + ", " + U.name() + ")", 3, box, trials, seed,
                       [&](const std::vector<double>& t) {
                         double worst = 0.0;
                         for (int p = 0; p < 6; ++p) {
                           const double x0 = t[perms[p][0]], x1 = t[perms[p][1]], x2 = t[perms[p][2]];
                           std::vector<double> m{1.0, 1.0, 1.0, u(x0), u(x1), u(x2), U(x0), U(x1), U(x2)};
                           worst = std::min(worst, signs[p] * det_over_scale(m, 3));
                         }
                         return worst;
                       });
}

TupleReport chebyshev_certify(const ChebyshevSystem& sys, ChebyshevMode mode, Interval box, std::size_t trials,
                              std::uint64_t seed) {
  const std::size_t r = sys.size();
  if (r == 0) throw std::invalid_argument("empty Chebyshev system");
  if (mode == ChebyshevMode::minors) {
    return sample_tuples("Chebyshev minors", r, box, trials, seed, [&](const std::vector<double>& t) {
      std::vector<double> m(r * r);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) m[i * r + j] = sys.members[i](t[j]);
      return det_over_scale(m, r);
    });
  }
  for (int k = 0; k <= 20; ++k) {
    const double x = box.lo + box.width() * k / 20.0;
    if (std::abs(sys.members[0](x) - 1.0) > 1e-12) {
      TupleReport bad;
      bad.name = "Chebyshev derivative system";
      bad.pass = false;
      bad.seed = seed;
      bad.detail = "derivative mode requires the first member to be the constant 1";
      bad.witness = {x};
      return bad;
    }
  }
  const std::size_t n = r - 1;
  if (n == 0) {
    TupleReport trivial;
    trivial.name = "Chebyshev derivative system";
    trivial.seed = seed;
    return trivial;
  }
  return sample_tuples("Chebyshev derivative system", n, box, trials, seed, [&](const std::vector<double>& t) {
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i * n + j] = sys.members[i + 1].derivative(t[j]);
    return det_over_scale(m, n);
  });
}

ChebyshevAgreement chebyshev_cross_validate(const ChebyshevSystem& sys, Interval box, std::size_t trials,
                                            std::uint64_t seed) {
  ChebyshevAgreement a;
  a.minors = chebyshev_certify(sys, ChebyshevMode::minors, box, trials, seed);
  a.derivative = chebyshev_certify(sys, ChebyshevMode::derivative, box, trials, seed);
  a.agree = a.minors.pass == a.derivative.pass;
  return a;
}

namespace {

double moment_det(const Rule1D& rule, const std::vector<FunctionSpec>& fs, const std::vector<FunctionSpec>& gs) {
  const std::size_t n = fs.size();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      CompensatedSum s;
      for (std::size_t k = 0; k < rule.size(); ++k) s.add(rule.weights[k] * fs[i](rule.nodes[k]) * gs[j](rule.nodes[k]));
      m[i * n + j] = s.value();
    }
  return small_det(m.data(), n);
}

// (1/n!) Σ over ordered n-tuples equals the sum over strictly increasing tuples: the summand is
// symmetric under permutations and vanishes when two nodes coincide.
double andreev_rhs(const Rule1D& rule, const std::vector<FunctionSpec>& fs, const std::vector<FunctionSpec>& gs) {
  const std::size_t n = fs.size(), N = rule.size();
  std::vector<double> fv(n * N), gv(n * N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      fv[i * N + k] = fs[i](rule.nodes[k]);
      gv[i * N + k] = gs[i](rule.nodes[k]);
    }
  std::vector<double> partial(N, 0.0);
  parallel_for(N, [&](std::size_t first) {
    if (first + n > N) return;
    std::vector<std::size_t> idx(n);
    for (std::size_t j = 0; j < n; ++j) idx[j] = first + j;
    std::vector<double> mf(n * n), mg(n * n);
    CompensatedSum acc;
    while (true) {
      double w = 1.0;
      for (std::size_t j = 0; j < n; ++j) w *= rule.weights[idx[j]];
      if (w != 0.0) {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            mf[i * n + j] = fv[i * N + idx[j]];
            mg[i * n + j] = gv[i * N + idx[j]];
          }
        acc.add(w * small_det(mf.data(), n) * small_det(mg.data(), n));
      }
      // Next increasing tuple with idx[0] fixed.
      std::size_t j = n;
      while (j-- > 1 && idx[j] == N - n + j) {
      }
      if (j == 0) break;
      ++idx[j];
      for (std::size_t t = j + 1; t < n; ++t) idx[t] = idx[t - 1] + 1;
    }
    partial[first] = acc.value();
  });
  CompensatedSum total;
  for (double v : partial) total.add(v);
  return total.value();
}

double tuple_count(std::size_t N, std::size_t n) {
  double c = 1.0;
  for (std::size_t j = 0; j < n; ++j) c *= static_cast<double>(N - j) / static_cast<double>(j + 1);
  return c;
}

}  // namespace

AndreevResult andreev_lhs_rhs(const Measure1D& mu, const std::vector<FunctionSpec>& fs,
                              const std::vector<FunctionSpec>& gs, const QuadratureSpec& spec) {
  const std::size_t n = fs.size();
  if (n == 0 || gs.size() != n) throw ConfigError("functions", "Andreev identity needs two tuples of equal length n >= 1");
  if (n > 4) throw ConfigError("functions", "Andreev identity is limited to n <= 4");
  // Both sides are evaluated against the same discrete rule, itself a probability measure, so their
  // difference isolates the identity; the halved rule supplies the discretization error of each side.
  QuadratureSpec s = spec;
  Rule1D rule = measure_rule(mu, s);
  if (tuple_count(rule.size(), n) > 5e7) {
    s = spec.for_dimension(n);
    rule = measure_rule(mu, s);
  }
  const Rule1D half = measure_rule(mu, s.halved());
  AndreevResult r;
  const double lhs = moment_det(rule, fs, gs);
  r.lhs = {lhs, std::abs(lhs - moment_det(half, fs, gs))};
  const double rhs = andreev_rhs(rule, fs, gs);
  r.rhs = {rhs, std::abs(rhs - andreev_rhs(half, fs, gs))};
  return r;
}

DetCovResult det_cov_matrix(const Measure1D& mu, const std::vector<FunctionSpec>& F, const std::vector<FunctionSpec>& G,
                            const QuadratureSpec& spec, std::size_t trials, std::uint64_t seed) {
  const std::size_t n = F.size();
  if (n == 0 || G.size() != n) throw ConfigError("functions", "F and G must have the same positive length");
  DetCovResult r;
  const Interval box = mu.truncated_support(spec.trunc_eps);
  ChebyshevSystem sf, sg;
  sf.members.push_back(FunctionSpec::constant(1, 1.0));
  sg.members.push_back(FunctionSpec::constant(1, 1.0));
  for (const auto& f : F) sf.members.push_back(f);
  for (const auto& g : G) sg.members.push_back(g);
  r.hypotheses.push_back(chebyshev_certify(sf, ChebyshevMode::minors, box, trials, seed));
  r.hypotheses.back().name = "(1,F) Chebyshev system";
  r.hypotheses.push_back(chebyshev_certify(sg, ChebyshevMode::minors, box, trials, derive_seed(seed, 1)));
  r.hypotheses.back().name = "(1,G) Chebyshev system";
  r.hypotheses_pass = r.hypotheses[0].pass && r.hypotheses[1].pass;

  const ProductMeasure pm(mu, 1);
  r.cov = covariance_matrix(pm, F, G, spec);
  const Eigen::MatrixXd cov_h = covariance_matrix(pm, F, G, spec.halved());
  const double det = n == 1 ? r.cov(0, 0) : r.cov.determinant();
  const double det_h = n == 1 ? cov_h(0, 0) : cov_h.determinant();
  r.det = {det, std::abs(det - det_h)};
  r.bordered = moment_det(measure_rule(mu, spec), sf.members, sg.members);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale *= std::sqrt(std::abs(r.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))));
  r.bordered_agree = std::abs(r.bordered - det) <= std::max(1e-9 * (1.0 + scale * scale), 3.0 * r.det.error + 1e-12);
  return r;
}

}  // namespace covlab
