#include "covlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "covlab/determinantal.hpp"
#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/sum.hpp"

namespace covlab::oracle {

DiscreteProduct::DiscreteProduct(std::vector<std::vector<Atom>> coords) : coords_(std::move(coords)) {
  for (auto& c : coords_) {
    if (c.empty()) throw ConfigError("atoms", "each coordinate needs at least one atom");
    std::sort(c.begin(), c.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
    CompensatedSum s;
    for (const auto& a : c) {
      if (!(a.probability > 0.0)) throw ConfigError("atoms", "probabilities must be positive");
      s.add(a.probability);
    }
    for (auto& a : c) a.probability /= s.value();
    if (count_ > kAtomCap / c.size()) throw ConfigError("atoms", "product atom count exceeds the oracle cap of 1e6");
    count_ *= c.size();
  }
}

DiscreteProduct DiscreteProduct::from_measure(const ProductMeasure& mu) {
  std::vector<std::vector<Atom>> coords;
  for (const auto& f : mu.factors()) {
    if (!f.is_discrete()) throw ConfigError("measure", "the oracle needs discrete factors");
    coords.push_back(f.atoms());
  }
  return DiscreteProduct(std::move(coords));
}

void DiscreteProduct::for_each(const std::function<void(const std::vector<double>&, double)>& fn) const {
  const std::size_t d = dim();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  for (std::size_t k = 0; k < count_; ++k) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = coords_[i][idx[i]].position;
      w *= coords_[i][idx[i]].probability;
    }
    fn(x, w);
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < coords_[i].size()) break;
      idx[i] = 0;
    }
  }
}

double exact_expectation(const DiscreteProduct& dp, const FunctionSpec& f) {
  CompensatedSum s;
  dp.for_each([&](const std::vector<double>& x, double w) { s.add(w * f(x)); });
  return s.value();
}

double exact_covariance(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g) {
  const double ef = exact_expectation(dp, f), eg = exact_expectation(dp, g);
  CompensatedSum s;
  dp.for_each([&](const std::vector<double>& x, double w) { s.add(w * (f(x) - ef) * (g(x) - eg)); });
  return s.value();
}

std::vector<std::vector<double>> cell_kernel(const std::vector<Atom>& atoms) {
  const std::size_t m = atoms.size();
  if (m < 2) return {};
  std::vector<double> F(m - 1), S(m - 1);
  double below = 0.0;
  for (std::size_t c = 0; c + 1 < m; ++c) {
    below += atoms[c].probability;
    F[c] = below;
  }
  double above = 0.0;
  for (std::size_t c = m - 1; c-- > 0;) {
    above += atoms[c + 1].probability;
    S[c] = above;
  }
  std::vector<std::vector<double>> K(m - 1, std::vector<double>(m - 1));
  for (std::size_t c = 0; c + 1 < m; ++c)
    for (std::size_t e = 0; e + 1 < m; ++e) K[c][e] = F[std::min(c, e)] * S[std::max(c, e)];
  return K;
}

namespace {

std::vector<Atom> sorted_atoms(std::vector<Atom> a) {
  std::sort(a.begin(), a.end(), [](const Atom& x, const Atom& y) { return x.position < y.position; });
  return a;
}

std::vector<double> increments(const std::vector<Atom>& atoms, const std::function<double(double)>& h) {
  std::vector<double> d(atoms.size() > 0 ? atoms.size() - 1 : 0);
  for (std::size_t c = 0; c + 1 < atoms.size(); ++c) d[c] = h(atoms[c + 1].position) - h(atoms[c].position);
  return d;
}

double kernel_form(const std::vector<std::vector<double>>& K, const std::vector<double>& a,
                   const std::vector<double>& b) {
  CompensatedSum s;
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t e = 0; e < b.size(); ++e) s.add(a[c] * K[c][e] * b[e]);
  return s.value();
}

double cov1(const std::vector<Atom>& atoms, const FunctionSpec& f, const FunctionSpec& g) {
  return exact_covariance(DiscreteProduct({atoms}), f, g);
}

}  // namespace

Sides exact_hoeffding(const std::vector<Atom>& atoms_in, const FunctionSpec& f, const FunctionSpec& g) {
  const auto atoms = sorted_atoms(atoms_in);
  Sides s;
  s.lhs = cov1(atoms, f, g);
  const auto K = cell_kernel(atoms);
  s.rhs = kernel_form(K, increments(atoms, [&](double x) { return f(x); }),
                      increments(atoms, [&](double x) { return g(x); }));
  return s;
}

Sides exact_andreev(const std::vector<Atom>& atoms_in, const std::vector<FunctionSpec>& fs,
                    const std::vector<FunctionSpec>& gs) {
  const auto atoms = sorted_atoms(atoms_in);
  const std::size_t n = fs.size(), m = atoms.size();
  if (n == 0 || gs.size() != n || n > 4) throw ConfigError("functions", "Andreev oracle needs 1 <= n <= 4");
  std::vector<double> M(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      CompensatedSum s;
      for (const auto& a : atoms) s.add(a.probability * fs[i](a.position) * gs[j](a.position));
      M[i * n + j] = s.value();
    }
  Sides r;
  r.lhs = small_det(M.data(), n);
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= m;
  std::vector<std::size_t> idx(n);
  std::vector<double> mf(n * n), mg(n * n);
  CompensatedSum acc;
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    double w = 1.0;
    for (std::size_t j = n; j-- > 0;) {
      idx[j] = rem % m;
      rem /= m;
      w *= atoms[idx[j]].probability;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        mf[i * n + j] = fs[i](atoms[idx[j]].position);
        mg[i * n + j] = gs[i](atoms[idx[j]].position);
      }
    acc.add(w * small_det(mf.data(), n) * small_det(mg.data(), n));
  }
  double fact = 1.0;
  for (std::size_t j = 2; j <= n; ++j) fact *= static_cast<double>(j);
  r.rhs = acc.value() / fact;
  return r;
}

namespace {

// Strictly increasing index tuples of length n drawn from 0..m-1.
void for_each_combination(std::size_t m, std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (n > m) return;
  std::vector<std::size_t> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = i;
  for (;;) {
    fn(c);
    std::size_t i = n;
    while (i > 0 && c[i - 1] == m - n + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < n; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace

Sides exact_bivariate_andreev(const std::vector<Atom>& atoms_in, const std::vector<FunctionSpec>& fs,
                              const std::vector<FunctionSpec>& gs) {
  const auto atoms = sorted_atoms(atoms_in);
  const std::size_t n = fs.size();
  if (n == 0 || gs.size() != n || n > 4) throw ConfigError("functions", "bivariate Andreev oracle needs 1 <= n <= 4");
  std::vector<double> C(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) C[i * n + j] = cov1(atoms, fs[i], gs[j]);
  Sides r;
  r.lhs = small_det(C.data(), n);
  const auto K = cell_kernel(atoms);
  const std::size_t cells = K.size();
  std::vector<std::vector<double>> df(n), dg(n);
  for (std::size_t i = 0; i < n; ++i) {
    df[i] = increments(atoms, [&](double x) { return fs[i](x); });
    dg[i] = increments(atoms, [&](double x) { return gs[i](x); });
  }
  std::vector<double> mf(n * n), mk(n * n), mg(n * n);
  CompensatedSum acc;
  for_each_combination(cells, n, [&](const std::vector<std::size_t>& a) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) mf[i * n + j] = df[i][a[j]];
    const double det_f = small_det(mf.data(), n);
    if (det_f == 0.0) return;
    for_each_combination(cells, n, [&](const std::vector<std::size_t>& b) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          mk[i * n + j] = K[a[i]][b[j]];
          mg[i * n + j] = dg[i][b[j]];
        }
      acc.add(det_f * small_det(mk.data(), n) * small_det(mg.data(), n));
    });
  });
  r.rhs = acc.value();
  return r;
}

namespace {

// Atoms of coordinates [from, to) as a product, or the single empty point.
DiscreteProduct slice(const DiscreteProduct& dp, std::size_t from, std::size_t to) {
  std::vector<std::vector<Atom>> c;
  for (std::size_t i = from; i < to; ++i) c.push_back(dp.coord(i));
  return DiscreteProduct(std::move(c));
}

std::vector<double> join(const std::vector<double>& a, double s, const std::vector<double>& b) {
  std::vector<double> x(a);
  x.push_back(s);
  x.insert(x.end(), b.begin(), b.end());
  return x;
}

Sides finish(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g, const std::vector<double>& t,
             std::vector<double>* terms) {
  Sides s;
  s.lhs = exact_covariance(dp, f, g);
  CompensatedSum acc;
  for (double v : t) acc.add(v);
  s.rhs = acc.value();
  if (terms) *terms = t;
  return s;
}

}  // namespace

Sides exact_tensorization(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g,
                          std::vector<double>* terms) {
  const std::size_t d = dp.dim();
  std::vector<double> t(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const DiscreteProduct before = slice(dp, 0, k), after = slice(dp, k + 1, d);
    const auto& axis = dp.coord(k);
    CompensatedSum term;
    before.for_each([&](const std::vector<double>& u, double wu) {
      std::vector<double> fk(axis.size()), gk(axis.size());
      for (std::size_t s = 0; s < axis.size(); ++s) {
        CompensatedSum sf, sg;
        after.for_each([&](const std::vector<double>& v, double wv) {
          const auto x = join(u, axis[s].position, v);
          sf.add(wv * f(x));
          sg.add(wv * g(x));
        });
        fk[s] = sf.value();
        gk[s] = sg.value();
      }
      CompensatedSum mf, mg;
      for (std::size_t s = 0; s < axis.size(); ++s) {
        mf.add(axis[s].probability * fk[s]);
        mg.add(axis[s].probability * gk[s]);
      }
      CompensatedSum c;
      for (std::size_t s = 0; s < axis.size(); ++s)
        c.add(axis[s].probability * (fk[s] - mf.value()) * (gk[s] - mg.value()));
      term.add(wu * c.value());
    });
    t[k] = term.value();
  }
  return finish(dp, f, g, t, terms);
}

Sides exact_duplication(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g,
                        std::vector<double>* terms) {
  const std::size_t d = dp.dim();
  if (dp.atom_count() > 20000) throw ConfigError("atoms", "duplication oracle is limited to 2e4 product atoms");
  std::vector<CompensatedSum> acc(d);
  std::vector<double> xi(d), hi(d), lo(d);
  dp.for_each([&](const std::vector<double>& x, double wx) {
    const double fx = f(x);
    dp.for_each([&](const std::vector<double>& xp, double wp) {
      for (std::size_t i = 0; i < d; ++i) {
        xi = x;
        xi[i] = xp[i];
        for (std::size_t j = 0; j < d; ++j) {
          hi[j] = j <= i ? x[j] : xp[j];
          lo[j] = j < i ? x[j] : xp[j];
        }
        acc[i].add(0.5 * wx * wp * (fx - f(xi)) * (g(hi) - g(lo)));
      }
    });
  });
  std::vector<double> t(d);
  for (std::size_t i = 0; i < d; ++i) t[i] = acc[i].value();
  return finish(dp, f, g, t, terms);
}

Sides exact_product_hoeffding(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g,
                              std::vector<double>* terms) {
  const std::size_t d = dp.dim();
  std::vector<double> t(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const DiscreteProduct before = slice(dp, 0, i), after = slice(dp, i + 1, d);
    const auto& axis = dp.coord(i);
    const auto K = cell_kernel(axis);
    CompensatedSum term;
    before.for_each([&](const std::vector<double>& u, double wu) {
      std::vector<double> L(K.size(), 0.0), R(K.size(), 0.0);
      after.for_each([&](const std::vector<double>& v, double wv) {
        const auto dfi = increments(axis, [&](double s) { return f(join(u, s, v)); });
        const auto dgi = increments(axis, [&](double s) { return g(join(u, s, v)); });
        for (std::size_t c = 0; c < K.size(); ++c) {
          L[c] += wv * dfi[c];
          R[c] += wv * dgi[c];
        }
      });
      term.add(wu * kernel_form(K, L, R));
    });
    t[i] = term.value();
  }
  return finish(dp, f, g, t, terms);
}

namespace {

std::vector<Atom> random_atoms(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0), prob(0.1, 1.0);
  std::vector<Atom> atoms;
  while (atoms.size() < m) {
    const double x = pos(rng);
    bool clash = false;
    for (const auto& a : atoms) clash = clash || std::abs(a.position - x) < 1e-3;
    if (!clash) atoms.push_back({x, prob(rng)});
  }
  double total = 0.0;
  for (const auto& a : atoms) total += a.probability;
  for (auto& a : atoms) a.probability /= total;
  return sorted_atoms(atoms);
}

// Cubic in a random linear form, plus a sine and a pairwise product term.
FunctionSpec random_function(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::vector<double> w(d), b(d);
  for (auto& v : w) v = c(rng);
  for (auto& v : b) v = c(rng);
  const double c0 = c(rng), c1 = c(rng), c2 = c(rng), c3 = c(rng), c4 = c(rng), c5 = c(rng);
  return FunctionSpec(d, [=](Point x) {
    double s = 0.0, t = 0.0, p = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += w[i] * x[i];
      t += b[i] * x[i];
      p *= x[i];
    }
    return c0 + c1 * s + c2 * s * s + c3 * s * s * s + c4 * std::sin(2.0 * t) + c5 * p;
  });
}

double normalized(const Sides& s) { return std::abs(s.residual()) / std::max(1.0, std::abs(s.lhs)); }

}  // namespace

std::vector<BatteryLine> verify_battery(std::uint64_t seed, std::size_t instances) {
  using Instance = std::function<double(std::mt19937_64&)>;
  auto atoms_count = [](std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto product = [&](std::mt19937_64& rng, std::size_t d) {
    std::vector<std::vector<Atom>> c;
    for (std::size_t i = 0; i < d; ++i) c.push_back(random_atoms(rng, atoms_count(rng, 2, 4)));
    return DiscreteProduct(std::move(c));
  };
  auto tuple = [](std::mt19937_64& rng, std::size_t n) {
    std::vector<FunctionSpec> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(random_function(rng, 1));
    return v;
  };
  const std::vector<std::pair<std::string, Instance>> identities = {
      {"hoeffding",
       [&](std::mt19937_64& rng) {
         const auto a = random_atoms(rng, atoms_count(rng, 2, 8));
         return normalized(exact_hoeffding(a, random_function(rng, 1), random_function(rng, 1)));
       }},
      {"andreev",
       [&](std::mt19937_64& rng) {
         const std::size_t n = atoms_count(rng, 2, 4);
         const auto a = random_atoms(rng, atoms_count(rng, n, 6));
         return normalized(exact_andreev(a, tuple(rng, n), tuple(rng, n)));
       }},
      {"bivariate_andreev",
       [&](std::mt19937_64& rng) {
         const std::size_t n = atoms_count(rng, 2, 3);
         const auto a = random_atoms(rng, atoms_count(rng, n + 1, 7));
         return normalized(exact_bivariate_andreev(a, tuple(rng, n), tuple(rng, n)));
       }},
      {"tensorization",
       [&](std::mt19937_64& rng) {
         const std::size_t d = atoms_count(rng, 1, 3);
         const auto dp = product(rng, d);
         return normalized(exact_tensorization(dp, random_function(rng, d), random_function(rng, d)));
       }},
      {"duplication",
       [&](std::mt19937_64& rng) {
         const std::size_t d = atoms_count(rng, 1, 3);
         const auto dp = product(rng, d);
         return normalized(exact_duplication(dp, random_function(rng, d), random_function(rng, d)));
       }},
      {"product_hoeffding",
       [&](std::mt19937_64& rng) {
         const std::size_t d = atoms_count(rng, 1, 2);
         const auto dp = product(rng, d);
         return normalized(exact_product_hoeffding(dp, random_function(rng, d), random_function(rng, d)));
       }},
  };
  std::vector<BatteryLine> lines;
  for (std::size_t id = 0; id < identities.size(); ++id) {
    std::vector<double> res(instances);
    parallel_for(instances, [&](std::size_t k) {
      std::mt19937_64 rng(derive_seed(derive_seed(seed, id), k));
      res[k] = identities[id].second(rng);
    });
    BatteryLine line;
    line.identity = identities[id].first;
    line.instances = instances;
    for (double r : res) line.max_residual = std::max(line.max_residual, r);
    lines.push_back(line);
  }
  return lines;
}

}  // namespace covlab::oracle
