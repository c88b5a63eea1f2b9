#include "covlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"

namespace covlab {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
double normal_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

bool finite(double x) { return std::isfinite(x); }

// Root of a monotone increasing function on a bracket that is widened until it changes sign.
double solve_increasing(const std::function<double(double)>& h, double lo, double hi) {
  int guard = 0;
  while (h(lo) > 0.0 && guard++ < 200) lo -= 2.0 * (hi - lo);
  guard = 0;
  while (h(hi) < 0.0 && guard++ < 200) hi += 2.0 * (hi - lo);
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(h, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::uniform: return "uniform";
    case Family::exponential: return "exponential";
    case Family::logistic: return "logistic";
    case Family::discrete: return "discrete";
    case Family::gaussian_scale_mixture: return "gaussian_scale_mixture";
    case Family::grid_density: return "grid_density";
  }
  return "unknown";
}

Measure1D::Measure1D(Family f, Params p) : family_(f), params_(std::move(p)) { finalize_moments(); }

Measure1D Measure1D::gaussian(double mean, double sigma) {
  require(finite(mean), "params.mean", "must be finite");
  require(finite(sigma) && sigma > 0.0, "params.sigma", "must be positive");
  return Measure1D(Family::gaussian, GaussianParams{mean, sigma});
}

Measure1D Measure1D::uniform(double lo, double hi) {
  require(finite(lo) && finite(hi) && hi > lo, "params.hi", "uniform requires finite lo < hi");
  return Measure1D(Family::uniform, UniformParams{lo, hi});
}

Measure1D Measure1D::exponential(double rate) {
  require(finite(rate) && rate > 0.0, "params.rate", "must be positive");
  return Measure1D(Family::exponential, ExponentialParams{rate});
}

Measure1D Measure1D::logistic(double loc, double scale) {
  require(finite(loc), "params.loc", "must be finite");
  require(finite(scale) && scale > 0.0, "params.scale", "must be positive");
  return Measure1D(Family::logistic, LogisticParams{loc, scale});
}

Measure1D Measure1D::discrete(std::vector<Atom> atoms) {
  require(!atoms.empty(), "params.atoms", "must not be empty");
  for (const auto& a : atoms) {
    require(finite(a.position), "params.atoms", "positions must be finite");
    require(finite(a.probability) && a.probability > 0.0, "params.atoms",
            "probabilities must be strictly positive");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.position < r.position; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().position == a.position) {
      merged.back().probability += a.probability;
    } else {
      merged.push_back(a);
    }
  }
  double total = 0.0;
  for (const auto& a : merged) total += a.probability;
  for (auto& a : merged) a.probability /= total;
  DiscreteParams p;
  p.atoms = std::move(merged);
  double acc = 0.0;
  for (const auto& a : p.atoms) {
    acc += a.probability;
    p.cumulative.push_back(acc);
  }
  p.cumulative.back() = 1.0;
  return Measure1D(Family::discrete, std::move(p));
}

Measure1D Measure1D::gaussian_scale_mixture(std::vector<MixtureComponent> components) {
  require(!components.empty(), "components", "must not be empty");
  double total = 0.0;
  for (const auto& c : components) {
    require(finite(c.sigma) && c.sigma > 0.0, "components.sigma", "must be positive");
    require(finite(c.weight) && c.weight > 0.0, "components.weight", "must be positive");
    total += c.weight;
  }
  for (auto& c : components) c.weight /= total;
  return Measure1D(Family::gaussian_scale_mixture, ScaleMixtureParams{std::move(components)});
}

Measure1D Measure1D::grid_density(std::vector<double> grid, std::vector<double> values) {
  require(grid.size() >= 2, "grid", "needs at least two nodes");
  require(values.size() == grid.size(), "values", "must have the same length as grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    require(finite(grid[k]), "grid", "nodes must be finite");
    require(finite(values[k]) && values[k] >= 0.0, "values", "must be non-negative");
    if (k > 0) require(grid[k] > grid[k - 1], "grid", "nodes must be strictly increasing");
  }
  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k)
    mass += 0.5 * (values[k] + values[k + 1]) * (grid[k + 1] - grid[k]);
  require(mass > 0.0, "values", "density has zero mass");
  GridDensityParams p;
  p.grid = std::move(grid);
  p.values = std::move(values);
  for (auto& v : p.values) v /= mass;
  p.cumulative.assign(p.grid.size(), 0.0);
  for (std::size_t k = 0; k + 1 < p.grid.size(); ++k)
    p.cumulative[k + 1] =
        p.cumulative[k] + 0.5 * (p.values[k] + p.values[k + 1]) * (p.grid[k + 1] - p.grid[k]);
  p.cumulative.back() = 1.0;
  return Measure1D(Family::grid_density, std::move(p));
}

void Measure1D::finalize_moments() {
  std::visit(Overloaded{
                 [&](const GaussianParams& p) {
                   mean_ = p.mean;
                   variance_ = p.sigma * p.sigma;
                 },
                 [&](const UniformParams& p) {
                   mean_ = 0.5 * (p.lo + p.hi);
                   variance_ = (p.hi - p.lo) * (p.hi - p.lo) / 12.0;
                 },
                 [&](const ExponentialParams& p) {
                   mean_ = 1.0 / p.rate;
                   variance_ = 1.0 / (p.rate * p.rate);
                 },
                 [&](const LogisticParams& p) {
                   mean_ = p.loc;
                   variance_ = std::numbers::pi * std::numbers::pi * p.scale * p.scale / 3.0;
                 },
                 [&](const DiscreteParams& p) {
                   double m = 0.0;
                   for (const auto& a : p.atoms) m += a.probability * a.position;
                   double v = 0.0;
                   for (const auto& a : p.atoms)
                     v += a.probability * (a.position - m) * (a.position - m);
                   mean_ = m;
                   variance_ = v;
                 },
                 [&](const ScaleMixtureParams& p) {
                   mean_ = 0.0;
                   variance_ = 0.0;
                   for (const auto& c : p.components) variance_ += c.weight * c.sigma * c.sigma;
                 },
                 [&](const GridDensityParams& p) {
                   // x·p and x²·p are cubic on each cell, so Simpson's rule is exact.
                   double m1 = 0.0, m2 = 0.0;
                   for (std::size_t k = 0; k + 1 < p.grid.size(); ++k) {
                     const double a = p.grid[k], b = p.grid[k + 1], h = b - a;
                     const double c = 0.5 * (a + b);
                     const double pa = p.values[k], pb = p.values[k + 1], pc = 0.5 * (pa + pb);
                     m1 += h / 6.0 * (a * pa + 4 * c * pc + b * pb);
                     m2 += h / 6.0 * (a * a * pa + 4 * c * c * pc + b * b * pb);
                   }
                   mean_ = m1;
                   variance_ = m2 - m1 * m1;
                 },
             },
             params_);
  if (!(variance_ >= 1e-14)) throw ConfigError("params", "degenerate measure (variance below 1e-14)");
}

double Measure1D::pdf(double x) const {
  return std::visit(
      Overloaded{
          [&](const GaussianParams& p) { return normal_pdf((x - p.mean) / p.sigma) / p.sigma; },
          [&](const UniformParams& p) { return (x >= p.lo && x <= p.hi) ? 1.0 / (p.hi - p.lo) : 0.0; },
          [&](const ExponentialParams& p) { return x >= 0.0 ? p.rate * std::exp(-p.rate * x) : 0.0; },
          [&](const LogisticParams& p) {
            const double z = std::abs((x - p.loc) / p.scale);
            const double e = std::exp(-z);
            return e / (p.scale * (1.0 + e) * (1.0 + e));
          },
          [&](const DiscreteParams&) { return 0.0; },
          [&](const ScaleMixtureParams& p) {
            double s = 0.0;
            for (const auto& c : p.components) s += c.weight * normal_pdf(x / c.sigma) / c.sigma;
            return s;
          },
          [&](const GridDensityParams& p) {
            if (x < p.grid.front() || x > p.grid.back()) return 0.0;
            auto it = std::upper_bound(p.grid.begin(), p.grid.end(), x);
            std::size_t k = static_cast<std::size_t>(it - p.grid.begin());
            if (k >= p.grid.size()) k = p.grid.size() - 1;
            if (k == 0) k = 1;
            const double a = p.grid[k - 1], b = p.grid[k];
            const double t = (x - a) / (b - a);
            return p.values[k - 1] + (p.values[k] - p.values[k - 1]) * t;
          },
      },
      params_);
}

double Measure1D::pdf_d1(double x) const {
  if (const auto* p = std::get_if<ScaleMixtureParams>(&params_)) {
    double s = 0.0;
    for (const auto& c : p->components) {
      const double s2 = c.sigma * c.sigma;
      s += c.weight * normal_pdf(x / c.sigma) / c.sigma * (-x / s2);
    }
    return s;
  }
  return -potential_d1(x) * pdf(x);
}

double Measure1D::pdf_d2(double x) const {
  if (const auto* p = std::get_if<ScaleMixtureParams>(&params_)) {
    double s = 0.0;
    for (const auto& c : p->components) {
      const double s2 = c.sigma * c.sigma;
      s += c.weight * normal_pdf(x / c.sigma) / c.sigma * (x * x / (s2 * s2) - 1.0 / s2);
    }
    return s;
  }
  const double v1 = potential_d1(x);
  return (v1 * v1 - potential_d2(x)) * pdf(x);
}

double Measure1D::cdf(double x) const {
  return std::visit(
      Overloaded{
          [&](const GaussianParams& p) { return normal_cdf((x - p.mean) / p.sigma); },
          [&](const UniformParams& p) {
            if (x <= p.lo) return 0.0;
            if (x >= p.hi) return 1.0;
            return (x - p.lo) / (p.hi - p.lo);
          },
          [&](const ExponentialParams& p) { return x <= 0.0 ? 0.0 : -std::expm1(-p.rate * x); },
          [&](const LogisticParams& p) { return 1.0 / (1.0 + std::exp(-(x - p.loc) / p.scale)); },
          [&](const DiscreteParams& p) {
            auto it = std::upper_bound(p.atoms.begin(), p.atoms.end(), x,
                                       [](double v, const Atom& a) { return v < a.position; });
            if (it == p.atoms.begin()) return 0.0;
            return p.cumulative[static_cast<std::size_t>(it - p.atoms.begin()) - 1];
          },
          [&](const ScaleMixtureParams& p) {
            double s = 0.0;
            for (const auto& c : p.components) s += c.weight * normal_cdf(x / c.sigma);
            return s;
          },
          [&](const GridDensityParams& p) {
            if (x <= p.grid.front()) return 0.0;
            if (x >= p.grid.back()) return 1.0;
            auto it = std::upper_bound(p.grid.begin(), p.grid.end(), x);
            const std::size_t k = static_cast<std::size_t>(it - p.grid.begin()) - 1;
            const double h = p.grid[k + 1] - p.grid[k];
            const double t = x - p.grid[k];
            const double slope = (p.values[k + 1] - p.values[k]) / h;
            return std::min(1.0, p.cumulative[k] + p.values[k] * t + 0.5 * slope * t * t);
          },
      },
      params_);
}

double Measure1D::sf(double x) const {
  return std::visit(
      Overloaded{
          [&](const GaussianParams& p) { return normal_sf((x - p.mean) / p.sigma); },
          [&](const ExponentialParams& p) { return x <= 0.0 ? 1.0 : std::exp(-p.rate * x); },
          [&](const LogisticParams& p) { return 1.0 / (1.0 + std::exp((x - p.loc) / p.scale)); },
          [&](const ScaleMixtureParams& p) {
            double s = 0.0;
            for (const auto& c : p.components) s += c.weight * normal_sf(x / c.sigma);
            return s;
          },
          [&](const auto&) { return 1.0 - cdf(x); },
      },
      params_);
}

double Measure1D::quantile(double prob) const {
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::domain_error("quantile: probability outside [0,1]");
  return std::visit(
      Overloaded{
          [&](const GaussianParams& p) {
            if (prob <= 0.0) return -kInf;
            if (prob >= 1.0) return kInf;
            return p.mean - p.sigma * kSqrt2 * boost::math::erfc_inv(2.0 * prob);
          },
          [&](const UniformParams& p) { return p.lo + prob * (p.hi - p.lo); },
          [&](const ExponentialParams& p) {
            if (prob >= 1.0) return kInf;
            return -std::log1p(-prob) / p.rate;
          },
          [&](const LogisticParams& p) {
            if (prob <= 0.0) return -kInf;
            if (prob >= 1.0) return kInf;
            return p.loc + p.scale * (std::log(prob) - std::log1p(-prob));
          },
          [&](const DiscreteParams& p) {
            auto it = std::lower_bound(p.cumulative.begin(), p.cumulative.end(), prob);
            if (it == p.cumulative.end()) return p.atoms.back().position;
            return p.atoms[static_cast<std::size_t>(it - p.cumulative.begin())].position;
          },
          [&](const ScaleMixtureParams& p) {
            if (prob <= 0.0) return -kInf;
            if (prob >= 1.0) return kInf;
            double smax = 0.0;
            for (const auto& c : p.components) smax = std::max(smax, c.sigma);
            if (prob > 0.5) {
              const double q = 1.0 - prob;
              return solve_increasing([&](double x) { return q - sf(x); }, 0.0, 10.0 * smax);
            }
            return solve_increasing([&](double x) { return cdf(x) - prob; }, -10.0 * smax, 0.0);
          },
          [&](const GridDensityParams& p) {
            if (prob <= 0.0) return p.grid.front();
            if (prob >= 1.0) return p.grid.back();
            auto it = std::upper_bound(p.cumulative.begin(), p.cumulative.end(), prob);
            std::size_t k = static_cast<std::size_t>(it - p.cumulative.begin());
            k = std::clamp<std::size_t>(k, 1, p.grid.size() - 1) - 1;
            const double h = p.grid[k + 1] - p.grid[k];
            const double r = prob - p.cumulative[k];
            const double v = p.values[k];
            const double slope = (p.values[k + 1] - v) / h;
            const double disc = std::max(0.0, v * v + 2.0 * slope * r);
            const double denom = v + std::sqrt(disc);
            const double t = denom > 0.0 ? 2.0 * r / denom : 0.0;
            return std::clamp(p.grid[k] + t, p.grid[k], p.grid[k + 1]);
          },
      },
      params_);
}

Interval Measure1D::support() const {
  return std::visit(
      Overloaded{
          [](const UniformParams& p) { return Interval{p.lo, p.hi}; },
          [](const ExponentialParams&) { return Interval{0.0, kInf}; },
          [](const DiscreteParams& p) {
            return Interval{p.atoms.front().position, p.atoms.back().position};
          },
          [](const GridDensityParams& p) { return Interval{p.grid.front(), p.grid.back()}; },
          [](const auto&) { return Interval{-kInf, kInf}; },
      },
      params_);
}

Interval Measure1D::truncated_support(double eps) const {
  if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("trunc_eps", "must lie in (0, 0.5)");
  return std::visit(
      Overloaded{
          [&](const GaussianParams& p) {
            const double z = kSqrt2 * boost::math::erfc_inv(2.0 * eps);
            return Interval{p.mean - p.sigma * z, p.mean + p.sigma * z};
          },
          [&](const ExponentialParams& p) { return Interval{0.0, -std::log(eps) / p.rate}; },
          [&](const LogisticParams& p) {
            const double z = std::log1p(-eps) - std::log(eps);
            return Interval{p.loc - p.scale * z, p.loc + p.scale * z};
          },
          [&](const ScaleMixtureParams& p) {
            double smax = 0.0;
            for (const auto& c : p.components) smax = std::max(smax, c.sigma);
            const double hi =
                solve_increasing([&](double x) { return eps - sf(x); }, 0.0, 10.0 * smax);
            return Interval{-hi, hi};
          },
          [&](const auto&) { return support(); },
      },
      params_);
}

std::vector<double> Measure1D::breakpoints() const {
  std::vector<double> out;
  if (const auto* d = std::get_if<DiscreteParams>(&params_)) {
    for (const auto& a : d->atoms) out.push_back(a.position);
  } else if (const auto* g = std::get_if<GridDensityParams>(&params_)) {
    out.assign(g->grid.begin() + 1, g->grid.end() - 1);
  }
  return out;
}

const std::vector<Atom>& Measure1D::atoms() const {
  if (const auto* d = std::get_if<DiscreteParams>(&params_)) return d->atoms;
  throw std::logic_error("atoms() requires a discrete measure");
}

bool Measure1D::is_even(double tol) const {
  if (const auto* d = std::get_if<DiscreteParams>(&params_)) {
    const auto& a = d->atoms;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto& m = a[a.size() - 1 - k];
      if (std::abs(a[k].position + m.position) > tol * (1.0 + std::abs(m.position)) ||
          std::abs(a[k].probability - m.probability) > tol)
        return false;
    }
    return true;
  }
  const Interval box = truncated_support(1e-9);
  const double r = std::max(std::abs(box.lo), std::abs(box.hi));
  for (int k = 0; k <= 100; ++k) {
    const double x = r * k / 100.0;
    if (std::abs(cdf(-x) + cdf(x) - 1.0) > tol) return false;
  }
  return true;
}

bool Measure1D::is_log_concave() const {
  switch (family_) {
    case Family::gaussian:
    case Family::uniform:
    case Family::exponential:
    case Family::logistic:
      return true;
    case Family::discrete:
      return false;
    case Family::gaussian_scale_mixture: {
      const Interval box = truncated_support(1e-6);
      for (int k = 0; k <= 200; ++k) {
        const double x = box.lo + box.width() * k / 200.0;
        if (potential_d2(x) < -1e-9) return false;
      }
      return true;
    }
    case Family::grid_density: {
      const auto& p = std::get<GridDensityParams>(params_);
      const std::size_t n = p.grid.size();
      for (std::size_t k = 1; k + 1 < n; ++k) {
        if (p.values[k] <= 0.0) return false;
        if (p.values[k - 1] <= 0.0 || p.values[k + 1] <= 0.0) continue;
        const double l0 = std::log(p.values[k - 1]), l1 = std::log(p.values[k]),
                     l2 = std::log(p.values[k + 1]);
        const double h0 = p.grid[k] - p.grid[k - 1], h1 = p.grid[k + 1] - p.grid[k];
        if ((l2 - l1) / h1 > (l1 - l0) / h0 + 1e-12) return false;
      }
      return true;
    }
  }
  return false;
}

bool Measure1D::has_potential() const noexcept {
  return family_ != Family::discrete && family_ != Family::grid_density;
}

double Measure1D::potential(double x) const {
  if (!has_potential()) throw std::logic_error("measure has no potential");
  const double p = pdf(x);
  return p > 0.0 ? -std::log(p) : kInf;
}

double Measure1D::potential_d1(double x) const {
  return std::visit(
      Overloaded{
          [&](const GaussianParams& p) { return (x - p.mean) / (p.sigma * p.sigma); },
          [&](const UniformParams&) { return 0.0; },
          [&](const ExponentialParams& p) { return p.rate; },
          [&](const LogisticParams& p) { return std::tanh(0.5 * (x - p.loc) / p.scale) / p.scale; },
          [&](const ScaleMixtureParams&) { return -pdf_d1(x) / pdf(x); },
          [&](const auto&) -> double { throw std::logic_error("measure has no potential"); },
      },
      params_);
}

double Measure1D::potential_d2(double x) const {
  return std::visit(
      Overloaded{
          [&](const GaussianParams& p) { return 1.0 / (p.sigma * p.sigma); },
          [&](const UniformParams&) { return 0.0; },
          [&](const ExponentialParams&) { return 0.0; },
          [&](const LogisticParams& p) {
            const double c = std::cosh(0.5 * (x - p.loc) / p.scale);
            return 0.5 / (p.scale * p.scale * c * c);
          },
          [&](const ScaleMixtureParams&) {
            const double q = pdf(x);
            const double r = pdf_d1(x) / q;
            return -pdf_d2(x) / q + r * r;
          },
          [&](const auto&) -> double { throw std::logic_error("measure has no potential"); },
      },
      params_);
}

namespace {

double number(const json& obj, const char* key, const std::string& field) {
  if (!obj.contains(key)) throw ConfigError(field + "." + key, "is required");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(field + "." + key, "must be a number");
  return v.get<double>();
}

const json& params_of(const json& j) {
  static const json empty = json::object();
  if (j.contains("params")) return j.at("params");
  return empty;
}

const json& lookup(const json& j, const char* key) {
  if (j.contains(key)) return j.at(key);
  const json& p = params_of(j);
  if (p.contains(key)) return p.at(key);
  static const json null;
  return null;
}

}  // namespace

Measure1D Measure1D::from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "must be an object");
  if (!j.contains("family")) {
    if (j.contains("grid")) return grid_density(j.at("grid").get<std::vector<double>>(),
                                                j.at("values").get<std::vector<double>>());
    throw ConfigError(field + ".family", "is required");
  }
  if (!j.at("family").is_string()) throw ConfigError(field + ".family", "must be a string");
  const std::string fam = j.at("family").get<std::string>();
  const json& p = params_of(j);
  const std::string pf = field + ".params";
  try {
    if (fam == "gaussian") return gaussian(p.value("mean", 0.0), p.value("sigma", 1.0));
    if (fam == "uniform") return uniform(number(p, "lo", pf), number(p, "hi", pf));
    if (fam == "exponential") return exponential(number(p, "rate", pf));
    if (fam == "logistic") return logistic(p.value("loc", 0.0), p.value("scale", 1.0));
    if (fam == "discrete") {
      const json& atoms = lookup(j, "atoms");
      if (!atoms.is_array()) throw ConfigError(pf + ".atoms", "must be an array");
      std::vector<Atom> out;
      for (const auto& a : atoms) {
        if (a.is_array() && a.size() == 2) {
          out.push_back({a[0].get<double>(), a[1].get<double>()});
        } else if (a.is_object()) {
          out.push_back({number(a, "position", pf + ".atoms"), number(a, "probability", pf + ".atoms")});
        } else {
          throw ConfigError(pf + ".atoms", "entries must be [position, probability]");
        }
      }
      return discrete(std::move(out));
    }
    if (fam == "gaussian_scale_mixture") {
      const json& comps = lookup(j, "components");
      if (!comps.is_array()) throw ConfigError(field + ".components", "must be an array");
      std::vector<MixtureComponent> out;
      for (const auto& c : comps)
        out.push_back({number(c, "sigma", field + ".components"), number(c, "weight", field + ".components")});
      return gaussian_scale_mixture(std::move(out));
    }
    if (fam == "grid_density") {
      const json& g = lookup(j, "grid");
      const json& v = lookup(j, "values");
      if (!g.is_array()) throw ConfigError(field + ".grid", "must be an array");
      if (!v.is_array()) throw ConfigError(field + ".values", "must be an array");
      return grid_density(g.get<std::vector<double>>(), v.get<std::vector<double>>());
    }
  } catch (const ConfigError& e) {
    if (e.field().rfind(field, 0) == 0) throw;
    throw ConfigError(field + "." + e.field(), e.what());
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("malformed parameters: ") + e.what());
  }
  throw ConfigError(field + ".family", "unknown family '" + fam + "'");
}

json Measure1D::to_json() const {
  json j;
  j["family"] = family_name(family_);
  std::visit(Overloaded{
                 [&](const GaussianParams& p) { j["params"] = {{"mean", p.mean}, {"sigma", p.sigma}}; },
                 [&](const UniformParams& p) { j["params"] = {{"lo", p.lo}, {"hi", p.hi}}; },
                 [&](const ExponentialParams& p) { j["params"] = {{"rate", p.rate}}; },
                 [&](const LogisticParams& p) { j["params"] = {{"loc", p.loc}, {"scale", p.scale}}; },
                 [&](const DiscreteParams& p) {
                   json atoms = json::array();
                   for (const auto& a : p.atoms) atoms.push_back({a.position, a.probability});
                   j["params"] = {{"atoms", atoms}};
                 },
                 [&](const ScaleMixtureParams& p) {
                   json comps = json::array();
                   for (const auto& c : p.components)
                     comps.push_back({{"sigma", c.sigma}, {"weight", c.weight}});
                   j["components"] = comps;
                 },
                 [&](const GridDensityParams& p) {
                   j["grid"] = p.grid;
                   j["values"] = p.values;
                 },
             },
             params_);
  return j;
}

std::string Measure1D::describe() const { return to_json().dump(); }

ProductMeasure::ProductMeasure(std::vector<Measure1D> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw ConfigError("measure", "product measure needs at least one factor");
}

ProductMeasure::ProductMeasure(const Measure1D& m, std::size_t dim)
    : ProductMeasure(std::vector<Measure1D>(dim, m)) {}

ProductMeasure ProductMeasure::from_json(const json& j, const std::string& field) {
  if (j.is_array()) {
    std::vector<Measure1D> fs;
    for (std::size_t k = 0; k < j.size(); ++k)
      fs.push_back(Measure1D::from_json(j[k], field + "[" + std::to_string(k) + "]"));
    return ProductMeasure(std::move(fs));
  }
  if (!j.is_object()) throw ConfigError(field, "must be an object or an array of factors");
  if (j.contains("factors")) return from_json(j.at("factors"), field + ".factors");
  const Measure1D m = Measure1D::from_json(j, field);
  std::size_t dim = 1;
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer() || j.at("dim").get<long>() < 1)
      throw ConfigError(field + ".dim", "must be a positive integer");
    dim = j.at("dim").get<std::size_t>();
  }
  return ProductMeasure(m, dim);
}

json ProductMeasure::to_json() const {
  json fs = json::array();
  for (const auto& f : factors_) fs.push_back(f.to_json());
  return json{{"factors", fs}};
}

std::string ProductMeasure::describe() const { return to_json().dump(); }

bool ProductMeasure::is_symmetric() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const Measure1D& m) { return m.is_even(); });
}

std::vector<Interval> ProductMeasure::truncated_box(double eps) const {
  std::vector<Interval> box;
  for (const auto& f : factors_) box.push_back(f.truncated_support(eps));
  return box;
}

PointSet sample(const ProductMeasure& m, std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kChunk = 4096;
  PointSet out;
  out.dim = m.dim();
  out.data.assign(n * out.dim, 0.0);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) {
      for (std::size_t i = 0; i < out.dim; ++i) {
        const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        out.data[k * out.dim + i] = m.factor(i).quantile(u);
      }
    }
  });
  return out;
}

}  // namespace covlab
