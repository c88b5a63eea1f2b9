#include "covlab/functions.hpp"

#include <cmath>
#include <limits>

#include "covlab/errors.hpp"

namespace covlab {

namespace {
const double kCbrtEps = std::cbrt(std::numeric_limits<double>::epsilon());
const double kQrtEps = std::pow(std::numeric_limits<double>::epsilon(), 0.25);

std::vector<double> copy_point(Point x) { return std::vector<double>(x.begin(), x.end()); }
}  // namespace

const char* property_name(Property p) {
  switch (p) {
    case Property::convex: return "convex";
    case Property::log_concave: return "log_concave";
    case Property::quasi_concave: return "quasi_concave";
    case Property::even: return "even";
    case Property::unconditional: return "unconditional";
    case Property::coordinatewise_convex: return "coordinatewise_convex";
    case Property::coordinatewise_quasi_concave: return "coordinatewise_quasi_concave";
    case Property::positive: return "positive";
  }
  return "unknown";
}

Property property_from_string(const std::string& s) {
  for (Property p : {Property::convex, Property::log_concave, Property::quasi_concave, Property::even,
                     Property::unconditional, Property::coordinatewise_convex,
                     Property::coordinatewise_quasi_concave, Property::positive}) {
    if (s == property_name(p)) return p;
  }
  throw ConfigError("declared", "unknown property '" + s + "'");
}

FunctionSpec::FunctionSpec(std::size_t dim, ValueFn value, PartialFn partial, SecondFn second,
                           std::string name, json source)
    : dim_(dim),
      value_(std::move(value)),
      partial_(std::move(partial)),
      second_(std::move(second)),
      name_(std::move(name)),
      source_(std::move(source)) {
  if (dim_ == 0) throw ConfigError("function", "dimension must be positive");
}

FunctionSpec FunctionSpec::constant(std::size_t dim, double c) {
  return FunctionSpec(
      dim, [c](Point) { return c; }, [](std::size_t, Point) { return 0.0; },
      [](std::size_t, std::size_t, Point) { return 0.0; }, "constant",
      json{{"builtin", "constant"}, {"params", {{"c", c}}}});
}

FunctionSpec FunctionSpec::coordinate(std::size_t dim, std::size_t i) {
  return FunctionSpec(
      dim, [i](Point x) { return x[i]; }, [i](std::size_t k, Point) { return k == i ? 1.0 : 0.0; },
      [](std::size_t, std::size_t, Point) { return 0.0; }, "coordinate",
      json{{"builtin", "coordinate"}, {"params", {{"i", i}}}});
}

FunctionSpec FunctionSpec::univariate(std::function<double(double)> f, std::function<double(double)> d1,
                                      std::function<double(double)> d2, std::string name) {
  PartialFn p;
  SecondFn s;
  if (d1) p = [d1](std::size_t, Point x) { return d1(x[0]); };
  if (d2) s = [d2](std::size_t, std::size_t, Point x) { return d2(x[0]); };
  return FunctionSpec(1, [f](Point x) { return f(x[0]); }, p, s, std::move(name));
}

double FunctionSpec::fd_partial(std::size_t i, Point x) const {
  auto y = copy_point(x);
  const double h = kCbrtEps * (1.0 + std::abs(x[i]));
  y[i] = x[i] + h;
  const double up = value_(y);
  y[i] = x[i] - h;
  const double down = value_(y);
  return (up - down) / (2.0 * h);
}

double FunctionSpec::partial(std::size_t i, Point x) const {
  if (partial_) return partial_(i, x);
  return fd_partial(i, x);
}

double FunctionSpec::second(std::size_t i, std::size_t j, Point x) const {
  if (second_) return second_(i, j, x);
  auto y = copy_point(x);
  if (partial_) {
    const double h = kCbrtEps * (1.0 + std::abs(x[j]));
    y[j] = x[j] + h;
    const double up = partial_(i, y);
    y[j] = x[j] - h;
    const double down = partial_(i, y);
    return (up - down) / (2.0 * h);
  }
  const double hi = kQrtEps * (1.0 + std::abs(x[i]));
  if (i == j) {
    const double f0 = value_(x);
    y[i] = x[i] + hi;
    const double fp = value_(y);
    y[i] = x[i] - hi;
    const double fm = value_(y);
    return (fp - 2.0 * f0 + fm) / (hi * hi);
  }
  const double hj = kQrtEps * (1.0 + std::abs(x[j]));
  auto eval = [&](double si, double sj) {
    y[i] = x[i] + si * hi;
    y[j] = x[j] + sj * hj;
    return value_(y);
  };
  return (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * hi * hj);
}

Eigen::VectorXd FunctionSpec::gradient(Point x) const {
  Eigen::VectorXd g(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) g(static_cast<Eigen::Index>(i)) = partial(i, x);
  return g;
}

Eigen::MatrixXd FunctionSpec::hessian(Point x) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd h(n, n);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      double v = second(i, j, x);
      if (i != j) v = 0.5 * (v + second(j, i, x));
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return h;
}

FunctionSpec FunctionSpec::operator+(const FunctionSpec& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("function dimensions differ");
  const FunctionSpec a = *this, b = o;
  PartialFn p;
  SecondFn s;
  if (a.partial_ && b.partial_) p = [a, b](std::size_t i, Point x) { return a.partial(i, x) + b.partial(i, x); };
  if (a.second_ && b.second_)
    s = [a, b](std::size_t i, std::size_t j, Point x) { return a.second(i, j, x) + b.second(i, j, x); };
  return FunctionSpec(
      dim_, [a, b](Point x) { return a(x) + b(x); }, p, s, a.name_ + "+" + b.name_,
      json{{"sum", json::array({a.source_, b.source_})}});
}

FunctionSpec FunctionSpec::scaled(double c) const {
  const FunctionSpec a = *this;
  PartialFn p;
  SecondFn s;
  if (a.partial_) p = [a, c](std::size_t i, Point x) { return c * a.partial(i, x); };
  if (a.second_) s = [a, c](std::size_t i, std::size_t j, Point x) { return c * a.second(i, j, x); };
  FunctionSpec out(
      dim_, [a, c](Point x) { return c * a(x); }, p, s, a.name_,
      json{{"scale", c}, {"of", a.source_}});
  if (a.log_ && c > 0.0) out.set_log_form(a.log_->plus_constant(std::log(c)));
  return out;
}

FunctionSpec FunctionSpec::operator-(const FunctionSpec& o) const { return *this + o.scaled(-1.0); }

FunctionSpec FunctionSpec::plus_constant(double c) const {
  FunctionSpec out = *this;
  const FunctionSpec a = *this;
  out.value_ = [a, c](Point x) { return a(x) + c; };
  out.source_ = json{{"sum", json::array({a.source_, json{{"builtin", "constant"}, {"params", {{"c", c}}}}})}};
  out.declared_.clear();
  out.log_.reset();
  return out;
}

FunctionSpec FunctionSpec::exp() const {
  const FunctionSpec h = *this;
  PartialFn p;
  SecondFn s;
  if (h.partial_) p = [h](std::size_t i, Point x) { return std::exp(h(x)) * h.partial(i, x); };
  if (h.partial_ && h.second_)
    s = [h](std::size_t i, std::size_t j, Point x) {
      return std::exp(h(x)) * (h.second(i, j, x) + h.partial(i, x) * h.partial(j, x));
    };
  FunctionSpec out(
      dim_, [h](Point x) { return std::exp(h(x)); }, p, s, "exp(" + h.name_ + ")",
      json{{"exp_of", h.source_}});
  out.set_log_form(h);
  return out;
}

FunctionSpec FunctionSpec::shifted(std::vector<double> shift) const {
  if (shift.size() != dim_) throw std::invalid_argument("shift dimension mismatch");
  const FunctionSpec a = *this;
  auto moved = [shift](Point x) {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] -= shift[k];
    return y;
  };
  PartialFn p;
  SecondFn s;
  if (a.partial_) p = [a, moved](std::size_t i, Point x) { return a.partial(i, moved(x)); };
  if (a.second_) s = [a, moved](std::size_t i, std::size_t j, Point x) { return a.second(i, j, moved(x)); };
  FunctionSpec out(
      dim_, [a, moved](Point x) { return a(moved(x)); }, p, s, a.name_,
      json{{"shift", shift}, {"of", a.source_}});
  if (a.log_) out.set_log_form(a.log_->shifted(shift));
  return out;
}

double neg_log_partial(const FunctionSpec& f, std::size_t i, Point x) {
  if (const FunctionSpec* h = f.log_form()) return -h->partial(i, x);
  const double v = f(x);
  if (!(v > 0.0)) throw NumericalError("-log f requires f > 0");
  return -f.partial(i, x) / v;
}

double neg_log_second(const FunctionSpec& f, std::size_t i, std::size_t j, Point x) {
  if (const FunctionSpec* h = f.log_form()) return -h->second(i, j, x);
  const double v = f(x);
  if (!(v > 0.0)) throw NumericalError("-log f requires f > 0");
  return -f.second(i, j, x) / v + f.partial(i, x) * f.partial(j, x) / (v * v);
}

}  // namespace covlab
