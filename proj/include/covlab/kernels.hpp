#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "covlab/measures.hpp"
#include "covlab/spec.hpp"

namespace covlab {

/// k(x,y) = F(x∧y) − F(x)F(y), optionally weighted as a(x)·k(x,y)·b(y).
class HoeffdingKernel {
 public:
  using Scalar = std::function<double(double)>;

  explicit HoeffdingKernel(Measure1D mu);
  HoeffdingKernel(Measure1D mu, Scalar left, Scalar right);

  /// Evaluated as F(x∧y)·P(X > x∨y), which is the same quantity without cancellation.
  double operator()(double x, double y) const;
  double base(double x, double y) const;
  const Measure1D& measure() const noexcept { return mu_; }
  bool weighted() const noexcept { return static_cast<bool>(left_) || static_cast<bool>(right_); }
  double left(double x) const { return left_ ? left_(x) : 1.0; }
  double right(double y) const { return right_ ? right_(y) : 1.0; }

 private:
  Measure1D mu_;
  Scalar left_, right_;
};

/// ∬ L(x) k(x,y) R(y) dx dy over the square of the truncated support. The inner integral is split
/// exactly at y = x by carrying running primitives along the outer Gauss nodes.
Estimate kernel_bilinear(const HoeffdingKernel& k, const HoeffdingKernel::Scalar& L, const HoeffdingKernel::Scalar& R,
                         const QuadratureSpec& spec);

/// ∬ k dx dy (equals Var(μ), or Cov(A,B) for a weighted kernel with primitives A, B).
Estimate kernel_mass(const HoeffdingKernel& k, const QuadratureSpec& spec);

struct MinorReport {
  bool pass = true;
  std::size_t order = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double worst = 0.0;  // smallest determinant divided by the product of row sup-norms
  std::vector<double> worst_s, worst_t;
};

/// Sampled order-n minors det(k(s_i,t_j)) over ordered tuples in the truncated support.
MinorReport tp_minor_check(const HoeffdingKernel& k, std::size_t n, std::size_t trials, std::uint64_t seed,
                           double trunc_eps = 1e-9);

/// det(k(s_i,t_j)) for explicit tuples.
double kernel_minor(const HoeffdingKernel& k, const std::vector<double>& s, const std::vector<double>& t);

struct HolleyReport {
  bool pass = true;
  std::size_t pairs = 0;
  double worst = 0.0;
  std::vector<double> witness_x, witness_y;
};

/// H(x∧y) + H(x∨y) − H(x) − H(y) ≥ −τ on random pairs in the box.
HolleyReport holley_check(const std::function<double(std::span<const double>)>& H, const std::vector<Interval>& box,
                          std::size_t pairs, std::uint64_t seed);

/// CSV with header x,y,k over an n×n grid spanning the truncated support, 17 significant digits.
void write_kernel_csv(std::ostream& out, const HoeffdingKernel& k, std::size_t grid, double trunc_eps = 1e-9);

}  // namespace covlab
