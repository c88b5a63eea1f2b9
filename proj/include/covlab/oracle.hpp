#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covlab/functions.hpp"
#include "covlab/measures.hpp"

namespace covlab::oracle {

inline constexpr std::size_t kAtomCap = 1000000;

/// Product of finitely supported coordinates; every identity is an exhaustive finite sum.
class DiscreteProduct {
 public:
  explicit DiscreteProduct(std::vector<std::vector<Atom>> coords);
  static DiscreteProduct from_measure(const ProductMeasure& mu);

  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<Atom>& coord(std::size_t i) const { return coords_.at(i); }
  std::size_t atom_count() const noexcept { return count_; }
  /// Visits every atom of the product in lexicographic order.
  void for_each(const std::function<void(const std::vector<double>&, double)>& fn) const;

 private:
  std::vector<std::vector<Atom>> coords_;
  std::size_t count_ = 1;
};

double exact_expectation(const DiscreteProduct& dp, const FunctionSpec& f);
double exact_covariance(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g);

struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return lhs - rhs; }
};

/// One-dimensional kernel on the atom cells: K[c][c'] = F_{min(c,c')}·(1 − F_{max(c,c')}).
std::vector<std::vector<double>> cell_kernel(const std::vector<Atom>& atoms);

/// Cov(f,g) against Σ K[c][c'] Δf_c Δg_{c'} for the piecewise-linear interpolants between atoms.
Sides exact_hoeffding(const std::vector<Atom>& atoms, const FunctionSpec& f, const FunctionSpec& g);

/// det(E[f_i g_j]) against (1/n!) Σ over atom n-tuples of det(f_i(x_j)) det(g_i(x_j)).
Sides exact_andreev(const std::vector<Atom>& atoms, const std::vector<FunctionSpec>& fs,
                    const std::vector<FunctionSpec>& gs);

/// det(Cov(f_i, g_j)) against the Cauchy–Binet sum Σ det(f_i′(c_j)) det(K(c_i,c′_j)) det(g_i′(c′_j))
/// over strictly increasing cell tuples, weighted by cell lengths.
Sides exact_bivariate_andreev(const std::vector<Atom>& atoms, const std::vector<FunctionSpec>& fs,
                              const std::vector<FunctionSpec>& gs);

/// Cov against the sum of the exact tensorization terms.
Sides exact_tensorization(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g,
                          std::vector<double>* terms = nullptr);
/// Cov against ½ Σ_i E[Δ_i f Δ̃_i g] summed over every pair (X, X′) of atoms.
Sides exact_duplication(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g,
                        std::vector<double>* terms = nullptr);
/// Cov against Σ_i of the product Hoeffding terms with coordinate i interpolated linearly.
Sides exact_product_hoeffding(const DiscreteProduct& dp, const FunctionSpec& f, const FunctionSpec& g,
                              std::vector<double>* terms = nullptr);

struct BatteryLine {
  std::string identity;
  std::size_t instances = 0;
  double max_residual = 0.0;
  double tolerance = 1e-12;
  bool pass() const { return max_residual <= tolerance; }
};

/// Randomized battery over every oracle identity, `instances` draws each.
std::vector<BatteryLine> verify_battery(std::uint64_t seed, std::size_t instances = 500);

}  // namespace covlab::oracle
