#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"

namespace covlab {

using json = nlohmann::json;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// A numerical result with an a-posteriori error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Resolution controls shared by every integration routine.
struct QuadratureSpec {
  int order = 64;
  int panels = 8;
  int det_dim_cap = 4;
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 42;
  double trunc_eps = 1e-9;
  // Upper bound on the number of nodes of a tensor-product rule.
  std::size_t max_tensor_nodes = std::size_t{1} << 21;

  /// Same spec at half the Gauss-Legendre order (used for error estimates).
  QuadratureSpec halved() const;
  /// Coarsens the per-axis resolution so that a `dims`-fold tensor rule stays within budget.
  QuadratureSpec for_dimension(std::size_t dims) const;
  void validate() const;

  json to_json() const;
  static QuadratureSpec from_json(const json& j);
  static QuadratureSpec from_json(const json& j, const QuadratureSpec& defaults);
};

}  // namespace covlab
