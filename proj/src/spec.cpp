#include "covlab/spec.hpp"

#include <algorithm>
#include <cmath>

#include "covlab/errors.hpp"

namespace covlab {

QuadratureSpec QuadratureSpec::halved() const {
  QuadratureSpec s = *this;
  s.order = std::max(2, order / 2);
  return s;
}

QuadratureSpec QuadratureSpec::for_dimension(std::size_t dims) const {
  QuadratureSpec s = *this;
  if (dims <= 1) return s;
  const double per_axis = std::floor(std::pow(static_cast<double>(max_tensor_nodes), 1.0 / dims));
  auto nodes = [&] { return static_cast<double>(s.order) * s.panels + 2.0; };
  // Panels isolate tails and kinks, so order gives way first.
  const int floor_order = std::min(order, 16);
  while (nodes() > per_axis && s.order > floor_order) s.order = std::max(floor_order, s.order / 2);
  while (nodes() > per_axis && s.panels > 1) s.panels = std::max(1, s.panels / 2);
  while (nodes() > per_axis && s.order > 4) s.order = std::max(4, s.order / 2);
  return s;
}

void QuadratureSpec::validate() const {
  if (order < 2 || order > 512) throw ConfigError("quadrature.order", "must lie in [2, 512]");
  if (panels < 1) throw ConfigError("quadrature.panels", "must be positive");
  if (det_dim_cap < 1) throw ConfigError("quadrature.det_dim_cap", "must be positive");
  if (mc_samples < 2) throw ConfigError("quadrature.mc_samples", "must be at least 2");
  if (!(trunc_eps > 0.0 && trunc_eps < 0.5))
    throw ConfigError("quadrature.trunc_eps", "must lie in (0, 0.5)");
  if (max_tensor_nodes < 16) throw ConfigError("quadrature.max_tensor_nodes", "too small");
}

json QuadratureSpec::to_json() const {
  return json{{"order", order},         {"panels", panels},     {"det_dim_cap", det_dim_cap},
              {"mc_samples", mc_samples}, {"seed", seed},         {"trunc_eps", trunc_eps},
              {"max_tensor_nodes", max_tensor_nodes}};
}

namespace {
template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("quadrature.") + key, "has the wrong type");
  }
}
}  // namespace

QuadratureSpec QuadratureSpec::from_json(const json& j) { return from_json(j, QuadratureSpec{}); }

QuadratureSpec QuadratureSpec::from_json(const json& j, const QuadratureSpec& defaults) {
  QuadratureSpec s = defaults;
  if (j.is_null()) return s;
  if (!j.is_object()) throw ConfigError("quadrature", "must be an object");
  read_field(j, "order", s.order);
  read_field(j, "panels", s.panels);
  read_field(j, "det_dim_cap", s.det_dim_cap);
  read_field(j, "mc_samples", s.mc_samples);
  read_field(j, "seed", s.seed);
  read_field(j, "trunc_eps", s.trunc_eps);
  read_field(j, "max_tensor_nodes", s.max_tensor_nodes);
  s.validate();
  return s;
}

}  // namespace covlab
