#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "covlab/functions.hpp"
#include "covlab/measures.hpp"
#include "covlab/report.hpp"
#include "covlab/spec.hpp"

namespace covlab {

enum class Verdict { pass, fail, hypothesis_failed, inconclusive };

const char* verdict_name(Verdict v);

/// Verdict taxonomy shared by every checker. `margin ≥ 0` means the inequality holds.
Verdict decide_verdict(bool hypotheses_pass, double margin, double tolerance, double error);

/// Everything a checker may read. Unused members are ignored by checkers that do not need them.
struct CheckInput {
  ProductMeasure mu;
  FunctionSpec f;
  FunctionSpec g;
  std::vector<Weight> weights;  // empty means a ≡ 1
  std::vector<FunctionSpec> F;  // tuples for T4.3
  std::vector<FunctionSpec> G;
  QuadratureSpec spec;
  std::optional<double> tolerance;
  std::uint64_t seed = 42;
  json options = json::object();
  json echo = json::object();  // description of the inputs, copied into the report
};

struct CheckReport {
  std::string theorem_id;
  std::vector<Hypothesis> hypotheses;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool monte_carlo = false;
  Verdict verdict = Verdict::pass;
  std::uint64_t seed = 0;
  QuadratureSpec spec;
  json input = json::object();
  json diagnostics = json::object();

  bool hypotheses_pass() const;
  json to_json() const;
};

using Checker = std::function<CheckReport(const CheckInput&)>;

/// Builtin theorem ids in suite order.
const std::vector<std::string>& theorem_ids();
bool has_checker(const std::string& id);
/// Installs or replaces the checker for `id`. Used by tests to plant mutant checkers.
void register_checker(const std::string& id, Checker checker);
/// Restores the builtin checker table.
void reset_checkers();
/// Throws ConfigError("theorem", "unknown theorem id ...") for ids without a checker.
CheckReport check(const std::string& theorem_id, const CheckInput& input);

/// Parses {"measure", "f", "g", "weights", "F", "G", "options", "tolerance", "seed", "quadrature"}.
CheckInput check_input_from_json(const json& j, const QuadratureSpec& defaults, const std::string& field = "config");

/// Echo of the inputs in the check-config schema (measure, f, g, weights, F, G, options).
json describe_input(const CheckInput& in);

/// Randomized inputs satisfying the hypotheses of `theorem_id` by construction.
std::vector<CheckInput> corpus_instances(const std::string& theorem_id, std::size_t count, std::uint64_t seed,
                                         const QuadratureSpec& spec);

/// σ ↦ ∫ h(σ_1 x_1, …, σ_d x_d) dγ(x) on a tensor grid of σ values; forward differences along each axis.
struct MonotonicityProbe {
  std::vector<double> sigmas;
  double min_difference = 0.0;
  double max_difference = 0.0;
  double error = 0.0;
  json to_json() const;
};
MonotonicityProbe coord_increase_probe(const FunctionSpec& h, const std::vector<double>& sigmas,
                                       const QuadratureSpec& spec);

struct SuiteConfig {
  std::vector<std::string> theorems;  // ids or prefixes ending in '*'
  std::size_t instances = 200;
  std::uint64_t seed = 20240601;
  QuadratureSpec spec;
  std::optional<double> tolerance;
  std::vector<json> checks;          // explicit {"theorem", ...check input...} entries
  std::vector<std::string> mutants;  // ids whose margin is sign-flipped (harness self-test)

  static SuiteConfig from_json(const json& j);
  static SuiteConfig defaults();
};

struct SuiteResult {
  std::vector<CheckReport> reports;
  json summary;
  std::size_t fail_count() const;
  int exit_code() const { return fail_count() > 0 ? 1 : 0; }
  json to_json() const;
};

SuiteResult run_suite(const SuiteConfig& config);

/// Expands '*' prefixes against `theorem_ids()`.
std::vector<std::string> expand_theorem_ids(const std::vector<std::string>& patterns);

}  // namespace covlab
