#include "covlab/theorem_suite.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <utility>

#include "checkers.hpp"
#include "covlab/builtins.hpp"
#include "covlab/errors.hpp"
#include "covlab/parallel.hpp"
#include "covlab/quadrature.hpp"

namespace covlab {

namespace {

// Stable per-theorem stream so that a subset run reproduces the instances of a full run.
std::uint64_t theorem_stream(const std::string& id) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : id) h = (h ^ c) * 1099511628211ull;
  return h;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::hypothesis_failed: return "HYPOTHESIS_FAILED";
    case Verdict::inconclusive: return "NUMERICALLY_INCONCLUSIVE";
  }
  return "?";
}

Verdict decide_verdict(bool hypotheses_pass, double margin, double tolerance, double error) {
  if (!hypotheses_pass) return Verdict::hypothesis_failed;
  if (!std::isfinite(margin)) return Verdict::inconclusive;
  if (margin < -tolerance) return Verdict::fail;
  if (std::abs(margin) <= tolerance && error > std::abs(margin)) return Verdict::inconclusive;
  return Verdict::pass;
}

bool CheckReport::hypotheses_pass() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(), [](const Hypothesis& h) { return h.pass; });
}

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json CheckReport::to_json() const {
  json hyps = json::array();
  for (const auto& h : hypotheses) hyps.push_back(h.to_json());
  return json{{"theorem_id", theorem_id},
              {"hypotheses", hyps},
              {"lhs", number(lhs)},
              {"rhs", number(rhs)},
              {"margin", number(margin)},
              {"error", number(error)},
              {"tolerance", number(tolerance)},
              {"monte_carlo", monte_carlo},
              {"verdict", verdict_name(verdict)},
              {"seed", seed},
              {"spec", spec.to_json()},
              {"input", input},
              {"diagnostics", diagnostics}};
}

// ---- Registry ----------------------------------------------------------------------------------

namespace {

struct Registry {
  std::mutex guard;
  std::map<std::string, Checker> table = detail::builtin_checkers();
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids{"T1.1.1", "T1.1.2", "T1.1.3", "T1.2.1", "T1.2.2", "T1.2.3", "T1.3",
                                            "C1.4",   "T1.5",   "T1.8.1", "T1.8.2", "T1.9.1", "T1.9.2", "C1.10.1",
                                            "C1.10.2", "T4.3",  "C4.7",   "T5.3",   "EX9.1",  "EX9.2",  "TA.1"};
  return ids;
}

bool has_checker(const std::string& id) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.guard);
  return r.table.count(id) > 0;
}

void register_checker(const std::string& id, Checker checker) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.guard);
  r.table[id] = std::move(checker);
}

void reset_checkers() {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.guard);
  r.table = detail::builtin_checkers();
}

CheckReport check(const std::string& theorem_id, const CheckInput& input) {
  Checker c;
  {
    auto& r = registry();
    std::lock_guard<std::mutex> lock(r.guard);
    const auto it = r.table.find(theorem_id);
    if (it == r.table.end()) throw ConfigError("theorem", "unknown theorem id '" + theorem_id + "'");
    c = it->second;
  }
  return c(input);
}

// ---- Input parsing --------------------------------------------------------------------------------

namespace {

FunctionSpec parse_function(const json& j, std::size_t d, const std::vector<Weight>* w, const std::string& field) {
  if (j.is_string()) {
    try {
      FunctionSpec f = parse_expression(j.get<std::string>(), d);
      f.set_source(json{{"expr", j.get<std::string>()}});
      return f;
    } catch (const ConfigError& e) {
      throw ConfigError(field, e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field, e.what());
    }
  }
  return function_from_json(j, d, w, field);
}

}  // namespace

json describe_input(const CheckInput& in) {
  json echo{{"measure", in.mu.to_json()}};
  if (in.f.valid()) echo["f"] = in.f.source();
  if (in.g.valid()) echo["g"] = in.g.source();
  if (!in.weights.empty()) {
    json ws = json::array();
    for (const auto& w : in.weights) ws.push_back(w.source());
    echo["weights"] = ws;
  }
  for (const auto* tuple : {&in.F, &in.G}) {
    if (tuple->empty()) continue;
    json arr = json::array();
    for (const auto& h : *tuple) arr.push_back(h.source());
    echo[tuple == &in.F ? "F" : "G"] = arr;
  }
  if (!in.options.empty()) echo["options"] = in.options;
  return echo;
}

CheckInput check_input_from_json(const json& j, const QuadratureSpec& defaults, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "must be an object");
  static const std::set<std::string> known{"theorem", "measure", "f", "g", "F", "G", "weights", "options",
                                           "tolerance", "seed", "quadrature", "label", "corpus"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(field + "." + key, "unknown key");
  CheckInput in;
  in.spec = j.contains("quadrature") ? QuadratureSpec::from_json(j.at("quadrature"), defaults) : defaults;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError(field + ".seed", "must be a non-negative integer");
    in.spec.seed = j.at("seed").get<std::uint64_t>();
  }
  in.spec.validate();
  in.seed = in.spec.seed;
  if (!j.contains("measure")) throw ConfigError(field + ".measure", "is required");
  in.mu = ProductMeasure::from_json(j.at("measure"), field + ".measure");
  const std::size_t d = in.mu.dim();
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    for (std::size_t i = 0; i < d; ++i) {
      const json& wi = w.is_array() ? w.at(std::min(i, w.size() - 1)) : w;
      in.weights.push_back(
          weight_from_json(wi, in.mu.factor(i), i, in.spec, field + ".weights[" + std::to_string(i) + "]"));
    }
    if (w.is_array() && w.size() != d) throw ConfigError(field + ".weights", "need one weight per coordinate");
  }
  // Functions built on the primitives of unit weights still parse when no weights are given.
  const std::vector<Weight> units = unit_weights(in.mu);
  const std::vector<Weight>* wp = in.weights.empty() ? &units : &in.weights;
  if (j.contains("f")) in.f = parse_function(j.at("f"), d, wp, field + ".f");
  if (j.contains("g")) in.g = parse_function(j.at("g"), d, wp, field + ".g");
  for (const char* key : {"F", "G"}) {
    if (!j.contains(key)) continue;
    const json& arr = j.at(key);
    if (!arr.is_array()) throw ConfigError(field + "." + key, "must be an array of functions");
    auto& out = std::string(key) == "F" ? in.F : in.G;
    for (std::size_t k = 0; k < arr.size(); ++k)
      out.push_back(parse_function(arr[k], d, wp, field + "." + key + "[" + std::to_string(k) + "]"));
  }
  if (j.contains("options")) {
    if (!j.at("options").is_object()) throw ConfigError(field + ".options", "must be an object");
    in.options = j.at("options");
  }
  if (j.contains("tolerance")) {
    if (!j.at("tolerance").is_number() || !(j.at("tolerance").get<double>() >= 0.0))
      throw ConfigError(field + ".tolerance", "must be a non-negative number");
    in.tolerance = j.at("tolerance").get<double>();
  }
  json echo = describe_input(in);
  if (j.contains("label")) echo["label"] = j.at("label");
  if (j.contains("corpus")) echo["corpus"] = j.at("corpus");
  in.echo = echo;
  return in;
}

// ---- Scale-mixture monotonicity probe --------------------------------------------------------------

json MonotonicityProbe::to_json() const {
  return json{{"sigmas", sigmas}, {"min_difference", min_difference}, {"max_difference", max_difference},
              {"error", error}};
}

MonotonicityProbe coord_increase_probe(const FunctionSpec& h, const std::vector<double>& sigmas,
                                       const QuadratureSpec& spec) {
  if (sigmas.size() < 2) throw ConfigError("options.sigmas", "need at least two values");
  for (std::size_t k = 0; k < sigmas.size(); ++k)
    if (!(sigmas[k] > 0.0) || (k > 0 && !(sigmas[k] > sigmas[k - 1])))
      throw ConfigError("options.sigmas", "must be positive and strictly increasing");
  const std::size_t d = h.dim(), n = sigmas.size();
  const ProductMeasure gamma(Measure1D::gaussian(0.0, 1.0), d);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= n;
  auto index = [&](std::size_t k, std::size_t axis) {
    for (std::size_t i = 0; i + 1 < d - axis; ++i) k /= n;
    return k % n;
  };
  std::vector<Estimate> values(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> s(d);
    for (std::size_t i = 0; i < d; ++i) s[i] = sigmas[index(k, i)];
    values[k] = expectation(
        gamma,
        [&h, s](Point x) {
          std::vector<double> y(x.size());
          for (std::size_t i = 0; i < x.size(); ++i) y[i] = s[i] * x[i];
          return h(y);
        },
        spec);
  }
  MonotonicityProbe p;
  p.sigmas = sigmas;
  p.min_difference = std::numeric_limits<double>::infinity();
  p.max_difference = -std::numeric_limits<double>::infinity();
  std::size_t stride = 1;
  for (std::size_t axis = d; axis-- > 0;) {
    for (std::size_t k = 0; k < total; ++k) {
      if (index(k, axis) + 1 >= n) continue;
      const double diff = values[k + stride].value - values[k].value;
      p.min_difference = std::min(p.min_difference, diff);
      p.max_difference = std::max(p.max_difference, diff);
      p.error = std::max(p.error, values[k + stride].error + values[k].error);
    }
    stride *= n;
  }
  return p;
}

// ---- Suite ----------------------------------------------------------------------------------------

std::vector<std::string> expand_theorem_ids(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  auto add = [&](const std::string& id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  for (const auto& p : patterns) {
    if (p == "all" || p == "*") {
      for (const auto& id : theorem_ids()) add(id);
    } else if (!p.empty() && p.back() == '*') {
      const std::string prefix = p.substr(0, p.size() - 1);
      bool any = false;
      for (const auto& id : theorem_ids())
        if (id.rfind(prefix, 0) == 0) {
          add(id);
          any = true;
        }
      if (!any) throw ConfigError("theorems", "pattern '" + p + "' matches no theorem id");
    } else {
      if (!has_checker(p)) throw ConfigError("theorems", "unknown theorem id '" + p + "'");
      add(p);
    }
  }
  return out;
}

SuiteConfig SuiteConfig::defaults() {
  SuiteConfig c;
  c.theorems = theorem_ids();
  c.spec.order = 32;
  c.spec.panels = 4;
  c.spec.max_tensor_nodes = 300000;
  return c;
}

SuiteConfig SuiteConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "must be an object");
  static const std::set<std::string> known{"theorems", "instances", "seed", "quadrature", "tolerance", "checks",
                                           "mutants"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(key, "unknown key");
  SuiteConfig c = defaults();
  try {
    if (j.contains("quadrature")) c.spec = QuadratureSpec::from_json(j.at("quadrature"), c.spec);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed", "must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("instances")) {
      if (!j.at("instances").is_number_unsigned()) throw ConfigError("instances", "must be a non-negative integer");
      c.instances = j.at("instances").get<std::size_t>();
    }
    if (j.contains("theorems")) {
      const json& t = j.at("theorems");
      if (t.is_string()) {
        c.theorems = {t.get<std::string>()};
      } else if (t.is_array() && std::all_of(t.begin(), t.end(), [](const json& x) { return x.is_string(); })) {
        c.theorems = t.get<std::vector<std::string>>();
      } else {
        throw ConfigError("theorems", "must be a string or an array of strings");
      }
    }
    if (j.contains("tolerance")) {
      if (!j.at("tolerance").is_number()) throw ConfigError("tolerance", "must be a number");
      c.tolerance = j.at("tolerance").get<double>();
    }
    if (j.contains("checks")) {
      if (!j.at("checks").is_array()) throw ConfigError("checks", "must be an array");
      for (const auto& x : j.at("checks")) c.checks.push_back(x);
    }
    if (j.contains("mutants")) {
      if (!j.at("mutants").is_array()) throw ConfigError("mutants", "must be an array of theorem ids");
      c.mutants = j.at("mutants").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError("config", e.what());
  }
  c.spec.validate();
  c.theorems = expand_theorem_ids(c.theorems);
  for (const auto& m : c.mutants)
    if (!has_checker(m)) throw ConfigError("mutants", "unknown theorem id '" + m + "'");
  return c;
}

std::size_t SuiteResult::fail_count() const {
  return static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [](const CheckReport& r) { return r.verdict == Verdict::fail; }));
}

json SuiteResult::to_json() const {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  return json{{"reports", arr}, {"summary", summary}};
}

namespace {

// The sign-flipped twin of a report: used to prove that the harness can fail.
CheckReport mutate(CheckReport r) {
  std::swap(r.lhs, r.rhs);
  r.margin = -r.margin;
  r.verdict = decide_verdict(r.hypotheses_pass(), r.margin, r.tolerance, r.error);
  r.diagnostics["mutant"] = true;
  return r;
}

struct Job {
  std::string id;
  CheckInput input;
};

}  // namespace

SuiteResult run_suite(const SuiteConfig& config) {
  // Corpus generation, one task per theorem.
  std::vector<std::vector<CheckInput>> generated(config.theorems.size());
  parallel_for(config.theorems.size(), [&](std::size_t k) {
    const std::string& id = config.theorems[k];
    generated[k] = corpus_instances(id, config.instances, derive_seed(config.seed, theorem_stream(id)), config.spec);
  });
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < config.theorems.size(); ++k)
    for (auto& in : generated[k]) jobs.push_back({config.theorems[k], std::move(in)});
  for (std::size_t k = 0; k < config.checks.size(); ++k) {
    const json& cj = config.checks[k];
    const std::string field = "checks[" + std::to_string(k) + "]";
    if (!cj.is_object() || !cj.contains("theorem") || !cj.at("theorem").is_string())
      throw ConfigError(field + ".theorem", "is required");
    const std::string id = cj.at("theorem").get<std::string>();
    if (!has_checker(id)) throw ConfigError(field + ".theorem", "unknown theorem id '" + id + "'");
    QuadratureSpec spec = config.spec;
    spec.seed = derive_seed(config.seed, 1000 + k);
    jobs.push_back({id, check_input_from_json(cj, spec, field)});
  }
  for (auto& job : jobs)
    if (config.tolerance && !job.input.tolerance) job.input.tolerance = config.tolerance;

  const std::set<std::string> mutants(config.mutants.begin(), config.mutants.end());
  SuiteResult result;
  result.reports.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t k) {
    const Job& job = jobs[k];
    CheckReport r;
    try {
      r = check(job.id, job.input);
    } catch (const NumericalError& e) {
      r.theorem_id = job.id;
      r.seed = job.input.seed;
      r.spec = job.input.spec;
      r.input = job.input.echo;
      r.lhs = r.rhs = r.margin = r.error = r.tolerance = std::nan("");
      r.verdict = Verdict::inconclusive;
      r.diagnostics["numerical_error"] = e.what();
    }
    if (mutants.count(job.id)) r = mutate(std::move(r));
    result.reports[k] = std::move(r);
  });

  json counts = json::object();
  for (Verdict v : {Verdict::pass, Verdict::fail, Verdict::hypothesis_failed, Verdict::inconclusive})
    counts[verdict_name(v)] = 0;
  json by_theorem = json::object();
  for (const auto& r : result.reports) {
    counts[verdict_name(r.verdict)] = counts[verdict_name(r.verdict)].get<std::size_t>() + 1;
    json& t = by_theorem[r.theorem_id];
    if (t.is_null()) t = json::object();
    t[verdict_name(r.verdict)] = t.value(verdict_name(r.verdict), std::size_t{0}) + 1;
  }
  result.summary = json{{"total", result.reports.size()},
                        {"counts", counts},
                        {"by_theorem", by_theorem},
                        {"fail_count", result.fail_count()},
                        {"seed", config.seed},
                        {"instances", config.instances},
                        {"theorems", config.theorems},
                        {"mutants", config.mutants},
                        {"spec", config.spec.to_json()}};
  return result;
}

}  // namespace covlab
