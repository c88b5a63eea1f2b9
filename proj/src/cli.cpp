#include "covlab/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "covlab/errors.hpp"
#include "covlab/kernels.hpp"
#include "covlab/measures.hpp"
#include "covlab/oracle.hpp"
#include "covlab/theorem_suite.hpp"

namespace covlab {

namespace {

struct Options {
  std::string theorem;
  std::string config;
  std::string out;
  std::string measure;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::size_t grid = 200;
  std::size_t instances = 500;
  bool quiet = false;
};

json read_json_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(field, "'" + path + "' is not valid JSON: " + e.what());
  }
}

// Accepts either a path or an inline JSON object.
json read_json_argument(const std::string& arg, const std::string& field) {
  if (!arg.empty() && arg.front() == '{') {
    try {
      return json::parse(arg);
    } catch (const json::parse_error& e) {
      throw ConfigError(field, std::string("inline JSON is invalid: ") + e.what());
    }
  }
  return read_json_file(arg, field);
}

void emit(const std::string& text, const Options& o, std::ostream& out) {
  if (o.out.empty() || o.out == "-") {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot write '" + o.out + "'");
  f << text;
}

int run_check(const Options& o, std::ostream& out) {
  json cfg = o.config.empty() ? json::object() : read_json_file(o.config, "config");
  if (!cfg.is_object()) throw ConfigError("config", "must be a JSON object");
  std::string id = o.theorem;
  if (id.empty()) {
    if (!cfg.contains("theorem") || !cfg.at("theorem").is_string())
      throw ConfigError("theorem", "is required (--theorem or config.theorem)");
    id = cfg.at("theorem").get<std::string>();
  }
  if (!has_checker(id)) throw ConfigError("theorem", "unknown theorem id '" + id + "'");
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.tol) cfg["tolerance"] = *o.tol;
  const CheckInput in = check_input_from_json(cfg, QuadratureSpec{});
  const CheckReport r = check(id, in);
  emit(r.to_json().dump(2) + "\n", o, out);
  if (!o.quiet && !o.out.empty() && o.out != "-")
    out << id << " " << verdict_name(r.verdict) << " margin=" << r.margin << " seed=" << r.seed << "\n";
  return r.verdict == Verdict::fail ? 1 : 0;
}

int run_suite_command(const Options& o, std::ostream& out) {
  json cfg = o.config.empty() ? json::object() : read_json_file(o.config, "config");
  if (!cfg.is_object()) throw ConfigError("config", "must be a JSON object");
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.tol) cfg["tolerance"] = *o.tol;
  const SuiteResult res = run_suite(SuiteConfig::from_json(cfg));
  const bool to_file = !o.out.empty() && o.out != "-";
  if (to_file) emit(res.to_json().dump(2) + "\n", o, out);
  if (!o.quiet || !to_file) out << (to_file ? res.summary : res.to_json()).dump(2) << "\n";
  return res.exit_code();
}

int run_kernel_dump(const Options& o, std::ostream& out) {
  if (o.measure.empty()) throw ConfigError("measure", "is required");
  if (o.grid < 2) throw ConfigError("grid", "must be at least 2");
  const Measure1D m = Measure1D::from_json(read_json_argument(o.measure, "measure"));
  std::ostringstream csv;
  write_kernel_csv(csv, HoeffdingKernel(m), o.grid);
  emit(csv.str(), o, out);
  return 0;
}

int run_oracle(const Options& o, std::ostream& out) {
  const std::uint64_t seed = o.seed.value_or(42);
  const auto lines = oracle::verify_battery(seed, o.instances);
  json arr = json::array();
  bool ok = true;
  for (const auto& l : lines) {
    ok = ok && l.pass();
    arr.push_back({{"identity", l.identity},
                   {"instances", l.instances},
                   {"max_residual", l.max_residual},
                   {"tolerance", l.tolerance},
                   {"pass", l.pass()}});
  }
  const json doc{{"seed", seed}, {"instances", o.instances}, {"pass", ok}, {"identities", arr}};
  emit(doc.dump(2) + "\n", o, out);
  if (!o.quiet && !o.out.empty() && o.out != "-")
    for (const auto& l : lines)
      out << (l.pass() ? "PASS " : "FAIL ") << l.identity << " max_residual=" << l.max_residual << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"covlab: covariance inequality verification"};
  app.require_subcommand(1);
  Options o;

  auto* check_cmd = app.add_subcommand("check", "Run one theorem checker on a JSON config");
  check_cmd->add_option("--theorem", o.theorem, "Theorem id, e.g. T1.2.1");
  check_cmd->add_option("--config", o.config, "Check config (JSON)");

  auto* suite_cmd = app.add_subcommand("suite", "Run the randomized theorem suite");
  suite_cmd->add_option("--config", o.config, "Suite config (JSON); defaults apply when omitted");

  auto* dump_cmd = app.add_subcommand("kernel-dump", "Write the Hoeffding kernel of a measure as CSV");
  dump_cmd->add_option("--measure", o.measure, "Measure JSON (path or inline object)")->required();
  dump_cmd->add_option("--grid", o.grid, "Grid points per axis");

  auto* oracle_cmd = app.add_subcommand("oracle-verify", "Run the exact discrete identity battery");
  oracle_cmd->add_option("--instances", o.instances, "Instances per identity");

  for (auto* sub : {check_cmd, suite_cmd, dump_cmd, oracle_cmd}) {
    sub->add_option("--out", o.out, "Output path (stdout when omitted)");
    sub->add_flag("--quiet", o.quiet, "Suppress the console summary");
  }
  for (auto* sub : {check_cmd, suite_cmd, oracle_cmd}) sub->add_option("--seed", o.seed, "Seed override");
  for (auto* sub : {check_cmd, suite_cmd}) sub->add_option("--tol", o.tol, "Tolerance override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*check_cmd) return run_check(o, out);
    if (*suite_cmd) return run_suite_command(o, out);
    if (*dump_cmd) return run_kernel_dump(o, out);
    return run_oracle(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace covlab
