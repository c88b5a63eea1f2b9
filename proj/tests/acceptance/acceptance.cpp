// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "covlab/builtins.hpp"
#include "covlab/determinantal.hpp"
#include "covlab/kernels.hpp"
#include "covlab/oracle.hpp"
#include "covlab/product_identities.hpp"
#include "covlab/relations1d.hpp"
#include "covlab/theorem_suite.hpp"

using namespace covlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::vector<Measure1D> families() {
  return {Measure1D::gaussian(0.3, 1.7),
          Measure1D::uniform(-1.0, 2.0),
          Measure1D::exponential(1.5),
          Measure1D::logistic(-0.5, 0.8),
          Measure1D::discrete({{-1.0, 0.2}, {0.0, 0.3}, {0.5, 0.1}, {2.0, 0.4}}),
          Measure1D::gaussian_scale_mixture({{0.5, 1.0}, {1.5, 2.0}}),
          Measure1D::grid_density({-1.0, 0.0, 1.0, 2.0}, {0.2, 1.0, 0.5, 0.1})};
}

// Random functions are written as expressions in the standardized variable z = (x − mean)/sd,
// which keeps every corpus member O(1) and integrable under each family.
class Corpus {
 public:
  explicit Corpus(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  const Measure1D& family(const std::vector<Measure1D>& fs) {
    return fs[static_cast<std::size_t>(integer(0, static_cast<int>(fs.size()) - 1))];
  }

  static std::string z(const Measure1D& m, const std::string& var = "x") {
    std::ostringstream os;
    os.precision(17);
    os << "((" << var << "-(" << m.mean() << "))/" << std::sqrt(m.variance()) << ")";
    return os.str();
  }

  std::string smooth(const std::string& z) {
    std::ostringstream os;
    os.precision(17);
    const double a = uniform(0.3, 1.5), c = uniform(0.5, 2.0) * (integer(0, 1) ? 1 : -1);
    switch (integer(0, 6)) {
      case 0: os << c << "*" << z; break;
      case 1: os << c << "*" << z << "^2"; break;
      case 2: os << c << "*" << z << "^3"; break;
      case 3: os << c << "*sin(" << a << "*" << z << ")"; break;
      case 4: os << c << "*tanh(" << a << "*" << z << ")"; break;
      case 5: os << c << "*exp(" << 0.3 * a << "*" << z << ")"; break;
      default: os << c << "*exp(-" << a << "*" << z << "^2)"; break;
    }
    return os.str();
  }

  std::string positive(const std::string& z) {
    std::ostringstream os;
    os.precision(17);
    const double a = uniform(0.3, 1.2), c = uniform(0.5, 2.0);
    switch (integer(0, 4)) {
      case 0: os << c << "*exp(" << 0.3 * a << "*" << z << ")"; break;
      case 1: os << c << "*(1+" << a << "*" << z << "^2)"; break;
      case 2: os << c << "*(2+sin(" << a << "*" << z << "))"; break;
      case 3: os << c << "*exp(-" << a << "*" << z << "^2)"; break;
      default: os << c << "*cosh(" << 0.3 * a << "*" << z << ")"; break;
    }
    return os.str();
  }

  std::string even_positive(const std::string& z) {
    std::ostringstream os;
    os.precision(17);
    const double a = uniform(0.3, 1.2), c = uniform(0.5, 2.0);
    switch (integer(0, 2)) {
      case 0: os << c << "*(1+" << a << "*" << z << "^2)"; break;
      case 1: os << c << "*exp(-" << a << "*" << z << "^2)"; break;
      default: os << c << "*cosh(" << 0.3 * a << "*" << z << ")"; break;
    }
    return os.str();
  }

  std::string convex(const std::string& z) {
    std::ostringstream os;
    os.precision(17);
    os << uniform(-1.0, 1.0) << "*" << z << "+" << uniform(0.0, 1.0) << "*" << z << "^2";
    if (integer(0, 1)) os << "+" << uniform(0.2, 1.0) << "*sqrt(1+(" << z << "-" << uniform(-1, 1) << ")^2)";
    if (integer(0, 1)) os << "+" << uniform(0.2, 1.0) << "*exp(" << uniform(0.05, 0.3) << "*" << z << ")";
    if (integer(0, 1)) os << "+" << uniform(0.2, 1.0) << "*log(1+exp(" << uniform(0.3, 1.5) << "*" << z << "))";
    return os.str();
  }

 private:
  std::mt19937_64 rng_;
};

FunctionSpec e1(const std::string& t) { return parse_expression(t, 1); }

const oracle::BatteryLine* find_line(const std::vector<oracle::BatteryLine>& lines, const std::string& id) {
  for (const auto& l : lines)
    if (l.identity == id) return &l;
  return nullptr;
}

// ---------------------------------------------------------------------------------------------

Outcome hoeffding(const std::vector<oracle::BatteryLine>& battery) {
  QuadratureSpec spec;
  spec.trunc_eps = 1e-14;
  Corpus c(101);
  const auto fs = families();
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Measure1D& m = c.family(fs);
    const std::string z = Corpus::z(m);
    const HoeffdingResult r = hoeffding_identity(m, e1(c.smooth(z)), e1(c.smooth(z)), spec);
    worst = std::max(worst, std::abs(r.lhs.value - r.rhs.value));
  }
  const double elapsed = seconds_since(t0);
  const auto* line = find_line(battery, "hoeffding");
  const bool ok = worst <= 1e-7 && elapsed < 10.0 && line && line->instances == 500 && line->max_residual <= 1e-12;
  return {ok, "continuous max residual " + fmt(worst) + " in " + fmt(elapsed) + " s; oracle max residual " +
                  fmt(line ? line->max_residual : NAN) + " over 500"};
}

Outcome kernel_mass_all() {
  QuadratureSpec spec;
  spec.trunc_eps = 1e-14;
  bool ok = true;
  double worst = 0.0;
  for (const auto& m : families()) {
    const Estimate mass = kernel_mass(HoeffdingKernel(m), spec);
    const double gap = std::abs(mass.value - m.variance());
    worst = std::max(worst, gap);
    if (gap > std::max(1e-8, mass.error)) ok = false;
  }
  return {ok, "worst |mass - Var| " + fmt(worst) + " over " + std::to_string(families().size()) + " families"};
}

Outcome total_positivity() {
  bool ok = true;
  double worst = 1.0;
  for (const auto& m : families())
    for (std::size_t n = 2; n <= 4; ++n) {
      const MinorReport r = tp_minor_check(HoeffdingKernel(m), n, 2000, 7 + n);
      worst = std::min(worst, r.worst);
      if (!r.pass || r.worst < -1e-10) ok = false;
    }
  return {ok, "smallest normalized minor " + fmt(worst) + " (2000 per order and family)"};
}

Outcome andreev(const std::vector<oracle::BatteryLine>& battery) {
  QuadratureSpec spec;
  spec.trunc_eps = 1e-13;
  Corpus c(202);
  const auto fs = families();
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Measure1D& m = c.family(fs);
    const std::string z = Corpus::z(m);
    const std::size_t n = static_cast<std::size_t>(c.integer(1, 3));
    std::vector<FunctionSpec> f, g;
    for (std::size_t i = 0; i < n; ++i) {
      f.push_back(e1(c.smooth(z)));
      g.push_back(e1(c.smooth(z)));
    }
    const AndreevResult r = andreev_lhs_rhs(m, f, g, spec);
    worst = std::max(worst, std::abs(r.residual()));
  }
  const auto* line = find_line(battery, "andreev");
  const bool ok = worst <= 1e-8 && line && line->max_residual <= 1e-12;
  return {ok, "continuous max residual " + fmt(worst) + " over 100; oracle " + fmt(line ? line->max_residual : NAN)};
}

Outcome line_convex() {
  QuadratureSpec spec;
  Corpus c(303);
  bool ok = true;
  std::string detail;

  CheckInput lin;
  lin.mu = ProductMeasure({Measure1D::uniform(0.0, 1.0)});
  lin.f = e1("2*x+1");
  lin.g = e1("3*x-0.5");
  const double eq = check("T1.2.1", lin).margin;
  if (std::abs(eq) > 1e-9) ok = false;

  double worst = INFINITY;
  std::size_t non_pass = 0;
  for (const auto& m : families()) {
    const std::string z = Corpus::z(m);
    for (int k = 0; k < 200; ++k) {
      CheckInput in;
      in.mu = ProductMeasure({m});
      in.f = e1(c.convex(z));
      in.g = e1(c.convex(z));
      const CheckReport r = check("T1.2.1", in);
      worst = std::min(worst, r.margin);
      if (r.verdict != Verdict::pass) ++non_pass;
      if (r.margin < -1e-6 || r.verdict == Verdict::fail) ok = false;
    }
  }

  CheckInput cubic;
  cubic.mu = ProductMeasure({Measure1D::uniform(-1.0, 1.0)});
  cubic.f = cubic.g = e1("x^3");
  const CheckReport c47 = check("C4.7", cubic);
  if (std::abs(c47.margin - (1.0 / 7.0 - 3.0 / 25.0)) > 1e-6) ok = false;
  detail = "linear margin " + fmt(eq) + "; min convex margin " + fmt(worst) + " (" + std::to_string(non_pass) +
           " non-PASS of 1400); C4.7 margin " + fmt(c47.margin);
  return {ok, detail};
}

Outcome gaussian_case() {
  CheckInput in;
  in.mu = ProductMeasure({Measure1D::gaussian(0.0, 1.0)});
  in.f = e1("exp(-x^2)");
  in.g = e1("x^2");
  const CheckReport r = check("T1.2.2", in);
  const double expected = std::pow(3.0, -1.5) - std::pow(3.0, -0.5);
  const bool ok = std::abs(r.lhs - expected) <= 1e-6 && r.verdict == Verdict::pass;
  return {ok, "Cov = " + fmt(r.lhs) + ", verdict " + verdict_name(r.verdict)};
}

Outcome relations() {
  QuadratureSpec spec;
  Corpus c(404);
  const auto fs = families();
  std::size_t count = 0, bad = 0;
  double worst_ratio = 0.0;
  auto record = [&](double residual, double error) {
    ++count;
    const double tol = std::max(1e-6, 3.0 * error);
    worst_ratio = std::max(worst_ratio, std::abs(residual) / tol);
    if (std::abs(residual) > tol) ++bad;
  };
  for (int k = 0; k < 40; ++k) {
    const Measure1D& m = c.family(fs);
    const std::string z = Corpus::z(m);
    const RelationResult v1 = relation_residual(m, e1(c.smooth(z)), e1(c.smooth(z)), 1, nullptr, spec);
    record(v1.residual(), v1.error());
    const RelationResult v2 = relation_residual(m, e1(c.positive(z)), e1(c.smooth(z)), 2, nullptr, spec);
    record(v2.residual(), v2.error());
    const RelationResult v3 = relation_residual(m, e1(c.positive(z)), e1(c.positive(z)), 3, nullptr, spec);
    record(v3.residual(), v3.error());
    // Weighted variant with a(x) = 1 + b·z².
    const double b = c.uniform(0.1, 1.0), mu0 = m.mean(), sd = std::sqrt(m.variance());
    const Weight w = centered_primitive(
        m, [=](double x) { return 1.0 + b * std::pow((x - mu0) / sd, 2); }, spec, 0,
        [=](double x) { return 2.0 * b * (x - mu0) / (sd * sd); });
    const RelationResult vw = relation_residual(m, e1(c.smooth(z)), e1(c.smooth(z)), 1, &w, spec);
    record(vw.residual(), vw.error());
  }
  // Product relation in two dimensions, all three variants.
  for (int k = 0; k < 30; ++k) {
    const Measure1D& m1 = c.family(fs);
    const Measure1D& m2 = c.family(fs);
    const ProductMeasure mu({m1, m2});
    const std::string z1 = Corpus::z(m1, "x1"), z2 = Corpus::z(m2, "x2");
    const int variant = 1 + k % 3;
    std::string f, g;
    if (variant == 1) {
      f = c.smooth(z1) + "+" + c.smooth(z2) + "+" + c.smooth(z1) + "*" + c.smooth(z2);
      g = c.smooth(z1) + "*" + c.smooth(z2) + "+" + c.smooth(z2);
    } else {
      f = c.positive(z1) + "*" + c.positive(z2);
      g = variant == 2 ? c.smooth(z1) + "+" + c.smooth(z1) + "*" + c.smooth(z2) : c.positive(z1) + "+" + c.positive(z2);
    }
    const ProductRelationResult r =
        product_relation_residual(mu, parse_expression(f, 2), parse_expression(g, 2), variant, {}, spec);
    record(r.residual(), r.error());
  }
  return {bad == 0, std::to_string(count) + " relations, " + std::to_string(bad) +
                        " above tolerance, worst residual/tolerance " + fmt(worst_ratio)};
}

Outcome tensorization() {
  QuadratureSpec spec;
  spec.order = 32;
  spec.panels = 4;
  spec.max_tensor_nodes = 300000;
  Corpus c(505);
  const auto fs = families();
  double worst_tensor = 0.0, worst_dup = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(k % 2);
    std::vector<Measure1D> ms;
    std::vector<std::string> z;
    for (std::size_t i = 0; i < d; ++i) {
      ms.push_back(c.family(fs));
      z.push_back(Corpus::z(ms.back(), "x" + std::to_string(i + 1)));
    }
    const ProductMeasure mu(ms);
    auto random_f = [&] {
      std::string s = c.smooth(z[0]) + "*" + c.smooth(z[1]) + "+" + c.smooth(z[1]);
      if (d == 3) s += "+" + c.smooth(z[2]) + "*" + c.smooth(z[0]);
      return parse_expression(s, d);
    };
    const FunctionSpec f = random_f(), g = random_f();
    const TermDecomposition t = tensorization_decompose(mu, f, g, spec);
    worst_tensor = std::max(worst_tensor, std::abs(t.residual()));
    const TermDecomposition dup = duplication_covariance(mu, f, g, 200000, 1000 + k, spec);
    worst_dup = std::max(worst_dup, std::abs(dup.total.value - t.covariance.value) / dup.total.error);
  }
  const ProductMeasure sq(Measure1D::uniform(0.0, 1.0), 2);
  const FunctionSpec x1x2 = parse_expression("x1*x2", 2);
  const double var = tensorization_decompose(sq, x1x2, x1x2, spec).total.value;
  const bool ok = worst_tensor <= 1e-6 && worst_dup <= 4.0 && std::abs(var - 7.0 / 144.0) <= 1e-9;
  return {ok, "tensorization max residual " + fmt(worst_tensor) + "; duplication max |z| " + fmt(worst_dup) +
                  "; Var(x1 x2) = " + fmt(var)};
}

Outcome suite(double* runtime) {
  std::ifstream in(std::string(COVLAB_SOURCE_DIR) + "/configs/default.json");
  const SuiteConfig cfg = SuiteConfig::from_json(json::parse(in));
  const auto t0 = Clock::now();
  const SuiteResult res = run_suite(cfg);
  *runtime = seconds_since(t0);

  std::ifstream min(std::string(COVLAB_SOURCE_DIR) + "/configs/examples/mutant.json");
  const SuiteResult mutant = run_suite(SuiteConfig::from_json(json::parse(min)));
  const bool ok = res.fail_count() == 0 && *runtime < 600.0 && mutant.fail_count() > 0 && mutant.exit_code() == 1;
  return {ok, std::to_string(res.reports.size()) + " checks, counts " + res.summary.at("counts").dump() + ", " +
                  fmt(*runtime) + " s; mutant exit " + std::to_string(mutant.exit_code())};
}

Outcome quasi_concave() {
  Corpus c(606);
  double worst = 0.0;
  bool ok = true;
  for (int k = 0; k < 40; ++k) {
    std::ostringstream os;
    os.precision(17);
    const double a = c.uniform(0.3, 2.0), h = c.uniform(0.5, 3.0);
    switch (k % 4) {
      case 0: os << h << "*exp(-" << a << "*x^2)"; break;
      case 1: os << h << "/(1+" << a << "*x^2)"; break;
      case 2: os << h << "*max(0,1-" << a << "*abs(x))"; break;
      default: os << h << "*exp(-" << a << "*abs(x)^3)"; break;
    }
    const FunctionSpec f = e1(os.str());
    const std::size_t levels = 200 + 100 * static_cast<std::size_t>(k % 5);
    const double R = 4.0;
    const LayerCake lc = layer_cake_decompose(f, levels, R);
    double err = 0.0;
    for (int i = -2000; i <= 2000; ++i) {
      const double x = R * i / 2000.0;
      err = std::max(err, std::abs(lc.reconstruct(x) - f(x)));
    }
    const double bound = 2.0 * lc.max_value / static_cast<double>(levels);
    worst = std::max(worst, err / bound);
    if (err > bound) ok = false;
  }

  QuadratureSpec spec;
  spec.order = 32;
  spec.panels = 4;
  spec.max_tensor_nodes = 300000;
  std::size_t certified = 0, failed = 0;
  for (const CheckInput& in : corpus_instances("T1.8.2", 30, 77, spec)) {
    const std::size_t d = in.mu.dim();
    for (std::size_t k = 1; k < d; ++k)
      for (const FunctionSpec* h : {&in.f, &in.g})
        for (const Certification& cert : marginal_inheritance(*h, in.mu, k, in.spec)) {
          ++certified;
          if (!cert.pass) ++failed;
        }
  }
  if (failed > 0 || certified == 0) ok = false;
  return {ok, "layer-cake worst error/bound " + fmt(worst) + "; inheritance " + std::to_string(certified - failed) +
                  "/" + std::to_string(certified) + " certifications"};
}

Outcome appendix() {
  QuadratureSpec spec;
  spec.order = 32;
  spec.panels = 4;
  spec.max_tensor_nodes = 300000;
  std::size_t pass = 0, total = 0;
  for (const CheckInput& in : corpus_instances("TA.1", 50, 88, spec)) {
    ++total;
    if (check("TA.1", in).verdict == Verdict::pass) ++pass;
  }
  Corpus c(707);
  double min_convex = INFINITY, max_bump = -INFINITY;
  const std::vector<double> sigmas{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  for (int k = 0; k < 10; ++k) {
    std::ostringstream g, f;
    g.precision(17);
    f.precision(17);
    g << c.uniform(0.1, 1.0) << "*x1^2+" << c.uniform(0.1, 1.0) << "*x2^2+" << c.uniform(0.1, 1.0) << "*exp("
      << c.uniform(0.1, 0.5) << "*(x1-x2))+sqrt(1+(x1+" << c.uniform(-1, 1) << ")^2)";
    if (k % 2)
      f << "exp(-" << c.uniform(0.2, 1.5) << "*x1^2-" << c.uniform(0.2, 1.5) << "*x2^2-" << c.uniform(0.0, 0.5)
        << "*x1^2*x2^2)";
    else
      f << "1/(1+" << c.uniform(0.2, 1.5) << "*x1^2+" << c.uniform(0.2, 1.5) << "*x2^2)";
    min_convex = std::min(min_convex, coord_increase_probe(parse_expression(g.str(), 2), sigmas, spec).min_difference);
    max_bump = std::max(max_bump, coord_increase_probe(parse_expression(f.str(), 2), sigmas, spec).max_difference);
  }
  const bool ok = pass == 50 && total == 50 && min_convex >= -1e-6 && max_bump <= 1e-6;
  return {ok, "TA.1 PASS " + std::to_string(pass) + "/" + std::to_string(total) + "; convex min difference " +
                  fmt(min_convex) + "; quasi-concave max difference " + fmt(max_bump)};
}

}  // namespace

// Optional arguments select criteria by number; all of them run by default.
int main(int argc, char** argv) {
  std::vector<bool> selected(12, argc <= 1);
  for (int k = 1; k < argc; ++k) {
    const int id = std::atoi(argv[k]);
    if (id >= 1 && id <= 11) selected[static_cast<std::size_t>(id)] = true;
  }
  const auto battery = oracle::verify_battery(20240601, 500);
  double suite_runtime = 0.0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Hoeffding identity", [&] { return hoeffding(battery); }},
      {"kernel mass", kernel_mass_all},
      {"total positivity", total_positivity},
      {"Andreev identity", [&] { return andreev(battery); }},
      {"one-dimensional convex inequality", line_convex},
      {"Gaussian analytic case", gaussian_case},
      {"covariance relations", relations},
      {"tensorization and duplication", tensorization},
      {"theorem suite", [&] { return suite(&suite_runtime); }},
      {"quasi-concave machinery", quasi_concave},
      {"mixture checker and monotonicity", appendix},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!selected[k + 1]) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
