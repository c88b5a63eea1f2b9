#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "covlab/cli.hpp"
#include "covlab/spec.hpp"
#include "doctest.h"

using covlab::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "covlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = covlab::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string source(const std::string& rel) { return std::string(COVLAB_SOURCE_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check writes a report") {
    const Run r = run({"check", "--theorem", "T1.2.1", "--config", source("configs/examples/t121_linear.json")});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("theorem_id") == "T1.2.1");
    CHECK(j.at("seed") == 1);
    CHECK(j.contains("spec"));
    CHECK(std::abs(j.at("margin").get<double>()) <= 1e-9);
  }

  TEST_CASE("seed is explicit even when defaulted") {
    const Run r = run({"check", "--theorem", "C4.7", "--config", source("configs/examples/c47_cubic.json")});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).contains("seed"));
    const Run s = run({"check", "--theorem", "C4.7", "--config", source("configs/examples/c47_cubic.json"), "--seed",
                       "99"});
    CHECK(json::parse(s.out).at("seed") == 99);
  }

  TEST_CASE("usage and configuration errors exit with 2") {
    const Run bad = run({"check", "--theorem", "NOPE", "--config", source("configs/examples/t121_linear.json")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("unknown theorem id") != std::string::npos);
    CHECK(run({"check", "--theorem", "T1.2.1", "--config", "/nonexistent.json"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"kernel-dump", "--measure", R"({"family":"uniform","params":{"lo":1,"hi":0}})"}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }

  TEST_CASE("suite exit codes") {
    CHECK(run({"suite", "--config", source("configs/examples/t15_no_unconditional.json"), "--quiet"}).code == 0);
    CHECK(run({"suite", "--config", source("configs/examples/mutant.json"), "--quiet"}).code == 1);
  }

  TEST_CASE("kernel dump on the unit interval") {
    const Run r = run({"kernel-dump", "--measure", source("configs/examples/uniform01.json"), "--grid", "3"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows.front()[2] == 0.0);
    CHECK(rows.back()[2] == 0.0);
    CHECK(rows[4][0] == doctest::Approx(0.5));
    CHECK(rows[4][2] == doctest::Approx(0.25));
  }

  TEST_CASE("outputs are byte-identical across runs") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / "covlab_cli_a.json").string(), b = (dir / "covlab_cli_b.json").string();
    for (const auto& path : {a, b})
      REQUIRE(run({"check", "--theorem", "C4.7", "--config", source("configs/examples/c47_cubic.json"), "--out",
                   path, "--quiet"})
                  .code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
    std::remove(a.c_str());
    std::remove(b.c_str());

    const Run k1 = run({"kernel-dump", "--measure", R"({"family":"gaussian"})", "--grid", "7"});
    const Run k2 = run({"kernel-dump", "--measure", R"({"family":"gaussian"})", "--grid", "7"});
    CHECK(k1.out == k2.out);
  }

  TEST_CASE("oracle battery") {
    const Run r = run({"oracle-verify", "--seed", "3", "--instances", "20"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("pass") == true);
    CHECK(j.at("seed") == 3);
  }
}
