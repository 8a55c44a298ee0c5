#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hlab/harness.hpp"

using namespace hlab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig quick() {
  ExperimentConfig c;
  c.n = 8;
  c.ladder = {2, 3};
  c.t_final = 0.02;
  c.dt = 2e-3;
  return c;
}

}  // namespace

TEST_CASE("INI configuration") {
  const std::string path = "test_harness.ini";
  {
    std::ofstream out(path);
    out << "[grid]\nn = 8\nL = 3.5\n[potential]\nprofile = bump\nwidth = 0.9\nbeta = 0.15\n"
           "[experiment]\nladder = 2, 4,8\nseed = 42\nthreads = 2\n";
  }
  const ExperimentConfig c = ExperimentConfig::from_ini(path);
  CHECK(c.n == 8);
  CHECK(c.L == 3.5);
  CHECK(c.profile == "bump");
  CHECK(c.beta == 0.15);
  CHECK(c.ladder == std::vector<long>{2, 4, 8});
  CHECK(c.seed == 42);
  CHECK(c.dim == 1);
  CHECK(c.to_json()["experiment"]["ladder"].size() == 3);
  {
    std::ofstream out(path);
    out << "[potential]\nbeta = 0.5\n";
  }
  CHECK_THROWS_AS(ExperimentConfig::from_ini(path), InvalidArgument);
  {
    std::ofstream out(path);
    out << "[grid]\nn = many\n";
  }
  CHECK_THROWS_AS(ExperimentConfig::from_ini(path), FormatError);
  {
    std::ofstream out(path);
    out << "[experiment]\nladder = 2,x\n";
  }
  CHECK_THROWS_AS(ExperimentConfig::from_ini(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.xi1 = 0.6;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.ladder = {1};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.n = 7;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("CSV formatting") {
  const std::vector<ReportRow> rows{{"exp", "a", 4, 2, 0.1, "metric", 1.0 / 3.0}};
  const std::string csv = to_csv(rows);
  CHECK(csv == "experiment,id,N,K,t,metric,value\nexp,a,4,2,0.10000000000000001,metric,0.33333333333333331\n");
  write_csv("test_rows.csv", rows);
  CHECK(slurp("test_rows.csv") == csv);
  std::remove("test_rows.csv");
}

TEST_CASE("collision-limit experiment") {
  ExperimentConfig c = quick();
  c.ladder = {4, 16, 64};
  const Report r = run_collision_limit(c);
  CHECK(r.complete);
  std::vector<double> weighted;
  double oracle = -1.0;
  for (const auto& row : r.rows) {
    if (row.metric == "main_minus_gp_hs") weighted.push_back(row.value);
    if (row.metric == "fourier_oracle_rel") oracle = row.value;
  }
  REQUIRE(weighted.size() == 3);
  CHECK(weighted[2] < weighted[0]);
  CHECK(oracle >= 0.0);
  CHECK(oracle < 1e-9);
}

TEST_CASE("convergence experiment is deterministic across thread counts") {
  ExperimentConfig c = quick();
  const Report a = run_convergence(c);
  CHECK(a.complete);
  CHECK_FALSE(a.rows.empty());
  c.threads = 2;
  const Report b = run_convergence(c);
  CHECK(to_csv(a.rows) == to_csv(b.rows));
  c.seed = 2;
  CHECK(to_csv(run_convergence(c).rows) != to_csv(a.rows));
}

TEST_CASE("a failing ladder entry yields a partial report") {
  ExperimentConfig c = quick();
  c.ladder = {2, 40};
  const Report r = run_convergence(c);
  CHECK_FALSE(r.complete);
  CHECK_FALSE(r.error.empty());
  bool saw_two = false;
  for (const auto& row : r.rows) {
    CHECK(row.N != 40);
    saw_two = saw_two || row.N == 2;
  }
  CHECK(saw_two);
}

TEST_CASE("conservation experiment and manifest") {
  ExperimentConfig c = quick();
  c.m_max = 1;
  const Report r = run_conservation(c);
  CHECK(r.complete);
  bool drift = false;
  for (const auto& row : r.rows) {
    if (row.metric == "K1_rel_drift") {
      drift = true;
      CHECK(row.value < 1e-7);
    }
  }
  CHECK(drift);
  write_manifest("test_manifest.json", c, r, {{"note", "unit"}});
  const auto j = nlohmann::json::parse(slurp("test_manifest.json"));
  CHECK(j.contains("config"));
  CHECK(j.contains("versions"));
  std::remove("test_manifest.json");
}
