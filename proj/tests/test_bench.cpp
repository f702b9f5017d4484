#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lstarf/error.hpp"
#include "lstarf/experiment.hpp"

using namespace lstarf;
using namespace lstarf::bench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lstarf_bench_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Experiment, IdentityNoiselessRecovers) {
  ExperimentSpec s;
  s.m = {6};
  s.n = {6};
  s.r = {1};
  s.op_kind = measure::OperatorKind::Identity;
  s.solvers = {SolverChoice::Path};
  s.trials = 3;
  const auto res = run_experiment(s);
  ASSERT_EQ(res.records.size(), 3u);
  for (const auto& rec : res.records) {
    EXPECT_EQ(rec.l, 36u);
    EXPECT_LE(rec.rel_err, 1e-6);
    EXPECT_EQ(rec.verdict, "success");
    EXPECT_EQ(rec.wall_ms, 0.0);
  }
}

TEST(Experiment, CertifyVerdicts) {
  ExperimentSpec s;
  s.m = {8};
  s.n = {8};
  s.r = {1};
  s.op_kind = measure::OperatorKind::Identity;
  s.solvers = {SolverChoice::Discrepancy};
  s.certify = true;
  s.trials = 2;
  for (const auto& rec : run_experiment(s).records) EXPECT_EQ(rec.verdict, "PASS");
}

TEST(Experiment, CsvIsReproducibleAcrossThreads) {
  const fs::path d = temp_dir("repro");
  ExperimentSpec s;
  s.m = {6};
  s.n = {6};
  s.r = {1, 2};
  s.l = {20, 30};
  s.eps = {0.0, 1e-2};
  s.solvers = {SolverChoice::Dca, SolverChoice::Nuclear};
  s.trials = 2;
  s.config.max_outer = 30;
  s.csv_path = (d / "a.csv").string();
  run_experiment(s);
  s.threads = 4;
  s.csv_path = (d / "b.csv").string();
  run_experiment(s);
  const std::string a = slurp(d / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(d / "b.csv"));
  EXPECT_FALSE(fs::exists(d / "a.csv.tmp"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 2 * 2 * 2 * 2);
}

TEST(Experiment, TrialSeedsDiffer) {
  EXPECT_NE(trial_seed(0, 8, 8, 1, 40, 0.0, 0), trial_seed(0, 8, 8, 1, 40, 0.0, 1));
  EXPECT_NE(trial_seed(0, 8, 8, 1, 40, 0.0, 0), trial_seed(0, 8, 8, 1, 40, -0.0, 0));
  EXPECT_EQ(trial_seed(5, 8, 8, 1, 40, 0.1, 3), trial_seed(5, 8, 8, 1, 40, 0.1, 3));
}

TEST(Experiment, Validation) {
  ExperimentSpec s;
  s.trials = 0;
  EXPECT_THROW(run_experiment(s), ArgumentError);
  s = {};
  s.m = {};
  EXPECT_THROW(run_experiment(s), ArgumentError);
  s = {};
  s.r = {9};
  EXPECT_THROW(run_experiment(s), ArgumentError);
}

TEST(Experiment, NoMonotonicityFlagWhenRateRises) {
  // l = 6 is far below the degrees of freedom of a rank-2 6x6 matrix; l = 36
  // determines it. No success-rate drop should be flagged.
  ExperimentSpec s;
  s.m = {6};
  s.n = {6};
  s.r = {2};
  s.l = {6, 36};
  s.solvers = {SolverChoice::Path};
  s.trials = 3;
  const auto res = run_experiment(s);
  EXPECT_TRUE(res.monotonicity_flags.empty());
  std::size_t ok_small = 0, ok_big = 0;
  for (const auto& rec : res.records) (rec.l == 6 ? ok_small : ok_big) += rec.verdict == "success";
  EXPECT_LE(ok_small, ok_big);
}

TEST(Experiment, CsvHeader) {
  const std::string csv = to_csv({}, false);
  EXPECT_EQ(csv, "m,n,r,l,eps,lambda,solver,trial,seed,rel_err,residual,wall_ms,verdict\n");
}

TEST(LemmaSuite, DefaultSeedClean) {
  SuiteOptions o;
  o.sandwich_samples = 1000;
  o.power_sum_samples = 1000;
  o.polytope_samples = 100;
  o.orthogonal_pair_trials = 20;
  const auto rep = run_lemma_suite(0, o);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.entries.size(), 10u);
  for (const auto& e : rep.entries) {
    EXPECT_GT(e.checks, 0) << e.name;
    EXPECT_EQ(e.violations, 0) << e.name;
  }
  const std::string j = to_json(rep, false);
  EXPECT_EQ(j.find("runtime_ms"), std::string::npos);
  EXPECT_EQ(j, to_json(run_lemma_suite(0, o), false));
}
