#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using lstarf::cli::dispatch;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lstarf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string p(const std::string& f) const { return (dir_ / f).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("solve"), std::string::npos);
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  const auto r = run({"solve", "--bogus-flag"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--help"), std::string::npos);
}

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run({}).code, 2); }

TEST_F(Cli, MissingInstanceFileIsRuntimeError) {
  EXPECT_EQ(run({"solve", "--instance", p("none.json"), "--out", p("s")}).code, 3);
}

TEST_F(Cli, BadArgumentValueIsUsageError) {
  EXPECT_EQ(run({"gen", "instance", "--kind", "identity", "--m", "3", "--n", "3", "--rank", "5",
                 "--out", p("i.json")})
                .code,
            2);
}

TEST_F(Cli, LemmasWritesJson) {
  const auto r = run({"lemmas", "--seed", "42", "--sandwich-samples", "200", "--polytope-samples",
                      "50", "--power-sum-samples", "200", "--pair-trials", "10", "--out",
                      p("lemmas.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("lstarf lemmas config: {", 0), 0u);
  EXPECT_NE(slurp(p("lemmas.json")).find("\"lemmas\""), std::string::npos);
}

TEST_F(Cli, GenSolveCertifyEndToEnd) {
  ASSERT_EQ(run({"gen", "instance", "--kind", "identity", "--m", "6", "--n", "6", "--rank", "1",
                 "--seed", "3", "--out", p("inst.json")})
                .code,
            0);
  const auto s = run({"solve", "--instance", p("inst.json"), "--solver", "path", "--out", p("sol")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(fs::exists(p("sol.json")));
  EXPECT_TRUE(fs::exists(p("sol.mtx")));
  EXPECT_EQ(slurp(p("sol.trace.csv")).rfind("iteration,J,residual\n", 0), 0u);

  const auto c = run({"certify", "--mode", "constrained", "--instance", p("inst.json"),
                      "--candidate", p("sol.mtx"), "--r", "1", "--k", "2", "--out", p("cert.json")});
  EXPECT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("verdict=PASS"), std::string::npos) << c.out;

  const auto rp = run({"certify", "--mode", "replay", "--instance", p("inst.json"), "--candidate",
                       p("sol.mtx"), "--r", "1", "--k", "2", "--out", p("replay.json")});
  EXPECT_EQ(rp.code, 0) << rp.err;
  const auto l9 = run({"certify", "--mode", "lemma9", "--instance", p("inst.json"), "--candidate",
                       p("sol.mtx"), "--t", "2", "--k", "6", "--lambda", "0.01", "--out",
                       p("l9.json")});
  EXPECT_EQ(l9.code, 0) << l9.err;
}

TEST_F(Cli, ConstantsMode) {
  const auto r = run({"certify", "--mode", "constants", "--r", "2", "--k", "4", "--delta", "0.1",
                      "--out", p("c.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"mn_min_max\":8"), std::string::npos) << r.out;
}

TEST_F(Cli, RipWritesWitness) {
  ASSERT_EQ(run({"gen", "operator", "--kind", "gaussian", "--m", "4", "--n", "4", "--l", "20",
                 "--out", p("op.json")})
                .code,
            0);
  const auto r = run({"rip", "--operator", p("op.json"), "--r", "1", "--restarts", "4",
                      "--iterations", "20", "--out", p("rip.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(p("rip.r1.witness.mtx")));
}

TEST_F(Cli, GlobalFlagsAfterSubcommand) {
  const auto r = run({"certify", "--mode", "constants", "--threads", "2", "--out", p("c.json")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, BenchIsDeterministic) {
  const std::vector<std::string> base{"bench", "--m", "5", "--n", "5", "--r", "1", "--l", "15,25",
                                      "--trials", "2", "--max-outer", "20"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", p("a.csv")});
  b.insert(b.end(), {"--threads", "3", "--out", p("b.csv")});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(p("a.csv")), slurp(p("b.csv")));
}
