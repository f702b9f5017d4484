// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lstarf/certify/constants.hpp"
#include "lstarf/certify/lemmas.hpp"
#include "lstarf/certify/polytope.hpp"
#include "lstarf/certify/recovery.hpp"
#include "lstarf/instance.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/random.hpp"
#include "lstarf/ripest.hpp"
#include "lstarf/solve.hpp"
#include "svt_grid_oracle.hpp"

using namespace lstarf;
using measure::OperatorKind;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

measure::ProblemInstance instance(OperatorKind kind, std::size_t m, std::size_t n, std::size_t l,
                                  std::size_t rank, double eps, std::uint64_t seed,
                                  double a = 0.0) {
  measure::OperatorParams p;
  p.scale_a = a;
  const auto op = measure::build_operator(kind, m, n, l, seed, p);
  Rng rng(seed, "acceptance/truth");
  DenseMatrix x = random_low_rank(m, n, rank, rng);
  x *= 1.0 / frobenius_norm(x);
  return measure::make_instance(
      op, x, eps > 0 ? measure::NoiseKind::GaussianRescaled : measure::NoiseKind::None, eps, seed);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome mn_grid() {
  const auto t0 = Clock::now();
  int ok = 0;
  for (int r = 1; r <= 12; ++r)
    for (int k = 1; k <= 12; ++k) ok += certify::mn_min_max(r, k) == certify::mn_min_max_bruteforce(r, k);
  const double s = seconds_since(t0);
  return {ok == 144 && s < 10.0, fmt("%.0f/144 exact in %.3f s", ok, s)};
}

Outcome sandwich() {
  Rng rng(2024, "acceptance/sandwich");
  long violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 1 + rng.below(8), n = 1 + rng.below(6);
    const std::size_t rank = 1 + rng.below(std::min(m, n));
    const DenseMatrix x = i % 3 == 0 ? gaussian_matrix(m, n, rng) : random_low_rank(m, n, rank, rng);
    const auto b = certify::singular_value_bounds(x);
    for (const auto* s : {&b.full, &b.ranked, &b.support}) {
      const double v = std::min(s->lower_slack(), s->upper_slack());
      if (v < -1e-9) ++violations;
      worst = std::min(worst, v);
    }
  }
  double rank_one = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + rng.below(8), n = 1 + rng.below(6);
    rank_one = std::max(rank_one, lstar_f(random_low_rank(m, n, 1, rng)).difference);
  }
  return {violations == 0 && rank_one <= 1e-10,
          fmt("violations=%.0f worst_slack=%.2e rank1_max=%.2e", violations, worst, rank_one)};
}

Outcome constants() {
  const double t1 = certify::delta4r_threshold(1), t2 = certify::delta4r_threshold(2);
  const double theta = certify::regularized_constants(2, 9, 0.0, 0.0).theta_k;
  bool ok = std::abs(t1 - 0.1081942) <= 1e-6 && std::abs(t2 - 0.1907435) <= 1e-6 &&
            std::abs(theta - (3.0 + 2.0 * std::sqrt(2.0))) <= 1e-9;
  double worst = 0.0;
  for (int r = 1; r <= 6; ++r) {
    const double thr = certify::delta4r_threshold(r);
    for (int i = 0; i < 50; ++i) {
      const double d = thr * i / 50.0;
      const auto c = certify::constrained_constants({r, 2 * r, d, d, 0.0});
      const auto ah = certify::alpha_hat(r, d);
      if (!c.alpha || !ah) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(*c.alpha - *ah) / *ah);
    }
  }
  ok = ok && worst <= 1e-12;
  return {ok, fmt("thr1=%.9f thr2=%.9f alpha_rel_err=%.1e", t1, t2, worst)};
}

Outcome exact_recovery() {
  const auto t0 = Clock::now();
  int pass = 0, trials = 0;
  double worst = 0.0;
  for (std::size_t r : {1, 2, 3})
    for (int t = 0; t < 10; ++t, ++trials) {
      const auto inst = instance(OperatorKind::Identity, 10, 10, 100, r, 0.0, 100 * r + t);
      const auto res = solve::discrepancy_solve(inst, 0.0, {}, {});
      const int ri = static_cast<int>(r);
      const auto rep = certify::check_constrained_recovery(inst, res.x, {ri, 2 * ri, 0.0, 0.0, 0.0});
      worst = std::max(worst, rep.observed_error);
      pass += rep.candidate_admissible && rep.verdict == certify::Verdict::Pass &&
              rep.observed_error <= 1e-6 && *rep.bound_nuclear == 0.0;
    }
  const double s = seconds_since(t0);
  return {pass == trials && s < 60.0,
          fmt("%.0f/30 certified, max_err=%.2e, %.2f s", pass, worst, s)};
}

Outcome noisy_bound() {
  int admissible = 0, pass = 0;
  for (double eps : {1e-3, 1e-2})
    for (int t = 0; t < 30; ++t) {
      const auto inst = instance(OperatorKind::ScaledIdentity, 8, 8, 64, 1, eps, 500 + t, 0.05);
      const auto res = solve::discrepancy_solve(inst, eps, {}, {});
      const auto rep = certify::check_constrained_recovery(inst, res.x, {1, 4, 0.05, 0.05, eps});
      if (!rep.candidate_admissible) continue;
      ++admissible;
      pass += rep.verdict == certify::Verdict::Pass;
    }
  return {admissible >= 30 && pass == admissible,
          fmt("%.0f/%.0f admissible trials PASS (of 60 run)", pass, admissible)};
}

Outcome regularized_bound() {
  int pass = 0, trials = 0;
  solve::SolverConfig cfg;
  cfg.init = solve::InitMode::Truth;
  for (int k : {6, 9})
    for (double lambda : {1e-3, 1e-2})
      for (int t = 0; t < 5; ++t, ++trials) {
        const auto inst = instance(OperatorKind::Identity, 10, 10, 100, 2, 0.0, 700 + t);
        const auto res = solve::dca_solve(inst, lambda, cfg);
        const auto rep = certify::check_regularized_recovery(inst, res.x, 2, k, 0.0, lambda);
        pass += rep.verdict == certify::Verdict::Pass;
      }
  return {pass == trials, fmt("%.0f/%.0f PASS", pass, trials)};
}

Outcome penalty_path() {
  int ok = 0, trials = 0;
  double worst_gap = -std::numeric_limits<double>::infinity(), worst_final = 0.0;
  for (std::size_t r : {1, 2, 3})
    for (int t = 0; t < 3; ++t, ++trials) {
      const auto inst = instance(OperatorKind::Identity, 8, 8, 64, r, 0.0, 900 + 10 * r + t);
      const auto path = solve::penalty_path_solve(inst, 0.1, 0.5, 1e-8, {}, 40);
      const double lt = lstar_f(*inst.x_true).difference;
      bool good = true;
      for (const auto& p : path.points) {
        const double gap = p.residual * p.residual - 2 * p.lambda * lt;
        worst_gap = std::max(worst_gap, gap);
        good = good && gap <= 1e-10;
      }
      worst_final = std::max(worst_final, path.result.residual);
      ok += good && path.result.residual < 1e-8;
    }
  return {ok == trials, fmt("%.0f/%.0f paths ok, ", ok, trials) +
                            fmt("max(res^2 - bound)=%.2e max_final_residual=%.2e", worst_gap,
                                worst_final)};
}

Outcome solver_contracts() {
  int monotone = 0;
  solve::SolverConfig cfg;
  cfg.max_outer = 40;
  cfg.max_inner = 200;
  for (int s = 0; s < 100; ++s) {
    const auto inst = instance(OperatorKind::Gaussian, 12, 12, 100, 1 + s % 3, s % 2 ? 1e-2 : 0.0, s);
    const auto res = solve::dca_solve(inst, 1e-2, cfg);
    bool ok = true;
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
      ok = ok && res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-10;
    monotone += ok;
  }

  Rng rng(11, "acceptance/svt");
  double svt_err = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix y = gaussian_matrix(2, 2, rng);
    const double tau = 0.3;
    const auto best =
        lstarf::testing::SvtGridOracle({y(0, 0), y(0, 1), y(1, 0), y(1, 1)}, tau).minimize();
    const DenseMatrix got = svt_prox(y, tau);
    const DenseMatrix ref(2, 2, {best[0], best[1], best[2], best[3]});
    svt_err = std::max(svt_err, max_abs(got - ref));
  }

  double nuc_rel = 0.0;
  for (int s = 0; s < 10; ++s) {
    const auto inst = instance(OperatorKind::Gaussian, 12, 12, 100, 2, 1e-2, 300 + s);
    solve::SolverConfig a, b;
    a.init = solve::InitMode::Zero;
    a.tol_inner = b.tol_inner = 1e-14;
    a.max_inner = b.max_inner = 20000;
    const double fa = solve::nuclear_objective(inst, solve::nuclear_solve(inst, 1e-2, a).x, 1e-2);
    const double fb = solve::nuclear_objective(inst, solve::nuclear_solve(inst, 1e-2, b).x, 1e-2);
    nuc_rel = std::max(nuc_rel, std::abs(fa - fb) / std::max(std::abs(fa), std::abs(fb)));
  }
  return {monotone == 100 && svt_err <= 1e-3 && nuc_rel <= 1e-6,
          fmt("monotone=%.0f/100 svt_err=%.1e nuclear_rel=%.1e", monotone, svt_err, nuc_rel)};
}

Outcome polytope() {
  Rng rng(77, "acceptance/polytope");
  int ok = 0;
  double worst_recon = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t p = 1 + rng.below(20);
    const std::size_t s = 1 + rng.below(p);
    const double alpha = 0.1 + 2.0 * rng.uniform();
    Vector v(p);
    for (double& x : v) x = alpha * (2.0 * rng.uniform() - 1.0);
    // Some members sit on the boundary, some have capped coordinates.
    if (i % 5 == 0) v[rng.below(p)] = alpha;
    const double l1 = norm1(v);
    const double target = (i % 4 == 0) ? s * alpha : s * alpha * rng.uniform();
    if (l1 > target) for (double& x : v) x *= target / l1;
    // Rescaling onto the boundary can overshoot by an ulp.
    while (norm1(v) > s * alpha) for (double& x : v) x *= 1.0 - 1e-15;
    const auto d = certify::polytope_decompose(v, alpha, s);
    const auto rep = certify::check_decomposition(d, v, 1e-12);
    worst_recon = std::max(worst_recon, rep.reconstruction_error);
    ok += rep.ok;
  }
  return {ok == 500, fmt("%.0f/500 ok, max_recon=%.1e", ok, worst_recon)};
}

Outcome rip_estimator() {
  bool exact = true;
  for (double a : {0.0, 0.3}) {
    measure::OperatorParams p;
    p.scale_a = a;
    const auto op = measure::build_operator(
        a == 0.0 ? OperatorKind::Identity : OperatorKind::ScaledIdentity, 5, 4, 20, 0, p);
    for (std::size_t r = 1; r <= 4; ++r) {
      const auto e = rip::estimate_delta(op, r, {});
      exact = exact && e.certainty == rip::Certainty::Exact && e.delta == a;
    }
  }
  int dominate = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto op = measure::build_operator(OperatorKind::Gaussian, 6, 6, 72, seed);
    rip::EstimatorOptions o;
    o.seed = seed;
    const auto est = rip::estimate_delta(op, 1, o);
    const double lb = rip::random_sampling_bound(op, 1, 100000, seed);
    min_margin = std::min(min_margin, est.delta - lb);
    dominate += est.delta >= lb;
  }
  return {exact && dominate == 20,
          fmt("exact=%.0f dominate=%.0f/20 min_margin=%.3e", exact, dominate, min_margin)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "lstarf_acceptance_determinism";
  fs::remove_all(root);
  auto run_all = [&](const fs::path& d) {
    fs::create_directories(d);
    const auto q = [&](const char* f) { return (d / f).string(); };
    const std::vector<std::vector<std::string>> cmds = {
        {"gen", "instance", "--kind", "gaussian", "--m", "6", "--n", "6", "--l", "30", "--rank",
         "1", "--noise", "gaussian-rescaled", "--eps", "0.01", "--seed", "9", "--out", q("inst.json")},
        {"gen", "operator", "--kind", "entry-sampling", "--m", "5", "--n", "5", "--l", "12",
         "--seed", "2", "--out", q("op.json")},
        {"solve", "--instance", q("inst.json"), "--solver", "dca", "--lambda", "0.01", "--out",
         q("dca")},
        {"solve", "--instance", q("inst.json"), "--solver", "discrepancy", "--out", q("disc")},
        {"rip", "--operator", q("op.json"), "--r-max", "2", "--restarts", "8", "--iterations",
         "30", "--threads", "4", "--out", q("rip.json")},
        {"certify", "--mode", "replay", "--instance", q("inst.json"), "--candidate", q("disc.mtx"),
         "--r", "1", "--k", "2", "--delta", "0.2", "--out", q("replay.json")},
        {"lemmas", "--seed", "5", "--sandwich-samples", "500", "--polytope-samples", "50",
         "--power-sum-samples", "500", "--pair-trials", "20", "--out", q("lemmas.json")},
        {"bench", "--m", "6", "--n", "6", "--r", "1,2", "--l", "20,30", "--eps", "0,0.01",
         "--trials", "2", "--solver", "dca,nuclear", "--threads", "4", "--max-outer", "30",
         "--out", q("bench.csv")},
    };
    for (const auto& c : cmds) {
      std::ostringstream out, err;
      const int code = cli::dispatch(c, out, err);
      if (code != cli::kOk && code != cli::kCheckFailed) return false;
    }
    return true;
  };
  if (!run_all(root / "a") || !run_all(root / "b")) return {false, "a CLI invocation failed"};
  int files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++files;
    const std::string a = slurp(e.path());
    const fs::path other = root / "b" / e.path().filename();
    // Bodies reference sibling files by name only, so direct comparison is valid.
    same += fs::exists(other) && a == slurp(other);
  }
  fs::remove_all(root);
  return {files > 0 && same == files, fmt("%.0f/%.0f files byte-identical", same, files)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 block-split minimax equals enumeration", mn_grid},
      {"2 singular value sandwich bounds", sandwich},
      {"3 closed-form constants", constants},
      {"4 exact recovery at delta=0", exact_recovery},
      {"5 noisy constrained bound", noisy_bound},
      {"6 regularized bound", regularized_bound},
      {"7 penalty path residual bound", penalty_path},
      {"8 solver contracts", solver_contracts},
      {"9 polytope decomposition", polytope},
      {"10 isometry estimator sanity", rip_estimator},
      {"11 CLI determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
