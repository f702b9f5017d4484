#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lstarf/operator.hpp"
#include "lstarf/solve.hpp"

namespace lstarf::bench {

enum class SolverChoice { Dca, Nuclear, Path, Discrepancy };

std::string_view to_string(SolverChoice s);
SolverChoice parse_solver(std::string_view s);

/// lambda = value, or lambda = value * eps when eps > 0 (falls back to
/// `value` at eps = 0).
struct LambdaPolicy {
  bool eps_multiple = false;
  double value = 1e-2;
};

struct ExperimentSpec {
  std::vector<std::size_t> m{8};
  std::vector<std::size_t> n{8};
  std::vector<std::size_t> r{1};
  /// Ignored for identity kinds, which always use l = m n.
  std::vector<std::size_t> l{48};
  std::vector<double> eps{0.0};
  LambdaPolicy lambda;
  std::vector<SolverChoice> solvers{SolverChoice::Dca};
  measure::OperatorKind op_kind = measure::OperatorKind::Gaussian;
  double scale_a = 0.0;
  int trials = 1;
  std::uint64_t base_seed = 0;
  double success_threshold = 1e-3;
  /// Replace success/failure by a constrained-recovery verdict with k = 2r
  /// when the operator has a closed-form delta.
  bool certify = false;
  bool record_timing = false;
  int threads = 1;
  solve::SolverConfig config;
  std::string csv_path;
};

/// Throws ArgumentError on empty grids, nonpositive sizes, trials < 1 or
/// rank larger than min(m, n).
void validate(const ExperimentSpec& spec);

struct TrialRecord {
  std::size_t m, n, r, l;
  double eps;
  double lambda;
  SolverChoice solver;
  int trial;
  std::uint64_t seed;
  double rel_err;
  double residual;
  double wall_ms;
  std::string verdict;
};

/// hash of (base, m, n, r, l, bits(eps), trial).
std::uint64_t trial_seed(std::uint64_t base, std::size_t m, std::size_t n, std::size_t r,
                         std::size_t l, double eps, int trial);

struct MonotonicityFlag {
  std::size_t m, n, r;
  double eps;
  SolverChoice solver;
  std::size_t l_from, l_to;
  double rate_from, rate_to;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  /// Cells where the success rate drops by more than one trial between
  /// adjacent l values. Diagnostic only.
  std::vector<MonotonicityFlag> monotonicity_flags;
};

/// Runs every (cell, solver, trial) and, if csv_path is set, writes the CSV
/// through a temporary file and rename. Records are sorted by cell and trial,
/// so the output does not depend on thread scheduling.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string to_csv(const std::vector<TrialRecord>& records, bool include_timing);

struct SuiteEntry {
  std::string name;
  long checks = 0;
  long violations = 0;
  /// Largest amount by which a bound was exceeded (0 when none).
  double max_violation = 0.0;
  /// Smallest observed slack.
  double min_slack = 0.0;
  double runtime_ms = 0.0;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<SuiteEntry> entries;
  bool ok() const;
};

struct SuiteOptions {
  int sandwich_samples = 10000;
  int polytope_samples = 500;
  int power_sum_samples = 10000;
  int orthogonal_pair_trials = 200;
};

SuiteReport run_lemma_suite(std::uint64_t seed, const SuiteOptions& opts = {});

std::string to_json(const SuiteReport& rep, bool include_timing);

}  // namespace lstarf::bench
