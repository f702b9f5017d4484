#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lstarf/certify/constants.hpp"
#include "lstarf/instance.hpp"
#include "lstarf/matrix.hpp"

namespace lstarf::certify {

enum class Verdict { Pass, Fail, Skipped, HypothesisFailed, NoAdmissibleK };

std::string_view to_string(Verdict v);

struct ConstrainedBoundReport {
  ConstrainedBoundParams params;
  ConstrainedConstants constants;
  bool hypothesis_ok = false;
  /// k in [2, min(m - r, n - r)].
  bool k_admissible = false;
  double tail_nuclear = 0.0;
  double tail_frobenius = 0.0;
  /// alpha ||X - X_r||_* + alpha_bar eps (what the proof establishes).
  std::optional<double> bound_nuclear;
  /// alpha ||X - X_r||_F + alpha_bar eps (the stated form).
  std::optional<double> bound_frobenius;
  double observed_error = 0.0;
  double residual = 0.0;
  double lstarf_candidate = 0.0;
  double lstarf_truth = 0.0;
  bool candidate_admissible = false;
  Verdict verdict = Verdict::Skipped;
};

/// Gate: ||A(candidate) - b|| <= eps + 1e-9 and L(candidate) <= L(X_true) + 1e-9,
/// with eps = p.epsilon. PASS iff observed error <= bound_nuclear + 1e-7.
/// Throws ArgumentError when the instance has no x_true.
ConstrainedBoundReport check_constrained_recovery(const measure::ProblemInstance& inst,
                                                  const DenseMatrix& candidate,
                                                  const ConstrainedBoundParams& p);

struct RegularizedBoundReport {
  RegularizedConstants constants;
  double lambda = 0.0;
  double epsilon = 0.0;
  std::optional<double> bound;
  double observed_error = 0.0;
  double objective_candidate = 0.0;
  double objective_truth = 0.0;
  bool candidate_admissible = false;
  Verdict verdict = Verdict::Skipped;
};

/// Gate: J(candidate) <= J(X_true) + 1e-9. eta = eps / lambda with eps from
/// the instance. PASS iff observed error <= C1 ||X_true||_* + C2 lambda + 1e-7.
RegularizedBoundReport check_regularized_recovery(const measure::ProblemInstance& inst,
                                                  const DenseMatrix& candidate, int t, int k,
                                                  double delta_tk, double lambda);

/// One traced inequality lhs <= rhs.
struct TracedInequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool checked = true;
  bool holds = true;
  double slack() const { return rhs - lhs; }
};

/// Tolerance 1e-9 * max(1, |rhs|).
TracedInequality make_inequality(std::string name, double lhs, double rhs);

struct ConstrainedReplayTrace {
  std::array<int, 4> split{};  // m1, m2, n1, n2
  bool gate_passed = false;
  double residual = 0.0;
  double z_frobenius = 0.0;
  double z1_frobenius = 0.0;
  double z2_frobenius = 0.0;
  double zr_nuclear = 0.0;
  double zr_frobenius = 0.0;
  double zrc_nuclear = 0.0;
  double zrc_frobenius = 0.0;
  double truth_tail_nuclear = 0.0;
  /// ||Z_{T_i}||_F and ||Z_{T_i}||_* per group of k singular values of Z33.
  std::vector<double> group_frobenius;
  std::vector<double> group_nuclear;
  std::vector<TracedInequality> inequalities;
  bool all_hold = false;
};

/// Replays the constrained recovery argument on Z = candidate - X_true in the
/// singular bases of X_true. `split` defaults to optimal_block_split(r, k).
/// When the gate fails the trace carries the norms but no inequalities.
ConstrainedReplayTrace proof_replay_constrained(
    const measure::ProblemInstance& inst, const DenseMatrix& candidate, int r, int k,
    const std::optional<std::array<int, 4>>& split = std::nullopt);

struct Lemma9Trace {
  int t = 2;
  int k = 6;
  double delta_tk = 0.0;
  double lambda = 0.0;
  double beta1 = 0.0;
  double gamma1 = 0.0;
  bool gate_passed = false;
  double h_top_l2 = 0.0;
  double h_top_l1 = 0.0;
  double h_rest_l1 = 0.0;
  double h_l2 = 0.0;
  double ah_norm = 0.0;
  std::vector<TracedInequality> inequalities;
  bool all_hold = false;
};

/// With h = sigma(candidate - X_true) and T its k largest entries, checks
/// ||h_T||_2 <= beta1/sqrt(k) ||h_{T^c}||_1 + gamma1 ||A(H)||_2 and, when
/// J(candidate) <= J(X_true) + 1e-9, the two inequalities the regularized
/// argument derives from that gate. Needs an operator with a closed-form
/// delta; throws ArgumentError otherwise.
Lemma9Trace lemma9_replay(const measure::ProblemInstance& inst, const DenseMatrix& candidate,
                          int t, int k, double lambda);

std::string to_json(const ConstrainedBoundReport& r);
std::string to_json(const RegularizedBoundReport& r);
std::string to_json(const ConstrainedReplayTrace& t);
std::string to_json(const Lemma9Trace& t);

}  // namespace lstarf::certify
