#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lstarf/matrix.hpp"
#include "lstarf/operator.hpp"

namespace lstarf::rip {

enum class Certainty { Exact, LowerBound };

std::string_view to_string(Certainty c);

/// Estimate of the rank-r isometry constant of an operator.
///
/// For LowerBound estimates the witness is a unit-Frobenius rank <= r matrix
/// with | ||A(witness)||^2 - 1 | >= delta - 1e-9, so the true delta_r is at
/// least `delta`.
struct RipEstimate {
  std::size_t r = 1;
  double delta = 0.0;
  Certainty certainty = Certainty::LowerBound;
  int restarts = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  DenseMatrix witness{1, 1};
};

struct EstimatorOptions {
  int restarts = 16;
  int iterations = 200;
  std::uint64_t seed = 0;
  /// Restarts are split across this many threads; the merge is deterministic.
  int threads = 1;
};

/// Deviation | ||A(X)||^2 - ||X||_F^2 | / ||X||_F^2.
double isometry_deviation(const measure::LinearOperator& op, const DenseMatrix& x);

/// Returns the closed form when the operator carries one. Otherwise runs
/// multi-start projected gradient ascent, separately on ||A X||^2 - 1 and
/// 1 - ||A X||^2, over unit-Frobenius rank <= r matrices. Steps use
/// Barzilai-Borwein lengths with backtracking; the retraction is rank-r
/// truncation followed by renormalization.
RipEstimate estimate_delta(const measure::LinearOperator& op, std::size_t r,
                           const EstimatorOptions& opts);

/// Trace of one ascent run; used to test monotonicity of accepted steps.
struct AscentTrace {
  std::vector<double> objective;
  DenseMatrix best{1, 1};
};

/// Single restart of the ascent. `side` = +1 maximizes ||A X||^2 - 1, -1
/// maximizes 1 - ||A X||^2.
AscentTrace ascend(const measure::LinearOperator& op, std::size_t r, int side, int iterations,
                   const DenseMatrix& start);

/// Estimates for r = 1..r_max with cumulative max applied so delta(r) is
/// nondecreasing in r.
std::vector<RipEstimate> estimate_sweep(const measure::LinearOperator& op, std::size_t r_max,
                                        const EstimatorOptions& opts);

/// Best deviation over `samples` random rank-r unit matrices (Gaussian factors).
double random_sampling_bound(const measure::LinearOperator& op, std::size_t r, long samples,
                             std::uint64_t seed);

struct OrthogonalPairReport {
  int trials = 0;
  int violations = 0;
  /// max |<A X, A X'>| / (||X||_F ||X'||_F) over the trials.
  double max_ratio = 0.0;
  /// max |<A X, A X'>| (absolute).
  double max_abs_inner = 0.0;
  double delta_upper = 0.0;
  bool holds = true;
};

/// Checks |<A X, A X'>| <= delta_upper ||X||_F ||X'||_F + 1e-10 on random
/// pairs with <X, X'> = 0, rank X <= r, rank X' <= r'. X' is drawn in the
/// orthogonal complement of X's column space (or row space), which keeps its
/// rank at most r'. `delta_upper` must be a trusted upper bound on
/// delta_{r + r'}.
OrthogonalPairReport check_orthogonal_pair_bound(const measure::LinearOperator& op,
                                                 double delta_upper, std::size_t r,
                                                 std::size_t r_prime, int trials,
                                                 std::uint64_t seed);

/// Same check on one caller-supplied pair.
OrthogonalPairReport check_orthogonal_pair(const measure::LinearOperator& op, double delta_upper,
                                           const DenseMatrix& x, const DenseMatrix& x_prime);

std::string to_json(const RipEstimate& est, const std::string& witness_file);

}  // namespace lstarf::rip
