#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lstarf/instance.hpp"
#include "lstarf/matrix.hpp"

namespace lstarf::solve {

enum class StepRule { Fixed, Backtracking };
enum class Status { Converged, IterationCap, Stalled };
enum class InitMode { AdjointScaled, Truth, Zero };

std::string_view to_string(Status s);
std::string_view to_string(StepRule s);
StepRule parse_step_rule(std::string_view s);
InitMode parse_init_mode(std::string_view s);
std::string_view to_string(InitMode m);

struct SolverConfig {
  int max_outer = 200;
  int max_inner = 500;
  double tol_outer = 1e-9;
  double tol_inner = 1e-10;
  StepRule step_rule = StepRule::Fixed;
  bool acceleration = true;
  std::uint64_t seed = 0;
  /// Used when no explicit x0 is passed.
  InitMode init = InitMode::AdjointScaled;
};

/// Throws ArgumentError unless tolerances are positive and caps are >= 1.
void validate(const SolverConfig& c);

struct SolveResult {
  DenseMatrix x{1, 1};
  /// J after each outer iteration; entry 0 is J(x0).
  std::vector<double> objective_trace;
  std::vector<double> residual_trace;
  double residual = 0.0;
  long inner_iterations = 0;
  int outer_iterations = 0;
  double lambda_used = 0.0;
  Status status = Status::IterationCap;
  /// Distance from 0 to the subdifferential of the last inner objective,
  /// measured through the SVT fixed-point map.
  double stationarity = 0.0;
};

/// J(X) = ||X||_* - ||X||_F + ||A(X) - b||^2 / (2 lambda).
double objective(const measure::ProblemInstance& inst, const DenseMatrix& x, double lambda);
/// Convex baseline ||X||_* + ||A(X) - b||^2 / (2 lambda).
double nuclear_objective(const measure::ProblemInstance& inst, const DenseMatrix& x,
                         double lambda);

/// Initial point for config.init; Truth requires x_true.
DenseMatrix initial_point(const measure::ProblemInstance& inst, const SolverConfig& config);

/// DC algorithm: at X_k linearize -||X||_F with G_k = X_k / ||X_k||_F (0 at
/// the origin) and solve min ||X||_* - <G_k, X> + ||A X - b||^2 / (2 lambda)
/// by proximal gradient (FISTA with descent restart when acceleration is on).
SolveResult dca_solve(const measure::ProblemInstance& inst, double lambda,
                      const SolverConfig& config,
                      const std::optional<DenseMatrix>& x0 = std::nullopt);

/// Same inner machinery with G_k = 0: the convex nuclear-norm baseline.
SolveResult nuclear_solve(const measure::ProblemInstance& inst, double lambda,
                          const SolverConfig& config,
                          const std::optional<DenseMatrix>& x0 = std::nullopt);

struct PathPoint {
  double lambda;
  double residual;
  double objective;
  /// 2 lambda (||X_true||_* - ||X_true||_F) when x_true is known and eps = 0.
  std::optional<double> residual_sq_bound;
};

struct PathResult {
  SolveResult result;
  std::vector<PathPoint> points;
};

/// Warm-started dca_solve along lambda_n = lambda0 * decay^n until the
/// residual drops to feas_tol or max_steps is reached.
PathResult penalty_path_solve(const measure::ProblemInstance& inst, double lambda0, double decay,
                              double feas_tol, const SolverConfig& config, int max_steps = 60,
                              const std::optional<DenseMatrix>& x0 = std::nullopt);

struct DiscrepancyOptions {
  double lambda_lo = 1e-4;
  double lambda_hi = 1.0;
  int expand_budget = 40;
  int bisect_budget = 60;
  /// Used when epsilon = 0 (delegation to the penalty path).
  double path_decay = 0.5;
  double path_feas_tol = 1e-10;
};

/// Picks lambda by bisection so that the residual approaches epsilon from
/// below and returns an iterate with residual <= epsilon + max(1e-3 eps, 1e-8).
/// When epsilon >= ||b|| the zero matrix is returned. When epsilon = 0 the
/// penalty path is used.
SolveResult discrepancy_solve(const measure::ProblemInstance& inst, double epsilon,
                              const DiscrepancyOptions& opts, const SolverConfig& config,
                              const std::optional<DenseMatrix>& x0 = std::nullopt);

std::string to_json(const SolveResult& r, const std::string& solver, const std::string& x_file,
                    bool include_timing = false, double wall_ms = 0.0);
/// CSV with header iteration,J,residual.
std::string trace_csv(const SolveResult& r);

}  // namespace lstarf::solve
