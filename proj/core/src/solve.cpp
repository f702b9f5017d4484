#include "lstarf/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lstarf/error.hpp"
#include "lstarf/linalg.hpp"

namespace lstarf::solve {

using measure::ProblemInstance;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::IterationCap: return "iteration-cap";
    case Status::Stalled: return "stalled";
  }
  return "?";
}

std::string_view to_string(StepRule s) { return s == StepRule::Fixed ? "fixed" : "backtracking"; }

StepRule parse_step_rule(std::string_view s) {
  if (s == "fixed") return StepRule::Fixed;
  if (s == "backtracking") return StepRule::Backtracking;
  throw ArgumentError("unknown step rule '" + std::string(s) + "' (expected fixed|backtracking)");
}

std::string_view to_string(InitMode m) {
  switch (m) {
    case InitMode::AdjointScaled: return "adjoint";
    case InitMode::Truth: return "truth";
    case InitMode::Zero: return "zero";
  }
  return "?";
}

InitMode parse_init_mode(std::string_view s) {
  if (s == "adjoint") return InitMode::AdjointScaled;
  if (s == "truth") return InitMode::Truth;
  if (s == "zero") return InitMode::Zero;
  throw ArgumentError("unknown init mode '" + std::string(s) + "' (expected adjoint|truth|zero)");
}

void validate(const SolverConfig& c) {
  if (c.max_outer < 1 || c.max_inner < 1) throw ArgumentError("iteration caps must be >= 1");
  if (!(c.tol_outer > 0.0) || !(c.tol_inner > 0.0)) throw ArgumentError("tolerances must be > 0");
}

double objective(const ProblemInstance& inst, const DenseMatrix& x, double lambda) {
  const double r = measure::residual_norm(inst.op, x, inst.b);
  return lstar_f(x).difference + r * r / (2.0 * lambda);
}

double nuclear_objective(const ProblemInstance& inst, const DenseMatrix& x, double lambda) {
  const double r = measure::residual_norm(inst.op, x, inst.b);
  return nuclear_norm(x) + r * r / (2.0 * lambda);
}

DenseMatrix initial_point(const ProblemInstance& inst, const SolverConfig& config) {
  const std::size_t m = inst.op.m();
  const std::size_t n = inst.op.n();
  switch (config.init) {
    case InitMode::Zero: return DenseMatrix(m, n);
    case InitMode::Truth:
      if (!inst.x_true) throw ArgumentError("init=truth requires an instance with x_true");
      return *inst.x_true;
    case InitMode::AdjointScaled: break;
  }
  DenseMatrix x = inst.op.adjoint(inst.b);
  const double nx = frobenius_norm(x);
  if (nx > 0.0) x *= norm2(inst.b) / nx;
  return x;
}

namespace {

struct Problem {
  const ProblemInstance& inst;
  double lambda;
  double lipschitz;
  DenseMatrix atb;
  bool convex;
};

// Smooth part f(X) = -<G, X> + ||A X - b||^2 / (2 lambda) and its gradient.
struct Smooth {
  double value;
  DenseMatrix grad;
};

Smooth smooth(const Problem& p, const DenseMatrix& g, const DenseMatrix& x) {
  Vector r = p.inst.op.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= p.inst.b[i];
  DenseMatrix grad = p.inst.op.adjoint(r);
  grad *= 1.0 / p.lambda;
  grad -= g;
  const double rn = norm2(r);
  return {rn * rn / (2.0 * p.lambda) - inner(g, x), std::move(grad)};
}

struct InnerResult {
  DenseMatrix x;
  double value;
  int iterations;
  double step;
};

double inner_objective(const Problem& p, const DenseMatrix& g, const DenseMatrix& x) {
  return nuclear_norm(x) + smooth(p, g, x).value;
}

// Proximal gradient on ||X||_* + f(X), started at x0. Returns an iterate whose
// objective does not exceed the starting one.
InnerResult inner_solve(const Problem& p, const DenseMatrix& g, const DenseMatrix& x0,
                        const SolverConfig& cfg, double step0) {
  DenseMatrix x = x0;
  double fx = inner_objective(p, g, x);
  DenseMatrix y = x;
  double t = 1.0;
  double step = step0;
  int it = 0;
  for (; it < cfg.max_inner; ++it) {
    Smooth sy = smooth(p, g, y);
    DenseMatrix xn = svt_prox(y - step * sy.grad, step);
    if (cfg.step_rule == StepRule::Backtracking) {
      // Grow the local Lipschitz estimate until the quadratic model majorizes f.
      for (int bt = 0; bt < 60; ++bt) {
        const DenseMatrix d = xn - y;
        const double dn = frobenius_norm(d);
        const double model = sy.value + inner(sy.grad, d) + dn * dn / (2.0 * step);
        if (smooth(p, g, xn).value <= model + 1e-14 * std::max(1.0, std::abs(model))) break;
        step *= 0.5;
        xn = svt_prox(y - step * sy.grad, step);
      }
    }
    double fn = inner_objective(p, g, xn);
    if (fn > fx && cfg.acceleration && t > 1.0) {
      // Momentum overshot: restart from the last accepted point.
      t = 1.0;
      y = x;
      continue;
    }
    if (!std::isfinite(fn)) throw NumericalError("inner objective is not finite");
    if (fn > fx) break;  // no further descent available at this precision

    const double dx = frobenius_norm(xn - x);
    const double df = fx - fn;
    const double xnorm = frobenius_norm(xn);
    if (cfg.acceleration) {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = xn + ((t - 1.0) / tn) * (xn - x);
      t = tn;
    } else {
      y = xn;
    }
    x = std::move(xn);
    fx = fn;
    if (df <= cfg.tol_inner * std::max(1.0, std::abs(fx)) &&
        dx <= std::sqrt(cfg.tol_inner) * std::max(1.0, xnorm)) {
      ++it;
      break;
    }
  }
  return {std::move(x), fx, it, step};
}

// Norm of the gradient mapping (X - prox(X - s grad f(X))) / s.
double gradient_mapping(const Problem& p, const DenseMatrix& g, const DenseMatrix& x, double s) {
  const Smooth sx = smooth(p, g, x);
  const DenseMatrix xp = svt_prox(x - s * sx.grad, s);
  return frobenius_norm(x - xp) / s;
}

SolveResult run(const ProblemInstance& inst, double lambda, const SolverConfig& config,
                const std::optional<DenseMatrix>& x0, bool convex) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("lambda must be > 0");
  validate(config);
  Problem p{inst, lambda, 0.0, inst.op.adjoint(inst.b), convex};
  const double opn = measure::operator_norm(inst.op, 1e-8);
  p.lipschitz = std::max(opn * opn / lambda, std::numeric_limits<double>::min());
  const double step0 = config.step_rule == StepRule::Fixed ? 0.95 / p.lipschitz : 4.0 / p.lipschitz;

  SolveResult res;
  res.lambda_used = lambda;
  res.x = x0 ? *x0 : initial_point(inst, config);
  if (res.x.rows() != inst.op.m() || res.x.cols() != inst.op.n())
    throw ArgumentError("x0 shape does not match the operator");

  auto total = [&](const DenseMatrix& x) {
    return convex ? nuclear_objective(inst, x, lambda) : objective(inst, x, lambda);
  };
  double j = total(res.x);
  if (!std::isfinite(j)) throw NumericalError("objective is not finite at the initial point");
  res.objective_trace.push_back(j);
  res.residual_trace.push_back(measure::residual_norm(inst.op, res.x, inst.b));

  const DenseMatrix zero(inst.op.m(), inst.op.n());
  double step = step0;
  res.status = Status::IterationCap;
  for (int k = 0; k < config.max_outer; ++k) {
    const DenseMatrix g = convex ? zero : frob_subgrad(res.x);
    InnerResult in = inner_solve(p, g, res.x, config, step);
    if (config.step_rule == StepRule::Backtracking) step = std::min(step0, 2.0 * in.step);
    res.inner_iterations += in.iterations;
    ++res.outer_iterations;
    const double jn = total(in.x);
    if (!std::isfinite(jn)) {
      throw NumericalError("objective became non-finite after " + std::to_string(k + 1) +
                           " outer iterations");
    }
    if (jn > j) {
      // Rounding-level increase: keep the previous iterate.
      res.status = Status::Converged;
      break;
    }
    const double change = j - jn;
    res.x = std::move(in.x);
    j = jn;
    res.objective_trace.push_back(j);
    res.residual_trace.push_back(measure::residual_norm(inst.op, res.x, inst.b));
    // The convex baseline has a fixed inner problem: done once it converges.
    const bool settled = convex ? in.iterations < config.max_inner
                                : change <= config.tol_outer * std::max(1.0, std::abs(j));
    if (settled) {
      res.status = Status::Converged;
      break;
    }
  }

  const DenseMatrix g = convex ? zero : frob_subgrad(res.x);
  const double s = 0.95 / p.lipschitz;
  res.stationarity = gradient_mapping(p, g, res.x, s);
  const double scale = 1.0 + frobenius_norm(p.atb) / lambda;
  if (res.status == Status::Converged &&
      res.stationarity > std::sqrt(config.tol_outer) * scale)
    res.status = Status::Stalled;
  res.residual = measure::residual_norm(inst.op, res.x, inst.b);
  return res;
}

}  // namespace

SolveResult dca_solve(const ProblemInstance& inst, double lambda, const SolverConfig& config,
                      const std::optional<DenseMatrix>& x0) {
  return run(inst, lambda, config, x0, false);
}

SolveResult nuclear_solve(const ProblemInstance& inst, double lambda, const SolverConfig& config,
                          const std::optional<DenseMatrix>& x0) {
  return run(inst, lambda, config, x0, true);
}

PathResult penalty_path_solve(const ProblemInstance& inst, double lambda0, double decay,
                              double feas_tol, const SolverConfig& config, int max_steps,
                              const std::optional<DenseMatrix>& x0) {
  if (!(lambda0 > 0.0)) throw ArgumentError("penalty path: lambda0 must be > 0");
  if (!(decay > 0.0 && decay < 1.0)) throw ArgumentError("penalty path: decay must be in (0, 1)");
  if (!(feas_tol > 0.0)) throw ArgumentError("penalty path: feas_tol must be > 0");
  if (max_steps < 1) throw ArgumentError("penalty path: max_steps must be >= 1");

  std::optional<double> lstar_truth;
  if (inst.x_true && inst.epsilon == 0.0) lstar_truth = lstar_f(*inst.x_true).difference;

  PathResult out;
  std::optional<DenseMatrix> warm = x0;
  double lambda = lambda0;
  for (int n = 0; n < max_steps; ++n) {
    SolveResult r = dca_solve(inst, lambda, config, warm);
    PathPoint pt{lambda, r.residual, r.objective_trace.back(), std::nullopt};
    if (lstar_truth) pt.residual_sq_bound = 2.0 * lambda * *lstar_truth;
    out.points.push_back(pt);
    warm = r.x;
    out.result = std::move(r);
    if (out.result.residual <= feas_tol) break;
    lambda *= decay;
  }
  return out;
}

SolveResult discrepancy_solve(const ProblemInstance& inst, double epsilon,
                              const DiscrepancyOptions& opts, const SolverConfig& config,
                              const std::optional<DenseMatrix>& x0) {
  if (!(epsilon >= 0.0)) throw ArgumentError("discrepancy: epsilon must be >= 0");
  if (!(opts.lambda_lo > 0.0) || !(opts.lambda_hi > opts.lambda_lo))
    throw ArgumentError("discrepancy: need 0 < lambda_lo < lambda_hi");

  if (epsilon >= norm2(inst.b)) {
    // X = 0 is feasible and L_{*-F}(0) = 0 is the global minimum.
    SolveResult r;
    r.x = DenseMatrix(inst.op.m(), inst.op.n());
    r.objective_trace = {0.0};
    r.residual_trace = {norm2(inst.b)};
    r.residual = norm2(inst.b);
    r.lambda_used = std::numeric_limits<double>::infinity();
    r.status = Status::Converged;
    return r;
  }
  if (epsilon == 0.0)
    return penalty_path_solve(inst, opts.lambda_hi, opts.path_decay, opts.path_feas_tol, config,
                              60, x0)
        .result;

  auto solve_at = [&](double lam, const std::optional<DenseMatrix>& start) {
    return dca_solve(inst, lam, config, start);
  };

  // Upper end: residual(hi) >= eps, or saturation below eps.
  double hi = opts.lambda_hi;
  SolveResult r_hi = solve_at(hi, x0);
  for (int i = 0; r_hi.residual < epsilon; ++i) {
    if (i >= opts.expand_budget) return r_hi;
    const double prev = r_hi.residual;
    hi *= 4.0;
    SolveResult next = solve_at(hi, r_hi.x);
    if (next.residual <= epsilon &&
        std::abs(next.residual - prev) <= 1e-12 * std::max(1.0, norm2(inst.b)))
      return next;  // residual no longer grows with lambda: largest feasible lambda wins
    r_hi = std::move(next);
  }

  double lo = std::min(opts.lambda_lo, hi / 4.0);
  SolveResult r_lo = solve_at(lo, x0);
  for (int i = 0; r_lo.residual > epsilon; ++i) {
    if (i >= opts.expand_budget)
      throw NumericalError("discrepancy: could not reach residual <= epsilon by shrinking lambda");
    lo /= 4.0;
    r_lo = solve_at(lo, r_lo.x);
  }

  const double slack = std::max(1e-3 * epsilon, 1e-8);
  for (int i = 0; i < opts.bisect_budget; ++i) {
    if (epsilon - r_lo.residual <= slack) break;
    const double mid = std::sqrt(lo * hi);
    SolveResult r_mid = solve_at(mid, r_lo.x);
    if (r_mid.residual <= epsilon) {
      lo = mid;
      r_lo = std::move(r_mid);
    } else {
      hi = mid;
    }
    if (hi / lo < 1.0 + 1e-12) break;
  }
  return r_lo;
}

std::string to_json(const SolveResult& r, const std::string& solver, const std::string& x_file,
                    bool include_timing, double wall_ms) {
  nlohmann::json j;
  j["solver"] = solver;
  j["lambda"] = std::isfinite(r.lambda_used) ? nlohmann::json(r.lambda_used) : nlohmann::json("inf");
  j["status"] = to_string(r.status);
  j["residual"] = r.residual;
  j["objective"] = r.objective_trace.empty() ? 0.0 : r.objective_trace.back();
  j["outer_iterations"] = r.outer_iterations;
  j["inner_iterations"] = r.inner_iterations;
  j["stationarity"] = r.stationarity;
  j["objective_trace"] = r.objective_trace;
  j["x"] = x_file;
  if (include_timing) j["wall_ms"] = wall_ms;
  return j.dump(2);
}

std::string trace_csv(const SolveResult& r) {
  std::ostringstream os;
  os << "iteration,J,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
    const double res = i < r.residual_trace.size() ? r.residual_trace[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, r.objective_trace[i], res);
    os << buf;
  }
  return os.str();
}

}  // namespace lstarf::solve
