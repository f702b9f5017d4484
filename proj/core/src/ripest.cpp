#include "lstarf/ripest.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "json.hpp"
#include "lstarf/error.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/random.hpp"

namespace lstarf::rip {

using measure::LinearOperator;

std::string_view to_string(Certainty c) {
  return c == Certainty::Exact ? "exact" : "lower-bound";
}

double isometry_deviation(const LinearOperator& op, const DenseMatrix& x) {
  const double fx = frobenius_norm(x);
  if (fx == 0.0) return 0.0;
  const double ax = norm2(op.apply(x));
  return std::abs((ax / fx) * (ax / fx) - 1.0);
}

namespace {

void check_rank(const LinearOperator& op, std::size_t r) {
  if (r < 1 || r > std::min(op.m(), op.n())) {
    throw ArgumentError("rip: r=" + std::to_string(r) + " outside [1, min(m, n)]");
  }
}

DenseMatrix retract(const DenseMatrix& y, std::size_t r) {
  DenseMatrix x = best_rank_r(y, r);
  const double nrm = frobenius_norm(x);
  if (nrm == 0.0) return x;
  x *= 1.0 / nrm;
  return x;
}

double side_objective(const LinearOperator& op, const DenseMatrix& x, int side) {
  const double ax = norm2(op.apply(x));
  return side * (ax * ax - 1.0);
}

struct RestartResult {
  double deviation = -1.0;
  DenseMatrix witness{1, 1};
};

RestartResult run_restart(const LinearOperator& op, std::size_t r, int iterations,
                          std::uint64_t seed, int restart) {
  Rng rng(hash_seed({seed, static_cast<std::uint64_t>(restart)}), "rip/start");
  const DenseMatrix start = random_unit_low_rank(op.m(), op.n(), r, rng);
  RestartResult best;
  for (int side : {+1, -1}) {
    AscentTrace tr = ascend(op, r, side, iterations, start);
    const double dev = isometry_deviation(op, tr.best);
    if (dev > best.deviation) best = RestartResult{dev, std::move(tr.best)};
  }
  return best;
}

}  // namespace

AscentTrace ascend(const LinearOperator& op, std::size_t r, int side, int iterations,
                   const DenseMatrix& start) {
  check_rank(op, r);
  if (side != 1 && side != -1) throw ArgumentError("ascend: side must be +1 or -1");
  DenseMatrix x = retract(start, r);
  if (frobenius_norm(x) == 0.0) throw ArgumentError("ascend: start must be nonzero");
  double fx = side_objective(op, x, side);
  AscentTrace trace{{fx}, x};

  DenseMatrix grad = op.normal(x) * (2.0 * side);
  DenseMatrix prev_x = x;
  DenseMatrix prev_grad = grad;
  double step = 1.0;
  for (int it = 0; it < iterations; ++it) {
    if (it > 0) {
      const DenseMatrix s = x - prev_x;
      const DenseMatrix yv = grad - prev_grad;
      const double sy = std::abs(inner(s, yv));
      const double ss = inner(s, s);
      if (sy > 0.0 && ss > 0.0) step = ss / sy;
    }
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      DenseMatrix cand = retract(x + grad * step, r);
      if (frobenius_norm(cand) == 0.0) {
        step *= 0.5;
        continue;
      }
      const double fc = side_objective(op, cand, side);
      if (fc > fx) {
        prev_x = std::move(x);
        prev_grad = std::move(grad);
        x = std::move(cand);
        fx = fc;
        grad = op.normal(x) * (2.0 * side);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    trace.objective.push_back(fx);
  }
  trace.best = std::move(x);
  return trace;
}

RipEstimate estimate_delta(const LinearOperator& op, std::size_t r, const EstimatorOptions& opts) {
  check_rank(op, r);
  if (opts.restarts < 1 || opts.iterations < 1) {
    throw ArgumentError("estimate_delta: restarts and iterations must be >= 1");
  }
  RipEstimate est;
  est.r = r;
  est.seed = opts.seed;
  if (op.exact_delta()) {
    DenseMatrix w(op.m(), op.n());
    w(0, 0) = 1.0;
    est.delta = op.exact_delta()->value;
    est.certainty = Certainty::Exact;
    est.witness = std::move(w);
    return est;
  }

  std::vector<RestartResult> results(static_cast<std::size_t>(opts.restarts));
  const int threads = std::clamp(opts.threads, 1, opts.restarts);
  auto worker = [&](int tid) {
    for (int i = tid; i < opts.restarts; i += threads) {
      results[static_cast<std::size_t>(i)] = run_restart(op, r, opts.iterations, opts.seed, i);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].deviation > results[best].deviation) best = i;
  }
  est.delta = results[best].deviation;
  est.witness = std::move(results[best].witness);
  est.certainty = Certainty::LowerBound;
  est.restarts = opts.restarts;
  est.iterations = opts.iterations;
  return est;
}

std::vector<RipEstimate> estimate_sweep(const LinearOperator& op, std::size_t r_max,
                                        const EstimatorOptions& opts) {
  check_rank(op, r_max);
  std::vector<RipEstimate> out;
  for (std::size_t r = 1; r <= r_max; ++r) {
    RipEstimate e = estimate_delta(op, r, opts);
    if (!out.empty() && e.delta < out.back().delta) {
      e.delta = out.back().delta;
      e.witness = out.back().witness;
    }
    out.push_back(std::move(e));
  }
  return out;
}

double random_sampling_bound(const LinearOperator& op, std::size_t r, long samples,
                             std::uint64_t seed) {
  check_rank(op, r);
  Rng rng(seed, "rip/sampling");
  double best = 0.0;
  for (long s = 0; s < samples; ++s) {
    const DenseMatrix x = random_low_rank(op.m(), op.n(), r, rng);
    best = std::max(best, isometry_deviation(op, x));
  }
  return best;
}

OrthogonalPairReport check_orthogonal_pair(const LinearOperator& op, double delta_upper,
                                           const DenseMatrix& x, const DenseMatrix& x_prime) {
  OrthogonalPairReport rep;
  rep.trials = 1;
  rep.delta_upper = delta_upper;
  const Vector ax = op.apply(x);
  const Vector axp = op.apply(x_prime);
  const double ip = std::abs(dot(ax, axp));
  const double scale = frobenius_norm(x) * frobenius_norm(x_prime);
  rep.max_abs_inner = ip;
  rep.max_ratio = scale > 0.0 ? ip / scale : 0.0;
  if (ip > delta_upper * scale + 1e-10) {
    rep.violations = 1;
    rep.holds = false;
  }
  return rep;
}

OrthogonalPairReport check_orthogonal_pair_bound(const LinearOperator& op, double delta_upper,
                                                 std::size_t r, std::size_t r_prime, int trials,
                                                 std::uint64_t seed) {
  check_rank(op, r);
  check_rank(op, r_prime);
  if (trials < 1) throw ArgumentError("check_orthogonal_pair_bound: trials must be >= 1");
  const std::size_t m = op.m();
  const std::size_t n = op.n();
  if (r >= m && r >= n) {
    throw InfeasibleInputError("check_orthogonal_pair_bound: X spans the whole space");
  }
  Rng rng(seed, "rip/pairs");
  OrthogonalPairReport rep;
  rep.delta_upper = delta_upper;
  constexpr int kRetryBudget = 100;
  for (int t = 0; t < trials; ++t) {
    int attempts = 0;
    for (;;) {
      if (++attempts > kRetryBudget) {
        throw InfeasibleInputError("check_orthogonal_pair_bound: degenerate draws exhausted retries");
      }
      const DenseMatrix x = random_low_rank(m, n, r, rng);
      const DenseMatrix g = random_low_rank(m, n, r_prime, rng);
      const SvdFactors fx = svd(x);
      const std::size_t rank = numerical_rank(fx.sigma);
      const bool use_left = (rank < m) && ((t % 2 == 0) || rank >= n);
      DenseMatrix xp = g;
      if (use_left) {
        // X' = (I - Q Q^T) G, Q = leading left singular vectors of X.
        const DenseMatrix q = fx.u.block(0, 0, m, rank);
        xp -= matmul(q, matmul_tn(q, g));
      } else {
        const DenseMatrix p = fx.v.block(0, 0, n, rank);
        xp -= matmul_nt(matmul(g, p), p);
      }
      if (frobenius_norm(xp) <= 1e-12 * frobenius_norm(g)) continue;
      const OrthogonalPairReport one = check_orthogonal_pair(op, delta_upper, x, xp);
      rep.max_ratio = std::max(rep.max_ratio, one.max_ratio);
      rep.max_abs_inner = std::max(rep.max_abs_inner, one.max_abs_inner);
      rep.violations += one.violations;
      break;
    }
    ++rep.trials;
  }
  rep.holds = rep.violations == 0;
  return rep;
}

std::string to_json(const RipEstimate& est, const std::string& witness_file) {
  nlohmann::json j = {{"r", est.r},
                      {"delta", est.delta},
                      {"certainty", std::string(to_string(est.certainty))},
                      {"restarts", est.restarts},
                      {"iterations", est.iterations},
                      {"seed", est.seed},
                      {"witness_file", witness_file}};
  return j.dump(2);
}

}  // namespace lstarf::rip
