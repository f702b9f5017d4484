#include "lstarf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "lstarf/certify/recovery.hpp"
#include "lstarf/error.hpp"
#include "lstarf/instance.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/random.hpp"

namespace lstarf::bench {

using measure::OperatorKind;

std::string_view to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::Dca: return "dca";
    case SolverChoice::Nuclear: return "nuclear";
    case SolverChoice::Path: return "path";
    case SolverChoice::Discrepancy: return "discrepancy";
  }
  return "?";
}

SolverChoice parse_solver(std::string_view s) {
  if (s == "dca") return SolverChoice::Dca;
  if (s == "nuclear") return SolverChoice::Nuclear;
  if (s == "path") return SolverChoice::Path;
  if (s == "discrepancy") return SolverChoice::Discrepancy;
  throw ArgumentError("unknown solver '" + std::string(s) +
                      "' (expected dca|nuclear|path|discrepancy)");
}

namespace {

bool identity_kind(OperatorKind k) {
  return k == OperatorKind::Identity || k == OperatorKind::ScaledIdentity;
}

template <class T>
void require_positive(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw ArgumentError(std::string("experiment: empty grid for ") + name);
  for (const T& x : v)
    if (!(x > T{})) throw ArgumentError(std::string("experiment: grid values must be positive: ") + name);
}

struct Job {
  std::size_t m, n, r, l;
  double eps;
  SolverChoice solver;
  int trial;
};

TrialRecord run_trial(const ExperimentSpec& spec, const Job& job) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed =
      trial_seed(spec.base_seed, job.m, job.n, job.r, job.l, job.eps, job.trial);

  measure::OperatorParams params;
  params.scale_a = spec.scale_a;
  const auto op = measure::build_operator(spec.op_kind, job.m, job.n, job.l, hash_seed({seed, 1}),
                                          params);
  Rng rng(seed, "bench/truth");
  DenseMatrix truth = random_low_rank(job.m, job.n, job.r, rng);
  truth *= 1.0 / frobenius_norm(truth);
  const auto kind = job.eps > 0.0 ? measure::NoiseKind::GaussianRescaled : measure::NoiseKind::None;
  const auto inst = measure::make_instance(op, truth, kind, job.eps, hash_seed({seed, 2}));

  double lambda = spec.lambda.value;
  if (spec.lambda.eps_multiple && job.eps > 0.0) lambda = spec.lambda.value * job.eps;

  solve::SolveResult res;
  switch (job.solver) {
    case SolverChoice::Dca: res = solve::dca_solve(inst, lambda, spec.config); break;
    case SolverChoice::Nuclear: res = solve::nuclear_solve(inst, lambda, spec.config); break;
    case SolverChoice::Path:
      res = solve::penalty_path_solve(inst, lambda, 0.5, std::max(job.eps, 1e-10), spec.config, 40)
                .result;
      break;
    case SolverChoice::Discrepancy: {
      solve::DiscrepancyOptions d;
      d.lambda_hi = std::max(lambda, 2.0 * d.lambda_lo);
      res = solve::discrepancy_solve(inst, job.eps, d, spec.config);
      break;
    }
  }

  TrialRecord rec{job.m, job.n, job.r, job.l, job.eps, res.lambda_used, job.solver, job.trial, seed,
                  frobenius_norm(res.x - truth), res.residual, 0.0, ""};
  rec.verdict = rec.rel_err <= spec.success_threshold ? "success" : "failure";
  if (spec.certify && op.exact_delta()) {
    const double d = op.exact_delta()->value;
    certify::ConstrainedBoundParams p{static_cast<int>(job.r), static_cast<int>(2 * job.r), d, d,
                                      job.eps};
    rec.verdict = std::string(certify::to_string(certify::check_constrained_recovery(inst, res.x, p).verdict));
  }
  const auto t1 = std::chrono::steady_clock::now();
  if (spec.record_timing) rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rec;
}

void write_atomically(const std::string& path, const std::string& body) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << body;
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  require_positive(spec.m, "m");
  require_positive(spec.n, "n");
  require_positive(spec.r, "r");
  if (!identity_kind(spec.op_kind)) require_positive(spec.l, "l");
  if (spec.eps.empty()) throw ArgumentError("experiment: empty grid for eps");
  for (double e : spec.eps)
    if (!(e >= 0.0)) throw ArgumentError("experiment: eps values must be >= 0");
  if (spec.solvers.empty()) throw ArgumentError("experiment: no solver selected");
  if (spec.trials < 1) throw ArgumentError("experiment: trials must be >= 1");
  if (!(spec.lambda.value > 0.0)) throw ArgumentError("experiment: lambda value must be > 0");
  if (!(spec.success_threshold > 0.0)) throw ArgumentError("experiment: success threshold must be > 0");
  for (std::size_t m : spec.m)
    for (std::size_t n : spec.n)
      for (std::size_t r : spec.r)
        if (r > std::min(m, n)) throw ArgumentError("experiment: rank exceeds min(m, n)");
  solve::validate(spec.config);
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t m, std::size_t n, std::size_t r,
                         std::size_t l, double eps, int trial) {
  return hash_seed({base, m, n, r, l, std::bit_cast<std::uint64_t>(eps),
                    static_cast<std::uint64_t>(trial)});
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  std::vector<Job> jobs;
  for (std::size_t m : spec.m)
    for (std::size_t n : spec.n)
      for (std::size_t r : spec.r) {
        std::vector<std::size_t> ls = spec.l;
        if (identity_kind(spec.op_kind)) ls = {m * n};
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        for (std::size_t l : ls)
          for (double e : spec.eps)
            for (SolverChoice s : spec.solvers)
              for (int t = 0; t < spec.trials; ++t) jobs.push_back({m, n, r, l, e, s, t});
      }

  ExperimentResult out;
  out.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out.records[i] = run_trial(spec, jobs[i]);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(spec.threads, static_cast<int>(jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  // Success rate per (m, n, r, eps, solver) as a function of l.
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, double, int>;
  std::map<Key, std::map<std::size_t, std::pair<int, int>>> rates;
  for (const TrialRecord& t : out.records) {
    auto& cell = rates[{t.m, t.n, t.r, t.eps, static_cast<int>(t.solver)}][t.l];
    cell.second += 1;
    if (t.rel_err <= spec.success_threshold) cell.first += 1;
  }
  for (const auto& [key, by_l] : rates) {
    const double one_trial = 1.0 / spec.trials;
    for (auto it = by_l.begin(); std::next(it) != by_l.end(); ++it) {
      const auto nx = std::next(it);
      const double a = static_cast<double>(it->second.first) / it->second.second;
      const double b = static_cast<double>(nx->second.first) / nx->second.second;
      if (a - b > one_trial + 1e-12)
        out.monotonicity_flags.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                                          std::get<3>(key),
                                          static_cast<SolverChoice>(std::get<4>(key)), it->first,
                                          nx->first, a, b});
    }
  }

  if (!spec.csv_path.empty()) write_atomically(spec.csv_path, to_csv(out.records, spec.record_timing));
  return out;
}

std::string to_csv(const std::vector<TrialRecord>& records, bool include_timing) {
  std::ostringstream os;
  os << "m,n,r,l,eps,lambda,solver,trial,seed,rel_err,residual,wall_ms,verdict\n";
  char buf[512];
  for (const TrialRecord& t : records) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.17g,%.17g,%s,%d,%llu,%.17g,%.17g,%.3f,%s\n",
                  t.m, t.n, t.r, t.l, t.eps, t.lambda, std::string(to_string(t.solver)).c_str(),
                  t.trial, static_cast<unsigned long long>(t.seed), t.rel_err, t.residual,
                  include_timing ? t.wall_ms : 0.0, t.verdict.c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace lstarf::bench
