#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lstarf/certify/constants.hpp"
#include "lstarf/certify/recovery.hpp"
#include "lstarf/error.hpp"
#include "lstarf/experiment.hpp"
#include "lstarf/instance.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/matrix_market.hpp"
#include "lstarf/operator.hpp"
#include "lstarf/random.hpp"
#include "lstarf/ripest.hpp"
#include "lstarf/solve.hpp"

namespace lstarf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Global {
  int threads = 1;
  bool timing = false;
  std::string out_dir;
};

struct OperatorFlags {
  std::string kind = "gaussian";
  std::size_t m = 8, n = 8, l = 48;
  std::uint64_t seed = 0;
  double a = 0.0;
  std::vector<std::size_t> omega;
};

struct GenFlags {
  OperatorFlags op;
  std::size_t rank = 1;
  std::string noise = "none";
  double eps = 0.0;
  std::string out;
};

struct SolverFlags {
  int max_outer = 200;
  int max_inner = 500;
  double tol_outer = 1e-9;
  double tol_inner = 1e-10;
  std::string step = "fixed";
  bool no_accel = false;
  std::string init = "adjoint";
  std::uint64_t seed = 0;
};

struct SolveFlags {
  std::string instance;
  std::string solver = "dca";
  double lambda = 1e-2;
  double lambda0 = 0.1;
  double decay = 0.5;
  double feas_tol = 1e-10;
  int path_steps = 60;
  std::optional<double> eps;
  double lambda_lo = 1e-4;
  double lambda_hi = 1.0;
  std::string out;
  SolverFlags cfg;
};

struct RipFlags {
  std::string op;
  std::size_t r = 1;
  std::size_t r_max = 0;
  int restarts = 16;
  int iterations = 200;
  std::uint64_t seed = 0;
  bool pair = false;
  double delta_upper = 0.0;
  std::size_t r_prime = 1;
  int trials = 100;
  std::string out;
};

struct CertifyFlags {
  std::string mode = "constrained";
  std::string instance;
  std::string candidate;
  int r = 1;
  int k = 2;
  int t = 2;
  std::optional<double> delta;
  std::optional<double> delta_2r_plus_k;
  std::optional<double> delta_big;
  std::optional<double> eps;
  double lambda = 1e-2;
  std::string out;
};

struct LemmaFlags {
  std::uint64_t seed = 0;
  bench::SuiteOptions opts;
  std::string out;
};

struct BenchFlags {
  std::vector<std::size_t> m{8}, n{8}, r{1}, l{48};
  std::vector<double> eps{0.0};
  double lambda = 1e-2;
  bool lambda_eps = false;
  std::vector<std::string> solvers{"dca"};
  std::string kind = "gaussian";
  double a = 0.0;
  int trials = 1;
  std::uint64_t seed = 0;
  double threshold = 1e-3;
  bool certify = false;
  std::string out;
  SolverFlags cfg;
};

std::string default_out_dir() {
  const char* env = std::getenv("LSTARF_OUT_DIR");
  return env && *env ? env : ".";
}

std::string resolve(const Global& g, const std::string& given, const std::string& fallback) {
  if (!given.empty()) return given;
  return (fs::path(g.out_dir) / fallback).string();
}

void ensure_parent(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const std::string& path, const std::string& body) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << body;
  if (body.empty() || body.back() != '\n') os << '\n';
  if (!os) throw IoError("write failed: " + path);
}

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--max-outer", f.max_outer, "DC iterations cap")->capture_default_str();
  app->add_option("--max-inner", f.max_inner, "Proximal-gradient iterations per DC step")
      ->capture_default_str();
  app->add_option("--tol-outer", f.tol_outer, "Relative change in J")->capture_default_str();
  app->add_option("--tol-inner", f.tol_inner, "Relative change in the inner objective")
      ->capture_default_str();
  app->add_option("--step", f.step, "fixed|backtracking")->capture_default_str();
  app->add_flag("--no-accel", f.no_accel, "Disable momentum");
  app->add_option("--init", f.init, "adjoint|truth|zero")->capture_default_str();
  app->add_option("--seed", f.seed, "Seed recorded with the run")->capture_default_str();
}

solve::SolverConfig to_config(const SolverFlags& f) {
  solve::SolverConfig c;
  c.max_outer = f.max_outer;
  c.max_inner = f.max_inner;
  c.tol_outer = f.tol_outer;
  c.tol_inner = f.tol_inner;
  c.step_rule = solve::parse_step_rule(f.step);
  c.acceleration = !f.no_accel;
  c.init = solve::parse_init_mode(f.init);
  c.seed = f.seed;
  solve::validate(c);
  return c;
}

json config_json(const solve::SolverConfig& c) {
  return {{"max_outer", c.max_outer},   {"max_inner", c.max_inner},
          {"tol_outer", c.tol_outer},   {"tol_inner", c.tol_inner},
          {"step", solve::to_string(c.step_rule)}, {"acceleration", c.acceleration},
          {"init", solve::to_string(c.init)}, {"seed", c.seed}};
}

void print_config(std::ostream& out, const std::string& cmd, const json& cfg) {
  out << "lstarf " << cmd << " config: " << cfg.dump() << "\n";
}

measure::LinearOperator make_operator(const OperatorFlags& f) {
  measure::OperatorParams p;
  p.scale_a = f.a;
  p.omega = f.omega;
  const auto kind = measure::parse_operator_kind(f.kind);
  std::size_t l = f.l;
  if (kind == measure::OperatorKind::Identity || kind == measure::OperatorKind::ScaledIdentity)
    l = f.m * f.n;
  return measure::build_operator(kind, f.m, f.n, l, f.seed, p);
}

json operator_json(const OperatorFlags& f) {
  return {{"kind", f.kind}, {"m", f.m}, {"n", f.n}, {"l", f.l}, {"seed", f.seed}, {"a", f.a}};
}

int run_gen_operator(const Global& g, const GenFlags& f, std::ostream& out) {
  const std::string path = resolve(g, f.out, "operator.json");
  print_config(out, "gen operator", {{"operator", operator_json(f.op)}, {"out", path}});
  const auto op = make_operator(f.op);
  ensure_parent(path);
  fs::path mtx = fs::path(path);
  mtx.replace_extension(".mtx");
  measure::save_operator(op, path, mtx.string());
  out << "wrote " << path << "\n";
  return kOk;
}

int run_gen_instance(const Global& g, const GenFlags& f, std::ostream& out) {
  const std::string path = resolve(g, f.out, "instance.json");
  print_config(out, "gen instance",
               {{"operator", operator_json(f.op)},
                {"rank", f.rank},
                {"noise", f.noise},
                {"eps", f.eps},
                {"seed", f.op.seed},
                {"out", path}});
  const auto op = make_operator(f.op);
  if (f.rank < 1 || f.rank > std::min(f.op.m, f.op.n))
    throw ArgumentError("--rank must be in [1, min(m, n)]");
  Rng rng(f.op.seed, "gen/truth");
  DenseMatrix truth = random_low_rank(f.op.m, f.op.n, f.rank, rng);
  truth *= 1.0 / frobenius_norm(truth);
  const auto inst =
      measure::make_instance(op, truth, measure::parse_noise_kind(f.noise), f.eps, f.op.seed);
  ensure_parent(path);
  measure::save_instance(inst, path);
  out << "wrote " << path << "\n";
  return kOk;
}

int run_solve(const Global& g, const SolveFlags& f, std::ostream& out) {
  const auto inst = measure::load_instance(f.instance);
  const auto cfg = to_config(f.cfg);
  const std::string stem = resolve(g, f.out, "solution");
  const double eps = f.eps.value_or(inst.epsilon);
  json shown = {{"instance", f.instance}, {"solver", f.solver}, {"config", config_json(cfg)},
                {"out", stem}};
  if (f.solver == "dca" || f.solver == "nuclear") shown["lambda"] = f.lambda;
  if (f.solver == "path")
    shown["path"] = {{"lambda0", f.lambda0}, {"decay", f.decay}, {"feas_tol", f.feas_tol},
                     {"steps", f.path_steps}};
  if (f.solver == "discrepancy")
    shown["discrepancy"] = {{"eps", eps}, {"lambda_lo", f.lambda_lo}, {"lambda_hi", f.lambda_hi}};
  print_config(out, "solve", shown);

  const auto t0 = std::chrono::steady_clock::now();
  solve::SolveResult res;
  json extra;
  if (f.solver == "dca") {
    res = solve::dca_solve(inst, f.lambda, cfg);
  } else if (f.solver == "nuclear") {
    res = solve::nuclear_solve(inst, f.lambda, cfg);
  } else if (f.solver == "path") {
    auto pr = solve::penalty_path_solve(inst, f.lambda0, f.decay, f.feas_tol, cfg, f.path_steps);
    json pts = json::array();
    for (const auto& p : pr.points) {
      json o = {{"lambda", p.lambda}, {"residual", p.residual}, {"objective", p.objective}};
      if (p.residual_sq_bound) o["residual_sq_bound"] = *p.residual_sq_bound;
      pts.push_back(o);
    }
    extra["path"] = pts;
    res = std::move(pr.result);
  } else if (f.solver == "discrepancy") {
    solve::DiscrepancyOptions d;
    d.lambda_lo = f.lambda_lo;
    d.lambda_hi = f.lambda_hi;
    res = solve::discrepancy_solve(inst, eps, d, cfg);
  } else {
    throw ArgumentError("unknown --solver '" + f.solver + "' (expected dca|nuclear|path|discrepancy)");
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  const std::string x_file = stem + ".mtx";
  ensure_parent(x_file);
  write_matrix_market(x_file, res.x);
  json j = json::parse(solve::to_json(res, f.solver, fs::path(x_file).filename().string(),
                                      g.timing, ms));
  for (auto& [k, v] : extra.items()) j[k] = v;
  if (inst.x_true) j["error_to_truth"] = frobenius_norm(res.x - *inst.x_true);
  write_text(stem + ".json", j.dump(2));
  write_text(stem + ".trace.csv", solve::trace_csv(res));
  out << "status=" << solve::to_string(res.status) << " residual=" << res.residual
      << " J=" << res.objective_trace.back() << " wall_ms=" << ms << "\n";
  out << "wrote " << stem << ".{json,mtx,trace.csv}\n";
  return kOk;
}

int run_rip(const Global& g, const RipFlags& f, std::ostream& out) {
  const auto op = measure::load_operator(f.op);
  const std::string path = resolve(g, f.out, "rip.json");
  if (f.pair) {
    print_config(out, "rip",
                 {{"operator", f.op}, {"mode", "orthogonal-pair"}, {"r", f.r}, {"r_prime", f.r_prime},
                  {"delta_upper", f.delta_upper}, {"trials", f.trials}, {"seed", f.seed},
                  {"out", path}});
    const auto rep = rip::check_orthogonal_pair_bound(op, f.delta_upper, f.r, f.r_prime, f.trials, f.seed);
    json j = {{"trials", rep.trials},     {"violations", rep.violations},
              {"max_ratio", rep.max_ratio}, {"max_abs_inner", rep.max_abs_inner},
              {"delta_upper", rep.delta_upper}, {"holds", rep.holds}};
    write_text(path, j.dump(2));
    out << "holds=" << (rep.holds ? "true" : "false") << " max_ratio=" << rep.max_ratio << "\n";
    return rep.holds ? kOk : kCheckFailed;
  }

  rip::EstimatorOptions o{f.restarts, f.iterations, f.seed, g.threads};
  print_config(out, "rip",
               {{"operator", f.op}, {"r", f.r}, {"r_max", f.r_max}, {"restarts", f.restarts},
                {"iterations", f.iterations}, {"seed", f.seed}, {"threads", g.threads},
                {"out", path}});
  std::vector<rip::RipEstimate> ests;
  if (f.r_max > 0) {
    ests = rip::estimate_sweep(op, f.r_max, o);
  } else {
    ests.push_back(rip::estimate_delta(op, f.r, o));
  }
  json arr = json::array();
  fs::path base(path);
  for (const auto& e : ests) {
    fs::path w = base;
    w.replace_extension(".r" + std::to_string(e.r) + ".witness.mtx");
    write_matrix_market(w.string(), e.witness);
    arr.push_back(json::parse(rip::to_json(e, w.filename().string())));
    out << "r=" << e.r << " delta=" << e.delta << " certainty=" << rip::to_string(e.certainty) << "\n";
  }
  write_text(path, (ests.size() == 1 ? arr[0] : json{{"estimates", arr}}).dump(2));
  return kOk;
}

int run_certify(const Global& g, const CertifyFlags& f, std::ostream& out) {
  const std::string path = resolve(g, f.out, "certificate.json");
  if (f.mode == "constants") {
    const double d1 = f.delta_2r_plus_k.value_or(f.delta.value_or(0.0));
    const double d2 = f.delta_big.value_or(f.delta.value_or(0.0));
    print_config(out, "certify", {{"mode", f.mode}, {"r", f.r}, {"k", f.k}, {"t", f.t},
                                  {"delta_2r_plus_k", d1}, {"delta_big", d2}, {"out", path}});
    const auto c = certify::constrained_constants({f.r, f.k, d1, d2, f.eps.value_or(0.0)});
    json j = {{"mn_min_max", certify::mn_min_max(f.r, f.k)},
              {"beta", c.beta},
              {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)},
              {"alpha_bar", c.alpha_bar ? json(*c.alpha_bar) : json(nullptr)},
              {"hypothesis_ok", c.hypothesis_ok},
              {"delta4r_threshold", certify::delta4r_threshold(f.r)}};
    const auto ah = certify::alpha_hat(f.r, d1);
    j["alpha_hat"] = ah ? json(*ah) : json(nullptr);
    if (f.k >= 6) {
      const auto rc = certify::regularized_constants(f.t, f.k, d1, 0.0);
      j["theta_k"] = rc.theta_k;
      j["regularized_threshold"] = rc.threshold;
    }
    write_text(path, j.dump(2));
    out << j.dump() << "\n";
    return kOk;
  }

  if (f.instance.empty() || f.candidate.empty())
    throw ArgumentError("--instance and --candidate are required for mode " + f.mode);
  const auto inst = measure::load_instance(f.instance);
  const DenseMatrix cand = read_matrix_market(f.candidate);
  const auto& exact = inst.op.exact_delta();
  auto pick = [&](const std::optional<double>& specific, const char* name) {
    if (specific) return *specific;
    if (f.delta) return *f.delta;
    if (exact) return exact->value;
    throw ArgumentError(std::string("operator has no closed-form delta; pass --") + name +
                        " or --delta");
  };

  if (f.mode == "constrained") {
    certify::ConstrainedBoundParams p{f.r, f.k, pick(f.delta_2r_plus_k, "delta-2r-plus-k"),
                                      pick(f.delta_big, "delta-big"), f.eps.value_or(inst.epsilon)};
    print_config(out, "certify", {{"mode", f.mode}, {"instance", f.instance}, {"candidate", f.candidate},
                                  {"r", p.r}, {"k", p.k}, {"delta_2r_plus_k", p.delta_2r_plus_k},
                                  {"delta_big", p.delta_big}, {"epsilon", p.epsilon}, {"out", path}});
    const auto rep = certify::check_constrained_recovery(inst, cand, p);
    write_text(path, certify::to_json(rep));
    out << "verdict=" << certify::to_string(rep.verdict) << " observed=" << rep.observed_error;
    if (rep.bound_nuclear) out << " bound=" << *rep.bound_nuclear;
    out << "\n";
    return rep.verdict == certify::Verdict::Fail ? kCheckFailed : kOk;
  }
  if (f.mode == "regularized") {
    const double d = pick(std::nullopt, "delta");
    print_config(out, "certify", {{"mode", f.mode}, {"instance", f.instance}, {"candidate", f.candidate},
                                  {"t", f.t}, {"k", f.k}, {"delta_tk", d}, {"lambda", f.lambda},
                                  {"out", path}});
    const auto rep = certify::check_regularized_recovery(inst, cand, f.t, f.k, d, f.lambda);
    write_text(path, certify::to_json(rep));
    out << "verdict=" << certify::to_string(rep.verdict) << " observed=" << rep.observed_error;
    if (rep.bound) out << " bound=" << *rep.bound;
    out << "\n";
    return rep.verdict == certify::Verdict::Fail ? kCheckFailed : kOk;
  }
  if (f.mode == "replay") {
    print_config(out, "certify", {{"mode", f.mode}, {"instance", f.instance}, {"candidate", f.candidate},
                                  {"r", f.r}, {"k", f.k}, {"out", path}});
    const auto tr = certify::proof_replay_constrained(inst, cand, f.r, f.k);
    write_text(path, certify::to_json(tr));
    out << "gate=" << (tr.gate_passed ? "passed" : "failed")
        << " all_hold=" << (tr.all_hold ? "true" : "false") << "\n";
    if (!tr.gate_passed) return kOk;
    return tr.all_hold ? kOk : kCheckFailed;
  }
  if (f.mode == "lemma9") {
    print_config(out, "certify", {{"mode", f.mode}, {"instance", f.instance}, {"candidate", f.candidate},
                                  {"t", f.t}, {"k", f.k}, {"lambda", f.lambda}, {"out", path}});
    const auto tr = certify::lemma9_replay(inst, cand, f.t, f.k, f.lambda);
    write_text(path, certify::to_json(tr));
    out << "all_hold=" << (tr.all_hold ? "true" : "false") << "\n";
    return tr.all_hold ? kOk : kCheckFailed;
  }
  throw ArgumentError("unknown --mode '" + f.mode +
                      "' (expected constrained|regularized|replay|lemma9|constants)");
}

int run_lemmas(const Global& g, const LemmaFlags& f, std::ostream& out) {
  const std::string path = resolve(g, f.out, "lemmas.json");
  print_config(out, "lemmas", {{"seed", f.seed},
                               {"sandwich_samples", f.opts.sandwich_samples},
                               {"polytope_samples", f.opts.polytope_samples},
                               {"power_sum_samples", f.opts.power_sum_samples},
                               {"orthogonal_pair_trials", f.opts.orthogonal_pair_trials},
                               {"out", path}});
  const auto rep = bench::run_lemma_suite(f.seed, f.opts);
  write_text(path, bench::to_json(rep, g.timing));
  for (const auto& e : rep.entries)
    out << e.name << ": " << (e.checks - e.violations) << "/" << e.checks
        << " max_violation=" << e.max_violation << " runtime_ms=" << e.runtime_ms << "\n";
  out << (rep.ok() ? "all lemma checks passed" : "lemma violations found") << "\n";
  return rep.ok() ? kOk : kCheckFailed;
}

int run_bench(const Global& g, const BenchFlags& f, std::ostream& out) {
  bench::ExperimentSpec s;
  s.m = f.m;
  s.n = f.n;
  s.r = f.r;
  s.l = f.l;
  s.eps = f.eps;
  s.lambda = {f.lambda_eps, f.lambda};
  s.solvers.clear();
  for (const auto& x : f.solvers) s.solvers.push_back(bench::parse_solver(x));
  s.op_kind = measure::parse_operator_kind(f.kind);
  s.scale_a = f.a;
  s.trials = f.trials;
  s.base_seed = f.seed;
  s.success_threshold = f.threshold;
  s.certify = f.certify;
  s.record_timing = g.timing;
  s.threads = g.threads;
  s.config = to_config(f.cfg);
  s.csv_path = resolve(g, f.out, "bench.csv");
  print_config(out, "bench", {{"m", s.m}, {"n", s.n}, {"r", s.r}, {"l", s.l}, {"eps", s.eps},
                              {"lambda", f.lambda}, {"lambda_eps_multiple", f.lambda_eps},
                              {"solvers", f.solvers}, {"kind", f.kind}, {"a", f.a},
                              {"trials", f.trials}, {"seed", f.seed}, {"threshold", f.threshold},
                              {"certify", f.certify}, {"threads", g.threads},
                              {"config", config_json(s.config)}, {"out", s.csv_path}});
  const auto res = bench::run_experiment(s);
  std::size_t ok = 0;
  for (const auto& r : res.records) ok += r.rel_err <= s.success_threshold;
  out << "trials=" << res.records.size() << " successes=" << ok << "\n";
  for (const auto& fl : res.monotonicity_flags)
    out << "monotonicity flag: m=" << fl.m << " n=" << fl.n << " r=" << fl.r << " eps=" << fl.eps
        << " solver=" << bench::to_string(fl.solver) << " l " << fl.l_from << "->" << fl.l_to
        << " rate " << fl.rate_from << "->" << fl.rate_to << "\n";
  out << "wrote " << s.csv_path << "\n";
  return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"L_{*-F} low-rank recovery toolkit", "lstarf"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  g.out_dir = default_out_dir();
  app.add_option("--threads", g.threads, "Cap on worker threads")->capture_default_str();
  app.add_flag("--timing", g.timing, "Write wall-clock timings into output files");
  app.add_option("--out-dir", g.out_dir, "Default output directory (env LSTARF_OUT_DIR)");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate operators or instances");
  gen_cmd->require_subcommand(1);
  auto add_op_flags = [&](CLI::App* c) {
    c->add_option("--kind", gen.op.kind, "gaussian|entry-sampling|identity|scaled-identity")
        ->capture_default_str();
    c->add_option("--m", gen.op.m)->capture_default_str();
    c->add_option("--n", gen.op.n)->capture_default_str();
    c->add_option("--l", gen.op.l, "Measurements (identity kinds use m*n)")->capture_default_str();
    c->add_option("--seed", gen.op.seed)->capture_default_str();
    c->add_option("--a", gen.op.a, "scaled-identity factor in [0, 1)")->capture_default_str();
    c->add_option("--omega", gen.op.omega, "entry-sampling indices")->delimiter(',');
    c->add_option("--out", gen.out, "Output JSON path");
  };
  auto* gen_op = gen_cmd->add_subcommand("operator", "Build and save an operator");
  add_op_flags(gen_op);
  auto* gen_inst = gen_cmd->add_subcommand("instance", "Build and save a problem instance");
  add_op_flags(gen_inst);
  gen_inst->add_option("--rank", gen.rank, "Rank of the ground truth")->capture_default_str();
  gen_inst->add_option("--noise", gen.noise, "none|gaussian-rescaled")->capture_default_str();
  gen_inst->add_option("--eps", gen.eps, "Noise level ||s||_2")->capture_default_str();

  SolveFlags sv;
  auto* solve_cmd = app.add_subcommand("solve", "Run a solver on an instance");
  solve_cmd->add_option("--instance", sv.instance, "Instance JSON")->required();
  solve_cmd->add_option("--solver", sv.solver, "dca|nuclear|path|discrepancy")->capture_default_str();
  solve_cmd->add_option("--lambda", sv.lambda)->capture_default_str();
  solve_cmd->add_option("--lambda0", sv.lambda0, "Penalty path start")->capture_default_str();
  solve_cmd->add_option("--decay", sv.decay, "Penalty path decay")->capture_default_str();
  solve_cmd->add_option("--feas-tol", sv.feas_tol, "Penalty path residual target")->capture_default_str();
  solve_cmd->add_option("--path-steps", sv.path_steps)->capture_default_str();
  solve_cmd->add_option("--eps", sv.eps, "Discrepancy target (default: instance epsilon)");
  solve_cmd->add_option("--lambda-lo", sv.lambda_lo)->capture_default_str();
  solve_cmd->add_option("--lambda-hi", sv.lambda_hi)->capture_default_str();
  solve_cmd->add_option("--out", sv.out, "Output stem");
  add_solver_flags(solve_cmd, sv.cfg);

  RipFlags rp;
  auto* rip_cmd = app.add_subcommand("rip", "Estimate isometry constants");
  rip_cmd->add_option("--operator", rp.op, "Operator JSON")->required();
  rip_cmd->add_option("--r", rp.r)->capture_default_str();
  rip_cmd->add_option("--r-max", rp.r_max, "Sweep r = 1..r_max")->capture_default_str();
  rip_cmd->add_option("--restarts", rp.restarts)->capture_default_str();
  rip_cmd->add_option("--iterations", rp.iterations)->capture_default_str();
  rip_cmd->add_option("--seed", rp.seed)->capture_default_str();
  rip_cmd->add_flag("--orthogonal-pair", rp.pair, "Check the orthogonal-pair inequality instead");
  rip_cmd->add_option("--delta-upper", rp.delta_upper)->capture_default_str();
  rip_cmd->add_option("--r-prime", rp.r_prime)->capture_default_str();
  rip_cmd->add_option("--trials", rp.trials)->capture_default_str();
  rip_cmd->add_option("--out", rp.out, "Output JSON path");

  CertifyFlags cf;
  auto* cert_cmd = app.add_subcommand("certify", "Check recovery bounds and replay proofs");
  cert_cmd->add_option("--mode", cf.mode, "constrained|regularized|replay|lemma9|constants")
      ->capture_default_str();
  cert_cmd->add_option("--instance", cf.instance);
  cert_cmd->add_option("--candidate", cf.candidate, "Candidate matrix (.mtx)");
  cert_cmd->add_option("--r", cf.r)->capture_default_str();
  cert_cmd->add_option("--k", cf.k)->capture_default_str();
  cert_cmd->add_option("--t", cf.t)->capture_default_str();
  cert_cmd->add_option("--delta", cf.delta, "Trusted upper bound for every delta");
  cert_cmd->add_option("--delta-2r-plus-k", cf.delta_2r_plus_k);
  cert_cmd->add_option("--delta-big", cf.delta_big);
  cert_cmd->add_option("--eps", cf.eps, "Noise level (default: instance epsilon)");
  cert_cmd->add_option("--lambda", cf.lambda)->capture_default_str();
  cert_cmd->add_option("--out", cf.out, "Output JSON path");

  LemmaFlags lf;
  auto* lem_cmd = app.add_subcommand("lemmas", "Run the lemma verification suite");
  lem_cmd->add_option("--seed", lf.seed)->capture_default_str();
  lem_cmd->add_option("--sandwich-samples", lf.opts.sandwich_samples)->capture_default_str();
  lem_cmd->add_option("--polytope-samples", lf.opts.polytope_samples)->capture_default_str();
  lem_cmd->add_option("--power-sum-samples", lf.opts.power_sum_samples)->capture_default_str();
  lem_cmd->add_option("--pair-trials", lf.opts.orthogonal_pair_trials)->capture_default_str();
  lem_cmd->add_option("--out", lf.out, "Output JSON path");

  BenchFlags bf;
  auto* bench_cmd = app.add_subcommand("bench", "Run a recovery experiment grid");
  bench_cmd->add_option("--m", bf.m)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--n", bf.n)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--r", bf.r)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--l", bf.l)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--eps", bf.eps)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--lambda", bf.lambda)->capture_default_str();
  bench_cmd->add_flag("--lambda-eps-multiple", bf.lambda_eps, "Use lambda * eps when eps > 0");
  bench_cmd->add_option("--solver", bf.solvers, "dca|nuclear|path|discrepancy")->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--kind", bf.kind)->capture_default_str();
  bench_cmd->add_option("--a", bf.a)->capture_default_str();
  bench_cmd->add_option("--trials", bf.trials)->capture_default_str();
  bench_cmd->add_option("--base-seed", bf.seed)->capture_default_str();
  bench_cmd->add_option("--threshold", bf.threshold, "Success threshold on relative error")
      ->capture_default_str();
  bench_cmd->add_flag("--certify", bf.certify, "Record constrained-recovery verdicts");
  bench_cmd->add_option("--out", bf.out, "Output CSV path");
  add_solver_flags(bench_cmd, bf.cfg);

  std::vector<const char*> argv{"lstarf"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    const std::string sub = args.empty() ? "" : " " + args.front();
    err << "error: " << e.what() << ". Run 'lstarf" << sub << " --help' for usage.\n";
    return kUsage;
  }
  if (g.threads < 1) {
    err << "error: --threads must be >= 1.\n";
    return kUsage;
  }

  try {
    if (gen_op->parsed()) return run_gen_operator(g, gen, out);
    if (gen_inst->parsed()) return run_gen_instance(g, gen, out);
    if (solve_cmd->parsed()) return run_solve(g, sv, out);
    if (rip_cmd->parsed()) return run_rip(g, rp, out);
    if (cert_cmd->parsed()) return run_certify(g, cf, out);
    if (lem_cmd->parsed()) return run_lemmas(g, lf, out);
    if (bench_cmd->parsed()) return run_bench(g, bf, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleInputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace lstarf::cli
