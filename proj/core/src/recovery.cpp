#include "lstarf/certify/recovery.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lstarf/error.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/solve.hpp"

namespace lstarf::certify {

using nlohmann::json;

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skipped: return "SKIPPED";
    case Verdict::HypothesisFailed: return "HYPOTHESIS_FAILED";
    case Verdict::NoAdmissibleK: return "NO_ADMISSIBLE_K";
  }
  return "?";
}

TracedInequality make_inequality(std::string name, double lhs, double rhs) {
  TracedInequality q;
  q.name = std::move(name);
  q.lhs = lhs;
  q.rhs = rhs;
  q.holds = lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
  return q;
}

namespace {

const DenseMatrix& require_truth(const measure::ProblemInstance& inst) {
  if (!inst.x_true) throw ArgumentError("certificate requires an instance with x_true");
  return *inst.x_true;
}

void check_shape(const measure::ProblemInstance& inst, const DenseMatrix& c) {
  if (c.rows() != inst.op.m() || c.cols() != inst.op.n())
    throw ArgumentError("candidate shape does not match the operator");
}

// Tails run over the numerical support, so an exactly rank-r truth has a
// zero tail rather than one made of SVD rounding.
double tail_sum(const Vector& s, std::size_t r) {
  double acc = 0.0;
  const std::size_t rank = numerical_rank(s);
  for (std::size_t i = r; i < rank; ++i) acc += s[i];
  return acc;
}

double tail_l2(const Vector& s, std::size_t r) {
  double acc = 0.0;
  const std::size_t rank = numerical_rank(s);
  for (std::size_t i = r; i < rank; ++i) acc += s[i] * s[i];
  return std::sqrt(acc);
}

bool constrained_gate(const measure::ProblemInstance& inst, const DenseMatrix& c, double eps,
                      double& residual, double& l_cand, double& l_truth) {
  residual = measure::residual_norm(inst.op, c, inst.b);
  l_cand = lstar_f(c).difference;
  l_truth = lstar_f(*inst.x_true).difference;
  return residual <= eps + 1e-9 && l_cand <= l_truth + 1e-9;
}

json provenance_json(const std::vector<Constant>& cs) {
  json arr = json::array();
  for (const Constant& c : cs) {
    json in = json::object();
    for (const auto& [k, v] : c.inputs) in[k] = v;
    arr.push_back({{"name", c.name}, {"formula", c.formula}, {"inputs", in}, {"value", c.value}});
  }
  return arr;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json inequalities_json(const std::vector<TracedInequality>& qs) {
  json arr = json::array();
  for (const auto& q : qs)
    arr.push_back({{"name", q.name},
                   {"lhs", q.lhs},
                   {"rhs", q.rhs},
                   {"slack", q.slack()},
                   {"checked", q.checked},
                   {"holds", q.holds}});
  return arr;
}

bool all_checked_hold(const std::vector<TracedInequality>& qs) {
  return std::all_of(qs.begin(), qs.end(), [](const auto& q) { return !q.checked || q.holds; });
}

}  // namespace

ConstrainedBoundReport check_constrained_recovery(const measure::ProblemInstance& inst,
                                                  const DenseMatrix& candidate,
                                                  const ConstrainedBoundParams& p) {
  const DenseMatrix& truth = require_truth(inst);
  check_shape(inst, candidate);
  ConstrainedBoundReport rep;
  rep.params = p;
  rep.constants = constrained_constants(p);
  rep.hypothesis_ok = rep.constants.hypothesis_ok;

  const long m = static_cast<long>(inst.op.m());
  const long n = static_cast<long>(inst.op.n());
  const long t_hat = std::min(m - p.r, n - p.r);
  rep.k_admissible = p.k >= 2 && p.k <= t_hat;

  const Vector sig = singular_values(truth);
  rep.tail_nuclear = tail_sum(sig, static_cast<std::size_t>(p.r));
  rep.tail_frobenius = tail_l2(sig, static_cast<std::size_t>(p.r));
  if (rep.hypothesis_ok) {
    rep.bound_nuclear = *rep.constants.alpha * rep.tail_nuclear + *rep.constants.alpha_bar * p.epsilon;
    rep.bound_frobenius =
        *rep.constants.alpha * rep.tail_frobenius + *rep.constants.alpha_bar * p.epsilon;
  }
  rep.observed_error = frobenius_norm(candidate - truth);
  rep.candidate_admissible = constrained_gate(inst, candidate, p.epsilon, rep.residual,
                                              rep.lstarf_candidate, rep.lstarf_truth);

  if (!rep.candidate_admissible) {
    rep.verdict = Verdict::Skipped;
  } else if (!rep.k_admissible) {
    rep.verdict = Verdict::NoAdmissibleK;
  } else if (!rep.hypothesis_ok) {
    rep.verdict = Verdict::HypothesisFailed;
  } else {
    rep.verdict = rep.observed_error <= *rep.bound_nuclear + 1e-7 ? Verdict::Pass : Verdict::Fail;
  }
  return rep;
}

RegularizedBoundReport check_regularized_recovery(const measure::ProblemInstance& inst,
                                                  const DenseMatrix& candidate, int t, int k,
                                                  double delta_tk, double lambda) {
  const DenseMatrix& truth = require_truth(inst);
  check_shape(inst, candidate);
  if (!(lambda > 0.0)) throw ArgumentError("check_regularized_recovery: lambda must be > 0");
  RegularizedBoundReport rep;
  rep.lambda = lambda;
  rep.epsilon = inst.epsilon;
  rep.constants = regularized_constants(t, k, delta_tk, inst.epsilon / lambda);
  if (rep.constants.c1 && rep.constants.c2)
    rep.bound = *rep.constants.c1 * nuclear_norm(truth) + *rep.constants.c2 * lambda;
  rep.observed_error = frobenius_norm(candidate - truth);
  rep.objective_candidate = solve::objective(inst, candidate, lambda);
  rep.objective_truth = solve::objective(inst, truth, lambda);
  rep.candidate_admissible = rep.objective_candidate <= rep.objective_truth + 1e-9;

  if (!rep.candidate_admissible) {
    rep.verdict = Verdict::Skipped;
  } else if (!rep.constants.hypothesis_ok || !rep.bound) {
    rep.verdict = Verdict::HypothesisFailed;
  } else {
    rep.verdict = rep.observed_error <= *rep.bound + 1e-7 ? Verdict::Pass : Verdict::Fail;
  }
  return rep;
}

ConstrainedReplayTrace proof_replay_constrained(const measure::ProblemInstance& inst,
                                                const DenseMatrix& candidate, int r, int k,
                                                const std::optional<std::array<int, 4>>& split) {
  const DenseMatrix& truth = require_truth(inst);
  check_shape(inst, candidate);
  const std::size_t m = truth.rows();
  const std::size_t n = truth.cols();
  if (r < 1 || static_cast<std::size_t>(r) > std::min(m, n))
    throw ArgumentError("proof_replay_constrained: r must be in [1, min(m, n)]");
  if (k < 2) throw ArgumentError("proof_replay_constrained: k must be >= 2");

  ConstrainedReplayTrace tr;
  tr.split = split ? *split : optimal_block_split(r, k);
  const auto [m1, m2, n1, n2] = tr.split;
  if (m1 < 0 || m2 < 0 || n1 < 0 || n2 < 0 || m1 + m2 != r || n1 + n2 != r)
    throw ArgumentError("proof_replay_constrained: split must satisfy m1 + m2 = n1 + n2 = r");

  double l_cand = 0.0;
  double l_truth = 0.0;
  tr.gate_passed = constrained_gate(inst, candidate, inst.epsilon, tr.residual, l_cand, l_truth);

  const SvdFactors f = svd(truth);
  const DenseMatrix z = candidate - truth;
  const DenseMatrix w = matmul(matmul_tn(f.u, z), f.v);
  const std::size_t ru = static_cast<std::size_t>(r);
  auto row_block = [&](std::size_t i) { return i < static_cast<std::size_t>(m1) ? 1 : (i < ru ? 2 : 3); };
  auto col_block = [&](std::size_t j) { return j < static_cast<std::size_t>(n1) ? 1 : (j < ru ? 2 : 3); };

  DenseMatrix w1(m, n);
  DenseMatrix w2(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const int a = row_block(i);
      const int b = col_block(j);
      if (a == 1 || b == 1) {
        w1(i, j) = w(i, j);
      } else if (a == 2 || b == 2) {
        w2(i, j) = w(i, j);
      }
    }
  }
  const DenseMatrix wr = w1 + w2;
  tr.z_frobenius = frobenius_norm(z);
  tr.z1_frobenius = frobenius_norm(w1);
  tr.z2_frobenius = frobenius_norm(w2);
  const LStarF zr = lstar_f(wr);
  tr.zr_nuclear = zr.nuclear;
  tr.zr_frobenius = zr.frobenius;

  Vector s33;
  if (m > ru && n > ru) s33 = singular_values(w.block(ru, ru, m - ru, n - ru));
  const LStarF zrc = lstar_f(s33);
  tr.zrc_nuclear = zrc.nuclear;
  tr.zrc_frobenius = zrc.frobenius;
  tr.truth_tail_nuclear = tail_sum(f.sigma, ru);

  const std::size_t ku = static_cast<std::size_t>(k);
  for (std::size_t start = 0; start < s33.size(); start += ku) {
    const std::size_t end = std::min(s33.size(), start + ku);
    const LStarF g = lstar_f(std::span<const double>(s33).subspan(start, end - start));
    tr.group_frobenius.push_back(g.frobenius);
    tr.group_nuclear.push_back(g.nuclear);
  }

  if (tr.gate_passed) {
    const double sk1 = std::sqrt(static_cast<double>(k)) - 1.0;
    const double s2r1 = std::sqrt(2.0 * r) + 1.0;
    tr.inequalities.push_back(make_inequality(
        "zrc_ineq", zrc.difference, zr.nuclear + zr.frobenius + 2.0 * tr.truth_tail_nuclear));

    double tail_groups = 0.0;
    double lead_gaps = 0.0;
    double all_gaps = 0.0;
    for (std::size_t i = 0; i < tr.group_frobenius.size(); ++i) {
      const double gap = tr.group_nuclear[i] - tr.group_frobenius[i];
      all_gaps += gap;
      if (i >= 1) tail_groups += tr.group_frobenius[i];
      if (i + 1 < tr.group_frobenius.size()) lead_gaps += gap;
    }
    tr.inequalities.push_back(make_inequality("sum_zj.groups", tail_groups, lead_gaps / sk1));
    tr.inequalities.push_back(make_inequality("sum_zj.all_groups", lead_gaps / sk1, all_gaps / sk1));
    tr.inequalities.push_back(
        make_inequality("sum_zj.z3", all_gaps / sk1, zrc.difference / sk1));
    tr.inequalities.push_back(make_inequality(
        "sum_zj", tail_groups,
        s2r1 / sk1 * zr.frobenius + 2.0 / sk1 * tr.truth_tail_nuclear));
  }
  tr.all_hold = tr.gate_passed && all_checked_hold(tr.inequalities);
  return tr;
}

Lemma9Trace lemma9_replay(const measure::ProblemInstance& inst, const DenseMatrix& candidate,
                          int t, int k, double lambda) {
  const DenseMatrix& truth = require_truth(inst);
  check_shape(inst, candidate);
  const auto& exact = inst.op.exact_delta();
  if (!exact)
    throw ArgumentError(
        "lemma9_replay: operator has no closed-form delta; an estimated lower bound cannot "
        "verify these inequalities");
  if (t <= 1 || k < 1) throw ArgumentError("lemma9_replay: need t > 1 and k >= 1");
  if (!(lambda > 0.0)) throw ArgumentError("lemma9_replay: lambda must be > 0");

  Lemma9Trace tr;
  tr.t = t;
  tr.k = k;
  tr.lambda = lambda;
  tr.delta_tk = exact->value;
  const double d = tr.delta_tk;
  tr.beta1 = d / std::sqrt((t - 1.0) * (1.0 - d * d));
  tr.gamma1 = 2.0 / ((1.0 - d) * std::sqrt(1.0 + d));

  const DenseMatrix h_mat = candidate - truth;
  const Vector h = singular_values(h_mat);
  const std::size_t top = std::min(h.size(), static_cast<std::size_t>(k));
  double top_sq = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i < top) {
      tr.h_top_l1 += h[i];
      top_sq += h[i] * h[i];
    } else {
      tr.h_rest_l1 += h[i];
    }
  }
  tr.h_top_l2 = std::sqrt(top_sq);
  tr.h_l2 = norm2(h);
  tr.ah_norm = norm2(inst.op.apply(h_mat));

  const double sk = std::sqrt(static_cast<double>(k));
  tr.inequalities.push_back(make_inequality(
      "hkleq", tr.h_top_l2, tr.beta1 / sk * tr.h_rest_l1 + tr.gamma1 * tr.ah_norm));

  const double j_cand = solve::objective(inst, candidate, lambda);
  const double j_truth = solve::objective(inst, truth, lambda);
  tr.gate_passed = j_cand <= j_truth + 1e-9;
  const double eps = inst.epsilon;
  const double xn = nuclear_norm(truth);
  auto q1 = make_inequality(
      "inequ_h", tr.ah_norm * tr.ah_norm - 2.0 * eps * tr.ah_norm,
      2.0 * lambda * (2.0 * xn + tr.h_top_l1 - tr.h_rest_l1 + tr.h_l2));
  auto q2 = make_inequality("inequ_hc", tr.h_rest_l1,
                            2.0 * xn + tr.h_top_l1 + tr.h_l2 + eps / lambda * tr.ah_norm);
  q1.checked = q2.checked = tr.gate_passed;
  tr.inequalities.push_back(q1);
  tr.inequalities.push_back(q2);
  tr.all_hold = all_checked_hold(tr.inequalities);
  return tr;
}

std::string to_json(const ConstrainedBoundReport& r) {
  json j;
  j["kind"] = "constrained";
  j["params"] = {{"r", r.params.r},
                 {"k", r.params.k},
                 {"delta_2r_plus_k", r.params.delta_2r_plus_k},
                 {"delta_big", r.params.delta_big},
                 {"epsilon", r.params.epsilon}};
  j["beta"] = r.constants.beta;
  j["alpha"] = opt(r.constants.alpha);
  j["alpha_bar"] = opt(r.constants.alpha_bar);
  j["hypothesis_ok"] = r.hypothesis_ok;
  j["k_admissible"] = r.k_admissible;
  j["tail_nuclear"] = r.tail_nuclear;
  j["tail_frobenius"] = r.tail_frobenius;
  j["bound_nuclear"] = opt(r.bound_nuclear);
  j["bound_frobenius"] = opt(r.bound_frobenius);
  j["observed_error"] = r.observed_error;
  j["residual"] = r.residual;
  j["lstarf_candidate"] = r.lstarf_candidate;
  j["lstarf_truth"] = r.lstarf_truth;
  j["candidate_admissible"] = r.candidate_admissible;
  j["verdict"] = to_string(r.verdict);
  j["provenance"] = provenance_json(r.constants.provenance);
  return j.dump(2);
}

std::string to_json(const RegularizedBoundReport& r) {
  const RegularizedConstants& c = r.constants;
  json j;
  j["kind"] = "regularized";
  j["t"] = c.t;
  j["k"] = c.k;
  j["delta_tk"] = c.delta_tk;
  j["eta"] = c.eta;
  j["lambda"] = r.lambda;
  j["epsilon"] = r.epsilon;
  j["theta_k"] = c.theta_k;
  j["threshold"] = c.threshold;
  j["beta1"] = c.beta1;
  j["gamma1"] = c.gamma1;
  j["beta1_hat"] = c.beta1_hat;
  j["gamma1_hat"] = c.gamma1_hat;
  j["xi1"] = c.xi1;
  j["kappa1"] = c.kappa1;
  j["C1"] = opt(c.c1);
  j["C2"] = opt(c.c2);
  j["hypothesis_ok"] = c.hypothesis_ok;
  j["bound"] = opt(r.bound);
  j["observed_error"] = r.observed_error;
  j["objective_candidate"] = r.objective_candidate;
  j["objective_truth"] = r.objective_truth;
  j["candidate_admissible"] = r.candidate_admissible;
  j["verdict"] = to_string(r.verdict);
  j["provenance"] = provenance_json(c.provenance);
  return j.dump(2);
}

std::string to_json(const ConstrainedReplayTrace& t) {
  json j;
  j["kind"] = "replay";
  j["split"] = {{"m1", t.split[0]}, {"m2", t.split[1]}, {"n1", t.split[2]}, {"n2", t.split[3]}};
  j["gate_passed"] = t.gate_passed;
  j["residual"] = t.residual;
  j["z_frobenius"] = t.z_frobenius;
  j["z1_frobenius"] = t.z1_frobenius;
  j["z2_frobenius"] = t.z2_frobenius;
  j["zr_nuclear"] = t.zr_nuclear;
  j["zr_frobenius"] = t.zr_frobenius;
  j["zrc_nuclear"] = t.zrc_nuclear;
  j["zrc_frobenius"] = t.zrc_frobenius;
  j["truth_tail_nuclear"] = t.truth_tail_nuclear;
  j["group_frobenius"] = t.group_frobenius;
  j["group_nuclear"] = t.group_nuclear;
  j["inequalities"] = inequalities_json(t.inequalities);
  j["all_hold"] = t.all_hold;
  return j.dump(2);
}

std::string to_json(const Lemma9Trace& t) {
  json j;
  j["kind"] = "lemma9";
  j["t"] = t.t;
  j["k"] = t.k;
  j["delta_tk"] = t.delta_tk;
  j["lambda"] = t.lambda;
  j["beta1"] = t.beta1;
  j["gamma1"] = t.gamma1;
  j["gate_passed"] = t.gate_passed;
  j["h_top_l2"] = t.h_top_l2;
  j["h_top_l1"] = t.h_top_l1;
  j["h_rest_l1"] = t.h_rest_l1;
  j["h_l2"] = t.h_l2;
  j["ah_norm"] = t.ah_norm;
  j["inequalities"] = inequalities_json(t.inequalities);
  j["all_hold"] = t.all_hold;
  return j.dump(2);
}

}  // namespace lstarf::certify
