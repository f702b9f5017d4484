#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "lstarf/certify/constants.hpp"
#include "lstarf/certify/lemmas.hpp"
#include "lstarf/certify/polytope.hpp"
#include "lstarf/experiment.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/random.hpp"
#include "lstarf/ripest.hpp"

namespace lstarf::bench {

bool SuiteReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.violations == 0; });
}

namespace {

class Tally {
 public:
  explicit Tally(std::string name) : start_(std::chrono::steady_clock::now()) {
    e_.name = std::move(name);
    e_.min_slack = INFINITY;
  }
  // slack >= -tol counts as a pass.
  void slack(double s, double tol) {
    ++e_.checks;
    e_.min_slack = std::min(e_.min_slack, s);
    if (s < -tol) {
      ++e_.violations;
      e_.max_violation = std::max(e_.max_violation, -s);
    }
  }
  void equal(bool same) {
    ++e_.checks;
    if (!same) {
      ++e_.violations;
      e_.max_violation = std::max(e_.max_violation, 1.0);
    }
  }
  SuiteEntry finish() {
    if (e_.checks == 0 || !std::isfinite(e_.min_slack)) e_.min_slack = 0.0;
    e_.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    return e_;
  }

 private:
  SuiteEntry e_;
  std::chrono::steady_clock::time_point start_;
};

std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

SuiteEntry mn_grid() {
  Tally t("mn_min_max_grid");
  for (int r = 1; r <= 12; ++r)
    for (int k = 1; k <= 12; ++k)
      t.equal(certify::mn_min_max(r, k) == certify::mn_min_max_bruteforce(r, k));
  return t.finish();
}

double rel_tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

std::vector<SuiteEntry> singular_value_sweeps(std::uint64_t seed, int samples) {
  Tally full("sandwich_full_dimension");
  Tally ranked("sandwich_numerical_rank");
  Tally rank_one("rank_one_vanishes");
  Tally support("sandwich_support_bounds");
  Rng rng(seed, "suite/sandwich");
  for (int i = 0; i < samples; ++i) {
    const std::size_t m = draw(rng, 1, 8);
    const std::size_t n = draw(rng, 1, 6);
    const std::size_t k = draw(rng, 1, std::min(m, n));
    const DenseMatrix x = i % 2 == 0 ? gaussian_matrix(m, n, rng) : random_low_rank(m, n, k, rng);
    const auto b = certify::singular_value_bounds(x);
    full.slack(b.full.lower_slack(), rel_tol(b.full.value));
    full.slack(b.full.upper_slack(), rel_tol(b.full.value));
    ranked.slack(b.ranked.lower_slack(), rel_tol(b.ranked.value));
    ranked.slack(b.ranked.upper_slack(), rel_tol(b.ranked.value));
    support.slack(b.support.lower_slack(), rel_tol(b.support.value));
    support.slack(b.support.upper_slack(), rel_tol(b.support.value));

    const DenseMatrix one = random_unit_low_rank(m, n, 1, rng);
    rank_one.slack(1e-10 - lstar_f(one).difference, 0.0);
  }
  return {full.finish(), ranked.finish(), rank_one.finish(), support.finish()};
}

SuiteEntry polytope_sweep(std::uint64_t seed, int samples) {
  Tally t("polytope_decomposition");
  Rng rng(seed, "suite/polytope");
  for (int i = 0; i < samples; ++i) {
    const std::size_t p = draw(rng, 1, 20);
    const std::size_t s = draw(rng, 1, p);
    const double alpha = 0.5 + 1.5 * rng.uniform();
    Vector v(p);
    for (double& x : v) {
      const double u = rng.uniform();
      x = u < 0.1 ? 0.0 : (u < 0.2 ? alpha : alpha * (2.0 * rng.uniform() - 1.0));
      if (rng.uniform() < 0.5) x = -x;
    }
    const double l1 = norm1(v);
    if (l1 > s * alpha) {
      const double shrink = s * alpha / l1 * (rng.uniform() < 0.3 ? 1.0 : rng.uniform());
      for (double& x : v) x *= shrink;
    }
    if (norm1(v) > s * alpha) continue;
    const auto d = certify::polytope_decompose(v, alpha, s);
    const auto rep = certify::check_decomposition(d, v);
    const double worst =
        std::max({rep.weight_sum_error, rep.reconstruction_error, rep.max_atom_violation});
    t.slack(1e-12 - worst, 0.0);
    t.slack(static_cast<double>(p + 1) - static_cast<double>(d.atoms.size()), 0.0);
  }
  return t.finish();
}

SuiteEntry power_sum_sweep(std::uint64_t seed, int samples) {
  Tally t("power_sum");
  Rng rng(seed, "suite/power-sum");
  const double exps[] = {1.0, 1.5, 2.0, 3.0};
  for (int i = 0; i < samples; ++i) {
    const std::size_t p = draw(rng, 1, 12);
    const std::size_t r = draw(rng, 1, p);
    Vector a(p);
    for (double& x : a) x = rng.uniform();
    std::sort(a.begin(), a.end(), std::greater<>());
    double head = 0.0;
    double tail = 0.0;
    for (std::size_t j = 0; j < p; ++j) (j < r ? head : tail) += a[j];
    if (tail > head) {
      const double f = head / tail * rng.uniform();
      for (std::size_t j = r; j < p; ++j) a[j] *= f;
    }
    const auto rep = certify::power_sum_check(a, r, 0.0, exps[i % 4]);
    t.slack(rep.slack, 1e-10);
  }
  return t.finish();
}

SuiteEntry constant_identities() {
  Tally t("constant_identities");
  for (int r = 1; r <= 6; ++r) {
    const double thr = certify::delta4r_threshold(r);
    for (int i = 0; i < 10; ++i) {
      const double d = thr * i / 10.0;
      const auto c = certify::constrained_constants({r, 2 * r, d, d, 0.0});
      const auto ah = certify::alpha_hat(r, d);
      if (!c.alpha || !ah) {
        t.equal(false);
        continue;
      }
      t.slack(1e-12 - std::abs(*c.alpha - *ah) / *ah, 0.0);
    }
  }
  const double theta9 = certify::regularized_constants(2, 9, 0.0, 0.0).theta_k;
  t.slack(1e-9 - std::abs(theta9 - (3.0 + 2.0 * std::sqrt(2.0))), 0.0);
  return t.finish();
}

SuiteEntry constant_monotonicity() {
  Tally t("constant_monotonicity");
  for (int r = 1; r <= 4; ++r)
    for (int k = 2; k <= 12; ++k) {
      double pa = 0.0, pab = 0.0;
      for (int i = 0; i < 50; ++i) {
        const double d = 0.02 * i;
        const auto c = certify::constrained_constants({r, k, d, d, 0.0});
        if (!c.alpha) break;
        t.slack(*c.alpha - pa, 1e-12);
        t.slack(*c.alpha_bar - pab, 1e-12);
        pa = *c.alpha;
        pab = *c.alpha_bar;
      }
    }
  for (int tt = 2; tt <= 4; ++tt)
    for (int k = 6; k <= 12; ++k) {
      double p1 = 0.0, p2 = 0.0;
      for (int i = 0; i < 50; ++i) {
        const auto c = certify::regularized_constants(tt, k, 0.01 * i, 0.5);
        if (!c.c1) break;
        t.slack(*c.c1 - p1, 1e-12);
        t.slack(*c.c2 - p2, 1e-12);
        p1 = *c.c1;
        p2 = *c.c2;
      }
    }
  return t.finish();
}

SuiteEntry orthogonal_pairs(std::uint64_t seed, int trials) {
  Tally t("orthogonal_pair_rip");
  const double as[] = {0.0, 0.2};
  for (double a : as) {
    const auto kind = a == 0.0 ? measure::OperatorKind::Identity : measure::OperatorKind::ScaledIdentity;
    measure::OperatorParams params;
    params.scale_a = a;
    const auto op = measure::build_operator(kind, 5, 4, 20, seed, params);
    const auto rep = rip::check_orthogonal_pair_bound(op, a, 2, 2, trials, seed);
    t.slack(static_cast<double>(-rep.violations), 0.0);
  }
  return t.finish();
}

}  // namespace

SuiteReport run_lemma_suite(std::uint64_t seed, const SuiteOptions& opts) {
  SuiteReport rep;
  rep.seed = seed;
  rep.entries.push_back(mn_grid());
  for (auto& e : singular_value_sweeps(seed, opts.sandwich_samples)) rep.entries.push_back(e);
  rep.entries.push_back(polytope_sweep(seed, opts.polytope_samples));
  rep.entries.push_back(power_sum_sweep(seed, opts.power_sum_samples));
  rep.entries.push_back(constant_identities());
  rep.entries.push_back(constant_monotonicity());
  rep.entries.push_back(orthogonal_pairs(seed, opts.orthogonal_pair_trials));
  return rep;
}

std::string to_json(const SuiteReport& rep, bool include_timing) {
  nlohmann::json j;
  j["seed"] = rep.seed;
  j["ok"] = rep.ok();
  nlohmann::json arr = nlohmann::json::array();
  for (const SuiteEntry& e : rep.entries) {
    nlohmann::json o = {{"name", e.name},
                        {"checks", e.checks},
                        {"passed", e.checks - e.violations},
                        {"violations", e.violations},
                        {"max_violation", e.max_violation},
                        {"min_slack", e.min_slack}};
    if (include_timing) o["runtime_ms"] = e.runtime_ms;
    arr.push_back(o);
  }
  j["lemmas"] = arr;
  return j.dump(2);
}

}  // namespace lstarf::bench
