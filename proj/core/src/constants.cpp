#include "lstarf/certify/constants.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <string>

#include "lstarf/error.hpp"

namespace lstarf::certify {

namespace {

void check_delta(double d, const char* name) {
  if (!(d >= 0.0 && d < 1.0)) {
    throw ArgumentError(std::string(name) + " must lie in [0, 1)");
  }
}

int split_value(int r, int k, int m1, int n1) {
  const int m2 = r - m1;
  const int n2 = r - n1;
  return std::max(m1 + n1 + k, m2 + n2 + 2 * k);
}

}  // namespace

int mn_min_max(int r, int k) {
  if (r < 1 || k < 1) throw ArgumentError("mn_min_max: r and k must be >= 1");
  return std::max(r + (3 * k + 1) / 2, 2 * k);
}

int mn_min_max_bruteforce(int r, int k) {
  if (r < 1 || k < 1) throw ArgumentError("mn_min_max_bruteforce: r and k must be >= 1");
  if (r > 64) throw ArgumentError("mn_min_max_bruteforce: r > 64 exceeds the enumeration budget");
  int best = INT_MAX;
  for (int m1 = 0; m1 <= r; ++m1)
    for (int n1 = 0; n1 <= r; ++n1) best = std::min(best, split_value(r, k, m1, n1));
  return best;
}

std::array<int, 4> optimal_block_split(int r, int k) {
  const int target = mn_min_max(r, k);
  std::array<int, 4> s{r, 0, r, 0};
  if (k < 2 * r) {
    // m1 = ceil(r/2 + k/4 [+ 1/4 for odd k]); everything else follows.
    const int extra = (k % 2 == 1) ? 1 : 0;
    const int m1 = (2 * r + k + extra + 3) / 4;
    const int half = (k + extra) / 2;
    s = {m1, r - m1, r + half - m1, m1 - half};
  }
  const bool feasible = std::all_of(s.begin(), s.end(), [r](int v) { return v >= 0 && v <= r; });
  if (feasible && split_value(r, k, s[0], s[2]) == target) return s;
  for (int m1 = 0; m1 <= r; ++m1)
    for (int n1 = 0; n1 <= r; ++n1)
      if (split_value(r, k, m1, n1) == target) return {m1, r - m1, n1, r - n1};
  throw ArgumentError("optimal_block_split: no split attains the minimum");
}

ConstrainedConstants constrained_constants(const ConstrainedBoundParams& p) {
  if (p.r < 1) throw ArgumentError("constrained_constants: r must be >= 1");
  if (p.k < 2) throw ArgumentError("constrained_constants: k must be >= 2");
  check_delta(p.delta_2r_plus_k, "delta_2r_plus_k");
  check_delta(p.delta_big, "delta_big");
  if (!(p.epsilon >= 0.0)) throw ArgumentError("constrained_constants: epsilon must be >= 0");

  const double s2r = std::sqrt(2.0 * p.r);
  const double sk = std::sqrt(static_cast<double>(p.k));
  const double d1 = p.delta_2r_plus_k;
  const double d2 = p.delta_big;
  const std::vector<std::pair<std::string, double>> in = {
      {"r", p.r}, {"k", p.k}, {"delta_2r_plus_k", d1}, {"delta_big", d2}};

  ConstrainedConstants c;
  c.beta = std::sqrt(2.0) * d2 * (s2r + 1.0) / ((1.0 - d1) * (sk - 1.0));
  c.provenance.push_back(
      {"beta", "sqrt(2)*delta_big*(sqrt(2r)+1)/((1-delta_2r_plus_k)*(sqrt(k)-1))", in, c.beta});
  c.hypothesis_ok = c.beta < 1.0;
  if (c.hypothesis_ok) {
    const double a = (2.0 * (s2r + 1.0) + 2.0 * c.beta * (sk - 1.0)) /
                     ((sk - 1.0) * (1.0 - c.beta) * (s2r + 1.0));
    const double ab = 2.0 * (sk + s2r) * std::sqrt(1.0 + d1) /
                      ((sk - 1.0) * (1.0 - c.beta) * (1.0 - d1));
    c.alpha = a;
    c.alpha_bar = ab;
    auto in_b = in;
    in_b.emplace_back("beta", c.beta);
    c.provenance.push_back(
        {"alpha", "(2(sqrt(2r)+1)+2*beta*(sqrt(k)-1))/((sqrt(k)-1)(1-beta)(sqrt(2r)+1))", in_b, a});
    c.provenance.push_back(
        {"alpha_bar",
         "2(sqrt(k)+sqrt(2r))*sqrt(1+delta_2r_plus_k)/((sqrt(k)-1)(1-beta)(1-delta_2r_plus_k))",
         in_b, ab});
  }
  return c;
}

double delta4r_threshold(int r) {
  if (r < 1) throw ArgumentError("delta4r_threshold: r must be >= 1");
  const double s = std::sqrt(2.0 * r);
  return (s - 1.0) / (s - 1.0 + std::sqrt(2.0) * (s + 1.0));
}

std::optional<double> alpha_hat(int r, double delta_4r) {
  if (r < 1) throw ArgumentError("alpha_hat: r must be >= 1");
  check_delta(delta_4r, "delta_4r");
  if (!(delta_4r < delta4r_threshold(r))) return std::nullopt;
  const double s = std::sqrt(2.0 * r);
  return (2.0 + (2.0 * std::sqrt(2.0) - 2.0) * delta_4r) /
         ((s - 1.0) - ((s - 1.0) + std::sqrt(2.0) * (s + 1.0)) * delta_4r);
}

RegularizedConstants regularized_constants(int t, int k, double delta_tk, double eta) {
  if (t <= 1) throw ArgumentError("regularized_constants: t must be an integer > 1");
  if (k < 6) throw ArgumentError("regularized_constants: k must be >= 6");
  check_delta(delta_tk, "delta_tk");
  if (!(eta >= 0.0)) throw ArgumentError("regularized_constants: eta must be >= 0");

  RegularizedConstants c;
  c.t = t;
  c.k = k;
  c.delta_tk = delta_tk;
  c.eta = eta;
  const double sk = std::sqrt(static_cast<double>(k));
  const double s2 = std::sqrt(2.0);
  const double d = delta_tk;

  c.theta_k = (sk + s2 - 1.0) / (sk - s2 - 1.0);
  c.threshold = std::sqrt((t - 1.0) / (t + c.theta_k * c.theta_k - 1.0));
  c.beta1 = d / std::sqrt((t - 1.0) * (1.0 - d * d));
  c.gamma1 = 2.0 / ((1.0 - d) * std::sqrt(1.0 + d));
  c.beta1_hat = (s2 - 1.0) * c.beta1 + 1.0;
  c.gamma1_hat = sk * c.gamma1 + eta;
  c.xi1 = std::sqrt(2.0 * k) * c.gamma1 + c.beta1_hat * eta;
  const double denom = sk * (1.0 - c.beta1) * c.gamma1_hat;
  c.kappa1 = 1.0 - (c.beta1_hat * c.gamma1_hat + c.xi1) / denom;

  const std::vector<std::pair<std::string, double>> in = {
      {"t", t}, {"k", k}, {"delta_tk", d}, {"eta", eta}};
  c.provenance = {
      {"theta_k", "(sqrt(k)+sqrt(2)-1)/(sqrt(k)-sqrt(2)-1)", in, c.theta_k},
      {"threshold", "sqrt((t-1)/(t+theta_k^2-1))", in, c.threshold},
      {"beta1", "delta_tk/sqrt((t-1)(1-delta_tk^2))", in, c.beta1},
      {"gamma1", "2/((1-delta_tk)*sqrt(1+delta_tk))", in, c.gamma1},
      {"beta1_hat", "(sqrt(2)-1)*beta1+1", in, c.beta1_hat},
      {"gamma1_hat", "sqrt(k)*gamma1+eta", in, c.gamma1_hat},
      {"xi1", "sqrt(2k)*gamma1+beta1_hat*eta", in, c.xi1},
      {"kappa1", "1-(beta1_hat*gamma1_hat+xi1)/(sqrt(k)(1-beta1)*gamma1_hat)", in, c.kappa1},
  };
  if (c.beta1 < 1.0 && c.kappa1 > 0.0) {
    c.c1 = 2.0 * (c.beta1_hat * c.gamma1_hat + c.xi1) / (denom * c.kappa1);
    c.c2 = 2.0 * c.xi1 * c.gamma1_hat / (sk * (1.0 - c.beta1) * c.kappa1);
    c.provenance.push_back(
        {"C1", "2(beta1_hat*gamma1_hat+xi1)/(sqrt(k)(1-beta1)*gamma1_hat*kappa1)", in, *c.c1});
    c.provenance.push_back({"C2", "2*xi1*gamma1_hat/(sqrt(k)(1-beta1)*kappa1)", in, *c.c2});
  }
  c.hypothesis_ok = d < c.threshold && c.kappa1 > 0.0 && c.beta1 < 1.0;
  return c;
}

}  // namespace lstarf::certify
