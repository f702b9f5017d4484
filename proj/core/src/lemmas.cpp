#include "lstarf/certify/lemmas.hpp"

#include <cmath>

#include "lstarf/error.hpp"
#include "lstarf/linalg.hpp"

namespace lstarf::certify {

SingularValueBounds singular_value_bounds(const DenseMatrix& x) {
  return singular_value_bounds(singular_values(x));
}

SingularValueBounds singular_value_bounds(std::span<const double> sigma) {
  SingularValueBounds out;
  const LStarF l = lstar_f(sigma);
  out.t = sigma.size();
  out.rank = numerical_rank(sigma);

  const double t = static_cast<double>(out.t);
  out.full = {(t - std::sqrt(t)) * (out.t ? sigma[out.t - 1] : 0.0), l.difference,
              (std::sqrt(t) - 1.0) * l.frobenius};

  const double r = static_cast<double>(out.rank);
  const double sr = out.rank ? sigma[out.rank - 1] : 0.0;
  out.ranked = {(r - std::sqrt(r)) * sr, l.difference, (std::sqrt(r) - 1.0) * l.frobenius};
  out.support = {out.rank ? (r - 1.0) / 2.0 * sr : 0.0, l.difference,
                 out.rank ? (std::sqrt(r) - 1.0) * l.frobenius : 0.0};
  return out;
}

PowerSumReport power_sum_check(std::span<const double> a, std::size_t r, double eta,
                               double alpha_exp) {
  if (r < 1 || r > a.size()) throw InfeasibleInputError("power_sum_check: r must be in [1, len(a)]");
  if (!(eta >= 0.0)) throw InfeasibleInputError("power_sum_check: eta must be >= 0");
  if (!(alpha_exp >= 1.0)) throw InfeasibleInputError("power_sum_check: alpha must be >= 1");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !std::isfinite(a[i]))
      throw InfeasibleInputError("power_sum_check: entries must be finite and nonnegative");
    if (i > 0 && a[i] > a[i - 1])
      throw InfeasibleInputError("power_sum_check: a must be nonincreasing");
  }
  double head = 0.0;
  double tail = 0.0;
  double head_p = 0.0;
  double tail_p = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = std::pow(a[i], alpha_exp);
    if (i < r) {
      head += a[i];
      head_p += p;
    } else {
      tail += a[i];
      tail_p += p;
    }
  }
  if (head + eta < tail)
    throw InfeasibleInputError("power_sum_check: requires sum_{i<=r} a_i + eta >= sum_{i>r} a_i");

  const double rd = static_cast<double>(r);
  PowerSumReport rep;
  rep.lhs = tail_p;
  rep.rhs = rd * std::pow(std::pow(head_p / rd, 1.0 / alpha_exp) + eta / rd, alpha_exp);
  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs + 1e-10;
  return rep;
}

}  // namespace lstarf::certify
