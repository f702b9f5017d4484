#pragma once

#include <cstddef>
#include <span>

#include "lstarf/matrix.hpp"

namespace lstarf::certify {

/// Slack of a two-sided bound lower <= value <= upper. Nonnegative slacks
/// mean the bound holds.
struct Sandwich {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  double lower_slack() const { return value - lower; }
  double upper_slack() const { return upper - value; }
};

struct SingularValueBounds {
  std::size_t t = 0;
  std::size_t rank = 0;
  /// (t - sqrt t) sigma_t <= ||X||_* - ||X||_F <= (sqrt t - 1) ||X||_F
  Sandwich full;
  /// Same with t replaced by the numerical rank r.
  Sandwich ranked;
  /// (r - 1)/2 * min_{i in supp} sigma_i <= ||X||_* - ||X||_F <= (sqrt r - 1) ||X||_F
  Sandwich support;
};

SingularValueBounds singular_value_bounds(const DenseMatrix& x);
SingularValueBounds singular_value_bounds(std::span<const double> sigma);

struct PowerSumReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = true;
};

/// sum_{j>r} a_j^p <= r ((sum_{i<=r} a_i^p / r)^{1/p} + eta / r)^p for
/// nonincreasing nonnegative a with sum_{i<=r} a_i + eta >= sum_{i>r} a_i.
/// `holds` allows 1e-10 slack. Throws InfeasibleInputError when the
/// preconditions fail.
PowerSumReport power_sum_check(std::span<const double> a, std::size_t r, double eta,
                               double alpha_exp);

}  // namespace lstarf::certify
