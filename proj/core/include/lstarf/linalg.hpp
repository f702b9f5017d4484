#pragma once

#include <cstddef>

#include "lstarf/matrix.hpp"

namespace lstarf {

/// Full singular value decomposition a = u * D(sigma) * v^T.
///
/// u is rows x rows and v is cols x cols, both orthogonal. sigma has
/// min(rows, cols) entries, nonincreasing and nonnegative; ties keep the
/// order in which the Jacobi sweeps produced them.
struct SvdFactors {
  DenseMatrix u;
  Vector sigma;
  DenseMatrix v;
};

struct SvdOptions {
  int max_sweeps = 80;
  /// Columns p, q count as orthogonal once |<w_p, w_q>| <= tol * |w_p| |w_q|.
  double orthogonality_tol = 1e-15;
};

/// One-sided (Hestenes) Jacobi SVD. Throws NumericalError when the sweep
/// budget is exhausted before the columns are mutually orthogonal.
SvdFactors svd(const DenseMatrix& m, const SvdOptions& opts = {});

/// Singular values only (same algorithm, no basis completion).
Vector singular_values(const DenseMatrix& m, const SvdOptions& opts = {});

/// Rebuild u * D(sigma) * v^T.
DenseMatrix reconstruct(const SvdFactors& f);
DenseMatrix reconstruct(const DenseMatrix& u, std::span<const double> sigma, const DenseMatrix& v);

/// Relative cutoff defining supp(sigma(X)): sigma_i > kRankTolerance * sigma_1.
inline constexpr double kRankTolerance = 1e-9;

std::size_t numerical_rank(std::span<const double> sigma, double rel_tol = kRankTolerance);

struct LStarF {
  double nuclear;
  double frobenius;
  /// nuclear - frobenius, the L_{*-F} surrogate.
  double difference;
};

LStarF lstar_f(std::span<const double> sigma);
LStarF lstar_f(const DenseMatrix& m);

double nuclear_norm(const DenseMatrix& m);
double spectral_norm(const DenseMatrix& m);

/// Eckart-Young truncation to the r leading singular triplets.
/// Requires 1 <= r <= min(rows, cols).
DenseMatrix best_rank_r(const DenseMatrix& m, std::size_t r);
DenseMatrix best_rank_r(const SvdFactors& f, std::size_t r);

/// Proximal map of tau*||.||_*: u * D(max(sigma - tau, 0)) * v^T.
DenseMatrix svt_prox(const DenseMatrix& m, double tau);

/// m / ||m||_F, or zero when m = 0 (a valid element of the subdifferential
/// of the Frobenius norm at the origin).
DenseMatrix frob_subgrad(const DenseMatrix& m);

}  // namespace lstarf
