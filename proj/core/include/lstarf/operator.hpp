#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lstarf/matrix.hpp"

namespace lstarf::measure {

enum class OperatorKind { Gaussian, EntrySampling, Identity, ScaledIdentity };

std::string_view to_string(OperatorKind k);
OperatorKind parse_operator_kind(std::string_view s);

/// Construction parameters beyond (kind, m, n, l, seed).
struct OperatorParams {
  /// scaled-identity: representation is sqrt(1 + a) * I, so delta_r = a.
  double scale_a = 0.0;
  /// entry-sampling: explicit row-major linear indices into the m x n input.
  /// Empty means "draw l distinct indices from the seed".
  std::vector<std::size_t> omega;
};

/// Closed-form isometry constant: delta_r = value for every rank r.
struct ExactDelta {
  double value;
};

/// Linear map A: R^{m x n} -> R^l stored densely as an l x (m n) matrix.
///
/// Row i of the representation is the row-major vectorization of the i-th
/// sensing matrix A_i, so A(X)_i = <A_i, X>. Immutable after construction.
class LinearOperator {
 public:
  LinearOperator(OperatorKind kind, std::size_t m, std::size_t n, std::uint64_t seed,
                 OperatorParams params, DenseMatrix representation);

  OperatorKind kind() const noexcept { return kind_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t l() const noexcept { return rep_.rows(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const OperatorParams& params() const noexcept { return params_; }
  const DenseMatrix& representation() const noexcept { return rep_; }
  const std::optional<ExactDelta>& exact_delta() const noexcept { return exact_delta_; }

  Vector apply(const DenseMatrix& x) const;
  DenseMatrix adjoint(std::span<const double> y) const;
  /// A^*(A(X)).
  DenseMatrix normal(const DenseMatrix& x) const;

 private:
  OperatorKind kind_;
  std::size_t m_;
  std::size_t n_;
  std::uint64_t seed_;
  OperatorParams params_;
  DenseMatrix rep_;
  std::optional<ExactDelta> exact_delta_;
};

/// Deterministic for a fixed seed. Gaussian entries are i.i.d. N(0, 1/l),
/// drawn from the stream (seed, "operator/gaussian").
LinearOperator build_operator(OperatorKind kind, std::size_t m, std::size_t n, std::size_t l,
                              std::uint64_t seed, const OperatorParams& params = {});

inline Vector apply(const LinearOperator& op, const DenseMatrix& x) { return op.apply(x); }
inline DenseMatrix adjoint(const LinearOperator& op, std::span<const double> y) {
  return op.adjoint(y);
}

/// Largest singular value of the representation, by power iteration on A^*A
/// (or AA^*, whichever is smaller) to relative accuracy `tol`.
double operator_norm(const LinearOperator& op, double tol = 1e-10);

/// JSON header {kind, m, n, l, seed, params, representation} plus a Matrix
/// Market file for the dense representation. `mtx_path` is recorded relative
/// to the JSON file's directory when it lives there.
void save_operator(const LinearOperator& op, const std::string& json_path,
                   const std::string& mtx_path);
LinearOperator load_operator(const std::string& json_path);

}  // namespace lstarf::measure
