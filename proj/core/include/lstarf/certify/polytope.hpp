#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lstarf/matrix.hpp"

namespace lstarf::certify {

struct Atom {
  double weight;
  Vector u;
};

/// v = sum_i weight_i u_i with each u_i s-sparse, supp(u_i) in supp(v),
/// ||u_i||_1 = ||v||_1 and ||u_i||_inf <= alpha.
struct PolytopeDecomposition {
  std::vector<Atom> atoms;
  double alpha = 0.0;
  std::size_t s = 0;
};

/// Peels atoms off v one at a time. Each step builds the vertex that keeps
/// capped coordinates at alpha and fills the largest free coordinates with
/// the remaining mass, then removes the largest multiple of it that keeps
/// the residual inside T(alpha, s). Every step pins at least one coordinate
/// to 0 or alpha, so there are at most ||v||_0 + 1 atoms.
///
/// Throws InfeasibleInputError unless ||v||_inf <= alpha and
/// ||v||_1 <= s alpha.
PolytopeDecomposition polytope_decompose(std::span<const double> v, double alpha, std::size_t s);

struct MembershipReport {
  double weight_sum_error = 0.0;
  double reconstruction_error = 0.0;
  /// Largest violation among support, sparsity, l1 and l_inf constraints.
  double max_atom_violation = 0.0;
  bool ok = true;
};

/// Checks all decomposition invariants against v with tolerance tol.
MembershipReport check_decomposition(const PolytopeDecomposition& d, std::span<const double> v,
                                     double tol = 1e-12);

}  // namespace lstarf::certify
