#include "lstarf/certify/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lstarf/error.hpp"

namespace lstarf::certify {

namespace {

std::size_t count_nonzero(const Vector& w) {
  return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) { return x != 0.0; }));
}

// Dividing by (1 - lambda) amplifies rounding when lambda is close to 1.
// Rescale the uncapped coordinates so the l1 mass stays exact.
void renormalize(Vector& w, double mass, double alpha) {
  for (int pass = 0; pass < 4; ++pass) {
    double capped = 0.0, free_sum = 0.0;
    for (double x : w) (x >= alpha ? capped : free_sum) += x;
    if (free_sum <= 0.0) return;
    const double scale = (mass - capped) / free_sum;
    if (scale <= 0.0 || scale == 1.0) return;
    bool clipped = false;
    for (double& x : w) {
      if (x <= 0.0 || x >= alpha) continue;
      x *= scale;
      if (x >= alpha) x = alpha, clipped = true;
    }
    if (!clipped) return;
  }
}

}  // namespace

PolytopeDecomposition polytope_decompose(std::span<const double> v, double alpha, std::size_t s) {
  if (!(alpha > 0.0) || s < 1) throw ArgumentError("polytope_decompose: need alpha > 0 and s >= 1");
  double mass = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw InfeasibleInputError("polytope_decompose: non-finite entry");
    if (std::abs(x) > alpha) throw InfeasibleInputError("polytope_decompose: ||v||_inf > alpha");
    mass += std::abs(x);
  }
  if (mass > static_cast<double>(s) * alpha)
    throw InfeasibleInputError("polytope_decompose: ||v||_1 > s * alpha");

  const std::size_t p = v.size();
  PolytopeDecomposition out;
  out.alpha = alpha;
  out.s = s;

  Vector w(p);
  for (std::size_t i = 0; i < p; ++i) w[i] = std::abs(v[i]);
  auto signed_atom = [&](const Vector& x) {
    Vector u(p);
    for (std::size_t i = 0; i < p; ++i) u[i] = v[i] < 0.0 ? -x[i] : x[i];
    return u;
  };

  double remaining = 1.0;
  const std::size_t max_steps = count_nonzero(w) + 2;
  for (std::size_t step = 0;; ++step) {
    if (step > max_steps) throw NumericalError("polytope_decompose: peeling did not terminate");
    if (count_nonzero(w) <= s) {
      out.atoms.push_back({remaining, signed_atom(w)});
      break;
    }

    // Vertex on the s largest coordinates: capped ones first, then by size.
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < p; ++i)
      if (w[i] > 0.0) support.push_back(i);
    std::stable_sort(support.begin(), support.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    Vector x(p, 0.0);
    double rest = mass;
    for (std::size_t i : support) {
      if (rest <= 1e-14 * mass) break;
      x[i] = std::min(alpha, rest);
      rest -= x[i];
    }
    if (rest > 1e-14 * mass) throw NumericalError("polytope_decompose: mass does not fit the support");

    // Largest lambda keeping (w - lambda x) / (1 - lambda) within [0, alpha].
    double lam = 1.0;
    for (std::size_t i : support) {
      if (x[i] > 0.0) lam = std::min(lam, w[i] / x[i]);
      if (x[i] < alpha) lam = std::min(lam, (alpha - w[i]) / (alpha - x[i]));
    }
    // Below 1e-14 remaining weight the residual is rounding noise.
    if (lam >= 1.0 - 1e-15 || remaining < 1e-14) {
      out.atoms.push_back({remaining, signed_atom(x)});
      break;
    }
    out.atoms.push_back({remaining * lam, signed_atom(x)});
    remaining *= 1.0 - lam;
    // Rounding in w grows like 1/remaining; snapping within that band moves
    // the reconstruction by at most 1e-15 * alpha.
    const double snap = std::min(1e-15 / remaining, 1e-3) * alpha;
    for (std::size_t i = 0; i < p; ++i) {
      double y = (w[i] - lam * x[i]) / (1.0 - lam);
      if (y <= snap) y = 0.0;
      if (y >= alpha - snap) y = alpha;
      w[i] = y;
    }
    renormalize(w, mass, alpha);
  }
  return out;
}

MembershipReport check_decomposition(const PolytopeDecomposition& d, std::span<const double> v,
                                     double tol) {
  MembershipReport rep;
  const std::size_t p = v.size();
  double wsum = 0.0;
  Vector recon(p, 0.0);
  const double l1 = norm1(v);
  for (const Atom& a : d.atoms) {
    wsum += a.weight;
    double viol = 0.0;
    if (a.u.size() != p) {
      rep.ok = false;
      rep.max_atom_violation = INFINITY;
      return rep;
    }
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < p; ++i) {
      recon[i] += a.weight * a.u[i];
      if (a.u[i] != 0.0) {
        ++nnz;
        if (v[i] == 0.0) viol = std::max(viol, std::abs(a.u[i]));
      }
      viol = std::max(viol, std::abs(a.u[i]) - d.alpha);
    }
    if (nnz > d.s) viol = INFINITY;
    viol = std::max(viol, std::abs(norm1(a.u) - l1));
    if (a.weight < 0.0 || a.weight > 1.0) viol = std::max(viol, std::abs(a.weight - 0.5) - 0.5);
    rep.max_atom_violation = std::max(rep.max_atom_violation, viol);
  }
  rep.weight_sum_error = std::abs(wsum - 1.0);
  for (std::size_t i = 0; i < p; ++i)
    rep.reconstruction_error = std::max(rep.reconstruction_error, std::abs(recon[i] - v[i]));
  rep.ok = rep.weight_sum_error <= tol && rep.reconstruction_error <= tol &&
           rep.max_atom_violation <= tol;
  return rep;
}

}  // namespace lstarf::certify
