#include "lstarf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lstarf/error.hpp"

namespace lstarf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Column-major scratch: column j occupies [j*ld, (j+1)*ld).
struct Columns {
  std::size_t ld;
  std::size_t count;
  std::vector<double> v;

  double* col(std::size_t j) { return v.data() + j * ld; }
  const double* col(std::size_t j) const { return v.data() + j * ld; }
};

double col_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

struct JacobiResult {
  Columns w;  // m x n, orthogonal columns (sigma_j * u_j)
  Columns v;  // n x n rotation product
};

// One-sided Jacobi on a tall (rows >= cols) matrix.
JacobiResult one_sided_jacobi(const DenseMatrix& a, const SvdOptions& opts, bool want_v) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  JacobiResult res{Columns{m, n, std::vector<double>(m * n)},
                   Columns{n, n, std::vector<double>(want_v ? n * n : 0)}};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) res.w.col(j)[i] = a(i, j);
  if (want_v)
    for (std::size_t j = 0; j < n; ++j) res.v.col(j)[j] = 1.0;

  const double tol =
      opts.orthogonality_tol > 0.0 ? opts.orthogonality_tol : kEps * static_cast<double>(m);
  const double fro = frobenius_norm(a);
  // Columns below this norm are numerically zero and are left alone.
  const double negligible = fro * kEps * 1e-2;

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* wp = res.w.col(p);
        double* wq = res.w.col(q);
        const double alpha = col_dot(wp, wp, m);
        const double beta = col_dot(wq, wq, m);
        if (std::sqrt(alpha) <= negligible || std::sqrt(beta) <= negligible) continue;
        const double gamma = col_dot(wp, wq, m);
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = wp[i];
          const double y = wq[i];
          wp[i] = c * x - s * y;
          wq[i] = s * x + c * y;
        }
        if (want_v) {
          double* vp = res.v.col(p);
          double* vq = res.v.col(q);
          for (std::size_t i = 0; i < n; ++i) {
            const double x = vp[i];
            const double y = vq[i];
            vp[i] = c * x - s * y;
            vq[i] = s * x + c * y;
          }
        }
      }
    }
    if (!rotated) return res;
  }
  throw NumericalError("svd: one-sided Jacobi did not converge within " +
                       std::to_string(opts.max_sweeps) + " sweeps");
}

std::vector<std::size_t> descending_order(const Vector& sigma) {
  std::vector<std::size_t> idx(sigma.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
  return idx;
}

// Fill columns [filled, m) of the m x m column store `u` with an orthonormal
// basis of the complement of the first `filled` columns.
void complete_basis(Columns& u, std::size_t filled) {
  const std::size_t m = u.ld;
  std::vector<double> cand(m);
  for (std::size_t slot = filled; slot < m; ++slot) {
    double best_norm = -1.0;
    std::vector<double> best(m);
    for (std::size_t e = 0; e < m; ++e) {
      std::fill(cand.begin(), cand.end(), 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < slot; ++j) {
          const double proj = col_dot(u.col(j), cand.data(), m);
          for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * u.col(j)[i];
        }
      }
      const double nrm = std::sqrt(col_dot(cand.data(), cand.data(), m));
      if (nrm > best_norm) {
        best_norm = nrm;
        best = cand;
      }
      if (best_norm > 0.7) break;
    }
    if (best_norm <= 0.0) throw NumericalError("svd: basis completion failed");
    for (std::size_t i = 0; i < m; ++i) u.col(slot)[i] = best[i] / best_norm;
  }
}

SvdFactors svd_tall(const DenseMatrix& a, const SvdOptions& opts) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  JacobiResult jr = one_sided_jacobi(a, opts, true);

  Vector raw(n);
  for (std::size_t j = 0; j < n; ++j) raw[j] = std::sqrt(col_dot(jr.w.col(j), jr.w.col(j), m));
  const auto order = descending_order(raw);
  const double zero_cut = frobenius_norm(a) * kEps * 1e-2;

  SvdFactors f{DenseMatrix(m, m), Vector(n), DenseMatrix(n, n)};
  Columns u{m, m, std::vector<double>(m * m)};
  std::size_t filled = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    f.sigma[k] = raw[j];
    for (std::size_t i = 0; i < n; ++i) f.v(i, k) = jr.v.col(j)[i];
    if (raw[j] > zero_cut) {
      for (std::size_t i = 0; i < m; ++i) u.col(k)[i] = jr.w.col(j)[i] / raw[j];
      filled = k + 1;
    }
  }
  // Numerically-zero sigmas sort to the tail, so columns [filled, m) are free.
  complete_basis(u, filled);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) f.u(i, k) = u.col(k)[i];
  return f;
}

}  // namespace

SvdFactors svd(const DenseMatrix& m, const SvdOptions& opts) {
  if (!m.all_finite()) throw ArgumentError("svd: input has non-finite entries");
  if (m.rows() >= m.cols()) return svd_tall(m, opts);
  SvdFactors t = svd_tall(m.transpose(), opts);
  return SvdFactors{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

Vector singular_values(const DenseMatrix& m, const SvdOptions& opts) {
  if (!m.all_finite()) throw ArgumentError("singular_values: input has non-finite entries");
  JacobiResult jr = m.rows() >= m.cols() ? one_sided_jacobi(m, opts, false)
                                         : one_sided_jacobi(m.transpose(), opts, false);
  Vector s(jr.w.count);
  for (std::size_t j = 0; j < s.size(); ++j)
    s[j] = std::sqrt(col_dot(jr.w.col(j), jr.w.col(j), jr.w.ld));
  std::stable_sort(s.begin(), s.end(), std::greater<>());
  return s;
}

DenseMatrix reconstruct(const DenseMatrix& u, std::span<const double> sigma, const DenseMatrix& v) {
  const std::size_t t = std::min({u.cols(), v.cols(), sigma.size()});
  DenseMatrix out(u.rows(), v.rows());
  for (std::size_t k = 0; k < t; ++k) {
    const double s = sigma[k];
    if (s == 0.0) continue;
    for (std::size_t i = 0; i < u.rows(); ++i) {
      const double a = s * u(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < v.rows(); ++j) out(i, j) += a * v(j, k);
    }
  }
  return out;
}

DenseMatrix reconstruct(const SvdFactors& f) { return reconstruct(f.u, f.sigma, f.v); }

std::size_t numerical_rank(std::span<const double> sigma, double rel_tol) {
  if (sigma.empty() || sigma[0] <= 0.0) return 0;
  const double cut = rel_tol * sigma[0];
  return static_cast<std::size_t>(
      std::count_if(sigma.begin(), sigma.end(), [cut](double s) { return s > cut; }));
}

LStarF lstar_f(std::span<const double> sigma) {
  double nuc = 0.0;
  for (double s : sigma) nuc += s;
  const double fro = norm2(sigma);
  return LStarF{nuc, fro, nuc - fro};
}

LStarF lstar_f(const DenseMatrix& m) { return lstar_f(singular_values(m)); }

double nuclear_norm(const DenseMatrix& m) { return lstar_f(m).nuclear; }

double spectral_norm(const DenseMatrix& m) { return singular_values(m).front(); }

DenseMatrix best_rank_r(const SvdFactors& f, std::size_t r) {
  if (r < 1 || r > f.sigma.size()) {
    throw ArgumentError("best_rank_r: r=" + std::to_string(r) + " outside [1, " +
                        std::to_string(f.sigma.size()) + "]");
  }
  return reconstruct(f.u, std::span<const double>(f.sigma).first(r), f.v);
}

DenseMatrix best_rank_r(const DenseMatrix& m, std::size_t r) {
  if (r < 1 || r > m.min_dim()) {
    throw ArgumentError("best_rank_r: r=" + std::to_string(r) + " outside [1, " +
                        std::to_string(m.min_dim()) + "]");
  }
  if (r == m.min_dim()) return m;
  return best_rank_r(svd(m), r);
}

DenseMatrix svt_prox(const DenseMatrix& m, double tau) {
  if (!(tau >= 0.0)) throw ArgumentError("svt_prox: tau must be nonnegative");
  if (tau == 0.0) return m;
  SvdFactors f = svd(m);
  for (double& s : f.sigma) s = std::max(s - tau, 0.0);
  return reconstruct(f);
}

DenseMatrix frob_subgrad(const DenseMatrix& m) {
  const double nrm = frobenius_norm(m);
  if (nrm == 0.0) return DenseMatrix(m.rows(), m.cols());
  return m * (1.0 / nrm);
}

}  // namespace lstarf
