#include "lstarf/operator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "json.hpp"
#include "lstarf/error.hpp"
#include "lstarf/matrix_market.hpp"
#include "lstarf/random.hpp"

namespace lstarf::measure {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Gaussian: return "gaussian";
    case OperatorKind::EntrySampling: return "entry-sampling";
    case OperatorKind::Identity: return "identity";
    case OperatorKind::ScaledIdentity: return "scaled-identity";
  }
  return "unknown";
}

OperatorKind parse_operator_kind(std::string_view s) {
  if (s == "gaussian") return OperatorKind::Gaussian;
  if (s == "entry-sampling") return OperatorKind::EntrySampling;
  if (s == "identity") return OperatorKind::Identity;
  if (s == "scaled-identity") return OperatorKind::ScaledIdentity;
  throw ArgumentError("unknown operator kind '" + std::string(s) + "'");
}

namespace {

void check_scale(double a) {
  if (!(a >= 0.0 && a < 1.0)) throw ArgumentError("scaled-identity: a must lie in [0, 1)");
}

void check_omega(const std::vector<std::size_t>& omega, std::size_t mn) {
  std::unordered_set<std::size_t> seen;
  for (std::size_t idx : omega) {
    if (idx >= mn) throw ArgumentError("entry-sampling: index " + std::to_string(idx) + " out of range");
    if (!seen.insert(idx).second) {
      throw ArgumentError("entry-sampling: duplicate index " + std::to_string(idx));
    }
  }
}

DenseMatrix scaled_eye(std::size_t n, double s) {
  DenseMatrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = s;
  return d;
}

}  // namespace

LinearOperator::LinearOperator(OperatorKind kind, std::size_t m, std::size_t n, std::uint64_t seed,
                               OperatorParams params, DenseMatrix representation)
    : kind_(kind), m_(m), n_(n), seed_(seed), params_(std::move(params)), rep_(std::move(representation)) {
  if (m_ == 0 || n_ == 0) throw ArgumentError("LinearOperator: m and n must be positive");
  if (rep_.cols() != m_ * n_) {
    throw ArgumentError("LinearOperator: representation must have m*n columns");
  }
  switch (kind_) {
    case OperatorKind::Identity:
      if (!(rep_ == scaled_eye(m_ * n_, 1.0))) {
        throw ArgumentError("LinearOperator: identity kind requires the identity representation");
      }
      exact_delta_ = ExactDelta{0.0};
      break;
    case OperatorKind::ScaledIdentity:
      check_scale(params_.scale_a);
      if (!(rep_ == scaled_eye(m_ * n_, std::sqrt(1.0 + params_.scale_a)))) {
        throw ArgumentError("LinearOperator: scaled-identity representation must be sqrt(1+a) I");
      }
      exact_delta_ = ExactDelta{params_.scale_a};
      break;
    case OperatorKind::EntrySampling:
      if (params_.omega.size() != rep_.rows()) {
        throw ArgumentError("LinearOperator: entry-sampling needs |omega| = l");
      }
      check_omega(params_.omega, m_ * n_);
      break;
    case OperatorKind::Gaussian:
      break;
  }
}

Vector LinearOperator::apply(const DenseMatrix& x) const {
  if (x.rows() != m_ || x.cols() != n_) throw ArgumentError("apply: input shape mismatch");
  const std::size_t l = rep_.rows();
  const std::size_t mn = m_ * n_;
  const auto xs = x.data();
  Vector y(l);
  if (kind_ == OperatorKind::EntrySampling) {
    for (std::size_t i = 0; i < l; ++i) y[i] = xs[params_.omega[i]];
    return y;
  }
  const auto r = rep_.data();
  for (std::size_t i = 0; i < l; ++i) {
    const double* row = r.data() + i * mn;
    double s = 0.0;
    for (std::size_t k = 0; k < mn; ++k) s += row[k] * xs[k];
    y[i] = s;
  }
  return y;
}

DenseMatrix LinearOperator::adjoint(std::span<const double> y) const {
  const std::size_t l = rep_.rows();
  if (y.size() != l) throw ArgumentError("adjoint: vector length must equal l");
  const std::size_t mn = m_ * n_;
  DenseMatrix out(m_, n_);
  auto o = out.data();
  if (kind_ == OperatorKind::EntrySampling) {
    for (std::size_t i = 0; i < l; ++i) o[params_.omega[i]] += y[i];
    return out;
  }
  const auto r = rep_.data();
  for (std::size_t i = 0; i < l; ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    const double* row = r.data() + i * mn;
    for (std::size_t k = 0; k < mn; ++k) o[k] += yi * row[k];
  }
  return out;
}

DenseMatrix LinearOperator::normal(const DenseMatrix& x) const { return adjoint(apply(x)); }

LinearOperator build_operator(OperatorKind kind, std::size_t m, std::size_t n, std::size_t l,
                              std::uint64_t seed, const OperatorParams& params) {
  if (m == 0 || n == 0 || l == 0) throw ArgumentError("build_operator: m, n, l must be >= 1");
  const std::size_t mn = m * n;
  OperatorParams p = params;
  switch (kind) {
    case OperatorKind::Identity:
      if (l != mn) throw ArgumentError("build_operator: identity requires l = m*n");
      p = OperatorParams{};
      return LinearOperator(kind, m, n, seed, p, scaled_eye(mn, 1.0));
    case OperatorKind::ScaledIdentity:
      if (l != mn) throw ArgumentError("build_operator: scaled-identity requires l = m*n");
      check_scale(p.scale_a);
      p.omega.clear();
      return LinearOperator(kind, m, n, seed, p, scaled_eye(mn, std::sqrt(1.0 + p.scale_a)));
    case OperatorKind::EntrySampling: {
      if (l > mn) throw ArgumentError("build_operator: entry-sampling requires l <= m*n");
      if (p.omega.empty()) {
        Rng rng(seed, "operator/entry-sampling");
        std::vector<std::size_t> perm(mn);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = 0; i < l; ++i) {
          const std::size_t j = i + static_cast<std::size_t>(rng.below(mn - i));
          std::swap(perm[i], perm[j]);
        }
        p.omega.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(l));
      } else if (p.omega.size() != l) {
        throw ArgumentError("build_operator: entry-sampling needs |omega| = l");
      }
      check_omega(p.omega, mn);
      DenseMatrix rep(l, mn);
      for (std::size_t i = 0; i < l; ++i) rep(i, p.omega[i]) = 1.0;
      p.scale_a = 0.0;
      return LinearOperator(kind, m, n, seed, p, std::move(rep));
    }
    case OperatorKind::Gaussian: {
      Rng rng(seed, "operator/gaussian");
      p = OperatorParams{};
      return LinearOperator(kind, m, n, seed, p,
                            gaussian_matrix(l, mn, rng, 1.0 / std::sqrt(static_cast<double>(l))));
    }
  }
  throw ArgumentError("build_operator: unknown kind");
}

double operator_norm(const LinearOperator& op, double tol) {
  if (!(tol > 0.0)) throw ArgumentError("operator_norm: tol must be positive");
  const DenseMatrix& r = op.representation();
  // Power iteration on the smaller Gram matrix.
  const bool use_rows = r.rows() <= r.cols();
  const DenseMatrix gram = use_rows ? matmul_nt(r, r) : matmul_tn(r, r);
  const std::size_t d = gram.rows();
  Rng rng(op.seed(), "operator/norm");
  Vector x = gaussian_vector(d, rng);
  double nx = norm2(x);
  for (double& v : x) v /= nx;
  double est = 0.0;
  const int max_iter = 200000;
  for (int it = 0; it < max_iter; ++it) {
    Vector y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += gram(i, k) * x[k];
      y[i] = s;
    }
    const double rayleigh = dot(x, y);
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    for (std::size_t i = 0; i < d; ++i) x[i] = y[i] / ny;
    // The Rayleigh quotient converges twice as fast as the iterate, so stop on
    // its relative change at a fraction of the requested tolerance.
    if (it > 0 && std::abs(rayleigh - est) <= 1e-3 * tol * rayleigh) {
      est = std::max(rayleigh, ny);
      return std::sqrt(est);
    }
    est = rayleigh;
  }
  return std::sqrt(est);
}

void save_operator(const LinearOperator& op, const std::string& json_path,
                   const std::string& mtx_path) {
  write_matrix_market(mtx_path, op.representation());
  const fs::path jdir = fs::path(json_path).parent_path();
  fs::path rel = fs::path(mtx_path);
  if (fs::absolute(rel).parent_path() == fs::absolute(jdir.empty() ? fs::path(".") : jdir)) {
    rel = rel.filename();
  }
  json params = json::object();
  if (op.kind() == OperatorKind::ScaledIdentity) params["a"] = op.params().scale_a;
  if (op.kind() == OperatorKind::EntrySampling) params["omega"] = op.params().omega;
  json j = {{"kind", std::string(to_string(op.kind()))},
            {"m", op.m()},
            {"n", op.n()},
            {"l", op.l()},
            {"seed", op.seed()},
            {"params", params},
            {"representation", rel.generic_string()}};
  if (op.exact_delta()) j["exact_delta"] = op.exact_delta()->value;
  std::ofstream os(json_path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + json_path + "' for writing");
  os << j.dump(2) << '\n';
}

LinearOperator load_operator(const std::string& json_path) {
  std::ifstream is(json_path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + json_path + "' for reading");
  json j;
  try {
    j = json::parse(is);
    const OperatorKind kind = parse_operator_kind(j.at("kind").get<std::string>());
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    const auto l = j.at("l").get<std::size_t>();
    const auto seed = j.at("seed").get<std::uint64_t>();
    OperatorParams p;
    const json& params = j.value("params", json::object());
    if (params.contains("a")) p.scale_a = params.at("a").get<double>();
    if (params.contains("omega")) p.omega = params.at("omega").get<std::vector<std::size_t>>();
    fs::path rep_path = j.at("representation").get<std::string>();
    if (rep_path.is_relative()) rep_path = fs::path(json_path).parent_path() / rep_path;
    DenseMatrix rep = read_matrix_market(rep_path.string());
    if (rep.rows() != l || rep.cols() != m * n) {
      throw IoError("operator '" + json_path + "': representation shape disagrees with header");
    }
    return LinearOperator(kind, m, n, seed, std::move(p), std::move(rep));
  } catch (const json::exception& e) {
    throw IoError("operator '" + json_path + "': " + e.what());
  }
}

}  // namespace lstarf::measure
