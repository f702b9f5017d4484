#include "lstarf/random.hpp"

#include <cmath>

#include "lstarf/error.hpp"

namespace lstarf {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_seed(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

std::uint64_t stream_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng::Rng(std::uint64_t seed, std::string_view tag) : engine_(hash_seed({seed, stream_tag(tag)})) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below: n must be positive");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng, double stddev) {
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = stddev * rng.normal();
  return m;
}

Vector gaussian_vector(std::size_t n, Rng& rng, double stddev) {
  Vector v(n);
  for (double& x : v) x = stddev * rng.normal();
  return v;
}

DenseMatrix random_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, Rng& rng) {
  if (rank == 0 || rank > std::min(rows, cols)) {
    throw ArgumentError("random_low_rank: rank outside [1, min(rows, cols)]");
  }
  const DenseMatrix left = gaussian_matrix(rows, rank, rng);
  const DenseMatrix right = gaussian_matrix(rank, cols, rng);
  return matmul(left, right);
}

DenseMatrix random_unit_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, Rng& rng) {
  DenseMatrix m = random_low_rank(rows, cols, rank, rng);
  const double nrm = frobenius_norm(m);
  if (nrm > 0.0) m *= 1.0 / nrm;
  return m;
}

}  // namespace lstarf
