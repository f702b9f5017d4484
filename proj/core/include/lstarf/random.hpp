#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "lstarf/matrix.hpp"

namespace lstarf {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of 64-bit words into one seed.
std::uint64_t hash_seed(std::initializer_list<std::uint64_t> words) noexcept;

/// FNV-1a of a tag string; used to name independent streams.
std::uint64_t stream_tag(std::string_view tag) noexcept;

/// Seeded source of uniforms and standard normals.
///
/// Backed by std::mt19937_64 (whose output sequence is fixed by the
/// standard). Uniforms take the top 53 bits; normals use the Marsaglia polar
/// method. Neither goes through std::*_distribution, so sequences are
/// identical across standard library implementations.
///
/// Stream splitting: the engine for (seed, tag) is seeded with
/// hash_seed({seed, stream_tag(tag)}). Distinct tags give independent streams
/// from one user-facing seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view tag);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng, double stddev = 1.0);
Vector gaussian_vector(std::size_t n, Rng& rng, double stddev = 1.0);

/// Product of rows x rank and rank x cols Gaussian factors (rank <= min dim).
DenseMatrix random_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, Rng& rng);

/// Gaussian low-rank matrix rescaled to unit Frobenius norm.
DenseMatrix random_unit_low_rank(std::size_t rows, std::size_t cols, std::size_t rank, Rng& rng);

}  // namespace lstarf
