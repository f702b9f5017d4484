#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lstarf/matrix.hpp"
#include "lstarf/operator.hpp"

namespace lstarf::measure {

enum class NoiseKind { None, GaussianRescaled };

std::string_view to_string(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view s);

/// One recovery task b = A(X_true) + s with ||s||_2 <= epsilon.
struct ProblemInstance {
  LinearOperator op;
  Vector b;
  std::optional<DenseMatrix> x_true;
  double epsilon = 0.0;
  std::optional<Vector> noise;
  NoiseKind noise_kind = NoiseKind::None;
  std::uint64_t seed = 0;
};

/// Draws s from the stream (seed, "instance/noise") and rescales it so that
/// ||s||_2 = epsilon. NoiseKind::None forces epsilon = 0 and s = 0.
ProblemInstance make_instance(const LinearOperator& op, const DenseMatrix& x_true,
                              NoiseKind noise_kind, double epsilon, std::uint64_t seed);

/// Instance from an observation alone (no ground truth).
ProblemInstance make_instance(const LinearOperator& op, Vector b, double epsilon);

double residual_norm(const LinearOperator& op, const DenseMatrix& x, std::span<const double> b);

/// JSON {operator, b, epsilon, noise_kind, seed, x_true, s}; operator and
/// x_true are file references written next to `json_path` with the given stem.
void save_instance(const ProblemInstance& inst, const std::string& json_path);
ProblemInstance load_instance(const std::string& json_path);

}  // namespace lstarf::measure
