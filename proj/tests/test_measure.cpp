#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "lstarf/error.hpp"
#include "lstarf/instance.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/operator.hpp"
#include "lstarf/random.hpp"

using namespace lstarf;
using namespace lstarf::measure;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("lstarf_measure_" + name);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Operator, IdentityIsIsometry) {
  const auto op = build_operator(OperatorKind::Identity, 3, 3, 9, 0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const DenseMatrix x = gaussian_matrix(3, 3, rng);
    const Vector y = op.apply(x);
    EXPECT_NEAR(norm2(y), frobenius_norm(x), 1e-12);
    for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(y[k], x.data()[k]);
  }
  ASSERT_TRUE(op.exact_delta());
  EXPECT_EQ(op.exact_delta()->value, 0.0);
}

TEST(Operator, IdentityRequiresSquareRepresentation) {
  EXPECT_THROW(build_operator(OperatorKind::Identity, 3, 3, 8, 0), ArgumentError);
}

TEST(Operator, ScaledIdentity) {
  OperatorParams p;
  p.scale_a = 0.2;
  const auto op = build_operator(OperatorKind::ScaledIdentity, 3, 4, 12, 0, p);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const DenseMatrix x = gaussian_matrix(3, 4, rng);
    const double y = norm2(op.apply(x));
    const double f = frobenius_norm(x);
    EXPECT_NEAR(y * y, 1.2 * f * f, 1e-12 * f * f);
  }
  EXPECT_EQ(op.exact_delta()->value, 0.2);
  p.scale_a = 1.0;
  EXPECT_THROW(build_operator(OperatorKind::ScaledIdentity, 3, 4, 12, 0, p), ArgumentError);
  p.scale_a = -0.1;
  EXPECT_THROW(build_operator(OperatorKind::ScaledIdentity, 3, 4, 12, 0, p), ArgumentError);
}

TEST(Operator, GaussianDeterministicBitForBit) {
  const auto a = build_operator(OperatorKind::Gaussian, 8, 8, 96, 7);
  const auto b = build_operator(OperatorKind::Gaussian, 8, 8, 96, 7);
  const auto c = build_operator(OperatorKind::Gaussian, 8, 8, 96, 8);
  EXPECT_EQ(a.representation(), b.representation());
  EXPECT_NE(a.representation(), c.representation());
  EXPECT_FALSE(a.exact_delta());
}

TEST(Operator, GaussianVarianceIsOneOverL) {
  const auto op = build_operator(OperatorKind::Gaussian, 10, 10, 400, 3);
  double sq = 0.0;
  for (double v : op.representation().data()) sq += v * v;
  const double var = sq / static_cast<double>(op.representation().size());
  EXPECT_NEAR(var * 400.0, 1.0, 0.02);
}

TEST(Operator, EntrySampling) {
  OperatorParams p;
  p.omega = {0, 5, 7};
  const auto op = build_operator(OperatorKind::EntrySampling, 2, 4, 3, 0, p);
  Rng rng(3);
  const DenseMatrix x = gaussian_matrix(2, 4, rng);
  const Vector y = op.apply(x);
  EXPECT_EQ(y[0], x(0, 0));
  EXPECT_EQ(y[1], x(1, 1));
  EXPECT_EQ(y[2], x(1, 3));
  p.omega = {1, 1, 2};
  EXPECT_THROW(build_operator(OperatorKind::EntrySampling, 2, 4, 3, 0, p), ArgumentError);
  p.omega = {1, 2, 8};
  EXPECT_THROW(build_operator(OperatorKind::EntrySampling, 2, 4, 3, 0, p), ArgumentError);

  const auto drawn = build_operator(OperatorKind::EntrySampling, 4, 4, 10, 5);
  EXPECT_EQ(drawn.params().omega.size(), 10u);
}

TEST(Operator, AdjointConsistency) {
  Rng rng(4);
  for (auto kind : {OperatorKind::Gaussian, OperatorKind::EntrySampling, OperatorKind::Identity}) {
    const std::size_t l = kind == OperatorKind::Identity ? 20 : 13;
    const auto op = build_operator(kind, 4, 5, l, 9);
    for (int i = 0; i < 20; ++i) {
      const DenseMatrix x = gaussian_matrix(4, 5, rng);
      const Vector y = gaussian_vector(l, rng);
      EXPECT_NEAR(dot(op.apply(x), y), inner(x, op.adjoint(y)), 1e-10);
    }
  }
}

TEST(Operator, LinearityAndZero) {
  Rng rng(5);
  const auto op = build_operator(OperatorKind::Gaussian, 3, 4, 10, 1);
  for (double v : op.apply(DenseMatrix(3, 4))) EXPECT_EQ(v, 0.0);
  for (int i = 0; i < 20; ++i) {
    const DenseMatrix x = gaussian_matrix(3, 4, rng);
    const DenseMatrix y = gaussian_matrix(3, 4, rng);
    const double a = rng.normal(), b = rng.normal();
    const Vector lhs = op.apply(a * x + b * y);
    const Vector ax = op.apply(x), ay = op.apply(y);
    for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs[k], a * ax[k] + b * ay[k], 1e-10);
  }
}

TEST(Operator, ShapeMismatch) {
  const auto op = build_operator(OperatorKind::Gaussian, 3, 4, 10, 1);
  EXPECT_THROW(op.apply(DenseMatrix(4, 3)), ArgumentError);
  EXPECT_THROW(op.adjoint(Vector(9)), ArgumentError);
}

TEST(OperatorNorm, ClosedFormsAndSvdOracle) {
  EXPECT_NEAR(operator_norm(build_operator(OperatorKind::Identity, 3, 3, 9, 0), 1e-10), 1.0, 1e-10);
  OperatorParams p;
  p.scale_a = 0.2;
  EXPECT_NEAR(operator_norm(build_operator(OperatorKind::ScaledIdentity, 3, 3, 9, 0, p), 1e-10),
              1.0954451150103322, 1e-9);
  const auto g = build_operator(OperatorKind::Gaussian, 4, 4, 30, 2);
  EXPECT_NEAR(operator_norm(g, 1e-12), singular_values(g.representation())[0], 1e-6);
}

TEST(Instance, NoiselessIdentity) {
  const auto op = build_operator(OperatorKind::Identity, 3, 2, 6, 0);
  Rng rng(6);
  const DenseMatrix x = gaussian_matrix(3, 2, rng);
  const auto inst = make_instance(op, x, NoiseKind::None, 0.5, 1);
  EXPECT_EQ(inst.epsilon, 0.0);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(inst.b[k], x.data()[k]);
}

TEST(Instance, RescaledNoise) {
  const auto op = build_operator(OperatorKind::Gaussian, 4, 4, 20, 3);
  Rng rng(7);
  const DenseMatrix x = gaussian_matrix(4, 4, rng);
  const auto a = make_instance(op, x, NoiseKind::GaussianRescaled, 0.1, 11);
  ASSERT_TRUE(a.noise);
  EXPECT_NEAR(norm2(*a.noise), 0.1, 1e-14);
  const Vector ax = op.apply(x);
  for (std::size_t k = 0; k < ax.size(); ++k) EXPECT_EQ(a.b[k], ax[k] + (*a.noise)[k]);
  const auto b = make_instance(op, x, NoiseKind::GaussianRescaled, 0.1, 11);
  EXPECT_EQ(a.b, b.b);
  EXPECT_THROW(make_instance(op, x, NoiseKind::GaussianRescaled, -1.0, 11), ArgumentError);
}

TEST(Serialization, OperatorAndInstanceRoundTrip) {
  const auto dir = scratch("roundtrip");
  OperatorParams p;
  p.scale_a = 0.3;
  const auto op = build_operator(OperatorKind::ScaledIdentity, 2, 3, 6, 4, p);
  save_operator(op, (dir / "op.json").string(), (dir / "op.mtx").string());
  const auto back = load_operator((dir / "op.json").string());
  EXPECT_EQ(back.representation(), op.representation());
  EXPECT_EQ(back.kind(), op.kind());
  EXPECT_EQ(back.exact_delta()->value, 0.3);

  const auto g = build_operator(OperatorKind::Gaussian, 3, 3, 7, 4);
  Rng rng(8);
  const auto inst = make_instance(g, gaussian_matrix(3, 3, rng), NoiseKind::GaussianRescaled, 0.2, 5);
  save_instance(inst, (dir / "inst.json").string());
  const auto ib = load_instance((dir / "inst.json").string());
  EXPECT_EQ(ib.b, inst.b);
  EXPECT_EQ(ib.epsilon, inst.epsilon);
  ASSERT_TRUE(ib.x_true);
  EXPECT_EQ(*ib.x_true, *inst.x_true);
  EXPECT_EQ(ib.op.representation(), g.representation());
}

TEST(Serialization, MissingFileIsIoError) {
  EXPECT_THROW(load_operator("/nonexistent/op.json"), IoError);
}
