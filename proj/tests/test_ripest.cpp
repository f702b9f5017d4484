#include <gtest/gtest.h>

#include <cmath>

#include "lstarf/error.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/operator.hpp"
#include "lstarf/random.hpp"
#include "lstarf/ripest.hpp"

using namespace lstarf;
using namespace lstarf::measure;
using namespace lstarf::rip;

namespace {

void expect_witness_certifies(const LinearOperator& op, const RipEstimate& e) {
  EXPECT_NEAR(frobenius_norm(e.witness), 1.0, 1e-10);
  EXPECT_LE(numerical_rank(singular_values(e.witness)), e.r);
  EXPECT_GE(isometry_deviation(op, e.witness), e.delta - 1e-9);
}

}  // namespace

TEST(EstimateDelta, IdentityIsExactZero) {
  const auto op = build_operator(OperatorKind::Identity, 4, 4, 16, 0);
  for (std::size_t r = 1; r <= 4; ++r) {
    const auto e = estimate_delta(op, r, {});
    EXPECT_EQ(e.delta, 0.0);
    EXPECT_EQ(e.certainty, Certainty::Exact);
    expect_witness_certifies(op, e);
  }
}

TEST(EstimateDelta, ScaledIdentityIsExact) {
  OperatorParams p;
  p.scale_a = 0.2;
  const auto op = build_operator(OperatorKind::ScaledIdentity, 3, 3, 9, 0, p);
  const auto e = estimate_delta(op, 2, {});
  EXPECT_EQ(e.delta, 0.2);
  EXPECT_EQ(e.certainty, Certainty::Exact);
  expect_witness_certifies(op, e);
}

TEST(EstimateDelta, RankOutOfRange) {
  const auto op = build_operator(OperatorKind::Gaussian, 3, 4, 10, 0);
  EXPECT_THROW(estimate_delta(op, 0, {}), ArgumentError);
  EXPECT_THROW(estimate_delta(op, 4, {}), ArgumentError);
  EstimatorOptions bad;
  bad.restarts = 0;
  EXPECT_THROW(estimate_delta(op, 1, bad), ArgumentError);
}

TEST(EstimateDelta, GaussianDominatesRandomSampling) {
  const auto op = build_operator(OperatorKind::Gaussian, 6, 6, 72, 3);
  EstimatorOptions o;
  o.restarts = 64;
  o.iterations = 100;
  o.seed = 5;
  const auto e = estimate_delta(op, 1, o);
  EXPECT_EQ(e.certainty, Certainty::LowerBound);
  expect_witness_certifies(op, e);
  EXPECT_LE(random_sampling_bound(op, 1, 20000, 5), e.delta + 1e-9);
}

TEST(EstimateDelta, DeterministicAcrossThreadCounts) {
  const auto op = build_operator(OperatorKind::Gaussian, 5, 5, 30, 1);
  EstimatorOptions o;
  o.restarts = 8;
  o.iterations = 40;
  o.seed = 9;
  const auto a = estimate_delta(op, 2, o);
  o.threads = 4;
  const auto b = estimate_delta(op, 2, o);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(Ascent, AcceptedStepsAreMonotone) {
  const auto op = build_operator(OperatorKind::Gaussian, 6, 5, 40, 2);
  Rng rng(3);
  for (int side : {1, -1}) {
    for (int i = 0; i < 5; ++i) {
      const auto tr = ascend(op, 2, side, 60, random_unit_low_rank(6, 5, 2, rng));
      for (std::size_t k = 1; k < tr.objective.size(); ++k)
        EXPECT_GE(tr.objective[k], tr.objective[k - 1]);
    }
  }
}

TEST(EstimateSweep, NondecreasingInRank) {
  const auto op = build_operator(OperatorKind::Gaussian, 5, 5, 40, 4);
  EstimatorOptions o;
  o.restarts = 4;
  o.iterations = 40;
  const auto ests = estimate_sweep(op, 4, o);
  ASSERT_EQ(ests.size(), 4u);
  for (std::size_t i = 1; i < ests.size(); ++i) EXPECT_GE(ests[i].delta, ests[i - 1].delta);
  for (const auto& e : ests) expect_witness_certifies(op, e);
}

TEST(OrthogonalPair, IdentityInnerProductVanishes) {
  const auto op = build_operator(OperatorKind::Identity, 5, 4, 20, 0);
  const auto rep = check_orthogonal_pair_bound(op, 0.0, 2, 2, 100, 1);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.max_abs_inner, 1e-10);
}

TEST(OrthogonalPair, ScaledIdentityRatioWithinDelta) {
  OperatorParams p;
  p.scale_a = 0.2;
  const auto op = build_operator(OperatorKind::ScaledIdentity, 5, 4, 20, 0, p);
  const auto rep = check_orthogonal_pair_bound(op, 0.2, 2, 1, 100, 2);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.max_ratio, 0.2 + 1e-12);
}

TEST(OrthogonalPair, ZeroPair) {
  const auto op = build_operator(OperatorKind::Gaussian, 3, 3, 5, 0);
  const auto rep = check_orthogonal_pair(op, 0.0, DenseMatrix(3, 3), DenseMatrix(3, 3));
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(rep.max_abs_inner, 0.0);
}
