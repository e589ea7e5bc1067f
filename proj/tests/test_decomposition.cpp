#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rrd/corpus.hpp"
#include "rrd/decomposition.hpp"

using namespace rrd;

namespace {

TaxonomyParams params() {
  TaxonomyOverrides ov;
  ov.p = 2;
  return derive_params(5000, 10, 1, ov);
}

CVec blocks(double a, double b) {
  CVec x(5000, a);
  for (int i = 0; i < 2500; ++i) x[i] = b;
  return x;
}

// Copies the median-magnitude coordinate into the `count` smallest ones; the
// top order statistics are untouched.
CVec plant_ball(CVec x, int count) {
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(x[a]) < std::abs(x[b]); });
  const cplx lambda = x[idx[x.size() / 2]];
  for (int i = 0; i < count; ++i) x[idx[i]] = lambda;
  return x;
}

}  // namespace

TEST(PowInt, Overflow) {
  EXPECT_EQ(pow_int(10, 4), 10000);
  EXPECT_THROW(pow_int(10, 17), InputError);
}

TEST(Ku, CloseBlocksHaveNoSpreadPart) {
  auto K = in_Ku(blocks(1.0, 1.05), 2, 1.0 / 128, params(), false);
  EXPECT_FALSE(K.member);
  EXPECT_EQ(K.spread_total, 0);
}

TEST(Ku, IsolatedCoordinatesGiveSpreadPart) {
  CVec x(5000, 1.0);
  for (int i = 0; i < 10; ++i) x[i] = 2.0 + 0.2 * i;
  auto K = in_Ku(x, 2, 1.0 / 128, params(), false);
  EXPECT_TRUE(K.member);
  EXPECT_GE(K.spread_total, 10);
}

TEST(Ku, ZeroThreshold) {
  EXPECT_TRUE(in_Ku(blocks(1.0, 1.05), 2, 0.0, params(), false).member);
}

TEST(Ku, RequiresGradual) {
  EXPECT_THROW(in_Ku(CVec(5000, 1.0), 4, 1.0 / 128, params()), InputError);
}

TEST(Pv, SmallHeightThresholdCoincidesWithS) {
  auto P = params();
  for (int kind = 0; kind < 4; ++kind) {
    auto x = gradual_vector(vector_kind_from(kind), P, 7 + kind);
    auto C = in_Pv(x, 5, 1.0 / 12800, P);
    EXPECT_LE(C.height_threshold, 1.0);
    EXPECT_TRUE(C.member);
    EXPECT_EQ(C.total, 5000);
  }
}

TEST(Pv, FlatPartsBelowLargeThreshold) {
  auto C = in_Pv(CVec(5000, 1.0), 5, 1000.0, params(), false);
  EXPECT_GT(C.height_threshold, 1.0);
  EXPECT_FALSE(C.member);
}

TEST(Pv, EquallySpacedIsTall) {
  CVec x(5000);
  for (int i = 0; i < 5000; ++i) x[i] = static_cast<double>(i) / 5000;
  auto C = in_Pv(x, 5, 1.0 / 12800, params(), false);
  EXPECT_TRUE(C.member);
  ASSERT_FALSE(C.parts.empty());
}

TEST(PvRhoDelta, HeavyBall) {
  auto P = params();
  auto x = plant_ball(gradual_vector(VectorKind::Clusters, P, 3), 1000);
  const double rho = std::pow(10.0, -5);
  auto R = in_Pv_rho_delta(x, 5, rho, 0.2, 1.0 / 12800, P);
  EXPECT_GE(R.ball.upper, 1000);
  EXPECT_EQ(R.member, R.pv.member);
  EXPECT_FALSE(in_Pv_rho_delta(x, 5, rho, 1.5, 1.0 / 12800, P).member);
}

TEST(HeavyWset, FoundWhenBallIsHeavy) {
  auto P = params();
  const double delta = 0.1, rho = std::pow(10.0, -5);
  int checked = 0;
  for (int kind = 0; kind < 4; ++kind) {
    auto x = plant_ball(gradual_vector(vector_kind_from(kind), P, 20 + kind), 600);
    auto R = in_Pv_rho_delta(x, 5, rho, delta, 1.0 / 12800, P);
    if (!R.member) continue;
    ++checked;
    auto W = heavy_wset(x, 5, delta, P);
    EXPECT_TRUE(W.found) << kind;
    EXPECT_LE(W.b, W.order_bound);
    EXPECT_GE(static_cast<double>(W.size), W.size_bound);
  }
  EXPECT_GT(checked, 0);
}

TEST(Cover, MassiveSpreadPartAtFour) {
  auto P = params();
  auto x = gradual_vector(VectorKind::Lattice, P, 1);
  auto W = cover_witness(x, 8, {}, P);
  EXPECT_EQ(W.branch, CoverWitness::Branch::Ku);
  EXPECT_EQ(W.u, 4);
}

TEST(Cover, WitnessForEveryKind) {
  auto P = params();
  CoverConstants C;
  for (int t = 0; t < 8; ++t) {
    auto x = gradual_vector(vector_kind_from(t), P, 200 + t);
    EXPECT_NO_THROW(cover_witness(x, 8, C, P)) << t;
    auto y = k_approx(x, pow_int(10, 4));
    auto D = decompose(y, 10);
    EXPECT_TRUE(separated_sets(y, P.n3, P.theta0 / 2).found) << t;
    EXPECT_TRUE(tall_or_spread(D, P.n3).holds()) << t;
    EXPECT_TRUE(refinement_dichotomy(x, 4, C.cK, P).holds()) << t;
  }
}

TEST(Separation, GapIsRealised) {
  auto P = params();
  auto x = gradual_vector(VectorKind::Annulus, P, 5);
  auto y = k_approx(x, 10000);
  auto S = separated_sets(y, P.n3, P.theta0 / 2);
  ASSERT_TRUE(S.found);
  double worst = 1e300;
  for (int i : S.I)
    for (int j : S.J) worst = std::min(worst, std::abs(y.value(i) - y.value(j)));
  EXPECT_GE(worst, S.gap * (1 - 1e-12));
  EXPECT_GE(S.gap, P.theta0 / 2);
  EXPECT_GE(static_cast<std::int64_t>(S.I.size()), (P.n3 + 3) / 4);
}
