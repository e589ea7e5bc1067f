#include <gtest/gtest.h>

#include <cmath>

#include "rrd/corpus.hpp"
#include "rrd/fuzz.hpp"
#include "rrd/rng.hpp"
#include "rrd/taxonomy.hpp"

using namespace rrd;

namespace {

TaxonomyParams params(std::int64_t n, int d, std::int64_t p = 2, double a3 = 1.0 / 1200) {
  TaxonomyOverrides ov;
  ov.p = p;
  ov.a3 = a3;
  return derive_params(n, d, 1, ov);
}

CVec ones(std::int64_t n) { return CVec(n, 1.0); }

}  // namespace

TEST(DeriveParams, LargeExample) {
  auto P = derive_params(1000000, 1000, 1);
  EXPECT_EQ(P.p, 2);
  EXPECT_EQ(P.n1, 32);
  EXPECT_EQ(P.r, 4);
  EXPECT_EQ(P.r0, 0);
  EXPECT_EQ(P.n2, 10000);
  EXPECT_EQ(P.n3, 833);
  EXPECT_EQ(P.n0, 62);
  EXPECT_FALSE(P.ordered);
}

TEST(DeriveParams, DefaultPTooSmall) { EXPECT_THROW(derive_params(1000000, 100, 1), InvalidWindow); }

TEST(DeriveParams, LargestL) {
  TaxonomyOverrides ov;
  ov.p = 2;
  auto P = derive_params(64000, 10, 64, ov);
  // smallest r0 with 2^r0 >= 20 n / d^4 = 128
  EXPECT_EQ(P.r0, 7);
  EXPECT_THROW(derive_params(64000, 10, 65, ov), InvalidWindow);
}

TEST(DeriveParams, Guards) {
  EXPECT_THROW(derive_params(100, 2, 1), InvalidWindow);
  EXPECT_THROW(params(10, 3), InvalidWindow);
}

TEST(Rearrangement, RealPair) {
  auto R = rearrangement({1.0, -1.0});
  EXPECT_EQ(R.xstar, (std::vector<double>{1, 1}));
  EXPECT_EQ(R.xsharp, (CVec{1.0, -1.0}));
}

TEST(Rearrangement, RealPartFirst) {
  auto R = rearrangement({cplx(0, 1), 1.0});
  EXPECT_EQ(R.xsharp, (CVec{1.0, cplx(0, 1)}));
  EXPECT_EQ(R.perm, (std::vector<int>{1, 0}));
}

TEST(Rearrangement, Constant) {
  auto R = rearrangement(CVec(5, cplx(2, 2)));
  for (double v : R.xstar) EXPECT_DOUBLE_EQ(v, std::abs(cplx(2, 2)));
  EXPECT_EQ(R.perm, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(OrderStatistics, MatchesFullSort) {
  Philox g(4);
  CVec x(1000);
  for (auto& v : x) v = cplx(g.normal(), g.normal());
  auto xs = rearrangement(x).xstar;
  std::vector<std::int64_t> ranks{1, 7, 500, 999, 1000, 7};
  auto v = order_statistics(x, ranks);
  for (std::size_t t = 0; t < ranks.size(); ++t) EXPECT_DOUBLE_EQ(v[t], xs[ranks[t] - 1]);
}

TEST(Classify, BasisVectorIsT3) {
  auto P = params(5000, 10);
  CVec e(5000, 0.0);
  e[0] = 1;
  EXPECT_EQ(steep_class(e, P), SteepClass::T3);
}

TEST(Classify, OnesAlmostConstant) {
  auto P = params(5000, 10);
  auto V = classify(ones(5000), P);
  EXPECT_EQ(V.steep, SteepClass::None);
  EXPECT_TRUE(V.almost_constant);
  ASSERT_TRUE(V.lambda0.has_value());
  EXPECT_NEAR(std::abs(*V.lambda0 - 1.0), 0.0, 1e-12);
  EXPECT_FALSE(V.gradual);
  EXPECT_TRUE(V.normalized);
}

TEST(Classify, JumpAtFirstScaleIsT0) {
  // p^{r0} = 2 here; two coordinates at 4d + 1 above a flat tail of ones.
  auto P = params(5000, 10);
  ASSERT_EQ(P.pow_p(P.r0), 2);
  CVec x = ones(5000);
  x[10] = x[20] = 41.0;
  int t0 = -1;
  EXPECT_EQ(steep_class(x, P, &t0), SteepClass::T0);
  EXPECT_EQ(t0, P.r0);
  x[10] = x[20] = 40.0;
  EXPECT_EQ(steep_class(x, P), SteepClass::None);
}

TEST(Classify, ZeroVectorRejected) {
  auto P = params(5000, 10);
  EXPECT_THROW(classify(CVec(5000, 0.0), P), InputError);
}

TEST(Weak13, Examples) {
  CVec e(10, 0.0);
  e[3] = 1;
  EXPECT_DOUBLE_EQ(weak13_norm(e, 1), 1e-3);
  EXPECT_EQ(weak13_norm(CVec(10, 0.0), 4), 0.0);
  EXPECT_DOUBLE_EQ(weak13_norm({8.0, 0.0, 64.0, 0.0}, 2), 1.0);
}

TEST(AlmostConstant, OnesAndPerturbation) {
  auto P = params(5000, 10);
  auto W = almost_constant_witness(ones(5000), P.theta0, P);
  ASSERT_TRUE(W.has_value());
  EXPECT_EQ(W->lambda0, cplx(1.0));
  CVec x = ones(5000);
  x[0] = 1 + P.theta0 / 2;
  W = almost_constant_witness(x, P.theta0, P);
  ASSERT_TRUE(W.has_value());
  EXPECT_EQ(W->J1.size(), 5000u);
  EXPECT_TRUE(W->rhon3_ok);
}

TEST(AlmostConstant, SpreadPointsHaveNoWitness) {
  auto P = params(5000, 10);
  CVec x(5000);
  for (int i = 0; i < 5000; ++i) x[i] = 1.0 + i * 3 * P.theta0;
  EXPECT_FALSE(almost_constant_witness(x, P.theta0, P).has_value());
}

TEST(AlmostConstant, WitnessBallHoldsEnoughPoints) {
  auto P = params(6000, 3);
  Philox g(17);
  for (int rep = 0; rep < 200; ++rep) {
    CVec x(6000);
    const cplx c(g.normal(), g.normal());
    const double spread = g.uniform01() * 2 * P.theta0 * std::abs(c);
    for (auto& v : x) v = c + spread * cplx(g.uniform01() - 0.5, g.uniform01() - 0.5);
    for (int t = 0; t < 3; ++t) x[g.uniform_int(6000)] = 50.0 * c;
    auto W = almost_constant_witness(x, P.theta0, P);
    if (!W) continue;
    const double xn3 = order_statistics(x, {P.n3})[0];
    std::int64_t inside = 0;
    for (auto v : x) inside += std::abs(v - W->lambda0) <= P.theta0 * xn3 * (1 + 1e-12);
    EXPECT_GE(inside, 6000 - P.n3 + 1);
  }
}

TEST(Split, OnesNotSplit) {
  auto P = params(20000, 400);
  EXPECT_FALSE(split_shifted(ones(20000), 12, P).has_value());
}

TEST(Split, SpikesOverConstant) {
  auto P = params(20000, 400);
  ASSERT_EQ(P.n0, 3);
  CVec x = ones(20000);
  for (int i = 0; i < P.n0; ++i) x[100 * i + 7] = 100.0;
  auto S = split_shifted(x, 12, P);
  ASSERT_TRUE(S.has_value());
  EXPECT_EQ(S->c, cplx(1.0));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(S->w[i], x[i] - 1.0);
  EXPECT_TRUE(S->steep_ok);
  EXPECT_TRUE(S->shift_ok);
}

TEST(Split, Guards) {
  auto P = params(20000, 400);
  CVec x(20000, 0.0);
  for (int i = 0; i < 5; ++i) x[i] = 1;
  EXPECT_THROW(split_shifted(x, 12, P), InputError);
  EXPECT_THROW(split_shifted(ones(20000), 11, P), InputError);
}

TEST(Decay, OnesClean) {
  auto P = params(5000, 10);
  EXPECT_TRUE(decay_check(ones(5000), P).empty());
}

TEST(Decay, BasisVectorViolates) {
  auto P = params(5000, 10);
  CVec e(5000, 0.0);
  e[0] = 1;
  auto V = decay_check(e, P);
  ASSERT_FALSE(V.empty());
  EXPECT_EQ(V[0].family, 1);
  EXPECT_EQ(V[0].m, 1);
}

TEST(Decay, HoldsOutsideSteepClasses) {
  auto P = params(5000, 10);
  Philox g(31);
  int checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    auto x = random_profile_vector(g, 5000);
    if (steep_class(x, P) != SteepClass::None) continue;
    ++checked;
    EXPECT_TRUE(decay_check(x, P).empty()) << rep;
  }
  EXPECT_GT(checked, 100);
}

TEST(NormBound, HoldsOutsideT3) {
  auto P = params(5000, 10);
  Philox g(32);
  for (int rep = 0; rep < 300; ++rep) {
    auto C = norm_bound_check(random_profile_vector(g, 5000), P);
    if (C.applicable) EXPECT_TRUE(C.holds) << rep;
  }
}

TEST(BallCount, MatchesQuadraticCount) {
  Philox g(6);
  for (int rep = 0; rep < 30; ++rep) {
    CVec x(300);
    for (auto& v : x) v = cplx(g.uniform01(), g.uniform01());
    const double t = 0.01 + 0.2 * g.uniform01();
    std::int64_t lo = 0, hi = 0;
    for (const auto& c : x) {
      std::int64_t a = 0, b = 0;
      for (const auto& v : x) {
        a += std::norm(v - c) <= t * t;
        b += std::norm(v - c) <= 4 * t * t;
      }
      lo = std::max(lo, a);
      hi = std::max(hi, b);
    }
    auto B = max_ball_count(x, t);
    EXPECT_EQ(B.lower, lo);
    EXPECT_EQ(B.upper, hi);
  }
}

TEST(ManyLevels, EquallySpacedPassesBall) {
  const int n = 5000;
  auto P = params(n, 10);
  CVec x(n);
  for (int i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1) / n;
  auto V = many_levels_verdict(x, 0.4 / n, 2.0 / n, 1, P);
  EXPECT_TRUE(V.ball_ok);
  EXPECT_LE(V.ball.upper, 2);
}

TEST(ManyLevels, BasisVectorVerySteep) {
  auto P = params(5000, 10);
  CVec e(5000, 0.0);
  e[0] = 1;
  EXPECT_TRUE(many_levels_verdict(e, 0.1, 0.5, 2, P).very_steep);
}

TEST(ManyLevels, OnesFailBall) {
  auto P = params(5000, 10);
  auto V = many_levels_verdict(ones(5000), 0.01, 0.9, 1, P);
  EXPECT_FALSE(V.ball_ok);
  EXPECT_FALSE(V.gradual_many_levels);
}

TEST(Corpus, GradualVectorsAreNormalizedAndGradual) {
  auto P = params(5000, 10);
  for (int kind = 0; kind < 4; ++kind) {
    auto x = gradual_vector(vector_kind_from(kind), P, 100 + kind);
    auto V = classify(x, P);
    EXPECT_TRUE(V.gradual);
    EXPECT_TRUE(V.normalized);
  }
}
