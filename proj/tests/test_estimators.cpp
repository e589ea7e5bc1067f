#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rrd/corpus.hpp"
#include "rrd/decomposition.hpp"
#include "rrd/estimators.hpp"
#include "rrd/rng.hpp"
#include "rrd/sampler.hpp"

using namespace rrd;

namespace {

struct PartSpec {
  PartKind kind;
  std::vector<IndexSet> levels;
};

// Decomposition with the given parts; level values are placeholders.
EllDecomposition make_decomp(int n, int d, const std::vector<PartSpec>& parts) {
  EllDecomposition D;
  D.n = n;
  D.d = d;
  for (std::size_t q = 0; q < parts.size(); ++q) {
    EllPart P{0, parts[q].kind, {}, 0};
    for (const auto& L : parts[q].levels) {
      P.levels.push_back(static_cast<int>(D.levels.size()));
      D.levels.push_back({0, {static_cast<std::int64_t>(D.levels.size()), 0}, static_cast<int>(D.members.size()), static_cast<int>(L.size())});
      D.members.insert(D.members.end(), L.begin(), L.end());
      P.size += static_cast<int>(L.size());
    }
    D.parts.push_back(P);
  }
  return D;
}

QMatrix make_q(int d, const std::vector<std::vector<int>>& rows) {
  QMatrix Q{static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), d, {}};
  for (const auto& r : rows) Q.entries.insert(Q.entries.end(), r.begin(), r.end());
  return Q;
}

}  // namespace

TEST(FloorLog2Ratio, MatchesLoop) {
  Philox g(1);
  for (int rep = 0; rep < 2000; ++rep) {
    const __int128 a = 1 + static_cast<__int128>(g.uniform_int(1u << 30)) * (1 + g.uniform_int(1000));
    const __int128 b = 1 + static_cast<__int128>(g.uniform_int(1u << 20));
    int e = 0;
    while (static_cast<__int128>(1) << (e + 1) <= a / b && e < 100) ++e;
    if (a < b) {
      e = -1;
      while ((a << -e) < b) --e;
    }
    EXPECT_EQ(floor_log2_ratio(a, b), e);
  }
  EXPECT_EQ(floor_log2_ratio(1, 2), -1);
  EXPECT_EQ(floor_log2_ratio(3, 2), 0);
  EXPECT_EQ(floor_log2_ratio(4, 1), 2);
  EXPECT_THROW(floor_log2_ratio(0, 1), InputError);
}

TEST(Bundle, RegularWeight) {
  auto D = make_decomp(4, 8, {{PartKind::Regular, {{0}, {1}}}, {PartKind::Regular, {{2}, {3}}}});
  auto B = compute_bundle(D, make_q(8, {{4, 4}, {4, 4}, {4, 4}, {4, 4}}));
  EXPECT_DOUBLE_EQ(B.weight(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(B.SB[0], 1.0);
}

TEST(Bundle, SpreadWeight) {
  auto D = make_decomp(6, 8, {{PartKind::Spread, {{0}, {1}, {2}}}, {PartKind::Regular, {{3}, {4}, {5}}}});
  auto B = compute_bundle(D, make_q(8, std::vector<std::vector<int>>(6, {4, 4})));
  EXPECT_DOUBLE_EQ(B.weight(0, 0), 6.0);
  EXPECT_DOUBLE_EQ(B.weight(0, 1), 1.5);
  EXPECT_DOUBLE_EQ(B.SB[0], 1.0 / 6);
}

TEST(Bundle, SinglePartHasNoOffset) {
  auto D = make_decomp(3, 2, {{PartKind::Regular, {{0}, {1, 2}}}});
  auto B = compute_bundle(D, make_q(2, {{2}, {2}, {2}}));
  EXPECT_EQ(B.eta, 0.0);
  EXPECT_EQ(B.wset_balance(), 0.0);
}

TEST(Bundle, HandTraceThreeRows) {
  auto D = make_decomp(3, 2, {{PartKind::Regular, {{0}}}, {PartKind::Regular, {{1}, {2}}}});
  auto B = compute_bundle(D, make_q(2, {{1, 1}, {1, 1}, {0, 2}}));
  EXPECT_DOUBLE_EQ(B.wtilde[0], 0.5);
  EXPECT_DOUBLE_EQ(B.wtilde[1], 1.0);
  EXPECT_EQ(B.wtilde_b, (std::vector<int>{-1, 0}));
  EXPECT_EQ(B.b_min, -1);
  EXPECT_EQ(B.b_max, 0);
  EXPECT_EQ(B.eta_i, (std::vector<double>{0.5, 0.5, 0.0}));
  EXPECT_DOUBLE_EQ(B.eta, 1.0);
  EXPECT_DOUBLE_EQ(B.wset_balance(), 1.0);
}

TEST(Bundle, RejectsInadmissibleQ) {
  auto D = make_decomp(3, 2, {{PartKind::Regular, {{0}}}, {PartKind::Regular, {{1}, {2}}}});
  EXPECT_THROW(compute_bundle(D, make_q(2, {{2, 0}, {1, 1}, {0, 2}})), InputError);
  EXPECT_THROW(compute_bundle(D, make_q(2, {{1, 1}, {1, 1}, {1, 2}})), InputError);
}

TEST(TruncatedWeights, ExactExponents) {
  // A large spread part: value h sqrt(d |L| / n), exponent floor(log2) computed exactly.
  auto D = make_decomp(8, 2, {{PartKind::Spread, {{0, 1, 2, 3}, {4, 5, 6, 7}}}});
  auto T = truncated_weights(D);
  ASSERT_TRUE(T.large[0]);
  EXPECT_DOUBLE_EQ(T.value[0], 2 * std::sqrt(2.0));
  EXPECT_EQ(T.b[0], 1);
}

TEST(Standard, SingleColumnHolds) {
  EXPECT_TRUE(is_standard(make_q(3, {{3}, {3}, {3}, {3}})).holds);
}

TEST(Standard, HeavyColumnWithEmptyRowsFails) {
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < 16; ++i) rows.push_back(i < 8 ? std::vector<int>{16, 0} : std::vector<int>{0, 16});
  auto S = is_standard(make_q(16, rows));
  EXPECT_FALSE(S.cond1);
  EXPECT_EQ(S.failed_column, 0);
  EXPECT_FALSE(S.holds);
}

TEST(Standard, TwoSidedMatchesDirectCount) {
  Philox g(12);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 10, d = 4, m = 3;
    QMatrix Q{n, m, d, std::vector<int>(n * m, 0)};
    for (int i = 0; i < n; ++i)
      for (int w = 0; w < d; ++w) ++Q(i, static_cast<int>(g.uniform_int(m)));
    std::vector<int> J;
    for (int q = 0; q < m; ++q)
      if (g.uniform01() < 0.5) J.push_back(q);
    if (J.empty()) J.push_back(0);
    const double c = 0.25;
    double k = 0;
    std::vector<int> s(n, 0);
    for (int i = 0; i < n; ++i)
      for (int q : J) s[i] += Q(i, q);
    for (int v : s) k += v;
    int good = 0;
    for (int i = 0; i < n; ++i) good += s[i] >= c * k / n && d - s[i] >= c * (d * n - k) / n;
    EXPECT_EQ(two_sided_holds(Q, J, c), good >= c * std::min({k, d * n - k, static_cast<double>(n)}));
  }
}

TEST(Levy, ConstantSamples) {
  auto L = levy_estimate(CVec(100, cplx(3, 1)), 0.1);
  EXPECT_EQ(L.value, 1.0);
  EXPECT_EQ(L.upper, 1.0);
}

TEST(Levy, FairCoin) {
  Philox g(9);
  CVec s(10000);
  for (auto& v : s) v = static_cast<double>(g.next_u32() & 1);
  EXPECT_NEAR(levy_estimate(s, 0.4).value, 0.5, 0.02);
}

TEST(Levy, UniformDisk) {
  Philox g(10);
  CVec s;
  while (s.size() < 20000) {
    cplx z(2 * g.uniform01() - 1, 2 * g.uniform01() - 1);
    if (std::norm(z) <= 1) s.push_back(z);
  }
  const double t = 0.1;
  auto L = levy_estimate(s, t);
  EXPECT_GE(L.value, 0.8 * t * t);
  EXPECT_LE(L.value, 1.3 * t * t);
  EXPECT_LE(L.upper, 1.3 * 4 * t * t);
  EXPECT_GE(L.upper, L.value);
}

TEST(Estimators, OffsetBoundOnProjectedMatrices) {
  TaxonomyOverrides ov;
  ov.p = 2;
  auto P = derive_params(2000, 20, 1, ov);
  for (std::uint64_t t = 0; t < 6; ++t) {
    auto M = sample_auto(2000, 20, 50 + t);
    auto x = gradual_vector(vector_kind_from(static_cast<int>(t)), P, 70 + t);
    auto D = decompose(k_approx(x, 400), 20);
    auto Q = project_Q(M, D);
    auto B = compute_bundle(D, Q);
    StandardOptions so;
    so.order = wtilde_order(B);
    auto S = is_standard(Q, so);
    auto O = offset_bound_check(B, Q, 0.25);
    if (S.holds) EXPECT_TRUE(O.holds);
    EXPECT_GE(measured_product_constant(B), 1.0);
    EXPECT_LE(measured_product_constant(B), 16.0);
    for (int i = 0; i < Q.n; ++i) EXPECT_LE(B.SB[i], 1.0);
  }
}
