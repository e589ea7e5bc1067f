#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rrd/ell_decomp.hpp"
#include "rrd/fuzz.hpp"
#include "rrd/rng.hpp"

using namespace rrd;

namespace {

KVector golden() {
  // (1/2, 1/3, 1/2, 1/6, 1/2, 1/3, -1/3) with k = 6
  return {6, {{3, 0}, {2, 0}, {3, 0}, {1, 0}, {3, 0}, {2, 0}, {-2, 0}}};
}

struct NaivePart {
  int order;
  bool spread;
  std::vector<std::pair<LatticePoint, IndexSet>> levels;  // decreasing value
  bool operator==(const NaivePart&) const = default;
};

// Direct quadratic construction: chunks 1, 2, 4, ... per value, then per
// order the greedy selection of pairwise far values, started from the
// largest value that has some value at distance >= d.
std::vector<NaivePart> naive_decompose(const KVector& y, int d) {
  std::map<LatticePoint, IndexSet> groups;
  for (int i = 0; i < y.n(); ++i) groups[y.coords[i]].push_back(i);
  std::vector<std::vector<std::pair<LatticePoint, IndexSet>>> orders;
  for (auto& [v, idx] : groups) {
    std::size_t off = 0;
    for (std::size_t j = 0; off < idx.size(); ++j) {
      const std::size_t rem = idx.size() - off, lo = std::size_t{1} << j;
      const std::size_t take = rem < 2 * lo ? rem : lo;
      if (orders.size() <= j) orders.resize(j + 1);
      orders[j].push_back({v, IndexSet(idx.begin() + off, idx.begin() + off + take)});
      off += take;
    }
  }
  auto far = [&](const LatticePoint& a, const LatticePoint& b) {
    const double dr = static_cast<double>(a.re - b.re), di = static_cast<double>(a.im - b.im);
    return dr * dr + di * di >= static_cast<double>(d) * d;
  };
  std::vector<NaivePart> spread, regular;
  for (std::size_t j = 0; j < orders.size(); ++j) {
    const auto& c = orders[j];  // increasing values
    std::vector<char> sel(c.size(), 0);
    int start = -1;
    for (int t = static_cast<int>(c.size()) - 1; t >= 0 && start < 0; --t)
      for (const auto& o : c)
        if (far(c[t].first, o.first)) {
          start = t;
          break;
        }
    if (start >= 0) {
      sel[start] = 1;
      for (int t = start - 1; t >= 0; --t) {
        bool ok = true;
        for (std::size_t s = 0; s < c.size(); ++s)
          if (sel[s] && !far(c[t].first, c[s].first)) ok = false;
        sel[t] = ok;
      }
    }
    NaivePart S{static_cast<int>(j), true, {}}, R{static_cast<int>(j), false, {}};
    for (int t = static_cast<int>(c.size()) - 1; t >= 0; --t) (sel[t] ? S : R).levels.push_back(c[t]);
    if (!S.levels.empty()) spread.push_back(S);
    if (!R.levels.empty()) regular.push_back(R);
  }
  spread.insert(spread.end(), regular.begin(), regular.end());
  return spread;
}

std::vector<NaivePart> as_naive(const EllDecomposition& D) {
  std::vector<NaivePart> out;
  for (const auto& P : D.parts) {
    NaivePart N{P.order, P.kind == PartKind::Spread, {}};
    for (int l : P.levels) {
      auto s = D.indices(l);
      IndexSet idx(s.begin(), s.end());
      std::sort(idx.begin(), idx.end());
      N.levels.push_back({D.levels[l].value, idx});
    }
    out.push_back(N);
  }
  return out;
}

}  // namespace

TEST(KApprox, FloorsEachCoordinate) {
  auto y = k_approx({cplx(0.7, 0.3)}, 2);
  EXPECT_EQ(y.coords[0], (LatticePoint{1, 0}));
  EXPECT_EQ(k_approx({cplx(-0.3, 0)}, 2).coords[0], (LatticePoint{-1, 0}));
}

TEST(KApprox, IdempotentOnLattice) {
  CVec x{cplx(0.25, -0.75), cplx(3, 0.5), cplx(-1.25, 2)};
  auto y = k_approx(x, 4);
  CVec back;
  for (int i = 0; i < y.n(); ++i) back.push_back(y.value(i));
  EXPECT_EQ(back, x);
  EXPECT_EQ(k_approx(back, 4).coords, y.coords);
}

TEST(KApprox, ExactFloorNearIntegers) {
  EXPECT_EQ(floor_scaled(1.0 / 3.0, 3), 0);  // the double is just below 1/3
  EXPECT_EQ(floor_scaled(0.5, 6), 3);
  EXPECT_EQ(floor_scaled(-1e-300, 1000), -1);
}

TEST(Decompose, GoldenExample) {
  auto D = decompose(golden(), 2);
  ASSERT_EQ(D.parts.size(), 3u);
  EXPECT_EQ(D.parts[0].kind, PartKind::Spread);
  EXPECT_EQ(D.parts[0].order, 0);
  EXPECT_EQ(D.parts[0].height(), 3);
  EXPECT_EQ(D.part_indices(0), (IndexSet{0, 3, 6}));
  EXPECT_EQ(D.parts[1].kind, PartKind::Regular);
  EXPECT_EQ(D.parts[1].order, 0);
  EXPECT_EQ(D.parts[1].height(), 1);
  EXPECT_EQ(D.part_indices(1), (IndexSet{1}));
  EXPECT_EQ(D.parts[2].kind, PartKind::Regular);
  EXPECT_EQ(D.parts[2].order, 1);
  EXPECT_EQ(D.parts[2].height(), 2);
  EXPECT_EQ(D.part_indices(2), (IndexSet{2, 4, 5}));
}

TEST(Decompose, GoldenClassStats) {
  auto S = class_stats(decompose(golden(), 2));
  ASSERT_EQ(S.size(), 2u);
  EXPECT_EQ(S[0], (OrderStats{0, 3, 1, 3, 1}));
  EXPECT_EQ(S[1], (OrderStats{1, 0, 3, 0, 2}));
}

TEST(Decompose, GoldenLogBound) {
  auto S = class_stats(decompose(golden(), 2));
  EXPECT_NEAR(class_cardinality_log_bound(S, 7), std::log(5040.0 * 216 / 36), 1e-12);
}

TEST(Decompose, ConstantVector) {
  KVector y{1, std::vector<LatticePoint>(4, {5, 5})};
  auto D = decompose(y, 3);
  ASSERT_EQ(D.parts.size(), 2u);
  EXPECT_EQ(D.parts[0].kind, PartKind::Regular);
  EXPECT_EQ(D.part_indices(0), (IndexSet{0}));
  EXPECT_EQ(D.parts[0].height(), 1);
  EXPECT_EQ(D.parts[1].order, 1);
  EXPECT_EQ(D.part_indices(1), (IndexSet{1, 2, 3}));
  EXPECT_EQ(D.parts[1].height(), 1);
  for (const auto& s : class_stats(D)) EXPECT_EQ(s.cs, 0);
}

TEST(Decompose, TwoFarValues) {
  KVector y{1, {{0, 0}, {0, 3}}};
  auto D = decompose(y, 2);
  ASSERT_EQ(D.parts.size(), 1u);
  EXPECT_EQ(D.parts[0].kind, PartKind::Spread);
  EXPECT_EQ(D.parts[0].height(), 2);
}

TEST(Decompose, NearValuesAreRegular) {
  KVector y{1, {{0, 0}, {1, 1}, {2, 0}}};
  auto D = decompose(y, 3);
  ASSERT_EQ(D.parts.size(), 1u);
  EXPECT_EQ(D.parts[0].kind, PartKind::Regular);
}

TEST(Decompose, SmallLogBounds) {
  EXPECT_NEAR(class_cardinality_log_bound({{0, 0, 1, 0, 1}}, 1), 0.0, 1e-15);
  EXPECT_NEAR(class_cardinality_log_bound({{0, 0, 2, 0, 1}}, 2), 0.0, 1e-15);
  EXPECT_THROW(class_cardinality_log_bound({{0, 0, 2, 0, 1}}, 3), InputError);
}

TEST(LevelSchedule, Sizes) {
  EXPECT_EQ(level_schedule(1), (std::vector<std::int64_t>{1}));
  EXPECT_EQ(level_schedule(4), (std::vector<std::int64_t>{1, 3}));
  EXPECT_EQ(level_schedule(7), (std::vector<std::int64_t>{1, 2, 4}));
  EXPECT_EQ(level_schedule(8), (std::vector<std::int64_t>{1, 2, 5}));
  for (std::int64_t c = 1; c < 2000; ++c) {
    auto s = level_schedule(c);
    EXPECT_EQ(std::accumulate(s.begin(), s.end(), std::int64_t{0}), c);
    for (std::size_t j = 0; j + 1 < s.size(); ++j) EXPECT_EQ(s[j], std::int64_t{1} << j);
    const std::int64_t last = std::int64_t{1} << (s.size() - 1);
    EXPECT_GE(s.back(), std::max<std::int64_t>(last / 2, 1));
    EXPECT_LT(s.back(), 2 * last);
  }
}

TEST(Decompose, MatchesNaiveConstruction) {
  Philox g(2024);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + static_cast<int>(g.uniform_int(rep < 200 ? 60 : 600));
    const int d = 1 + static_cast<int>(g.uniform_int(6));
    const std::int64_t k = 1 + static_cast<std::int64_t>(g.uniform_int(200));
    auto y = random_kvector(g, n, k);
    auto D = decompose(y, d);
    ASSERT_EQ(as_naive(D), naive_decompose(y, d)) << "rep " << rep << " n " << n << " d " << d;
  }
}

TEST(Decompose, InvariantChecksPass) {
  Philox g(99);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(g.uniform_int(3000));
    const int d = 1 + static_cast<int>(g.uniform_int(8));
    auto y = random_kvector(g, n, 1 + static_cast<std::int64_t>(g.uniform_int(512)));
    auto D = decompose(y, d);
    EXPECT_EQ(check_level_sets(y, D), "");
    EXPECT_EQ(check_level_schedule(y, D), "");
    EXPECT_EQ(check_height_monotone(D), "");
    EXPECT_EQ(check_spread_separation(D), "");
  }
}

TEST(Decompose, PermutationEquivariance) {
  Philox g(5);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(g.uniform_int(400));
    auto y = random_kvector(g, n, 64);
    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    g.shuffle(sigma.begin(), sigma.end());
    KVector z = y;
    for (int i = 0; i < n; ++i) z.coords[sigma[i]] = y.coords[i];
    auto A = decompose(y, 3), B = decompose(z, 3);
    EXPECT_EQ(class_stats(A), class_stats(B));
    ASSERT_EQ(A.parts.size(), B.parts.size());
    for (std::size_t q = 0; q < A.parts.size(); ++q) {
      IndexSet mapped;
      for (int i : A.part_indices(static_cast<int>(q))) mapped.push_back(sigma[i]);
      std::sort(mapped.begin(), mapped.end());
      // Indices within a level set may be chosen differently; values and sizes agree.
      ASSERT_EQ(A.parts[q].height(), B.parts[q].height());
      for (int t = 0; t < A.parts[q].height(); ++t) {
        EXPECT_EQ(A.levels[A.parts[q].levels[t]].value, B.levels[B.parts[q].levels[t]].value);
        EXPECT_EQ(A.levels[A.parts[q].levels[t]].size, B.levels[B.parts[q].levels[t]].size);
      }
    }
  }
}

TEST(Decompose, Deterministic) {
  Philox g(8);
  auto y = random_kvector(g, 5000, 1000);
  EXPECT_EQ(as_naive(decompose(y, 4)), as_naive(decompose(y, 4)));
}

TEST(Decompose, LargeCoordinates) {
  // Values far beyond 2^30 exercise the wide arithmetic path.
  KVector y{1, {{std::int64_t{1} << 50, 0}, {0, std::int64_t{1} << 50}, {-(std::int64_t{1} << 50), 5}, {3, 3}}};
  auto D = decompose(y, 1 << 20);
  EXPECT_EQ(as_naive(D), naive_decompose(y, 1 << 20));
}

TEST(EqualValueCounts, Golden) {
  EXPECT_EQ(equal_value_counts(golden()), (std::vector<int>{3, 2, 3, 1, 3, 2, 1}));
}
