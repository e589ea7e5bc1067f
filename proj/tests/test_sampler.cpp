#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "rrd/ell_decomp.hpp"
#include "rrd/qmatrix.hpp"
#include "rrd/sampler.hpp"

using namespace rrd;

namespace {

// Counts 0/1 n x n matrices with all row and column sums d by choosing row
// supports as bitmasks and checking column sums.
std::int64_t brute_count(int n, int d) {
  std::vector<int> masks;
  for (int m = 0; m < (1 << n); ++m)
    if (__builtin_popcount(m) == d) masks.push_back(m);
  std::vector<int> cols(n, 0);
  std::int64_t count = 0;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      ++count;
      return;
    }
    for (int m : masks) {
      bool ok = true;
      for (int j = 0; j < n; ++j)
        if ((m >> j & 1) && cols[j] == d) ok = false;
      if (!ok) continue;
      for (int j = 0; j < n; ++j) cols[j] += m >> j & 1;
      rec(i + 1);
      for (int j = 0; j < n; ++j) cols[j] -= m >> j & 1;
    }
  };
  rec(0);
  return count;
}

EllDecomposition single_part(int n, int d) {
  EllDecomposition D;
  D.n = n;
  D.d = d;
  D.members.resize(n);
  std::iota(D.members.begin(), D.members.end(), 0);
  D.levels.push_back({0, {0, 0}, 0, n});
  D.parts.push_back({0, PartKind::Regular, {0}, n});
  return D;
}

}  // namespace

TEST(Enumerate, SmallCounts) {
  EXPECT_EQ(enumerate_all(2, 1).size(), 2u);
  EXPECT_EQ(enumerate_all(3, 1).size(), 6u);
  EXPECT_EQ(enumerate_all(4, 2).size(), 90u);
}

TEST(Enumerate, AgreesWithBruteForce) {
  for (auto [n, d] : std::vector<std::pair<int, int>>{{4, 2}, {5, 2}, {5, 3}, {4, 3}, {6, 1}}) {
    auto all = enumerate_all(n, d);
    EXPECT_EQ(static_cast<std::int64_t>(all.size()), brute_count(n, d)) << n << " " << d;
    std::set<RegularMatrix> distinct(all.begin(), all.end());
    EXPECT_EQ(distinct.size(), all.size());
    for (const auto& M : all) EXPECT_NO_THROW(M.validate());
  }
}

TEST(Rejection, UniqueOneByOne) {
  auto M = sample_uniform(1, 1, 3);
  EXPECT_EQ(M, RegularMatrix::identity(1));
}

TEST(Rejection, TwoStatesBalanced) {
  int id = 0;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) id += sample_uniform(2, 1, derive_seed(5, {static_cast<std::uint64_t>(t)})) == RegularMatrix::identity(2);
  EXPECT_NEAR(static_cast<double>(id) / draws, 0.5, 0.02);
}

TEST(Rejection, SeededDeterminism) {
  EXPECT_EQ(sample_uniform(30, 3, 77), sample_uniform(30, 3, 77));
  EXPECT_FALSE(sample_uniform(30, 3, 77) == sample_uniform(30, 3, 78));
}

TEST(Rejection, BudgetExceeded) {
  EXPECT_THROW(sample_uniform(200, 20, 1, 1), RejectionBudgetExceeded);
}

TEST(Mcmc, ZeroStepsKeepsStart) {
  auto M = RegularMatrix::circulant(7, {0, 1, 3});
  EXPECT_EQ(sample_mcmc(M, 0, 9), M);
}

TEST(Mcmc, TwoStateChainBalanced) {
  int id = 0;
  const int draws = 1000;
  for (int t = 0; t < draws; ++t)
    id += sample_mcmc(RegularMatrix::identity(2), 10000, derive_seed(8, {static_cast<std::uint64_t>(t)})) == RegularMatrix::identity(2);
  EXPECT_NEAR(static_cast<double>(id) / draws, 0.5, 0.05);
}

TEST(Mcmc, StaysRegular) {
  std::uint64_t acc = 0;
  auto M = sample_mcmc(RegularMatrix::circulant(40, test::offsets(5)), 20000, 4, &acc);
  EXPECT_NO_THROW(M.validate());
  EXPECT_GT(acc, 0u);
}

TEST(SampleAuto, Regular) {
  bool mcmc = false;
  auto M = sample_auto(300, 20, 2, &mcmc);
  EXPECT_NO_THROW(M.validate());
  EXPECT_EQ(M.d(), 20);
}

TEST(Multigraph, OneByOneAlwaysSimple) {
  auto D = single_part(1, 1);
  QMatrix Q{1, 1, 1, {1}};
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto A = sample_multigraph(D, Q, s);
    EXPECT_TRUE(A.is_simple);
    EXPECT_EQ(A.to_matrix(), RegularMatrix::identity(1));
  }
}

TEST(Multigraph, SingleColumnBlockIsDeterministic) {
  // Parts {0} and {1, 2}: row entries into the singleton part are 0 or d.
  KVector y{1, {{5, 0}, {0, 0}, {0, 0}}};
  auto D = decompose(y, 1);
  auto M = RegularMatrix::permutation({1, 0, 2});
  auto Q = project_Q(M, D);
  int singleton = -1;
  for (int q = 0; q < Q.m; ++q)
    if (D.parts[q].size == 1) singleton = q;
  ASSERT_GE(singleton, 0);
  const int col = D.part_indices(singleton)[0];
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto A = sample_multigraph(D, Q, s);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(A.multiplicity(i, col), Q(i, singleton));
  }
}

TEST(Multigraph, SimpleProbabilityMatchesCount) {
  // P(simple) = |M| (d!)^n prod_i Q_i! / (nd)! for the single part [n].
  const int n = 4, d = 2;
  auto D = single_part(n, d);
  QMatrix Q{n, 1, d, std::vector<int>(n, d)};
  const double exact = enumerate_all(n, d).size() * std::pow(2.0, 8) / 40320.0;
  int simple = 0;
  const int draws = 20000;
  for (int t = 0; t < draws; ++t) simple += sample_multigraph(D, Q, derive_seed(3, {static_cast<std::uint64_t>(t)})).is_simple;
  EXPECT_NEAR(static_cast<double>(simple) / draws, exact, 0.02);
}

TEST(Multigraph, RespectsQ) {
  KVector y{4, {{0, 0}, {4, 0}, {4, 0}, {9, 1}, {1, 1}, {0, 0}, {8, 8}, {4, 0}}};
  auto D = decompose(y, 2);
  auto M = sample_uniform(8, 2, 12);
  auto Q = project_Q(M, D);
  auto part = D.part_of();
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto A = sample_multigraph(D, Q, s);
    std::vector<int> colsum(8, 0);
    for (int i = 0; i < 8; ++i) {
      std::vector<int> per(Q.m, 0);
      for (int w = 0; w < 2; ++w) {
        const int j = A.rows[i * 2 + w];
        ++per[part[j]];
        ++colsum[j];
      }
      for (int q = 0; q < Q.m; ++q) EXPECT_EQ(per[q], Q(i, q));
    }
    for (int j = 0; j < 8; ++j) EXPECT_EQ(colsum[j], 2);
  }
}

TEST(Surrogate, ConstantOnOnePart) {
  auto D = single_part(5, 3);
  D.levels[0].value = {7, -2};
  D.k = 2;
  QMatrix Q{5, 1, 3, std::vector<int>(5, 3)};
  auto Z = sample_Z(D, Q, RowMask::all(5), 4);
  ASSERT_EQ(Z.Z.size(), 5u);
  for (auto v : Z.Z) EXPECT_NEAR(std::abs(v - 3.0 * cplx(3.5, -1)), 0.0, 1e-12);
  EXPECT_TRUE(Z.exact_count_flag);
}

TEST(Surrogate, HeightOneIsDeterministic) {
  KVector y{3, {{2, 0}, {2, 0}, {2, 0}, {2, 0}}};
  auto D = decompose(y, 2);
  ASSERT_EQ(D.parts.size(), 2u);
  for (const auto& P : D.parts) ASSERT_EQ(P.height(), 1);
  auto M = RegularMatrix::circulant(4, {0, 1});
  auto Q = project_Q(M, D);
  auto first = sample_Z(D, Q, RowMask::all(4), 1);
  for (std::uint64_t s = 2; s < 20; ++s) {
    auto Z = sample_Z(D, Q, RowMask::all(4), s);
    EXPECT_TRUE(Z.exact_count_flag);
    EXPECT_EQ(Z.Z, first.Z);
  }
}

TEST(Surrogate, SeededDeterminism) {
  KVector y{2, {{0, 0}, {0, 0}, {2, 0}, {4, 1}, {4, 1}, {4, 1}}};
  auto D = decompose(y, 1);
  auto Q = project_Q(RegularMatrix::identity(6), D);
  auto a = sample_Z(D, Q, RowMask::all(6), 42), b = sample_Z(D, Q, RowMask::all(6), 42);
  EXPECT_EQ(a.Z, b.Z);
  EXPECT_EQ(a.exact_count_flag, b.exact_count_flag);
}
