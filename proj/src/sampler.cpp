#include "rrd/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace rrd {

int MultiGraphAdj::multiplicity(int i, int j) const {
  auto b = rows.begin() + static_cast<std::ptrdiff_t>(i) * d;
  auto r = std::equal_range(b, b + d, j);
  return static_cast<int>(r.second - r.first);
}

RegularMatrix MultiGraphAdj::to_matrix() const {
  if (!is_simple) throw InputError("multigraph is not simple");
  return RegularMatrix(n, d, rows);
}

RegularMatrix sample_uniform(int n, int d, std::uint64_t seed, std::uint64_t max_attempts, RejectionStats* stats) {
  if (n < 1 || d < 1 || d > n) throw InputError("sample_uniform: need 1 <= d <= n");
  Philox rng(seed, label_hash("sample_uniform"));
  const std::size_t N = static_cast<std::size_t>(n) * d;
  std::vector<int> stubs(N), rows(N);
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    if (stats) stats->attempts = attempt;
    for (std::size_t t = 0; t < N; ++t) stubs[t] = static_cast<int>(t / d);
    bool ok = true;
    // Fisher-Yates drawn front to back; row i takes positions [i*d, (i+1)*d).
    for (int i = 0; i < n && ok; ++i) {
      for (int w = 0; w < d; ++w) {
        std::size_t t = static_cast<std::size_t>(i) * d + w;
        std::size_t s = t + rng.uniform_int(N - t);
        std::swap(stubs[t], stubs[s]);
        int c = stubs[t];
        for (int u = 0; u < w; ++u)
          if (rows[static_cast<std::size_t>(i) * d + u] == c) {
            ok = false;
            break;
          }
        if (!ok) break;
        rows[t] = c;
      }
    }
    if (ok) return RegularMatrix(n, d, rows);
  }
  throw RejectionBudgetExceeded("sample_uniform: rejection budget exhausted (d too dense for n; use sample_mcmc)");
}

RegularMatrix sample_mcmc(const RegularMatrix& start, std::uint64_t steps, std::uint64_t seed, std::uint64_t* accepted) {
  const int n = start.n(), d = start.d();
  std::vector<int> rows = start.row_data();
  const std::size_t E = static_cast<std::size_t>(n) * d;
  std::vector<int> erow(E), ecol(E);
  for (std::size_t e = 0; e < E; ++e) {
    erow[e] = static_cast<int>(e / d);
    ecol[e] = rows[e];
  }
  auto has = [&](int i, int j) {
    auto b = rows.begin() + static_cast<std::ptrdiff_t>(i) * d;
    return std::binary_search(b, b + d, j);
  };
  auto replace = [&](int i, int from, int to) {
    int* b = rows.data() + static_cast<std::size_t>(i) * d;
    int p = static_cast<int>(std::lower_bound(b, b + d, from) - b);
    while (p + 1 < d && b[p + 1] < to) {
      b[p] = b[p + 1];
      ++p;
    }
    while (p > 0 && b[p - 1] > to) {
      b[p] = b[p - 1];
      --p;
    }
    b[p] = to;
  };
  Philox rng(seed, label_hash("sample_mcmc"));
  std::uint64_t acc = 0;
  for (std::uint64_t s = 0; s < steps; ++s) {
    std::size_t e1 = rng.uniform_int(E), e2 = rng.uniform_int(E);
    int i = erow[e1], j = ecol[e1], i2 = erow[e2], j2 = ecol[e2];
    if (i == i2 || j == j2 || has(i, j2) || has(i2, j)) continue;
    replace(i, j, j2);
    replace(i2, j2, j);
    ecol[e1] = j2;
    ecol[e2] = j;
    ++acc;
  }
  if (accepted) *accepted = acc;
  return RegularMatrix(n, d, std::move(rows));
}

std::vector<RegularMatrix> enumerate_all(int n, int d) {
  if (n > 6) throw GuardError("enumerate_all: n must be at most 6");
  if (n < 1 || d < 0 || d > n) throw InputError("enumerate_all: need 0 <= d <= n");
  std::vector<std::vector<int>> subsets;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) != d) continue;
    std::vector<int> s;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1) s.push_back(j);
    subsets.push_back(s);
  }
  std::vector<RegularMatrix> out;
  std::vector<int> cap(n, d), chosen;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      std::vector<int> flat;
      for (int s : chosen) flat.insert(flat.end(), subsets[s].begin(), subsets[s].end());
      out.emplace_back(n, d, std::move(flat));
      return;
    }
    // Remaining capacity must be exactly fillable by the remaining rows.
    for (int s = 0; s < static_cast<int>(subsets.size()); ++s) {
      bool ok = true;
      for (int j : subsets[s])
        if (cap[j] == 0) ok = false;
      if (!ok) continue;
      for (int j : subsets[s]) --cap[j];
      bool feasible = true;
      for (int j = 0; j < n; ++j)
        if (cap[j] > n - i - 1) feasible = false;
      if (feasible) {
        chosen.push_back(s);
        rec(i + 1);
        chosen.pop_back();
      }
      for (int j : subsets[s]) ++cap[j];
    }
  };
  rec(0);
  return out;
}

MultiGraphAdj sample_multigraph(const EllDecomposition& D, const QMatrix& Q, std::uint64_t seed) {
  check_admissible(Q, D);
  Philox rng(seed, label_hash("sample_multigraph"));
  MultiGraphAdj A{Q.n, Q.d, std::vector<int>(static_cast<std::size_t>(Q.n) * Q.d), true};
  std::vector<int> fill(Q.n, 0);
  for (int q = 0; q < Q.m; ++q) {
    // Column half-edges of the part in lexicographic order, then a uniform permutation.
    IndexSet cols = D.part_indices(q);
    std::vector<int> targets;
    targets.reserve(cols.size() * Q.d);
    for (int j : cols)
      for (int w = 0; w < Q.d; ++w) targets.push_back(j);
    rng.shuffle(targets.begin(), targets.end());
    std::size_t t = 0;
    for (int i = 0; i < Q.n; ++i)
      for (int w = 0; w < Q(i, q); ++w) A.rows[static_cast<std::size_t>(i) * Q.d + fill[i]++] = targets[t++];
  }
  for (int i = 0; i < Q.n; ++i) {
    auto b = A.rows.begin() + static_cast<std::ptrdiff_t>(i) * Q.d;
    std::sort(b, b + Q.d);
    if (std::adjacent_find(b, b + Q.d) != b + Q.d) A.is_simple = false;
  }
  return A;
}

SurrogateDraw sample_Z(const EllDecomposition& D, const QMatrix& Q, const RowMask& K, std::uint64_t seed) {
  check_admissible(Q, D);
  if (K.n != Q.n) throw InputError("sample_Z: row mask dimension mismatch");
  Philox rng(seed, label_hash("sample_Z"));
  CVec Zfull(Q.n, 0.0);
  bool exact = true;
  const double k = static_cast<double>(D.k);
  for (int q = 0; q < Q.m; ++q) {
    const auto& P = D.parts[q];
    std::vector<std::int64_t> cum;
    std::int64_t acc = 0;
    for (int id : P.levels) {
      acc += D.levels[id].size;
      cum.push_back(acc);
    }
    std::vector<std::int64_t> hits(P.levels.size(), 0);
    for (int i = 0; i < Q.n; ++i) {
      for (int w = 0; w < Q(i, q); ++w) {
        auto u = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(acc)));
        auto p = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        ++hits[p];
        const auto& v = D.levels[P.levels[p]].value;
        Zfull[i] += cplx(static_cast<double>(v.re) / k, static_cast<double>(v.im) / k);
      }
    }
    for (std::size_t p = 0; p < hits.size(); ++p)
      if (hits[p] != static_cast<std::int64_t>(Q.d) * D.levels[P.levels[p]].size) exact = false;
  }
  SurrogateDraw out;
  out.exact_count_flag = exact;
  for (int i = 0; i < Q.n; ++i)
    if (K.in_K[i]) out.Z.push_back(Zfull[i]);
  return out;
}

RegularMatrix sample_auto(int n, int d, std::uint64_t seed, bool* used_mcmc) {
  // Probability that the pairing is simple is roughly exp(-(d-1)^2/2).
  double log_p = -0.5 * (d - 1.0) * (d - 1.0);
  if (log_p > std::log(1e-4)) {
    try {
      if (used_mcmc) *used_mcmc = false;
      return sample_uniform(n, d, seed, 200000);
    } catch (const RejectionBudgetExceeded&) {
    }
  }
  if (used_mcmc) *used_mcmc = true;
  std::vector<int> offsets(d);
  std::iota(offsets.begin(), offsets.end(), 0);
  return sample_mcmc(RegularMatrix::circulant(n, offsets), default_burn_in(n, d), seed);
}

}  // namespace rrd
