#include "rrd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rrd/rng.hpp"

namespace rrd {

namespace {

int bit_length(__int128 v) {
  int b = 0;
  while (v > 0) {
    v >>= 1;
    ++b;
  }
  return b;
}

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

int floor_log2_ratio(__int128 a, __int128 b) {
  if (a <= 0 || b <= 0) throw InputError("floor_log2_ratio: arguments must be positive");
  int e = bit_length(a) - bit_length(b);
  auto at_least = [&](int s) { return s >= 0 ? a >= (b << s) : (a << -s) >= b; };
  if (!at_least(e)) --e;
  return e;
}

double EstimatorBundle::sum_log_SB() const { return std::accumulate(log_SB.begin(), log_SB.end(), 0.0); }
double EstimatorBundle::sum_log_TE() const { return std::accumulate(log_TE.begin(), log_TE.end(), 0.0); }

double EstimatorBundle::wset_balance() const {
  double s = 0;
  for (const auto& W : wsets) s += static_cast<double>(std::min(W.below, W.above));
  return s;
}

TruncatedWeights truncated_weights(const EllDecomposition& D) {
  const int n = D.n, d = D.d;
  const auto m = D.parts.size();
  const __int128 n128 = n;
  TruncatedWeights T;
  T.value.resize(m);
  T.b.resize(m);
  T.large.resize(m);
  for (std::size_t q = 0; q < m; ++q) {
    const auto& P = D.parts[q];
    const __int128 h = P.height(), sz = P.size;
    const bool large = sz * sz * sz * d >= n128 * n128 * n128;
    T.large[q] = large;
    const bool spread = P.kind == PartKind::Spread;
    const double hd = static_cast<double>(P.height());
    if (!spread && large) {
      T.value[q] = hd * P.size / n;
      T.b[q] = floor_log2_ratio(h * sz, n);
    } else if (!spread) {
      T.value[q] = hd / d;
      T.b[q] = floor_log2_ratio(h, d);
    } else if (large) {
      T.value[q] = hd * std::sqrt(static_cast<double>(d) * P.size / n);
      T.b[q] = floor_div2(floor_log2_ratio(h * h * d * sz, n));
    } else {
      T.value[q] = hd;
      T.b[q] = floor_log2_ratio(h, 1);
    }
  }
  return T;
}

EstimatorBundle compute_bundle(const EllDecomposition& D, const QMatrix& Q) {
  check_admissible(Q, D);
  EstimatorBundle B;
  B.n = Q.n;
  B.m = Q.m;
  B.d = Q.d;
  const int n = B.n, m = B.m, d = B.d;
  if (D.d != d) throw InputError("compute_bundle: decomposition and Q disagree on d");
  auto T = truncated_weights(D);
  B.wtilde = std::move(T.value);
  B.wtilde_b = std::move(T.b);
  B.large = std::move(T.large);

  B.w.assign(static_cast<std::size_t>(n) * m, 0.0);
  B.SB.resize(n);
  B.log_SB.resize(n);
  B.log_TE.resize(n);
  B.b_of_row.resize(n);
  B.b_min = floor_log2_ratio(1, d);
  B.b_max = std::numeric_limits<int>::min();
  for (int i = 0; i < n; ++i) {
    double wmax = 0;
    double lte = 0;
    int bi = std::numeric_limits<int>::min();
    for (int q = 0; q < m; ++q) {
      const int c = Q(i, q);
      if (c == 0) continue;
      const auto& P = D.parts[q];
      const double w = P.kind == PartKind::Regular ? static_cast<double>(P.height()) * c / d
                                                   : P.height() * std::sqrt(static_cast<double>(c));
      B.w[static_cast<std::size_t>(i) * m + q] = w;
      wmax = std::max(wmax, w);
      lte -= static_cast<double>(c) / d * std::log(B.wtilde[q]);
      bi = std::max(bi, B.wtilde_b[q]);
    }
    B.SB[i] = wmax > 1 ? 1.0 / wmax : 1.0;
    B.log_SB[i] = std::log(B.SB[i]);
    B.log_TE[i] = lte;
    B.b_of_row[i] = bi;
    B.b_max = std::max(B.b_max, bi);
  }
  if (n == 0) B.b_max = B.b_min;

  const int nb = B.b_max - B.b_min + 1;
  B.wsets.resize(std::max(nb, 0));
  for (int t = 0; t < nb; ++t) B.wsets[t].b = B.b_min + t;
  for (int q = 0; q < m; ++q) {
    auto& W = B.wsets[B.wtilde_b[q] - B.b_min];
    W.parts.push_back(q);
    W.size += D.parts[q].size;
  }
  std::int64_t cum = 0;
  for (auto& W : B.wsets) {
    cum += W.size;
    W.below = cum;
    W.above = n - cum;
  }

  B.eta_i.assign(n, 0.0);
  std::vector<int> mass(std::max(nb, 0));
  for (int i = 0; i < n; ++i) {
    std::fill(mass.begin(), mass.end(), 0);
    for (int q = 0; q < m; ++q) mass[B.wtilde_b[q] - B.b_min] += Q(i, q);
    int below = 0;
    double s = 0;
    for (int t = 0; t < nb; ++t) {
      below += mass[t];
      s += std::min(below, d - below);
    }
    B.eta_i[i] = s / d;
    B.eta += B.eta_i[i];
  }
  return B;
}

namespace {

struct TwoSidedCounter {
  const QMatrix& Q;
  double c;
  std::vector<int> sJ;
  std::vector<std::int64_t> hist;
  std::vector<std::vector<std::pair<int, int>>> colnz;
  std::int64_t kappa = 0;

  TwoSidedCounter(const QMatrix& Q_, double c_) : Q(Q_), c(c_), sJ(Q_.n, 0), hist(Q_.d + 1, 0), colnz(Q_.m) {
    hist[0] = Q.n;
    for (int i = 0; i < Q.n; ++i)
      for (int q = 0; q < Q.m; ++q)
        if (Q(i, q)) colnz[q].emplace_back(i, Q(i, q));
  }

  void toggle(int q, bool add) {
    for (auto [i, v] : colnz[q]) {
      --hist[sJ[i]];
      sJ[i] += add ? v : -v;
      ++hist[sJ[i]];
      kappa += add ? v : -v;
    }
  }

  bool holds() const {
    const double dn = static_cast<double>(Q.d) * Q.n;
    const double k = static_cast<double>(kappa);
    // Rows with sJ >= c k / n and d - sJ >= c (dn - k) / n.
    const double lo = c * k / Q.n;
    const double hi = Q.d - c * (dn - k) / Q.n;
    std::int64_t cnt = 0;
    for (int s = 0; s <= Q.d; ++s)
      if (s >= lo && s <= hi) cnt += hist[s];
    return static_cast<double>(cnt) >= c * std::min({k, dn - k, static_cast<double>(Q.n)});
  }
};

}  // namespace

bool two_sided_holds(const QMatrix& Q, const std::vector<int>& J, double c) {
  TwoSidedCounter T(Q, c);
  for (int q : J) {
    if (q < 0 || q >= Q.m) throw InputError("two_sided_holds: column out of range");
    T.toggle(q, true);
  }
  return T.holds();
}

StandardCheck is_standard(const QMatrix& Q, const StandardOptions& opt) {
  if (!(opt.c_row > 0 && opt.c_row < 1 && opt.c_two_sided > 0 && opt.c_two_sided < 1))
    throw InputError("is_standard: constants must lie in (0,1)");
  StandardCheck R;
  const int n = Q.n, m = Q.m;
  const double nd = n;
  for (int q = 0; q < m && R.cond1; ++q) {
    const double cs = static_cast<double>(Q.column_sum(q));
    if (cs * cs < static_cast<double>(Q.d) * nd * nd) continue;
    std::int64_t low = 0;
    for (int i = 0; i < n; ++i) low += Q(i, q) < opt.c_row * cs / nd;
    if (static_cast<double>(low) * low * Q.d > nd * nd) {
      R.cond1 = false;
      R.failed_column = q;
    }
  }

  TwoSidedCounter T(Q, opt.c_two_sided);
  std::vector<char> in(m, 0);
  auto fail = [&]() {
    R.cond2 = false;
    for (int q = 0; q < m; ++q)
      if (in[q]) R.failed_J.push_back(q);
  };
  auto set_to = [&](const std::vector<char>& want) {
    for (int q = 0; q < m; ++q)
      if (in[q] != want[q]) {
        T.toggle(q, want[q]);
        in[q] = want[q];
      }
  };
  if (m <= opt.exhaustive_max_m) {
    R.exhaustive = true;
    // Gray-code walk; the heaviest columns sit on the slowest-toggling bits.
    std::vector<int> bitcol(m);
    std::iota(bitcol.begin(), bitcol.end(), 0);
    std::sort(bitcol.begin(), bitcol.end(), [&](int a, int b) { return T.colnz[a].size() < T.colnz[b].size(); });
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t s = 1; s < total; ++s) {
      const int bit = __builtin_ctzll(s);
      const int q = bitcol[bit];
      in[q] = !in[q];
      T.toggle(q, in[q]);
      ++R.subsets_tested;
      if (!T.holds()) {
        fail();
        break;
      }
    }
  } else {
    R.exhaustive = false;
    std::vector<int> order = opt.order;
    if (order.empty()) {
      order.resize(m);
      std::iota(order.begin(), order.end(), 0);
    }
    std::vector<std::vector<char>> subsets;
    for (int len = 1; len <= m; ++len) {
      std::vector<char> pre(m, 0), suf(m, 0);
      for (int t = 0; t < len; ++t) pre[order[t]] = 1;
      for (int t = m - len; t < m; ++t) suf[order[t]] = 1;
      subsets.push_back(pre);
      if (len < m) subsets.push_back(suf);
    }
    Philox g(opt.seed, label_hash("is_standard"));
    for (int r = 0; r < opt.random_subsets; ++r) {
      std::vector<char> s(m, 0);
      bool any = false;
      for (int q = 0; q < m; ++q) any |= (s[q] = static_cast<char>(g.next_u32() & 1));
      if (!any) s[g.uniform_int(m)] = 1;
      subsets.push_back(std::move(s));
    }
    for (const auto& s : subsets) {
      set_to(s);
      ++R.subsets_tested;
      if (!T.holds()) {
        fail();
        break;
      }
    }
  }
  R.holds = R.cond1 && R.cond2;
  return R;
}

std::vector<int> wtilde_order(const EstimatorBundle& B) {
  std::vector<int> order(B.m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (B.wtilde_b[a] != B.wtilde_b[b]) return B.wtilde_b[a] < B.wtilde_b[b];
    return B.wtilde[a] < B.wtilde[b];
  });
  return order;
}

OffsetCheck offset_bound_check(const EstimatorBundle& B, const QMatrix& Q, double c) {
  OffsetCheck C;
  C.eta = B.eta;
  C.rhs = c * c * B.wset_balance();
  std::vector<int> J;
  for (const auto& W : B.wsets) {
    J.insert(J.end(), W.parts.begin(), W.parts.end());
    if (W.b < B.b_max && !J.empty() && !two_sided_holds(Q, J, c)) C.premise = false;
  }
  C.holds = C.eta >= C.rhs * (1 - 1e-12);
  return C;
}

double measured_product_constant(const EstimatorBundle& B) {
  if (B.n == 0) return 1.0;
  const double lhs = B.sum_log_SB() + B.eta * std::log(2.0) - B.sum_log_TE();
  return std::max(1.0, std::exp(lhs / B.n));
}

double measured_majorization_constant(const EstimatorBundle& B, const EllDecomposition& D) {
  double C = 1.0;
  for (const auto& W : B.wsets) {
    if (W.size == 0) continue;
    std::vector<double> s;
    for (int q : W.parts) s.push_back(D.parts[q].size);
    std::sort(s.begin(), s.end(), std::greater<>());
    for (std::size_t t = 0; t < s.size(); ++t) {
      const double r = s[t] / static_cast<double>(W.size);
      auto f = [&](double x) { return x * std::exp(-static_cast<double>(t) / x); };
      if (f(C) >= r) continue;
      double lo = C, hi = std::max(2 * C, 2.0);
      while (f(hi) < r) hi *= 2;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= r ? hi : lo) = mid;
      }
      C = hi;
    }
  }
  return C;
}

LevyEstimate levy_estimate(const CVec& samples, double t) {
  if (samples.empty()) throw InputError("levy_estimate: no samples");
  if (!(t > 0)) throw InputError("levy_estimate: t must be positive");
  auto b = max_ball_count(samples, t);
  const double n = static_cast<double>(samples.size());
  return {static_cast<double>(b.lower) / n, static_cast<double>(b.upper) / n};
}

}  // namespace rrd
