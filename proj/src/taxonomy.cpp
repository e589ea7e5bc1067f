#include "rrd/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace rrd {

std::int64_t TaxonomyParams::pow_p(int i) const {
  std::int64_t v = 1;
  for (int t = 0; t < i; ++t) {
    if (v > (std::int64_t{1} << 62) / p) return std::int64_t{1} << 62;
    v *= p;
  }
  return v;
}

TaxonomyParams derive_params(std::int64_t n, int d, std::int64_t L, const TaxonomyOverrides& ov) {
  if (d < 3) throw InvalidWindow("derive_params: d must be at least 3");
  if (n < 1) throw InvalidWindow("derive_params: n must be positive");
  if (L < 1) throw InvalidWindow("derive_params: L must be at least 1");
  const long double dd = d, nn = static_cast<long double>(n);
  if (ov.strict) {
    if (nn < dd * dd * dd) throw InvalidWindow("derive_params: n < d^3");
    if (static_cast<long double>(L) > nn / (dd * dd * dd)) throw InvalidWindow("derive_params: L > n/d^3");
  } else if (static_cast<long double>(L) > std::max<long double>(1, nn / (dd * dd * dd))) {
    throw InvalidWindow("derive_params: L out of range");
  }
  TaxonomyParams P;
  P.n = n;
  P.d = d;
  P.L = L;
  P.strict = ov.strict;
  P.a3 = ov.a3.value_or(1.0 / 1200.0);
  P.eps0 = std::sqrt(std::log(static_cast<double>(d)) / d);
  P.p = ov.p ? *ov.p : static_cast<std::int64_t>(std::floor(ov.p_scale / P.eps0));
  if (P.p < 2) throw InvalidWindow("derive_params: p < 2 (p = " + std::to_string(P.p) + ")");
  P.n0 = n / (16 * static_cast<std::int64_t>(d));
  {
    // Fractional powers are rounded, so the integer conditions settle ties.
    using i128 = __int128;
    const i128 N = n, D = d;
    std::int64_t q1 = static_cast<std::int64_t>(std::ceil(nn / std::pow(dd, 1.5L)));
    while (q1 > 0 && i128(q1 - 1) * (q1 - 1) * D * D * D >= N * N) --q1;
    while (i128(q1) * q1 * D * D * D < N * N) ++q1;
    P.n1 = q1;
    std::int64_t q2 = static_cast<std::int64_t>(std::floor(nn / std::pow(dd, 2.0L / 3.0L)));
    while (q2 > 0 && i128(q2) * q2 * q2 * D * D > N * N * N) --q2;
    while (i128(q2 + 1) * (q2 + 1) * (q2 + 1) * D * D <= N * N * N) ++q2;
    P.n2 = q2;
  }
  P.n3 = static_cast<std::int64_t>(std::floor(static_cast<long double>(P.a3) * nn));
  if (P.n3 < 1) throw InvalidWindow("derive_params: n3 = floor(a3 n) is zero");
  P.theta0 = ov.theta0.value_or(10.0 / (static_cast<double>(d) * d * d));
  P.t0_jump = ov.t0_jump_factor * d;
  P.t12_jump = std::pow(static_cast<double>(d), ov.t12_jump_exponent);
  P.very_steep_factor = ov.very_steep_factor;
  P.shift_factor = ov.shift_factor;
  // r: largest with p^r < n1.
  if (P.n1 < 2) throw InvalidWindow("derive_params: n1 < 2, no admissible r");
  P.r = 0;
  while (P.pow_p(P.r + 1) < P.n1) ++P.r;
  // r0: smallest with p^{r0} >= 20 L / d.
  P.r0 = 0;
  while (static_cast<long double>(P.pow_p(P.r0)) * d < 20.0L * L) ++P.r0;
  if (P.r0 >= P.r) throw InvalidWindow("derive_params: r0 >= r");
  P.ordered = P.n0 < P.n1 && P.n1 < P.n2 && P.n2 < P.n3 && P.n3 < P.n;
  return P;
}

Rearrangement rearrangement(const CVec& x) {
  Rearrangement R;
  const int n = static_cast<int>(x.size());
  R.perm.resize(n);
  std::iota(R.perm.begin(), R.perm.end(), 0);
  std::stable_sort(R.perm.begin(), R.perm.end(), [&](int a, int b) {
    if (x[a].real() != x[b].real()) return x[a].real() > x[b].real();
    return x[a].imag() > x[b].imag();
  });
  for (int i : R.perm) R.xsharp.push_back(x[i]);
  R.xstar.resize(n);
  for (int i = 0; i < n; ++i) R.xstar[i] = std::abs(x[i]);
  std::sort(R.xstar.begin(), R.xstar.end(), std::greater<>());
  return R;
}

namespace {

// sqrt(norm) is much cheaper than hypot; fall back when the square overflows.
double magnitude(cplx z) {
  const double m = std::sqrt(abs2(z));
  return std::isfinite(m) && m > 0 && m < 1e150 ? m : std::abs(z);
}

std::vector<double> magnitudes(const CVec& x) {
  std::vector<double> mags(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mags[i] = magnitude(x[i]);
  return mags;
}

}  // namespace

std::vector<double> order_statistics(const CVec& x, const std::vector<std::int64_t>& ranks) {
  const auto n = static_cast<std::int64_t>(x.size());
  auto mags = magnitudes(x);
  std::vector<std::int64_t> sorted = ranks;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::map<std::int64_t, double> val;
  std::int64_t hi = n;
  for (auto r : sorted) {
    if (r < 1 || r > n) throw InputError("order_statistics: rank out of range");
    std::nth_element(mags.begin(), mags.begin() + (r - 1), mags.begin() + hi, std::greater<>());
    val[r] = mags[r - 1];
    hi = r;
  }
  std::vector<double> out;
  out.reserve(ranks.size());
  for (auto r : ranks) out.push_back(val[r]);
  return out;
}

std::string to_string(SteepClass c) {
  switch (c) {
    case SteepClass::None: return "none";
    case SteepClass::T3: return "T3";
    case SteepClass::T0: return "T0";
    case SteepClass::T1: return "T1";
    case SteepClass::T2: return "T2";
  }
  return "?";
}

namespace {

// Top-k magnitudes in non-increasing order.
std::vector<double> top_magnitudes(const CVec& x, std::int64_t k) {
  auto mags = magnitudes(x);
  k = std::min<std::int64_t>(k, static_cast<std::int64_t>(mags.size()));
  std::partial_sort(mags.begin(), mags.begin() + k, mags.end(), std::greater<>());
  mags.resize(k);
  return mags;
}

double cube(double v) { return v * v * v; }

}  // namespace

SteepClass steep_class(const CVec& x, const TaxonomyParams& P, int* t0_index) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (n != P.n) throw InputError("classify: vector length differs from n");
  const std::int64_t pr0 = P.pow_p(P.r0);
  const std::int64_t n1p = (P.n1 + P.p - 1) / P.p;
  std::vector<std::int64_t> ranks;
  for (int i = P.r0; i <= P.r; ++i) ranks.push_back(P.pow_p(i));
  for (auto r : {n1p, P.n1, P.n2, P.n3}) ranks.push_back(r);
  for (auto& r : ranks)
    if (r > n) throw InputError("classify: parameter index exceeds n");
  auto stats = order_statistics(x, ranks);
  std::map<std::int64_t, double> xs;
  for (std::size_t t = 0; t < ranks.size(); ++t) xs[ranks[t]] = stats[t];
  auto top = top_magnitudes(x, pr0);
  const double nd = static_cast<double>(n);
  for (std::int64_t i = 1; i <= pr0; ++i)
    if (top[i - 1] > cube(nd / i) * top[pr0 - 1]) return SteepClass::T3;
  for (int i = P.r0; i <= P.r - 1; ++i)
    if (xs[P.pow_p(i)] > P.t0_jump * xs[P.pow_p(i + 1)]) {
      if (t0_index) *t0_index = i;
      return SteepClass::T0;
    }
  if (xs[n1p] > P.t0_jump * xs[P.n1]) {
    if (t0_index) *t0_index = P.r;
    return SteepClass::T0;
  }
  if (xs[P.n1] > P.t12_jump * xs[P.n2]) return SteepClass::T1;
  if (xs[P.n2] > P.t12_jump * xs[P.n3]) return SteepClass::T2;
  return SteepClass::None;
}

TaxVerdict classify(const CVec& x, const TaxonomyParams& P) {
  bool nonzero = std::any_of(x.begin(), x.end(), [](cplx v) { return v != 0.0; });
  if (!nonzero) throw InputError("classify: zero vector");
  TaxVerdict V;
  V.steep = steep_class(x, P, &V.t0_index);
  V.xn3 = order_statistics(x, {P.n3})[0];
  V.degenerate = V.xn3 == 0.0;
  V.normalized = std::abs(V.xn3 - 1.0) <= 1e-12;
  auto w = almost_constant_witness(x, P.theta0, P);
  V.almost_constant = w.has_value();
  if (w) V.lambda0 = w->lambda0;
  V.gradual = V.steep == SteepClass::None && !V.almost_constant;
  return V;
}

double weak13_norm(const CVec& x, std::int64_t m) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (m < 1 || m > n) throw InputError("weak13_norm: need 1 <= m <= n");
  auto top = top_magnitudes(x, m);
  double best = 0;
  for (std::int64_t i = 1; i <= m; ++i) best = std::max(best, cube(static_cast<double>(i)) * top[i - 1]);
  return best / cube(static_cast<double>(n));
}

namespace {

std::int64_t count_within(const CVec& pts, cplx c, double R) {
  const double R2 = R * R;
  std::int64_t cnt = 0;
  for (const auto& v : pts) cnt += abs2(v - c) <= R2;
  return cnt;
}

std::optional<cplx> exact_majority(const CVec& x, std::int64_t need) {
  std::vector<std::pair<double, double>> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = {x[i].real(), x[i].imag()};
  std::sort(v.begin(), v.end());
  for (std::size_t a = 0; a < v.size();) {
    std::size_t b = a;
    while (b < v.size() && v[b] == v[a]) ++b;
    if (static_cast<std::int64_t>(b - a) >= need) return cplx(v[a].first, v[a].second);
    a = b;
  }
  return std::nullopt;
}

}  // namespace

std::optional<AlmostConstantWitness> almost_constant_witness(const CVec& x, double theta, const TaxonomyParams& P) {
  if (!(theta > 0)) throw InputError("almost_constant_witness: theta must be positive");
  const auto n = static_cast<std::int64_t>(x.size());
  if (n != P.n) throw InputError("almost_constant_witness: vector length differs from n");
  const double xn3 = order_statistics(x, {P.n3})[0];
  const double R = theta * xn3;
  const std::int64_t need = n - P.n3 + 1;
  std::optional<cplx> found;
  if (R == 0.0) {
    found = exact_majority(x, need);
  } else if (2 * P.n3 < n) {
    // Any witness lies within R (per coordinate) of the coordinate-wise median.
    std::vector<double> re(n), im(n);
    for (std::int64_t i = 0; i < n; ++i) {
      re[i] = x[i].real();
      im[i] = x[i].imag();
    }
    std::nth_element(re.begin(), re.begin() + n / 2, re.end());
    std::nth_element(im.begin(), im.begin() + n / 2, im.end());
    const cplx med(re[n / 2], im[n / 2]);
    CVec near;
    for (const auto& v : x)
      if (std::abs(v.real() - med.real()) <= 2 * R && std::abs(v.imag() - med.imag()) <= 2 * R) near.push_back(v);
    if (static_cast<std::int64_t>(near.size()) >= need) {
      auto scan = [&](cplx centre, double half, int steps) {
        std::int64_t best = count_within(near, centre, R);
        cplx arg = centre;
        const double h = half / steps;
        for (int a = -steps; a <= steps && best < need; ++a)
          for (int b = -steps; b <= steps && best < need; ++b) {
            cplx g = centre + cplx(a * h, b * h);
            auto c = count_within(near, g, R);
            if (c > best) {
              best = c;
              arg = g;
            }
          }
        return std::make_pair(best, arg);
      };
      auto [best, arg] = scan(med, R, 8);
      if (best < need) std::tie(best, arg) = scan(arg, R / 8, 8);
      if (best >= need) found = arg;
    }
  } else {
    // Few coordinates need to agree: fall back to data-point centres.
    for (std::int64_t i = 0; i < n && !found; ++i)
      if (count_within(x, x[i], R) >= need) found = x[i];
  }
  if (!found) return std::nullopt;
  AlmostConstantWitness W;
  W.lambda0 = *found;
  const double R2 = R * R;
  for (std::int64_t i = 0; i < n; ++i)
    if (abs2(x[i] - W.lambda0) <= R2) W.J1.push_back(static_cast<int>(i));
  const double mod = std::abs(W.lambda0);
  const double slack = 1e-12 * std::max(1.0, xn3);
  W.rhon3_ok = (1 - theta) * xn3 - slack <= mod && mod <= (1 + theta) * xn3 + slack;
  return W;
}

std::optional<SplitResult> split_shifted(const CVec& x, double t, const TaxonomyParams& P) {
  if (t < 12 || P.a3 * t > 0.01 + 1e-15) throw InputError("split_shifted: need t >= 12 and a3 t <= 1/100");
  if (P.n0 < 1) throw InputError("split_shifted: n0 = 0");
  auto st = order_statistics(x, {P.n0, P.n3});
  if (st[1] == 0.0) throw InputError("split_shifted: x*_{n3} = 0");
  auto W = almost_constant_witness(x, P.theta0, P);
  if (!W) throw InputError("split_shifted: x is not almost constant");
  if (st[0] <= t * st[1]) return std::nullopt;
  SplitResult S;
  S.c = W->lambda0;
  S.w.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) S.w[i] = x[i] - S.c;
  S.w_class = steep_class(S.w, P);
  S.steep_ok = S.w_class != SteepClass::None;
  S.shift_ok = std::abs(S.c) <= order_statistics(S.w, {P.n1})[0] / P.shift_factor;
  return S;
}

std::vector<DecayViolation> decay_check(const CVec& x, const TaxonomyParams& P) {
  auto xs = magnitudes(x);
  std::sort(xs.begin(), xs.end(), std::greater<>());
  const double n = static_cast<double>(P.n);
  const std::int64_t pr0 = P.pow_p(P.r0);
  const double xn3 = xs[P.n3 - 1];
  const double tol = 1 + 1e-12;
  std::vector<DecayViolation> out;
  for (std::int64_t m = 1; m <= std::min<std::int64_t>(pr0, P.n); ++m) {
    double rhs = std::pow(n / m, 6) * xn3;
    if (xs[m - 1] > rhs * tol) out.push_back({1, m, xs[m - 1], rhs});
  }
  for (std::int64_t m = pr0; m <= std::min<std::int64_t>(P.n1, P.n); ++m) {
    double rhs = P.d * cube(n / m) * xn3;
    if (xs[m - 1] > rhs * tol) out.push_back({2, m, xs[m - 1], rhs});
  }
  double rhs = cube(static_cast<double>(P.d)) * xn3;
  if (xs[P.n1 - 1] > rhs * tol) out.push_back({3, P.n1, xs[P.n1 - 1], rhs});
  return out;
}

NormBoundCheck norm_bound_check(const CVec& x, const TaxonomyParams& P) {
  NormBoundCheck C;
  int t0 = -1;
  auto cls = steep_class(x, P, &t0);
  if (cls == SteepClass::T3) return C;
  C.applicable = true;
  C.m = cls == SteepClass::T0 ? (t0 == P.r ? P.pow_p(P.r) : P.pow_p(t0)) : P.n1;
  double norm2 = 0;
  for (const auto& v : x) norm2 += abs2(v);
  C.norm = std::sqrt(norm2);
  const double n = static_cast<double>(P.n);
  const double L = static_cast<double>(P.L);
  C.bound = std::pow(n, 6) / (100.0 * cube(L) * std::pow(static_cast<double>(P.d), 1.5)) * order_statistics(x, {C.m})[0];
  C.holds = C.norm <= C.bound * (1 + 1e-12);
  return C;
}

BallCount max_ball_count(const CVec& x, double t) {
  BallCount B;
  const auto n = static_cast<std::int64_t>(x.size());
  if (n == 0) return B;
  if (!(t > 0)) {
    std::vector<std::pair<double, double>> v(n);
    for (std::int64_t i = 0; i < n; ++i) v[i] = {x[i].real(), x[i].imag()};
    std::sort(v.begin(), v.end());
    std::int64_t best = 0;
    for (std::size_t a = 0; a < v.size();) {
      std::size_t b = a;
      while (b < v.size() && v[b] == v[a]) ++b;
      best = std::max<std::int64_t>(best, b - a);
      a = b;
    }
    B.lower = B.upper = best;
    B.centre = 0;
    return B;
  }
  const double s = 2 * t;
  struct Cell {
    std::int64_t cx, cy;
    int idx;
  };
  std::vector<Cell> cells(n);
  for (std::int64_t i = 0; i < n; ++i)
    cells[i] = {static_cast<std::int64_t>(std::floor(x[i].real() / s)), static_cast<std::int64_t>(std::floor(x[i].imag() / s)),
                static_cast<int>(i)};
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.cx != b.cx ? a.cx < b.cx : (a.cy != b.cy ? a.cy < b.cy : a.idx < b.idx);
  });
  auto key_less = [](const Cell& a, std::pair<std::int64_t, std::int64_t> k) {
    return a.cx != k.first ? a.cx < k.first : a.cy < k.second;
  };
  const double t2 = t * t, s2 = s * s;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto cx = static_cast<std::int64_t>(std::floor(x[i].real() / s));
    const auto cy = static_cast<std::int64_t>(std::floor(x[i].imag() / s));
    std::int64_t lo = 0, hi = 0;
    for (std::int64_t ax = cx - 1; ax <= cx + 1; ++ax) {
      auto b = std::lower_bound(cells.begin(), cells.end(), std::make_pair(ax, cy - 1), key_less);
      auto e = std::lower_bound(b, cells.end(), std::make_pair(ax, cy + 2), key_less);
      for (auto it = b; it != e; ++it) {
        double dd = abs2(x[it->idx] - x[i]);
        lo += dd <= t2;
        hi += dd <= s2;
      }
    }
    if (lo > B.lower) {
      B.lower = lo;
      B.centre = static_cast<int>(i);
    }
    B.upper = std::max(B.upper, hi);
  }
  return B;
}

DichotomyVerdict many_levels_verdict(const CVec& x, double rho, double delta, std::int64_t q, const TaxonomyParams& P) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (!(rho > 0) || !(delta > 0)) throw InputError("many_levels_verdict: rho and delta must be positive");
  if (q < 1 || q > n) throw InputError("many_levels_verdict: need 1 <= q <= n");
  DichotomyVerdict V;
  V.q = q;
  V.cn = static_cast<std::int64_t>(std::floor(P.a3 * static_cast<double>(n)));
  if (V.cn < 1) throw InputError("many_levels_verdict: floor(c' n) = 0");
  auto xs = rearrangement(x).xstar;
  const double nd = static_cast<double>(n);
  const double d3 = cube(static_cast<double>(P.d));
  const double tol = 1 + 1e-12;
  const double xq = xs[q - 1], xcn = xs[V.cn - 1];
  V.decay_to_q = true;
  V.very_steep = false;
  for (std::int64_t i = 1; i <= q; ++i) {
    if (xs[i - 1] > cube(nd / i) * xq * tol) V.decay_to_q = false;
    if (xs[i - 1] > P.very_steep_factor * cube(nd / i) * xq) V.very_steep = true;
  }
  V.decay_to_cn = true;
  for (std::int64_t i = q; i <= V.cn; ++i)
    if (xs[i - 1] > d3 * std::pow(nd / i, 6) * xcn * tol) V.decay_to_cn = false;
  V.radius = rho * xcn;
  V.ball = max_ball_count(x, V.radius);
  const double cap = delta * nd;
  V.ball_ok = static_cast<double>(V.ball.upper) <= cap;
  V.ball_undecided = static_cast<double>(V.ball.lower) <= cap && !V.ball_ok;
  V.gradual_many_levels = V.decay_to_q && V.decay_to_cn && V.ball_ok;
  V.neither = !V.gradual_many_levels && !V.very_steep;

  const std::int64_t pr0 = std::min<std::int64_t>(P.pow_p(P.r0), n);
  const double xpr0 = xs[pr0 - 1];
  const double xn3 = xs[std::min<std::int64_t>(P.n3, n) - 1];
  V.variant_decay = true;
  for (std::int64_t i = 1; i <= pr0; ++i) {
    if (xs[i - 1] > cube(nd / i) * xpr0 * tol) V.variant_decay = false;
    if (xs[i - 1] > P.very_steep_factor * cube(nd / i) * xpr0) V.variant_very_steep = true;
  }
  for (std::int64_t i = pr0; i <= std::min<std::int64_t>(P.n1, n); ++i)
    if (xs[i - 1] > P.d * cube(nd / i) * xn3 * tol) V.variant_decay = false;
  for (std::int64_t i = P.n1; i <= std::min<std::int64_t>(P.n3, n); ++i)
    if (xs[i - 1] > d3 * xn3 * tol) V.variant_decay = false;
  return V;
}

}  // namespace rrd
