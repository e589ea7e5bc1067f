#include "rrd/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rrd/estimators.hpp"

namespace rrd {

std::int64_t pow_int(std::int64_t base, int e) {
  std::int64_t v = 1;
  for (int t = 0; t < e; ++t) {
    if (v > (std::int64_t{1} << 53) / base) throw InputError("pow_int: result exceeds 2^53");
    v *= base;
  }
  return v;
}

void require_normalized_gradual(const CVec& x, const TaxonomyParams& P) {
  auto V = classify(x, P);
  if (!V.gradual) throw InputError("vector is not gradual");
  if (!V.normalized) throw InputError("vector is not normalised (x*_{n3} != 1)");
}

KuCheck ku_from_decomposition(const EllDecomposition& D, int u, double cK, const TaxonomyParams& P) {
  KuCheck K;
  K.u = u;
  K.threshold = cK * static_cast<double>(P.n3);
  for (int q = 0; q < static_cast<int>(D.parts.size()); ++q)
    if (D.parts[q].kind == PartKind::Spread) {
      K.spread_total += D.parts[q].size;
      K.parts.push_back(q);
    }
  K.member = static_cast<double>(K.spread_total) >= K.threshold;
  return K;
}

KuCheck in_Ku(const CVec& x, int u, double cK, const TaxonomyParams& P, bool check_S) {
  if (u < 0) throw InputError("in_Ku: u must be nonnegative");
  if (check_S) require_normalized_gradual(x, P);
  auto D = decompose(k_approx(x, pow_int(P.d, u)), P.d);
  return ku_from_decomposition(D, u, cK, P);
}

PvCheck pv_from_decomposition(const EllDecomposition& D, int v, double cP, const TaxonomyParams& P) {
  PvCheck C;
  C.v = v;
  C.height_threshold = cP * std::exp2(cP * (v - 4) * P.a3) * P.a3;
  C.threshold = cP * static_cast<double>(P.n3);
  for (int q = 0; q < static_cast<int>(D.parts.size()); ++q)
    if (D.parts[q].height() >= C.height_threshold) {
      C.total += D.parts[q].size;
      C.parts.push_back(q);
    }
  C.member = static_cast<double>(C.total) >= C.threshold;
  return C;
}

PvCheck in_Pv(const CVec& x, int v, double cP, const TaxonomyParams& P, bool check_S) {
  if (v < 5) throw InputError("in_Pv: v must be at least 5");
  if (check_S) require_normalized_gradual(x, P);
  auto D = decompose(k_approx(x, pow_int(P.d, v)), P.d);
  return pv_from_decomposition(D, v, cP, P);
}

PvRhoDelta in_Pv_rho_delta(const CVec& x, int v, double rho, double delta, double cP, const TaxonomyParams& P) {
  PvRhoDelta R;
  R.pv = in_Pv(x, v, cP, P);
  R.ball = max_ball_count(x, rho);
  R.member = R.pv.member && static_cast<double>(R.ball.lower) >= delta * static_cast<double>(x.size());
  return R;
}

WsetWitness heavy_wset(const CVec& x, int v, double delta, const TaxonomyParams& P) {
  if (!(delta > 0)) throw InputError("heavy_wset: delta must be positive");
  auto D = decompose(k_approx(x, pow_int(P.d, v)), P.d);
  auto T = truncated_weights(D);
  WsetWitness W;
  W.order_bound = std::log2(72.0 * std::sqrt(static_cast<double>(P.d)) / delta);
  W.size_bound = delta * static_cast<double>(D.n) / 36.0;
  std::vector<std::pair<int, std::int64_t>> sizes;
  for (std::size_t q = 0; q < T.b.size(); ++q) sizes.emplace_back(T.b[q], D.parts[q].size);
  std::sort(sizes.begin(), sizes.end());
  for (std::size_t a = 0; a < sizes.size();) {
    std::size_t e = a;
    std::int64_t total = 0;
    while (e < sizes.size() && sizes[e].first == sizes[a].first) total += sizes[e++].second;
    if (sizes[a].first <= W.order_bound && static_cast<double>(total) >= W.size_bound && total > W.size) {
      W.found = true;
      W.b = sizes[a].first;
      W.size = total;
    }
    a = e;
  }
  return W;
}

std::string CoverWitness::describe() const {
  std::ostringstream os;
  if (branch == Branch::Ku)
    os << "K_" << u;
  else
    os << "P_" << u;
  os << " total=" << total << " threshold=" << threshold << " parts=" << parts.size();
  return os.str();
}

CoverWitness cover_witness(const CVec& x, int v, const CoverConstants& C, const TaxonomyParams& P, bool check_S,
                           const EllDecomposition* at4) {
  if (v < 5) throw InputError("cover_witness: v must be at least 5");
  if (check_S) require_normalized_gradual(x, P);
  CoverWitness W;
  for (int u = 4; u <= v; ++u) {
    EllDecomposition own;
    if (u != 4 || !at4) own = decompose(k_approx(x, pow_int(P.d, u)), P.d);
    const EllDecomposition& D = u == 4 && at4 ? *at4 : own;
    auto K = ku_from_decomposition(D, u, C.cK, P);
    if (K.member) {
      W.branch = CoverWitness::Branch::Ku;
      W.u = u;
      W.parts = std::move(K.parts);
      W.total = K.spread_total;
      W.threshold = K.threshold;
      return W;
    }
    if (u == v) {
      auto Pv = pv_from_decomposition(D, v, C.cP, P);
      if (Pv.member) {
        W.branch = CoverWitness::Branch::Pv;
        W.u = v;
        W.parts = std::move(Pv.parts);
        W.total = Pv.total;
        W.threshold = Pv.threshold;
        return W;
      }
    }
  }
  throw CoverFailure("cover_witness: no K_u (4 <= u <= " + std::to_string(v) + ") or P_v certificate");
}

Separation separated_sets(const KVector& y, std::int64_t n3, double gap_needed, int directions) {
  const int n = y.n();
  const auto s = static_cast<std::int64_t>((n3 + 3) / 4);
  Separation best;
  if (s < 1 || 2 * s > n) return best;
  std::vector<double> angles{0.0, M_PI / 2};
  for (int t = 1; t < directions; ++t)
    if (2 * t != directions) angles.push_back(M_PI * t / directions);
  std::vector<std::pair<double, int>> pr(n);
  for (double a : angles) {
    const double c = std::cos(a), sn = std::sin(a);
    for (int i = 0; i < n; ++i) {
      const auto v = y.value(i);
      pr[i] = {v.real() * c + v.imag() * sn, i};
    }
    std::nth_element(pr.begin(), pr.begin() + (s - 1), pr.end());
    const double lo = pr[s - 1].first;
    std::nth_element(pr.begin() + s, pr.begin() + (n - s), pr.end());
    const double hi = pr[n - s].first;
    const double gap = hi - lo;
    if (!best.found && (best.I.empty() || gap > best.gap)) {
      best.gap = gap;
      best.angle = a;
      best.I.clear();
      best.J.clear();
      for (std::int64_t t = 0; t < s; ++t) best.I.push_back(pr[t].second);
      for (std::int64_t t = n - s; t < n; ++t) best.J.push_back(pr[t].second);
      std::sort(best.I.begin(), best.I.end());
      std::sort(best.J.begin(), best.J.end());
      best.found = gap >= gap_needed;
    }
    if (best.found) break;
  }
  return best;
}

TallOrSpread tall_or_spread(const EllDecomposition& D, std::int64_t n3) {
  TallOrSpread T;
  for (const auto& s : class_stats(D)) {
    if (s.hs + s.hr >= 10) T.tall_total += s.cs + s.cr;
    T.spread_total += s.cs;
  }
  T.tall = 8 * T.tall_total >= n3;
  T.spread = 120 * T.spread_total >= n3;
  return T;
}

RefinementDichotomy refinement_dichotomy(const CVec& x, int u, double cK, const TaxonomyParams& P) {
  RefinementDichotomy R;
  auto yu = k_approx(x, pow_int(P.d, u));
  auto yu1 = k_approx(x, pow_int(P.d, u + 1));
  auto cu = equal_value_counts(yu);
  auto cu1 = equal_value_counts(yu1);
  for (std::size_t i = 0; i < cu.size(); ++i) R.count += 2 * cu1[i] <= cu[i];
  R.count_ok = 192 * R.count >= P.n3;
  R.in_Ku = ku_from_decomposition(decompose(yu, P.d), u, cK, P).member;
  R.in_Ku1 = ku_from_decomposition(decompose(yu1, P.d), u + 1, cK, P).member;
  return R;
}

}  // namespace rrd
