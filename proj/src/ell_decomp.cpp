#include "rrd/ell_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace rrd {

std::int64_t floor_scaled(double x, std::int64_t k) {
  const double kd = static_cast<double>(k);
  double p = kd * x;
  double f = std::floor(p);
  if (f == p) {
    // p is an integer; the exact product may sit just below it.
    double err = std::fma(kd, x, -p);
    if (err < 0) f -= 1.0;
  }
  return static_cast<std::int64_t>(f);
}

KVector k_approx(const CVec& x, std::int64_t k) {
  if (k < 1) throw InputError("k_approx: k must be positive");
  KVector y;
  y.k = k;
  y.coords.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag())) throw InputError("k_approx: non-finite coordinate");
    y.coords[i] = {floor_scaled(x[i].real(), k), floor_scaled(x[i].imag(), k)};
  }
  return y;
}

std::vector<std::int64_t> level_schedule(std::int64_t c) {
  std::vector<std::int64_t> sizes;
  std::int64_t rem = c;
  for (int j = 0; rem > 0; ++j) {
    std::int64_t lo = std::int64_t{1} << j;
    if (rem < 2 * lo) {
      sizes.push_back(rem);
      break;
    }
    sizes.push_back(lo);
    rem -= lo;
  }
  return sizes;
}

namespace {

using i128 = __int128;

struct Grouping {
  std::vector<int> members;
  std::vector<int> begin;  // size G + 1
  std::vector<LatticePoint> value;
};

void radix_sort(std::vector<std::uint64_t>& keys, std::vector<int>& idx, int bits) {
  int digit = keys.size() < 65536 ? 8 : 11;
  if (keys.size() >= 65536 && bits > 22 && bits <= 32) digit = 16;
  const std::size_t buckets = std::size_t{1} << digit;
  std::vector<std::uint64_t> k2(keys.size());
  std::vector<int> i2(idx.size());
  std::vector<std::size_t> count(buckets);
  for (int shift = 0; shift < bits; shift += digit) {
    std::fill(count.begin(), count.end(), 0);
    for (auto k : keys) ++count[(k >> shift) & (buckets - 1)];
    std::size_t sum = 0;
    for (auto& c : count) {
      auto t = c;
      c = sum;
      sum += t;
    }
    for (std::size_t t = 0; t < keys.size(); ++t) {
      auto pos = count[(keys[t] >> shift) & (buckets - 1)]++;
      k2[pos] = keys[t];
      i2[pos] = idx[t];
    }
    keys.swap(k2);
    idx.swap(i2);
  }
}

Grouping group_values(const KVector& y) {
  const int n = y.n();
  Grouping g;
  g.members.resize(n);
  std::iota(g.members.begin(), g.members.end(), 0);
  if (n == 0) {
    g.begin.push_back(0);
    return g;
  }
  std::int64_t rmin = y.coords[0].re, rmax = rmin, imin = y.coords[0].im, imax = imin;
  for (const auto& p : y.coords) {
    rmin = std::min(rmin, p.re);
    rmax = std::max(rmax, p.re);
    imin = std::min(imin, p.im);
    imax = std::max(imax, p.im);
  }
  const unsigned __int128 rr = static_cast<unsigned __int128>(static_cast<i128>(rmax) - rmin) + 1;
  const unsigned __int128 ir = static_cast<unsigned __int128>(static_cast<i128>(imax) - imin) + 1;
  const unsigned __int128 span = rr * ir;
  if (n >= 64 && span <= std::numeric_limits<std::uint64_t>::max()) {
    std::vector<std::uint64_t> keys(n);
    const auto iw = static_cast<std::uint64_t>(ir);
    for (int i = 0; i < n; ++i)
      keys[i] = static_cast<std::uint64_t>(y.coords[i].re - rmin) * iw + static_cast<std::uint64_t>(y.coords[i].im - imin);
    std::uint64_t maxkey = static_cast<std::uint64_t>(span - 1);
    int bits = 0;
    while (bits < 64 && (maxkey >> bits) != 0) ++bits;
    radix_sort(keys, g.members, bits);
    for (int t = 0; t < n; ++t)
      if (t == 0 || keys[t] != keys[t - 1]) {
        g.begin.push_back(t);
        g.value.push_back({static_cast<std::int64_t>(keys[t] / iw) + rmin, static_cast<std::int64_t>(keys[t] % iw) + imin});
      }
  } else {
    std::stable_sort(g.members.begin(), g.members.end(), [&](int a, int b) { return y.coords[a] < y.coords[b]; });
    for (int t = 0; t < n; ++t)
      if (t == 0 || y.coords[g.members[t]] != y.coords[g.members[t - 1]]) {
        g.begin.push_back(t);
        g.value.push_back(y.coords[g.members[t]]);
      }
  }
  g.begin.push_back(n);
  return g;
}

i128 dist2(const LatticePoint& a, const LatticePoint& b) {
  i128 dr = static_cast<i128>(a.re) - b.re;
  i128 di = static_cast<i128>(a.im) - b.im;
  return dr * dr + di * di;
}

i128 cross(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
  return (static_cast<i128>(a.re) - o.re) * (static_cast<i128>(b.im) - o.im) -
         (static_cast<i128>(a.im) - o.im) * (static_cast<i128>(b.re) - o.re);
}

// Coordinates below 2^30 in magnitude keep every cross product in 64 bits.
bool fits_small(const std::vector<LatticePoint>& pts) {
  constexpr std::int64_t lim = std::int64_t{1} << 30;
  for (const auto& p : pts)
    if (p.re <= -lim || p.re >= lim || p.im <= -lim || p.im >= lim) return false;
  return true;
}

std::int64_t cross_small(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
  return (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
}

// Convex hull of lexicographically increasing distinct points (monotone chain).
std::vector<LatticePoint> hull_of(const std::vector<LatticePoint>& pts) {
  if (pts.size() <= 2) return pts;
  if (fits_small(pts)) {
    std::vector<LatticePoint> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
      while (k >= 2 && cross_small(h[k - 2], h[k - 1], p) <= 0) --k;
      h[k++] = p;
    }
    for (std::size_t t = pts.size() - 1, lo = k + 1; t-- > 0;) {
      while (k >= lo && cross_small(h[k - 2], h[k - 1], pts[t]) <= 0) --k;
      h[k++] = pts[t];
    }
    h.resize(k - 1);
    return h;
  }
  std::vector<LatticePoint> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t t = pts.size() - 1, lo = k + 1; t-- > 0;) {
    while (k >= lo && cross(h[k - 2], h[k - 1], pts[t]) <= 0) --k;
    h[k++] = pts[t];
  }
  h.resize(k - 1);
  return h;
}

// Greedy extraction of spread values among candidates sorted increasingly.
// Returns flags (1 = spread) aligned with the candidates.
std::vector<char> extract_spread(const std::vector<LatticePoint>& pts, std::int64_t D) {
  const std::size_t m = pts.size();
  std::vector<char> spread(m, 0);
  if (m < 2) return spread;
  const i128 D2 = static_cast<i128>(D) * D;
  auto hull = hull_of(pts);
  if (hull.size() <= 4096) {
    i128 diam = 0;
    for (std::size_t a = 0; a < hull.size(); ++a)
      for (std::size_t b = a + 1; b < hull.size(); ++b) diam = std::max(diam, dist2(hull[a], hull[b]));
    if (diam < D2) return spread;
  }
  // The first selected value is the largest one with some value at distance >= D.
  std::size_t start = m;
  for (std::size_t t = m; t-- > 0;) {
    bool far = false;
    for (const auto& h : hull)
      if (dist2(pts[t], h) >= D2) {
        far = true;
        break;
      }
    if (far) {
      start = t;
      break;
    }
  }
  if (start == m) return spread;

  // Grid of integer side s <= D/sqrt2: a cell holds at most one selected
  // value, and a conflict lies within R cells in each direction. Scanning is
  // in decreasing lexicographic order, so only columns c..c+R are live.
  std::int64_t rmin = pts[0].re, imin0 = pts[0].im, imax0 = pts[0].im;
  for (const auto& p : pts) {
    imin0 = std::min(imin0, p.im);
    imax0 = std::max(imax0, p.im);
  }
  const std::int64_t side = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(static_cast<double>(D) / std::sqrt(2.0))));
  const std::int64_t R = (D - 1) / side + 1;
  const i128 rows = (static_cast<i128>(imax0) - imin0) / side + 1;
  if (rows * (R + 1) <= static_cast<i128>(8 * m + 1024)) {
    const auto nr = static_cast<std::size_t>(rows);
    const auto ring = static_cast<std::size_t>(R + 1);
    std::vector<std::int64_t> stamp(nr * ring, -1);
    std::vector<std::size_t> who(nr * ring, 0);
    const bool small = D < (std::int64_t{1} << 30) && fits_small(pts);
    auto col_of = [&](const LatticePoint& p) {
      return small ? (p.re - rmin) / side : static_cast<std::int64_t>((static_cast<i128>(p.re) - rmin) / side);
    };
    auto row_of = [&](const LatticePoint& p) {
      return small ? (p.im - imin0) / side : static_cast<std::int64_t>((static_cast<i128>(p.im) - imin0) / side);
    };
    const std::int64_t D2s = small ? D * D : 0;
    auto near = [&](const LatticePoint& a, const LatticePoint& b) {
      if (small) {
        const std::int64_t dr = a.re - b.re, di = a.im - b.im;
        return dr * dr + di * di < D2s;
      }
      return dist2(a, b) < D2;
    };
    auto conflicts_grid = [&](const LatticePoint& p) {
      const std::int64_t c = col_of(p), r = row_of(p);
      const std::int64_t r0 = std::max<std::int64_t>(0, r - R), r1 = std::min<std::int64_t>(rows - 1, r + R);
      std::size_t ci = static_cast<std::size_t>(c % static_cast<std::int64_t>(ring));
      for (std::int64_t cc = c; cc <= c + R; ++cc, ci = ci + 1 == ring ? 0 : ci + 1) {
        const std::size_t slot = ci * nr;
        for (std::int64_t rr = r0; rr <= r1; ++rr) {
          const std::size_t cell = slot + static_cast<std::size_t>(rr);
          if (stamp[cell] == cc && near(pts[who[cell]], p)) return true;
        }
      }
      return false;
    };
    auto insert_grid = [&](std::size_t t) {
      const std::int64_t c = col_of(pts[t]);
      const std::size_t cell = static_cast<std::size_t>(c % static_cast<std::int64_t>(ring)) * nr + static_cast<std::size_t>(row_of(pts[t]));
      stamp[cell] = c;
      who[cell] = t;
    };
    spread[start] = 1;
    insert_grid(start);
    for (std::size_t t = start; t-- > 0;)
      if (!conflicts_grid(pts[t])) {
        spread[t] = 1;
        insert_grid(t);
      }
    return spread;
  }

  // Selected values are scanned in decreasing order, so only those with
  // real part below current + D can be within distance D.
  std::int64_t imin = pts[0].im, imax = pts[0].im;
  for (const auto& p : pts) {
    imin = std::min(imin, p.im);
    imax = std::max(imax, p.im);
  }
  struct Bucket {
    std::vector<LatticePoint> pts;
    std::size_t head = 0;
  };
  const i128 nb = (static_cast<i128>(imax) - imin) / D + 1;
  const bool dense = nb <= static_cast<i128>(4 * m + 64);
  std::vector<Bucket> dense_buckets;
  std::unordered_map<std::int64_t, Bucket> sparse_buckets;
  if (dense) dense_buckets.resize(static_cast<std::size_t>(nb));
  auto bucket_of = [&](std::int64_t im) { return static_cast<std::int64_t>((static_cast<i128>(im) - imin) / D); };
  auto find_bucket = [&](std::int64_t b) -> Bucket* {
    if (dense) {
      if (b < 0 || b >= static_cast<std::int64_t>(nb)) return nullptr;
      return &dense_buckets[static_cast<std::size_t>(b)];
    }
    auto it = sparse_buckets.find(b);
    return it == sparse_buckets.end() ? nullptr : &it->second;
  };
  auto conflicts = [&](const LatticePoint& p) {
    const std::int64_t b = bucket_of(p.im);
    for (std::int64_t bb = b - 1; bb <= b + 1; ++bb) {
      Bucket* B = find_bucket(bb);
      if (!B) continue;
      while (B->head < B->pts.size() && static_cast<i128>(B->pts[B->head].re) - p.re >= D) ++B->head;
      for (std::size_t t = B->head; t < B->pts.size(); ++t)
        if (dist2(B->pts[t], p) < D2) return true;
    }
    return false;
  };
  auto insert = [&](const LatticePoint& p) {
    const std::int64_t b = bucket_of(p.im);
    if (dense)
      dense_buckets[static_cast<std::size_t>(b)].pts.push_back(p);
    else
      sparse_buckets[b].pts.push_back(p);
  };
  spread[start] = 1;
  insert(pts[start]);
  std::size_t selected = 1;
  for (std::size_t t = start; t-- > 0;) {
    if (!conflicts(pts[t])) {
      spread[t] = 1;
      insert(pts[t]);
      ++selected;
    }
  }
  (void)selected;
  return spread;
}

}  // namespace

EllDecomposition decompose(const KVector& y, int d) {
  if (d < 1) throw InputError("decompose: d must be positive");
  EllDecomposition D;
  D.n = y.n();
  D.k = y.k;
  D.d = d;
  Grouping g = group_values(y);
  D.members = std::move(g.members);
  const int G = static_cast<int>(g.value.size());

  // Level sets of every value: order j takes the next chunk of the schedule.
  std::vector<std::vector<int>> cand;  // per order: group ids, increasing value
  std::vector<std::vector<int>> chunk_begin;
  std::vector<std::vector<int>> chunk_size;
  for (int gi = 0; gi < G; ++gi) {
    int off = g.begin[gi];
    int rem = g.begin[gi + 1] - off;
    for (std::size_t j = 0; rem > 0; ++j) {
      if (cand.size() <= j) {
        cand.emplace_back();
        chunk_begin.emplace_back();
        chunk_size.emplace_back();
      }
      const int lo = 1 << j;
      const int take = rem < 2 * lo ? rem : lo;
      cand[j].push_back(gi);
      chunk_begin[j].push_back(off);
      chunk_size[j].push_back(take);
      off += take;
      rem -= take;
    }
  }

  std::vector<EllPart> spread_parts, regular_parts;
  std::vector<LatticePoint> pts;
  std::size_t total_levels = 0;
  for (const auto& c : cand) total_levels += c.size();
  D.levels.reserve(total_levels);
  for (std::size_t j = 0; j < cand.size(); ++j) {
    pts.clear();
    for (int gi : cand[j]) pts.push_back(g.value[gi]);
    auto flags = extract_spread(pts, d);
    EllPart S{static_cast<int>(j), PartKind::Spread, {}, 0};
    EllPart R{static_cast<int>(j), PartKind::Regular, {}, 0};
    const auto nspread = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
    S.levels.reserve(nspread);
    R.levels.reserve(pts.size() - nspread);
    for (std::size_t t = pts.size(); t-- > 0;) {
      int id = static_cast<int>(D.levels.size());
      D.levels.push_back({static_cast<int>(j), pts[t], chunk_begin[j][t], chunk_size[j][t]});
      EllPart& P = flags[t] ? S : R;
      P.levels.push_back(id);
      P.size += chunk_size[j][t];
    }
    if (!S.levels.empty()) spread_parts.push_back(std::move(S));
    if (!R.levels.empty()) regular_parts.push_back(std::move(R));
  }
  D.parts = std::move(spread_parts);
  for (auto& P : regular_parts) D.parts.push_back(std::move(P));
  return D;
}

IndexSet EllDecomposition::part_indices(int q) const {
  IndexSet out;
  for (int id : parts[q].levels) {
    auto s = indices(id);
    out.insert(out.end(), s.begin(), s.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> EllDecomposition::part_of() const {
  std::vector<int> out(n, -1);
  for (int q = 0; q < static_cast<int>(parts.size()); ++q)
    for (int id : parts[q].levels)
      for (int i : indices(id)) out[i] = q;
  return out;
}

int EllDecomposition::max_order() const {
  int m = -1;
  for (const auto& P : parts) m = std::max(m, P.order);
  return m;
}

std::int64_t EllDecomposition::spread_total() const {
  std::int64_t s = 0;
  for (const auto& P : parts)
    if (P.kind == PartKind::Spread) s += P.size;
  return s;
}

std::vector<OrderStats> class_stats(const EllDecomposition& D) {
  std::vector<OrderStats> out(D.max_order() + 1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j].order = static_cast<int>(j);
  for (const auto& P : D.parts) {
    auto& s = out[P.order];
    if (P.kind == PartKind::Spread) {
      s.cs = P.size;
      s.hs = P.height();
    } else {
      s.cr = P.size;
      s.hr = P.height();
    }
  }
  return out;
}

double class_cardinality_log_bound(const std::vector<OrderStats>& stats, std::int64_t n) {
  std::int64_t total = 0;
  for (const auto& s : stats) {
    if (s.cs < 0 || s.cr < 0 || s.hs < 0 || s.hr < 0) throw InputError("class bound: negative statistic");
    total += s.cs + s.cr;
  }
  if (total != n) throw InputError("class bound: cardinalities do not sum to n");
  auto term = [](std::int64_t c, std::int64_t h) {
    if (c == 0) return 0.0;
    if (h == 0) throw InputError("class bound: nonempty part with zero height");
    return static_cast<double>(c) * std::log(static_cast<double>(h)) - std::lgamma(static_cast<double>(c) + 1.0);
  };
  double v = std::lgamma(static_cast<double>(n) + 1.0);
  for (const auto& s : stats) v += term(s.cs, s.hs) + term(s.cr, s.hr);
  return v;
}

std::vector<int> equal_value_counts(const KVector& y) {
  Grouping g = group_values(y);
  std::vector<int> out(y.n());
  for (std::size_t gi = 0; gi + 1 < g.begin.size(); ++gi)
    for (int t = g.begin[gi]; t < g.begin[gi + 1]; ++t) out[g.members[t]] = g.begin[gi + 1] - g.begin[gi];
  return out;
}

}  // namespace rrd
