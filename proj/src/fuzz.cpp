#include "rrd/fuzz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "rrd/graph_core.hpp"
#include "rrd/qmatrix.hpp"
#include "rrd/sampler.hpp"
#include "rrd/taxonomy.hpp"

namespace rrd {

std::vector<FuzzFamily> all_fuzz_families() {
  return {FuzzFamily::SwitchInvariants, FuzzFamily::LevelSets,   FuzzFamily::LevelSchedule,
          FuzzFamily::HeightMonotone,   FuzzFamily::SpreadSeparation, FuzzFamily::QIdentities,
          FuzzFamily::Decay,            FuzzFamily::NormBound,   FuzzFamily::AlmostConstantLower,
          FuzzFamily::SplitValidity};
}

std::string to_string(FuzzFamily f) {
  switch (f) {
    case FuzzFamily::SwitchInvariants: return "switch-invariants";
    case FuzzFamily::LevelSets: return "level-sets";
    case FuzzFamily::LevelSchedule: return "level-schedule";
    case FuzzFamily::HeightMonotone: return "height-monotone";
    case FuzzFamily::SpreadSeparation: return "spread-separation";
    case FuzzFamily::QIdentities: return "q-identities";
    case FuzzFamily::Decay: return "decay";
    case FuzzFamily::NormBound: return "norm-bound";
    case FuzzFamily::AlmostConstantLower: return "almost-constant-lower";
    case FuzzFamily::SplitValidity: return "split-validity";
  }
  return "?";
}

FuzzFamily fuzz_family_from(const std::string& name) {
  for (auto f : all_fuzz_families())
    if (to_string(f) == name) return f;
  throw InputError("unknown fuzz family: " + name);
}

KVector random_kvector(Philox& g, int n, std::int64_t k) {
  KVector y;
  y.k = k;
  y.coords.resize(n);
  const int style = static_cast<int>(g.uniform_int(3));
  if (style == 0) {
    // Few distinct values, heavy repetition.
    const auto pool = 1 + g.uniform_int(std::max<std::uint64_t>(1, n / 4 + 1));
    const auto R = static_cast<std::int64_t>(1 + g.uniform_int(4 * static_cast<std::uint64_t>(k)));
    std::vector<LatticePoint> vals(pool);
    for (auto& v : vals)
      v = {static_cast<std::int64_t>(g.uniform_int(2 * R + 1)) - R, static_cast<std::int64_t>(g.uniform_int(2 * R + 1)) - R};
    // Skewed choice so some values repeat many times.
    for (auto& c : y.coords) {
      const double u = g.uniform01();
      c = vals[static_cast<std::size_t>(u * u * static_cast<double>(pool))];
    }
  } else {
    const std::int64_t R = std::array<std::int64_t, 5>{1, 3, 10, 100, 3 * k}[g.uniform_int(5)];
    for (auto& c : y.coords)
      c = {static_cast<std::int64_t>(g.uniform_int(2 * R + 1)) - R,
           style == 1 ? 0 : static_cast<std::int64_t>(g.uniform_int(2 * R + 1)) - R};
  }
  return y;
}

namespace {

std::string fmt(const std::string& what, std::int64_t a, std::int64_t b = 0) {
  std::ostringstream os;
  os << what << " (" << a << ", " << b << ")";
  return os.str();
}

}  // namespace

std::string check_level_sets(const KVector& y, const EllDecomposition& D) {
  const int n = y.n();
  std::vector<int> seen(n, 0);
  for (std::size_t id = 0; id < D.levels.size(); ++id) {
    const auto& L = D.levels[id];
    const std::int64_t lo2 = std::int64_t{1} << L.order;  // 2^{j+1} / 2
    if (2 * L.size < lo2 || L.size >= 2 * lo2) return fmt("level set size outside [2^{j-1}, 2^{j+1})", L.order, L.size);
    auto idx = D.indices(static_cast<int>(id));
    for (std::size_t t = 0; t < idx.size(); ++t) {
      if (y.coords[idx[t]] != L.value) return fmt("level set holds a foreign value", static_cast<std::int64_t>(id), idx[t]);
      if (t > 0 && idx[t] <= idx[t - 1]) return fmt("level set indices not increasing", static_cast<std::int64_t>(id));
      ++seen[idx[t]];
    }
  }
  for (int i = 0; i < n; ++i)
    if (seen[i] != 1) return fmt("index not covered exactly once", i, seen[i]);
  // Leftmost rule: for each value, lower orders take smaller indices.
  std::map<LatticePoint, std::pair<int, int>> last;  // value -> (order, max index)
  std::vector<int> by_order(D.levels.size());
  for (std::size_t id = 0; id < D.levels.size(); ++id) by_order[id] = static_cast<int>(id);
  std::stable_sort(by_order.begin(), by_order.end(), [&](int a, int b) { return D.levels[a].order < D.levels[b].order; });
  for (int id : by_order) {
    const auto& L = D.levels[id];
    auto idx = D.indices(id);
    auto it = last.find(L.value);
    if (it != last.end()) {
      if (it->second.first + 1 != L.order) return fmt("orders of a value are not consecutive", L.order);
      if (idx.front() <= it->second.second) return fmt("leftmost rule violated", L.order, idx.front());
    } else if (L.order != 0) {
      return fmt("value starts above order 0", L.order);
    }
    last[L.value] = {L.order, idx.back()};
  }
  // Part heights and sizes; spread parts have height >= 2.
  bool regular_seen = false;
  int prev_order = -1;
  for (const auto& P : D.parts) {
    std::int64_t size = 0;
    for (int id : P.levels) {
      if (D.levels[id].order != P.order) return fmt("level of a foreign order in a part", P.order);
      size += D.levels[id].size;
    }
    if (size != P.size) return fmt("part size mismatch", P.size, size);
    const std::int64_t h = P.height();
    if (size * 2 < (std::int64_t{1} << P.order) * h || size > (std::int64_t{2} << P.order) * h)
      return fmt("part size outside [2^{j-1} h, 2^{j+1} h]", P.order, h);
    if (P.kind == PartKind::Spread && h < 2) return fmt("spread part of height < 2", P.order);
    if (P.kind == PartKind::Regular && !regular_seen) {
      regular_seen = true;
      prev_order = -1;
    }
    if (P.kind == PartKind::Spread && regular_seen) return "spread part after a regular part";
    if (P.order <= prev_order) return fmt("parts not in increasing order", P.order);
    prev_order = P.order;
  }
  return {};
}

std::string check_level_schedule(const KVector& y, const EllDecomposition& D) {
  std::map<LatticePoint, std::int64_t> count;
  for (const auto& c : y.coords) ++count[c];
  std::map<LatticePoint, std::vector<std::pair<int, int>>> sizes;  // value -> (order, size)
  for (const auto& L : D.levels) sizes[L.value].emplace_back(L.order, L.size);
  for (auto& [v, s] : sizes) {
    std::sort(s.begin(), s.end());
    const std::int64_t c = count[v];
    const int u = static_cast<int>(std::floor(std::log2((static_cast<double>(c) + 1) / 3)));
    if (c < 2) {
      if (s.size() != 1 || s[0].second != c) return fmt("singleton value split", c);
      continue;
    }
    if (static_cast<int>(s.size()) != u + 2) return fmt("wrong number of level sets for multiplicity", c, static_cast<std::int64_t>(s.size()));
    for (int j = 0; j <= u; ++j)
      if (s[j].second != (1 << j)) return fmt("level size is not 2^j", j, s[j].second);
    const std::int64_t res = s[u + 1].second;
    if (res != c - (std::int64_t{2} << u) + 1) return fmt("residual size mismatch", c, res);
    if (res < (std::int64_t{1} << u) || res > (std::int64_t{4} << u) - 1) return fmt("residual outside [2^u, 2^{u+2}-1]", c, res);
  }
  return {};
}

std::string check_height_monotone(const EllDecomposition& D) {
  const int J = D.max_order() + 1;
  std::vector<std::int64_t> h(J, 0);
  std::vector<std::set<LatticePoint>> vals(J);
  for (const auto& P : D.parts) {
    h[P.order] += P.height();
    for (int id : P.levels) vals[P.order].insert(D.levels[id].value);
  }
  for (int j = 1; j < J; ++j) {
    if (h[j] > h[j - 1]) return fmt("cumulative height increases", j, h[j]);
    for (const auto& v : vals[j])
      if (!vals[j - 1].count(v)) return fmt("value set of order j not nested in order j-1", j);
  }
  return {};
}

std::string check_spread_separation(const EllDecomposition& D) {
  const auto dd = static_cast<__int128>(D.d);
  for (const auto& P : D.parts) {
    if (P.kind != PartKind::Spread) continue;
    // Cells of side d: a pair closer than d lies in neighbouring cells.
    auto cell = [&](std::int64_t v) { return static_cast<std::int64_t>(std::floor(static_cast<double>(v) / D.d)); };
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<LatticePoint>> grid;
    for (int id : P.levels) {
      const auto& v = D.levels[id].value;
      const auto cr = cell(v.re), ci = cell(v.im);
      for (std::int64_t a = cr - 1; a <= cr + 1; ++a)
        for (std::int64_t b = ci - 1; b <= ci + 1; ++b) {
          auto it = grid.find({a, b});
          if (it == grid.end()) continue;
          for (const auto& w : it->second) {
            const __int128 dr = static_cast<__int128>(v.re) - w.re, di = static_cast<__int128>(v.im) - w.im;
            if (dr * dr + di * di < dd * dd) return fmt("spread values closer than d/k", P.order);
          }
        }
      grid[{cr, ci}].push_back(v);
    }
  }
  return {};
}

namespace {

FuzzOutcome fuzz_switch(Philox& g) {
  const int n = 2 + static_cast<int>(g.uniform_int(39));
  const int d = 1 + static_cast<int>(g.uniform_int(std::min(n, 4)));
  auto M = sample_uniform(n, d, g.next_u64());
  FuzzOutcome I{true, {}};
  for (int s = 0; s < 20; ++s) {
    const int i = static_cast<int>(g.uniform_int(n)), i2 = static_cast<int>(g.uniform_int(n));
    const int j = M.row(i)[g.uniform_int(d)], j2 = M.row(i2)[g.uniform_int(d)];
    const bool valid = i != i2 && j != j2 && !M.has(i, j2) && !M.has(i2, j);
    try {
      auto S = simple_switch(M, i, j, i2, j2);
      if (!valid) return {true, "invalid switch accepted"};
      S.validate();
      int diff = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) diff += M.has(a, b) != S.has(a, b);
      if (diff != 4 || S.has(i, j) || S.has(i2, j2) || !S.has(i, j2) || !S.has(i2, j)) return {true, "switch changed the wrong entries"};
      M = std::move(S);
    } catch (const SwitchInvalid&) {
      if (valid) return {true, "valid switch rejected"};
    } catch (const InputError& e) {
      return {true, std::string("invariant broken after switch: ") + e.what()};
    }
  }
  return I;
}

int log_uniform_n(Philox& g, int hi) {
  return std::max(1, static_cast<int>(std::floor(std::exp(std::log(static_cast<double>(hi)) * g.uniform01()))));
}

FuzzOutcome fuzz_decomposition(Philox& g, FuzzFamily f) {
  const int n = log_uniform_n(g, 10000);
  const int d = 1 + static_cast<int>(g.uniform_int(8));
  const std::int64_t k = 1 + static_cast<std::int64_t>(g.uniform_int(static_cast<std::uint64_t>(d) * d * d));
  auto y = random_kvector(g, n, k);
  auto D = decompose(y, d);
  std::string err;
  switch (f) {
    case FuzzFamily::LevelSets: err = check_level_sets(y, D); break;
    case FuzzFamily::LevelSchedule: err = check_level_schedule(y, D); break;
    case FuzzFamily::HeightMonotone: err = check_height_monotone(D); break;
    case FuzzFamily::SpreadSeparation: err = check_spread_separation(D); break;
    default: break;
  }
  return {true, err};
}

FuzzOutcome fuzz_q(Philox& g) {
  const int n = 1 + static_cast<int>(g.uniform_int(200));
  const int d = 1 + static_cast<int>(g.uniform_int(std::min(n, 4)));
  auto M = sample_uniform(n, d, g.next_u64());
  auto y = random_kvector(g, n, 1 + static_cast<std::int64_t>(g.uniform_int(27)));
  auto D = decompose(y, d);
  auto Q = project_Q(M, D);
  auto part = D.part_of();
  std::vector<int> oracle(static_cast<std::size_t>(n) * Q.m, 0);
  for (int i = 0; i < n; ++i)
    for (int j : M.row(i)) ++oracle[static_cast<std::size_t>(i) * Q.m + part[j]];
  if (oracle != Q.entries) return {true, "projected Q differs from direct summation"};
  for (int i = 0; i < n; ++i) {
    int s = 0;
    for (int q = 0; q < Q.m; ++q) s += Q(i, q);
    if (s != d) return {true, fmt("row sum differs from d", i, s)};
  }
  for (int q = 0; q < Q.m; ++q)
    if (Q.column_sum(q) != static_cast<std::int64_t>(d) * D.parts[q].size) return {true, fmt("column sum differs from d|part|", q)};
  return {true, {}};
}

}  // namespace

CVec random_profile_vector(Philox& g, int n) {
  CVec x(n);
  const int style = static_cast<int>(g.uniform_int(4));
  const double a = 3.0 * g.uniform01();
  for (int i = 0; i < n; ++i) {
    double m = 1;
    switch (style) {
      case 0: m = std::pow(static_cast<double>(i + 1), -a); break;
      case 1: m = 0.1 + g.uniform01(); break;
      case 2: m = std::exp(a * g.normal()); break;
      case 3: m = 1 + a * static_cast<double>(i) / n; break;
    }
    const double ph = 2 * M_PI * g.uniform01();
    x[i] = std::polar(m, ph);
  }
  g.shuffle(x.begin(), x.end());
  return x;
}

namespace {

TaxonomyParams taxonomy_fuzz_params() {
  TaxonomyOverrides ov;
  ov.p = 2;
  return derive_params(5000, 10, 1, ov);
}

FuzzOutcome fuzz_decay(Philox& g, const TaxonomyParams& P) {
  auto x = random_profile_vector(g, static_cast<int>(P.n));
  if (steep_class(x, P) != SteepClass::None) return {};
  auto v = decay_check(x, P);
  if (!v.empty()) return {true, fmt("decay violated at family/m", v[0].family, v[0].m)};
  return {true, {}};
}

FuzzOutcome fuzz_norm(Philox& g, const TaxonomyParams& P) {
  auto x = random_profile_vector(g, static_cast<int>(P.n));
  // Occasionally plant a steep head so the T0 branches are exercised.
  if (g.uniform_int(2) == 0) {
    const auto top = 1 + g.uniform_int(static_cast<std::uint64_t>(P.n1));
    const double boost = std::pow(10.0, 1 + 4 * g.uniform01());
    for (std::uint64_t t = 0; t < top; ++t) x[t] *= boost;
  }
  auto C = norm_bound_check(x, P);
  if (!C.applicable) return {};
  if (!C.holds) return {true, fmt("norm bound violated at m", C.m)};
  return {true, {}};
}

// Almost constant vector: > n - n3 coordinates within theta |lambda0| / 3 of
// lambda0, the rest bounded so that fewer than n0 exceed t |lambda0| / 2.
CVec almost_constant_vector(Philox& g, const TaxonomyParams& P, double theta, double big_scale, std::int64_t big_count) {
  const auto n = static_cast<int>(P.n);
  const cplx lambda0 = std::polar(0.5 + 1.5 * g.uniform01(), 2 * M_PI * g.uniform01());
  const double r = std::abs(lambda0);
  CVec x(n);
  for (auto& v : x) v = lambda0 + std::polar(theta * r / 3 * g.uniform01(), 2 * M_PI * g.uniform01());
  const auto free = static_cast<int>(P.n3 - 1);
  for (int t = 0; t < free; ++t) {
    const double m = t < big_count ? big_scale * r * (1 + g.uniform01()) : 6 * r * g.uniform01();
    x[t] = std::polar(m, 2 * M_PI * g.uniform01());
  }
  g.shuffle(x.begin(), x.end());
  return x;
}

FuzzOutcome fuzz_ac_lower(Philox& g, const TaxonomyParams& P, const std::vector<RegularMatrix>& pool) {
  const double theta = 1.0 / 20, t = 12;
  const std::int64_t big = static_cast<std::int64_t>(g.uniform_int(static_cast<std::uint64_t>(std::max<std::int64_t>(1, P.n0))));
  auto x = almost_constant_vector(g, P, theta, 8.0, big);
  auto st = order_statistics(x, {P.n0, P.n3});
  if (!(st[1] > 0 && st[0] <= t * st[1])) return {};
  if (!almost_constant_witness(x, theta, P)) return {};
  const auto& M = pool[g.uniform_int(pool.size())];
  const int n = M.n();
  IndexSet removed;
  const auto nrem = g.uniform_int(static_cast<std::uint64_t>(n / 4 + 1));
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  g.shuffle(perm.begin(), perm.end());
  removed.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nrem));
  const cplx z = std::polar(M.d() / 5.0 * std::sqrt(g.uniform01()), 2 * M_PI * g.uniform01());
  auto r = shifted_apply(M, z, RowMask::without(n, removed), x);
  double norm2 = 0;
  for (const auto& v : r) norm2 += abs2(v);
  const double bound = M.d() * std::sqrt(static_cast<double>(n)) / (2 * std::sqrt(2.0)) * st[1];
  if (std::sqrt(norm2) < bound * (1 - 1e-12)) return {true, "lower bound violated"};
  return {true, {}};
}

FuzzOutcome fuzz_split(Philox& g, const TaxonomyParams& P) {
  const double t = 12;
  const auto big = P.n0 + static_cast<std::int64_t>(g.uniform_int(static_cast<std::uint64_t>(P.n3 - P.n0)));
  auto x = almost_constant_vector(g, P, P.theta0, 2 * t, big);
  std::optional<SplitResult> S;
  try {
    S = split_shifted(x, t, P);
  } catch (const InputError&) {
    return {};  // not almost constant
  }
  if (!S) return {};
  if (!S->steep_ok) return {true, "w is not steep"};
  if (!S->shift_ok) return {true, "shift exceeds w*_{n1}/10"};
  return {true, {}};
}

}  // namespace

struct FuzzContext {
  FuzzFamily family = FuzzFamily::LevelSets;
  std::uint64_t seed = 0;
  std::uint64_t label = 0;
  TaxonomyParams P;
  std::vector<RegularMatrix> pool;
};

std::shared_ptr<const FuzzContext> make_fuzz_context(FuzzFamily f, std::uint64_t seed) {
  auto C = std::make_shared<FuzzContext>();
  C->family = f;
  C->seed = seed;
  C->label = label_hash(to_string(f).c_str());
  TaxonomyOverrides ov;
  ov.p = 2;
  if (f == FuzzFamily::Decay || f == FuzzFamily::NormBound) C->P = taxonomy_fuzz_params();
  if (f == FuzzFamily::AlmostConstantLower) {
    C->P = derive_params(6000, 3, 1, ov);
    for (std::uint64_t s = 0; s < 8; ++s) C->pool.push_back(sample_uniform(6000, 3, derive_seed(seed, {C->label, 0xA11CEull, s})));
    C->pool.push_back(RegularMatrix::circulant(6000, {0, 1, 2}));
  }
  if (f == FuzzFamily::SplitValidity) C->P = derive_params(20000, 400, 1, ov);
  return C;
}

FuzzOutcome fuzz_instance(const FuzzContext& C, std::uint64_t t) {
  Philox g(derive_seed(C.seed, {C.label, t}));
  switch (C.family) {
    case FuzzFamily::SwitchInvariants: return fuzz_switch(g);
    case FuzzFamily::LevelSets:
    case FuzzFamily::LevelSchedule:
    case FuzzFamily::HeightMonotone:
    case FuzzFamily::SpreadSeparation: return fuzz_decomposition(g, C.family);
    case FuzzFamily::QIdentities: return fuzz_q(g);
    case FuzzFamily::Decay: return fuzz_decay(g, C.P);
    case FuzzFamily::NormBound: return fuzz_norm(g, C.P);
    case FuzzFamily::AlmostConstantLower: return fuzz_ac_lower(g, C.P, C.pool);
    case FuzzFamily::SplitValidity: return fuzz_split(g, C.P);
  }
  return {};
}

FuzzTally run_fuzz(FuzzFamily f, std::uint64_t instances, std::uint64_t seed) {
  FuzzTally T;
  T.family = f;
  auto C = make_fuzz_context(f, seed);
  for (std::uint64_t t = 0; t < instances; ++t) {
    auto I = fuzz_instance(*C, t);
    ++T.instances;
    T.applicable += I.applicable;
    if (!I.failure.empty()) {
      if (T.failures == 0) T.first_failure = "instance " + std::to_string(t) + ": " + I.failure;
      ++T.failures;
    }
  }
  return T;
}

}  // namespace rrd
