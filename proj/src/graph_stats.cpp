#include "rrd/graph_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rrd/rng.hpp"

namespace rrd {

namespace {

IndexSet random_subset(int n, std::int64_t k, Philox& g) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::int64_t t = 0; t < k; ++t) std::swap(all[t], all[t + g.uniform_int(n - t)]);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::int64_t> default_sizes(int n, std::int64_t lo) {
  std::vector<std::int64_t> s;
  for (double v = std::max<double>(1, lo); v < n; v *= 2) s.push_back(static_cast<std::int64_t>(v));
  if (lo <= n) s.push_back(n);
  return s;
}

}  // namespace

std::vector<int> row_hits(const RegularMatrix& M, const IndexSet& J) {
  std::vector<int> h(M.n(), 0);
  for (int j : J) {
    if (j < 0 || j >= M.n()) throw InputError("row_hits: index out of range");
    for (int i : M.col(j)) ++h[i];
  }
  return h;
}

EventReport check_omega(const RegularMatrix& M, int k, double eps, const OmegaOptions& opt) {
  const int n = M.n(), d = M.d();
  if (k < 1 || k > n) throw InputError("check_omega: need 1 <= k <= n");
  if (!(eps > 0 && eps < 1)) throw InputError("check_omega: eps must lie in (0,1)");
  EventReport R;
  R.name = "omega";
  R.params = {{"k", k}, {"eps", eps}};
  const double need = (1 - eps) * d * k;
  auto note = [&](std::int64_t s, const IndexSet& J) {
    R.worst_ratio = std::max(R.worst_ratio, need / std::max<double>(s, 1e-300));
    if (s < need && R.holds) {
      R.holds = false;
      R.witness = J;
    }
  };
  if (k <= opt.k_exhaustive && k <= 2) {
    R.exhaustive = true;
    if (k == 1) {
      for (int j = 0; j < n; ++j) note(d, {j});
      R.checked = n;
    } else {
      std::vector<int> overlap(n, 0);
      for (int j = 0; j < n; ++j) {
        std::fill(overlap.begin() + j + 1, overlap.end(), 0);
        for (int i : M.col(j))
          for (int j2 : M.row(i))
            if (j2 > j) ++overlap[j2];
        for (int j2 = j + 1; j2 < n; ++j2) note(2 * d - overlap[j2], {j, j2});
      }
      R.checked = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    }
  } else {
    R.exhaustive = false;
    Philox g(opt.seed, label_hash("check_omega"));
    std::vector<char> mark(n);
    for (std::uint64_t s = 0; s < opt.samples; ++s) {
      auto J = random_subset(n, k, g);
      std::fill(mark.begin(), mark.end(), 0);
      std::int64_t cnt = 0;
      for (int j : J)
        for (int i : M.col(j)) {
          cnt += !mark[i];
          mark[i] = 1;
        }
      note(cnt, J);
    }
    R.checked = opt.samples;
  }
  return R;
}

double alpha_k(int n, int d, std::int64_t k) { return static_cast<double>(d) * (k - d) / (8 * M_E * n) - 1; }

double beta_k(int n, int d, std::int64_t k) {
  const double a = alpha_k(n, d, k);
  return std::max(M_E * n * std::exp(-a / 2), 4.0 * k * std::log(M_E * n / k) / a);
}

EventReport check_row_hits(const RegularMatrix& M, std::int64_t l0, const RowHitOptions& opt) {
  const int n = M.n(), d = M.d();
  if (static_cast<double>(l0) < d + 24 * M_E * n / d) throw InputError("check_row_hits: need l0 >= d + 24en/d");
  EventReport R;
  R.name = "row_hits";
  R.params = {{"l0", static_cast<double>(l0)}};
  R.exhaustive = false;
  auto sizes = opt.sizes.empty() ? default_sizes(n, l0) : opt.sizes;
  Philox g(opt.seed, label_hash("check_row_hits"));
  for (auto k : sizes) {
    if (k < l0 || k > n) throw InputError("check_row_hits: size outside [l0, n]");
    const double a = alpha_k(n, d, k), b = beta_k(n, d, k);
    for (std::uint64_t s = 0; s < opt.samples_per_size; ++s) {
      auto J = random_subset(n, k, g);
      auto h = row_hits(M, J);
      std::int64_t bad = 0;
      for (int v : h) bad += v < a;
      ++R.checked;
      R.worst_ratio = std::max(R.worst_ratio, bad / b);
      if (bad > b && R.holds) {
        R.holds = false;
        R.witness = J;
      }
    }
  }
  return R;
}

bool low_hit_rows_ok(const RegularMatrix& M, const IndexSet& J, double c, std::int64_t* bad) {
  const int n = M.n(), d = M.d();
  auto h = row_hits(M, J);
  const double thr = c * d * static_cast<double>(J.size()) / n;
  std::int64_t b = 0;
  for (int v : h) b += v < thr;
  if (bad) *bad = b;
  if (static_cast<double>(J.size()) * J.size() * d < static_cast<double>(n) * n) return true;
  return static_cast<double>(b) * b * d <= static_cast<double>(n) * n;
}

bool two_sided_rows_ok(const RegularMatrix& M, const IndexSet& J, double c, std::int64_t* good) {
  const int n = M.n(), d = M.d();
  auto h = row_hits(M, J);
  const double js = static_cast<double>(J.size()), jc = n - js;
  std::int64_t g = 0;
  for (int v : h) g += v >= c * d * js / n && d - v >= c * d * jc / n;
  if (good) *good = g;
  return static_cast<double>(g) >= c * std::min({d * js, d * jc, static_cast<double>(n)});
}

namespace {

EventReport sampled_check(const RegularMatrix& M, const RowHitOptions& opt, const char* name, double c,
                          std::int64_t min_size, bool (*fn)(const RegularMatrix&, const IndexSet&, double, std::int64_t*)) {
  EventReport R;
  R.name = name;
  R.params = {{"c", c}};
  R.exhaustive = false;
  auto sizes = opt.sizes.empty() ? default_sizes(M.n(), min_size) : opt.sizes;
  Philox g(opt.seed, label_hash(name));
  for (auto k : sizes)
    for (std::uint64_t s = 0; s < opt.samples_per_size; ++s) {
      auto J = random_subset(M.n(), k, g);
      ++R.checked;
      if (!fn(M, J, c, nullptr) && R.holds) {
        R.holds = false;
        R.witness = J;
      }
    }
  return R;
}

}  // namespace

EventReport check_low_hits(const RegularMatrix& M, double c, const RowHitOptions& opt) {
  const auto lo = static_cast<std::int64_t>(std::ceil(M.n() / std::sqrt(static_cast<double>(M.d()))));
  return sampled_check(M, opt, "low_hits", c, lo, low_hit_rows_ok);
}

EventReport check_two_sided(const RegularMatrix& M, double c, const RowHitOptions& opt) {
  RowHitOptions o = opt;
  if (o.sizes.empty())
    for (std::int64_t k = 1; k < M.n(); k *= 2) o.sizes.push_back(k);
  return sampled_check(M, o, "two_sided", c, 1, two_sided_rows_ok);
}

LeftRightSplit left_right_split(const RegularMatrix& M, const IndexSet& Jl, const IndexSet& Jr, double eps) {
  const int n = M.n(), d = M.d();
  std::vector<char> side(n, 0);
  for (int j : Jl) {
    if (j < 0 || j >= n) throw InputError("left_right_split: index out of range");
    side[j] = 1;
  }
  for (int j : Jr) {
    if (j < 0 || j >= n) throw InputError("left_right_split: index out of range");
    if (side[j]) throw InputError("left_right_split: Jl and Jr overlap");
    side[j] = 2;
  }
  LeftRightSplit S;
  for (int i = 0; i < n; ++i) {
    int l = 0, r = 0;
    for (int j : M.row(i)) {
      l += side[j] == 1;
      r += side[j] == 2;
    }
    if (l || r) ++S.union_support;
    if (l == 1 && r == 0) S.Il.push_back(i);
    if (l == 0 && r == 1) S.Ir.push_back(i);
  }
  const double J = static_cast<double>(Jl.size() + Jr.size());
  S.hypothesis = S.union_support >= (1 - eps) * d * J;
  if (!Jl.empty()) {
    const double p = J / Jl.size();
    S.left_bound = (1 - 2 * eps * p) * d * Jl.size();
    S.conclusion = S.Il.size() >= S.left_bound;
  }
  return S;
}

DeflatedNorm deflated_norm(const RegularMatrix& M, double rel_tol, int max_iter, std::uint64_t seed) {
  const int n = M.n(), d = M.d();
  const double s = static_cast<double>(d) / n;
  DeflatedNorm R;
  if (n == 0) return R;
  auto applyB = [&](const std::vector<double>& x, std::vector<double>& y) {
    const double sum = std::accumulate(x.begin(), x.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      double v = 0;
      for (int j : M.row(i)) v += x[j];
      y[i] = v - s * sum;
    }
  };
  auto applyBt = [&](const std::vector<double>& x, std::vector<double>& y) {
    const double sum = std::accumulate(x.begin(), x.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      double v = 0;
      for (int i : M.col(j)) v += x[i];
      y[j] = v - s * sum;
    }
  };
  auto norm = [](const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); };
  Philox g(seed, label_hash("deflated_norm"));
  std::vector<double> x(n), y(n), z(n);
  for (auto& v : x) v = g.normal();
  double nx = norm(x);
  for (auto& v : x) v /= nx;
  double mu = 0, prev = -1;
  for (int it = 1; it <= max_iter; ++it) {
    applyB(x, y);
    applyBt(y, z);
    mu = std::inner_product(x.begin(), x.end(), z.begin(), 0.0);
    R.iterations = it;
    const double nz = norm(z);
    if (nz == 0) {
      mu = 0;
      R.converged = true;
      std::fill(z.begin(), z.end(), 0.0);
      break;
    }
    if (prev >= 0 && std::abs(mu - prev) <= rel_tol * std::max(mu, 1e-300)) {
      R.converged = true;
      break;
    }
    prev = mu;
    for (int i = 0; i < n; ++i) x[i] = z[i] / nz;
  }
  double res2 = 0;
  for (int i = 0; i < n; ++i) res2 += (z[i] - mu * x[i]) * (z[i] - mu * x[i]);
  R.lower = std::sqrt(std::max(mu, 0.0));
  R.upper = std::sqrt(std::max(mu, 0.0) + std::sqrt(res2));
  R.value = R.lower;
  return R;
}

Frequency wilson(std::uint64_t hits, std::uint64_t trials, double z) {
  Frequency F;
  F.hits = hits;
  F.trials = trials;
  if (trials == 0) {
    F.hi = 1;
    return F;
  }
  const double nt = static_cast<double>(trials);
  F.p = hits / nt;
  const double den = 1 + z * z / nt;
  const double centre = (F.p + z * z / (2 * nt)) / den;
  const double half = z * std::sqrt(F.p * (1 - F.p) / nt + z * z / (4 * nt * nt)) / den;
  F.lo = std::max(0.0, centre - half);
  F.hi = std::min(1.0, centre + half);
  return F;
}

Frequency estimate_frequency(std::uint64_t trials, std::uint64_t seed, const std::function<bool(std::uint64_t)>& trial) {
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) hits += trial(derive_seed(seed, {label_hash("trial"), t}));
  return wilson(hits, trials);
}

}  // namespace rrd
