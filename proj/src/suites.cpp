#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "rrd/corpus.hpp"
#include "rrd/decomposition.hpp"
#include "rrd/estimators.hpp"
#include "rrd/fuzz.hpp"
#include "rrd/graph_stats.hpp"
#include "rrd/harness.hpp"
#include "rrd/sampler.hpp"
#include "rrd/spectral.hpp"

namespace rrd {

namespace {

using json = nlohmann::ordered_json;

std::string fd(double v) { return format_double(v); }
std::string fi(std::int64_t v) { return std::to_string(v); }
std::string fb(bool v) { return v ? "1" : "0"; }

const std::set<std::string>& allowed_keys(ExperimentKind k) {
  static const std::map<ExperimentKind, std::set<std::string>> keys{
      {ExperimentKind::Uniformity, {"n", "d", "draws", "mcmc_draws", "mcmc_proposals", "multigraph_draws"}},
      {ExperimentKind::Expansion, {"n", "d", "trials", "eps", "norm_factor"}},
      {ExperimentKind::DeflatedNorm, {"n", "d", "trials", "norm_factor", "z", "removed"}},
      {ExperimentKind::TaxonomyCensus, {"n", "d", "L", "trials", "p", "a3", "theta0"}},
      {ExperimentKind::EllFuzz, {"trials", "families"}},
      {ExperimentKind::EstimatorIdentities, {"n", "d", "trials", "u", "c", "p", "a3"}},
      {ExperimentKind::ZEquivalence, {"draws"}},
      {ExperimentKind::Cover, {"n", "d", "v", "trials", "p", "a3", "cK", "cP", "smoke"}},
      {ExperimentKind::Delocalization, {"n", "d", "trials", "p", "a3", "rho_exp", "delta", "eps", "norm_factor"}},
  };
  return keys.at(k);
}

TaxonomyOverrides overrides(const ExperimentConfig& cfg, double a3_default) {
  TaxonomyOverrides ov;
  ov.p = cfg.integer("p", 2);
  ov.a3 = cfg.real("a3", a3_default);
  if (cfg.has("theta0")) ov.theta0 = cfg.real("theta0", 0);
  return ov;
}

TaxonomyParams params_for(const ExperimentConfig& cfg, std::int64_t n, int d, double a3_default) {
  try {
    return derive_params(n, d, cfg.integer("L", 1), overrides(cfg, a3_default));
  } catch (const InvalidWindow& e) {
    throw ConfigError(std::string("config: parameter window: ") + e.what());
  }
}

json params_json(const TaxonomyParams& P) {
  json j;
  j["n"] = P.n;
  j["d"] = P.d;
  j["L"] = P.L;
  j["a3"] = P.a3;
  j["eps0"] = P.eps0;
  j["p"] = P.p;
  j["r"] = P.r;
  j["r0"] = P.r0;
  j["n0"] = P.n0;
  j["n1"] = P.n1;
  j["n2"] = P.n2;
  j["n3"] = P.n3;
  j["theta0"] = P.theta0;
  j["ordered"] = P.ordered;
  return j;
}

std::uint64_t label(const char* s) { return label_hash(s); }

std::string matrix_key(const RegularMatrix& M) {
  std::ostringstream os;
  for (int i = 0; i < M.n(); ++i) {
    if (i) os << ";";
    for (int t = 0; t < M.d(); ++t) os << (t ? " " : "") << M.row(i)[t] + 1;
  }
  return os.str();
}

struct ChiSquare {
  double chi2 = 0;
  int dof = 0;
  double p = 1;
  double tv = 0;
};

ChiSquare chi_square_uniform(const std::vector<std::int64_t>& counts) {
  ChiSquare C;
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double S = static_cast<double>(counts.size());
  if (total == 0 || counts.size() < 2) return C;
  const double e = total / S;
  for (auto c : counts) {
    C.chi2 += (c - e) * (c - e) / e;
    C.tv += std::abs(c / total - 1 / S);
  }
  C.tv /= 2;
  C.dof = static_cast<int>(counts.size()) - 1;
  C.p = boost::math::gamma_q(C.dof / 2.0, C.chi2 / 2.0);
  return C;
}

json chi_json(const ChiSquare& C) {
  json j;
  j["chi2"] = C.chi2;
  j["dof"] = C.dof;
  j["p_value"] = C.p;
  j["tv"] = C.tv;
  return j;
}

// A decomposition with the single part [n].
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

SuiteResult suite_uniformity(const ExperimentConfig& cfg) {
  const int n = static_cast<int>(cfg.integer("n", 4)), d = static_cast<int>(cfg.integer("d", 2));
  const auto draws = static_cast<std::uint64_t>(cfg.integer("draws", 90000));
  const auto mcmc_draws = static_cast<std::uint64_t>(cfg.integer("mcmc_draws", static_cast<std::int64_t>(draws)));
  const auto mg_draws = static_cast<std::uint64_t>(cfg.integer("multigraph_draws", 100000));
  const auto seed = cfg.seed();
  auto all = enumerate_all(n, d);
  std::map<RegularMatrix, int> index;
  for (std::size_t s = 0; s < all.size(); ++s) index[all[s]] = static_cast<int>(s);
  SuiteResult R;
  R.derived["states"] = all.size();

  std::vector<int> rej(draws), mc(mcmc_draws);
  parallel_for(draws, [&](std::uint64_t t) {
    auto M = sample_uniform(n, d, derive_seed(seed, {label("rejection"), t}));
    M.validate();
    rej[t] = index.at(M);
  });

  // Proposals per draw: at least 1000 accepted switches on average, from the
  // acceptance rate of a pilot run with a 5% margin.
  std::vector<int> offsets(d);
  std::iota(offsets.begin(), offsets.end(), 0);
  const auto start = RegularMatrix::circulant(n, offsets);
  std::uint64_t proposals = static_cast<std::uint64_t>(cfg.integer("mcmc_proposals", 0));
  if (proposals == 0) {
    std::uint64_t acc = 0;
    const std::uint64_t pilot = 100000;
    sample_mcmc(start, pilot, derive_seed(seed, {label("pilot")}), &acc);
    proposals = acc == 0 ? 1000 : static_cast<std::uint64_t>(std::ceil(1050.0 * pilot / acc));
  }
  std::vector<std::uint64_t> accepted(mcmc_draws);
  parallel_for(mcmc_draws, [&](std::uint64_t t) {
    auto M = sample_mcmc(start, proposals, derive_seed(seed, {label("mcmc"), t}), &accepted[t]);
    M.validate();
    mc[t] = index.at(M);
  });

  // Multigraph draws for the single-part decomposition, kept when simple.
  auto D = single_part(n, d);
  QMatrix Q{n, 1, d, std::vector<int>(n, d)};
  std::vector<std::int64_t> mg_count(all.size(), 0);
  std::uint64_t attempts = 0, simple = 0;
  while (simple < mg_draws) {
    auto A = sample_multigraph(D, Q, derive_seed(seed, {label("multigraph"), attempts}));
    ++attempts;
    if (!A.is_simple) continue;
    ++simple;
    ++mg_count[index.at(A.to_matrix())];
  }

  std::vector<std::int64_t> rc(all.size(), 0), mcc(all.size(), 0);
  for (int s : rej) ++rc[s];
  for (int s : mc) ++mcc[s];
  R.columns = {"state", "matrix", "rejection", "mcmc", "multigraph"};
  for (std::size_t s = 0; s < all.size(); ++s) R.rows.push_back({fi(static_cast<std::int64_t>(s)), matrix_key(all[s]), fi(rc[s]), fi(mcc[s]), fi(mg_count[s])});

  // |M| (d!)^{|part|} prod_i Q_i! / (d |part|)! for the single part.
  double log_simple = std::log(static_cast<double>(all.size())) + 2 * n * std::lgamma(d + 1.0) - std::lgamma(static_cast<double>(n) * d + 1.0);
  json rj = chi_json(chi_square_uniform(rc));
  rj["draws"] = draws;
  json mj = chi_json(chi_square_uniform(mcc));
  mj["draws"] = mcmc_draws;
  mj["proposals_per_draw"] = proposals;
  mj["mean_accepted_per_draw"] =
      mcmc_draws ? static_cast<double>(std::accumulate(accepted.begin(), accepted.end(), std::uint64_t{0})) / mcmc_draws : 0.0;
  json gj = chi_json(chi_square_uniform(mg_count));
  gj["simple_draws"] = simple;
  gj["attempts"] = attempts;
  gj["p_simple"] = attempts ? static_cast<double>(simple) / attempts : 0.0;
  gj["p_simple_exact"] = std::exp(log_simple);
  R.summary["states"] = all.size();
  R.summary["rejection"] = rj;
  R.summary["mcmc"] = mj;
  R.summary["multigraph"] = gj;
  return R;
}

SuiteResult suite_norms(const ExperimentConfig& cfg, bool omega) {
  const int n = static_cast<int>(cfg.integer("n", 2000)), d = static_cast<int>(cfg.integer("d", 20));
  const auto trials = static_cast<std::uint64_t>(cfg.integer("trials", 50));
  const double eps = cfg.real("eps", 0.3), factor = cfg.real("norm_factor", 3.0);
  const auto seed = cfg.seed();
  const double bound = factor * std::sqrt(static_cast<double>(d));
  std::vector<cplx> zgrid;
  if (cfg.has("z")) {
    const double s = std::sqrt(static_cast<double>(d)), l = std::log(static_cast<double>(d));
    const std::vector<cplx> defaults{0.0, s, -s, cplx(0, s), cplx(0, -s), cplx(s * l / 2, s * l / 2)};
    zgrid = cfg.text("z", "") == "default" ? defaults : cfg.complexes("z", {});
  }
  const int removed = static_cast<int>(cfg.integer("removed", 0));
  SuiteResult R;
  R.columns = {"trial", "sampler"};
  if (omega) R.columns.insert(R.columns.end(), {"omega1", "omega2", "omega2_worst_ratio"});
  R.columns.insert(R.columns.end(), {"norm", "norm_lower", "norm_upper", "iterations", "converged", "norm_ok"});
  for (std::size_t z = 0; z < zgrid.size(); ++z) R.columns.push_back("sigma_min_z" + std::to_string(z));
  std::vector<std::vector<std::string>> rows(trials);
  std::vector<int> hard(trials, 0), omega_ok(trials, 0), norm_ok(trials, 0);
  parallel_for(trials, [&](std::uint64_t t) {
    bool mcmc = false;
    auto M = sample_auto(n, d, derive_seed(seed, {label("matrix"), t}), &mcmc);
    M.validate();
    std::vector<std::string> row{fi(static_cast<std::int64_t>(t)), mcmc ? "mcmc" : "rejection"};
    if (omega) {
      auto o1 = check_omega(M, 1, eps);
      auto o2 = check_omega(M, 2, eps);
      omega_ok[t] = o1.holds && o2.holds;
      row.insert(row.end(), {fb(o1.holds), fb(o2.holds), fd(o2.worst_ratio)});
    }
    auto N = deflated_norm(M, 1e-6, 5000, derive_seed(seed, {label("power"), t}));
    norm_ok[t] = N.value <= bound;
    if (N.lower > d * (1 + 1e-9)) hard[t] = 1;  // the deflated norm never exceeds d
    row.insert(row.end(), {fd(N.value), fd(N.lower), fd(N.upper), fi(N.iterations), fb(N.converged), fb(norm_ok[t])});
    if (!zgrid.empty()) {
      Philox g(derive_seed(seed, {label("rows"), t}));
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      g.shuffle(perm.begin(), perm.end());
      auto K = RowMask::without(n, IndexSet(perm.begin(), perm.begin() + std::min(removed, n)));
      for (std::size_t z = 0; z < zgrid.size(); ++z) {
        auto S = smallest_sv_probe(M, zgrid[z], K, 1e-12, 200, derive_seed(seed, {label("probe"), t, z}));
        if (S.sigma_min > d + std::abs(zgrid[z]) + 1e-9) hard[t] = 1;
        row.push_back(fd(S.sigma_min));
      }
    }
    rows[t] = std::move(row);
  });
  R.rows = std::move(rows);
  R.hard_failures = std::accumulate(hard.begin(), hard.end(), 0);
  std::vector<int> offsets(d);
  std::iota(offsets.begin(), offsets.end(), 0);
  auto C = deflated_norm(RegularMatrix::circulant(n, offsets), 1e-6, 5000, seed);
  R.derived["norm_bound"] = bound;
  R.derived["row_hit_l0_min"] = d + 24 * std::numbers::e * n / d;
  R.derived["row_hit_window_nonempty"] = d + 24 * std::numbers::e * n / d <= n;
  const double T = trials ? static_cast<double>(trials) : 1.0;
  if (omega) {
    R.summary["eps"] = eps;
    R.summary["omega_pass_fraction"] = std::accumulate(omega_ok.begin(), omega_ok.end(), 0) / T;
  }
  R.summary["norm_bound"] = bound;
  R.summary["norm_pass_fraction"] = std::accumulate(norm_ok.begin(), norm_ok.end(), 0) / T;
  R.summary["circulant_norm"] = C.value;
  R.summary["circulant_exceeds_bound"] = C.value > bound;
  return R;
}

SuiteResult suite_taxonomy(const ExperimentConfig& cfg) {
  const auto n = cfg.integer("n", 5000);
  const int d = static_cast<int>(cfg.integer("d", 10));
  const auto trials = static_cast<std::uint64_t>(cfg.integer("trials", 1000));
  const auto P = params_for(cfg, n, d, 1.0 / 1200);
  const auto seed = cfg.seed();
  SuiteResult R;
  R.derived["taxonomy"] = params_json(P);
  R.columns = {"trial", "source", "steep", "almost_constant", "gradual", "xn3", "decay_applicable", "decay_ok", "norm_applicable", "norm_ok"};
  std::vector<std::vector<std::string>> rows(trials);
  std::vector<int> hard(trials, 0);
  parallel_for(trials, [&](std::uint64_t t) {
    Philox g(derive_seed(seed, {label("census"), t}));
    CVec x;
    std::string source;
    if (t % 2 == 0) {
      x = random_profile_vector(g, static_cast<int>(n));
      source = "profile";
    } else {
      const auto kind = vector_kind_from(static_cast<int>(t / 2));
      x = synthetic_vector(kind, n, P.n3, g.next_u64());
      source = to_string(kind);
    }
    auto V = classify(x, P);
    const bool decay_app = V.steep == SteepClass::None;
    const bool decay_ok = !decay_app || decay_check(x, P).empty();
    auto N = norm_bound_check(x, P);
    hard[t] = !decay_ok || (N.applicable && !N.holds);
    rows[t] = {fi(static_cast<std::int64_t>(t)), source, to_string(V.steep), fb(V.almost_constant), fb(V.gradual), fd(V.xn3),
               fb(decay_app), fb(decay_ok), fb(N.applicable), fb(!N.applicable || N.holds)};
  });
  R.rows = std::move(rows);
  std::map<std::string, std::int64_t> classes;
  std::int64_t gradual = 0, ac = 0;
  for (const auto& r : R.rows) {
    ++classes[r[2]];
    gradual += r[4] == "1";
    ac += r[3] == "1";
  }
  R.summary["steep_classes"] = classes;
  R.summary["almost_constant"] = ac;
  R.summary["gradual"] = gradual;
  R.hard_failures = std::accumulate(hard.begin(), hard.end(), 0);
  R.summary["violations"] = R.hard_failures;
  return R;
}

SuiteResult suite_fuzz(const ExperimentConfig& cfg) {
  const auto trials = static_cast<std::uint64_t>(cfg.integer("trials", 10000));
  const auto seed = cfg.seed();
  std::vector<FuzzFamily> families;
  const auto names = cfg.text("families", "all");
  if (names == "all") {
    families = all_fuzz_families();
  } else {
    std::istringstream is(names);
    std::string s;
    while (std::getline(is, s, ',')) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      try {
        families.push_back(fuzz_family_from(s));
      } catch (const InputError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  SuiteResult R;
  R.columns = {"family", "instance", "applicable", "ok", "failure"};
  json per = json::object();
  for (auto f : families) {
    auto ctx = make_fuzz_context(f, seed);
    std::vector<FuzzOutcome> out(trials);
    parallel_for(trials, [&](std::uint64_t t) { out[t] = fuzz_instance(*ctx, t); });
    std::int64_t app = 0, fail = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      app += out[t].applicable;
      fail += !out[t].failure.empty();
      R.rows.push_back({to_string(f), fi(static_cast<std::int64_t>(t)), fb(out[t].applicable), fb(out[t].failure.empty()), out[t].failure});
    }
    json j;
    j["instances"] = trials;
    j["applicable"] = app;
    j["failures"] = fail;
    per[to_string(f)] = j;
    R.hard_failures += fail;
  }
  R.summary["families"] = per;
  return R;
}

SuiteResult suite_estimators(const ExperimentConfig& cfg) {
  const auto n = cfg.integer("n", 2000);
  const int d = static_cast<int>(cfg.integer("d", 20));
  const auto trials = static_cast<std::uint64_t>(cfg.integer("trials", 100));
  const int u = static_cast<int>(cfg.integer("u", 2));
  const double c = cfg.real("c", 0.25);
  const auto P = params_for(cfg, n, d, 1.0 / 1200);
  const auto seed = cfg.seed();
  const std::int64_t k = pow_int(d, u);
  SuiteResult R;
  R.derived["taxonomy"] = params_json(P);
  R.derived["k"] = k;
  R.derived["c"] = c;
  R.columns = {"trial", "vector", "m", "standard", "exhaustive", "premise", "eta", "eta_rhs", "eta_ok", "C_product", "C_majorization", "identities_ok"};
  struct Out {
    std::vector<std::string> row;
    bool standard = false, eta_violation = false, identity_violation = false;
    double C = 1, Cmaj = 1;
  };
  std::vector<Out> out(trials);
  parallel_for(trials, [&](std::uint64_t t) {
    auto M = sample_auto(static_cast<int>(n), d, derive_seed(seed, {label("matrix"), t}));
    const auto kind = vector_kind_from(static_cast<int>(t));
    auto x = gradual_vector(kind, P, derive_seed(seed, {label("vector"), t}));
    auto D = decompose(k_approx(x, k), d);
    auto Q = project_Q(M, D);
    auto B = compute_bundle(D, Q);
    StandardOptions so;
    so.c_row = c;
    so.c_two_sided = c;
    so.seed = derive_seed(seed, {label("subsets"), t});
    so.order = wtilde_order(B);
    auto S = is_standard(Q, so);
    auto O = offset_bound_check(B, Q, c);
    Out& o = out[t];
    o.standard = S.holds;
    o.eta_violation = S.holds && !O.holds;
    o.C = measured_product_constant(B);
    o.Cmaj = measured_majorization_constant(B, D);
    // Row and column identities, SB <= 1, and w_iq >= wtilde_q / d where Q_iq >= 1.
    bool ok = true;
    for (int i = 0; i < Q.n; ++i) {
      int s = 0;
      for (int q = 0; q < Q.m; ++q) {
        s += Q(i, q);
        if (Q(i, q) >= 1 && B.weight(i, q) < B.wtilde[q] / d * (1 - 1e-12)) ok = false;
      }
      if (s != d || B.SB[i] > 1) ok = false;
    }
    for (int q = 0; q < Q.m; ++q)
      if (Q.column_sum(q) != static_cast<std::int64_t>(d) * D.parts[q].size) ok = false;
    for (const auto& W : B.wsets)
      if (W.below + W.above != n) ok = false;
    o.identity_violation = !ok;
    o.row = {fi(static_cast<std::int64_t>(t)), to_string(kind), fi(Q.m), fb(S.holds), fb(S.exhaustive), fb(O.premise), fd(O.eta), fd(O.rhs),
             fb(O.holds), fd(o.C), fd(o.Cmaj), fb(ok)};
  });
  std::int64_t standard = 0, eta_viol = 0, id_viol = 0;
  double Cmax = 1, Cmaj_max = 1;
  for (auto& o : out) {
    R.rows.push_back(std::move(o.row));
    standard += o.standard;
    eta_viol += o.eta_violation;
    id_viol += o.identity_violation;
    Cmax = std::max(Cmax, o.C);
    Cmaj_max = std::max(Cmaj_max, o.Cmaj);
  }
  R.hard_failures = eta_viol + id_viol;
  R.summary["standard"] = standard;
  R.summary["standard_fraction"] = trials ? static_cast<double>(standard) / trials : 0.0;
  R.summary["eta_violations"] = eta_viol;
  R.summary["identity_violations"] = id_viol;
  R.summary["max_C_product"] = Cmax;
  R.summary["max_C_majorization"] = Cmaj_max;
  return R;
}

std::string outcome_key(const CVec& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    // Values are sums of lattice points, so rounding to 1e-9 is exact enough to group.
    os << (i ? ";" : "") << std::llround(v[i].real() * 1e9) << ":" << std::llround(v[i].imag() * 1e9);
  }
  return os.str();
}

SuiteResult suite_z(const ExperimentConfig& cfg) {
  const auto draws = static_cast<std::uint64_t>(cfg.integer("draws", 100000));
  const auto seed = cfg.seed();
  // n = 3, d = 1, y = (0, 0, 1): a spread part of two levels and a singleton regular part.
  KVector y;
  y.k = 1;
  y.coords = {{0, 0}, {0, 0}, {1, 0}};
  const int d = 1;
  auto D = decompose(y, d);
  auto Q = project_Q(RegularMatrix::identity(3), D);
  auto K = RowMask::all(3);
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> counts;
  std::uint64_t a_attempts = 0, a_kept = 0, z_attempts = 0, z_kept = 0;
  while (a_kept < draws) {
    auto A = sample_multigraph(D, Q, derive_seed(seed, {label("multigraph"), a_attempts++}));
    if (!A.is_simple) continue;
    // Every multigraph meets the exact level counts: each column has degree d.
    CVec Ay;
    for (int i = 0; i < A.n; ++i) {
      if (!K.in_K[i]) continue;
      cplx s = 0;
      for (int w = 0; w < A.d; ++w) s += y.value(A.rows[static_cast<std::size_t>(i) * A.d + w]);
      Ay.push_back(s);
    }
    ++counts[outcome_key(Ay)].first;
    ++a_kept;
  }
  while (z_kept < draws) {
    auto Z = sample_Z(D, Q, K, derive_seed(seed, {label("surrogate"), z_attempts++}));
    if (!Z.exact_count_flag) continue;
    ++counts[outcome_key(Z.Z)].second;
    ++z_kept;
  }
  SuiteResult R;
  R.columns = {"outcome", "multigraph", "surrogate"};
  double tv = 0;
  for (const auto& [k, c] : counts) {
    R.rows.push_back({k, fi(c.first), fi(c.second)});
    tv += std::abs(static_cast<double>(c.first) / draws - static_cast<double>(c.second) / draws);
  }
  tv /= 2;
  R.derived["instance"] = "n=3 d=1 y=(0,0,1) k=1 Q=project(identity)";
  R.derived["parts"] = D.parts.size();
  R.summary["draws"] = draws;
  R.summary["multigraph_attempts"] = a_attempts;
  R.summary["surrogate_attempts"] = z_attempts;
  R.summary["exact_count_rate"] = z_attempts ? static_cast<double>(z_kept) / z_attempts : 0.0;
  R.summary["tv"] = tv;
  return R;
}

SuiteResult suite_cover(const ExperimentConfig& cfg) {
  const auto n = cfg.integer("n", 1000000);
  const int d = static_cast<int>(cfg.integer("d", 10));
  const int v = static_cast<int>(cfg.integer("v", 8));
  const auto trials = static_cast<std::uint64_t>(cfg.integer("trials", 10000));
  const auto P = params_for(cfg, n, d, 1.0 / 1200);
  CoverConstants C;
  C.cK = cfg.real("cK", C.cK);
  C.cP = cfg.real("cP", C.cP);
  const auto seed = cfg.seed();
  const std::int64_t k4 = pow_int(d, 4);
  SuiteResult R;
  R.derived["taxonomy"] = params_json(P);
  R.derived["cK"] = C.cK;
  R.derived["cP"] = C.cP;
  R.derived["k4"] = k4;
  R.derived["separation_k_ok"] = static_cast<double>(k4) >= 5 / P.theta0;
  R.derived["tall_spread_k_ok"] = static_cast<double>(k4) >= 2 * d / P.theta0;
  R.derived["Pv_height_threshold"] = C.cP * std::exp2(C.cP * (v - 4) * P.a3) * P.a3;
  R.columns = {"trial", "vector", "tries", "branch", "u", "total", "threshold", "separation", "gap", "tall_total", "spread_total",
               "tall_or_spread", "refinement", "ok"};
  struct Out {
    std::vector<std::string> row;
    bool cover = false, sep = false, ts = false, refine = false;
  };
  std::vector<Out> out(trials);
  parallel_for(trials, [&](std::uint64_t t) {
    const auto kind = vector_kind_from(static_cast<int>(t));
    int tries = 0;
    auto x = gradual_vector(kind, P, derive_seed(seed, {label("vector"), t}), &tries);
    auto y4 = k_approx(x, k4);
    auto D4 = decompose(y4, d);
    Out& o = out[t];
    std::string branch = "none", u = "", total = "", threshold = "";
    try {
      auto W = cover_witness(x, v, C, P, false, &D4);
      o.cover = true;
      branch = W.branch == CoverWitness::Branch::Ku ? "K" : "P";
      u = fi(W.u);
      total = fi(W.total);
      threshold = fd(W.threshold);
    } catch (const CoverFailure&) {
    }
    auto S = separated_sets(y4, P.n3, P.theta0 / 2);
    o.sep = S.found;
    auto T = tall_or_spread(D4, P.n3);
    o.ts = T.holds();
    // Refinement trichotomy at u = 4; membership of K_4 settles it without the count.
    std::string refine;
    if (ku_from_decomposition(D4, 4, C.cK, P).member) {
      o.refine = true;
      refine = "K4";
    } else {
      auto RD = refinement_dichotomy(x, 4, C.cK, P);
      o.refine = RD.holds();
      refine = RD.in_Ku1 ? "K5" : (RD.count_ok ? "count" : "none");
    }
    const bool ok = o.cover && o.sep && o.ts && o.refine;
    o.row = {fi(static_cast<std::int64_t>(t)), to_string(kind), fi(tries), branch, u, total, threshold, fb(S.found), fd(S.gap),
             fi(T.tall_total), fi(T.spread_total), fb(T.holds()), refine, fb(ok)};
  });
  std::int64_t cover_fail = 0, sep_fail = 0, ts_fail = 0, ref_fail = 0;
  std::map<std::string, std::int64_t> branches;
  for (auto& o : out) {
    cover_fail += !o.cover;
    sep_fail += !o.sep;
    ts_fail += !o.ts;
    ref_fail += !o.refine;
    ++branches[o.row[3] + o.row[4]];
    R.rows.push_back(std::move(o.row));
  }
  R.hard_failures = cover_fail + sep_fail + ts_fail + ref_fail;
  R.summary["cover_failures"] = cover_fail;
  R.summary["separation_failures"] = sep_fail;
  R.summary["tall_or_spread_failures"] = ts_fail;
  R.summary["refinement_failures"] = ref_fail;
  R.summary["branches"] = branches;
  return R;
}

SuiteResult suite_deloc(const ExperimentConfig& cfg) {
  const auto n = cfg.integer("n", 2000);
  const int d = static_cast<int>(cfg.integer("d", 20));
  const auto trials = static_cast<std::uint64_t>(cfg.integer("trials", 20));
  const auto P = params_for(cfg, n, d, 1.0 / 20);
  const double ln = std::log(static_cast<double>(n)), ld = std::log(static_cast<double>(d));
  const double rho_rel = std::pow(static_cast<double>(n), -cfg.real("rho_exp", 0.3));
  const double delta = cfg.real("delta", 8 * ld * ld / ln);
  const double eps = cfg.real("eps", 0.3), factor = cfg.real("norm_factor", 3.0);
  const auto seed = cfg.seed();
  SuiteResult R;
  R.derived["taxonomy"] = params_json(P);
  R.derived["rho_rel"] = rho_rel;
  R.derived["delta"] = delta;
  R.columns = {"matrix", "events_ok", "eigenvector", "lambda_re", "lambda_im", "residual", "certified", "multiplicity", "branch",
               "mass_lower", "mass_upper", "violation"};
  struct Out {
    DelocReport rep;
    bool events = false;
  };
  std::vector<Out> out(trials);
  parallel_for(trials, [&](std::uint64_t t) {
    auto M = sample_auto(static_cast<int>(n), d, derive_seed(seed, {label("matrix"), t}));
    const bool omega = check_omega(M, 1, eps).holds && check_omega(M, 2, eps).holds;
    const bool norm = deflated_norm(M, 1e-6, 5000, derive_seed(seed, {label("power"), t})).value <= factor * std::sqrt(static_cast<double>(d));
    out[t].events = omega && norm;
    out[t].rep = delocalization_census(M, rho_rel, delta, P);
  });
  std::vector<double> masses;
  std::int64_t neither_on_events = 0, matrices_ok = 0, uncertified = 0, multiple = 0, vectors = 0;
  json per = json::array();
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto& rep = out[t].rep;
    for (std::size_t e = 0; e < rep.rows.size(); ++e) {
      const auto& r = rep.rows[e];
      const auto& V = r.verdict;
      std::string branch = V.gradual_many_levels ? (V.very_steep ? "both" : "gradual") : (V.very_steep ? "very-steep" : (V.ball_undecided ? "undecided" : "neither"));
      R.rows.push_back({fi(static_cast<std::int64_t>(t)), fb(out[t].events), fi(static_cast<std::int64_t>(e)), fd(r.lambda.real()), fd(r.lambda.imag()),
                        fd(r.residual), fb(r.certified), fi(r.multiplicity), branch, fd(r.mass_lower), fd(r.mass_upper), fb(r.ball_violation)});
      masses.push_back(r.mass_lower);
    }
    if (out[t].events) neither_on_events += rep.neither;
    matrices_ok += rep.violation_fraction <= 1.0 / static_cast<double>(n);
    uncertified += rep.uncertified;
    multiple += rep.multiple;
    vectors += static_cast<std::int64_t>(rep.rows.size());
    json m;
    m["events_ok"] = out[t].events;
    m["vectors"] = rep.rows.size();
    m["gradual"] = rep.gradual;
    m["very_steep"] = rep.very_steep;
    m["neither"] = rep.neither;
    m["undecided"] = rep.undecided;
    m["violations"] = rep.violations;
    m["violation_fraction"] = rep.violation_fraction;
    m["median_mass_lower"] = rep.median_mass_lower;
    per.push_back(m);
  }
  double median = 0;
  if (!masses.empty()) {
    std::sort(masses.begin(), masses.end());
    const auto s = masses.size();
    median = s % 2 ? masses[s / 2] : 0.5 * (masses[s / 2 - 1] + masses[s / 2]);
  }
  R.summary["vectors"] = vectors;
  R.summary["median_mass"] = median;
  R.summary["neither_on_event_matrices"] = neither_on_events;
  R.summary["matrices_within_violation_bound"] = matrices_ok;
  R.summary["fraction_within_violation_bound"] = trials ? static_cast<double>(matrices_ok) / trials : 0.0;
  R.summary["uncertified"] = uncertified;
  R.summary["multiple_eigenvalues"] = multiple;
  R.summary["matrices"] = per;
  return R;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  const auto& allowed = allowed_keys(cfg.kind);
  for (const auto& [k, v] : cfg.values)
    if (k != "kind" && k != "seed" && k != "out" && !allowed.count(k))
      throw ConfigError("config: key '" + k + "' is not used by kind " + to_string(cfg.kind));
  auto positive = [&](const char* key, std::int64_t fallback) {
    if (cfg.integer(key, fallback) < 1) throw ConfigError(std::string("config: ") + key + " must be positive");
  };
  auto nonneg = [&](const char* key) {
    if (cfg.integer(key, 0) < 0) throw ConfigError(std::string("config: ") + key + " must be nonnegative");
  };
  auto unit = [&](const char* key, double fallback) {
    const double v = cfg.real(key, fallback);
    if (!(v > 0 && v < 1)) throw ConfigError(std::string("config: ") + key + " must lie in (0,1)");
  };
  cfg.integer("seed", 1);
  nonneg("trials");
  switch (cfg.kind) {
    case ExperimentKind::Uniformity:
      if (cfg.integer("d", 2) < 1 || cfg.integer("d", 2) > cfg.integer("n", 4) || cfg.integer("n", 4) > 6)
        throw ConfigError("config: uniformity needs 1 <= d <= n <= 6");
      nonneg("draws");
      nonneg("mcmc_draws");
      nonneg("mcmc_proposals");
      nonneg("multigraph_draws");
      break;
    case ExperimentKind::Expansion:
    case ExperimentKind::DeflatedNorm:
      positive("n", 2000);
      positive("d", 20);
      if (cfg.integer("d", 20) > cfg.integer("n", 2000)) throw ConfigError("config: need d <= n");
      if (cfg.kind == ExperimentKind::Expansion) unit("eps", 0.3);
      if (cfg.integer("removed", 0) < 0 || 4 * cfg.integer("removed", 0) > cfg.integer("n", 2000))
        throw ConfigError("config: removed must lie in [0, n/4]");
      if (cfg.has("z") && cfg.text("z", "") != "default") cfg.complexes("z", {});
      break;
    case ExperimentKind::TaxonomyCensus:
      params_for(cfg, cfg.integer("n", 5000), static_cast<int>(cfg.integer("d", 10)), 1.0 / 1200);
      break;
    case ExperimentKind::EllFuzz:
      if (cfg.text("families", "all") != "all") {
        std::istringstream is(cfg.text("families", ""));
        std::string s;
        while (std::getline(is, s, ',')) {
          s.erase(0, s.find_first_not_of(' '));
          s.erase(s.find_last_not_of(' ') + 1);
          try {
            fuzz_family_from(s);
          } catch (const InputError& e) {
            throw ConfigError(e.what());
          }
        }
      }
      break;
    case ExperimentKind::EstimatorIdentities: {
      const auto P = params_for(cfg, cfg.integer("n", 2000), static_cast<int>(cfg.integer("d", 20)), 1.0 / 1200);
      if (cfg.integer("u", 2) < 1) throw ConfigError("config: u must be positive");
      try {
        pow_int(P.d, static_cast<int>(cfg.integer("u", 2)));
      } catch (const InputError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      unit("c", 0.25);
      break;
    }
    case ExperimentKind::ZEquivalence:
      nonneg("draws");
      break;
    case ExperimentKind::Cover: {
      const auto P = params_for(cfg, cfg.integer("n", 1000000), static_cast<int>(cfg.integer("d", 10)), 1.0 / 1200);
      const auto v = cfg.integer("v", 8);
      if (v < 5) throw ConfigError("config: v must be at least 5");
      try {
        pow_int(P.d, static_cast<int>(v));
      } catch (const InputError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      if (cfg.integer("smoke", 0) == 0 && P.n < 480000) throw ConfigError("config: the cover suite needs n >= 480000 (set smoke = 1 for small runs)");
      break;
    }
    case ExperimentKind::Delocalization:
      params_for(cfg, cfg.integer("n", 2000), static_cast<int>(cfg.integer("d", 20)), 1.0 / 20);
      unit("eps", 0.3);
      if (cfg.real("rho_exp", 0.3) <= 0) throw ConfigError("config: rho_exp must be positive");
      if (cfg.has("delta") && cfg.real("delta", 1) <= 0) throw ConfigError("config: delta must be positive");
      break;
  }
}

SuiteResult run_suite(const ExperimentConfig& cfg) {
  validate_config(cfg);
  switch (cfg.kind) {
    case ExperimentKind::Uniformity: return suite_uniformity(cfg);
    case ExperimentKind::Expansion: return suite_norms(cfg, true);
    case ExperimentKind::DeflatedNorm: return suite_norms(cfg, false);
    case ExperimentKind::TaxonomyCensus: return suite_taxonomy(cfg);
    case ExperimentKind::EllFuzz: return suite_fuzz(cfg);
    case ExperimentKind::EstimatorIdentities: return suite_estimators(cfg);
    case ExperimentKind::ZEquivalence: return suite_z(cfg);
    case ExperimentKind::Cover: return suite_cover(cfg);
    case ExperimentKind::Delocalization: return suite_deloc(cfg);
  }
  return {};
}

}  // namespace rrd
