#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rrd/ell_decomp.hpp"
#include "rrd/graph_core.hpp"
#include "rrd/harness.hpp"
#include "rrd/rng.hpp"
#include "rrd/sampler.hpp"
#include "rrd/spectral.hpp"

using namespace rrd;
using json = nlohmann::ordered_json;

namespace {

std::filesystem::path config_dir = RRD_CONFIG_DIR;
std::filesystem::path report_dir = "acceptance_out";

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Runs a shipped config in memory and keeps its summary next to the binary.
SuiteResult run_config(const std::string& name) {
  auto cfg = load_config((config_dir / (name + ".cfg")).string());
  validate_config(cfg);
  auto R = run_suite(cfg);
  std::filesystem::create_directories(report_dir);
  json out;
  out["config"] = name;
  out["hard_failures"] = R.hard_failures;
  out["derived"] = R.derived;
  out["result"] = R.summary;
  std::ofstream(report_dir / (name + ".json")) << out.dump(2) << "\n";
  return R;
}

Verdict golden_decomposition() {
  // (1/2, 1/3, 1/2, 1/6, 1/2, 1/3, -1/3) at k = 6.
  const KVector y{6, {{3, 0}, {2, 0}, {3, 0}, {1, 0}, {3, 0}, {2, 0}, {-2, 0}}};
  const auto t0 = std::chrono::steady_clock::now();
  auto D = decompose(y, 2);
  const double ms = seconds_since(t0) * 1e3;
  struct Want {
    PartKind kind;
    int height;
    IndexSet indices;
  };
  const std::vector<Want> want{{PartKind::Spread, 3, {0, 3, 6}}, {PartKind::Regular, 1, {1}}, {PartKind::Regular, 2, {2, 4, 5}}};
  bool exact = D.parts.size() == want.size();
  for (std::size_t q = 0; exact && q < want.size(); ++q)
    exact = D.parts[q].kind == want[q].kind && D.parts[q].height() == want[q].height && D.part_indices(static_cast<int>(q)) == want[q].indices;
  return {exact && ms < 1.0, "parts=" + std::to_string(D.parts.size()) + " exact=" + (exact ? "yes" : "no") + " time_ms=" + fmt(ms)};
}

Verdict sampler_uniformity() {
  const auto t0 = std::chrono::steady_clock::now();
  auto R = run_config("uniformity");
  const double s = seconds_since(t0);
  const auto& S = R.summary;
  const double prej = S["rejection"]["p_value"], pmc = S["mcmc"]["p_value"], acc = S["mcmc"]["mean_accepted_per_draw"];
  const bool ok = S["states"] == 90 && prej > 1e-3 && pmc > 1e-3 && acc >= 1000 && s <= 120;
  return {ok, "states=" + S["states"].dump() + " p_rejection=" + fmt(prej) + " p_mcmc=" + fmt(pmc) + " accepted_per_draw=" + fmt(acc) +
                  " time_s=" + fmt(s)};
}

Verdict invariant_fuzz() {
  const auto t0 = std::chrono::steady_clock::now();
  auto R = run_config("ell_fuzz");
  const double s = seconds_since(t0);
  std::int64_t instances = 0, families = 0;
  for (const auto& [name, f] : R.summary["families"].items()) {
    ++families;
    instances += f["instances"].get<std::int64_t>();
  }
  const bool ok = R.hard_failures == 0 && families == 10 && instances == 10 * 10000 && s <= 300;
  return {ok, "families=" + std::to_string(families) + " instances=" + std::to_string(instances) + " failures=" + std::to_string(R.hard_failures) +
                  " time_s=" + fmt(s)};
}

Verdict z_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  auto R = run_config("z_equivalence");
  const double s = seconds_since(t0);
  const double tv = R.summary["tv"];
  const bool ok = R.summary["draws"] == 100000 && tv < 0.05 && s <= 180;
  return {ok, "draws=" + R.summary["draws"].dump() + " tv=" + fmt(tv) + " time_s=" + fmt(s)};
}

Verdict conditional_uniformity() {
  auto R = run_config("uniformity");
  const auto& G = R.summary["multigraph"];
  const double tv = G["tv"];
  const bool ok = G["simple_draws"] == 100000 && tv < 0.05;
  return {ok, "simple_draws=" + G["simple_draws"].dump() + " tv=" + fmt(tv) + " p_simple=" + fmt(G["p_simple"]) + " p_simple_exact=" +
                  fmt(G["p_simple_exact"])};
}

Verdict estimator_inequalities() {
  auto R = run_config("estimator_identities");
  const auto& S = R.summary;
  const double C = S["max_C_product"];
  const bool ok = S["eta_violations"] == 0 && S["identity_violations"] == 0 && S["standard"].get<std::int64_t>() > 0 && C <= 16;
  return {ok, "standard=" + S["standard"].dump() + " eta_violations=" + S["eta_violations"].dump() + " identity_violations=" +
                  S["identity_violations"].dump() + " max_C=" + fmt(C)};
}

Verdict cover_theorem() {
  const auto t0 = std::chrono::steady_clock::now();
  auto R = run_config("cover");
  const double s = seconds_since(t0);
  const auto& S = R.summary;
  const bool ok = R.rows.size() == 10000 && R.hard_failures == 0 && s <= 1200;
  return {ok, "vectors=" + std::to_string(R.rows.size()) + " cover_failures=" + S["cover_failures"].dump() + " lemma_failures=" +
                  std::to_string(S["separation_failures"].get<std::int64_t>() + S["tall_or_spread_failures"].get<std::int64_t>() +
                                 S["refinement_failures"].get<std::int64_t>()) +
                  " time_s=" + fmt(s)};
}

Verdict expansion() {
  const auto t0 = std::chrono::steady_clock::now();
  auto R = run_config("expansion");
  const double s = seconds_since(t0);
  const auto& S = R.summary;
  const double omega = S["omega_pass_fraction"], norm = S["norm_pass_fraction"];
  const bool ok = R.rows.size() == 50 && omega == 1.0 && norm >= 0.95 && S["circulant_exceeds_bound"] == true && s <= 900;
  return {ok, "matrices=" + std::to_string(R.rows.size()) + " omega_pass=" + fmt(omega) + " norm_pass=" + fmt(norm) + " circulant_norm=" +
                  fmt(S["circulant_norm"]) + " bound=" + fmt(S["norm_bound"]) + " time_s=" + fmt(s)};
}

Verdict delocalization() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> medians;
  std::int64_t neither = 0, within = 0, matrices = 0;
  std::string per_n;
  for (const char* n : {"500", "1000", "2000"}) {
    auto R = run_config(std::string("delocalization_") + n);
    const auto& S = R.summary;
    medians.push_back(S["median_mass"]);
    neither += S["neither_on_event_matrices"].get<std::int64_t>();
    within += S["matrices_within_violation_bound"].get<std::int64_t>();
    matrices += static_cast<std::int64_t>(S["matrices"].size());
    per_n += std::string(" n") + n + "{median=" + fmt(medians.back()) + " within=" + S["matrices_within_violation_bound"].dump() + "/" +
             std::to_string(S["matrices"].size()) + "}";
  }
  const double s = seconds_since(t0);
  const bool decreasing = medians[0] > medians[1] && medians[1] > medians[2];
  const double frac = matrices ? static_cast<double>(within) / matrices : 0.0;
  const bool ok = matrices == 60 && neither == 0 && decreasing && frac >= 0.9 && s <= 3600;
  return {ok, "neither=" + std::to_string(neither) + " median_decreasing=" + (decreasing ? "yes" : "no") + " within_fraction=" + fmt(frac) +
                  per_n + " time_s=" + fmt(s)};
}

Verdict kernel_probe() {
  double worst_sigma = 0, worst_overlap = 1;
  int probes = 0;
  for (int n : {5, 50, 500, 2000}) {
    auto M = sample_uniform(n, 1, derive_seed(10, {static_cast<std::uint64_t>(n)}));
    Philox g(derive_seed(11, {static_cast<std::uint64_t>(n)}));
    std::set<int> rows;
    if (n <= 50)
      for (int j = 0; j < n; ++j) rows.insert(j);
    else
      while (rows.size() < 5) rows.insert(static_cast<int>(g.uniform_int(static_cast<std::uint64_t>(n))));
    for (int j : rows) {
      auto S = smallest_sv_probe(M, 0.0, RowMask::without(n, {j}));
      worst_sigma = std::max(worst_sigma, S.sigma_min);
      worst_overlap = std::min(worst_overlap, std::abs(S.x[M.row(j)[0]]));
      ++probes;
    }
  }
  const bool ok = worst_sigma < 1e-8 && worst_overlap > 1 - 1e-6;
  return {ok, "probes=" + std::to_string(probes) + " max_sigma=" + fmt(worst_sigma) + " min_overlap=" + fmt(worst_overlap)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string configs = config_dir.string(), reports = report_dir.string();
  app.add_option("--only", only, "criteria to run (default all)")->delimiter(',');
  app.add_option("--configs", configs, "directory of shipped configs");
  app.add_option("--reports", reports, "directory for per-suite summaries");
  CLI11_PARSE(app, argc, argv);
  config_dir = configs;
  report_dir = reports;

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"golden-decomposition", golden_decomposition},
      {"sampler-uniformity", sampler_uniformity},
      {"invariant-fuzz", invariant_fuzz},
      {"z-model-equivalence", z_equivalence},
      {"conditional-uniformity", conditional_uniformity},
      {"estimator-inequalities", estimator_inequalities},
      {"cover-theorem", cover_theorem},
      {"expansion", expansion},
      {"delocalization-trend", delocalization},
      {"kernel-probe", kernel_probe},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    try {
      v = criteria[c].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[c].first << " " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
