#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrd/ell_decomp.hpp"
#include "rrd/graph_core.hpp"
#include "rrd/harness.hpp"
#include "rrd/sampler.hpp"

namespace {

// One coordinate per line: "re" or "re,im". Blank lines and # comments are skipped.
rrd::CVec read_vector_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rrd::InputError("cannot open " + path);
  rrd::CVec x;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double re = 0, im = 0;
    if (!(is >> re)) throw rrd::InputError(path + ":" + std::to_string(lineno) + ": expected a number");
    if (!(is >> im)) im = 0;
    std::string rest;
    if (is >> rest) throw rrd::InputError(path + ":" + std::to_string(lineno) + ": too many fields");
    if (!std::isfinite(re) || !std::isfinite(im)) throw rrd::InputError(path + ":" + std::to_string(lineno) + ": non-finite value");
    x.emplace_back(re, im);
  }
  return x;
}

nlohmann::ordered_json decomposition_json(const rrd::EllDecomposition& D) {
  using json = nlohmann::ordered_json;
  json out;
  out["n"] = D.n;
  out["k"] = D.k;
  out["d"] = D.d;
  json parts = json::array();
  for (std::size_t q = 0; q < D.parts.size(); ++q) {
    const auto& P = D.parts[q];
    json p;
    p["order"] = P.order;
    p["kind"] = P.kind == rrd::PartKind::Spread ? "spread" : "regular";
    p["height"] = P.height();
    p["size"] = P.size;
    json idx = json::array();
    for (int i : D.part_indices(static_cast<int>(q))) idx.push_back(i + 1);
    p["indices"] = idx;
    json levels = json::array();
    for (int l : P.levels) {
      json L;
      L["value"] = {D.levels[l].value.re, D.levels[l].value.im};
      json li = json::array();
      for (int i : D.indices(l)) li.push_back(i + 1);
      L["indices"] = li;
      levels.push_back(L);
    }
    p["levels"] = levels;
    parts.push_back(p);
  }
  out["parts"] = parts;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random regular digraph experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment and write its reports");
  run->add_option("config", config_path, "Configuration file")->required();
  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("config", config_path, "Configuration file")->required();

  int n = 0, d = 0;
  auto* enumerate = app.add_subcommand("enumerate", "List every n x n 0/1 matrix with row and column sums d");
  enumerate->add_option("n", n)->required()->check(CLI::Range(1, 8));
  enumerate->add_option("d", d)->required()->check(CLI::Range(0, 8));

  std::string vector_path;
  std::int64_t k = 1;
  int dd = 1;
  auto* decompose = app.add_subcommand("decompose", "Decompose the k-approximation of a vector");
  decompose->add_option("vector", vector_path, "Vector CSV")->required();
  decompose->add_option("k", k)->required()->check(CLI::PositiveNumber);
  decompose->add_option("d", dd)->required()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *validate) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw rrd::ConfigError("config: cannot open " + config_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      const auto cfg = rrd::parse_config(ss.str());
      if (*validate) {
        rrd::validate_config(cfg);
        std::cout << "ok " << rrd::to_string(cfg.kind) << "\n";
        return 0;
      }
      const int status = rrd::run(cfg, ss.str());
      std::cout << (status == 0 ? "ok" : "hard failures") << " " << cfg.text("out", "out") << "\n";
      return status;
    }
    if (*enumerate) {
      if (d > n) throw rrd::InputError("need d <= n");
      const auto all = rrd::enumerate_all(n, d);
      std::cout << all.size() << "\n";
      for (const auto& M : all) {
        std::cout << "\n";
        rrd::write_matrix(std::cout, M);
      }
      return 0;
    }
    if (*decompose) {
      const auto y = rrd::k_approx(read_vector_csv(vector_path), k);
      std::cout << decomposition_json(rrd::decompose(y, dd)).dump(2) << "\n";
      return 0;
    }
  } catch (const rrd::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
