#include "rrd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "rrd/rng.hpp"

namespace rrd {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::Uniformity, "uniformity"},
      {ExperimentKind::Expansion, "expansion"},
      {ExperimentKind::DeflatedNorm, "deflated-norm"},
      {ExperimentKind::TaxonomyCensus, "taxonomy-census"},
      {ExperimentKind::EllFuzz, "ell-fuzz"},
      {ExperimentKind::EstimatorIdentities, "estimator-identities"},
      {ExperimentKind::ZEquivalence, "z-equivalence"},
      {ExperimentKind::Cover, "cover"},
      {ExperimentKind::Delocalization, "delocalization"},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && p == v.data() + v.size()) return out;
  // Accept integral values written in scientific notation (1e6).
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size() && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  } catch (const std::exception&) {
  }
  throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
  // a/b fractions are accepted for constants such as a3 = 1/1200.
  const auto slash = v.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string a = trim(v.substr(0, slash)), b = trim(v.substr(slash + 1));
      double num = std::stod(a, &used);
      if (used != a.size()) throw ConfigError("");
      double den = std::stod(b, &used);
      if (used != b.size() || den == 0) throw ConfigError("");
      return num / den;
    }
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kind_names())
    if (kind == k) return name;
  return "?";
}

ExperimentKind experiment_kind_from(const std::string& s) {
  for (const auto& [kind, name] : kind_names())
    if (name == s) return kind;
  throw ConfigError("config: unknown experiment kind '" + s + "'");
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::int64_t ExperimentConfig::integer(const std::string& key, std::int64_t fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : parse_int(key, it->second);
}

double ExperimentConfig::real(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : parse_real(key, it->second);
}

std::vector<std::int64_t> ExperimentConfig::integers(const std::string& key, const std::vector<std::int64_t>& fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& s : split_list(it->second)) out.push_back(parse_int(key, s));
  return out;
}

// Complex values are written re:im, a plain number is real.
std::vector<cplx> ExperimentConfig::complexes(const std::string& key, const std::vector<cplx>& fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<cplx> out;
  for (const auto& s : split_list(it->second)) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      out.emplace_back(parse_real(key, s), 0.0);
    else
      out.emplace_back(parse_real(key, trim(s.substr(0, colon))), parse_real(key, trim(s.substr(colon + 1))));
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (cfg.values.count(key)) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key " + key);
    cfg.values[key] = value;
  }
  if (!cfg.has("kind")) throw ConfigError("config: missing kind");
  cfg.kind = experiment_kind_from(cfg.values["kind"]);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

int worker_count() {
  const char* v = std::getenv("RRD_WORKERS");
  if (!v || !*v) return 1;
  const int w = std::atoi(v);
  return std::clamp(w, 1, 256);
}

void parallel_for(std::uint64_t count, const std::function<void(std::uint64_t)>& body) {
  const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(worker_count()), std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const auto t = next.fetch_add(1);
        if (t >= count) return;
        try {
          body(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(std::ostream& os, const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows) {
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << csv_escape(columns[c]);
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << csv_escape(r[c]);
    os << "\n";
  }
}

int run(const ExperimentConfig& cfg, const std::string& config_bytes) {
  validate_config(cfg);
  const std::filesystem::path out = cfg.text("out", "out");
  std::filesystem::create_directories(out);
  const auto start = std::chrono::system_clock::now();
  SuiteResult R = run_suite(cfg);

  nlohmann::ordered_json manifest;
  manifest["schema"] = kReportSchema;
  manifest["library_version"] = kLibraryVersion;
  manifest["rng"] = Philox::kName;
  manifest["kind"] = to_string(cfg.kind);
  manifest["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.values) manifest["config"][k] = v;
  manifest["config_bytes"] = config_bytes.size();
  manifest["derived"] = R.derived;
  manifest["workers"] = worker_count();
  const std::time_t t = std::chrono::system_clock::to_time_t(start);
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  manifest["timestamp"] = ts.str();
  {
    std::ofstream f(out / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
  }
  {
    std::ofstream f(out / "trials.csv", std::ios::binary);
    write_csv(f, R.columns, R.rows);
  }
  nlohmann::ordered_json summary;
  summary["schema"] = kReportSchema;
  summary["kind"] = to_string(cfg.kind);
  summary["trials"] = R.rows.size();
  summary["hard_failures"] = R.hard_failures;
  summary["result"] = R.summary;
  {
    std::ofstream f(out / "summary.json", std::ios::binary);
    f << summary.dump(2) << "\n";
  }
  return R.hard_failures == 0 ? 0 : 1;
}

}  // namespace rrd
