#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrd/common.hpp"

namespace rrd {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind {
  Uniformity,
  Expansion,
  DeflatedNorm,
  TaxonomyCensus,
  EllFuzz,
  EstimatorIdentities,
  ZEquivalence,
  Cover,
  Delocalization,
};
std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from(const std::string& s);

// Flat key = value configuration. Keys not used by the kind are rejected.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::EllFuzz;
  std::map<std::string, std::string> values;  // every key as written, kind included

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  double real(const std::string& key, double fallback) const;
  std::vector<std::int64_t> integers(const std::string& key, const std::vector<std::int64_t>& fallback) const;
  std::vector<cplx> complexes(const std::string& key, const std::vector<cplx>& fallback) const;
  std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed", 1)); }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Checks keys and parameter windows; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

struct SuiteResult {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // one per trial
  nlohmann::ordered_json summary;
  nlohmann::ordered_json derived;  // derived constants for the manifest
  std::int64_t hard_failures = 0;
};

// Runs the experiment in memory.
SuiteResult run_suite(const ExperimentConfig& cfg);

// Runs the experiment and writes manifest.json, trials.csv and summary.json
// into the configured output directory. Returns the process exit status.
int run(const ExperimentConfig& cfg, const std::string& config_bytes);

// Worker count from RRD_WORKERS (default 1).
int worker_count();
// Calls body(t) for t in [0, count) on worker_count() threads.
void parallel_for(std::uint64_t count, const std::function<void(std::uint64_t)>& body);

std::string format_double(double v);
std::string csv_escape(const std::string& s);
void write_csv(std::ostream& os, const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows);

constexpr const char* kReportSchema = "rrd-report/1";
constexpr const char* kLibraryVersion = "1.0.0";

}  // namespace rrd
