#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rrd/graph_core.hpp"

namespace rrd {

struct EventReport {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  bool exhaustive = true;
  std::uint64_t checked = 0;  // number of sets examined
  bool holds = true;
  std::vector<int> witness;   // violating J (0-based), empty when holds
  double worst_ratio = 0;     // largest observed value / allowed value
};

// |supp R_i cap J| for every row i.
std::vector<int> row_hits(const RegularMatrix& M, const IndexSet& J);

struct OmegaOptions {
  int k_exhaustive = 2;
  std::uint64_t samples = 2000;
  std::uint64_t seed = 1;
};
EventReport check_omega(const RegularMatrix& M, int k, double eps, const OmegaOptions& opt = {});

double alpha_k(int n, int d, std::int64_t k);
double beta_k(int n, int d, std::int64_t k);

struct RowHitOptions {
  std::vector<std::int64_t> sizes;  // |J| grid; defaults to a geometric grid from l0 to n
  std::uint64_t samples_per_size = 20;
  std::uint64_t seed = 1;
};
// Bad rows (fewer than alpha_|J| hits) must number at most beta_|J|.
EventReport check_row_hits(const RegularMatrix& M, std::int64_t l0, const RowHitOptions& opt = {});

// For |J| >= n/sqrt(d): rows with fewer than c d|J|/n hits number at most n/sqrt(d).
bool low_hit_rows_ok(const RegularMatrix& M, const IndexSet& J, double c, std::int64_t* bad = nullptr);
// Rows with >= c d|J|/n hits in J and >= c d|J^c|/n in J^c number at least c min(d|J|, d|J^c|, n).
bool two_sided_rows_ok(const RegularMatrix& M, const IndexSet& J, double c, std::int64_t* good = nullptr);
EventReport check_low_hits(const RegularMatrix& M, double c, const RowHitOptions& opt = {});
EventReport check_two_sided(const RegularMatrix& M, double c, const RowHitOptions& opt = {});

struct LeftRightSplit {
  IndexSet Il, Ir;
  std::int64_t union_support = 0;  // |S_{Jl cup Jr}|
  bool hypothesis = false;         // |S_J| >= (1 - eps) d |J|
  double left_bound = 0;           // (1 - 2 eps p) d |Jl| with p = |J| / |Jl|
  bool conclusion = true;          // |Il| >= left_bound
};
LeftRightSplit left_right_split(const RegularMatrix& M, const IndexSet& Jl, const IndexSet& Jr, double eps = 0.0);

struct DeflatedNorm {
  double value = 0;
  double lower = 0;  // sqrt of the Rayleigh quotient, a true lower bound
  double upper = 0;  // sqrt(mu + residual) of the last iterate
  int iterations = 0;
  bool converged = false;
};
// Operator norm of M - (d/n) 1 1^t by power iteration on B^t B.
DeflatedNorm deflated_norm(const RegularMatrix& M, double rel_tol = 1e-6, int max_iter = 5000, std::uint64_t seed = 1);

struct Frequency {
  std::uint64_t hits = 0, trials = 0;
  double p = 0, lo = 0, hi = 0;  // Wilson 95% interval
};
Frequency wilson(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054);
// Runs trial(derived_seed) for t = 0..trials-1 and counts successes.
Frequency estimate_frequency(std::uint64_t trials, std::uint64_t seed, const std::function<bool(std::uint64_t)>& trial);

}  // namespace rrd
