#pragma once

#include <cstdint>
#include <vector>

#include "rrd/ell_decomp.hpp"
#include "rrd/graph_core.hpp"
#include "rrd/qmatrix.hpp"
#include "rrd/rng.hpp"

namespace rrd {

// Bipartite multigraph adjacency: row i lists its d column endpoints
// (sorted, repeats are multi-edges).
struct MultiGraphAdj {
  int n = 0;
  int d = 0;
  std::vector<int> rows;
  bool is_simple = true;

  int multiplicity(int i, int j) const;
  RegularMatrix to_matrix() const;  // requires is_simple
};

struct SurrogateDraw {
  CVec Z;  // one entry per row of K, increasing row index
  bool exact_count_flag = false;
};

struct RejectionStats {
  std::uint64_t attempts = 0;
};

RegularMatrix sample_uniform(int n, int d, std::uint64_t seed, std::uint64_t max_attempts = 1000000,
                             RejectionStats* stats = nullptr);
// Runs `steps` uniform pair-of-edges switch proposals; invalid ones leave the state unchanged.
RegularMatrix sample_mcmc(const RegularMatrix& start, std::uint64_t steps, std::uint64_t seed,
                          std::uint64_t* accepted = nullptr);
std::vector<RegularMatrix> enumerate_all(int n, int d);
MultiGraphAdj sample_multigraph(const EllDecomposition& D, const QMatrix& Q, std::uint64_t seed);
SurrogateDraw sample_Z(const EllDecomposition& D, const QMatrix& Q, const RowMask& K, std::uint64_t seed);

// Default burn-in for the switching chain.
inline std::uint64_t default_burn_in(int n, int d) { return 10ull * static_cast<std::uint64_t>(n) * d; }

// Uniform sample with the rejection sampler when feasible, otherwise the
// switching chain run from a circulant start for the default burn-in.
RegularMatrix sample_auto(int n, int d, std::uint64_t seed, bool* used_mcmc = nullptr);

}  // namespace rrd
