#pragma once

#include <cstdint>
#include <vector>

#include "rrd/graph_core.hpp"
#include "rrd/taxonomy.hpp"

namespace rrd {

struct SpectralProbe {
  double sigma_min = 0;  // ||(M - zI)^K x|| for the returned unit x
  CVec x;
  double residual = 0;
  int iterations = 0;
  bool converged = false;
};

// Smallest singular pair of (M - zI)^K by inverse iteration on B^H B + tau I.
SpectralProbe smallest_sv_probe(const RegularMatrix& M, cplx z, const RowMask& K, double tol = 1e-12,
                                int max_iter = 200, std::uint64_t seed = 1);

struct EigenPair {
  cplx lambda;
  CVec x;  // unit norm
  double residual = 0;  // ||Mx - lambda x||, recomputed through shifted_apply
  bool certified = false;
  bool perron = false;  // lambda = d and x parallel to the ones vector
  int multiplicity = 1;
};

struct EigenOptions {
  double tol = 1e-9;      // certified when residual <= tol * d
  int dense_budget = 4000;
  double cluster_tol = 1e-8;
};

std::vector<EigenPair> eigenpairs(const RegularMatrix& M, const EigenOptions& opt = {});
// Shifted inverse iteration for the eigenpair nearest to `shift`, orthogonal to the ones vector.
EigenPair eigenpair_near(const RegularMatrix& M, cplx shift, double tol = 1e-9, int max_iter = 500,
                         std::uint64_t seed = 1);

struct CensusRow {
  cplx lambda;
  double residual = 0;
  bool certified = false;
  int multiplicity = 1;
  DichotomyVerdict verdict;
  double mass_lower = 0;  // ball.lower / n
  double mass_upper = 0;  // ball.upper / n
  bool ball_violation = false;  // ball.upper > delta n
};

struct DelocReport {
  int n = 0, d = 0;
  double rho_rel = 0, delta = 0;
  std::vector<CensusRow> rows;  // non-Perron eigenvectors
  int perron_excluded = 0;
  int gradual = 0, very_steep = 0, neither = 0, undecided = 0, violations = 0;
  int multiple = 0;
  int uncertified = 0;
  double median_mass_lower = 0, median_mass_upper = 0;
  double violation_fraction = 0;
};

DelocReport delocalization_census(const RegularMatrix& M, double rho_rel, double delta, const TaxonomyParams& P,
                                  const EigenOptions& opt = {});
DelocReport census_from_pairs(const std::vector<EigenPair>& pairs, int n, int d, double rho_rel, double delta,
                              const TaxonomyParams& P);

}  // namespace rrd
