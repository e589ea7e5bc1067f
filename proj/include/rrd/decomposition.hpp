#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrd/ell_decomp.hpp"
#include "rrd/taxonomy.hpp"

namespace rrd {

struct CoverConstants {
  double cK = 1.0 / 128;
  double cP = 1.0 / 12800;
};

// Throws InputError unless x is gradual with x*_{n3} = 1.
void require_normalized_gradual(const CVec& x, const TaxonomyParams& P);
std::int64_t pow_int(std::int64_t base, int e);

struct KuCheck {
  bool member = false;
  int u = 0;
  std::int64_t spread_total = 0;
  double threshold = 0;      // cK n3
  std::vector<int> parts;    // spread part ids of the certificate
};
KuCheck in_Ku(const CVec& x, int u, double cK, const TaxonomyParams& P, bool check_S = true);
KuCheck ku_from_decomposition(const EllDecomposition& D, int u, double cK, const TaxonomyParams& P);

struct PvCheck {
  bool member = false;
  int v = 0;
  double height_threshold = 0;  // cP 2^{cP (v-4) a3} a3
  std::int64_t total = 0;       // cardinality of parts with height >= height_threshold
  double threshold = 0;         // cP n3
  std::vector<int> parts;
};
PvCheck in_Pv(const CVec& x, int v, double cP, const TaxonomyParams& P, bool check_S = true);
PvCheck pv_from_decomposition(const EllDecomposition& D, int v, double cP, const TaxonomyParams& P);

struct PvRhoDelta {
  PvCheck pv;
  BallCount ball;   // at radius rho
  bool member = false;  // pv.member and a data-centred rho-ball holds >= delta n points
};
PvRhoDelta in_Pv_rho_delta(const CVec& x, int v, double rho, double delta, double cP, const TaxonomyParams& P);

struct WsetWitness {
  bool found = false;
  int b = 0;
  std::int64_t size = 0;
  double order_bound = 0;  // log2(72 sqrt(d) / delta)
  double size_bound = 0;   // delta n / 36
};
// Looks for a w-set of the d^v-approximation with order <= order_bound and size >= size_bound.
WsetWitness heavy_wset(const CVec& x, int v, double delta, const TaxonomyParams& P);

struct CoverWitness {
  enum class Branch { Ku, Pv } branch = Branch::Pv;
  int u = 0;
  std::vector<int> parts;
  std::int64_t total = 0;
  double threshold = 0;
  std::string describe() const;
};
// Tries u = 4..v for K_u, then P_v; throws CoverFailure when neither holds.
// `at4`, when given, is the decomposition of the d^4-approximation of x.
CoverWitness cover_witness(const CVec& x, int v, const CoverConstants& C, const TaxonomyParams& P, bool check_S = true,
                           const EllDecomposition* at4 = nullptr);

struct Separation {
  bool found = false;
  IndexSet I, J;
  double gap = 0;    // lower bound on |y_i - y_j| over I x J
  double angle = 0;  // projection direction
};
// Disjoint I, J of size ceil(n3/4) whose k-approximate values are at least `gap_needed` apart.
Separation separated_sets(const KVector& y, std::int64_t n3, double gap_needed, int directions = 16);

struct TallOrSpread {
  std::int64_t tall_total = 0;    // orders with cumulative height >= 10
  std::int64_t spread_total = 0;
  bool tall = false;    // tall_total >= n3/8
  bool spread = false;  // spread_total >= n3/120
  bool holds() const { return tall || spread; }
};
TallOrSpread tall_or_spread(const EllDecomposition& D, std::int64_t n3);

struct RefinementDichotomy {
  std::int64_t count = 0;  // |{i : 2 |J^{u+1}(i)| <= |J^u(i)|}|
  bool in_Ku = false, in_Ku1 = false;
  bool count_ok = false;   // count >= n3/192
  bool holds() const { return in_Ku || in_Ku1 || count_ok; }
};
RefinementDichotomy refinement_dichotomy(const CVec& x, int u, double cK, const TaxonomyParams& P);

}  // namespace rrd
