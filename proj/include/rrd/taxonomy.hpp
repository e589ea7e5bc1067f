#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrd/common.hpp"

namespace rrd {

struct TaxonomyOverrides {
  std::optional<double> a3;
  std::optional<std::int64_t> p;
  double p_scale = 0.2;
  std::optional<double> theta0;
  double t0_jump_factor = 4.0;     // T0 jump is this factor times d
  double t12_jump_exponent = 1.5;  // T1/T2 jumps are d to this power
  double very_steep_factor = 0.9;
  double shift_factor = 10.0;
  bool strict = false;  // also enforce n >= d^3 and 1 <= L <= n/d^3
};

struct TaxonomyParams {
  std::int64_t n = 0;
  int d = 0;
  std::int64_t L = 1;
  double a3 = 1.0 / 1200.0;
  double eps0 = 0;
  std::int64_t p = 0;
  int r = 0;
  int r0 = 0;
  std::int64_t n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  double theta0 = 0;
  double t0_jump = 0;
  double t12_jump = 0;
  double very_steep_factor = 0.9;
  double shift_factor = 10.0;
  bool ordered = false;  // n0 < n1 < n2 < n3 < n
  bool strict = false;

  std::int64_t pow_p(int i) const;
};

TaxonomyParams derive_params(std::int64_t n, int d, std::int64_t L, const TaxonomyOverrides& ov = {});

struct Rearrangement {
  std::vector<double> xstar;  // non-increasing magnitudes
  CVec xsharp;                // lexicographically non-increasing
  std::vector<int> perm;      // xsharp[t] = x[perm[t]]
};
Rearrangement rearrangement(const CVec& x);

// Values of the non-increasing rearrangement of |x| at the given 1-based ranks.
std::vector<double> order_statistics(const CVec& x, const std::vector<std::int64_t>& ranks);

enum class SteepClass { None, T3, T0, T1, T2 };
std::string to_string(SteepClass c);

struct AlmostConstantWitness {
  cplx lambda0;
  IndexSet J1;
  bool rhon3_ok = true;  // (1-theta) x*_{n3} <= |lambda0| <= (1+theta) x*_{n3}
};

struct TaxVerdict {
  SteepClass steep = SteepClass::None;
  int t0_index = -1;
  bool almost_constant = false;
  std::optional<cplx> lambda0;
  bool gradual = false;
  bool normalized = false;   // x*_{n3} == 1 (within 1e-12)
  bool degenerate = false;   // x*_{n3} == 0 for a nonzero x
  double xn3 = 0;
};

TaxVerdict classify(const CVec& x, const TaxonomyParams& P);
// Steep classification only (no almost-constant search).
SteepClass steep_class(const CVec& x, const TaxonomyParams& P, int* t0_index = nullptr);

double weak13_norm(const CVec& x, std::int64_t m);

std::optional<AlmostConstantWitness> almost_constant_witness(const CVec& x, double theta, const TaxonomyParams& P);

struct SplitResult {
  CVec w;
  cplx c;
  SteepClass w_class = SteepClass::None;
  bool steep_ok = false;  // w is steep
  bool shift_ok = false;  // |c| <= w*_{n1} / shift_factor
};
std::optional<SplitResult> split_shifted(const CVec& x, double t, const TaxonomyParams& P);

struct DecayViolation {
  int family = 0;  // 1: m <= p^{r0}; 2: p^{r0} <= m <= n1; 3: x*_{n1} vs x*_{n3}
  std::int64_t m = 0;
  double lhs = 0, rhs = 0;
};
std::vector<DecayViolation> decay_check(const CVec& x, const TaxonomyParams& P);

struct NormBoundCheck {
  bool applicable = false;  // x not in T3
  std::int64_t m = 0;
  double norm = 0, bound = 0;
  bool holds = true;
};
NormBoundCheck norm_bound_check(const CVec& x, const TaxonomyParams& P);

struct BallCount {
  std::int64_t lower = 0;  // max over data-point centres at radius t
  std::int64_t upper = 0;  // same at radius 2t; bounds every t-ball containing a point
  int centre = -1;
};
BallCount max_ball_count(const CVec& x, double t);

struct DichotomyVerdict {
  std::int64_t q = 1;
  std::int64_t cn = 0;  // floor(c' n)
  bool decay_to_q = false;
  bool decay_to_cn = false;
  BallCount ball;
  double radius = 0;
  bool ball_ok = false;        // ball.upper <= delta n
  bool ball_undecided = false; // ball.lower <= delta n < ball.upper
  bool gradual_many_levels = false;
  bool very_steep = false;
  bool neither = false;
  bool variant_decay = false;  // decay indexed by p^{r0}, n1, n3
  bool variant_very_steep = false;
};
DichotomyVerdict many_levels_verdict(const CVec& x, double rho, double delta, std::int64_t q, const TaxonomyParams& P);

}  // namespace rrd
