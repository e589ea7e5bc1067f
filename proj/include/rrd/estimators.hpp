#pragma once

#include <cstdint>
#include <vector>

#include "rrd/ell_decomp.hpp"
#include "rrd/qmatrix.hpp"
#include "rrd/taxonomy.hpp"

namespace rrd {

struct WSet {
  int b = 0;
  std::vector<int> parts;     // I(b)
  std::int64_t size = 0;      // |W_b|
  std::int64_t below = 0;     // |W_b^1|, parts with weight < 2^{b+1}
  std::int64_t above = 0;     // |W_b^2| = n - below
};

struct EstimatorBundle {
  int n = 0, m = 0, d = 0;
  std::vector<double> w;        // n x m, row-major
  std::vector<double> SB;
  std::vector<double> log_SB;
  std::vector<double> wtilde;   // per part
  std::vector<int> wtilde_b;    // floor(log2 wtilde), exact
  std::vector<char> large;      // |part| >= d^{-1/3} n
  std::vector<double> log_TE;
  int b_min = 0, b_max = 0;
  std::vector<int> b_of_row;
  std::vector<WSet> wsets;      // b = b_min .. b_max
  std::vector<double> eta_i;
  double eta = 0;

  double weight(int i, int q) const { return w[static_cast<std::size_t>(i) * m + q]; }
  const WSet& wset(int b) const { return wsets[b - b_min]; }
  double sum_log_SB() const;
  double sum_log_TE() const;
  // sum over b of min(|W_b^1|, |W_b^2|)
  double wset_balance() const;
};

struct TruncatedWeights {
  std::vector<double> value;  // per part
  std::vector<int> b;         // floor(log2 value), exact
  std::vector<char> large;    // |part| >= d^{-1/3} n
};
// Truncated weights of the parts of D, with d = D.d.
TruncatedWeights truncated_weights(const EllDecomposition& D);

EstimatorBundle compute_bundle(const EllDecomposition& D, const QMatrix& Q);

// floor(log2(a/b)) for positive integers.
int floor_log2_ratio(__int128 a, __int128 b);

struct StandardOptions {
  double c_row = 0.25;
  double c_two_sided = 0.25;
  int exhaustive_max_m = 20;
  int random_subsets = 256;
  std::uint64_t seed = 1;
  std::vector<int> order;  // column order for the prefix/suffix subsets; identity when empty
};

struct StandardCheck {
  bool holds = true;
  bool cond1 = true;
  bool cond2 = true;
  int failed_column = -1;
  std::vector<int> failed_J;
  bool exhaustive = true;
  std::uint64_t subsets_tested = 0;
};

StandardCheck is_standard(const QMatrix& Q, const StandardOptions& opt = {});
// Condition 2 for a single nonempty J (column ids).
bool two_sided_holds(const QMatrix& Q, const std::vector<int>& J, double c);
// Column order by increasing truncated weight, so every I_min(b) is a prefix.
std::vector<int> wtilde_order(const EstimatorBundle& B);

// eta >= c^2 * wset_balance; also checks condition 2 on each I_min(b) used by the bound.
struct OffsetCheck {
  bool premise = true;  // condition 2 holds for every I_min(b), b < b_max
  double eta = 0;
  double rhs = 0;
  bool holds = true;
};
OffsetCheck offset_bound_check(const EstimatorBundle& B, const QMatrix& Q, double c);

// Smallest C >= 1 with log prod SB <= n log C - eta log 2 + log prod TE.
double measured_product_constant(const EstimatorBundle& B);
// Smallest C >= 1 such that, for every b, the sorted part sizes in I(b) satisfy
// s_t <= C |W_b| exp(-t / C).
double measured_majorization_constant(const EstimatorBundle& B, const EllDecomposition& D);

struct LevyEstimate {
  double value = 0;  // best data-point centre at radius t
  double upper = 0;  // same at radius 2t; bounds the sup over all centres at radius t
};
LevyEstimate levy_estimate(const CVec& samples, double t);

}  // namespace rrd
