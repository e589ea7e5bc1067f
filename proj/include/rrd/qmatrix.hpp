#pragma once

#include <vector>

#include "rrd/ell_decomp.hpp"
#include "rrd/graph_core.hpp"

namespace rrd {

// n x m column-aggregated integer matrix; entry (i,q) counts the ones of row i
// landing in part q.
struct QMatrix {
  int n = 0;
  int m = 0;
  int d = 0;
  std::vector<int> entries;  // row-major

  int operator()(int i, int q) const { return entries[static_cast<std::size_t>(i) * m + q]; }
  int& operator()(int i, int q) { return entries[static_cast<std::size_t>(i) * m + q]; }
  std::int64_t column_sum(int q) const;
};

QMatrix project_Q(const RegularMatrix& M, const EllDecomposition& D);
// Row sums equal d and column sums equal d * |part q|; throws InputError otherwise.
void check_admissible(const QMatrix& Q, const EllDecomposition& D);

}  // namespace rrd
