#pragma once

#include <Eigen/Dense>

#include "rrd/graph_core.hpp"

namespace rrd::test {

inline Eigen::MatrixXd dense(const RegularMatrix& M) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M.n(), M.n());
  for (int i = 0; i < M.n(); ++i)
    for (int j : M.row(i)) A(i, j) += 1;
  return A;
}

inline std::vector<int> offsets(int d) {
  std::vector<int> o(d);
  for (int s = 0; s < d; ++s) o[s] = s;
  return o;
}

}  // namespace rrd::test
