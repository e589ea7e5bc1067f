#include "rrd/qmatrix.hpp"

#include <string>

namespace rrd {

std::int64_t QMatrix::column_sum(int q) const {
  std::int64_t s = 0;
  for (int i = 0; i < n; ++i) s += (*this)(i, q);
  return s;
}

QMatrix project_Q(const RegularMatrix& M, const EllDecomposition& D) {
  if (D.n != M.n()) throw InputError("project_Q: dimension mismatch");
  auto part = D.part_of();
  for (int v : part)
    if (v < 0) throw InputError("project_Q: decomposition does not cover [n]");
  QMatrix Q{M.n(), static_cast<int>(D.parts.size()), M.d(), {}};
  Q.entries.assign(static_cast<std::size_t>(Q.n) * Q.m, 0);
  for (int i = 0; i < M.n(); ++i)
    for (int j : M.row(i)) ++Q(i, part[j]);
  check_admissible(Q, D);
  return Q;
}

void check_admissible(const QMatrix& Q, const EllDecomposition& D) {
  if (Q.n != D.n || Q.m != static_cast<int>(D.parts.size())) throw InputError("Q: shape does not match decomposition");
  for (int i = 0; i < Q.n; ++i) {
    int s = 0;
    for (int q = 0; q < Q.m; ++q) {
      if (Q(i, q) < 0 || Q(i, q) > Q.d) throw InputError("Q: entry out of range");
      s += Q(i, q);
    }
    if (s != Q.d) throw InputError("Q: row " + std::to_string(i + 1) + " does not sum to d");
  }
  for (int q = 0; q < Q.m; ++q)
    if (Q.column_sum(q) != static_cast<std::int64_t>(Q.d) * D.parts[q].size)
      throw InputError("Q: column " + std::to_string(q + 1) + " is not d times the part size");
}

}  // namespace rrd
