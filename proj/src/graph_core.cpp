#include "rrd/graph_core.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace rrd {

RegularMatrix::RegularMatrix(int n, int d, std::vector<int> rows) : n_(n), d_(d), rows_(std::move(rows)) {
  if (n < 0 || d < 0 || (n > 0 && d > n)) throw InputError("RegularMatrix: need 0 <= d <= n");
  if (rows_.size() != static_cast<std::size_t>(n) * d) throw InputError("RegularMatrix: support size mismatch");
  for (int i = 0; i < n_; ++i) std::sort(rows_.begin() + static_cast<std::ptrdiff_t>(i) * d_, rows_.begin() + static_cast<std::ptrdiff_t>(i + 1) * d_);
  validate();
  build_cols();
}

RegularMatrix RegularMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  int n = static_cast<int>(rows.size());
  int d = n ? static_cast<int>(rows[0].size()) : 0;
  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(n) * d);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != d) throw InputError("RegularMatrix: rows of unequal length");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return RegularMatrix(n, d, std::move(flat));
}

RegularMatrix RegularMatrix::circulant(int n, const std::vector<int>& offsets) {
  std::vector<int> flat;
  for (int i = 0; i < n; ++i)
    for (int s : offsets) flat.push_back(((i + s) % n + n) % n);
  return RegularMatrix(n, static_cast<int>(offsets.size()), std::move(flat));
}

RegularMatrix RegularMatrix::permutation(const std::vector<int>& sigma) {
  return RegularMatrix(static_cast<int>(sigma.size()), 1, sigma);
}

RegularMatrix RegularMatrix::identity(int n) {
  std::vector<int> s(n);
  std::iota(s.begin(), s.end(), 0);
  return permutation(s);
}

bool RegularMatrix::has(int i, int j) const {
  auto r = row(i);
  return std::binary_search(r.begin(), r.end(), j);
}

void RegularMatrix::validate() const {
  std::vector<int> colcount(n_, 0);
  for (int i = 0; i < n_; ++i) {
    auto r = row(i);
    for (int t = 0; t < d_; ++t) {
      if (r[t] < 0 || r[t] >= n_) throw InputError("row " + std::to_string(i + 1) + ": column index out of range");
      if (t > 0 && r[t] <= r[t - 1]) throw InputError("row " + std::to_string(i + 1) + ": repeated or unsorted column");
      ++colcount[r[t]];
    }
  }
  for (int j = 0; j < n_; ++j)
    if (colcount[j] != d_) throw InputError("column " + std::to_string(j + 1) + ": sum is not d");
  if (!cols_.empty()) {
    for (int j = 0; j < n_; ++j)
      for (int i : col(j))
        if (!has(i, j)) throw InputError("column support inconsistent with row support");
  }
}

void RegularMatrix::build_cols() {
  cols_.assign(static_cast<std::size_t>(n_) * d_, 0);
  std::vector<int> fill(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j : row(i)) cols_[static_cast<std::size_t>(j) * d_ + fill[j]++] = i;
}

RowMask RowMask::all(int n) { return RowMask{n, std::vector<char>(n, 1)}; }

RowMask RowMask::without(int n, const IndexSet& removed) {
  RowMask K = all(n);
  for (int i : removed) {
    if (i < 0 || i >= n) throw InputError("RowMask: index out of range");
    K.in_K[i] = 0;
  }
  return K;
}

IndexSet RowMask::rows() const {
  IndexSet out;
  for (int i = 0; i < n; ++i)
    if (in_K[i]) out.push_back(i);
  return out;
}

int RowMask::size() const { return static_cast<int>(std::count(in_K.begin(), in_K.end(), 1)); }

namespace {
void check_range(const IndexSet& S, int n, const char* what) {
  for (int v : S)
    if (v < 0 || v >= n) throw InputError(std::string(what) + ": index out of range");
}
}  // namespace

std::int64_t edge_count(const RegularMatrix& M, const IndexSet& I, const IndexSet& J) {
  check_range(I, M.n(), "edge_count I");
  check_range(J, M.n(), "edge_count J");
  std::vector<char> inJ(M.n(), 0);
  for (int j : J) inJ[j] = 1;
  std::vector<char> seenI(M.n(), 0);
  std::int64_t count = 0;
  for (int i : I) {
    if (seenI[i]) continue;
    seenI[i] = 1;
    for (int j : M.row(i)) count += inJ[j];
  }
  return count;
}

IndexSet union_col_supports(const RegularMatrix& M, const IndexSet& J) {
  check_range(J, M.n(), "union_col_supports");
  std::vector<char> mark(M.n(), 0);
  for (int j : J)
    for (int i : M.col(j)) mark[i] = 1;
  IndexSet out;
  for (int i = 0; i < M.n(); ++i)
    if (mark[i]) out.push_back(i);
  return out;
}

RegularMatrix simple_switch(const RegularMatrix& M, int i, int j, int i2, int j2) {
  int n = M.n();
  for (int v : {i, j, i2, j2})
    if (v < 0 || v >= n) throw InputError("simple_switch: index out of range");
  if (i == i2 || j == j2) throw SwitchInvalid("simple_switch: rows and columns must differ");
  if (!M.has(i, j) || !M.has(i2, j2)) throw SwitchInvalid("simple_switch: (i,j) and (i2,j2) must be edges");
  if (M.has(i, j2) || M.has(i2, j)) throw SwitchInvalid("simple_switch: would create a multi-edge");
  std::vector<int> rows = M.row_data();
  int d = M.d();
  auto replace = [&](int r, int from, int to) {
    auto b = rows.begin() + static_cast<std::ptrdiff_t>(r) * d;
    *std::find(b, b + d, from) = to;
  };
  replace(i, j, j2);
  replace(i2, j2, j);
  return RegularMatrix(n, d, std::move(rows));
}

CVec shifted_apply(const RegularMatrix& M, cplx z, const RowMask& K, const CVec& x) {
  if (static_cast<int>(x.size()) != M.n() || K.n != M.n()) throw InputError("shifted_apply: dimension mismatch");
  CVec out;
  out.reserve(K.size());
  for (int i = 0; i < M.n(); ++i) {
    if (!K.in_K[i]) continue;
    cplx s = 0.0;
    for (int j : M.row(i)) s += x[j];
    out.push_back(s - z * x[i]);
  }
  return out;
}

void write_matrix(std::ostream& os, const RegularMatrix& M) {
  os << M.n() << ' ' << M.d() << '\n';
  for (int i = 0; i < M.n(); ++i) {
    auto r = M.row(i);
    for (int t = 0; t < M.d(); ++t) os << (t ? " " : "") << r[t] + 1;
    os << '\n';
  }
}

RegularMatrix read_matrix(std::istream& is) {
  long long n = -1, d = -1;
  if (!(is >> n >> d) || n < 0 || d < 0 || d > n || n > 100000000) throw InputError("read_matrix: bad header");
  std::vector<int> flat(static_cast<std::size_t>(n * d));
  for (auto& v : flat) {
    long long c;
    if (!(is >> c)) throw InputError("read_matrix: truncated body");
    if (c < 1 || c > n) throw InputError("read_matrix: column index out of range");
    v = static_cast<int>(c - 1);
  }
  return RegularMatrix(static_cast<int>(n), static_cast<int>(d), std::move(flat));
}

std::string to_text(const RegularMatrix& M) {
  std::ostringstream os;
  write_matrix(os, M);
  return os.str();
}

RegularMatrix from_text(const std::string& s) {
  std::istringstream is(s);
  return read_matrix(is);
}

}  // namespace rrd
