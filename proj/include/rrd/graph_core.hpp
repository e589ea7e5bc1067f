#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rrd/common.hpp"

namespace rrd {

// A 0/1 n x n matrix with all row and column sums equal to d, stored as
// sorted row supports and the inverse column supports (0-based).
class RegularMatrix {
 public:
  RegularMatrix() = default;
  // rows: n*d column indices, row i occupying [i*d, (i+1)*d); need not be sorted.
  RegularMatrix(int n, int d, std::vector<int> rows);
  static RegularMatrix from_rows(const std::vector<std::vector<int>>& rows);
  static RegularMatrix circulant(int n, const std::vector<int>& offsets);
  static RegularMatrix permutation(const std::vector<int>& sigma);  // row i has its one in column sigma[i]
  static RegularMatrix identity(int n) ;

  int n() const { return n_; }
  int d() const { return d_; }
  std::span<const int> row(int i) const { return {rows_.data() + static_cast<std::size_t>(i) * d_, static_cast<std::size_t>(d_)}; }
  std::span<const int> col(int j) const { return {cols_.data() + static_cast<std::size_t>(j) * d_, static_cast<std::size_t>(d_)}; }
  bool has(int i, int j) const;
  const std::vector<int>& row_data() const { return rows_; }

  // Throws InputError describing the first violated invariant.
  void validate() const;

  bool operator==(const RegularMatrix& o) const { return n_ == o.n_ && d_ == o.d_ && rows_ == o.rows_; }
  bool operator<(const RegularMatrix& o) const { return rows_ < o.rows_; }

 private:
  void build_cols();

  int n_ = 0;
  int d_ = 0;
  std::vector<int> rows_;
  std::vector<int> cols_;
};

struct RowMask {
  int n = 0;
  std::vector<char> in_K;

  static RowMask all(int n);
  static RowMask without(int n, const IndexSet& removed);
  IndexSet rows() const;
  int size() const;
  int complement_size() const { return n - size(); }
};

std::int64_t edge_count(const RegularMatrix& M, const IndexSet& I, const IndexSet& J);
IndexSet union_col_supports(const RegularMatrix& M, const IndexSet& J);
RegularMatrix simple_switch(const RegularMatrix& M, int i, int j, int i2, int j2);
// ((M - zI)x)_i for i in K, in increasing i.
CVec shifted_apply(const RegularMatrix& M, cplx z, const RowMask& K, const CVec& x);

// Text format: header "n d", then n lines of d sorted 1-based column indices.
void write_matrix(std::ostream& os, const RegularMatrix& M);
RegularMatrix read_matrix(std::istream& is);
std::string to_text(const RegularMatrix& M);
RegularMatrix from_text(const std::string& s);

}  // namespace rrd
