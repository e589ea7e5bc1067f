#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "rrd/common.hpp"

namespace rrd {

// A point of Z^2/k stored by its integer numerators; ordering is
// lexicographic (real part first).
struct LatticePoint {
  std::int64_t re = 0;
  std::int64_t im = 0;
  auto operator<=>(const LatticePoint&) const = default;
};

struct KVector {
  std::int64_t k = 1;
  std::vector<LatticePoint> coords;

  int n() const { return static_cast<int>(coords.size()); }
  cplx value(int i) const { return {static_cast<double>(coords[i].re) / k, static_cast<double>(coords[i].im) / k}; }
};

// Exact floor(k * x) for a double x and integer k with |k| < 2^53.
std::int64_t floor_scaled(double x, std::int64_t k);
KVector k_approx(const CVec& x, std::int64_t k);

enum class PartKind { Spread, Regular };

struct LevelSet {
  int order = 0;
  LatticePoint value;
  int begin = 0;  // offset into EllDecomposition::members
  int size = 0;
};

struct EllPart {
  int order = 0;
  PartKind kind = PartKind::Regular;
  std::vector<int> levels;  // ids into EllDecomposition::levels, values decreasing
  int size = 0;
  int height() const { return static_cast<int>(levels.size()); }
};

struct EllDecomposition {
  int n = 0;
  std::int64_t k = 1;
  int d = 1;
  std::vector<int> members;  // indices grouped by value, increasing within a value
  std::vector<LevelSet> levels;
  std::vector<EllPart> parts;  // spread parts by increasing order, then regular parts

  std::span<const int> indices(int level_id) const {
    const auto& L = levels[level_id];
    return {members.data() + L.begin, static_cast<std::size_t>(L.size)};
  }
  IndexSet part_indices(int q) const;  // sorted
  std::vector<int> part_of() const;    // index -> part id
  int max_order() const;
  std::int64_t spread_total() const;
};

EllDecomposition decompose(const KVector& y, int d);

struct OrderStats {
  int order = 0;
  std::int64_t cs = 0, cr = 0;  // cardinalities of the spread / regular part
  std::int64_t hs = 0, hr = 0;  // heights
  auto operator<=>(const OrderStats&) const = default;
};

std::vector<OrderStats> class_stats(const EllDecomposition& D);
double class_cardinality_log_bound(const std::vector<OrderStats>& stats, std::int64_t n);

// Sizes of the level sets produced for a value occurring c times, in order.
std::vector<std::int64_t> level_schedule(std::int64_t c);

// Group sizes of equal values: result[i] = |{j : y_j = y_i}|.
std::vector<int> equal_value_counts(const KVector& y);

}  // namespace rrd
