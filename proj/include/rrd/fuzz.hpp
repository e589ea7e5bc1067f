#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rrd/ell_decomp.hpp"
#include "rrd/rng.hpp"

namespace rrd {

enum class FuzzFamily {
  SwitchInvariants,
  LevelSets,       // level-set sizes and part heights
  LevelSchedule,   // per-value level sizes 1, 2, ..., 2^u and the residual
  HeightMonotone,  // cumulative heights and value-set nesting across orders
  SpreadSeparation,
  QIdentities,     // row sums d and column sums d |part| of projected Q
  Decay,           // coordinate decay outside the steep classes
  NormBound,       // l2 norm against one order statistic outside T3
  AlmostConstantLower,
  SplitValidity,
};

std::vector<FuzzFamily> all_fuzz_families();
std::string to_string(FuzzFamily f);
FuzzFamily fuzz_family_from(const std::string& name);

struct FuzzTally {
  FuzzFamily family = FuzzFamily::LevelSets;
  std::uint64_t instances = 0;
  std::uint64_t applicable = 0;  // instances meeting the hypotheses of the checked statement
  std::uint64_t failures = 0;
  std::string first_failure;
};

struct FuzzOutcome {
  bool applicable = false;
  std::string failure;  // empty on success
};

// Shared inputs of a family (parameters, matrix pool), built once per seed.
struct FuzzContext;
std::shared_ptr<const FuzzContext> make_fuzz_context(FuzzFamily f, std::uint64_t seed);
// Instance t draws from derive_seed(seed, {family, t}).
FuzzOutcome fuzz_instance(const FuzzContext& ctx, std::uint64_t t);
FuzzTally run_fuzz(FuzzFamily f, std::uint64_t instances, std::uint64_t seed);

// Random magnitude profile (power law, uniform, log-normal or linear) with
// uniform phases, shuffled.
CVec random_profile_vector(Philox& g, int n);

// Random k-vector with repeated values, used by the decomposition families.
KVector random_kvector(Philox& g, int n, std::int64_t k);

// Independent checks of a decomposition; each returns an empty string on success.
std::string check_level_sets(const KVector& y, const EllDecomposition& D);
std::string check_level_schedule(const KVector& y, const EllDecomposition& D);
std::string check_height_monotone(const EllDecomposition& D);
std::string check_spread_separation(const EllDecomposition& D);

}  // namespace rrd
