#pragma once

#include <cstdint>
#include <string>

#include "rrd/common.hpp"
#include "rrd/taxonomy.hpp"

namespace rrd {

enum class VectorKind { Annulus, Clusters, Lattice, Ramp };
std::string to_string(VectorKind k);
VectorKind vector_kind_from(int i);  // i mod 4

// Random vector of the given kind scaled so that x*_{n3} = 1. Not necessarily gradual.
CVec synthetic_vector(VectorKind kind, std::int64_t n, std::int64_t n3, std::uint64_t seed);

// Draws synthetic vectors with derived seeds until one is gradual; *tries counts the draws.
CVec gradual_vector(VectorKind kind, const TaxonomyParams& P, std::uint64_t seed, int* tries = nullptr);

}  // namespace rrd
