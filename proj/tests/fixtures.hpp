#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "trellis/codes.hpp"
#include "trellis/trellis.hpp"

namespace fixtures {

/// Layout: A=0, depth-1 {1, 2}, depth-2 {3, 4}, depth-3 {5, 6}, B=7; 12 edges.
inline trellis::Trellis spc4() { return trellis::build_spc_trellis(4); }

/// Relative error against a magnitude scale, so sums that cancel to zero
/// are judged against the size of their terms.
inline double rel_err(double got, double want, double scale)
{
    return std::abs(got - want) / std::max({std::abs(want), scale, 1e-300});
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

} // namespace fixtures
