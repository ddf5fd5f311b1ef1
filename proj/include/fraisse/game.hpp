#pragma once

#include "fraisse/structure.hpp"

namespace fraisse {

/// Exhaustive Ehrenfeucht-Fraisse game search: true iff the duplicator has
/// a winning strategy for `depth` rounds, i.e. the structures are
/// back-and-forth equivalent to that depth.
bool bf_equivalent(const FinStructure& a, const FinStructure& b, std::size_t depth);

}  // namespace fraisse
