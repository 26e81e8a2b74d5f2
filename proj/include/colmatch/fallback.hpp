#pragma once

#include <cstdint>

#include "colmatch/solve_types.hpp"

namespace colmatch {

// The tiered fallback: deterministic greedy, then seeded greedy restarts
// each polished by local search, then the exact oracle when the instance is
// within its cap. The oracle tier alone may return kInfeasible.
SolveResult fallback_chain(const Instance& inst, const DemandSequence& dem,
                           std::uint64_t seed, const SolveOptions& opts = {});

}  // namespace colmatch
