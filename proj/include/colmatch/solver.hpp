#pragma once

#include <cstdint>
#include <string>

#include "colmatch/solve_types.hpp"

namespace colmatch {

enum class Strategy { kAuto, kSmall, kLarge, kGreedy, kOracle };

Strategy strategy_from_name(const std::string& name);

// Regime dispatch: every demand at most n^(1-eps) routes to the bucket
// pipeline, every demand at least n^eps routes to the reduction, mixed
// sequences go straight to the fallback chain (with a log note; no theorem
// covers them).
SolveResult solve(const Instance& inst, const DemandSequence& dem,
                  Strategy strategy, std::uint64_t seed,
                  const SolveOptions& opts = {});

}  // namespace colmatch
