#pragma once

#include <optional>

#include "colmatch/core.hpp"

namespace colmatch {

// Largest vertex count the exact backtracking accepts by default; beyond it
// the worst case stops fitting in interactive time.
inline constexpr int kDefaultOracleCap = 16;

// Complete backtracking search for disjoint classes A_i within the chosen
// matchings, |A_i| = demands[i]. Returns a feasible Solution iff one exists.
// Deterministic: colours by descending remaining demand, edges by lowest
// free vertex. Throws SizeLimitError above the cap.
std::optional<Solution> exact_colourful_matching(const Instance& inst,
                                                 const DemandSequence& dem,
                                                 const std::vector<int>& chosen,
                                                 int n2_cap = kDefaultOracleCap);

// Processes demands in descending order; each picks the unused matching
// offering the most free edges and takes the lexicographically first ones.
// Guaranteed to succeed when the demand total is at most n/3; may succeed
// beyond that. Absent when some demand cannot be filled.
std::optional<Solution> greedy_colourful_matching(const Instance& inst,
                                                  const DemandSequence& dem);

// Augmenting swaps that raise deficient counts without ever lowering them or
// breaking matching validity. Each augmentation attempt costs one budget
// unit; the input is returned unchanged once the budget runs out.
Solution local_search_improve(const Instance& inst, const DemandSequence& dem,
                              const Solution& partial, long long budget);

}  // namespace colmatch
