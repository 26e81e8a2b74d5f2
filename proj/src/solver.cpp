#include "colmatch/solver.hpp"

#include <algorithm>
#include <cmath>

#include "colmatch/bucket_pipeline.hpp"
#include "colmatch/fallback.hpp"
#include "colmatch/reduction.hpp"

namespace colmatch {

Strategy strategy_from_name(const std::string& name) {
    if (name == "auto") return Strategy::kAuto;
    if (name == "small") return Strategy::kSmall;
    if (name == "large") return Strategy::kLarge;
    if (name == "greedy") return Strategy::kGreedy;
    if (name == "oracle") return Strategy::kOracle;
    throw InvalidInputError("unknown strategy: " + name);
}

SolveResult solve(const Instance& inst, const DemandSequence& dem,
                  Strategy strategy, std::uint64_t seed,
                  const SolveOptions& opts) {
    const double n = static_cast<double>(inst.n());
    switch (strategy) {
        case Strategy::kSmall:
            return solve_small(inst, dem, seed, opts);
        case Strategy::kLarge:
            return solve_large(inst, dem, seed, opts);
        case Strategy::kGreedy: {
            SolveResult res;
            res.tier = "greedy";
            if (auto sol = greedy_colourful_matching(inst, dem)) {
                res.status = SolveResult::Status::kFeasible;
                res.solution = std::move(*sol);
                res.ell_used = dem.k();
            }
            return res;
        }
        case Strategy::kOracle: {
            SolveOptions oracle_opts = opts;
            oracle_opts.restart_attempts = 0;
            SolveResult res = fallback_chain(inst, dem, seed, oracle_opts);
            res.note("oracle strategy: greedy and exact tiers only");
            return res;
        }
        case Strategy::kAuto:
            break;
    }

    long long max_a = 0, min_a = dem.demands.empty() ? 0 : dem.demands[0];
    for (long long a : dem.demands) {
        max_a = std::max(max_a, a);
        min_a = std::min(min_a, a);
    }
    const double small_cut = std::pow(n, 1.0 - dem.epsilon);
    const double large_cut = std::pow(n, dem.epsilon);

    if (static_cast<double>(max_a) <= small_cut + 1e-9)
        return solve_small(inst, dem, seed, opts);
    if (static_cast<double>(min_a) + 1e-9 >= large_cut)
        return solve_large(inst, dem, seed, opts);

    SolveResult res = fallback_chain(inst, dem, seed, opts);
    res.note(
        "mixed-regime demands: neither pure route applies, fallbacks used");
    return res;
}

}  // namespace colmatch
