#pragma once

#include <optional>
#include <string>
#include <vector>

#include "colmatch/core.hpp"
#include "colmatch/oracle.hpp"

namespace colmatch {

struct SolveOptions {
    bool fallback = true;
    int oracle_cap = kDefaultOracleCap;
    int partition_retries = 50;
    int pipeline_attempts = 3;
    long long local_search_budget = 4000;
    int restart_attempts = 40;
    // forces the (p, q) of every unwinding step; used to exercise the lift
    // path at scales where the derived q would dwarf the instance
    std::optional<std::pair<int, int>> forced_pq;
    // demand i must draw from matching i (the hypertree embedding needs
    // per-center counts); only the fallback tiers support this
    bool identity_assignment = false;
};

struct SolveResult {
    enum class Status { kFeasible, kNoSolutionFound, kInfeasible };
    Status status = Status::kNoSolutionFound;
    std::optional<Solution> solution;
    std::string tier;  // "bucket-pipeline", "reduction", "greedy", ...
    long long ell_used = 0;
    std::vector<std::string> log;

    bool feasible() const { return status == Status::kFeasible; }
    void note(std::string line) { log.push_back(std::move(line)); }
};

}  // namespace colmatch
