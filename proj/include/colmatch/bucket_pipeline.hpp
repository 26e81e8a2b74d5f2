#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colmatch/core.hpp"
#include "colmatch/solve_types.hpp"

namespace colmatch {

// Demand-size buckets, per-bucket targets and budgets, and the derived
// partition parameters. Intervals and targets depend only on (n, epsilon);
// counts and budgets also depend on the demands.
struct BucketPlan {
    double epsilon = 0;
    double delta = 0;   // epsilon / 100
    double lambda = 0;  // epsilon / 400
    double big_k = 0;   // 4 / lambda
    long long c = 0;    // ceil(1 / delta); singleton buckets up to here
    int t = 0;          // bucket count

    struct Bucket {
        double lo = 0, hi = 0;      // integers in (lo, hi] belong here
        long long min_value = 0;    // smallest integer in the interval
        long long max_value = 0;    // largest integer in the interval
        long long target = 0;       // m_j
        long long count = 0;        // n_j
        std::vector<int> demand_idx;  // positions routed to this bucket
        long long budget = 0;       // b_j
        double density = 0;         // D_j = b_j^2 m_j / n
        double deviation = 0;       // K * sqrt(D_j ln D_j)
        double prob = 0;            // p_j = m_j b_j / n
    };
    std::vector<Bucket> buckets;
    long long ell = 0;  // sum of budgets
    double p0 = 0;      // leftover probability
    long long n = 0;
    long long k = 0;

    // bucket index (0-based) holding integer value x, or -1
    int bucket_of(long long x) const;
    std::string to_json() const;
};

// Builds the full plan. Demands above n^(1-eps) or totals at or above
// (1 - eps/2) n raise RegimeError (rules "demand-too-large", "sum-budget").
BucketPlan build_plan(const DemandSequence& dem, long long n);

// Numeric re-verification of the plan: ell - k <= eps k ("ell-overhead"),
// sum b_j m_j <= (1 - eps/4) n ("mass-cap"), p0 >= 0 ("prob-budget") and the
// target bracket over all bucket endpoints ("target-bracket").
Report check_plan(const BucketPlan& plan, long long n, long long k);

// Accepted random partition of the vertex set plus the measurements that
// certify it.
struct PartitionCertificate {
    std::vector<int> part_of;              // vertex -> part, 0 = leftover
    std::vector<std::vector<int>> groups;  // bucket -> matching indices
    int attempts = 0;
    bool pass = false;
    struct BucketStats {
        double deg_lo = 0, deg_hi = 0;     // observed degree range
        std::vector<long long> intersect;  // per matching of the bucket
        bool deg_ok = true;
        bool intersect_ok = true;
    };
    std::vector<BucketStats> stats;
};

// Samples i.i.d. part assignments until every degree and intersection bound
// holds, re-sampling at most `retries` times. Matchings are grouped into the
// buckets first-fit in index order; fails when the instance has fewer than
// `ell` matchings.
std::optional<PartitionCertificate> random_partition(const Instance& inst,
                                                     const BucketPlan& plan,
                                                     std::uint64_t seed,
                                                     int retries);

// a'_i = max(a_i, ceil(n^(1-lambda) / k)); raises RegimeError
// ("augmented-sum") when the augmented total reaches (1 - eps/2) n.
DemandSequence augment_sequence(const DemandSequence& dem, long long n);

// The small-demand solver: plan, certified partition, per-bucket capped
// matching, deficit pruning, assembly. Falls back through greedy, local
// search and the exact oracle when a certificate fails (unless disabled).
SolveResult solve_small(const Instance& inst, const DemandSequence& dem,
                        std::uint64_t seed, const SolveOptions& opts = {});

}  // namespace colmatch
