#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colmatch/core.hpp"
#include "colmatch/solve_types.hpp"

namespace colmatch {

// The rescaled demand chain A_0..A_s with its constants and per-step
// unwinding fractions.
struct ReductionChain {
    double epsilon = 0;
    double delta = 0;    // epsilon / 10
    double mu = 0;       // epsilon / (2 (1 - epsilon))
    long long cap_s = 0; // S = ceil(2 (1+mu) n^delta ln n)
    double lambda = 0;   // ln(1+mu) / S
    long long n = 0;

    std::vector<std::vector<long long>> chain;  // A_0..A_s, nondecreasing
    std::vector<long long> sums;                // sigma_j
    std::vector<double> ratios;                 // m_j while defined
    std::vector<std::pair<long long, long long>> pq;  // (p_j, q_j), step j>=1
    int s = 0;

    std::string to_json() const;
};

// Floor-rescale recursion step: floor((1+lambda)/(1-ratio) * value).
long long rescale_value(long long value, double lambda, double ratio);

// Builds the chain from a nondecreasing demand sequence, asserting every
// growth and cap invariant at each step; RegimeError names the first rule
// that fails ("monotone-step", "nondecreasing-sequence", "sum-growth",
// "sum-cap", "ratio-floor", "step-bound", or the preconditions
// "demand-too-small" / "sum-budget" / "sum-below-greedy").
ReductionChain build_chain(const DemandSequence& dem, long long n);

struct PqChoice {
    long long p = 0;
    long long q = 0;
    bool in_regime = true;
};

// q = ceil(n^(4 delta) / 4) clamped into [n^(4delta)/4, n^(4delta)/2] (at
// least 2); p = floor(ratio * q) clamped into [1, q-1]. in_regime reports
// whether the bracket 0 <= ratio - p/q <= 1/q survived the clamping.
PqChoice choose_pq(double ratio, long long n, double delta);

// Independent re-verification of a built chain; violation codes as above.
Report happy_check_chain(const ReductionChain& chain);

// The large-demand solver: build the chain, solve the base sequence with the
// small-demand pipeline (or trivially when one element remains), then unwind
// with one necklace lift per step. Falls back when any stage leaves a
// demand short.
SolveResult solve_large(const Instance& inst, const DemandSequence& dem,
                        std::uint64_t seed, const SolveOptions& opts = {});

}  // namespace colmatch
