#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace colmatch {

using Vertex = int;

// Unordered vertex pair, stored with the smaller endpoint first.
struct Edge {
    Vertex u = -1;
    Vertex v = -1;

    Edge() = default;
    Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

    bool touches(Vertex x) const { return u == x || v == x; }
    Vertex other(Vertex x) const { return u == x ? v : u; }

    friend bool operator==(const Edge& a, const Edge& b) = default;
    friend auto operator<=>(const Edge& a, const Edge& b) = default;
};

using Matching = std::vector<Edge>;

// Problem instance: pairwise edge-disjoint perfect matchings on an even
// vertex set [0, n2).
struct Instance {
    int n2 = 0;
    std::vector<Matching> matchings;

    int n() const { return n2 / 2; }
    int ell() const { return static_cast<int>(matchings.size()); }
};

// Demands a_1..a_k plus the slack budget epsilon in (0,1).
struct DemandSequence {
    std::vector<long long> demands;
    double epsilon = 0.1;

    int k() const { return static_cast<int>(demands.size()); }
    long long total() const {
        long long s = 0;
        for (long long a : demands) s += a;
        return s;
    }
};

// A candidate answer: matching M, the indices of the matchings each demand
// draws from, and the per-demand intersection sizes.
struct Solution {
    std::vector<Edge> edges;
    std::vector<int> chosen;
    std::vector<long long> counts;
};

struct Violation {
    std::string code;
    std::string message;
};

struct Report {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(const std::string& code) const {
        for (const auto& v : violations)
            if (v.code == code) return true;
        return false;
    }
    void add(std::string code, std::string message) {
        violations.push_back({std::move(code), std::move(message)});
    }
    std::string to_string() const;
};

struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SizeLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an operation's numeric preconditions fail (the instance is
// outside the regime the routine is built for). `rule` carries the stable
// code of the failed condition.
struct RegimeError : std::runtime_error {
    std::string rule;
    RegimeError(std::string rule_, const std::string& msg)
        : std::runtime_error(msg), rule(std::move(rule_)) {}
};

// Edges min-vertex-first and matchings sorted lexicographically, for
// bit-exact serialization.
void canonicalize(Matching& m);
void canonicalize(Instance& inst);
void canonicalize(Solution& sol);

// Circle-method 1-factorization of the complete graph on n2 vertices:
// n2-1 pairwise disjoint perfect matchings. Deterministic.
Instance round_robin_one_factorization(int n2);

// Image of `inst` under the given vertex permutation (perm[v] = new label).
Instance relabel_with(const Instance& inst, const std::vector<Vertex>& perm);

// Image under a uniformly random vertex permutation drawn from `seed`.
Instance relabel_random(const Instance& inst, std::uint64_t seed);

// Lists every violated instance invariant; empty report iff valid.
Report verify_instance(const Instance& inst);

// Demand sanity against an instance of half-order n: positivity, k >= 1,
// sum <= n, epsilon in (0,1).
Report verify_demands(const DemandSequence& dem, long long n);

// The acceptance predicate: M is a matching, every edge lies in its claimed
// colour, counts are correct and meet the demands. Empty report iff feasible.
Report verify_solution(const Instance& inst, const DemandSequence& dem,
                       const Solution& sol);

// partner[v] = matched vertex in m, or -1. Vertex universe [0, n2).
std::vector<Vertex> partner_map(const Matching& m, int n2);

// Assembles a Solution from per-demand colour classes: classes[i] holds the
// edges serving demand i taken from matching chosen[i].
Solution make_solution(const std::vector<Matching>& classes,
                       const std::vector<int>& chosen);

}  // namespace colmatch
