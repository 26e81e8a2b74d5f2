#pragma once

#include <cstdint>
#include <vector>

#include "colmatch/core.hpp"

namespace colmatch {

// 3-uniform auxiliary hypergraph: every triple extends a graph edge by the
// y-vertex of its group. y-vertices are numbered after the graph vertices.
struct AuxHypergraph {
    struct Triple {
        Vertex u, v;   // the underlying graph edge
        int y;         // y-vertex id, in [num_x, num_x + num_y)
        int matching;  // colour index i
        int group;     // group index j within the colour
    };

    int num_x = 0;
    int num_y = 0;
    int m = 0;  // groups per matching
    int b = 0;  // matching count
    std::vector<Triple> triples;
    std::vector<int> y_degree;  // |C_i^j| per y-vertex

    int num_vertices() const { return num_x + num_y; }
};

// Splits each matching into m groups (sizes differing by at most one, block
// boundaries after a seeded shuffle) and extends each edge by its group's
// y-vertex. Requires every matching to hold at least m edges.
AuxHypergraph build_aux_hypergraph(const std::vector<Matching>& matchings,
                                   int num_vertices, int m, std::uint64_t seed);

struct NibbleResult {
    std::vector<int> picked;  // indices into H.triples, pairwise disjoint
    double covered_fraction;  // covered vertices / N
};

// Iterated small random bites followed by a greedy completion pass. The
// returned matching is maximal and deterministic given the seed.
NibbleResult nibble_matching(const AuxHypergraph& h, std::uint64_t seed);

struct CappedMatching {
    std::vector<Matching> classes;  // A_i = M cap M_i, per colour
    double covered_fraction;        // of the auxiliary hypergraph

    long long total() const {
        long long s = 0;
        for (const auto& c : classes) s += static_cast<long long>(c.size());
        return s;
    }
};

// Auxiliary hypergraph + nibble + y-stripping: a matching in the union graph
// with |M cap M_i| <= m for every colour i.
CappedMatching claim_matching(const std::vector<Matching>& matchings,
                              int num_vertices, int m, std::uint64_t seed);

struct DeficitReport {
    std::vector<long long> per_colour;  // d_i = m - |A_i|
    long long total = 0;                // = m*b - |M|
    std::vector<int> survivors;         // i with |A_i| >= m/(1+delta)
};

// Per-colour deficits against target m and the survivor list at slack delta.
DeficitReport prune_deficits(const CappedMatching& m_capped, long long m,
                             double delta);

}  // namespace colmatch
