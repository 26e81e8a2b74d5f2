#pragma once

#include <cstdint>
#include <vector>

#include "colmatch/core.hpp"

namespace colmatch {

struct SplitNotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered bead string built from the line graph of a union of two matchings.
// Bead i carries a colour and the underlying graph edge; adjacent beads are
// joined either by a surviving line-graph edge or by a concatenation link.
struct Necklace {
    struct Bead {
        int colour;
        int edge_id;
    };
    enum class Link : std::uint8_t { kPathEdge, kConcat };

    std::vector<Bead> beads;
    std::vector<Link> links;             // links[i] joins beads i and i+1
    std::vector<int> path_boundaries;    // start position of each path
    std::vector<std::pair<int, int>> deleted_line_edges;  // bead positions
    std::vector<Edge> edge_table;        // edge_id -> graph edge
    int num_colours = 0;

    int size() const { return static_cast<int>(beads.size()); }
    long long colour_count(int c) const;
};

// Builds a bead-string necklace from colours alone (no graph backing); used
// by the CLI tool and the split tests.
Necklace necklace_from_colours(const std::vector<int>& colours);

struct Split {
    std::vector<int> cuts;                    // gap g cuts between beads g-1, g
    std::vector<std::pair<int, int>> pieces;  // [begin, end) bead ranges
    std::vector<int> owner;                   // piece -> thief in [0, q)
    std::vector<std::vector<long long>> per_thief_colour_counts;  // [q][colour]
    int q = 1;
};

struct SplitLimits {
    int max_beads = 60;
    int max_colours = 6;
    int max_q = 3;
    long long node_budget = 50'000'000;
};

// Drops |B| mod q edges (highest-indexed first) so q divides the size.
Matching truncate_to_divisible(const Matching& edges, int q);

// Union graph of the old colour classes and the new matching, turned into a
// necklace: line graph, one deleted edge per cycle (lexicographically
// smallest), paths concatenated by smallest contained vertex id.
Necklace build_necklace(const std::vector<Matching>& old_parts,
                        const Matching& new_part);

// Fair q-thief split with at most (q-1) * colours cuts. Exact depth-first
// search within `limits`; above them a greedy balanced sweep is attempted
// and returned only when it is fair within the cut bound. Throws
// SplitNotFoundError otherwise. Requires q to divide every colour count.
Split split_necklace(const Necklace& n, int q, const SplitLimits& limits = {});

struct LiftResult {
    std::vector<Matching> classes;  // t+1 colour classes, mutually disjoint
    int cuts = 0;
    int conflict_pairs = 0;
    int conflicts_type1 = 0;  // cut ran through the pair's line-graph edge
    int conflicts_type2 = 0;  // pair are the endpoints of one path
    long long new_truncated_size = 0;  // |M'_{t+1}| after divisibility trim
};

// Adds one matching to a happy base: truncate to divisibility, build the
// necklace, split among q thieves (first p keep the new colour, the rest
// keep the old ones), then delete every new edge in a conflict pair. Old
// classes end with exactly (q-p)/q of their trimmed size; conflict pairs
// never exceed 2(q-1)(t+1).
LiftResult lift_one(const std::vector<Matching>& base_classes,
                    const Matching& extra, int p, int q,
                    const SplitLimits& limits = {});

}  // namespace colmatch
