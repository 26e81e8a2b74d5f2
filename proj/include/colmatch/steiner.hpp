#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "colmatch/core.hpp"
#include "colmatch/solve_types.hpp"

namespace colmatch {

using Triple = std::array<int, 3>;  // stored sorted ascending

struct SteinerTripleSystem {
    int v = 0;
    std::vector<Triple> triples;

    std::string to_json() const;
    static SteinerTripleSystem from_json(const std::string& text);
};

// Order 6m+3, built over an idempotent commutative quasigroup on Z_{2m+1}.
SteinerTripleSystem bose_sts(int m);

// Order 6m+1, built over a half-idempotent commutative quasigroup on Z_{2m}.
SteinerTripleSystem skolem_sts(int m);

// Every vertex pair must lie in exactly one triple ("pair-coverage"), the
// order must be 1 or 3 mod 6 and vertex ids in range.
Report verify_sts(const SteinerTripleSystem& s);

// A hypertree core C with hyperstars of the given sizes attached at the
// centers. Core vertices are [0, c); star leaves follow consecutively,
// star i before star i+1.
struct Turkey {
    std::vector<Triple> core;
    std::vector<int> centers;
    std::vector<long long> star_sizes;

    int core_order() const;
    long long hyperedge_count() const;  // n = (c-1)/2 + sum a_i
    int vertex_count() const;           // 2n + 1

    std::string to_json() const;
    static Turkey from_json(const std::string& text);
};

// Core is a hypertree (simple, connected, acyclic incidence), centers
// distinct core vertices, star sizes positive.
Report verify_turkey(const Turkey& t);

// Lists the turkey's hyperedges over its own vertex ids, core first.
std::vector<Triple> turkey_edges(const Turkey& t);

// Greedy hypertree embedding in traversal order from `root`; each hyperedge
// picks the first unused triple through its parent's image. Returns the
// vertex map or nullopt when some parent has no free triple left.
std::optional<std::vector<int>> greedy_embed_hypertree(
    const SteinerTripleSystem& s, const std::vector<Triple>& tree_edges,
    int tree_order, int root, int root_image);

// The matchings M_i = {{u,v} : {u_i,u,v} in S} + {{u_i,w}} on the vertex set
// V(S) + fake vertex w, with fake-edge marks.
struct StarMatchings {
    Instance instance;                   // ell = number of centers
    std::vector<std::vector<bool>> fake; // parallel to instance edge lists
    int fake_vertex = 0;                 // w = |V(S)|
};
StarMatchings stars_to_matchings(const SteinerTripleSystem& s,
                                 const std::vector<int>& center_images,
                                 const std::vector<int>& core_image);

struct Embedding {
    std::vector<int> vertex_map;       // turkey vertex -> STS vertex
    std::vector<Triple> used_triples;  // images of the turkey hyperedges
};

// Injectivity plus every image hyperedge present in the system.
Report verify_embedding(const SteinerTripleSystem& s, const Turkey& t,
                        const Embedding& emb);

struct EmbedOptions {
    int retries = 10;
    SolveOptions solve;
};

// Core embedding, star matchings, demand rescale, colourful matching solve,
// fake-edge deletion, star assembly. Throws RegimeError when the system is
// too small for the turkey; returns nullopt after all retries fail.
std::optional<Embedding> embed_turkey(const SteinerTripleSystem& s,
                                      const Turkey& t, double epsilon,
                                      std::uint64_t seed,
                                      const EmbedOptions& opts = {});

}  // namespace colmatch
