#include "colmatch/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace colmatch {

namespace {

struct SearchState {
    const Instance& inst;
    const std::vector<int>& chosen;
    std::vector<long long> remaining;      // per demand position
    std::vector<int> next_edge;            // per position: first candidate index
    std::vector<char> used;                // vertex occupancy
    std::vector<Matching> picked;          // per position
    std::vector<const Matching*> pool;     // sorted edges per position
};

bool edge_free(const SearchState& st, const Edge& e) {
    return !st.used[e.u] && !st.used[e.v];
}

// Every still-demanding position must retain enough free edges.
bool prune_ok(const SearchState& st) {
    for (std::size_t i = 0; i < st.remaining.size(); ++i) {
        if (st.remaining[i] == 0) continue;
        long long free_edges = 0;
        for (const Edge& e : *st.pool[i])
            if (edge_free(st, e)) ++free_edges;
        if (free_edges < st.remaining[i]) return false;
    }
    return true;
}

bool backtrack(SearchState& st) {
    // position with the largest remaining demand, lowest index on ties
    int pos = -1;
    for (std::size_t i = 0; i < st.remaining.size(); ++i)
        if (st.remaining[i] > 0 &&
            (pos < 0 || st.remaining[i] > st.remaining[pos]))
            pos = static_cast<int>(i);
    if (pos < 0) return true;

    const Matching& edges = *st.pool[pos];
    for (int idx = st.next_edge[pos]; idx < static_cast<int>(edges.size());
         ++idx) {
        const Edge& e = edges[idx];
        if (!edge_free(st, e)) continue;
        st.used[e.u] = st.used[e.v] = 1;
        st.picked[pos].push_back(e);
        --st.remaining[pos];
        int saved = st.next_edge[pos];
        st.next_edge[pos] = idx + 1;
        if (prune_ok(st) && backtrack(st)) return true;
        st.next_edge[pos] = saved;
        ++st.remaining[pos];
        st.picked[pos].pop_back();
        st.used[e.u] = st.used[e.v] = 0;
    }
    return false;
}

}  // namespace

std::optional<Solution> exact_colourful_matching(const Instance& inst,
                                                 const DemandSequence& dem,
                                                 const std::vector<int>& chosen,
                                                 int n2_cap) {
    if (inst.n2 > n2_cap)
        throw SizeLimitError("instance above the exact-search cap of " +
                             std::to_string(n2_cap) + " vertices");
    if (static_cast<int>(chosen.size()) != dem.k())
        throw InvalidInputError("one chosen matching per demand required");
    std::vector<char> seen(inst.ell(), 0);
    for (int idx : chosen) {
        if (idx < 0 || idx >= inst.ell())
            throw InvalidInputError("chosen index out of range");
        if (seen[idx]++) throw InvalidInputError("chosen indices must be distinct");
    }
    for (long long a : dem.demands)
        if (a < 1) throw InvalidInputError("demands must be positive");

    const int k = dem.k();
    std::vector<Matching> sorted_pool(k);
    SearchState st{inst, chosen, dem.demands, std::vector<int>(k, 0),
                   std::vector<char>(inst.n2, 0), std::vector<Matching>(k), {}};
    for (int i = 0; i < k; ++i) {
        sorted_pool[i] = inst.matchings[chosen[i]];
        canonicalize(sorted_pool[i]);
    }
    for (int i = 0; i < k; ++i) st.pool.push_back(&sorted_pool[i]);

    if (!prune_ok(st) || !backtrack(st)) return std::nullopt;
    return make_solution(st.picked, chosen);
}

std::optional<Solution> greedy_colourful_matching(const Instance& inst,
                                                  const DemandSequence& dem) {
    const int k = dem.k();
    if (k > inst.ell()) return std::nullopt;

    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dem.demands[a] > dem.demands[b];
    });

    std::vector<Matching> sorted(inst.matchings);
    for (Matching& m : sorted) canonicalize(m);

    std::vector<char> used(inst.n2, 0);
    std::vector<char> matching_taken(inst.ell(), 0);
    std::vector<Matching> classes(k);
    std::vector<int> chosen(k, -1);

    for (int pos : order) {
        const long long need = dem.demands[pos];
        int best = -1;
        long long best_free = -1;
        for (int m = 0; m < inst.ell(); ++m) {
            if (matching_taken[m]) continue;
            long long free_edges = 0;
            for (const Edge& e : sorted[m])
                if (!used[e.u] && !used[e.v]) ++free_edges;
            if (free_edges > best_free) {
                best_free = free_edges;
                best = m;
            }
        }
        if (best < 0 || best_free < need) return std::nullopt;
        matching_taken[best] = 1;
        chosen[pos] = best;
        long long taken = 0;
        for (const Edge& e : sorted[best]) {
            if (taken == need) break;
            if (used[e.u] || used[e.v]) continue;
            used[e.u] = used[e.v] = 1;
            classes[pos].push_back(e);
            ++taken;
        }
    }
    return make_solution(classes, chosen);
}

namespace {

// Working image of a Solution split into per-demand classes, with O(1)
// vertex -> occupying edge lookup.
struct Classes {
    std::vector<Matching> cls;
    std::vector<int> owner;  // vertex -> colour occupying it, -1 = free
    std::vector<Edge> owner_edge;  // vertex -> the occupying edge
    std::vector<long long> counts;

    bool free(Vertex v) const { return owner[v] < 0; }

    void remove_edge(int colour, const Edge& e) {
        auto& c = cls[colour];
        c.erase(std::find(c.begin(), c.end(), e));
        owner[e.u] = owner[e.v] = -1;
        --counts[colour];
    }
    void add_edge(int colour, const Edge& e) {
        cls[colour].push_back(e);
        owner[e.u] = owner[e.v] = colour;
        owner_edge[e.u] = owner_edge[e.v] = e;
        ++counts[colour];
    }
};

struct Blocker {
    int colour;
    Edge edge;
};

// Gain one edge of `colour`, displacing blockers through depth-limited
// replacement chains. Every colour ends at >= min(its entry count, demand).
// Swap branching is capped below the top level to keep chains cheap.
bool place_edge(Classes& st, const std::vector<Matching>& pool,
                const std::vector<long long>& demands, int colour, int depth,
                int branch_cap) {
    const Matching& candidates = pool[colour];
    // fast path: a directly free edge (own edges have occupied endpoints)
    for (const Edge& e : candidates) {
        if (st.free(e.u) && st.free(e.v)) {
            st.add_edge(colour, e);
            return true;
        }
    }
    if (depth == 0) return false;

    int branches = 0;
    for (const Edge& e : candidates) {
        if (branches >= branch_cap) break;
        Blocker blockers[2];
        int nb = 0;
        bool self_block = false;
        for (Vertex v : {e.u, e.v}) {
            const int j = st.owner[v];
            if (j < 0) continue;
            if (j == colour) {
                self_block = true;
                break;
            }
            if (nb == 1 && blockers[0].edge == st.owner_edge[v]) continue;
            blockers[nb++] = {j, st.owner_edge[v]};
        }
        if (self_block || nb == 0) continue;
        ++branches;

        Classes snapshot = st;
        for (int i = 0; i < nb; ++i)
            st.remove_edge(blockers[i].colour, blockers[i].edge);
        st.add_edge(colour, e);
        bool ok = true;
        for (int i = 0; i < nb; ++i) {
            const int j = blockers[i].colour;
            if (st.counts[j] >= demands[j]) continue;
            if (st.counts[j] >= snapshot.counts[j]) continue;
            if (!place_edge(st, pool, demands, j, depth - 1,
                            std::max(4, branch_cap / 2))) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
        st = std::move(snapshot);
    }
    return false;
}

}  // namespace

Solution local_search_improve(const Instance& inst, const DemandSequence& dem,
                              const Solution& partial, long long budget) {
    Report structural = verify_instance(inst);
    if (!structural.ok())
        throw InvalidInputError("invalid instance: " + structural.to_string());
    const int k = dem.k();
    if (static_cast<int>(partial.chosen.size()) != k)
        throw InvalidInputError("partial solution shape mismatch");

    // split the partial matching into per-demand classes
    Classes st;
    st.cls.assign(k, {});
    st.owner.assign(inst.n2, -1);
    st.owner_edge.assign(inst.n2, Edge{});
    st.counts.assign(k, 0);
    std::vector<std::vector<Vertex>> partners;
    for (int i = 0; i < k; ++i)
        partners.push_back(partner_map(inst.matchings[partial.chosen[i]], inst.n2));
    for (const Edge& e : partial.edges) {
        if (!st.free(e.u) || !st.free(e.v))
            throw InvalidInputError("partial solution is not a matching");
        int home = -1;
        for (int i = 0; i < k; ++i)
            if (partners[i][e.u] == e.v) {
                home = i;
                break;
            }
        if (home < 0)
            throw InvalidInputError("partial edge outside the chosen matchings");
        st.add_edge(home, e);
    }

    std::vector<Matching> pool(k);
    for (int i = 0; i < k; ++i) {
        pool[i] = inst.matchings[partial.chosen[i]];
        canonicalize(pool[i]);
    }

    const int chain_depth = 3;
    while (budget > 0) {
        // most deficient colour first, then the rest
        std::vector<int> deficient;
        for (int i = 0; i < k; ++i)
            if (st.counts[i] < dem.demands[i]) deficient.push_back(i);
        if (deficient.empty()) break;
        std::stable_sort(deficient.begin(), deficient.end(), [&](int a, int b) {
            return dem.demands[a] - st.counts[a] > dem.demands[b] - st.counts[b];
        });
        bool progressed = false;
        for (int colour : deficient) {
            if (budget == 0) break;
            --budget;
            if (place_edge(st, pool, dem.demands, colour, chain_depth, 16)) {
                progressed = true;
                break;
            }
        }
        if (!progressed) break;
    }

    return make_solution(st.cls, partial.chosen);
}

}  // namespace colmatch
