#include "colmatch/hypermatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "colmatch/rng.hpp"

namespace colmatch {

AuxHypergraph build_aux_hypergraph(const std::vector<Matching>& matchings,
                                   int num_vertices, int m, std::uint64_t seed) {
    if (m < 1) throw InvalidInputError("group count must be at least 1");
    AuxHypergraph h;
    h.num_x = num_vertices;
    h.m = m;
    h.b = static_cast<int>(matchings.size());
    h.num_y = m * h.b;
    h.y_degree.assign(h.num_y, 0);

    Rng rng(seed);
    for (int i = 0; i < h.b; ++i) {
        const Matching& mi = matchings[i];
        const int sz = static_cast<int>(mi.size());
        if (sz < m)
            throw InvalidInputError("matching " + std::to_string(i) + " has " +
                                    std::to_string(sz) +
                                    " edges, fewer than the " +
                                    std::to_string(m) + " groups requested");
        std::vector<int> order(sz);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        // contiguous blocks; the first (sz mod m) groups get one extra edge
        const int base = sz / m;
        const int extra = sz % m;
        int at = 0;
        for (int g = 0; g < m; ++g) {
            const int len = base + (g < extra ? 1 : 0);
            const int y = h.num_x + i * m + g;
            for (int t = 0; t < len; ++t) {
                const Edge& e = mi[order[at++]];
                h.triples.push_back({e.u, e.v, y, i, g});
            }
            h.y_degree[y - h.num_x] = len;
        }
    }
    return h;
}

NibbleResult nibble_matching(const AuxHypergraph& h, std::uint64_t seed) {
    Rng rng(seed);
    const int nverts = h.num_vertices();
    std::vector<char> used(nverts, 0);
    std::vector<int> alive(h.triples.size());
    std::iota(alive.begin(), alive.end(), 0);
    std::vector<int> picked;

    auto triple_free = [&](int t) {
        const auto& tr = h.triples[t];
        return !used[tr.u] && !used[tr.v] && !used[tr.y];
    };
    auto take = [&](int t) {
        const auto& tr = h.triples[t];
        used[tr.u] = used[tr.v] = used[tr.y] = 1;
        picked.push_back(t);
    };

    const double bite_fraction = 0.05;
    const int max_rounds = 60;
    long long free_vertices = nverts;

    for (int round = 0; round < max_rounds && !alive.empty(); ++round) {
        // sample so the expected bite covers ~5% of the remaining vertices
        double p = bite_fraction * static_cast<double>(free_vertices) /
                   (3.0 * static_cast<double>(alive.size()));
        if (p > 1.0) p = 1.0;
        std::vector<int> bite;
        for (int t : alive)
            if (rng.chance(p)) bite.push_back(t);
        rng.shuffle(bite);
        for (int t : bite)
            if (triple_free(t)) take(t);
        // drop triples that lost a vertex
        std::vector<int> next;
        next.reserve(alive.size());
        for (int t : alive)
            if (triple_free(t)) next.push_back(t);
        alive.swap(next);
        free_vertices = nverts - 3LL * static_cast<long long>(picked.size());
    }

    // greedy completion guarantees maximality
    rng.shuffle(alive);
    for (int t : alive)
        if (triple_free(t)) take(t);

    std::sort(picked.begin(), picked.end());
    NibbleResult res;
    res.picked = std::move(picked);
    res.covered_fraction =
        nverts == 0 ? 1.0
                    : 3.0 * static_cast<double>(res.picked.size()) /
                          static_cast<double>(nverts);
    return res;
}

CappedMatching claim_matching(const std::vector<Matching>& matchings,
                              int num_vertices, int m, std::uint64_t seed) {
    AuxHypergraph h = build_aux_hypergraph(matchings, num_vertices, m, seed);
    Rng salt(seed);
    NibbleResult nib = nibble_matching(h, salt.fork(1).next());

    CappedMatching out;
    out.classes.assign(matchings.size(), {});
    out.covered_fraction = nib.covered_fraction;
    for (int t : nib.picked) {
        const auto& tr = h.triples[t];
        out.classes[tr.matching].emplace_back(tr.u, tr.v);
    }
    for (Matching& c : out.classes) canonicalize(c);
    return out;
}

DeficitReport prune_deficits(const CappedMatching& m_capped, long long m,
                             double delta) {
    DeficitReport rep;
    const double threshold = static_cast<double>(m) / (1.0 + delta);
    for (std::size_t i = 0; i < m_capped.classes.size(); ++i) {
        const long long sz = static_cast<long long>(m_capped.classes[i].size());
        rep.per_colour.push_back(m - sz);
        rep.total += m - sz;
        if (static_cast<double>(sz) + 1e-12 >= threshold)
            rep.survivors.push_back(static_cast<int>(i));
    }
    return rep;
}

}  // namespace colmatch
