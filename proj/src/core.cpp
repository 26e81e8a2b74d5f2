#include "colmatch/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "colmatch/rng.hpp"

namespace colmatch {

std::string Report::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.code << ": " << v.message << "\n";
    return os.str();
}

void canonicalize(Matching& m) {
    for (Edge& e : m)
        if (e.u > e.v) std::swap(e.u, e.v);
    std::sort(m.begin(), m.end());
}

void canonicalize(Instance& inst) {
    for (Matching& m : inst.matchings) canonicalize(m);
}

void canonicalize(Solution& sol) { canonicalize(sol.edges); }

Instance round_robin_one_factorization(int n2) {
    if (n2 < 2 || n2 % 2 != 0)
        throw InvalidInputError("vertex count must be even and at least 2");
    Instance inst;
    inst.n2 = n2;
    if (n2 == 2) {
        inst.matchings.push_back({Edge(0, 1)});
        return inst;
    }
    // Circle method: vertex n2-1 sits in the hub, the others rotate.
    const int mod = n2 - 1;
    for (int round = 0; round < mod; ++round) {
        Matching m;
        m.reserve(n2 / 2);
        m.emplace_back(n2 - 1, round);
        for (int i = 1; i <= (n2 - 2) / 2; ++i) {
            int a = (round + i) % mod;
            int b = (round - i + mod) % mod;
            m.emplace_back(a, b);
        }
        canonicalize(m);
        inst.matchings.push_back(std::move(m));
    }
    return inst;
}

Instance relabel_with(const Instance& inst, const std::vector<Vertex>& perm) {
    if (static_cast<int>(perm.size()) != inst.n2)
        throw InvalidInputError("permutation size must equal vertex count");
    Instance out;
    out.n2 = inst.n2;
    out.matchings.reserve(inst.matchings.size());
    for (const Matching& m : inst.matchings) {
        Matching nm;
        nm.reserve(m.size());
        for (const Edge& e : m) nm.emplace_back(perm[e.u], perm[e.v]);
        canonicalize(nm);
        out.matchings.push_back(std::move(nm));
    }
    return out;
}

Instance relabel_random(const Instance& inst, std::uint64_t seed) {
    std::vector<Vertex> perm(inst.n2);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    return relabel_with(inst, perm);
}

Report verify_instance(const Instance& inst) {
    Report rep;
    if (inst.n2 < 2 || inst.n2 % 2 != 0)
        rep.add("bad-order", "vertex count must be even and at least 2");
    if (inst.matchings.empty())
        rep.add("no-matchings", "instance must hold at least one matching");
    if (!rep.ok()) return rep;

    for (int i = 0; i < inst.ell(); ++i) {
        const Matching& m = inst.matchings[i];
        std::vector<int> cover(inst.n2, 0);
        bool ids_ok = true;
        for (const Edge& e : m) {
            if (e.u < 0 || e.v >= inst.n2 || e.u == e.v) {
                rep.add("bad-vertex", "matching " + std::to_string(i) +
                                          " has an edge with invalid endpoints");
                ids_ok = false;
                break;
            }
            ++cover[e.u];
            ++cover[e.v];
        }
        if (!ids_ok) continue;
        bool perfect = static_cast<int>(m.size()) == inst.n2 / 2;
        for (int v = 0; v < inst.n2 && perfect; ++v) perfect = cover[v] == 1;
        if (!perfect)
            rep.add("perfection", "matching " + std::to_string(i) +
                                      " does not cover every vertex exactly once");
    }

    // pairwise edge-disjointness over the whole family
    std::vector<std::pair<Edge, int>> all;
    for (int i = 0; i < inst.ell(); ++i)
        for (const Edge& e : inst.matchings[i]) all.push_back({e, i});
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (all[i].first == all[i - 1].first) {
            std::ostringstream os;
            os << "edge {" << all[i].first.u << "," << all[i].first.v
               << "} appears in matchings " << all[i - 1].second << " and "
               << all[i].second;
            rep.add("edge-disjointness", os.str());
        }
    }
    return rep;
}

Report verify_demands(const DemandSequence& dem, long long n) {
    Report rep;
    if (dem.demands.empty()) rep.add("no-demands", "demand list is empty");
    for (std::size_t i = 0; i < dem.demands.size(); ++i)
        if (dem.demands[i] < 1)
            rep.add("nonpositive-demand",
                    "demand " + std::to_string(i) + " is below 1");
    if (dem.total() > n)
        rep.add("demand-budget", "demand total exceeds half-order n");
    if (!(dem.epsilon > 0.0 && dem.epsilon < 1.0))
        rep.add("bad-epsilon", "epsilon must lie in (0,1)");
    return rep;
}

Report verify_solution(const Instance& inst, const DemandSequence& dem,
                       const Solution& sol) {
    Report rep;
    const int k = dem.k();
    if (static_cast<int>(sol.chosen.size()) != k ||
        static_cast<int>(sol.counts.size()) != k) {
        rep.add("shape", "chosen/counts must both have one entry per demand");
        return rep;
    }
    std::vector<int> seen_matching(inst.ell(), 0);
    for (int idx : sol.chosen) {
        if (idx < 0 || idx >= inst.ell()) {
            rep.add("bad-chosen", "chosen index " + std::to_string(idx) +
                                      " out of range");
            return rep;
        }
        if (seen_matching[idx]++)
            rep.add("duplicate-chosen",
                    "matching " + std::to_string(idx) + " chosen twice");
    }

    // M must be a matching over valid vertices
    std::vector<int> cover(inst.n2, 0);
    for (const Edge& e : sol.edges) {
        if (e.u < 0 || e.v >= inst.n2 || e.u == e.v) {
            rep.add("bad-vertex", "solution edge has invalid endpoints");
            return rep;
        }
        if (++cover[e.u] > 1 || ++cover[e.v] > 1) {
            std::ostringstream os;
            os << "vertex reused by edge {" << e.u << "," << e.v << "}";
            rep.add("not-a-matching", os.str());
        }
    }

    // every edge lies in exactly one chosen matching, counts recomputed
    std::vector<std::vector<Vertex>> partners;
    partners.reserve(k);
    for (int i = 0; i < k; ++i)
        partners.push_back(partner_map(inst.matchings[sol.chosen[i]], inst.n2));
    std::vector<long long> recount(k, 0);
    for (const Edge& e : sol.edges) {
        int home = -1;
        for (int i = 0; i < k; ++i) {
            if (partners[i][e.u] == e.v) {
                home = i;
                break;
            }
        }
        if (home < 0) {
            std::ostringstream os;
            os << "edge {" << e.u << "," << e.v << "} lies in no chosen matching";
            rep.add("edge-not-chosen", os.str());
        } else {
            ++recount[home];
        }
    }
    for (int i = 0; i < k; ++i) {
        if (recount[i] != sol.counts[i])
            rep.add("count-mismatch",
                    "stored count for demand " + std::to_string(i) +
                        " is " + std::to_string(sol.counts[i]) + ", actual " +
                        std::to_string(recount[i]));
        if (recount[i] < dem.demands[i])
            rep.add("demand-unmet",
                    "demand " + std::to_string(i) + " needs " +
                        std::to_string(dem.demands[i]) + ", got " +
                        std::to_string(recount[i]));
    }
    return rep;
}

std::vector<Vertex> partner_map(const Matching& m, int n2) {
    std::vector<Vertex> partner(n2, -1);
    for (const Edge& e : m) {
        partner[e.u] = e.v;
        partner[e.v] = e.u;
    }
    return partner;
}

Solution make_solution(const std::vector<Matching>& classes,
                       const std::vector<int>& chosen) {
    Solution sol;
    sol.chosen = chosen;
    sol.counts.reserve(classes.size());
    for (const Matching& c : classes) {
        sol.counts.push_back(static_cast<long long>(c.size()));
        sol.edges.insert(sol.edges.end(), c.begin(), c.end());
    }
    canonicalize(sol);
    return sol;
}

}  // namespace colmatch
