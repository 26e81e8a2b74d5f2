#include "colmatch/fallback.hpp"

#include <algorithm>
#include <numeric>

#include "colmatch/rng.hpp"

namespace colmatch {

namespace {

// Best-effort greedy: fills each demand as far as it can and never fails.
// Demand order, matching ties and edge picks are all driven by the rng.
Solution greedy_partial(const Instance& inst, const DemandSequence& dem,
                        Rng& rng, bool identity) {
    const int k = dem.k();
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dem.demands[a] > dem.demands[b];
    });

    std::vector<char> used(inst.n2, 0);
    std::vector<char> taken(inst.ell(), 0);
    std::vector<Matching> classes(k);
    std::vector<int> chosen(k, -1);

    for (int pos : order) {
        const long long need = dem.demands[pos];
        int best = -1;
        if (identity) {
            best = pos;
        } else {
            // matching with the most free edges; random ties via shuffle
            std::vector<int> cand;
            for (int m = 0; m < inst.ell(); ++m)
                if (!taken[m]) cand.push_back(m);
            rng.shuffle(cand);
            long long best_free = -1;
            for (int m : cand) {
                long long free_edges = 0;
                for (const Edge& e : inst.matchings[m])
                    if (!used[e.u] && !used[e.v]) ++free_edges;
                if (free_edges > best_free) {
                    best_free = free_edges;
                    best = m;
                }
            }
        }
        taken[best] = 1;
        chosen[pos] = best;
        Matching free_list;
        for (const Edge& e : inst.matchings[best])
            if (!used[e.u] && !used[e.v]) free_list.push_back(e);
        rng.shuffle(free_list);
        for (const Edge& e : free_list) {
            if (static_cast<long long>(classes[pos].size()) == need) break;
            if (used[e.u] || used[e.v]) continue;
            used[e.u] = used[e.v] = 1;
            classes[pos].push_back(e);
        }
    }
    return make_solution(classes, chosen);
}

long long total_deficit(const DemandSequence& dem, const Solution& sol) {
    long long d = 0;
    for (int i = 0; i < dem.k(); ++i)
        d += std::max(0LL, dem.demands[i] - sol.counts[i]);
    return d;
}

// Random edge removals open room for the next polish pass.
Solution perturb(const Instance& inst, const Solution& sol, Rng& rng) {
    Solution out = sol;
    if (out.edges.empty()) return out;
    std::vector<Edge> kept;
    for (const Edge& e : out.edges)
        if (!rng.chance(0.15)) kept.push_back(e);
    if (kept.size() == out.edges.size() && !kept.empty())
        kept.erase(kept.begin() + static_cast<long long>(
                                      rng.below(kept.size())));
    out.edges = std::move(kept);
    // recount per demand
    std::vector<std::vector<Vertex>> partners;
    for (int idx : out.chosen)
        partners.push_back(partner_map(inst.matchings[idx], inst.n2));
    std::fill(out.counts.begin(), out.counts.end(), 0);
    for (const Edge& e : out.edges)
        for (std::size_t i = 0; i < partners.size(); ++i)
            if (partners[i][e.u] == e.v) {
                ++out.counts[i];
                break;
            }
    return out;
}

// All k-subsets of [0, ell) in lexicographic order, capped.
bool next_subset(std::vector<int>& idx, int ell) {
    const int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[i] == ell - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    return true;
}

double subset_count(int ell, int k) {
    double c = 1;
    for (int i = 0; i < k; ++i) c = c * (ell - i) / (i + 1);
    return c;
}

}  // namespace

SolveResult fallback_chain(const Instance& inst, const DemandSequence& dem,
                           std::uint64_t seed, const SolveOptions& opts) {
    SolveResult res;
    const int k = dem.k();
    const long long n = inst.n();

    if (k > inst.ell()) {
        res.status = SolveResult::Status::kInfeasible;
        res.tier = "structural";
        res.note("more demands than matchings: no k distinct matchings exist");
        return res;
    }
    if (dem.total() > n) {
        res.status = SolveResult::Status::kInfeasible;
        res.tier = "structural";
        res.note("demand total exceeds the size of any matching");
        return res;
    }

    // tier 1: deterministic greedy (free assignment only)
    if (!opts.identity_assignment) {
        if (auto sol = greedy_colourful_matching(inst, dem)) {
            if (verify_solution(inst, dem, *sol).ok()) {
                res.status = SolveResult::Status::kFeasible;
                res.solution = std::move(*sol);
                res.tier = "greedy";
                res.ell_used = k;
                return res;
            }
        }
        res.note("greedy tier failed");
    }

    // tier 2: seeded greedy restarts, each polished by augmenting search
    Rng rng(seed);
    std::optional<Solution> best;
    long long best_deficit = -1;
    for (int attempt = 0; attempt < opts.restart_attempts; ++attempt) {
        Rng sub = rng.fork(attempt + 1);
        Solution start =
            (best && attempt % 2 == 1)
                ? perturb(inst, *best, sub)
                : greedy_partial(inst, dem, sub, opts.identity_assignment);
        Solution polished =
            local_search_improve(inst, dem, start, opts.local_search_budget);
        const long long deficit = total_deficit(dem, polished);
        if (deficit == 0 && verify_solution(inst, dem, polished).ok()) {
            res.status = SolveResult::Status::kFeasible;
            res.solution = std::move(polished);
            res.tier = "local-search";
            res.ell_used = k;
            res.note("local search succeeded on restart " +
                     std::to_string(attempt));
            return res;
        }
        if (best_deficit < 0 || deficit < best_deficit) {
            best_deficit = deficit;
            best = std::move(polished);
        }
    }
    res.note("local-search tier failed, best deficit " +
             std::to_string(best_deficit));

    // tier 3: exact search when the instance is small enough
    if (inst.n2 <= opts.oracle_cap) {
        if (opts.identity_assignment) {
            std::vector<int> chosen(k);
            std::iota(chosen.begin(), chosen.end(), 0);
            if (auto sol = exact_colourful_matching(inst, dem, chosen,
                                                    opts.oracle_cap)) {
                res.status = SolveResult::Status::kFeasible;
                res.solution = std::move(*sol);
                res.tier = "oracle";
                res.ell_used = k;
                return res;
            }
            res.status = SolveResult::Status::kInfeasible;
            res.tier = "oracle";
            res.note("exact search ruled out the identity assignment");
            return res;
        }
        const double subsets = subset_count(inst.ell(), k);
        if (subsets <= 10000.0) {
            std::vector<int> chosen(k);
            std::iota(chosen.begin(), chosen.end(), 0);
            do {
                if (auto sol = exact_colourful_matching(inst, dem, chosen,
                                                        opts.oracle_cap)) {
                    res.status = SolveResult::Status::kFeasible;
                    res.solution = std::move(*sol);
                    res.tier = "oracle";
                    res.ell_used = k;
                    return res;
                }
            } while (next_subset(chosen, inst.ell()));
            res.status = SolveResult::Status::kInfeasible;
            res.tier = "oracle";
            res.note("exact search exhausted every matching subset");
            return res;
        }
        // too many subsets to prove absence; try the first k only
        std::vector<int> chosen(k);
        std::iota(chosen.begin(), chosen.end(), 0);
        if (auto sol =
                exact_colourful_matching(inst, dem, chosen, opts.oracle_cap)) {
            res.status = SolveResult::Status::kFeasible;
            res.solution = std::move(*sol);
            res.tier = "oracle";
            res.ell_used = k;
            return res;
        }
        res.note("exact search on the identity subset found nothing");
    }

    res.status = SolveResult::Status::kNoSolutionFound;
    res.tier = "exhausted";
    return res;
}

}  // namespace colmatch
