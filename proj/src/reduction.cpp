#include "colmatch/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "colmatch/bucket_pipeline.hpp"
#include "colmatch/fallback.hpp"
#include "colmatch/necklace.hpp"
#include "colmatch/rng.hpp"

namespace colmatch {

namespace {
constexpr double kTol = 1e-9;
}

std::string ReductionChain::to_json() const {
    nlohmann::json j;
    j["epsilon"] = epsilon;
    j["delta"] = delta;
    j["mu"] = mu;
    j["S"] = cap_s;
    j["lambda"] = lambda;
    j["n"] = n;
    j["s"] = s;
    j["sequences"] = chain;
    j["sums"] = sums;
    j["ratios"] = ratios;
    nlohmann::json pq_arr = nlohmann::json::array();
    for (auto [p, q] : pq) pq_arr.push_back({p, q});
    j["pq"] = std::move(pq_arr);
    return j.dump();
}

long long rescale_value(long long value, double lambda, double ratio) {
    const double scaled =
        (1.0 + lambda) / (1.0 - ratio) * static_cast<double>(value);
    return static_cast<long long>(std::floor(scaled + kTol));
}

PqChoice choose_pq(double ratio, long long n, double delta) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw InvalidInputError("ratio must lie strictly between 0 and 1");
    PqChoice out;
    const double band = std::pow(static_cast<double>(n), 4.0 * delta);
    long long q = static_cast<long long>(std::ceil(band / 4.0 - kTol));
    if (q < 2) {
        q = 2;
        out.in_regime = false;
    }
    if (static_cast<double>(q) > band / 2.0 + kTol) out.in_regime = false;
    long long p = static_cast<long long>(std::floor(
        ratio * static_cast<double>(q) + kTol));
    if (p < 1) {
        p = 1;
        out.in_regime = false;
    }
    if (p > q - 1) {
        p = q - 1;
        out.in_regime = false;
    }
    const double gap = ratio - static_cast<double>(p) / static_cast<double>(q);
    if (gap < -kTol || gap > 1.0 / static_cast<double>(q) + kTol)
        out.in_regime = false;
    out.p = p;
    out.q = q;
    return out;
}

namespace {

void require(bool ok, const char* rule, const std::string& msg) {
    if (!ok) throw RegimeError(rule, msg);
}

// Shared between construction-time assertion and the independent checker.
Report check_chain_impl(const ReductionChain& c) {
    Report rep;
    const double n_pow_delta =
        std::pow(static_cast<double>(c.n), -c.delta);
    if (c.s >= c.cap_s)
        rep.add("step-bound", "chain used " + std::to_string(c.s) +
                                  " steps, cap is " + std::to_string(c.cap_s));
    for (std::size_t j = 0; j < c.chain.size(); ++j) {
        const auto& seq = c.chain[j];
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (seq[i - 1] > seq[i])
                rep.add("nondecreasing-sequence",
                        "sequence " + std::to_string(j) + " decreases at " +
                            std::to_string(i));
        long long sum = 0;
        for (long long v : seq) sum += v;
        if (j < c.sums.size() && sum != c.sums[j])
            rep.add("sum-mismatch", "stored sum for step " + std::to_string(j) +
                                        " disagrees with the sequence");
        if (static_cast<double>(sum) >
            (1.0 - c.epsilon / 2.0) * static_cast<double>(c.n) + kTol)
            rep.add("sum-cap", "sum at step " + std::to_string(j) +
                                   " exceeds (1 - eps/2) n");
    }
    for (std::size_t j = 0; j + 1 < c.chain.size(); ++j) {
        const auto& cur = c.chain[j];
        const auto& nxt = c.chain[j + 1];
        if (nxt.size() + 1 != cur.size()) {
            rep.add("shape", "step " + std::to_string(j + 1) +
                                 " should drop exactly one element");
            continue;
        }
        for (std::size_t i = 0; i < nxt.size(); ++i)
            if (nxt[i] < cur[i])
                rep.add("monotone-step",
                        "element " + std::to_string(i) + " shrank at step " +
                            std::to_string(j + 1));
        const double lo = (1.0 + c.lambda / 2.0) * static_cast<double>(c.sums[j]);
        const double hi = (1.0 + c.lambda) * static_cast<double>(c.sums[j]);
        const double got = static_cast<double>(c.sums[j + 1]);
        if (got + kTol < lo || got > hi + kTol) {
            std::ostringstream os;
            os << "sum grew from " << c.sums[j] << " to " << c.sums[j + 1]
               << ", outside [" << lo << ", " << hi << "]";
            rep.add("sum-growth", os.str());
        }
    }
    for (std::size_t j = 0; j < c.ratios.size(); ++j) {
        if (c.ratios[j] + kTol < n_pow_delta)
            rep.add("ratio-floor", "ratio at step " + std::to_string(j) +
                                       " fell below n^-delta");
        if (!(c.ratios[j] > 0.0 && c.ratios[j] < 1.0))
            rep.add("ratio-range",
                    "ratio at step " + std::to_string(j) + " outside (0,1)");
    }
    return rep;
}

}  // namespace

ReductionChain build_chain(const DemandSequence& dem, long long n) {
    ReductionChain c;
    c.epsilon = dem.epsilon;
    c.delta = dem.epsilon / 10.0;
    c.mu = dem.epsilon / (2.0 * (1.0 - dem.epsilon));
    c.cap_s = static_cast<long long>(std::ceil(
        2.0 * (1.0 + c.mu) * std::pow(static_cast<double>(n), c.delta) *
            std::log(static_cast<double>(n)) -
        kTol));
    c.lambda = std::log1p(c.mu) / static_cast<double>(c.cap_s);
    c.n = n;

    const int k = dem.k();
    const double floor_regime =
        std::pow(static_cast<double>(n), dem.epsilon);
    for (int i = 1; i < k; ++i)
        require(dem.demands[i - 1] <= dem.demands[i], "nondecreasing-sequence",
                "demands must be sorted nondecreasing");
    for (long long a : dem.demands)
        require(static_cast<double>(a) + kTol >= floor_regime,
                "demand-too-small", "every demand must reach n^epsilon");
    const long long sigma0 = dem.total();
    require(static_cast<double>(sigma0) <
                (1.0 - dem.epsilon) * static_cast<double>(n) + kTol,
            "sum-budget", "demand total must stay below (1 - epsilon) n");
    require(3 * sigma0 >= n, "sum-below-greedy",
            "demand total below n/3 belongs to the greedy regime");

    c.chain.push_back(dem.demands);
    c.sums.push_back(sigma0);

    const double stop_threshold =
        std::pow(static_cast<double>(n), 1.0 - c.delta);
    int j = 0;
    while (true) {
        const auto& cur = c.chain.back();
        const long long largest = cur.back();
        if (static_cast<double>(largest) <= stop_threshold + kTol ||
            static_cast<int>(cur.size()) == 1)
            break;
        require(j + 1 < c.cap_s, "step-bound",
                "chain construction would exceed its step cap");

        const double ratio =
            static_cast<double>(largest) / static_cast<double>(c.sums.back());
        c.ratios.push_back(ratio);
        std::vector<long long> next(cur.begin(), cur.end() - 1);
        for (long long& v : next) v = rescale_value(v, c.lambda, ratio);
        long long sum = 0;
        for (long long v : next) sum += v;
        c.chain.push_back(std::move(next));
        c.sums.push_back(sum);
        ++j;
    }
    c.s = j;

    for (std::size_t step = 1; step < c.chain.size(); ++step) {
        PqChoice pq = choose_pq(c.ratios[step - 1], n, c.delta);
        c.pq.emplace_back(pq.p, pq.q);
    }

    Report rep = check_chain_impl(c);
    if (!rep.ok())
        throw RegimeError(rep.violations.front().code,
                          "chain invariant failed: " + rep.to_string());
    return c;
}

Report happy_check_chain(const ReductionChain& chain) {
    return check_chain_impl(chain);
}

namespace {

long long class_deficit(const std::vector<Matching>& classes,
                        const std::vector<long long>& demands) {
    long long d = 0;
    for (std::size_t i = 0; i < demands.size(); ++i) {
        long long have =
            i < classes.size() ? static_cast<long long>(classes[i].size()) : 0;
        d += std::max(0LL, demands[i] - have);
    }
    return d;
}

}  // namespace

SolveResult solve_large(const Instance& inst, const DemandSequence& dem,
                        std::uint64_t seed, const SolveOptions& opts) {
    SolveResult res;
    const long long n = inst.n();
    const int k = dem.k();

    Report dem_rep = verify_demands(dem, n);
    if (dem_rep.has("no-demands") || dem_rep.has("nonpositive-demand") ||
        dem_rep.has("bad-epsilon"))
        throw InvalidInputError("bad demand sequence: " + dem_rep.to_string());

    // work on the sorted sequence, remembering the way back
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dem.demands[a] < dem.demands[b];
    });
    DemandSequence sorted;
    sorted.epsilon = dem.epsilon;
    for (int idx : order) sorted.demands.push_back(dem.demands[idx]);

    // below n/3 total the greedy route is the intended one
    if (3 * sorted.total() < n) {
        res.note("demand total below n/3: greedy regime");
        if (!opts.fallback) {
            if (auto sol = greedy_colourful_matching(inst, dem)) {
                res.status = SolveResult::Status::kFeasible;
                res.solution = std::move(*sol);
                res.tier = "greedy";
                res.ell_used = k;
                return res;
            }
            res.status = SolveResult::Status::kNoSolutionFound;
            res.tier = "greedy";
            return res;
        }
        SolveResult fb = fallback_chain(inst, dem, seed, opts);
        fb.log.insert(fb.log.begin(), res.log.begin(), res.log.end());
        return fb;
    }

    bool lifted_ok = false;
    std::vector<Matching> classes;  // per sorted position
    std::vector<int> chosen;        // matching index per sorted position
    long long ell_used = 0;

    try {
        ReductionChain chain = build_chain(sorted, n);
        res.note("chain built with s = " + std::to_string(chain.s));

        const int s = chain.s;
        const int base_k = k - s;
        // the base sequence draws on the first matchings, lifts take the rest
        if (inst.ell() < k)
            throw RegimeError("ell-short", "instance has fewer matchings than demands");

        Instance base_inst;
        base_inst.n2 = inst.n2;
        const int base_ell = inst.ell() - s;
        for (int i = 0; i < base_ell; ++i)
            base_inst.matchings.push_back(inst.matchings[i]);

        DemandSequence base_dem;
        base_dem.demands = chain.chain[s];
        base_dem.epsilon = std::min(0.999, std::max(chain.delta, 1e-6));

        std::optional<Solution> base_sol;
        std::string base_tier;
        if (base_k == 1) {
            // one demand: fill it straight from the first matching
            const long long need = base_dem.demands[0];
            if (static_cast<long long>(base_inst.matchings[0].size()) >= need) {
                Matching cls(base_inst.matchings[0].begin(),
                             base_inst.matchings[0].begin() + need);
                base_sol = make_solution({cls}, {0});
                base_tier = "single";
                ell_used = 1;
            }
        } else {
            SolveOptions base_opts = opts;
            SolveResult base =
                solve_small(base_inst, base_dem, seed, base_opts);
            for (const std::string& line : base.log)
                res.note("base: " + line);
            if (base.feasible()) {
                base_sol = std::move(base.solution);
                base_tier = base.tier;
                ell_used = base.ell_used;
            }
        }

        if (base_sol) {
            res.note("base sequence solved via " + base_tier);
            // split base solution into per-position classes
            classes.assign(base_k, {});
            chosen.assign(base_k, -1);
            std::vector<std::vector<Vertex>> partners;
            for (int i = 0; i < base_k; ++i) {
                chosen[i] = base_sol->chosen[i];
                partners.push_back(
                    partner_map(base_inst.matchings[chosen[i]], inst.n2));
            }
            for (const Edge& e : base_sol->edges)
                for (int i = 0; i < base_k; ++i)
                    if (partners[i][e.u] == e.v) {
                        classes[i].push_back(e);
                        break;
                    }

            // unwind: one lift per chain step
            lifted_ok = true;
            int next_matching = base_ell;
            for (int step = s; step >= 1 && lifted_ok; --step) {
                auto [p64, q64] = chain.pq[step - 1];
                int p = static_cast<int>(p64), q = static_cast<int>(q64);
                if (opts.forced_pq) {
                    p = opts.forced_pq->first;
                    q = opts.forced_pq->second;
                }
                const Matching& extra = inst.matchings[next_matching];
                try {
                    LiftResult lift = lift_one(classes, extra, p, q);
                    classes = std::move(lift.classes);
                    chosen.push_back(next_matching);
                    ++next_matching;
                    ++ell_used;
                    const auto& target = chain.chain[step - 1];
                    const long long deficit = class_deficit(classes, target);
                    res.note("lift to step " + std::to_string(step - 1) +
                             ": cuts " + std::to_string(lift.cuts) +
                             ", conflicts " +
                             std::to_string(lift.conflict_pairs) +
                             ", deficit " + std::to_string(deficit));
                    if (deficit > 0) lifted_ok = false;
                } catch (const SplitNotFoundError& e) {
                    res.note(std::string("lift split failed: ") + e.what());
                    lifted_ok = false;
                } catch (const InvalidInputError& e) {
                    res.note(std::string("lift rejected: ") + e.what());
                    lifted_ok = false;
                }
            }
        } else {
            res.note("base sequence unsolved");
        }
    } catch (const RegimeError& e) {
        res.note(std::string("chain out of regime [") + e.rule + "]: " +
                 e.what());
    }

    if (lifted_ok && static_cast<int>(classes.size()) == k) {
        // map sorted positions back to the caller's demand order
        std::vector<Matching> by_input(k);
        std::vector<int> chosen_by_input(k);
        for (int pos = 0; pos < k; ++pos) {
            by_input[order[pos]] = classes[pos];
            chosen_by_input[order[pos]] = chosen[pos];
        }
        Solution sol = make_solution(by_input, chosen_by_input);
        Report rep = verify_solution(inst, dem, sol);
        if (rep.ok()) {
            res.status = SolveResult::Status::kFeasible;
            res.solution = std::move(sol);
            res.tier = "reduction";
            res.ell_used = ell_used;
            return res;
        }
        res.note("lifted solution failed verification: " + rep.to_string());
    }

    if (!opts.fallback) {
        res.status = SolveResult::Status::kNoSolutionFound;
        res.tier = "reduction-only";
        return res;
    }
    SolveResult fb = fallback_chain(inst, dem, seed, opts);
    fb.log.insert(fb.log.begin(), res.log.begin(), res.log.end());
    return fb;
}

}  // namespace colmatch
