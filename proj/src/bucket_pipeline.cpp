#include "colmatch/bucket_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "colmatch/fallback.hpp"
#include "colmatch/hypermatch.hpp"
#include "colmatch/rng.hpp"

namespace colmatch {

namespace {

constexpr double kTol = 1e-9;

long long floor_tol(double x) { return static_cast<long long>(std::floor(x + kTol)); }
long long ceil_tol(double x) { return static_cast<long long>(std::ceil(x - kTol)); }

}  // namespace

int BucketPlan::bucket_of(long long x) const {
    if (x < 1) return -1;
    if (x <= c) return x <= t ? static_cast<int>(x) - 1 : -1;
    // smallest geometric bucket whose upper endpoint reaches x
    int lo = static_cast<int>(c), hi = t - 1;  // 0-based candidates
    if (hi < lo || static_cast<double>(x) > buckets[hi].hi + kTol) return -1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (static_cast<double>(x) <= buckets[mid].hi + kTol)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

std::string BucketPlan::to_json() const {
    nlohmann::json j;
    j["epsilon"] = epsilon;
    j["delta"] = delta;
    j["lambda"] = lambda;
    j["K"] = big_k;
    j["C"] = c;
    j["t"] = t;
    j["n"] = n;
    j["k"] = k;
    j["ell"] = ell;
    j["p0"] = p0;
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        const Bucket& b = buckets[i];
        nlohmann::json jb;
        jb["j"] = i + 1;
        jb["lo"] = b.lo;
        jb["hi"] = b.hi;
        jb["m"] = b.target;
        jb["n_j"] = b.count;
        jb["b"] = b.budget;
        jb["D"] = b.density;
        jb["Delta"] = b.deviation;
        jb["p"] = b.prob;
        arr.push_back(std::move(jb));
    }
    j["buckets"] = std::move(arr);
    return j.dump();
}

BucketPlan build_plan(const DemandSequence& dem, long long n) {
    if (!(dem.epsilon > 0.0 && dem.epsilon < 1.0))
        throw InvalidInputError("epsilon must lie in (0,1)");
    if (n < 1) throw InvalidInputError("half-order n must be positive");

    BucketPlan plan;
    plan.epsilon = dem.epsilon;
    plan.delta = dem.epsilon / 100.0;
    plan.lambda = dem.epsilon / 400.0;
    plan.big_k = 4.0 / plan.lambda;
    plan.c = ceil_tol(1.0 / plan.delta);
    plan.n = n;
    plan.k = dem.k();

    const double limit = std::pow(static_cast<double>(n), 1.0 - plan.epsilon);
    for (long long a : dem.demands)
        if (static_cast<double>(a) > limit + kTol)
            throw RegimeError("demand-too-large",
                              "a demand exceeds n^(1-epsilon) = " +
                                  std::to_string(limit));
    if (static_cast<double>(dem.total()) >=
        (1.0 - plan.epsilon / 2.0) * static_cast<double>(n))
        throw RegimeError("sum-budget",
                          "demand total reaches (1 - epsilon/2) n");

    // geometric endpoints e_i = C (1+delta)^i; singleton buckets cover [1, C]
    int extra = 0;
    {
        double e = static_cast<double>(plan.c);
        while (e + kTol < limit) {
            e *= 1.0 + plan.delta;
            ++extra;
        }
    }
    plan.t = static_cast<int>(plan.c) + extra;

    // endpoints up to index extra+2 so every bucket's target is defined
    std::vector<double> endpoint(extra + 3);
    endpoint[0] = static_cast<double>(plan.c);
    for (int i = 1; i < static_cast<int>(endpoint.size()); ++i)
        endpoint[i] = endpoint[i - 1] * (1.0 + plan.delta);

    plan.buckets.resize(plan.t);
    for (int j = 1; j <= plan.t; ++j) {
        BucketPlan::Bucket& b = plan.buckets[j - 1];
        if (j <= plan.c) {
            b.lo = static_cast<double>(j - 1);
            b.hi = static_cast<double>(j);
            b.min_value = b.max_value = j;
            b.target = j;
        } else {
            const int i = j - static_cast<int>(plan.c);
            b.lo = endpoint[i - 1];
            b.hi = endpoint[i];
            b.min_value = floor_tol(b.lo) + 1;
            b.max_value = floor_tol(b.hi);
            // smallest integer two intervals up
            b.target = floor_tol(endpoint[i + 1]) + 1;
        }
    }

    for (int i = 0; i < dem.k(); ++i) {
        const int idx = plan.bucket_of(dem.demands[i]);
        if (idx < 0)
            throw RegimeError("demand-too-large",
                              "demand " + std::to_string(dem.demands[i]) +
                                  " falls outside every bucket");
        ++plan.buckets[idx].count;
        plan.buckets[idx].demand_idx.push_back(i);
    }

    const double stretch =
        std::pow(static_cast<double>(n), plan.lambda + 0.5);
    for (BucketPlan::Bucket& b : plan.buckets) {
        if (b.count == 0) {
            b.budget = 0;
        } else {
            b.budget =
                b.count +
                ceil_tol(stretch / std::sqrt(static_cast<double>(b.target)));
        }
        plan.ell += b.budget;
        b.density = static_cast<double>(b.budget) *
                    static_cast<double>(b.budget) *
                    static_cast<double>(b.target) / static_cast<double>(n);
        const double dln = b.density > 1.0
                               ? b.density * std::log(b.density)
                               : 0.0;
        b.deviation = plan.big_k * std::sqrt(dln);
        b.prob = static_cast<double>(b.target) *
                 static_cast<double>(b.budget) / static_cast<double>(n);
    }
    double psum = 0;
    for (const BucketPlan::Bucket& b : plan.buckets) psum += b.prob;
    plan.p0 = 1.0 - psum;
    return plan;
}

Report check_plan(const BucketPlan& plan, long long n, long long k) {
    Report rep;
    const double eps = plan.epsilon;
    if (static_cast<double>(plan.ell - k) >
        eps * static_cast<double>(k) + kTol) {
        std::ostringstream os;
        os << "ell - k = " << plan.ell - k << " exceeds eps*k = "
           << eps * static_cast<double>(k);
        rep.add("ell-overhead", os.str());
    }
    double mass = 0;
    for (const BucketPlan::Bucket& b : plan.buckets)
        mass += static_cast<double>(b.budget) * static_cast<double>(b.target);
    if (mass > (1.0 - eps / 4.0) * static_cast<double>(n) + kTol) {
        std::ostringstream os;
        os << "sum b_j m_j = " << mass << " exceeds (1 - eps/4) n = "
           << (1.0 - eps / 4.0) * static_cast<double>(n);
        rep.add("mass-cap", os.str());
    }
    if (plan.p0 < -kTol)
        rep.add("prob-budget", "leftover probability is negative: " +
                                   std::to_string(plan.p0));

    for (int j = 1; j <= plan.t; ++j) {
        const BucketPlan::Bucket& b = plan.buckets[j - 1];
        if (j <= plan.c) {
            if (b.target != j)
                rep.add("target-bracket",
                        "singleton bucket " + std::to_string(j) +
                            " target is " + std::to_string(b.target));
            continue;
        }
        if (b.min_value > b.max_value) {
            rep.add("target-bracket",
                    "bucket " + std::to_string(j) + " holds no integer");
            continue;
        }
        const double one_plus = 1.0 + plan.delta;
        for (long long x : {b.min_value, b.max_value}) {
            const double lo_req = one_plus * static_cast<double>(x);
            const double hi_req =
                one_plus * one_plus * one_plus * static_cast<double>(x);
            if (static_cast<double>(b.target) + kTol < lo_req ||
                static_cast<double>(b.target) > hi_req + kTol) {
                std::ostringstream os;
                os << "bucket " << j << " endpoint " << x << ": target "
                   << b.target << " outside [" << lo_req << ", " << hi_req
                   << "]";
                rep.add("target-bracket", os.str());
            }
        }
    }
    return rep;
}

std::optional<PartitionCertificate> random_partition(const Instance& inst,
                                                     const BucketPlan& plan,
                                                     std::uint64_t seed,
                                                     int retries) {
    if (inst.ell() < plan.ell) return std::nullopt;

    PartitionCertificate cert;
    // first-fit grouping in index order
    cert.groups.assign(plan.t, {});
    {
        int next = 0;
        for (int j = 0; j < plan.t; ++j)
            for (long long c = 0; c < plan.buckets[j].budget; ++c)
                cert.groups[j].push_back(next++);
    }

    Rng rng(seed);
    for (int attempt = 1; attempt <= std::max(1, retries); ++attempt) {
        cert.attempts = attempt;
        cert.part_of.assign(inst.n2, 0);
        for (int v = 0; v < inst.n2; ++v) {
            double u = rng.real();
            double cum = 0;
            int part = 0;
            for (int j = 0; j < plan.t; ++j) {
                cum += plan.buckets[j].prob;
                if (u < cum) {
                    part = j + 1;
                    break;
                }
            }
            cert.part_of[v] = part;
        }

        cert.stats.assign(plan.t, {});
        bool all_ok = true;
        for (int j = 0; j < plan.t && all_ok; ++j) {
            const BucketPlan::Bucket& b = plan.buckets[j];
            PartitionCertificate::BucketStats& st = cert.stats[j];
            if (b.budget == 0) continue;

            std::vector<std::vector<Vertex>> partners;
            for (int mi : cert.groups[j])
                partners.push_back(partner_map(inst.matchings[mi], inst.n2));

            const double deg_lo = b.density - b.deviation;
            const double deg_hi = b.density + b.deviation;
            bool first = true;
            for (int v = 0; v < inst.n2; ++v) {
                if (cert.part_of[v] != j + 1) continue;
                long long deg = 0;
                for (const auto& pm : partners) {
                    Vertex w = pm[v];
                    if (w >= 0 && cert.part_of[w] == j + 1) ++deg;
                }
                if (first || deg < st.deg_lo) st.deg_lo = static_cast<double>(deg);
                if (first || deg > st.deg_hi) st.deg_hi = static_cast<double>(deg);
                first = false;
                if (static_cast<double>(deg) < deg_lo - kTol ||
                    static_cast<double>(deg) > deg_hi + kTol)
                    st.deg_ok = false;
            }

            const double int_lo = b.density * static_cast<double>(b.target) -
                                  b.deviation * static_cast<double>(b.target) / 2.0;
            const double int_hi = b.density * static_cast<double>(b.target) +
                                  b.deviation * static_cast<double>(b.target) / 2.0;
            for (std::size_t mi = 0; mi < cert.groups[j].size(); ++mi) {
                long long cnt = 0;
                for (const Edge& e : inst.matchings[cert.groups[j][mi]])
                    if (cert.part_of[e.u] == j + 1 && cert.part_of[e.v] == j + 1)
                        ++cnt;
                st.intersect.push_back(cnt);
                if (static_cast<double>(cnt) < int_lo - kTol ||
                    static_cast<double>(cnt) > int_hi + kTol)
                    st.intersect_ok = false;
            }
            if (!st.deg_ok || !st.intersect_ok) all_ok = false;
        }
        if (all_ok) {
            cert.pass = true;
            return cert;
        }
    }
    cert.pass = false;
    return cert;
}

DemandSequence augment_sequence(const DemandSequence& dem, long long n) {
    const double lambda = dem.epsilon / 400.0;
    const long long k = dem.k();
    const long long a = ceil_tol(
        std::pow(static_cast<double>(n), 1.0 - lambda) / static_cast<double>(k));
    DemandSequence out = dem;
    for (long long& v : out.demands) v = std::max(v, a);
    if (static_cast<double>(out.total()) >=
        (1.0 - dem.epsilon / 2.0) * static_cast<double>(n))
        throw RegimeError("augmented-sum",
                          "augmented demand total reaches (1 - epsilon/2) n");
    return out;
}

namespace {

// One full pipeline pass; empty optional when any certificate fails.
std::optional<Solution> pipeline_pass(const Instance& inst,
                                      const DemandSequence& dem,
                                      const BucketPlan& plan,
                                      std::uint64_t seed,
                                      const SolveOptions& opts,
                                      SolveResult& res) {
    auto cert_opt = random_partition(inst, plan, seed, opts.partition_retries);
    if (!cert_opt) {
        res.note("partition: instance is short of matchings");
        return std::nullopt;
    }
    if (!cert_opt->pass) {
        res.note("partition: concentration bounds failed after " +
                 std::to_string(cert_opt->attempts) + " attempts");
        return std::nullopt;
    }
    const PartitionCertificate& cert = *cert_opt;
    res.note("partition accepted after " + std::to_string(cert.attempts) +
             " attempts");

    Rng rng(seed);
    std::vector<Matching> classes(dem.k());
    std::vector<int> chosen(dem.k(), -1);

    for (int j = 0; j < plan.t; ++j) {
        const BucketPlan::Bucket& bucket = plan.buckets[j];
        if (bucket.count == 0) continue;

        // restrict the bucket's matchings to its vertex class
        std::vector<Matching> restricted;
        for (int mi : cert.groups[j]) {
            Matching r;
            for (const Edge& e : inst.matchings[mi])
                if (cert.part_of[e.u] == j + 1 && cert.part_of[e.v] == j + 1)
                    r.push_back(e);
            restricted.push_back(std::move(r));
        }
        for (const Matching& r : restricted)
            if (static_cast<long long>(r.size()) < bucket.target) {
                res.note("bucket " + std::to_string(j + 1) +
                         ": a matching is short of the group target");
                return std::nullopt;
            }

        CappedMatching capped =
            claim_matching(restricted, inst.n2, static_cast<int>(bucket.target),
                           rng.fork(j + 1).next());
        DeficitReport deficits =
            prune_deficits(capped, bucket.target, plan.delta);
        if (static_cast<long long>(deficits.survivors.size()) < bucket.count) {
            res.note("bucket " + std::to_string(j + 1) + ": only " +
                     std::to_string(deficits.survivors.size()) +
                     " survivors for " + std::to_string(bucket.count) +
                     " demands");
            return std::nullopt;
        }

        // n_j largest survivors serve the bucket's demands in descending order
        std::vector<int> by_size = deficits.survivors;
        std::stable_sort(by_size.begin(), by_size.end(), [&](int a, int b) {
            return capped.classes[a].size() > capped.classes[b].size();
        });
        std::vector<int> dem_desc = bucket.demand_idx;
        std::stable_sort(dem_desc.begin(), dem_desc.end(), [&](int a, int b) {
            return dem.demands[a] > dem.demands[b];
        });
        for (std::size_t r = 0; r < dem_desc.size(); ++r) {
            const int demand_pos = dem_desc[r];
            const int cls = by_size[r];
            if (static_cast<long long>(capped.classes[cls].size()) <
                dem.demands[demand_pos]) {
                res.note("bucket " + std::to_string(j + 1) +
                         ": surviving class smaller than its demand");
                return std::nullopt;
            }
            classes[demand_pos] = capped.classes[cls];
            chosen[demand_pos] = cert.groups[j][cls];
        }
    }

    Solution sol = make_solution(classes, chosen);
    Report rep = verify_solution(inst, dem, sol);
    if (!rep.ok())
        throw std::logic_error("pipeline assembly failed verification: " +
                               rep.to_string());
    return sol;
}

}  // namespace

SolveResult solve_small(const Instance& inst, const DemandSequence& dem,
                        std::uint64_t seed, const SolveOptions& opts) {
    SolveResult res;
    const long long n = inst.n();
    Report dem_rep = verify_demands(dem, n);
    if (dem_rep.has("no-demands") || dem_rep.has("nonpositive-demand") ||
        dem_rep.has("bad-epsilon"))
        throw InvalidInputError("bad demand sequence: " + dem_rep.to_string());

    bool pipeline_viable = true;
    DemandSequence work = dem;

    const double k_threshold =
        std::pow(static_cast<double>(n), dem.epsilon) / 3.0;
    if (static_cast<double>(dem.k()) < k_threshold) {
        res.note("k below n^eps / 3: pipeline skipped in favour of fallbacks");
        pipeline_viable = false;
    }

    if (pipeline_viable &&
        static_cast<double>(dem.k()) <
            std::pow(static_cast<double>(n), 0.5 + dem.epsilon)) {
        try {
            work = augment_sequence(dem, n);
            res.note("demands augmented for the small-k case");
        } catch (const RegimeError& e) {
            res.note(std::string("augmentation out of regime: ") + e.what());
            work = dem;
        }
    }

    if (pipeline_viable) {
        try {
            BucketPlan plan = build_plan(work, n);
            Report plan_rep = check_plan(plan, n, work.k());
            if (!plan_rep.ok()) {
                res.note("plan checks failed: " + plan_rep.to_string());
            } else if (inst.ell() < plan.ell) {
                res.note("plan needs " + std::to_string(plan.ell) +
                         " matchings, instance has " +
                         std::to_string(inst.ell()));
            } else {
                Rng rng(seed);
                for (int attempt = 0; attempt < opts.pipeline_attempts;
                     ++attempt) {
                    auto sol = pipeline_pass(inst, work, plan,
                                             rng.fork(attempt).next(), opts,
                                             res);
                    if (sol) {
                        // the augmented demands dominate the originals
                        Solution final_sol = std::move(*sol);
                        final_sol.counts.resize(dem.k());
                        Report rep = verify_solution(inst, dem, final_sol);
                        if (!rep.ok())
                            throw std::logic_error(
                                "pipeline result fails against the original "
                                "demands: " +
                                rep.to_string());
                        res.status = SolveResult::Status::kFeasible;
                        res.solution = std::move(final_sol);
                        res.tier = "bucket-pipeline";
                        res.ell_used = plan.ell;
                        return res;
                    }
                }
                res.note("pipeline attempts exhausted");
            }
        } catch (const RegimeError& e) {
            res.note(std::string("plan out of regime [") + e.rule + "]: " +
                     e.what());
        }
    }

    if (!opts.fallback) {
        res.status = SolveResult::Status::kNoSolutionFound;
        res.tier = "pipeline-only";
        return res;
    }
    SolveResult fb = fallback_chain(inst, dem, seed, opts);
    fb.log.insert(fb.log.begin(), res.log.begin(), res.log.end());
    return fb;
}

}  // namespace colmatch
