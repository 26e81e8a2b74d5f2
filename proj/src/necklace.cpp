#include "colmatch/necklace.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <string>
#include <unordered_set>

namespace colmatch {

long long Necklace::colour_count(int c) const {
    long long cnt = 0;
    for (const Bead& b : beads)
        if (b.colour == c) ++cnt;
    return cnt;
}

Necklace necklace_from_colours(const std::vector<int>& colours) {
    Necklace n;
    int max_colour = -1;
    for (std::size_t i = 0; i < colours.size(); ++i) {
        if (colours[i] < 0) throw InvalidInputError("colours must be >= 0");
        n.beads.push_back({colours[i], static_cast<int>(i)});
        n.edge_table.emplace_back(2 * static_cast<int>(i),
                                  2 * static_cast<int>(i) + 1);
        max_colour = std::max(max_colour, colours[i]);
    }
    if (!colours.empty()) {
        n.links.assign(colours.size() - 1, Necklace::Link::kPathEdge);
        n.path_boundaries.push_back(0);
    }
    n.num_colours = max_colour + 1;
    return n;
}

Matching truncate_to_divisible(const Matching& edges, int q) {
    if (q < 1) throw InvalidInputError("q must be at least 1");
    Matching out = edges;
    const std::size_t drop = out.size() % static_cast<std::size_t>(q);
    out.resize(out.size() - drop);
    return out;
}

namespace {

struct UnionGraph {
    std::vector<Edge> edges;          // edge_id order: old parts, then new
    std::vector<int> colour;          // per edge id
    std::vector<std::array<int, 2>> adj;  // line-graph neighbours, -1 = none
    int num_edges() const { return static_cast<int>(edges.size()); }
};

UnionGraph build_union(const std::vector<Matching>& old_parts,
                       const Matching& new_part) {
    UnionGraph g;
    for (std::size_t i = 0; i < old_parts.size(); ++i)
        for (const Edge& e : old_parts[i]) {
            g.edges.push_back(e);
            g.colour.push_back(static_cast<int>(i));
        }
    const int new_colour = static_cast<int>(old_parts.size());
    for (const Edge& e : new_part) {
        g.edges.push_back(e);
        g.colour.push_back(new_colour);
    }

    // each vertex meets at most one old and one new edge
    std::map<Vertex, int> old_at, new_at;
    for (int id = 0; id < g.num_edges(); ++id) {
        const bool is_new = g.colour[id] == new_colour;
        auto& table = is_new ? new_at : old_at;
        for (Vertex v : {g.edges[id].u, g.edges[id].v}) {
            auto [it, inserted] = table.emplace(v, id);
            if (!inserted)
                throw InvalidInputError(
                    is_new ? "new part is not a matching"
                           : "old parts are not mutually vertex-disjoint");
        }
    }

    g.adj.assign(g.num_edges(), {-1, -1});
    auto link = [&](int a, int b) {
        for (int id : {a, b}) {
            int other = id == a ? b : a;
            if (g.adj[id][0] == other || g.adj[id][1] == other) continue;
            if (g.adj[id][0] < 0)
                g.adj[id][0] = other;
            else
                g.adj[id][1] = other;
        }
    };
    for (const auto& [v, old_id] : old_at) {
        auto it = new_at.find(v);
        if (it != new_at.end()) link(old_id, it->second);
    }
    return g;
}

}  // namespace

Necklace build_necklace(const std::vector<Matching>& old_parts,
                        const Matching& new_part) {
    UnionGraph g = build_union(old_parts, new_part);
    const int ne = g.num_edges();

    // component discovery over the line graph; every component is a path or
    // a cycle because each bead has at most two neighbours
    std::vector<int> comp(ne, -1);
    struct Component {
        std::vector<int> order;             // bead ids in path order
        Vertex min_vertex = 0;
        bool was_cycle = false;
        std::pair<int, int> deleted{-1, -1};  // bead ids of the removed edge
    };
    std::vector<Component> comps;

    for (int start = 0; start < ne; ++start) {
        if (comp[start] >= 0) continue;
        // gather the whole component
        std::vector<int> stack{start};
        std::vector<int> members;
        comp[start] = static_cast<int>(comps.size());
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            members.push_back(id);
            for (int nb : g.adj[id])
                if (nb >= 0 && comp[nb] < 0) {
                    comp[nb] = static_cast<int>(comps.size());
                    stack.push_back(nb);
                }
        }
        Component c;
        std::vector<int> endpoints;
        for (int id : members)
            if (g.adj[id][0] < 0 || g.adj[id][1] < 0) endpoints.push_back(id);

        int first = -1;
        int forbidden_a = -1, forbidden_b = -1;
        if (endpoints.empty()) {
            // cycle: delete the lexicographically smallest line-graph edge
            c.was_cycle = true;
            std::pair<int, int> best{-1, -1};
            for (int id : members)
                for (int nb : g.adj[id]) {
                    if (nb < 0) continue;
                    std::pair<int, int> cand{std::min(id, nb), std::max(id, nb)};
                    if (best.first < 0 || cand < best) best = cand;
                }
            c.deleted = best;
            forbidden_a = best.first;
            forbidden_b = best.second;
            first = best.first;  // the smaller endpoint starts the path
        } else {
            first = *std::min_element(endpoints.begin(), endpoints.end());
        }

        // walk from `first`, never crossing the deleted edge
        int prev = -1, cur = first;
        while (cur >= 0) {
            c.order.push_back(cur);
            int nxt = -1;
            for (int nb : g.adj[cur]) {
                if (nb < 0 || nb == prev) continue;
                bool is_deleted = (cur == forbidden_a && nb == forbidden_b) ||
                                  (cur == forbidden_b && nb == forbidden_a);
                if (is_deleted) continue;
                nxt = nb;
            }
            prev = cur;
            cur = nxt;
            if (static_cast<int>(c.order.size()) > ne)
                throw std::logic_error("line-graph walk failed to terminate");
        }

        c.min_vertex = g.edges[members[0]].u;
        for (int id : members)
            c.min_vertex = std::min(c.min_vertex, g.edges[id].u);
        comps.push_back(std::move(c));
    }

    std::sort(comps.begin(), comps.end(),
              [](const Component& a, const Component& b) {
                  return a.min_vertex < b.min_vertex;
              });

    Necklace n;
    n.num_colours = static_cast<int>(old_parts.size()) + 1;
    n.edge_table = g.edges;
    std::vector<int> position(ne, -1);
    for (const Component& c : comps) {
        n.path_boundaries.push_back(n.size());
        for (std::size_t i = 0; i < c.order.size(); ++i) {
            if (n.size() > 0)
                n.links.push_back(i == 0 ? Necklace::Link::kConcat
                                         : Necklace::Link::kPathEdge);
            position[c.order[i]] = n.size();
            n.beads.push_back({g.colour[c.order[i]], c.order[i]});
        }
    }
    for (const Component& c : comps)
        if (c.was_cycle)
            n.deleted_line_edges.emplace_back(position[c.deleted.first],
                                              position[c.deleted.second]);
    return n;
}

namespace {

struct SplitSearch {
    const std::vector<int>& colour_of;  // per bead
    int num_beads;
    int num_colours;
    int q;
    int max_cuts;
    std::vector<std::vector<long long>> counts;  // [thief][colour]
    std::vector<long long> target;
    std::vector<int> cut_at;  // chosen cut gaps
    std::vector<int> owner_of_piece;
    long long nodes_left;
    std::unordered_set<std::string> dead;

    bool fits(int thief, int bead) const {
        return counts[thief][colour_of[bead]] < target[colour_of[bead]];
    }

    std::string key(int pos, int owner, int cuts) const {
        std::string k;
        k.reserve(3 + counts.size() * target.size());
        k.push_back(static_cast<char>(pos));
        k.push_back(static_cast<char>(owner));
        k.push_back(static_cast<char>(cuts));
        for (const auto& row : counts)
            for (long long c : row) k.push_back(static_cast<char>(c));
        return k;
    }

    // assign beads [pos, end) given the current piece's owner
    bool dfs(int pos, int owner, int cuts) {
        if (--nodes_left < 0)
            throw SplitNotFoundError("split search exceeded its node budget");
        if (pos == num_beads) return true;
        std::string k = key(pos, owner, cuts);
        if (dead.contains(k)) return false;

        // no cut: current owner extends the piece
        if (fits(owner, pos)) {
            ++counts[owner][colour_of[pos]];
            if (dfs(pos + 1, owner, cuts)) return true;
            --counts[owner][colour_of[pos]];
        }
        // cut here, hand the next piece to another thief
        if (cuts < max_cuts) {
            for (int t = 0; t < q; ++t) {
                if (t == owner || !fits(t, pos)) continue;
                ++counts[t][colour_of[pos]];
                cut_at.push_back(pos);
                owner_of_piece.push_back(t);
                if (dfs(pos + 1, t, cuts + 1)) return true;
                owner_of_piece.pop_back();
                cut_at.pop_back();
                --counts[t][colour_of[pos]];
            }
        }
        dead.insert(std::move(k));
        return false;
    }
};

Split assemble_split(int num_beads, int q, int num_colours,
                     const std::vector<int>& colour_of,
                     const std::vector<int>& cut_gaps,
                     const std::vector<int>& piece_owners) {
    Split s;
    s.q = q;
    s.cuts = cut_gaps;
    s.per_thief_colour_counts.assign(q, std::vector<long long>(num_colours, 0));
    int begin = 0;
    for (std::size_t i = 0; i <= cut_gaps.size(); ++i) {
        int end = i < cut_gaps.size() ? cut_gaps[i] : num_beads;
        if (begin == end && num_beads == 0) break;
        s.pieces.emplace_back(begin, end);
        s.owner.push_back(piece_owners[i]);
        for (int b = begin; b < end; ++b)
            ++s.per_thief_colour_counts[piece_owners[i]][colour_of[b]];
        begin = end;
    }
    return s;
}

}  // namespace

Split split_necklace(const Necklace& n, int q, const SplitLimits& limits) {
    if (q < 1) throw InvalidInputError("q must be at least 1");
    const int nb = n.size();
    std::vector<int> colour_of(nb);
    for (int i = 0; i < nb; ++i) colour_of[i] = n.beads[i].colour;

    std::vector<long long> total(n.num_colours, 0);
    for (int c : colour_of) ++total[c];
    int colours_present = 0;
    for (long long t : total)
        if (t > 0) ++colours_present;
    for (int c = 0; c < n.num_colours; ++c)
        if (total[c] % q != 0)
            throw InvalidInputError("colour " + std::to_string(c) +
                                    " count not divisible by q");

    if (nb == 0) {
        Split s;
        s.q = q;
        s.per_thief_colour_counts.assign(q,
                                         std::vector<long long>(n.num_colours, 0));
        return s;
    }

    const int max_cuts = (q - 1) * colours_present;
    if (q == 1) {
        return assemble_split(nb, q, n.num_colours, colour_of, {}, {0});
    }

    std::vector<long long> target(n.num_colours);
    for (int c = 0; c < n.num_colours; ++c) target[c] = total[c] / q;

    const bool within_caps = nb <= limits.max_beads &&
                             colours_present <= limits.max_colours &&
                             q <= limits.max_q;
    if (within_caps) {
        SplitSearch search{colour_of, nb,      n.num_colours, q,
                           max_cuts,  {},      target,        {},
                           {},        limits.node_budget,     {}};
        search.counts.assign(q, std::vector<long long>(n.num_colours, 0));
        // fairness is invariant under thief relabeling: owner 0 starts
        search.owner_of_piece.push_back(0);
        if (!search.fits(0, 0))
            throw std::logic_error("first bead exceeds its colour target");
        ++search.counts[0][colour_of[0]];
        if (!search.dfs(1, 0, 0))
            throw SplitNotFoundError(
                "exact search found no fair split within the cut bound");
        return assemble_split(nb, q, n.num_colours, colour_of, search.cut_at,
                              search.owner_of_piece);
    }

    // greedy balanced sweep: always fair, not always within the cut bound
    std::vector<std::vector<long long>> counts(
        q, std::vector<long long>(n.num_colours, 0));
    std::vector<int> cut_gaps;
    std::vector<int> piece_owners;
    int owner = 0;
    piece_owners.push_back(owner);
    for (int pos = 0; pos < nb; ++pos) {
        const int c = colour_of[pos];
        if (counts[owner][c] >= target[c]) {
            // switch to the thief with the most remaining need of this colour
            int best = -1;
            long long best_need = 0;
            for (int t = 0; t < q; ++t) {
                long long need = target[c] - counts[t][c];
                if (need > best_need) {
                    best_need = need;
                    best = t;
                }
            }
            if (best < 0)
                throw std::logic_error("sweep found no thief needing a bead");
            cut_gaps.push_back(pos);
            piece_owners.push_back(best);
            owner = best;
        }
        ++counts[owner][c];
    }
    if (static_cast<int>(cut_gaps.size()) > max_cuts)
        throw SplitNotFoundError("greedy sweep exceeded the cut bound (" +
                                 std::to_string(cut_gaps.size()) + " > " +
                                 std::to_string(max_cuts) + ")");
    return assemble_split(nb, q, n.num_colours, colour_of, cut_gaps,
                          piece_owners);
}

LiftResult lift_one(const std::vector<Matching>& base_classes,
                    const Matching& extra, int p, int q,
                    const SplitLimits& limits) {
    if (!(0 < p && p < q)) throw InvalidInputError("need 0 < p < q");
    const int t = static_cast<int>(base_classes.size());

    std::vector<Matching> trimmed(t);
    for (int i = 0; i < t; ++i)
        trimmed[i] = truncate_to_divisible(base_classes[i], q);
    Matching new_trimmed = truncate_to_divisible(extra, q);

    Necklace neck = build_necklace(trimmed, new_trimmed);
    Split split = split_necklace(neck, q, limits);

    // bead position -> owning thief
    std::vector<int> owner_of(neck.size(), -1);
    for (std::size_t piece = 0; piece < split.pieces.size(); ++piece)
        for (int b = split.pieces[piece].first; b < split.pieces[piece].second;
             ++b)
            owner_of[b] = split.owner[piece];

    // thieves [0, p) keep the new colour, [p, q) keep the old ones
    const int new_colour = t;
    LiftResult res;
    res.classes.assign(t + 1, {});
    res.cuts = static_cast<int>(split.cuts.size());
    res.new_truncated_size = static_cast<long long>(new_trimmed.size());

    std::vector<int> kept_new_positions;
    for (int pos = 0; pos < neck.size(); ++pos) {
        const auto& bead = neck.beads[pos];
        if (bead.colour == new_colour) {
            if (owner_of[pos] < p) kept_new_positions.push_back(pos);
        } else if (owner_of[pos] >= p) {
            res.classes[bead.colour].push_back(neck.edge_table[bead.edge_id]);
        }
    }

    for (int i = 0; i < t; ++i) {
        const long long expect = static_cast<long long>(q - p) *
                                 static_cast<long long>(trimmed[i].size()) / q;
        if (static_cast<long long>(res.classes[i].size()) != expect)
            throw std::logic_error("old class size disagrees with fairness");
    }

    // conflict pairs: kept new edge sharing a vertex with a kept old edge
    std::map<Vertex, int> old_kept_at;  // vertex -> bead position
    for (int pos = 0; pos < neck.size(); ++pos) {
        const auto& bead = neck.beads[pos];
        if (bead.colour != new_colour && owner_of[pos] >= p) {
            const Edge& e = neck.edge_table[bead.edge_id];
            old_kept_at[e.u] = pos;
            old_kept_at[e.v] = pos;
        }
    }

    std::unordered_set<long long> deleted;
    for (auto [a, b] : neck.deleted_line_edges)
        deleted.insert(static_cast<long long>(std::min(a, b)) * 100000 +
                       std::max(a, b));
    auto path_of = [&](int pos) {
        int lo = 0;
        for (std::size_t i = 0; i < neck.path_boundaries.size(); ++i)
            if (neck.path_boundaries[i] <= pos) lo = static_cast<int>(i);
        return lo;
    };
    auto path_span = [&](int path) {
        int begin = neck.path_boundaries[path];
        int end = path + 1 < static_cast<int>(neck.path_boundaries.size())
                      ? neck.path_boundaries[path + 1]
                      : neck.size();
        return std::pair<int, int>(begin, end);
    };

    for (int pos : kept_new_positions) {
        const Edge& e = neck.edge_table[neck.beads[pos].edge_id];
        bool in_conflict = false;
        std::vector<int> partners;
        for (Vertex v : {e.u, e.v}) {
            auto it = old_kept_at.find(v);
            if (it == old_kept_at.end()) continue;
            if (std::find(partners.begin(), partners.end(), it->second) !=
                partners.end())
                continue;  // one pair even when two vertices are shared
            partners.push_back(it->second);
        }
        for (int fpos : partners) {
            in_conflict = true;
            ++res.conflict_pairs;
            const bool adjacent =
                (fpos == pos + 1 || pos == fpos + 1) &&
                neck.links[std::min(fpos, pos)] == Necklace::Link::kPathEdge;
            if (adjacent) {
                ++res.conflicts_type1;
            } else {
                // must be the endpoints of one path whose cycle edge was cut
                const long long key =
                    static_cast<long long>(std::min(pos, fpos)) * 100000 +
                    std::max(pos, fpos);
                auto [begin, end] = path_span(path_of(pos));
                const bool endpoints =
                    (std::min(pos, fpos) == begin &&
                     std::max(pos, fpos) == end - 1) &&
                    path_of(pos) == path_of(fpos);
                if (!deleted.contains(key) || !endpoints)
                    throw std::logic_error(
                        "conflict pair is neither adjacent nor a deleted "
                        "cycle edge");
                ++res.conflicts_type2;
            }
        }
        if (!in_conflict)
            res.classes[new_colour].push_back(
                neck.edge_table[neck.beads[pos].edge_id]);
    }

    const long long conflict_bound = 2LL * (q - 1) * (t + 1);
    if (res.conflict_pairs > conflict_bound)
        throw std::logic_error("conflict pairs exceed 2(q-1)(t+1)");

    // output classes must be mutually vertex-disjoint
    std::unordered_set<Vertex> seen;
    for (const Matching& cls : res.classes)
        for (const Edge& e : cls)
            for (Vertex v : {e.u, e.v})
                if (!seen.insert(v).second)
                    throw std::logic_error("lift produced overlapping classes");

    for (Matching& cls : res.classes) canonicalize(cls);
    return res;
}

}  // namespace colmatch
