#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bht/blowup/cycles.hpp"
#include "bht/matching.hpp"

namespace bht {

struct RegularityReport {
    double density = 0;
    double max_deviation = 0;  ///< max |d(X′,Y′) − d(X,Y)| over the samples
    bool dense = false;        ///< d(X,Y) ≥ d
    bool regular = false;      ///< no sample deviated by more than ε
    bool passed() const { return dense && regular; }
};

namespace detail {

inline double pair_density(const Graph& g, const std::vector<Vertex>& x, const std::vector<Vertex>& y) {
    if (x.empty() || y.empty()) return 0;
    long e = 0;
    for (Vertex a : x)
        for (Vertex b : y) e += g.adjacent(a, b);
    return static_cast<double>(e) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

inline std::vector<Vertex> extreme_by_degree(const Graph& g, std::vector<Vertex> from, const std::vector<Vertex>& into,
                                             int size, bool lowest) {
    auto into_set = VertexSet::of(g.vertex_count(), into);
    std::stable_sort(from.begin(), from.end(), [&](Vertex a, Vertex b) {
        int da = g.degree_into(a, into_set), db = g.degree_into(b, into_set);
        return lowest ? da < db : da > db;
    });
    from.resize(size);
    return from;
}

}  // namespace detail

/// Monte Carlo falsifier for (ε, d)-regularity: half of the samples are uniform subsets, half
/// are the subsets of least or greatest degree into a random opposite subset.
inline RegularityReport regular_pair_check(const Graph& g, const VertexSet& x, const VertexSet& y, double eps, double d,
                                           int samples, std::uint64_t seed) {
    if (x.empty() || y.empty()) throw ContractError("regular_pair_check: both sides must be non-empty");
    auto xv = x.to_vector(), yv = y.to_vector();
    RegularityReport r;
    r.density = detail::pair_density(g, xv, yv);
    r.dense = r.density >= d;
    const int minx = std::max(1, static_cast<int>(std::ceil(eps * xv.size())));
    const int miny = std::max(1, static_cast<int>(std::ceil(eps * yv.size())));
    Rng rng(seed);
    auto random_sub = [&](std::vector<Vertex> v, int lo) {
        rng.shuffle(v);
        v.resize(lo + rng.index(v.size() - lo + 1));
        return v;
    };
    for (int s = 0; s < samples; ++s) {
        std::vector<Vertex> xs, ys;
        switch (s % 4) {
            case 0:
            case 1:
                xs = random_sub(xv, minx);
                ys = random_sub(yv, miny);
                break;
            case 2:
                ys = random_sub(yv, miny);
                xs = detail::extreme_by_degree(g, xv, ys, minx, rng.bernoulli(0.5));
                break;
            default:
                xs = random_sub(xv, minx);
                ys = detail::extreme_by_degree(g, yv, xs, miny, rng.bernoulli(0.5));
        }
        r.max_deviation = std::max(r.max_deviation, std::abs(detail::pair_density(g, xs, ys) - r.density));
    }
    r.regular = r.max_deviation <= eps;
    return r;
}

enum class TilingStrategy { greedy, exact, partition_route };

inline const char* to_string(TilingStrategy s) {
    switch (s) {
        case TilingStrategy::greedy: return "greedy";
        case TilingStrategy::exact: return "exact";
        default: return "partition_route";
    }
}

/// One copy of H: a cluster per part, two of its pairs taken from the reduced-graph matchings.
struct CopyReport {
    std::vector<int> clusters;  ///< block index per part
    int quad = -1;              ///< parts 4q..4q+3 carry the two H-edges; -1 if none were available
    int size = 0;               ///< vertices of the copy inside the target
    int greedy_leftover = 0;    ///< after the cycle-by-cycle construction
    int leftover = 0;           ///< after completion
    std::string completion = "none";
};

struct Tiling {
    Factor cycles;
    VertexSet uncovered;
    TilingStrategy strategy = TilingStrategy::greedy;
    double allowed = 0;  ///< ζ·|target|
    bool reached = false;
    std::vector<CopyReport> copies;
    int reduced_min_degree = -1;           ///< δ̄ of the reduced graph (partition route)
    std::vector<int> matching_sizes;       ///< per part pair (2i, 2i+1)
    int repick_rounds = 0;                 ///< copies re-picked as a cluster-level factor
};

struct TilingOptions {
    bool stop_at_zeta = true;   ///< greedy: stop as soon as the ζ bound is met
    int blocks = 0;             ///< clusters per part for the partition route
    double eps = 0.5;           ///< regularity falsifier tolerance
    double d = 0.1;             ///< reduced-graph density threshold
    int min_pair_degree = 1;    ///< reduced-graph edges also need this bipartite minimum degree
    int regularity_samples = 20;
    long completion_budget = 20000;
    int repick_rounds = 20;
    ExactCaps caps{8, 8};
};

inline bool verify_tiling(const PartitionedGraph& pg, const VertexSet& target, const Tiling& t) {
    VertexSet seen(pg.vertex_count());
    for (const auto& c : t.cycles) {
        if (!is_transversal_cycle(pg, c)) return false;
        for (Vertex v : c.vertices) {
            if (!target.contains(v) || seen.contains(v)) return false;
            seen.insert(v);
        }
    }
    return t.uncovered == target - seen;
}

namespace detail {

// Single pass over a shuffled order: a vertex with no cycle now never gets one later.
inline void greedy_cycles(const PartitionedGraph& pg, VertexSet& avail, Factor& out, Rng& rng, double stop_at) {
    auto order = avail.to_vector();
    rng.shuffle(order);
    const VertexSet outside = VertexSet::full(pg.vertex_count()) - avail;
    VertexSet used = outside;
    for (Vertex v : order) {
        if (avail.count() <= stop_at) break;
        if (!avail.contains(v)) continue;
        std::vector<Vertex> anchors(pg.k(), -1);
        anchors[pg.part_of(v)] = v;
        auto c = transversal_cycle_through(pg, anchors, used, &rng);
        if (!c) continue;
        for (Vertex w : c->vertices) {
            used.insert(w);
            avail.erase(w);
        }
        out.push_back(*c);
    }
}

// Branch and bound for a maximum set of disjoint transversal cycles inside avail.
inline Factor max_cycle_packing(const PartitionedGraph& pg, const VertexSet& avail) {
    const int k = pg.k();
    Factor best, cur;
    auto rec = [&](auto&& self, VertexSet rem) -> void {
        Vertex pick = -1;
        double pick_count = 0;
        for (Vertex v : rem.to_vector()) {
            double c = detail::cycles_through(pg, v, rem);
            if (c == 0) {
                rem.erase(v);
                continue;
            }
            if (pick < 0 || c < pick_count) pick = v, pick_count = c;
        }
        int bound = static_cast<int>(cur.size()) + pg.vertex_count();
        for (int i = 0; i < k; ++i) bound = std::min(bound, static_cast<int>(cur.size()) + rem.intersection_count(pg.part_set(i)));
        if (bound <= static_cast<int>(best.size())) return;
        if (pick < 0) {
            best = cur;
            return;
        }
        std::vector<TransversalCycle> opts;
        detail::enumerate_cycles_through(pg, pick, rem, opts, std::size_t(-1));
        for (const auto& c : opts) {
            VertexSet next = rem;
            for (Vertex w : c.vertices) next.erase(w);
            cur.push_back(c);
            self(self, next);
            cur.pop_back();
        }
        rem.erase(pick);
        self(self, rem);
    };
    rec(rec, avail);
    return best;
}

// Balanced completion of a copy: chained matchings, then bounded search on the largest
// balanced subset; keeps whichever covers more.
inline std::optional<std::pair<Factor, std::string>> complete_copy(const PartitionedGraph& pg,
                                                                    const std::vector<VertexSet>& clusters, Rng& rng,
                                                                    long budget) {
    std::size_t m = clusters[0].count();
    for (const auto& c : clusters) m = std::min<std::size_t>(m, c.count());
    if (m == 0) return std::nullopt;
    VertexSet target(pg.vertex_count());
    for (const auto& c : clusters) {
        auto v = c.to_vector();
        rng.shuffle(v);
        for (std::size_t a = 0; a < m; ++a) target.insert(v[a]);
    }
    if (auto f = chain_transversal_factor(pg, target, rng, 50)) return std::make_pair(*f, std::string("chain"));
    FactorSearchOptions fo;
    fo.node_budget = budget;
    fo.rng = &rng;
    auto s = search_transversal_factor(pg, target, fo);
    if (s.factor) return std::make_pair(*s.factor, std::string("search"));
    return std::nullopt;
}

inline int pair_min_degree_between(const Graph& g, const VertexSet& x, const VertexSet& y) {
    int d = std::max(x.count(), y.count());
    x.for_each([&](Vertex v) { d = std::min(d, g.degree_into(v, y)); });
    y.for_each([&](Vertex v) { d = std::min(d, g.degree_into(v, x)); });
    return d;
}

inline void partition_route(const PartitionedGraph& pg, const VertexSet& target, const TilingOptions& opt, Rng& rng,
                            Tiling& t) {
    const int k = pg.k(), n0 = opt.blocks;
    if (n0 <= 0) throw ContractError("almost_tiling: partition route needs block metadata");
    if (k % 4 != 0) throw ContractError("almost_tiling: partition route needs k divisible by 4");
    if (pg.part_size() % n0 != 0) throw ContractError("almost_tiling: block count must divide the part size");
    const int bs = pg.part_size() / n0;
    const Graph& g = pg.graph();
    auto cluster = [&](int i, int j) {
        VertexSet s(pg.vertex_count());
        for (int a = j * bs; a < (j + 1) * bs; ++a) s.insert(pg.part(i)[a]);
        return s & target;
    };

    // reduced graph on clusters (i, j) -> i * n0 + j, consecutive parts only
    std::vector<Edge> red;
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < n0; ++a)
            for (int b = 0; b < n0; ++b) {
                auto x = cluster(i, a), y = cluster(pg.next(i), b);
                if (x.empty() || y.empty()) continue;
                auto r = regular_pair_check(g, x, y, opt.eps, opt.d, opt.regularity_samples, rng.next());
                if (r.passed() && pair_min_degree_between(g, x, y) >= opt.min_pair_degree)
                    red.emplace_back(i * n0 + a, pg.next(i) * n0 + b);
            }
    Graph reduced(k * n0, red);
    t.reduced_min_degree = n0;
    for (int v = 0; v < k * n0; ++v) {
        int i = v / n0;
        for (int side : {pg.next(i), pg.prev(i)}) {
            int c = 0;
            for (Vertex w : reduced.neighbors(v)) c += w / n0 == side;
            t.reduced_min_degree = std::min(t.reduced_min_degree, c);
        }
    }

    // matchings M_i between parts 2i and 2i+1
    std::vector<std::vector<std::pair<int, int>>> match(k / 2);
    for (int i = 0; i < k / 2; ++i) {
        VertexSet a(k * n0), b(k * n0);
        for (int j = 0; j < n0; ++j) a.insert(2 * i * n0 + j), b.insert((2 * i + 1) * n0 + j);
        auto mm = max_bipartite_matching(reduced, a, b);
        for (auto [x, y] : mm.edges) match[i].emplace_back(x % n0, y % n0);
        rng.shuffle(match[i]);
        t.matching_sizes.push_back(mm.size());
    }

    // N0 disjoint copies of H, greedily; the quad with most unused edge pairs goes first
    std::vector<std::vector<char>> taken(k, std::vector<char>(n0, 0));
    std::vector<std::size_t> cursor(k / 2, 0);
    auto next_edge = [&](int mi) -> std::optional<std::pair<int, int>> {
        auto& c = cursor[mi];
        while (c < match[mi].size()) {
            auto e = match[mi][c++];
            if (!taken[2 * mi][e.first] && !taken[2 * mi + 1][e.second]) return e;
        }
        return std::nullopt;
    };
    auto matched_in = [&](int part, int j) {
        for (const auto& e : match[part / 2])
            if ((part % 2 == 0 ? e.first : e.second) == j) return true;
        return false;
    };
    for (int c = 0; c < n0; ++c) {
        CopyReport rep;
        rep.clusters.assign(k, -1);
        std::vector<int> quads(k / 4);
        for (int q = 0; q < k / 4; ++q) quads[q] = q;
        std::stable_sort(quads.begin(), quads.end(), [&](int a, int b) {
            auto left = [&](int q) { return std::min(match[2 * q].size() - cursor[2 * q], match[2 * q + 1].size() - cursor[2 * q + 1]); };
            return left(a) > left(b);
        });
        for (int q : quads) {
            auto s1 = cursor[2 * q], s2 = cursor[2 * q + 1];
            auto e1 = next_edge(2 * q), e2 = next_edge(2 * q + 1);
            if (e1 && e2) {
                rep.quad = q;
                rep.clusters[4 * q] = e1->first, rep.clusters[4 * q + 1] = e1->second;
                rep.clusters[4 * q + 2] = e2->first, rep.clusters[4 * q + 3] = e2->second;
                break;
            }
            cursor[2 * q] = s1, cursor[2 * q + 1] = s2;
        }
        for (int i = 0; i < k; ++i) {
            if (rep.clusters[i] >= 0) continue;
            int pick = -1;
            for (int j = 0; j < n0 && pick < 0; ++j)
                if (!taken[i][j] && !matched_in(i, j)) pick = j;  // prefer A_i
            for (int j = 0; j < n0 && pick < 0; ++j)
                if (!taken[i][j]) pick = j;
            rep.clusters[i] = pick;
        }
        for (int i = 0; i < k; ++i) taken[i][rep.clusters[i]] = 1;
        t.copies.push_back(rep);
    }

    // per copy: cycles through an edge uv between the two H-edges, closed by a transversal path,
    // then a completion attempt on the whole copy when that leaves anything uncovered
    auto tile_copy = [&](CopyReport& rep) {
        std::vector<VertexSet> z(k, VertexSet(pg.vertex_count()));
        for (int i = 0; i < k; ++i) z[i] = cluster(i, rep.clusters[i]);
        rep.size = 0;
        for (const auto& s : z) rep.size += s.count();
        rep.completion = "none";
        Factor local;
        const int q = rep.quad < 0 ? 0 : rep.quad;
        const int p1 = 4 * q, p2 = 4 * q + 1, p3 = 4 * q + 2, p4 = 4 * q + 3;
        while (true) {
            bool grown = false;
            auto us = z[p2].to_vector();
            rng.shuffle(us);
            for (Vertex u : us) {
                auto q1 = g.neighbor_set(u) & z[p1];
                if (q1.empty()) continue;
                auto vs = (g.neighbor_set(u) & z[p3]).to_vector();
                rng.shuffle(vs);
                for (Vertex v : vs) {
                    std::vector<VertexSet> layers{g.neighbor_set(v) & z[p4]};
                    for (int s = 1; s < k - 3; ++s) layers.push_back(z[(p4 + s) % k]);
                    layers.push_back(q1);
                    auto path = transversal_path(pg, p4, layers, &rng);
                    if (!path.found()) continue;
                    TransversalCycle c;
                    c.vertices.assign(k, -1);
                    c.vertices[p2] = u, c.vertices[p3] = v;
                    for (std::size_t s = 0; s < path.path.size(); ++s) c.vertices[(p4 + s) % k] = path.path[s];
                    for (int i = 0; i < k; ++i) z[i].erase(c.vertices[i]);
                    local.push_back(c);
                    grown = true;
                    break;
                }
                if (grown) break;
            }
            if (!grown) break;
        }
        int left = 0;
        for (const auto& s : z) left += s.count();
        rep.greedy_leftover = rep.leftover = left;
        if (left > 0) {
            std::vector<VertexSet> full(k, VertexSet(pg.vertex_count()));
            for (int i = 0; i < k; ++i) full[i] = cluster(i, rep.clusters[i]);
            if (auto done = complete_copy(pg, full, rng, opt.completion_budget)) {
                int new_left = rep.size - static_cast<int>(done->first.size()) * k;
                if (new_left < left) {
                    local = std::move(done->first);
                    rep.leftover = new_left;
                    rep.completion = done->second;
                }
            }
        }
        return local;
    };

    // copies that still leave vertices behind trigger a re-pick of all copies as a random
    // transversal factor of the cluster blow-up; the best round is kept
    auto cluster_pg = PartitionedGraph::ranged(k, n0, red);
    std::vector<CopyReport> best_copies;
    Factor best_cycles;
    int best_left = -1;
    for (int round = 0; round <= opt.repick_rounds; ++round) {
        if (round > 0) {
            FactorSearchOptions fo;
            fo.node_budget = opt.completion_budget;
            fo.rng = &rng;
            auto f = search_transversal_factor(cluster_pg, cluster_pg.graph().all(), fo);
            if (!f.factor) break;
            for (std::size_t c = 0; c < f.factor->size(); ++c) {
                auto& rep = t.copies[c];
                for (int i = 0; i < k; ++i) rep.clusters[i] = (*f.factor)[c].vertices[i] % n0;
                rep.quad = 0;
            }
            ++t.repick_rounds;
        }
        Factor cycles;
        int left = 0;
        for (auto& rep : t.copies) {
            auto local = tile_copy(rep);
            left += rep.leftover;
            cycles.insert(cycles.end(), local.begin(), local.end());
        }
        if (best_left < 0 || left < best_left) {
            best_left = left;
            best_copies = t.copies;
            best_cycles = std::move(cycles);
        }
        if (best_left == 0) break;
    }
    t.copies = std::move(best_copies);
    t.cycles = std::move(best_cycles);
    t.uncovered = target - factor_vertices(pg.vertex_count(), t.cycles);
}

}  // namespace detail

/// Disjoint transversal cycles inside `target` covering all but at most ζ·|target| vertices.
/// Never throws on a shortfall: `reached` reports whether the bound was met.
inline Tiling almost_tiling(const PartitionedGraph& pg, const VertexSet& target, double zeta, TilingStrategy strategy,
                            std::uint64_t seed, const TilingOptions& opt = {}) {
    Tiling t;
    t.strategy = strategy;
    t.allowed = zeta * target.count();
    Rng rng(seed);
    switch (strategy) {
        case TilingStrategy::greedy: {
            VertexSet avail = target;
            detail::greedy_cycles(pg, avail, t.cycles, rng, opt.stop_at_zeta ? t.allowed : -1);
            t.uncovered = avail;
            break;
        }
        case TilingStrategy::exact: {
            if (pg.part_size() > opt.caps.part_size || pg.k() > opt.caps.k)
                throw CapExceeded("exact tiling: instance too large (part size " + std::to_string(pg.part_size()) + ")");
            t.cycles = detail::max_cycle_packing(pg, target);
            t.uncovered = target - factor_vertices(pg.vertex_count(), t.cycles);
            break;
        }
        case TilingStrategy::partition_route:
            detail::partition_route(pg, target, opt, rng, t);
            break;
    }
    t.reached = t.uncovered.count() <= t.allowed + 1e-9;
    if (!verify_tiling(pg, target, t)) throw Error("almost_tiling: internal error, tiling failed to verify");
    return t;
}

}  // namespace bht
