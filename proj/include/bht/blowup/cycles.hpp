#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "bht/graph.hpp"
#include "bht/matching.hpp"
#include "bht/rng.hpp"

namespace bht {

/// One vertex per part; vertices[i] lies in part i and consecutive parts are joined (cyclically).
struct TransversalCycle {
    std::vector<Vertex> vertices;
};

using Factor = std::vector<TransversalCycle>;

inline bool is_transversal_cycle(const PartitionedGraph& pg, const TransversalCycle& c) {
    const int k = pg.k();
    if (static_cast<int>(c.vertices.size()) != k) return false;
    for (int i = 0; i < k; ++i) {
        Vertex v = c.vertices[i];
        if (v < 0 || v >= pg.vertex_count() || pg.part_of(v) != i) return false;
        if (!pg.graph().adjacent(v, c.vertices[(i + 1) % k])) return false;
    }
    return true;
}

/// Cycles are valid, pairwise disjoint and cover exactly `target`.
inline bool verify_factor(const PartitionedGraph& pg, const Factor& f, const VertexSet& target) {
    VertexSet seen(pg.vertex_count());
    for (const auto& c : f) {
        if (!is_transversal_cycle(pg, c)) return false;
        for (Vertex v : c.vertices) {
            if (seen.contains(v)) return false;
            seen.insert(v);
        }
    }
    return seen == target;
}

inline VertexSet factor_vertices(int n, const Factor& f) {
    VertexSet s(n);
    for (const auto& c : f)
        for (Vertex v : c.vertices) s.insert(v);
    return s;
}

struct PathResult {
    std::vector<Vertex> path;
    int dead_layer = -1;  ///< first layer whose reachable set was empty
    bool found() const { return dead_layer < 0; }
};

/// Path x_0..x_L with x_s ∈ layers[s] and consecutive host edges.
///
/// Forward propagation Z_s = N(Z_{s-1}) ∩ X_s, then backtrack from the last layer. Exact:
/// a path exists iff no Z_s is empty. With an rng the backtrack choices are random.
inline PathResult transversal_path(const Graph& g, const std::vector<VertexSet>& layers, Rng* rng = nullptr) {
    PathResult r;
    if (layers.empty()) return r;
    std::vector<VertexSet> reach;
    reach.push_back(layers[0]);
    if (reach[0].empty()) {
        r.dead_layer = 0;
        return r;
    }
    for (std::size_t s = 1; s < layers.size(); ++s) {
        reach.push_back(neighborhood(g, reach.back(), layers[s]));
        if (reach.back().empty()) {
            r.dead_layer = static_cast<int>(s);
            return r;
        }
    }
    auto pick = [&](const VertexSet& s) {
        if (!rng) return s.first();
        auto v = s.to_vector();
        return v[rng->index(v.size())];
    };
    r.path.assign(layers.size(), -1);
    r.path.back() = pick(reach.back());
    for (int s = static_cast<int>(layers.size()) - 2; s >= 0; --s)
        r.path[s] = pick(reach[s] & g.neighbor_set(r.path[s + 1]));
    return r;
}

/// Layers over cyclically consecutive parts starting at `start`.
inline PathResult transversal_path(const PartitionedGraph& pg, int start, const std::vector<VertexSet>& layers,
                                   Rng* rng = nullptr) {
    for (std::size_t s = 0; s < layers.size(); ++s)
        if (!layers[s].subset_of(pg.part_set((start + static_cast<int>(s)) % pg.k())))
            throw ContractError("transversal_path: layer " + std::to_string(s) + " outside its part");
    return transversal_path(pg.graph(), layers, rng);
}

/// Transversal cycle through every anchor (anchors[i] = -1 leaves part i free) avoiding `forbidden`.
/// Exhaustive: returns nullopt only if no such cycle exists.
inline std::optional<TransversalCycle> transversal_cycle_through(const PartitionedGraph& pg,
                                                                 const std::vector<Vertex>& anchors,
                                                                 const VertexSet& forbidden, Rng* rng = nullptr) {
    const int k = pg.k();
    if (static_cast<int>(anchors.size()) != k) throw ContractError("transversal_cycle_through: need k anchors");
    VertexSet anchored(pg.vertex_count());
    int first = -1;
    for (int i = 0; i < k; ++i) {
        if (anchors[i] < 0) continue;
        if (pg.part_of(anchors[i]) != i) throw ContractError("transversal_cycle_through: anchor in wrong part");
        anchored.insert(anchors[i]);
        if (first < 0) first = i;
    }
    auto attempt = [&](int a, Vertex av) -> std::optional<TransversalCycle> {
        std::vector<VertexSet> layers;
        for (int s = 0; s < k; ++s) {
            int p = (a + s) % k;
            if (s == 0) {
                layers.push_back(VertexSet::of(pg.vertex_count(), {av}));
            } else if (anchors[p] >= 0) {
                layers.push_back(VertexSet::of(pg.vertex_count(), {anchors[p]}));
            } else {
                layers.push_back(pg.part_set(p) - forbidden - anchored);
            }
        }
        layers.back() &= pg.graph().neighbor_set(av);
        auto r = transversal_path(pg.graph(), layers, rng);
        if (!r.found()) return std::nullopt;
        TransversalCycle c;
        c.vertices.assign(k, -1);
        for (int s = 0; s < k; ++s) c.vertices[(a + s) % k] = r.path[s];
        return c;
    };
    if (first >= 0) return attempt(first, anchors[first]);
    auto starts = (pg.part_set(0) - forbidden).to_vector();
    if (rng) rng->shuffle(starts);
    for (Vertex v : starts)
        if (auto c = attempt(0, v)) return c;
    return std::nullopt;
}

namespace detail {

/// Number of transversal cycles through v using only `avail` (double to avoid overflow).
inline double cycles_through(const PartitionedGraph& pg, Vertex v, const VertexSet& avail) {
    const int k = pg.k();
    const int p = pg.part_of(v);
    const Graph& g = pg.graph();
    std::vector<std::pair<Vertex, double>> cur{{v, 1.0}};
    for (int s = 1; s < k; ++s) {
        const int part = (p + s) % k;
        std::vector<std::pair<Vertex, double>> nxt;
        for (Vertex y : pg.part(part)) {
            if (!avail.contains(y)) continue;
            double c = 0;
            for (auto [x, w] : cur)
                if (g.adjacent(x, y)) c += w;
            if (c > 0) nxt.emplace_back(y, c);
        }
        cur = std::move(nxt);
        if (cur.empty()) return 0;
    }
    double total = 0;
    for (auto [x, w] : cur)
        if (g.adjacent(x, v)) total += w;
    return total;
}

inline void enumerate_cycles_through(const PartitionedGraph& pg, Vertex v, const VertexSet& avail,
                                     std::vector<TransversalCycle>& out, std::size_t limit) {
    const int k = pg.k();
    const int p = pg.part_of(v);
    const Graph& g = pg.graph();
    std::vector<Vertex> path{v};
    auto rec = [&](auto&& self) -> void {
        if (out.size() >= limit) return;
        const int s = static_cast<int>(path.size());
        if (s == k) {
            if (!g.adjacent(path.back(), v)) return;
            TransversalCycle c;
            c.vertices.assign(k, -1);
            for (int t = 0; t < k; ++t) c.vertices[(p + t) % k] = path[t];
            out.push_back(std::move(c));
            return;
        }
        for (Vertex y : g.neighbors(path.back())) {
            if (pg.part_of(y) != (p + s) % k || !avail.contains(y)) continue;
            if (s == k - 1 && !g.adjacent(y, v)) continue;
            path.push_back(y);
            self(self);
            path.pop_back();
        }
    };
    rec(rec);
}

}  // namespace detail

struct FactorSearchOptions {
    long node_budget = -1;  ///< -1 = unlimited
    Rng* rng = nullptr;
    std::size_t branch_limit = 1u << 20;  ///< cycles enumerated per branching vertex
};

struct FactorSearchResult {
    std::optional<Factor> factor;
    bool exhausted = false;  ///< true when the full space was searched without success
    long nodes = 0;
};

/// Backtracking over transversal cycles covering `target`; branches on the vertex with the
/// fewest cycles left and prunes as soon as some vertex has none.
inline FactorSearchResult search_transversal_factor(const PartitionedGraph& pg, const VertexSet& target,
                                                    const FactorSearchOptions& opt = {}) {
    FactorSearchResult res;
    const int k = pg.k();
    int per_part = -1;
    for (int i = 0; i < k; ++i) {
        int c = target.intersection_count(pg.part_set(i));
        if (per_part >= 0 && c != per_part) throw ContractError("search_transversal_factor: target not balanced");
        per_part = c;
    }
    const bool memo_ok = pg.vertex_count() <= 64;
    std::unordered_set<std::uint64_t> failed;
    auto key = [&](const VertexSet& s) {
        std::uint64_t m = 0;
        s.for_each([&](Vertex v) { m |= std::uint64_t{1} << v; });
        return m;
    };
    Factor chosen;
    bool budget_hit = false;

    auto rec = [&](auto&& self, const VertexSet& remaining) -> bool {
        if (remaining.empty()) return true;
        if (opt.node_budget >= 0 && res.nodes >= opt.node_budget) {
            budget_hit = true;
            return false;
        }
        ++res.nodes;
        if (memo_ok && failed.count(key(remaining))) return false;
        Vertex best = -1;
        double best_count = 0;
        bool dead = false;
        remaining.for_each([&](Vertex v) {
            if (dead) return;
            double c = detail::cycles_through(pg, v, remaining);
            if (c == 0) {
                dead = true;
                return;
            }
            if (best < 0 || c < best_count) {
                best = v;
                best_count = c;
            }
        });
        if (!dead) {
            std::vector<TransversalCycle> options;
            detail::enumerate_cycles_through(pg, best, remaining, options, opt.branch_limit);
            if (opt.rng) opt.rng->shuffle(options);
            for (const auto& c : options) {
                VertexSet next = remaining;
                for (Vertex v : c.vertices) next.erase(v);
                chosen.push_back(c);
                if (self(self, next)) return true;
                chosen.pop_back();
                if (budget_hit) return false;
            }
        }
        if (memo_ok && !budget_hit) failed.insert(key(remaining));
        return false;
    };
    if (rec(rec, target)) res.factor = chosen;
    res.exhausted = !res.factor && !budget_hit;
    return res;
}

struct ExactCaps {
    int part_size = 8;
    int k = 8;
};

/// Brute-force oracle: a factor of the whole graph, or proof (exhausted search) that none exists.
inline FactorSearchResult exact_transversal_factor(const PartitionedGraph& pg, const ExactCaps& caps = {}) {
    if (pg.part_size() > caps.part_size || pg.k() > caps.k)
        throw CapExceeded("instance too large for exact mode: k=" + std::to_string(pg.k()) +
                          ", part size=" + std::to_string(pg.part_size()));
    return search_transversal_factor(pg, pg.graph().all());
}

/// Random perfect matching between two equal vertex lists, or nullopt.
inline std::optional<std::vector<int>> random_perfect_matching(const Graph& g, const std::vector<Vertex>& a,
                                                              const std::vector<Vertex>& b, Rng& rng) {
    std::vector<std::vector<int>> adj(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j)
            if (g.adjacent(a[i], b[j])) adj[i].push_back(static_cast<int>(j));
        rng.shuffle(adj[i]);
    }
    std::vector<int> order(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    std::vector<std::vector<int>> adj2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) adj2[i] = adj[order[i]];
    auto r = hopcroft_karp(static_cast<int>(a.size()), static_cast<int>(b.size()), adj2);
    if (r.size != static_cast<int>(a.size())) return std::nullopt;
    std::vector<int> mate(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mate[order[i]] = r.mate_a[i];
    return mate;
}

/// Chains random perfect matchings V_0→…→V_{k-2}, then closes every chain with a vertex of
/// V_{k-1} adjacent to both ends via one more bipartite matching.
inline std::optional<Factor> chain_transversal_factor(const PartitionedGraph& pg, const VertexSet& target, Rng& rng,
                                                      int attempts = 200) {
    const int k = pg.k();
    const Graph& g = pg.graph();
    std::vector<std::vector<Vertex>> parts(k);
    for (int i = 0; i < k; ++i) parts[i] = (pg.part_set(i) & target).to_vector();
    const std::size_t m = parts[0].size();
    for (const auto& p : parts)
        if (p.size() != m) throw ContractError("chain_transversal_factor: target not balanced");
    if (m == 0) return Factor{};
    for (int a = 0; a < attempts; ++a) {
        std::vector<std::vector<Vertex>> chains(m);
        for (std::size_t i = 0; i < m; ++i) chains[i].push_back(parts[0][i]);
        bool ok = true;
        for (int p = 0; p + 1 < k - 1 && ok; ++p) {
            std::vector<Vertex> ends;
            for (const auto& c : chains) ends.push_back(c.back());
            auto mate = random_perfect_matching(g, ends, parts[p + 1], rng);
            if (!mate) {
                ok = false;
                break;
            }
            for (std::size_t i = 0; i < m; ++i) chains[i].push_back(parts[p + 1][(*mate)[i]]);
        }
        if (!ok) continue;
        std::vector<std::vector<int>> adj(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                Vertex w = parts[k - 1][j];
                if (g.adjacent(w, chains[i].back()) && g.adjacent(w, chains[i].front()))
                    adj[i].push_back(static_cast<int>(j));
            }
        auto r = hopcroft_karp(static_cast<int>(m), static_cast<int>(m), adj);
        if (r.size != static_cast<int>(m)) continue;
        Factor f;
        for (std::size_t i = 0; i < m; ++i) {
            TransversalCycle c;
            c.vertices = chains[i];
            c.vertices.push_back(parts[k - 1][r.mate_a[i]]);
            f.push_back(std::move(c));
        }
        return f;
    }
    return std::nullopt;
}

}  // namespace bht
