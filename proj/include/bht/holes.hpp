#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bht/graph.hpp"
#include "bht/rng.hpp"

namespace bht {

/// Two disjoint vertex sets with no edges between them.
struct HoleWitness {
    std::vector<Vertex> s_side;
    std::vector<Vertex> t_side;
};

enum class HoleMode { exact, lower_bound };

inline const char* to_string(HoleMode m) { return m == HoleMode::exact ? "exact" : "lower_bound"; }

struct HoleReport {
    int value = 0;
    std::optional<HoleWitness> witness;
    HoleMode mode = HoleMode::exact;
    long search_budget = 0;
};

struct HoleCaps {
    int general = 24;   ///< vertex cap for exact alpha* / bipartite-hole number
    int per_part = 18;  ///< part-size cap for exact alpha*_b
};

/// True if the witness is a valid (|S|,|T|)-hole of g.
inline bool verify_hole(const Graph& g, const HoleWitness& w) {
    VertexSet s(g.vertex_count()), t(g.vertex_count());
    for (Vertex v : w.s_side) {
        if (v < 0 || v >= g.vertex_count() || s.contains(v)) return false;
        s.insert(v);
    }
    for (Vertex v : w.t_side) {
        if (v < 0 || v >= g.vertex_count() || t.contains(v)) return false;
        t.insert(v);
    }
    if (s.intersects(t)) return false;
    return edges_between(g, s, t) == 0;
}

namespace detail {

/// For every s, the largest t such that an (s,t)-hole exists (h[s]), with a witness S mask.
struct HoleProfile {
    std::vector<int> best_t;
    std::vector<std::uint32_t> best_s;
};

inline HoleProfile hole_profile(const Graph& g, int cap) {
    const int n = g.vertex_count();
    if (n > cap)
        throw CapExceeded("instance too large for exact mode: " + std::to_string(n) + " vertices > cap " +
                          std::to_string(cap));
    std::vector<std::uint32_t> adj(n, 0);
    for (Vertex v = 0; v < n; ++v)
        for (Vertex u : g.neighbors(v)) adj[v] |= std::uint32_t{1} << u;
    const std::uint32_t all = n == 32 ? ~0u : ((std::uint32_t{1} << n) - 1);

    HoleProfile p;
    p.best_t.assign(n + 1, -1);
    p.best_s.assign(n + 1, 0);
    // depth-first over subsets, carrying the union of neighbourhoods
    struct Frame {
        int next;
        std::uint32_t set, nbrs;
    };
    std::vector<Frame> stack{{0, 0u, 0u}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        int size = std::popcount(f.set);
        int t = std::popcount(all & ~(f.set | f.nbrs));
        if (t > p.best_t[size]) {
            p.best_t[size] = t;
            p.best_s[size] = f.set;
        }
        for (int v = f.next; v < n; ++v)
            stack.push_back({v + 1, f.set | (std::uint32_t{1} << v), f.nbrs | adj[v]});
    }
    return p;
}

inline HoleWitness witness_from(const Graph& g, std::uint32_t s_mask, int s, int t) {
    std::uint32_t nbrs = 0;
    HoleWitness w;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (s_mask >> v & 1u) {
            if (static_cast<int>(w.s_side.size()) < s) w.s_side.push_back(v);
            for (Vertex u : g.neighbors(v)) nbrs |= std::uint32_t{1} << u;
        }
    for (int v = 0; v < g.vertex_count() && static_cast<int>(w.t_side.size()) < t; ++v)
        if (!(s_mask >> v & 1u) && !(nbrs >> v & 1u)) w.t_side.push_back(v);
    return w;
}

}  // namespace detail

/// α*(G): largest t with a (t,t)-hole, by exhaustive subset sweep.
inline HoleReport alpha_star_exact(const Graph& g, const HoleCaps& caps = {}) {
    auto p = detail::hole_profile(g, caps.general);
    HoleReport r;
    r.mode = HoleMode::exact;
    r.search_budget = 1L << g.vertex_count();
    for (int t = g.vertex_count(); t >= 1; --t)
        if (p.best_t[t] >= t) {
            r.value = t;
            r.witness = detail::witness_from(g, p.best_s[t], t, t);
            break;
        }
    return r;
}

/// α̃(G): largest r such that an (s, r-s)-hole exists for every 0 <= s <= r.
inline HoleReport bipartite_hole_number_exact(const Graph& g, const HoleCaps& caps = {}) {
    auto p = detail::hole_profile(g, caps.general);
    const int n = g.vertex_count();
    HoleReport r;
    r.mode = HoleMode::exact;
    r.search_budget = 1L << n;
    int best = 0;
    for (int cand = 0; cand <= n; ++cand) {
        bool ok = true;
        for (int s = 0; s <= cand && ok; ++s) ok = p.best_t[s] >= cand - s;
        if (ok) best = cand;
    }
    r.value = best;
    return r;
}

namespace detail {

/// Greedy peeling for a (t,t)-hole with S drawn from `s_pool` and T from `t_pool`.
inline HoleReport greedy_hole_search(const Graph& g, const VertexSet& s_pool, const VertexSet& t_pool,
                                     long budget, Rng& rng) {
    HoleReport best;
    best.mode = HoleMode::lower_bound;
    best.search_budget = budget;
    const auto pool = s_pool.to_vector();
    if (pool.empty()) return best;
    long spent = 0;
    while (spent < budget) {
        VertexSet s(g.vertex_count());
        Vertex start = pool[rng.index(pool.size())];
        s.insert(start);
        VertexSet free_t = t_pool - g.neighbor_set(start);
        free_t.erase(start);
        auto record = [&] {
            int t = std::min(s.count(), free_t.count());
            if (t > best.value) {
                auto sv = s.to_vector();
                auto tv = free_t.to_vector();
                best.value = t;
                best.witness = HoleWitness{{sv.begin(), sv.begin() + t}, {tv.begin(), tv.begin() + t}};
            }
        };
        record();
        ++spent;
        while (spent < budget) {
            Vertex pick = -1;
            int pick_left = -1;
            std::vector<Vertex> order = pool;
            rng.shuffle(order);
            for (Vertex v : order) {
                if (s.contains(v)) continue;
                ++spent;
                int left = free_t.count() - free_t.intersection_count(g.neighbor_set(v)) -
                           (free_t.contains(v) ? 1 : 0);
                if (left > pick_left) {
                    pick_left = left;
                    pick = v;
                }
            }
            if (pick < 0 || pick_left < s.count() + 1) break;
            s.insert(pick);
            free_t -= g.neighbor_set(pick);
            free_t.erase(pick);
            record();
        }
    }
    return best;
}

}  // namespace detail

/// Witness-producing heuristic; the reported value never exceeds α*.
inline HoleReport alpha_star_lower_bound(const Graph& g, long budget, std::uint64_t seed) {
    if (budget <= 0) throw ContractError("alpha_star_lower_bound: budget must be positive");
    Rng rng(seed);
    auto all = g.all();
    return detail::greedy_hole_search(g, all, all, budget, rng);
}

/// α*_b: largest s with an (s,s)-hole S ⊆ V_i, T ⊆ V_{i+1} for some consecutive pair.
inline HoleReport alpha_star_b(const PartitionedGraph& pg, HoleMode mode, long budget = 20000,
                               std::uint64_t seed = 0, const HoleCaps& caps = {}) {
    const Graph& g = pg.graph();
    HoleReport best;
    best.mode = mode;
    if (mode == HoleMode::lower_bound) {
        if (budget <= 0) throw ContractError("alpha_star_b: budget must be positive");
        Rng rng(seed);
        best.search_budget = budget;
        for (int i = 0; i < pg.k(); ++i) {
            auto r = detail::greedy_hole_search(g, pg.part_set(i), pg.part_set(pg.next(i)),
                                                std::max(1L, budget / pg.k()), rng);
            if (r.value > best.value) {
                best.value = r.value;
                best.witness = r.witness;
            }
        }
        return best;
    }
    const int n = pg.part_size();
    if (n > caps.per_part)
        throw CapExceeded("instance too large for exact mode: part size " + std::to_string(n) + " > cap " +
                          std::to_string(caps.per_part));
    best.search_budget = static_cast<long>(pg.k()) << n;
    for (int i = 0; i < pg.k(); ++i) {
        const auto& left = pg.part(i);
        const auto& right = pg.part(pg.next(i));
        std::vector<std::uint32_t> adj(n, 0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (g.adjacent(left[a], right[b])) adj[a] |= std::uint32_t{1} << b;
        const std::uint32_t limit = std::uint32_t{1} << n;
        std::vector<std::uint32_t> nbrs(limit, 0);
        for (std::uint32_t mask = 1; mask < limit; ++mask) {
            int low = std::countr_zero(mask);
            nbrs[mask] = nbrs[mask & (mask - 1)] | adj[low];
            int s = std::popcount(mask);
            int t = n - std::popcount(nbrs[mask]);
            if (std::min(s, t) > best.value && t >= s) {
                best.value = s;
                HoleWitness w;
                for (int a = 0; a < n; ++a)
                    if (mask >> a & 1u) w.s_side.push_back(left[a]);
                for (int b = 0; b < n && static_cast<int>(w.t_side.size()) < s; ++b)
                    if (!(nbrs[mask] >> b & 1u)) w.t_side.push_back(right[b]);
                best.witness = w;
            }
        }
    }
    return best;
}

}  // namespace bht
