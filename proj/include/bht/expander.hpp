#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "bht/graph.hpp"
#include "bht/holes.hpp"
#include "bht/rng.hpp"
#include "bht/tree.hpp"

namespace bht {

enum class ExpanderMode { exact, heuristic };

inline const char* to_string(ExpanderMode m) { return m == ExpanderMode::exact ? "exact" : "heuristic"; }

struct ExpanderViolation {
    int condition = 0;  ///< 1 (small-set expansion) or 2 (edge between large sets)
    std::vector<Vertex> x;
    std::vector<Vertex> y;  ///< condition 2 only
};

struct ExpanderCertificate {
    int n = 0;
    double d = 0;
    ExpanderMode mode = ExpanderMode::exact;
    long checked_sets = 0;
    std::optional<ExpanderViolation> violation;
    std::vector<std::string> notes;

    bool passed() const { return !violation.has_value(); }
};

struct ExpanderOptions {
    /// Known bound with no (b,b)-hole in the host; enables the hole-based argument.
    std::optional<int> hole_bound;
    long samples = 2000;
    long hole_budget = 20000;
    std::uint64_t seed = 0;
    int exact_cap = 22;
};

/// ⌈n/(2d)⌉, the threshold set size of the expander definition.
inline int expander_threshold(int n, double d) {
    return static_cast<int>(std::ceil(static_cast<double>(n) / (2.0 * d) - 1e-12));
}

namespace detail {

inline int outer_boundary(const Graph& g, const VertexSet& x) { return (neighborhood(g, x) - x).count(); }

inline ExpanderCertificate check_expander_exact(const Graph& g, double d, int cap) {
    const int n = g.vertex_count();
    if (n > cap)
        throw CapExceeded("instance too large for exact mode: " + std::to_string(n) + " vertices > cap " +
                          std::to_string(cap));
    ExpanderCertificate c{n, d, ExpanderMode::exact, 0, std::nullopt, {}};
    if (n == 0) return c;
    const int m = expander_threshold(n, d);
    std::vector<std::uint32_t> adj(n, 0);
    for (Vertex v = 0; v < n; ++v)
        for (Vertex u : g.neighbors(v)) adj[v] |= std::uint32_t{1} << u;
    const std::uint32_t all = (std::uint32_t{1} << n) - 1;
    std::vector<std::uint32_t> nb(std::size_t{1} << n, 0);
    auto to_vec = [n](std::uint32_t mask) {
        std::vector<Vertex> out;
        for (int v = 0; v < n; ++v)
            if (mask >> v & 1u) out.push_back(v);
        return out;
    };
    for (std::uint32_t mask = 1; mask <= all; ++mask) {
        nb[mask] = nb[mask & (mask - 1)] | adj[std::countr_zero(mask)];
        const int size = std::popcount(mask);
        if (size < m) {
            ++c.checked_sets;
            if (std::popcount(nb[mask] & ~mask) < d * size) {
                c.violation = ExpanderViolation{1, to_vec(mask), {}};
                return c;
            }
        } else if (size == m) {
            ++c.checked_sets;
            std::uint32_t rest = all & ~(mask | nb[mask]);
            if (std::popcount(rest) >= m) {
                std::vector<Vertex> y = to_vec(rest);
                y.resize(m);
                c.violation = ExpanderViolation{2, to_vec(mask), y};
                return c;
            }
        }
        if (mask == all) break;
    }
    c.notes.push_back("all sets enumerated");
    return c;
}

}  // namespace detail

/// Checks the two (n,d)-expander conditions, exhaustively or by certified regimes plus sampling.
inline ExpanderCertificate check_expander(const Graph& g, double d, ExpanderMode mode,
                                          const ExpanderOptions& opt = {}) {
    if (d <= 0) throw ContractError("check_expander: d must be positive");
    if (mode == ExpanderMode::exact) return detail::check_expander_exact(g, d, opt.exact_cap);

    const int n = g.vertex_count();
    ExpanderCertificate c{n, d, ExpanderMode::heuristic, 0, std::nullopt, {}};
    if (n == 0) return c;
    const int m = expander_threshold(n, d);
    const int delta = g.min_degree();
    Rng rng(opt.seed);

    // sets up to (δ+1)/(d+1) expand by minimum degree alone
    const int certified_small = static_cast<int>(std::floor((delta + 1) / (d + 1)));
    for (Vertex v = 0; v < n && 1 < m; ++v) {
        ++c.checked_sets;
        if (g.degree(v) < d) {
            c.violation = ExpanderViolation{1, {v}, {}};
            return c;
        }
    }
    c.notes.push_back("condition 1 certified by min degree for |X| <= " + std::to_string(certified_small));

    // no (h,h)-hole certifies condition 2 when h <= m and condition 1 for h <= |X| <= (n-h+1)/(d+1)
    int certified_from = m;
    if (opt.hole_bound) {
        const int h = *opt.hole_bound;
        if (h <= m) c.notes.push_back("condition 2 certified by hole bound " + std::to_string(h));
        else c.notes.push_back("hole bound " + std::to_string(h) + " exceeds threshold " + std::to_string(m));
        if ((n - h + 1) / (d + 1) >= m - 1) certified_from = std::max(h, certified_small + 1);
    }
    if (!opt.hole_bound || *opt.hole_bound > m) {
        auto lb = alpha_star_lower_bound(g, opt.hole_budget, rng.next());
        c.checked_sets += opt.hole_budget;
        if (lb.value >= m && lb.witness) {
            std::vector<Vertex> x = lb.witness->s_side, y = lb.witness->t_side;
            x.resize(m);
            y.resize(m);
            c.violation = ExpanderViolation{2, x, y};
            return c;
        }
        c.notes.push_back("condition 2 sampled: largest hole found " + std::to_string(lb.value));
    }

    // uncertified middle range: random sets and neighbourhood-sharing greedy sets
    const int lo = certified_small + 1;
    const int hi = std::min(m - 1, certified_from - 1);
    if (lo <= hi) {
        c.notes.push_back("condition 1 sampled for " + std::to_string(lo) + " <= |X| <= " + std::to_string(hi));
        for (long s = 0; s < opt.samples; ++s) {
            const int size = lo + rng.index(hi - lo + 1);
            VertexSet x(n);
            Vertex seed_v = rng.index(n);
            x.insert(seed_v);
            const bool greedy = (s & 1) != 0;
            while (x.count() < size) {
                Vertex pick = -1;
                if (greedy) {
                    // add the vertex whose neighbourhood overlaps N(X) most
                    auto nx = neighborhood(g, x);
                    int best = -1;
                    for (int tries = 0; tries < 16; ++tries) {
                        Vertex v = rng.index(n);
                        if (x.contains(v)) continue;
                        int overlap = g.neighbor_set(v).intersection_count(nx);
                        if (overlap > best) {
                            best = overlap;
                            pick = v;
                        }
                    }
                }
                if (pick < 0) {
                    do pick = rng.index(n);
                    while (x.contains(pick));
                }
                x.insert(pick);
            }
            ++c.checked_sets;
            if (detail::outer_boundary(g, x) < d * x.count()) {
                c.violation = ExpanderViolation{1, x.to_vector(), {}};
                return c;
            }
        }
    }
    return c;
}

/// Injective map from pattern vertices to host vertices (-1 = unmapped).
struct Embedding {
    int pattern_size = 0;
    int host_size = 0;
    std::vector<Vertex> map;

    int mapped_count() const {
        return static_cast<int>(std::count_if(map.begin(), map.end(), [](Vertex v) { return v >= 0; }));
    }
};

/// Injective and edge-preserving on the mapped part; `require_full` also demands every vertex mapped.
inline bool verify_embedding(const Graph& host, const Graph& pattern, const Embedding& e, bool require_full = true) {
    if (static_cast<int>(e.map.size()) != pattern.vertex_count()) return false;
    VertexSet used(host.vertex_count());
    for (Vertex v : e.map) {
        if (v < 0) {
            if (require_full) return false;
            continue;
        }
        if (v >= host.vertex_count() || used.contains(v)) return false;
        used.insert(v);
    }
    for (auto [a, b] : pattern.edges())
        if (e.map[a] >= 0 && e.map[b] >= 0 && !host.adjacent(e.map[a], e.map[b])) return false;
    return true;
}

struct EmbedOptions {
    long budget_factor = 50;  ///< placements allowed per pattern vertex
    int restarts = 3;
    std::uint64_t seed = 0;
};

struct EmbedResult {
    bool success = false;
    Embedding embedding;
    long placements = 0;
    int restarts_used = 0;
    int best_partial = 0;
};

/// Embeds a forest into the host greedily in BFS order with bounded rollback and restarts.
inline EmbedResult embed_tree_in_expander(const Graph& host, const Graph& pattern, const EmbedOptions& opt = {}) {
    const int n = host.vertex_count();
    const int t = pattern.vertex_count();
    if (pattern.edge_count() >= t && t > 0) throw ContractError("embed_tree_in_expander: pattern is not a forest");
    EmbedResult res;
    res.embedding = Embedding{t, n, std::vector<Vertex>(t, -1)};
    if (t > n) return res;
    if (t == 0) {
        res.success = true;
        return res;
    }

    Rng rng(opt.seed);
    // BFS order over all components; parent[-1] marks component roots
    std::vector<Vertex> order, parent(t, -2);
    std::vector<int> children(t, 0);
    for (Vertex r = 0; r < t; ++r) {
        if (parent[r] != -2) continue;
        parent[r] = -1;
        std::size_t head = order.size();
        order.push_back(r);
        while (head < order.size()) {
            Vertex v = order[head++];
            for (Vertex u : pattern.neighbors(v))
                if (parent[u] == -2) {
                    parent[u] = v;
                    ++children[v];
                    order.push_back(u);
                }
        }
    }

    const long budget = opt.budget_factor * t;
    for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
        res.restarts_used = attempt;
        std::vector<Vertex> phi(t, -1);
        std::vector<char> used(n, 0);
        std::vector<int> free_deg(n);
        for (Vertex v = 0; v < n; ++v) free_deg[v] = host.degree(v);
        auto place = [&](Vertex p, Vertex h) {
            phi[p] = h;
            used[h] = 1;
            for (Vertex u : host.neighbors(h)) --free_deg[u];
        };
        auto unplace = [&](Vertex p) {
            Vertex h = phi[p];
            phi[p] = -1;
            used[h] = 0;
            for (Vertex u : host.neighbors(h)) ++free_deg[u];
        };

        long spent = 0;
        int pos = 0;
        int back = 1;
        bool randomize = attempt > 0;
        while (pos < t && spent < budget) {
            const Vertex v = order[pos];
            const int need = children[v];
            Vertex choice = -1;
            std::vector<Vertex> cands;
            if (parent[v] < 0) {
                for (Vertex h = 0; h < n; ++h)
                    if (!used[h]) cands.push_back(h);
            } else {
                for (Vertex h : host.neighbors(phi[parent[v]]))
                    if (!used[h]) cands.push_back(h);
            }
            std::vector<Vertex> admissible;
            for (Vertex h : cands) {
                if (free_deg[h] >= need)
                    admissible.push_back(h);
                else if (choice < 0 || free_deg[h] > free_deg[choice])
                    choice = h;
            }
            if (!admissible.empty()) {
                if (randomize) {
                    choice = admissible[rng.index(admissible.size())];
                } else {
                    // lowest residual degree that still leaves room for the children
                    choice = *std::min_element(admissible.begin(), admissible.end(),
                                               [&](Vertex a, Vertex b) { return free_deg[a] < free_deg[b]; });
                }
            }
            ++spent;
            if (choice >= 0) {
                place(v, choice);
                ++pos;
                res.best_partial = std::max(res.best_partial, pos);
                if (pos % 64 == 0) back = 1;
                continue;
            }
            // roll back the last `back` placements, then retry with shuffled choices
            int undo = std::min(back, pos);
            for (int i = 0; i < undo; ++i) unplace(order[--pos]);
            back = std::min(back * 2, std::max(1, t));
            randomize = true;
        }
        res.placements += spent;
        if (pos == t) {
            res.success = true;
            res.embedding.map = phi;
            return res;
        }
        rng = Rng(rng.next() ^ (attempt + 1));
    }
    return res;
}

inline EmbedResult embed_tree_in_expander(const Graph& host, const Tree& tree, const EmbedOptions& opt = {}) {
    return embed_tree_in_expander(host, tree.graph(), opt);
}

/// Largest tree size the embedding theorem covers: n - 4Δ⌈n/(2d)⌉.
inline int embeddable_tree_size(int n, int delta, double d) { return n - 4 * delta * expander_threshold(n, d); }

}  // namespace bht
