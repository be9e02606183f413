#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bht/graph.hpp"
#include "bht/holes.hpp"
#include "bht/rng.hpp"
#include "bht/tree.hpp"

namespace bht {

enum class BoundMode { planted, whp, exact };

inline const char* to_string(BoundMode m) {
    switch (m) {
        case BoundMode::planted: return "planted";
        case BoundMode::whp: return "whp";
        default: return "exact";
    }
}

/// Guarantees a generator makes about its output.
struct InstanceMetadata {
    std::uint64_t seed = 0;
    std::string construction;
    int n = 0;              ///< vertex count (plain graphs) or part size (blow-ups)
    int k = 0;              ///< 0 for plain graphs
    int min_degree = 0;     ///< δ(G), or δ̄(G) for blow-ups
    int alpha_bound = 0;    ///< α* (or α*_b) is at most this
    BoundMode bound_mode = BoundMode::whp;
    long repairs = 0;
    int blocks = 0;         ///< blocks per part for the partition route, 0 if none
    bool no_factor = false;
    std::string notes;
};

struct GeneratedGraph {
    Graph graph;
    InstanceMetadata meta;
};

struct GeneratedBlowup {
    PartitionedGraph graph;
    InstanceMetadata meta;
};

namespace detail {

inline double log_binomial(int n, int t) {
    return std::lgamma(n + 1.0) - std::lgamma(t + 1.0) - std::lgamma(n - t + 1.0);
}

/// Smallest t with copies * C(n1,t) * C(n2,t) * (1-p)^(t^2) below `fail`.
inline int union_bound_hole(int n1, int n2, double p, double copies, double fail = 1e-3) {
    if (p >= 1) return 1;
    const double lq = std::log1p(-p);
    for (int t = 1; t <= std::min(n1, n2); ++t) {
        double lg = std::log(copies) + log_binomial(n1, t) + log_binomial(n2, t) + static_cast<double>(t) * t * lq;
        if (lg < std::log(fail)) return t;
    }
    return std::min(n1, n2) + 1;
}

}  // namespace detail

/// Disjoint cliques of size at least ⌈εn⌉+1 overlaid with G(n,p).
inline GeneratedGraph gen_low_hole_graph(int n, double eps, double p, std::uint64_t seed) {
    if (!(eps > 0 && eps < 1) || !(p > 0 && p <= 1) || n < 2)
        throw ContractError("gen_low_hole_graph: need n >= 2, 0 < eps < 1, 0 < p <= 1");
    const int need = static_cast<int>(std::ceil(eps * n - 1e-9));
    const int clique = need + 1;
    const int count = n / clique;
    if (count == 0) throw ContractError("gen_low_hole_graph: clique size " + std::to_string(clique) + " exceeds n");
    Rng rng(seed);
    std::vector<Vertex> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<Edge> edges;
    for (int c = 0, pos = 0; c < count; ++c) {
        int size = n / count + (c < n % count ? 1 : 0);
        for (int a = pos; a < pos + size; ++a)
            for (int b = a + 1; b < pos + size; ++b) edges.emplace_back(perm[a], perm[b]);
        pos += size;
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.bernoulli(p)) edges.emplace_back(a, b);
    GeneratedGraph out{Graph(n, edges), {}};
    auto& m = out.meta;
    m.seed = seed;
    m.construction = "lowhole";
    m.n = n;
    m.min_degree = out.graph.min_degree();
    if (m.min_degree < need) throw Error("gen_low_hole_graph: internal error, min degree below eps*n");
    if (p >= 1) {
        m.alpha_bound = 0;
        m.bound_mode = BoundMode::exact;
    } else {
        m.alpha_bound = detail::union_bound_hole(n, n, p, 1.0) - 1;
        m.bound_mode = BoundMode::whp;
    }
    m.notes = std::to_string(count) + " cliques plus G(n," + std::to_string(p) + ") overlay";
    return out;
}

/// Random spanning subgraph of the blow-up of C_k with pair density p, repaired to δ̄ ≥ ⌈δ·part_size⌉.
inline GeneratedBlowup gen_blowup(int part_size, int k, double delta, double p, std::uint64_t seed, int blocks = 0) {
    if (k < 3) throw ContractError("gen_blowup: k must be at least 3");
    if (part_size < 1 || !(p > 0 && p <= 1) || delta < 0) throw ContractError("gen_blowup: bad parameters");
    const int need = static_cast<int>(std::ceil(delta * part_size - 1e-9));
    if (need > part_size) throw ContractError("gen_blowup: delta*n exceeds the part size");
    if (blocks < 0 || (blocks > 0 && part_size % blocks != 0))
        throw ContractError("gen_blowup: block count must divide the part size");
    Rng rng(seed);
    const int m = part_size;
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(k) * m, std::vector<char>(m, 0));
    // adj[i*m + a][b]: edge between vertex a of part i and vertex b of part i+1
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) adj[i * m + a][b] = rng.bernoulli(p) ? 1 : 0;
    long repairs = 0;
    for (int i = 0; i < k; ++i) {
        for (int a = 0; a < m; ++a) {
            auto& row = adj[i * m + a];
            int deg = static_cast<int>(std::count(row.begin(), row.end(), 1));
            while (deg < need) {
                int b = rng.index(m);
                if (!row[b]) {
                    row[b] = 1;
                    ++deg;
                    ++repairs;
                }
            }
        }
        for (int b = 0; b < m; ++b) {
            int deg = 0;
            for (int a = 0; a < m; ++a) deg += adj[i * m + a][b];
            while (deg < need) {
                int a = rng.index(m);
                if (!adj[i * m + a][b]) {
                    adj[i * m + a][b] = 1;
                    ++deg;
                    ++repairs;
                }
            }
        }
    }
    std::vector<Edge> edges;
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (adj[i * m + a][b]) edges.emplace_back(i * m + a, ((i + 1) % k) * m + b);
    GeneratedBlowup out{PartitionedGraph::ranged(k, m, edges), {}};
    auto& md = out.meta;
    md.seed = seed;
    md.construction = "blowup";
    md.n = m;
    md.k = k;
    md.min_degree = pair_min_degree(out.graph);
    if (md.min_degree < need) throw Error("gen_blowup: internal error, repair left a deficient vertex");
    md.repairs = repairs;
    md.blocks = blocks;
    if (p >= 1) {
        md.alpha_bound = 0;
        md.bound_mode = BoundMode::exact;
    } else {
        md.alpha_bound = detail::union_bound_hole(m, m, p, k) - 1;
        md.bound_mode = BoundMode::whp;
    }
    md.notes = "repairs=" + std::to_string(repairs);
    return out;
}

/// Only edges touching U = ⋃U_i with |U_i| = n/k - 1; no transversal C_k-factor exists.
inline GeneratedBlowup gen_space_barrier(int part_size, int k, std::uint64_t seed) {
    if (k < 3) throw ContractError("gen_space_barrier: k must be at least 3");
    if (part_size <= 0 || part_size % k != 0) throw ContractError("gen_space_barrier: k must divide n");
    const int m = part_size;
    const int u = m / k - 1;
    Rng rng(seed);
    std::vector<std::vector<char>> in_u(k, std::vector<char>(m, 0));
    for (int i = 0; i < k; ++i) {
        std::vector<int> idx(m);
        for (int a = 0; a < m; ++a) idx[a] = a;
        rng.shuffle(idx);
        for (int j = 0; j < u; ++j) in_u[i][idx[j]] = 1;
    }
    std::vector<Edge> edges;
    for (int i = 0; i < k; ++i) {
        int nx = (i + 1) % k;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (in_u[i][a] || in_u[nx][b]) edges.emplace_back(i * m + a, nx * m + b);
    }
    GeneratedBlowup out{PartitionedGraph::ranged(k, m, edges), {}};
    auto& md = out.meta;
    md.seed = seed;
    md.construction = "barrier";
    md.n = m;
    md.k = k;
    md.min_degree = pair_min_degree(out.graph);
    if (md.min_degree != u) throw Error("gen_space_barrier: internal error, unexpected pair min degree");
    md.alpha_bound = m - u;
    md.bound_mode = BoundMode::planted;
    md.no_factor = true;
    md.notes = "every transversal cycle meets U; n cycles needed but |U| = " + std::to_string(k * u);
    return out;
}

enum class TreeProfile { random, path, star_heavy, caterpillar, spider, broom };

inline const char* to_string(TreeProfile p) {
    switch (p) {
        case TreeProfile::random: return "random";
        case TreeProfile::path: return "path";
        case TreeProfile::star_heavy: return "star_heavy";
        case TreeProfile::caterpillar: return "caterpillar";
        case TreeProfile::spider: return "spider";
        default: return "broom";
    }
}

inline TreeProfile parse_tree_profile(const std::string& s) {
    for (auto p : {TreeProfile::random, TreeProfile::path, TreeProfile::star_heavy, TreeProfile::caterpillar,
                   TreeProfile::spider, TreeProfile::broom})
        if (s == to_string(p)) return p;
    throw ContractError("unknown tree profile: " + s);
}

namespace detail {

struct TreeBuilder {
    std::vector<Edge> edges;
    std::vector<int> deg;
    int size() const { return static_cast<int>(deg.size()); }
    int add(Vertex parent) {
        int v = size();
        deg.push_back(0);
        if (parent >= 0) {
            edges.emplace_back(parent, v);
            ++deg[parent];
            ++deg[v];
        }
        return v;
    }
};

/// Uniform parent among vertices with spare degree, optionally restricted to [lo, size).
inline Vertex random_open_parent(const TreeBuilder& b, int cap, Rng& rng, int lo = 0) {
    std::vector<Vertex> open;
    for (Vertex v = lo; v < b.size(); ++v)
        if (b.deg[v] < cap) open.push_back(v);
    if (open.empty()) throw Error("gen_tree: internal error, no open vertex");
    return open[rng.index(open.size())];
}

}  // namespace detail

/// Tree on n vertices with max degree at most delta_max, shaped by `profile`.
inline Tree gen_tree(int n, int delta_max, TreeProfile profile, std::uint64_t seed) {
    if (n < 1) throw ContractError("gen_tree: n must be positive");
    if (delta_max < 2) throw ContractError("gen_tree: delta_max must be at least 2");
    const bool branching = profile == TreeProfile::star_heavy || profile == TreeProfile::caterpillar ||
                           profile == TreeProfile::spider || profile == TreeProfile::broom;
    if (branching && delta_max < 3)
        throw ContractError(std::string("gen_tree: profile ") + to_string(profile) + " needs delta_max >= 3");
    Rng rng(seed);
    detail::TreeBuilder b;
    b.add(-1);
    const int D = delta_max;
    switch (profile) {
        case TreeProfile::path:
            while (b.size() < n) b.add(b.size() - 1);
            break;
        case TreeProfile::random:
            while (b.size() < n) b.add(detail::random_open_parent(b, D, rng));
            break;
        case TreeProfile::star_heavy: {
            // skeleton vertices each carry one pendant centre with D-1 leaves
            std::vector<Vertex> skeleton{0};
            while (b.size() < n) {
                Vertex s = skeleton.back();
                Vertex c = b.add(s);
                for (int j = 0; j < D - 1 && b.size() < n; ++j) b.add(c);
                if (b.size() >= n) break;
                std::vector<Vertex> open;
                for (Vertex v : skeleton)
                    if (b.deg[v] < D) open.push_back(v);
                Vertex next = b.add(open[rng.index(open.size())]);
                skeleton.push_back(next);
            }
            break;
        }
        case TreeProfile::caterpillar: {
            Vertex spine = 0;
            while (b.size() < n) {
                int leaves = rng.index(D - 1);  // 0..D-2 leaves keep room for two spine edges
                for (int j = 0; j < leaves && b.size() < n; ++j) b.add(spine);
                if (b.size() < n) spine = b.add(spine);
            }
            break;
        }
        case TreeProfile::spider: {
            std::vector<Vertex> tips(std::min(D, n - 1), 0);
            for (std::size_t leg = 0; b.size() < n; leg = (leg + 1) % tips.size()) tips[leg] = b.add(tips[leg]);
            break;
        }
        case TreeProfile::broom: {
            Vertex end = 0;
            while (b.size() < (n + 1) / 2) end = b.add(end);
            const int brush = b.size() - 1;
            while (b.size() < n) b.add(detail::random_open_parent(b, D, rng, brush));
            break;
        }
    }
    Tree t(n, b.edges);
    if (t.max_degree() > delta_max) throw Error("gen_tree: internal error, degree cap violated");
    return t;
}

struct BalancedPartition {
    std::vector<std::vector<Vertex>> parts;
    int attempts = 0;
};

/// Uniform partition into the given sizes, resampled until every vertex has at least
/// min_frac·|V_i| neighbours in every part.
inline BalancedPartition random_balanced_partition(const Graph& g, const std::vector<int>& sizes, double min_frac,
                                                   std::uint64_t seed, int cap = 100) {
    long total = 0;
    for (int s : sizes) {
        if (s < 0) throw ContractError("random_balanced_partition: negative size");
        total += s;
    }
    if (total != g.vertex_count()) throw ContractError("random_balanced_partition: sizes must sum to n");
    Rng rng(seed);
    const int n = g.vertex_count();
    std::vector<Vertex> perm(n);
    double worst_ratio = 0;
    Vertex worst_vertex = -1;
    int worst_part = -1;
    for (int attempt = 1; attempt <= cap; ++attempt) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        BalancedPartition out;
        out.attempts = attempt;
        std::vector<int> part_of(n);
        for (std::size_t i = 0, pos = 0; i < sizes.size(); ++i) {
            out.parts.emplace_back(perm.begin() + pos, perm.begin() + pos + sizes[i]);
            for (int j = 0; j < sizes[i]; ++j) part_of[perm[pos + j]] = static_cast<int>(i);
            pos += sizes[i];
        }
        bool ok = true;
        double attempt_worst = 1e18;
        Vertex av = -1;
        int ap = -1;
        std::vector<int> cnt(sizes.size());
        for (Vertex v = 0; v < n; ++v) {
            std::fill(cnt.begin(), cnt.end(), 0);
            for (Vertex u : g.neighbors(v)) ++cnt[part_of[u]];
            for (std::size_t i = 0; i < sizes.size(); ++i) {
                if (sizes[i] == 0) continue;
                double ratio = static_cast<double>(cnt[i]) / sizes[i];
                if (ratio < attempt_worst) {
                    attempt_worst = ratio;
                    av = v;
                    ap = static_cast<int>(i);
                }
                if (ratio < min_frac) ok = false;
            }
        }
        if (ok) return out;
        if (attempt_worst > worst_ratio || worst_vertex < 0) {
            worst_ratio = attempt_worst;
            worst_vertex = av;
            worst_part = ap;
        }
    }
    throw Error("random_balanced_partition: retry cap " + std::to_string(cap) + " exceeded; best attempt had vertex " +
                std::to_string(worst_vertex) + " with degree ratio " + std::to_string(worst_ratio) + " into part " +
                std::to_string(worst_part));
}

}  // namespace bht
