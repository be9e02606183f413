#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "bht/graph.hpp"

namespace bht {

/// A tree stored as an immutable graph.
class Tree {
public:
    Tree() = default;

    explicit Tree(Graph g) : g_(std::move(g)) {
        const int n = g_.vertex_count();
        if (n == 0) throw ContractError("tree must have at least one vertex");
        if (g_.edge_count() != n - 1) throw ContractError("tree must have exactly n-1 edges");
        std::vector<char> seen(n, 0);
        std::vector<Vertex> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex u : g_.neighbors(v))
                if (!seen[u]) {
                    seen[u] = 1;
                    ++reached;
                    stack.push_back(u);
                }
        }
        if (reached != n) throw ContractError("tree must be connected");
    }

    Tree(int n, std::span<const Edge> edges) : Tree(Graph(n, edges)) {}

    /// parents[i] is the parent of vertex i+1; vertex 0 is the root.
    static Tree from_parents(int n, std::span<const Vertex> parents) {
        if (static_cast<int>(parents.size()) != n - 1) throw ContractError("parent array must have n-1 entries");
        std::vector<Edge> edges;
        for (int i = 1; i < n; ++i) edges.emplace_back(parents[i - 1], i);
        return Tree(n, edges);
    }

    static Tree path(int n) {
        std::vector<Edge> e;
        for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
        return Tree(n, e);
    }

    const Graph& graph() const { return g_; }
    int vertex_count() const { return g_.vertex_count(); }
    int max_degree() const { return g_.max_degree(); }
    int degree(Vertex v) const { return g_.degree(v); }
    bool is_leaf(Vertex v) const { return g_.degree(v) == 1; }

    int leaf_count() const {
        int c = 0;
        for (Vertex v = 0; v < vertex_count(); ++v) c += is_leaf(v) ? 1 : 0;
        return c;
    }

    /// Parent array of a BFS from `root` (-1 at the root).
    std::vector<Vertex> parents_from(Vertex root) const {
        std::vector<Vertex> parent(vertex_count(), -2);
        parent[root] = -1;
        std::queue<Vertex> q;
        q.push(root);
        while (!q.empty()) {
            Vertex v = q.front();
            q.pop();
            for (Vertex u : g_.neighbors(v))
                if (parent[u] == -2) {
                    parent[u] = v;
                    q.push(u);
                }
        }
        return parent;
    }

private:
    Graph g_;
};

/// T' (all leaves removed) with the index map back into T.
struct StrippedTree {
    Tree core;
    std::vector<Vertex> to_old;
    std::vector<Vertex> to_new;
};

inline StrippedTree strip_leaves(const Tree& t) {
    if (t.vertex_count() <= 2)
        throw ContractError("strip_leaves: degenerate tree with " + std::to_string(t.vertex_count()) + " vertices");
    VertexSet keep(t.vertex_count());
    for (Vertex v = 0; v < t.vertex_count(); ++v)
        if (!t.is_leaf(v)) keep.insert(v);
    auto sub = induced_subgraph(t.graph(), keep);
    return StrippedTree{Tree(std::move(sub.graph)), std::move(sub.to_old), std::move(sub.to_new)};
}

/// Maximal star centred at a leaf of T'. Indices refer to T. root is -1 when T' is a single vertex.
struct PendantStar {
    Vertex center = -1;
    Vertex root = -1;
    std::vector<Vertex> leaves;
};

inline std::vector<Vertex> leaf_neighbors(const Tree& t, Vertex v) {
    std::vector<Vertex> out;
    for (Vertex u : t.graph().neighbors(v))
        if (t.is_leaf(u)) out.push_back(u);
    return out;
}

/// One pendant star per leaf of T'.
inline std::vector<PendantStar> find_pendant_stars(const Tree& t) {
    auto st = strip_leaves(t);
    std::vector<PendantStar> out;
    const Graph& core = st.core.graph();
    for (Vertex c = 0; c < core.vertex_count(); ++c) {
        if (core.degree(c) > 1) continue;
        PendantStar s;
        s.center = st.to_old[c];
        s.root = core.degree(c) == 1 ? st.to_old[core.neighbors(c)[0]] : -1;
        s.leaves = leaf_neighbors(t, s.center);
        out.push_back(std::move(s));
    }
    return out;
}

inline bool validate_pendant_star(const Tree& t, const PendantStar& s) {
    if (s.center < 0 || s.center >= t.vertex_count() || t.is_leaf(s.center)) return false;
    int internal_nbrs = 0;
    Vertex internal = -1;
    for (Vertex u : t.graph().neighbors(s.center))
        if (!t.is_leaf(u)) {
            ++internal_nbrs;
            internal = u;
        }
    if (internal_nbrs > 1) return false;
    if (internal != s.root) return false;
    auto expect = leaf_neighbors(t, s.center);
    auto got = s.leaves;
    std::sort(got.begin(), got.end());
    return got == expect && !got.empty();
}

/// Outcome of the leaves-or-bare-paths dichotomy.
struct BarePathSplit {
    bool leaves_branch = false;
    std::vector<Vertex> leaves;
    std::vector<std::vector<Vertex>> paths;  ///< each of k+1 vertices, pairwise disjoint
};

inline bool is_bare_path(const Tree& t, const std::vector<Vertex>& p) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!t.graph().adjacent(p[i], p[i + 1])) return false;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
        if (t.degree(p[i]) != 2) return false;
    return true;
}

/// Either >= n/(4k) leaves or >= n/(4k) vertex-disjoint bare paths of length k.
///
/// Roots T at a leaf; every non-root vertex of degree != 2 starts a chain that climbs
/// through degree-2 ancestors. Chains are disjoint and chopped into windows of k+1.
inline BarePathSplit find_bare_paths(const Tree& t, int k) {
    const int n = t.vertex_count();
    if (n <= 2 || k <= 2) throw ContractError("find_bare_paths: requires n, k > 2");
    BarePathSplit out;
    for (Vertex v = 0; v < n; ++v)
        if (t.is_leaf(v)) out.leaves.push_back(v);
    if (4L * k * static_cast<long>(out.leaves.size()) >= n) {
        out.leaves_branch = true;
        return out;
    }
    const Vertex root = out.leaves.front();
    auto parent = t.parents_from(root);
    for (Vertex v = 0; v < n; ++v) {
        if (v == root || t.degree(v) == 2) continue;
        std::vector<Vertex> chain{v};
        Vertex u = parent[v];
        while (u != -1 && t.degree(u) == 2) {
            chain.push_back(u);
            u = parent[u];
        }
        for (std::size_t start = 0; start + k + 1 <= chain.size(); start += k + 1)
            out.paths.emplace_back(chain.begin() + start, chain.begin() + start + k + 1);
    }
    if (4L * k * static_cast<long>(out.paths.size()) < n)
        throw Error("find_bare_paths: internal error, neither branch met the n/(4k) bound");
    return out;
}

/// Bare path of T' plus the T-leaves hanging off its internal vertices. Indices refer to T.
struct Caterpillar {
    std::vector<Vertex> central_path;
    std::vector<Vertex> branch_vertices;
    std::map<Vertex, std::vector<Vertex>> leaves;

    int length() const { return static_cast<int>(central_path.size()) - 1; }
    Vertex first() const { return central_path.front(); }
    Vertex last() const { return central_path.back(); }
    int leaf_count() const {
        int c = 0;
        for (const auto& [b, ls] : leaves) c += static_cast<int>(ls.size());
        return c;
    }
};

inline Caterpillar caterpillar_on(const Tree& t, std::vector<Vertex> path) {
    Caterpillar c;
    c.central_path = std::move(path);
    for (std::size_t i = 1; i + 1 < c.central_path.size(); ++i) {
        Vertex v = c.central_path[i];
        auto ls = leaf_neighbors(t, v);
        if (!ls.empty()) {
            c.branch_vertices.push_back(v);
            c.leaves[v] = std::move(ls);
        }
    }
    return c;
}

inline bool validate_caterpillar(const Tree& t, const Caterpillar& c) {
    const auto& p = c.central_path;
    if (p.size() < 2) return false;
    for (Vertex v : p)
        if (v < 0 || v >= t.vertex_count() || t.is_leaf(v)) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!t.graph().adjacent(p[i], p[i + 1])) return false;
    // internal vertices have exactly two non-leaf neighbours (degree 2 in T')
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        int internal = 0;
        for (Vertex u : t.graph().neighbors(p[i])) internal += t.is_leaf(u) ? 0 : 1;
        if (internal != 2) return false;
    }
    for (const auto& [b, ls] : c.leaves) {
        auto it = std::find(p.begin() + 1, p.end() - 1, b);
        if (it == p.end() - 1 || ls.empty()) return false;
        for (Vertex l : ls)
            if (!t.is_leaf(l) || !t.graph().adjacent(l, b)) return false;
    }
    return true;
}

enum class TreeCase { pendant_stars, caterpillars };

inline const char* to_string(TreeCase c) {
    return c == TreeCase::pendant_stars ? "pendant_stars" : "caterpillars";
}

struct TreeClassification {
    TreeCase case_tag = TreeCase::pendant_stars;
    std::vector<PendantStar> stars;
    std::vector<Caterpillar> caterpillars;
    int k = 0;
    int delta = 0;

    std::size_t count() const {
        return case_tag == TreeCase::pendant_stars ? stars.size() : caterpillars.size();
    }
};

/// Case 1 (>= n/(4kΔ) pendant stars) when achievable, otherwise Case 2 (caterpillars of length k).
inline TreeClassification classify(const Tree& t, int k, int delta_max) {
    const int n = t.vertex_count();
    if (n <= 2 || k <= 2) throw ContractError("classify: requires n, k > 2");
    if (t.max_degree() > delta_max)
        throw ContractError("classify: tree max degree " + std::to_string(t.max_degree()) + " exceeds " +
                            std::to_string(delta_max));
    TreeClassification out;
    out.k = k;
    out.delta = delta_max;
    const long bound_den = 4L * k * delta_max;
    out.stars = find_pendant_stars(t);
    if (bound_den * static_cast<long>(out.stars.size()) >= n) {
        out.case_tag = TreeCase::pendant_stars;
        return out;
    }
    auto st = strip_leaves(t);
    if (st.core.vertex_count() <= 2)
        throw Error("classify: internal error, tiny core without enough pendant stars");
    auto split = find_bare_paths(st.core, k);
    if (split.leaves_branch)
        throw Error("classify: internal error, core has many leaves but few pendant stars");
    out.case_tag = TreeCase::caterpillars;
    out.stars.clear();
    for (const auto& p : split.paths) {
        std::vector<Vertex> lifted;
        for (Vertex v : p) lifted.push_back(st.to_old[v]);
        out.caterpillars.push_back(caterpillar_on(t, std::move(lifted)));
    }
    if (bound_den * static_cast<long>(out.caterpillars.size()) < n)
        throw Error("classify: internal error, caterpillar count below n/(4k*delta)");
    return out;
}

/// Largest k' in {k/2, ..., k/2-3} with k' = 2 (mod 4); k' - 2 must be a positive multiple of 4.
inline int select_k_prime(int k) {
    for (int c = k / 2; c >= k / 2 - 3; --c)
        if (c >= 6 && c % 4 == 2) return c;
    throw ContractError("no admissible caterpillar length k' for k = " + std::to_string(k) + " (need k >= 12)");
}

/// Trimmed caterpillar oriented so that central_path.front() is the s-end.
struct TrimmedCaterpillar {
    Caterpillar body;
    bool s_next_is_branch = false;
};

struct CaterpillarFamily {
    int k_prime = 0;
    bool leafy = false;  ///< false selects the all-bare subcase
    std::vector<TrimmedCaterpillar> members;
};

/// Cut each length-k caterpillar down to length k' so that, when possible, the s-end's
/// neighbour on the path is a branch vertex; keep the larger of the leafy / bare families.
inline CaterpillarFamily extract_caterpillars_case2(const Tree& t, const TreeClassification& cls, int k_prime) {
    if (cls.case_tag != TreeCase::caterpillars) throw ContractError("extract_caterpillars_case2: not a Case 2 tree");
    if (k_prime < 6 || k_prime % 4 != 2 || k_prime > cls.k)
        throw ContractError("extract_caterpillars_case2: invalid k' = " + std::to_string(k_prime));
    std::vector<TrimmedCaterpillar> leafy, bare;
    for (const auto& c : cls.caterpillars) {
        const auto& p = c.central_path;
        const int len = c.length();
        int branch_pos = -1;
        for (int i = 1; i < len && branch_pos < 0; ++i)
            if (c.leaves.count(p[i])) branch_pos = i;
        std::vector<Vertex> window;
        if (branch_pos < 0) {
            window.assign(p.begin(), p.begin() + k_prime + 1);
            bare.push_back({caterpillar_on(t, std::move(window)), false});
            continue;
        }
        if (branch_pos - 1 + k_prime <= len) {
            window.assign(p.begin() + (branch_pos - 1), p.begin() + (branch_pos + k_prime));
        } else {
            // branch_pos >= k' - 1 here, walk backwards from branch_pos + 1
            for (int i = branch_pos + 1; i >= branch_pos + 1 - k_prime; --i) window.push_back(p[i]);
        }
        leafy.push_back({caterpillar_on(t, std::move(window)), true});
    }
    CaterpillarFamily fam;
    fam.k_prime = k_prime;
    fam.leafy = leafy.size() >= bare.size() && !leafy.empty();
    fam.members = fam.leafy ? std::move(leafy) : std::move(bare);
    return fam;
}

}  // namespace bht
