#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "bht/graph.hpp"

namespace bht {

/// Maximum matching in an abstract bipartite graph with sides 0..na-1 and 0..nb-1.
struct BipartiteResult {
    std::vector<int> mate_a;  ///< -1 if unmatched
    std::vector<int> mate_b;
    std::vector<int> cover_a;  ///< König cover, left side
    std::vector<int> cover_b;  ///< König cover, right side
    int size = 0;
};

/// Hopcroft–Karp followed by the König construction of a minimum vertex cover.
inline BipartiteResult hopcroft_karp(int na, int nb, const std::vector<std::vector<int>>& adj) {
    constexpr int inf = std::numeric_limits<int>::max();
    BipartiteResult r;
    r.mate_a.assign(na, -1);
    r.mate_b.assign(nb, -1);
    std::vector<int> dist(na);
    std::vector<std::size_t> it(na);

    auto bfs = [&] {
        std::queue<int> q;
        bool found = false;
        for (int a = 0; a < na; ++a) {
            dist[a] = r.mate_a[a] < 0 ? 0 : inf;
            if (dist[a] == 0) q.push(a);
        }
        while (!q.empty()) {
            int a = q.front();
            q.pop();
            for (int b : adj[a]) {
                int a2 = r.mate_b[b];
                if (a2 < 0) {
                    found = true;
                } else if (dist[a2] == inf) {
                    dist[a2] = dist[a] + 1;
                    q.push(a2);
                }
            }
        }
        return found;
    };

    // iterative DFS along the layered graph
    auto augment = [&](int root) {
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int a = stack.back();
            bool advanced = false;
            while (it[a] < adj[a].size()) {
                int b = adj[a][it[a]];
                int a2 = r.mate_b[b];
                if (a2 < 0) {
                    // flip the alternating path recorded on the stack
                    for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i) {
                        int x = stack[i];
                        int y = adj[x][it[x]];
                        r.mate_a[x] = y;
                        r.mate_b[y] = x;
                    }
                    return true;
                }
                if (dist[a2] == dist[a] + 1) {
                    stack.push_back(a2);
                    advanced = true;
                    break;
                }
                ++it[a];
            }
            if (!advanced) {
                dist[a] = inf;
                stack.pop_back();
                if (!stack.empty()) ++it[stack.back()];
            }
        }
        return false;
    };

    while (bfs()) {
        std::fill(it.begin(), it.end(), 0);
        for (int a = 0; a < na; ++a)
            if (r.mate_a[a] < 0 && augment(a)) ++r.size;
    }

    // König: Z = vertices reachable from free left vertices by alternating paths.
    std::vector<char> za(na, 0), zb(nb, 0);
    std::queue<int> q;
    for (int a = 0; a < na; ++a)
        if (r.mate_a[a] < 0) {
            za[a] = 1;
            q.push(a);
        }
    while (!q.empty()) {
        int a = q.front();
        q.pop();
        for (int b : adj[a]) {
            if (zb[b] || r.mate_a[a] == b) continue;
            zb[b] = 1;
            int a2 = r.mate_b[b];
            if (a2 >= 0 && !za[a2]) {
                za[a2] = 1;
                q.push(a2);
            }
        }
    }
    for (int a = 0; a < na; ++a)
        if (!za[a]) r.cover_a.push_back(a);
    for (int b = 0; b < nb; ++b)
        if (zb[b]) r.cover_b.push_back(b);
    return r;
}

struct Matching {
    std::vector<Edge> edges;         ///< (a-side, b-side)
    std::vector<Vertex> cover;       ///< minimum vertex cover, host indices
    std::vector<Vertex> unmatched_a;
    std::vector<Vertex> unmatched_b;
    int size() const { return static_cast<int>(edges.size()); }
};

/// Maximum matching of g between disjoint sets a and b, with a König cover.
inline Matching max_bipartite_matching(const Graph& g, const VertexSet& a, const VertexSet& b) {
    if (a.intersects(b)) throw ContractError("max_bipartite_matching: sides must be disjoint");
    auto av = a.to_vector();
    auto bv = b.to_vector();
    std::vector<int> b_index(g.vertex_count(), -1);
    for (std::size_t i = 0; i < bv.size(); ++i) b_index[bv[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(av.size());
    for (std::size_t i = 0; i < av.size(); ++i)
        for (Vertex u : g.neighbors(av[i]))
            if (b_index[u] >= 0) adj[i].push_back(b_index[u]);
    auto r = hopcroft_karp(static_cast<int>(av.size()), static_cast<int>(bv.size()), adj);
    Matching m;
    for (std::size_t i = 0; i < av.size(); ++i) {
        if (r.mate_a[i] >= 0)
            m.edges.emplace_back(av[i], bv[r.mate_a[i]]);
        else
            m.unmatched_a.push_back(av[i]);
    }
    for (std::size_t j = 0; j < bv.size(); ++j)
        if (r.mate_b[j] < 0) m.unmatched_b.push_back(bv[j]);
    for (int i : r.cover_a) m.cover.push_back(av[i]);
    for (int j : r.cover_b) m.cover.push_back(bv[j]);
    return m;
}

/// Dinic maximum flow with integer capacities.
class MaxFlow {
public:
    explicit MaxFlow(int nodes) : head_(nodes, -1) {}

    int add_edge(int from, int to, long cap) {
        int id = static_cast<int>(to_.size());
        to_.push_back(to);
        cap_.push_back(cap);
        next_.push_back(head_[from]);
        head_[from] = id;
        to_.push_back(from);
        cap_.push_back(0);
        next_.push_back(head_[to]);
        head_[to] = id + 1;
        return id;
    }

    long run(int s, int t) {
        long total = 0;
        const int n = static_cast<int>(head_.size());
        level_.assign(n, -1);
        iter_.assign(n, -1);
        while (bfs(s, t)) {
            for (int v = 0; v < n; ++v) iter_[v] = head_[v];
            while (long f = dfs(s, t, std::numeric_limits<long>::max())) total += f;
        }
        return total;
    }

    long flow_on(int edge_id) const { return cap_[edge_id ^ 1]; }

    /// Nodes reachable from s in the residual network after run().
    std::vector<char> source_side(int s) const {
        std::vector<char> seen(head_.size(), 0);
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int e = head_[v]; e >= 0; e = next_[e])
                if (cap_[e] > 0 && !seen[to_[e]]) {
                    seen[to_[e]] = 1;
                    stack.push_back(to_[e]);
                }
        }
        return seen;
    }

private:
    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int e = head_[v]; e >= 0; e = next_[e])
                if (cap_[e] > 0 && level_[to_[e]] < 0) {
                    level_[to_[e]] = level_[v] + 1;
                    q.push(to_[e]);
                }
        }
        return level_[t] >= 0;
    }

    long dfs(int v, int t, long pushed) {
        if (v == t) return pushed;
        for (int& e = iter_[v]; e >= 0; e = next_[e]) {
            int u = to_[e];
            if (cap_[e] <= 0 || level_[u] != level_[v] + 1) continue;
            if (long got = dfs(u, t, std::min(pushed, cap_[e]))) {
                cap_[e] -= got;
                cap_[e ^ 1] += got;
                return got;
            }
        }
        return 0;
    }

    std::vector<int> head_, to_, next_;
    std::vector<long> cap_;
    std::vector<int> level_, iter_;
};

/// Disjoint stars centred in U whose leaf sets partition W.
struct StarFamily {
    std::map<Vertex, std::vector<Vertex>> stars;
};

/// Y ⊆ W whose neighbourhood in U has total capacity below |Y|.
struct HallWitness {
    std::vector<Vertex> deficient;  ///< Y
    std::vector<Vertex> neighbors;  ///< N(Y) ∩ U
    long capacity = 0;              ///< Σ f over N(Y)
};

struct FMatchingResult {
    bool feasible = false;
    long flow = 0;
    StarFamily family;
    HallWitness witness;  ///< filled when infeasible
};

/// f-matching from U into W via unit-capacity max flow; f is indexed by host vertex.
inline FMatchingResult f_matching(const Graph& g, const VertexSet& u_set, const VertexSet& w_set,
                                  const std::vector<int>& f) {
    if (u_set.intersects(w_set)) throw ContractError("f_matching: U and W must be disjoint");
    auto uv = u_set.to_vector();
    auto wv = w_set.to_vector();
    long demand = 0;
    for (Vertex u : uv) {
        if (f.at(u) < 0) throw ContractError("f_matching: negative f");
        demand += f[u];
    }
    if (demand != static_cast<long>(wv.size()))
        throw ContractError("f_matching: sum of f must equal |W|");

    const int nu = static_cast<int>(uv.size());
    const int nw = static_cast<int>(wv.size());
    const int source = nu + nw, sink = source + 1;
    std::vector<int> w_index(g.vertex_count(), -1);
    for (int j = 0; j < nw; ++j) w_index[wv[j]] = j;
    MaxFlow net(nu + nw + 2);
    for (int i = 0; i < nu; ++i) net.add_edge(source, i, f[uv[i]]);
    std::vector<std::pair<int, std::pair<int, int>>> mids;
    for (int i = 0; i < nu; ++i)
        for (Vertex w : g.neighbors(uv[i]))
            if (w_index[w] >= 0) mids.push_back({net.add_edge(i, nu + w_index[w], nw), {i, w_index[w]}});
    for (int j = 0; j < nw; ++j) net.add_edge(nu + j, sink, 1);

    FMatchingResult r;
    r.flow = net.run(source, sink);
    if (r.flow == nw) {
        r.feasible = true;
        for (Vertex u : uv)
            if (f[u] > 0) r.family.stars[u];
        for (const auto& [id, ends] : mids)
            if (net.flow_on(id) > 0) r.family.stars[uv[ends.first]].push_back(wv[ends.second]);
        return r;
    }
    // min cut: Y = W outside the source side; N(Y) lies outside it too
    auto side = net.source_side(source);
    VertexSet y(g.vertex_count());
    for (int j = 0; j < nw; ++j)
        if (!side[nu + j]) {
            y.insert(wv[j]);
            r.witness.deficient.push_back(wv[j]);
        }
    auto ny = neighborhood(g, y, u_set);
    r.witness.neighbors = ny.to_vector();
    for (Vertex u : r.witness.neighbors) r.witness.capacity += f[u];
    return r;
}

/// True if `fam` is a valid f-matching of U into W in g.
inline bool verify_star_family(const Graph& g, const VertexSet& u_set, const VertexSet& w_set,
                               const std::vector<int>& f, const StarFamily& fam) {
    VertexSet covered(g.vertex_count());
    long total = 0;
    for (const auto& [u, leaves] : fam.stars) {
        if (!u_set.contains(u) || static_cast<int>(leaves.size()) != f[u]) return false;
        for (Vertex w : leaves) {
            if (!w_set.contains(w) || covered.contains(w) || !g.adjacent(u, w)) return false;
            covered.insert(w);
            ++total;
        }
    }
    for (Vertex u : u_set.to_vector())
        if (f[u] > 0 && !fam.stars.count(u)) return false;
    return covered == w_set && total == w_set.count();
}

}  // namespace bht
