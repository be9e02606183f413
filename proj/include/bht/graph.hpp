#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bht {

/// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by the caller.
struct ContractError : Error {
    using Error::Error;
};

/// An exact routine was asked to handle an instance above its configured cap.
struct CapExceeded : Error {
    using Error::Error;
};

using Vertex = int;

/// Fixed-universe bitset over vertex indices.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

    static VertexSet of(int universe, std::span<const Vertex> members) {
        VertexSet s(universe);
        for (Vertex v : members) s.insert(v);
        return s;
    }
    static VertexSet of(int universe, std::initializer_list<Vertex> members) {
        return of(universe, std::span<const Vertex>(members.begin(), members.size()));
    }
    static VertexSet full(int universe) {
        VertexSet s(universe);
        for (Vertex v = 0; v < universe; ++v) s.insert(v);
        return s;
    }

    int universe() const { return universe_; }

    void insert(Vertex v) {
        check(v);
        words_[v >> 6] |= bit(v);
    }
    void erase(Vertex v) {
        check(v);
        words_[v >> 6] &= ~bit(v);
    }
    bool contains(Vertex v) const {
        return v >= 0 && v < universe_ && (words_[v >> 6] & bit(v)) != 0;
    }

    int count() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }
    bool empty() const {
        return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
    }

    /// Lowest member, or -1.
    Vertex first() const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return static_cast<Vertex>(i * 64 + std::countr_zero(words_[i]));
        return -1;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = std::countr_zero(w);
                f(static_cast<Vertex>(i * 64 + b));
                w &= w - 1;
            }
        }
    }

    std::vector<Vertex> to_vector() const {
        std::vector<Vertex> out;
        out.reserve(count());
        for_each([&](Vertex v) { out.push_back(v); });
        return out;
    }

    VertexSet& operator|=(const VertexSet& o) {
        same_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    VertexSet& operator&=(const VertexSet& o) {
        same_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    /// Set difference.
    VertexSet& operator-=(const VertexSet& o) {
        same_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

    int intersection_count(const VertexSet& o) const {
        same_universe(o);
        int c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] & o.words_[i]);
        return c;
    }
    bool intersects(const VertexSet& o) const {
        same_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    bool subset_of(const VertexSet& o) const {
        same_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
    static std::uint64_t bit(Vertex v) { return std::uint64_t{1} << (v & 63); }
    void check(Vertex v) const {
        if (v < 0 || v >= universe_)
            throw ContractError("vertex " + std::to_string(v) + " outside universe of size " +
                                std::to_string(universe_));
    }
    void same_universe(const VertexSet& o) const {
        if (o.universe_ != universe_) throw ContractError("vertex sets over different universes");
    }

    int universe_ = 0;
    std::vector<std::uint64_t> words_;
};

using Edge = std::pair<Vertex, Vertex>;

/// Undirected simple graph on 0..n-1. Immutable after construction.
class Graph {
public:
    Graph() = default;

    Graph(int n, std::span<const Edge> edges) : n_(n), adj_(n), nbr_(n, VertexSet(n)) {
        if (n < 0) throw ContractError("negative vertex count");
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw ContractError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                    ") has an endpoint outside 0.." + std::to_string(n - 1));
            if (u == v) throw ContractError("self-loop at vertex " + std::to_string(u));
            if (nbr_[u].contains(v)) continue;
            nbr_[u].insert(v);
            nbr_[v].insert(u);
        }
        for (Vertex v = 0; v < n; ++v) {
            adj_[v] = nbr_[v].to_vector();
            edge_count_ += static_cast<long>(adj_[v].size());
        }
        edge_count_ /= 2;
    }
    Graph(int n, std::initializer_list<Edge> edges)
        : Graph(n, std::span<const Edge>(edges.begin(), edges.size())) {}
    explicit Graph(int n) : Graph(n, std::span<const Edge>{}) {}

    int vertex_count() const { return n_; }
    long edge_count() const { return edge_count_; }
    const std::vector<Vertex>& neighbors(Vertex v) const { return adj_.at(v); }
    const VertexSet& neighbor_set(Vertex v) const { return nbr_.at(v); }
    int degree(Vertex v) const { return static_cast<int>(adj_.at(v).size()); }
    bool adjacent(Vertex u, Vertex v) const { return nbr_.at(u).contains(v); }

    int min_degree() const {
        int d = n_ == 0 ? 0 : n_;
        for (const auto& a : adj_) d = std::min(d, static_cast<int>(a.size()));
        return d;
    }
    int max_degree() const {
        int d = 0;
        for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
        return d;
    }

    /// d_X(v)
    int degree_into(Vertex v, const VertexSet& x) const { return nbr_.at(v).intersection_count(x); }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v : adj_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    VertexSet all() const { return VertexSet::full(n_); }
    VertexSet empty_set() const { return VertexSet(n_); }

private:
    int n_ = 0;
    long edge_count_ = 0;
    std::vector<std::vector<Vertex>> adj_;
    std::vector<VertexSet> nbr_;
};

/// N(X) \ X, optionally restricted to `within`.
inline VertexSet neighborhood(const Graph& g, const VertexSet& x,
                              const std::optional<VertexSet>& within = std::nullopt) {
    VertexSet out(g.vertex_count());
    x.for_each([&](Vertex v) { out |= g.neighbor_set(v); });
    out -= x;
    if (within) out &= *within;
    return out;
}

/// |E(a, b)| for disjoint a, b.
inline long edges_between(const Graph& g, const VertexSet& a, const VertexSet& b) {
    if (a.intersects(b)) throw ContractError("edges_between: sets overlap");
    long total = 0;
    a.for_each([&](Vertex v) { total += g.degree_into(v, b); });
    return total;
}

struct InducedSubgraph {
    Graph graph;
    std::vector<Vertex> to_old;  ///< new index -> original index
    std::vector<Vertex> to_new;  ///< original index -> new index, -1 if dropped
};

inline InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s) {
    InducedSubgraph out;
    out.to_old = s.to_vector();
    out.to_new.assign(g.vertex_count(), -1);
    for (std::size_t i = 0; i < out.to_old.size(); ++i) out.to_new[out.to_old[i]] = static_cast<Vertex>(i);
    std::vector<Edge> edges;
    for (Vertex u : out.to_old)
        for (Vertex v : g.neighbors(u))
            if (u < v && out.to_new[v] >= 0) edges.emplace_back(out.to_new[u], out.to_new[v]);
    out.graph = Graph(static_cast<int>(out.to_old.size()), edges);
    return out;
}

/// Spanning subgraph of the part_size-blow-up of C_k with labelled parts V_0..V_{k-1}.
class PartitionedGraph {
public:
    PartitionedGraph() = default;

    PartitionedGraph(Graph graph, int k, std::vector<std::vector<Vertex>> parts)
        : graph_(std::move(graph)), k_(k), parts_(std::move(parts)) {
        if (k_ < 3) throw ContractError("blow-up of C_k needs k >= 3");
        if (static_cast<int>(parts_.size()) != k_) throw ContractError("expected k parts");
        part_size_ = static_cast<int>(parts_[0].size());
        part_of_.assign(graph_.vertex_count(), -1);
        for (int i = 0; i < k_; ++i) {
            if (static_cast<int>(parts_[i].size()) != part_size_)
                throw ContractError("parts must all have the same size");
            std::sort(parts_[i].begin(), parts_[i].end());
            for (Vertex v : parts_[i]) {
                if (v < 0 || v >= graph_.vertex_count()) throw ContractError("part member out of range");
                if (part_of_[v] != -1) throw ContractError("parts are not disjoint");
                part_of_[v] = i;
            }
        }
        if (k_ * part_size_ != graph_.vertex_count()) throw ContractError("parts do not cover the vertex set");
        for (auto [u, v] : graph_.edges()) {
            int a = part_of_[u], b = part_of_[v];
            if (b != next(a) && a != next(b))
                throw ContractError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                    ") joins non-consecutive parts " + std::to_string(a) + " and " +
                                    std::to_string(b));
        }
        part_sets_.reserve(k_);
        for (int i = 0; i < k_; ++i) part_sets_.push_back(VertexSet::of(graph_.vertex_count(), parts_[i]));
    }

    /// Parts laid out as consecutive index ranges: V_i = [i*n, (i+1)*n).
    static PartitionedGraph ranged(int k, int part_size, std::span<const Edge> edges) {
        std::vector<std::vector<Vertex>> parts(k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < part_size; ++j) parts[i].push_back(i * part_size + j);
        return PartitionedGraph(Graph(k * part_size, edges), k, std::move(parts));
    }

    const Graph& graph() const { return graph_; }
    int k() const { return k_; }
    int part_size() const { return part_size_; }
    const std::vector<Vertex>& part(int i) const { return parts_.at(i); }
    const VertexSet& part_set(int i) const { return part_sets_.at(i); }
    const std::vector<std::vector<Vertex>>& parts() const { return parts_; }
    int part_of(Vertex v) const { return part_of_.at(v); }
    int next(int i) const { return (i + 1) % k_; }
    int prev(int i) const { return (i + k_ - 1) % k_; }
    int vertex_count() const { return graph_.vertex_count(); }

private:
    Graph graph_;
    int k_ = 0;
    int part_size_ = 0;
    std::vector<std::vector<Vertex>> parts_;
    std::vector<VertexSet> part_sets_;
    std::vector<int> part_of_;
};

/// δ̄: min over consecutive part pairs of the bipartite minimum degree.
inline int pair_min_degree(const PartitionedGraph& pg) {
    int best = pg.part_size();
    for (int i = 0; i < pg.k(); ++i) {
        const auto& nxt = pg.part_set(pg.next(i));
        const auto& cur = pg.part_set(i);
        for (Vertex v : pg.part(i)) best = std::min(best, pg.graph().degree_into(v, nxt));
        for (Vertex v : pg.part(pg.next(i))) best = std::min(best, pg.graph().degree_into(v, cur));
    }
    return best;
}

/// Balanced sub-instance G[keep] together with the index map back to pg.
struct PartitionedSubgraph {
    PartitionedGraph graph;
    std::vector<Vertex> to_old;
    std::vector<Vertex> to_new;
};

inline PartitionedSubgraph induced_partitioned(const PartitionedGraph& pg, const VertexSet& keep) {
    std::vector<int> per_part(pg.k(), 0);
    keep.for_each([&](Vertex v) { ++per_part[pg.part_of(v)]; });
    for (int c : per_part)
        if (c != per_part[0]) throw ContractError("induced_partitioned: subset is not balanced");
    const int m = per_part[0];
    PartitionedSubgraph out;
    out.to_new.assign(pg.vertex_count(), -1);
    out.to_old.reserve(static_cast<std::size_t>(m) * pg.k());
    for (int i = 0; i < pg.k(); ++i)
        for (Vertex v : pg.part(i))
            if (keep.contains(v)) {
                out.to_new[v] = static_cast<Vertex>(out.to_old.size());
                out.to_old.push_back(v);
            }
    std::vector<Edge> edges;
    for (Vertex u : out.to_old)
        for (Vertex v : pg.graph().neighbors(u))
            if (u < v && out.to_new[v] >= 0) edges.emplace_back(out.to_new[u], out.to_new[v]);
    out.graph = PartitionedGraph::ranged(pg.k(), m, edges);
    return out;
}

}  // namespace bht
