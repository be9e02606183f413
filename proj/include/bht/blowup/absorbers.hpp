#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "bht/blowup/cycles.hpp"

namespace bht {

/// Failure of a named construction stage.
struct StageError : Error {
    std::string stage;
    StageError(std::string stage_name, const std::string& what)
        : Error(stage_name + ": " + what), stage(std::move(stage_name)) {}
};

/// S with transversal factors of G[{u} ∪ S] and G[{v} ∪ S].
struct Connector {
    Vertex u = -1, v = -1;
    std::vector<Vertex> set;
    Factor factor_u;
    Factor factor_v;
};

/// A_S with transversal factors of G[A_S] and G[A_S ∪ S].
struct Absorber {
    enum class Kind { empty, swap, connectors };
    Kind kind = Kind::empty;
    std::vector<Vertex> target;  ///< S, indexed by part
    std::vector<Vertex> set;     ///< A_S
    Factor factor_alone;
    Factor factor_with_target;
};

inline const char* to_string(Absorber::Kind k) {
    switch (k) {
        case Absorber::Kind::empty: return "empty";
        case Absorber::Kind::swap: return "swap";
        default: return "connectors";
    }
}

template <typename T>
struct Attempt {
    std::optional<T> value;
    std::string failed_stage;
    explicit operator bool() const { return value.has_value(); }
};

namespace detail {

inline VertexSet with(VertexSet s, std::initializer_list<Vertex> vs) {
    for (Vertex v : vs) s.insert(v);
    return s;
}

inline TransversalCycle replace(TransversalCycle c, Vertex from, Vertex to) {
    for (auto& x : c.vertices)
        if (x == from) x = to;
    return c;
}

}  // namespace detail

inline bool verify_connector(const PartitionedGraph& pg, const Connector& c) {
    const int n = pg.vertex_count();
    auto s = VertexSet::of(n, c.set);
    if (s.count() != static_cast<int>(c.set.size()) || s.contains(c.u) || s.contains(c.v)) return false;
    if (static_cast<int>(c.set.size()) > 2 * pg.k() - 1) return false;
    return verify_factor(pg, c.factor_u, detail::with(s, {c.u})) && verify_factor(pg, c.factor_v, detail::with(s, {c.v}));
}

inline bool verify_absorber(const PartitionedGraph& pg, const Absorber& a) {
    const int n = pg.vertex_count();
    auto s = VertexSet::of(n, a.target);
    auto as = VertexSet::of(n, a.set);
    if (as.count() != static_cast<int>(a.set.size()) || as.intersects(s)) return false;
    if (static_cast<int>(a.set.size()) > 2 * pg.k() * pg.k()) return false;
    for (int i = 0; i < pg.k(); ++i)
        if (pg.part_of(a.target[i]) != i) return false;
    return verify_factor(pg, a.factor_alone, as) && verify_factor(pg, a.factor_with_target, as | s);
}

/// Connector for u, v in the same part: pivot x adjacent to y1..y4 taken from disjoint
/// neighbourhood sets of u and v, and two disjoint cycles C1 ∋ u,y1,y3 and C2 ∋ v,y2,y4.
inline Attempt<Connector> find_connector(const PartitionedGraph& pg, Vertex u, Vertex v, const VertexSet& forbidden,
                                         Rng& rng, int attempts = 20) {
    Attempt<Connector> out;
    const int k = pg.k();
    const int i = pg.part_of(u);
    if (pg.part_of(v) != i || u == v) throw ContractError("find_connector: need distinct u, v in one part");
    const Graph& g = pg.graph();
    const int nx = pg.next(i), pv = pg.prev(i);
    const VertexSet blocked = detail::with(forbidden, {u, v});

    // D1, D2 ⊆ V_{i+1} and D3, D4 ⊆ V_{i-1}, pairwise disjoint, shared neighbours split at random
    auto split = [&](int part, VertexSet& du, VertexSet& dv) {
        VertexSet nu = (g.neighbor_set(u) & pg.part_set(part)) - blocked;
        VertexSet nv = (g.neighbor_set(v) & pg.part_set(part)) - blocked;
        du = nu - nv;
        dv = nv - nu;
        auto shared = (nu & nv).to_vector();
        rng.shuffle(shared);
        for (Vertex w : shared) (du.count() <= dv.count() ? du : dv).insert(w);
    };
    VertexSet d1(pg.vertex_count()), d2(pg.vertex_count()), d3(pg.vertex_count()), d4(pg.vertex_count());
    split(nx, d1, d2);
    split(pv, d3, d4);
    if (d1.empty() || d2.empty() || d3.empty() || d4.empty()) {
        out.failed_stage = "neighbourhood sets";
        return out;
    }

    auto pivots = (pg.part_set(i) - blocked).to_vector();
    rng.shuffle(pivots);
    std::string stage = "pivot";
    int tries = 0;
    for (Vertex x : pivots) {
        const auto& nxs = g.neighbor_set(x);
        if (!nxs.intersects(d1) || !nxs.intersects(d2) || !nxs.intersects(d3) || !nxs.intersects(d4)) continue;
        if (tries++ >= attempts) break;
        auto pick = [&](const VertexSet& d) {
            auto c = (d & nxs).to_vector();
            return c[rng.index(c.size())];
        };
        Vertex y1 = pick(d1), y2 = pick(d2), y3 = pick(d3), y4 = pick(d4);
        std::vector<Vertex> a1(k, -1), a2(k, -1);
        a1[i] = u, a1[nx] = y1, a1[pv] = y3;
        a2[i] = v, a2[nx] = y2, a2[pv] = y4;
        auto c1 = transversal_cycle_through(pg, a1, detail::with(blocked, {x, y2, y4}), &rng);
        if (!c1) {
            stage = "first cycle";
            continue;
        }
        VertexSet used = detail::with(blocked, {x});
        for (Vertex w : c1->vertices) used.insert(w);
        auto c2 = transversal_cycle_through(pg, a2, used, &rng);
        if (!c2) {
            stage = "second cycle";
            continue;
        }
        Connector con;
        con.u = u;
        con.v = v;
        con.set.push_back(x);
        for (Vertex w : c1->vertices)
            if (w != u) con.set.push_back(w);
        for (Vertex w : c2->vertices)
            if (w != v) con.set.push_back(w);
        con.factor_u = {*c1, detail::replace(*c2, v, x)};
        con.factor_v = {*c2, detail::replace(*c1, u, x)};
        if (!verify_connector(pg, con)) throw Error("find_connector: internal error, witness failed to verify");
        out.value = std::move(con);
        return out;
    }
    out.failed_stage = stage;
    return out;
}

/// Absorber of size k: a cycle C whose vertex in some part i can trade places with s_i.
inline Attempt<Absorber> find_swap_absorber(const PartitionedGraph& pg, const std::vector<Vertex>& s,
                                            const VertexSet& forbidden, Rng& rng, int attempts = 20) {
    Attempt<Absorber> out;
    out.failed_stage = "swap";
    const int k = pg.k();
    const Graph& g = pg.graph();
    const VertexSet blocked = forbidden | VertexSet::of(pg.vertex_count(), s);
    std::vector<int> parts(k);
    for (int i = 0; i < k; ++i) parts[i] = i;
    rng.shuffle(parts);
    for (int i : parts) {
        // S - s_i must already be a path from s_{i+1} around to s_{i-1}
        bool path = true;
        for (int t = 1; t + 1 < k && path; ++t) path = g.adjacent(s[(i + t) % k], s[(i + t + 1) % k]);
        if (!path) continue;
        const int nx = pg.next(i), pv = pg.prev(i);
        auto cands = ((pg.part_set(i) & g.neighbor_set(s[nx]) & g.neighbor_set(s[pv])) - blocked).to_vector();
        rng.shuffle(cands);
        if (static_cast<int>(cands.size()) > attempts) cands.resize(attempts);
        VertexSet off_nbrs = blocked | ((pg.part_set(nx) | pg.part_set(pv)) - g.neighbor_set(s[i]));
        for (Vertex c : cands) {
            std::vector<Vertex> anchors(k, -1);
            anchors[i] = c;
            auto cyc = transversal_cycle_through(pg, anchors, off_nbrs, &rng);
            if (!cyc) continue;
            Absorber a;
            a.kind = Absorber::Kind::swap;
            a.target = s;
            a.set = cyc->vertices;
            a.factor_alone = {*cyc};
            TransversalCycle swapped{s};
            swapped.vertices[i] = c;
            a.factor_with_target = {detail::replace(*cyc, c, s[i]), swapped};
            out.value = std::move(a);
            return out;
        }
    }
    return out;
}

/// Absorber from a disjoint cycle T plus a connector for every pair (s_i, t_i); size 2k².
inline Attempt<Absorber> find_connector_absorber(const PartitionedGraph& pg, const std::vector<Vertex>& s,
                                                 const VertexSet& forbidden, Rng& rng, int attempts = 20) {
    Attempt<Absorber> out;
    const int k = pg.k();
    VertexSet blocked = forbidden | VertexSet::of(pg.vertex_count(), s);
    for (int a = 0; a < attempts; ++a) {
        auto t = transversal_cycle_through(pg, std::vector<Vertex>(k, -1), blocked, &rng);
        if (!t) {
            out.failed_stage = "cycle T";
            return out;
        }
        VertexSet used = blocked;
        for (Vertex w : t->vertices) used.insert(w);
        Absorber abs;
        abs.kind = Absorber::Kind::connectors;
        abs.target = s;
        abs.set = t->vertices;
        abs.factor_with_target.push_back(*t);
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) {
            auto con = find_connector(pg, s[i], t->vertices[i], used, rng, attempts);
            if (!con) {
                out.failed_stage = "connector " + std::to_string(i) + " (" + con.failed_stage + ")";
                ok = false;
                break;
            }
            for (Vertex w : con.value->set) {
                used.insert(w);
                abs.set.push_back(w);
            }
            for (const auto& c : con.value->factor_u) abs.factor_with_target.push_back(c);
            for (const auto& c : con.value->factor_v) abs.factor_alone.push_back(c);
        }
        if (!ok) continue;
        out.value = std::move(abs);
        return out;
    }
    return out;
}

struct AbsorberOptions {
    bool allow_empty = true;
    bool allow_swap = true;
    int attempts = 20;
};

/// Cheapest absorber available: S itself when it spans a cycle, then a swap, then connectors.
inline Attempt<Absorber> find_absorber(const PartitionedGraph& pg, const std::vector<Vertex>& s,
                                       const VertexSet& forbidden, Rng& rng, const AbsorberOptions& opt = {}) {
    const int k = pg.k();
    if (static_cast<int>(s.size()) != k) throw ContractError("find_absorber: S must have k vertices");
    for (int i = 0; i < k; ++i)
        if (pg.part_of(s[i]) != i) throw ContractError("find_absorber: S must be transversal and part-ordered");
    Attempt<Absorber> out;
    if (opt.allow_empty && is_transversal_cycle(pg, TransversalCycle{s})) {
        Absorber a;
        a.kind = Absorber::Kind::empty;
        a.target = s;
        a.factor_with_target = {TransversalCycle{s}};
        out.value = std::move(a);
    }
    if (!out && opt.allow_swap) out = find_swap_absorber(pg, s, forbidden, rng, opt.attempts);
    if (!out) out = find_connector_absorber(pg, s, forbidden, rng, opt.attempts);
    if (out && !verify_absorber(pg, *out.value)) throw Error("find_absorber: internal error, witness failed to verify");
    return out;
}

/// Pairwise disjoint (k-1)-sets, each spanning a transversal cycle with the centre.
struct Fan {
    Vertex center = -1;
    std::vector<TransversalCycle> cycles;
    int shortfall = 0;
};

inline bool verify_fan(const PartitionedGraph& pg, const Fan& f) {
    VertexSet seen(pg.vertex_count());
    for (const auto& c : f.cycles) {
        if (!is_transversal_cycle(pg, c) || c.vertices[pg.part_of(f.center)] != f.center) return false;
        for (Vertex v : c.vertices) {
            if (v == f.center) continue;
            if (seen.contains(v)) return false;
            seen.insert(v);
        }
    }
    return true;
}

/// Greedy fan at v avoiding `forbidden`, up to target_size cycles.
inline Fan build_fan(const PartitionedGraph& pg, Vertex v, int target_size, const VertexSet& forbidden,
                     Rng* rng = nullptr) {
    Fan f;
    f.center = v;
    VertexSet used = forbidden;
    used.erase(v);
    std::vector<Vertex> anchors(pg.k(), -1);
    anchors[pg.part_of(v)] = v;
    while (static_cast<int>(f.cycles.size()) < target_size) {
        auto c = transversal_cycle_through(pg, anchors, used, rng);
        if (!c) break;
        for (Vertex w : c->vertices)
            if (w != v) used.insert(w);
        f.cycles.push_back(*c);
    }
    f.shortfall = target_size - static_cast<int>(f.cycles.size());
    return f;
}

}  // namespace bht
