#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bht/blowup/absorbers.hpp"
#include "bht/blowup/template.hpp"

namespace bht {

/// Desk-scale constants. |X_i| = m + ⌊β′m⌋ with m = ⌊⌈qn⌉/(1+β′)⌋; γ caps |R| at γkn.
struct AbsorbingParams {
    double q = 0.2;
    double beta_prime = 7;
    double gamma = 0.6;
    int fan_min = 1;
    int x_retries = 100;
    int absorber_attempts = 10;
    TemplateOptions tmpl;
    long absorb_budget = 200000;
    int leftover_samples = 200;
    int build_retries = 10;
    int self_checks = 2;  ///< random leftovers absorbed per size before a build is accepted
};

struct TemplateEdge {
    int left = 0;
    int z = 0;
    bool enabled = false;  ///< false when no absorber fitted in the budget
    Absorber absorber;
};

struct AbsorbingPart {
    std::vector<Vertex> x, y;
    std::vector<std::vector<Vertex>> z_sets;  ///< z_sets[j][p] for p ≠ i; -1 at part i
    Template tmpl;
    std::vector<TemplateEdge> edges;  ///< parallel to tmpl.edges

    Vertex left_vertex(int a) const { return a < tmpl.x_size ? x[a] : y[a - tmpl.x_size]; }
    std::vector<char> enabled() const {
        std::vector<char> out;
        for (const auto& e : edges) out.push_back(e.enabled);
        return out;
    }
};

struct AbsorbingSet {
    int k = 0;
    int part_size = 0;
    int m = 0;
    int x_size = 0;
    int spare = 0;     ///< ⌊β′m⌋ reservoir vertices used per part by every absorption
    int capacity = 0;  ///< max |U ∩ V_i|
    double xi = 0;     ///< capacity / part_size
    double gamma = 0;
    std::vector<AbsorbingPart> parts;
    VertexSet r;
    int x_attempts = 0;
    int empty_absorbers = 0, swap_absorbers = 0, connector_absorbers = 0, disabled_edges = 0;
};

namespace detail {

inline std::vector<Vertex> edge_target(const AbsorbingPart& part, int i, const TemplateEdge& e) {
    auto s = part.z_sets[e.z];
    s[i] = part.left_vertex(e.left);
    return s;
}

inline void check_equal_parts(const PartitionedGraph& pg) {
    for (int i = 0; i < pg.k(); ++i)
        if (static_cast<int>(pg.part(i).size()) != pg.part_size())
            throw ContractError("absorbing set: parts must have equal size");
}

}  // namespace detail

/// Invariants: disjoint components, every enabled edge carries a verified absorber, |R| ≤ γkn.
inline bool verify_absorbing_set(const PartitionedGraph& pg, const AbsorbingSet& as) {
    const int n = pg.vertex_count();
    VertexSet seen(n);
    int total = 0;
    auto take = [&](Vertex v) {
        if (v < 0) return true;
        ++total;
        if (seen.contains(v)) return false;
        seen.insert(v);
        return true;
    };
    for (int i = 0; i < as.k; ++i) {
        const auto& part = as.parts[i];
        for (Vertex v : part.x)
            if (pg.part_of(v) != i || !take(v)) return false;
        for (Vertex v : part.y)
            if (pg.part_of(v) != i || !take(v)) return false;
        for (const auto& z : part.z_sets)
            for (Vertex v : z)
                if (!take(v)) return false;
        for (const auto& e : part.edges) {
            if (!e.enabled) continue;
            for (Vertex v : e.absorber.set)
                if (!take(v)) return false;
            if (e.absorber.target != detail::edge_target(part, i, e) || !verify_absorber(pg, e.absorber)) return false;
        }
    }
    return seen == as.r && total <= static_cast<int>(as.gamma * as.k * as.part_size);
}

namespace detail {

// One construction attempt: reservoir X with fan checks, template per part, Y and Z carved
// as cycles where the template allows, and an absorber per template edge while γ lasts.
inline AbsorbingSet build_absorbing_set_once(const PartitionedGraph& pg, const AbsorbingParams& p,
                                             std::uint64_t seed) {
    detail::check_equal_parts(pg);
    const int k = pg.k(), n = pg.part_size(), total = pg.vertex_count();
    AbsorbingSet as;
    as.k = k;
    as.part_size = n;
    as.gamma = p.gamma;
    as.m = std::max(1, static_cast<int>(std::ceil(p.q * n) / (1 + p.beta_prime)));
    as.spare = static_cast<int>(p.beta_prime * as.m);
    as.x_size = as.m + as.spare;
    as.capacity = as.spare / (k - 1);
    as.xi = static_cast<double>(as.capacity) / n;
    if (as.x_size + 2 * as.m >= n) throw ContractError("build_absorbing_set: reservoir does not fit in a part");
    const long budget = static_cast<long>(p.gamma * k * n);
    const long skeleton = static_cast<long>(k) * (as.x_size + 2 * as.m + 3L * as.m * (k - 1));
    if (skeleton > budget)
        throw ContractError("build_absorbing_set: reservoir skeleton of " + std::to_string(skeleton) +
                            " vertices exceeds the budget " + std::to_string(budget));
    Rng rng(seed);

    VertexSet xset(total);
    std::string worst;
    for (as.x_attempts = 1; as.x_attempts <= p.x_retries; ++as.x_attempts) {
        xset = VertexSet(total);
        as.parts.assign(k, {});
        for (int i = 0; i < k; ++i) {
            auto verts = pg.part(i);
            rng.shuffle(verts);
            verts.resize(as.x_size);
            as.parts[i].x = verts;
            for (Vertex v : verts) xset.insert(v);
        }
        bool ok = true;
        const VertexSet outside = VertexSet::full(total) - xset;
        for (Vertex v = 0; v < total && ok; ++v) {
            VertexSet forbidden = outside;
            forbidden.erase(v);
            auto f = build_fan(pg, v, p.fan_min, forbidden);
            if (f.shortfall > 0) {
                worst = "vertex " + std::to_string(v) + " has a fan of " + std::to_string(f.cycles.size());
                ok = false;
                break;
            }
        }
        if (ok) break;
    }
    if (as.x_attempts > p.x_retries)
        throw StageError("reservoir", "no fan-surviving reservoir in " + std::to_string(p.x_retries) +
                                          " attempts; last: " + worst);

    VertexSet used = xset;
    for (int i = 0; i < k; ++i) {
        auto& part = as.parts[i];
        part.tmpl = build_template(as.m, p.beta_prime, Rng::derive(seed, 1000 + i).next(), p.tmpl);
        const auto& t = part.tmpl;
        std::vector<int> deg_left(t.left_size(), 0), deg_z(t.z_size, 0);
        for (auto [a, z] : t.edges) ++deg_left[a], ++deg_z[z];
        part.y.assign(t.y_size, -1);
        part.z_sets.assign(t.z_size, {});
        // a private pair Y_j–z_j is carved as one cycle, so its edge needs no absorber
        for (int j = 0; j < t.y_size; ++j) {
            if (deg_left[t.x_size + j] != 1 || deg_z[j] != 1) continue;
            auto c = transversal_cycle_through(pg, std::vector<Vertex>(k, -1), used, &rng);
            if (!c) throw StageError("carve", "no free transversal cycle for Y/Z in part " + std::to_string(i));
            part.y[j] = c->vertices[i];
            part.z_sets[j] = c->vertices;
            part.z_sets[j][i] = -1;
            for (Vertex v : c->vertices) used.insert(v);
        }
        for (auto& y : part.y) {
            if (y >= 0) continue;
            auto free = (pg.part_set(i) - used).to_vector();
            if (free.empty()) throw StageError("carve", "part " + std::to_string(i) + " exhausted");
            y = free[rng.index(free.size())];
            used.insert(y);
        }
        // remaining indices: path whose ends close up with as many template neighbours as possible
        for (int z = 0; z < t.z_size; ++z) {
            if (!part.z_sets[z].empty()) continue;
            std::vector<Vertex> nbrs;
            for (auto [a, zz] : t.edges)
                if (zz == z) nbrs.push_back(part.left_vertex(a));
            std::optional<std::vector<Vertex>> best;
            int best_closed = -1;
            for (int attempt = 0; attempt < 3; ++attempt) {
                auto order = nbrs;
                rng.shuffle(order);
                for (int keep = static_cast<int>(order.size()); keep >= 0; --keep) {
                    std::vector<VertexSet> layers;
                    for (int s = 1; s < k; ++s) layers.push_back(pg.part_set((i + s) % k) - used);
                    for (int r = 0; r < keep; ++r) {
                        layers.front() &= pg.graph().neighbor_set(order[r]);
                        layers.back() &= pg.graph().neighbor_set(order[r]);
                    }
                    auto path = transversal_path(pg, pg.next(i), layers, &rng);
                    if (!path.found()) continue;
                    int closed = 0;
                    for (Vertex w : nbrs)
                        closed += pg.graph().adjacent(w, path.path.front()) && pg.graph().adjacent(w, path.path.back());
                    if (closed > best_closed) {
                        best_closed = closed;
                        best = path.path;
                    }
                    break;
                }
            }
            if (!best) throw StageError("carve", "no free transversal path for index " + std::to_string(z) +
                                                     " of part " + std::to_string(i));
            part.z_sets[z].assign(k, -1);
            for (int s = 1; s < k; ++s) {
                part.z_sets[z][(i + s) % k] = (*best)[s - 1];
                used.insert((*best)[s - 1]);
            }
        }
    }

    // empty absorbers first, then the rest round-robin over parts while the budget allows
    std::vector<std::pair<int, int>> pending;
    for (int i = 0; i < k; ++i) {
        auto& part = as.parts[i];
        part.edges.resize(part.tmpl.edges.size());
        for (std::size_t e = 0; e < part.edges.size(); ++e) {
            auto& te = part.edges[e];
            te.left = part.tmpl.edges[e].first;
            te.z = part.tmpl.edges[e].second;
            auto s = detail::edge_target(part, i, te);
            if (is_transversal_cycle(pg, TransversalCycle{s})) {
                te.enabled = true;
                te.absorber.kind = Absorber::Kind::empty;
                te.absorber.target = s;
                te.absorber.factor_with_target = {TransversalCycle{s}};
                ++as.empty_absorbers;
            } else {
                pending.emplace_back(static_cast<int>(e), i);
            }
        }
    }
    std::stable_sort(pending.begin(), pending.end());
    AbsorberOptions aopt;
    aopt.allow_empty = false;
    aopt.attempts = p.absorber_attempts;
    for (auto [e, i] : pending) {
        auto& part = as.parts[i];
        auto& te = part.edges[e];
        if (used.count() + k > budget) {
            ++as.disabled_edges;
            continue;
        }
        auto found = find_absorber(pg, detail::edge_target(part, i, te), used, rng, aopt);
        if (!found || used.count() + static_cast<long>(found.value->set.size()) > budget) {
            ++as.disabled_edges;
            continue;
        }
        te.absorber = std::move(*found.value);
        te.enabled = true;
        for (Vertex v : te.absorber.set) used.insert(v);
        (te.absorber.kind == Absorber::Kind::swap ? as.swap_absorbers : as.connector_absorbers)++;
    }
    as.r = used;

    for (int i = 0; i < k; ++i) {
        const auto& part = as.parts[i];
        auto mask = part.enabled();
        auto samples = detail::template_samples(as.x_size, as.m, p.leftover_samples, rng);
        bool any = std::any_of(samples.begin(), samples.end(),
                               [&](const auto& xs) { return template_matching(part.tmpl, xs, &mask).has_value(); });
        if (!any)
            throw StageError("absorbers", "part " + std::to_string(i) + " has no usable leftover after " +
                                              std::to_string(as.disabled_edges) + " edges were dropped");
    }
    if (!verify_absorbing_set(pg, as)) throw Error("build_absorbing_set: internal error, witness failed to verify");
    return as;
}

}  // namespace detail

struct AbsorbResult {
    std::optional<Factor> factor;
    std::string failed_stage;
    long nodes = 0;
};

/// Transversal factor of G[R ∪ U]: cycles through U inside X, more cycles inside X until m
/// vertices per part are left, then the template matching picks which absorbers take their target.
inline AbsorbResult absorb(const PartitionedGraph& pg, const AbsorbingSet& as, const VertexSet& u, Rng& rng,
                           const AbsorbingParams& p = {}) {
    const int k = as.k;
    if (u.intersects(as.r)) throw ContractError("absorb: U must be disjoint from R");
    int t = -1;
    for (int i = 0; i < k; ++i) {
        int c = u.intersection_count(pg.part_set(i));
        if (t >= 0 && c != t) throw ContractError("absorb: U must be balanced");
        t = c;
    }
    if (t > as.capacity)
        throw ContractError("absorb: |U ∩ V_i| = " + std::to_string(t) + " exceeds capacity " +
                            std::to_string(as.capacity));

    AbsorbResult res;
    VertexSet xall(pg.vertex_count());
    for (const auto& part : as.parts)
        for (Vertex v : part.x) xall.insert(v);
    std::vector<std::vector<char>> masks;
    for (const auto& part : as.parts) masks.push_back(part.enabled());

    Factor chosen;
    std::optional<Factor> tail;
    bool out_of_budget = false;
    std::string stage = "cover U";

    // given C1, cover the rest of X by cycles, leaving m vertices per part whose template
    // graph still has a perfect matching; a vertex is either on a cycle or left over
    std::vector<int> x_index(pg.vertex_count(), -1);
    for (const auto& part : as.parts)
        for (int a = 0; a < as.x_size; ++a) x_index[part.x[a]] = a;
    auto finish = [&](const VertexSet& xrem) -> bool {
        stage = "cover reservoir";
        std::vector<std::vector<int>> left(k);
        Factor c2;
        auto rec = [&](auto&& self, const VertexSet& rem) -> bool {
            if (res.nodes >= p.absorb_budget) {
                out_of_budget = true;
                return false;
            }
            ++res.nodes;
            int cycles_left = -1;
            for (int i = 0; i < k; ++i) {
                int c = rem.intersection_count(pg.part_set(i)) - (as.m - static_cast<int>(left[i].size()));
                if (c < 0 || (cycles_left >= 0 && c != cycles_left)) return false;
                cycles_left = c;
            }
            if (rem.empty()) {
                Factor f = c2;
                for (int i = 0; i < k; ++i) {
                    const auto& part = as.parts[i];
                    auto mate = template_matching(part.tmpl, left[i], &masks[i]);
                    for (const auto& e : part.edges) {
                        if (!e.enabled) continue;
                        const auto& add =
                            mate->at(e.left) == e.z ? e.absorber.factor_with_target : e.absorber.factor_alone;
                        f.insert(f.end(), add.begin(), add.end());
                    }
                }
                tail = std::move(f);
                return true;
            }
            Vertex best = -1;
            double best_count = 0;
            rem.for_each([&](Vertex v) {
                if (best >= 0 && best_count == 0) return;
                double c = detail::cycles_through(pg, v, rem);
                if (best < 0 || c < best_count) best = v, best_count = c;
            });
            const int bi = pg.part_of(best);
            std::vector<TransversalCycle> opts;
            if (best_count > 0) detail::enumerate_cycles_through(pg, best, rem, opts, 64);
            rng.shuffle(opts);
            for (const auto& c : opts) {
                VertexSet next = rem;
                for (Vertex v : c.vertices) next.erase(v);
                c2.push_back(c);
                if (self(self, next)) return true;
                c2.pop_back();
                if (out_of_budget) return false;
            }
            if (static_cast<int>(left[bi].size()) < as.m) {
                left[bi].push_back(x_index[best]);
                bool ok = static_cast<int>(left[bi].size()) < as.m ||
                          template_matching(as.parts[bi].tmpl, left[bi], &masks[bi]).has_value();
                if (ok) {
                    VertexSet next = rem;
                    next.erase(best);
                    if (self(self, next)) return true;
                }
                left[bi].pop_back();
            }
            return false;
        };
        return rec(rec, xrem);
    };

    auto cover = [&](auto&& self, const VertexSet& pending, const VertexSet& xrem) -> bool {
        if (pending.empty()) return finish(xrem);
        if (res.nodes >= p.absorb_budget) {
            out_of_budget = true;
            return false;
        }
        ++res.nodes;
        Vertex best = -1;
        double best_count = 0;
        for (Vertex v : pending.to_vector()) {
            double c = detail::cycles_through(pg, v, xrem);
            if (c == 0) return false;
            if (best < 0 || c < best_count) best = v, best_count = c;
        }
        std::vector<TransversalCycle> opts;
        detail::enumerate_cycles_through(pg, best, xrem, opts, 64);
        rng.shuffle(opts);
        VertexSet rest = pending;
        rest.erase(best);
        for (const auto& c : opts) {
            VertexSet next = xrem;
            for (Vertex v : c.vertices) next.erase(v);
            chosen.push_back(c);
            if (self(self, rest, next)) return true;
            chosen.pop_back();
            if (out_of_budget) return false;
        }
        return false;
    };

    if (!cover(cover, u, xall)) {
        res.failed_stage = out_of_budget ? stage + " (budget)" : stage;
        return res;
    }
    Factor f = chosen;
    f.insert(f.end(), tail->begin(), tail->end());
    if (!verify_factor(pg, f, as.r | u)) throw Error("absorb: internal error, factor failed to verify");
    res.factor = std::move(f);
    return res;
}

/// Random balanced U ⊆ V \ R with t vertices per part.
inline VertexSet random_leftover(const PartitionedGraph& pg, const AbsorbingSet& as, int t, Rng& rng) {
    VertexSet u(pg.vertex_count());
    for (int i = 0; i < pg.k(); ++i) {
        auto free = (pg.part_set(i) - as.r).to_vector();
        if (static_cast<int>(free.size()) < t) throw ContractError("random_leftover: part too small");
        rng.shuffle(free);
        for (int a = 0; a < t; ++a) u.insert(free[a]);
    }
    return u;
}

/// Absorbing set that has absorbed U = ∅ and `self_checks` random leftovers of every size up
/// to capacity; otherwise rebuilt from a fresh reservoir, up to build_retries times.
inline AbsorbingSet build_absorbing_set(const PartitionedGraph& pg, const AbsorbingParams& p, std::uint64_t seed) {
    std::string last;
    for (int attempt = 0; attempt < p.build_retries; ++attempt) {
        AbsorbingSet as;
        try {
            as = detail::build_absorbing_set_once(pg, p, Rng::derive(seed, attempt).next());
        } catch (const StageError& e) {
            last = e.what();
            continue;
        }
        Rng rng = Rng::derive(seed, 500 + attempt);
        bool ok = absorb(pg, as, VertexSet(pg.vertex_count()), rng, p).factor.has_value();
        for (int t = 1; t <= as.capacity && ok; ++t)
            for (int c = 0; c < p.self_checks && ok; ++c)
                ok = absorb(pg, as, random_leftover(pg, as, t, rng), rng, p).factor.has_value();
        if (ok) return as;
        last = "self-check: absorption failed";
    }
    throw StageError("absorbing set", "no valid construction in " + std::to_string(p.build_retries) +
                                          " attempts; last: " + last);
}

}  // namespace bht
