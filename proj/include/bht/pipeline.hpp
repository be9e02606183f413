#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bht/blowup/factor.hpp"
#include "bht/expander.hpp"
#include "bht/generators.hpp"
#include "bht/holes.hpp"
#include "bht/io.hpp"
#include "bht/matching.hpp"
#include "bht/tree.hpp"

namespace bht {

struct PipelineConfig {
    double eps = 0.25;
    int delta_max = 4;
    int d = 0;      ///< expansion parameter, 0 = max(2Δ, 16)
    int k = 12;     ///< caterpillar length; the proof uses ⌈48/ε⌉
    double gamma = 0;  ///< fraction of n taken as pendant stars, 0 = every disjoint star
    double eta = 0;    ///< caterpillars taken are ⌊ηn/2⌋, 0 = every available one
    int partition_retries = 100;
    int split_retries = 5;
    long embed_budget_factor = 50;
    int embed_restarts = 3;
    bool check_expander = true;
    ExpanderMode expander_mode = ExpanderMode::heuristic;
    FactorRoute factor_route = FactorRoute::automatic;
    long hole_budget = 20000;
    std::uint64_t seed = 1;

    int effective_d() const { return d > 0 ? d : std::max(2 * delta_max, 16); }

    /// Constants exactly as the proof sets them; only meaningful for very large n.
    static PipelineConfig asymptotic_defaults(double eps, int delta_max) {
        PipelineConfig c;
        c.eps = eps;
        c.delta_max = delta_max;
        c.k = static_cast<int>(std::ceil(48.0 / eps - 1e-9));
        c.gamma = 1.0 / (4.0 * c.k * delta_max * delta_max);
        c.eta = 1.0 / (4.0 * c.k * delta_max);
        return c;
    }

    void validate() const {
        if (!(eps > 0 && eps < 1)) throw ContractError("config: eps must lie in (0,1)");
        if (delta_max < 2) throw ContractError("config: delta_max must be at least 2");
        if (effective_d() < 2 * delta_max) throw ContractError("config: need d >= 2*delta_max");
        if (effective_d() == 2 * delta_max)
            throw ContractError("config: d = 2*delta_max makes the size formulas divide by zero");
        if (k < 12) throw ContractError("config: k must be at least 12");
        if (gamma < 0 || eta < 0) throw ContractError("config: gamma and eta must be non-negative");
        if (partition_retries < 1 || split_retries < 1 || embed_restarts < 0 || embed_budget_factor < 1)
            throw ContractError("config: retry caps must be positive");
    }
};

inline Json to_json(const PipelineConfig& c) {
    return {{"eps", c.eps},
            {"delta_max", c.delta_max},
            {"d", c.effective_d()},
            {"k", c.k},
            {"gamma", c.gamma},
            {"eta", c.eta},
            {"partition_retries", c.partition_retries},
            {"split_retries", c.split_retries},
            {"embed_budget_factor", c.embed_budget_factor},
            {"embed_restarts", c.embed_restarts},
            {"check_expander", c.check_expander},
            {"expander_mode", to_string(c.expander_mode)},
            {"factor_route", to_string(c.factor_route)},
            {"hole_budget", c.hole_budget},
            {"seed", c.seed}};
}

/// Reads the keys present in `j` over `base`; unknown keys are an error.
inline PipelineConfig config_from_json(const Json& j, PipelineConfig base = {}) {
    if (!j.is_object()) throw ParseError("config: expected an object");
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "eps") base.eps = v.get<double>();
            else if (key == "delta_max") base.delta_max = v.get<int>();
            else if (key == "d") base.d = v.get<int>();
            else if (key == "k") base.k = v.get<int>();
            else if (key == "gamma") base.gamma = v.get<double>();
            else if (key == "eta") base.eta = v.get<double>();
            else if (key == "partition_retries") base.partition_retries = v.get<int>();
            else if (key == "split_retries") base.split_retries = v.get<int>();
            else if (key == "embed_budget_factor") base.embed_budget_factor = v.get<long>();
            else if (key == "embed_restarts") base.embed_restarts = v.get<int>();
            else if (key == "check_expander") base.check_expander = v.get<bool>();
            else if (key == "expander_mode")
                base.expander_mode = v.get<std::string>() == "exact" ? ExpanderMode::exact : ExpanderMode::heuristic;
            else if (key == "factor_route") base.factor_route = parse_factor_route(v.get<std::string>());
            else if (key == "hole_budget") base.hole_budget = v.get<long>();
            else if (key == "seed") base.seed = v.get<std::uint64_t>();
            else throw ParseError("config: unknown key '" + key + "'");
        } catch (const Json::exception& e) {
            throw ParseError("config: bad value for '" + key + "': " + e.what());
        }
    }
    return base;
}

// ---- reports ----------------------------------------------------------------------------------

struct PhaseRecord {
    std::string name;
    std::string status = "ok";  ///< ok | warn | failed | skipped
    int retries = 0;
    double ms = 0;
    std::vector<std::string> notes;
};

struct RunReport {
    std::vector<PhaseRecord> phases;
    std::optional<Embedding> embedding;
    std::string verdict = "failure";  ///< success | failure | rejected
    std::string failed_phase;
    std::string case_tag;
    PipelineConfig config;
    std::map<std::string, std::uint64_t> seeds;

    bool success() const { return verdict == "success"; }

    const PhaseRecord* phase(const std::string& name) const {
        for (const auto& p : phases)
            if (p.name == name) return &p;
        return nullptr;
    }
};

/// Timings are wall-clock and therefore left out unless asked for.
inline Json to_json(const RunReport& r, bool timings = false) {
    Json phases = Json::array();
    for (const auto& p : r.phases) {
        Json jp = {{"name", p.name}, {"status", p.status}, {"retries", p.retries}, {"notes", p.notes}};
        jp["ms"] = timings ? Json(std::round(p.ms * 1000) / 1000) : Json(nullptr);
        phases.push_back(jp);
    }
    return {{"phases", phases},
            {"embedding", r.embedding ? Json(r.embedding->map) : Json(nullptr)},
            {"verdict", r.verdict},
            {"failed_phase", r.failed_phase},
            {"case", r.case_tag},
            {"config", to_json(r.config)},
            {"seeds", r.seeds}};
}

inline const std::vector<std::string>& report_phase_names() {
    static const std::vector<std::string> names{"preflight", "classify",  "partition",     "core-embed",
                                                "matchings", "factor",    "star-matching", "verify"};
    return names;
}

inline std::string report_csv_header() {
    std::string h = "label,seed,n,case,verdict,failed_phase";
    for (const auto& p : report_phase_names()) h += "," + p + "_status," + p + "_retries," + p + "_ms";
    return h;
}

inline std::string report_csv_row(const RunReport& r, const std::string& label, int n, bool timings = false) {
    std::ostringstream s;
    s << label << "," << r.config.seed << "," << n << "," << r.case_tag << "," << r.verdict << "," << r.failed_phase;
    for (const auto& name : report_phase_names()) {
        const PhaseRecord* p = r.phase(name);
        if (!p) {
            s << ",,,";
            continue;
        }
        s << "," << p->status << "," << p->retries << ",";
        if (timings) s << std::llround(p->ms);
    }
    return s.str();
}

/// Injectivity and edge preservation, with the first violation spelled out.
struct EmbeddingVerdict {
    bool ok = false;
    std::string violation;
};

inline EmbeddingVerdict check_embedding(const Graph& host, const Tree& t, const Embedding& e) {
    const int n = t.vertex_count();
    if (static_cast<int>(e.map.size()) != n)
        return {false, "map has " + std::to_string(e.map.size()) + " entries for " + std::to_string(n) + " vertices"};
    std::vector<Vertex> owner(host.vertex_count(), -1);
    for (Vertex v = 0; v < n; ++v) {
        Vertex h = e.map[v];
        if (h < 0 || h >= host.vertex_count())
            return {false, "vertex " + std::to_string(v) + " has no valid image"};
        if (owner[h] >= 0)
            return {false, "vertices " + std::to_string(owner[h]) + " and " + std::to_string(v) + " share image " +
                               std::to_string(h)};
        owner[h] = v;
    }
    for (auto [a, b] : t.graph().edges())
        if (!host.adjacent(e.map[a], e.map[b]))
            return {false, "tree edge " + std::to_string(a) + "-" + std::to_string(b) + " maps to non-edge " +
                               std::to_string(e.map[a]) + "-" + std::to_string(e.map[b])};
    return {true, ""};
}

struct PhaseFailure : Error {
    std::string phase;
    PhaseFailure(std::string p, const std::string& what) : Error(what), phase(std::move(p)) {}
};

namespace detail {

class PhaseClock {
public:
    PhaseClock(RunReport& r, std::string name) : rep_(&r), idx_(r.phases.size()), start_(Clock::now()) {
        r.phases.emplace_back().name = std::move(name);
    }
    ~PhaseClock() { rec().ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count(); }
    PhaseClock(const PhaseClock&) = delete;
    PhaseClock& operator=(const PhaseClock&) = delete;
    PhaseRecord& rec() { return rep_->phases[idx_]; }
    PhaseRecord* operator->() { return &rec(); }
    void warn(std::string note) {
        if (rec().status == "ok") rec().status = "warn";
        rec().notes.push_back(std::move(note));
    }
    void note(std::string s) { rec().notes.push_back(std::move(s)); }
    [[noreturn]] void fail(const std::string& what) {
        rec().status = "failed";
        rec().notes.push_back(what);
        throw PhaseFailure(rec().name, what);
    }

private:
    using Clock = std::chrono::steady_clock;
    RunReport* rep_;
    std::size_t idx_;
    Clock::time_point start_;
};

inline std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

inline std::uint64_t seed_for(RunReport& r, const std::string& phase, std::uint64_t index) {
    std::uint64_t s = Rng::derive(r.config.seed, index).next();
    r.seeds[phase] = s;
    return s;
}

/// Tripartition with the degree property; falls back to an unchecked split after the cap.
inline std::vector<std::vector<Vertex>> split_vertices(const Graph& g, const std::vector<int>& sizes,
                                                       double min_frac, std::uint64_t seed, int cap,
                                                       PhaseClock& ph) {
    try {
        auto bp = random_balanced_partition(g, sizes, min_frac, seed, cap);
        ph->retries = bp.attempts - 1;
        return bp.parts;
    } catch (const ContractError&) {
        throw;
    } catch (const Error& e) {
        ph->retries = cap;
        ph.warn(std::string("outside proof regime: ") + e.what() + "; using an unchecked split");
        return random_balanced_partition(g, sizes, 0, seed ^ 0x5bd1e995ULL, 1).parts;
    }
}

struct CoreEmbedding {
    std::vector<Vertex> image;  ///< tree vertex -> host vertex, -1 outside the subtree
    VertexSet leftover;         ///< V1 minus the image
};

/// Embeds the forest T[keep] into G[v1] after checking the expander property of G[v1].
inline CoreEmbedding core_embed(const Graph& g, const Tree& t, const VertexSet& keep, const std::vector<Vertex>& v1,
                                const PipelineConfig& cfg, std::optional<int> hole_bound, std::uint64_t seed,
                                PhaseClock& ph) {
    auto host = induced_subgraph(g, VertexSet::of(g.vertex_count(), v1));
    auto pattern = induced_subgraph(t.graph(), keep);
    const int d = cfg.effective_d();
    ph.note("|V1| = " + std::to_string(host.graph.vertex_count()) + ", subtree size " +
            std::to_string(pattern.graph.vertex_count()) + ", theorem allows " +
            std::to_string(embeddable_tree_size(host.graph.vertex_count(), cfg.delta_max, d)));
    if (cfg.check_expander) {
        ExpanderOptions eo;
        eo.hole_bound = hole_bound;
        eo.seed = seed;
        auto cert = check_expander(host.graph, d, cfg.expander_mode, eo);
        if (cert.passed())
            ph.note(std::string("G[V1] passed the (n1,d)-expander check (") + to_string(cert.mode) + ")");
        else
            ph.warn("outside proof regime: G[V1] fails expander condition " +
                    std::to_string(cert.violation->condition) + " on a set of size " +
                    std::to_string(cert.violation->x.size()));
    }
    EmbedOptions opt;
    opt.budget_factor = cfg.embed_budget_factor;
    opt.restarts = cfg.embed_restarts;
    opt.seed = seed;
    auto res = embed_tree_in_expander(host.graph, pattern.graph, opt);
    ph->retries = res.restarts_used;
    if (!res.success)
        ph.fail("greedy embedding placed at most " + std::to_string(res.best_partial) + " of " +
                std::to_string(pattern.graph.vertex_count()) + " vertices");
    CoreEmbedding out{std::vector<Vertex>(t.vertex_count(), -1), VertexSet::of(g.vertex_count(), v1)};
    for (Vertex p = 0; p < pattern.graph.vertex_count(); ++p) {
        Vertex h = host.to_old[res.embedding.map[p]];
        out.image[pattern.to_old[p]] = h;
        out.leftover.erase(h);
    }
    return out;
}

/// Stars of `f` leaves from each centre image onto W; assigns them to tree leaves in order.
inline void embed_leaves(const Graph& g, const std::vector<std::pair<Vertex, std::vector<Vertex>>>& centres,
                         const VertexSet& w, std::vector<Vertex>& image, PhaseClock& ph) {
    std::vector<int> f(g.vertex_count(), 0);
    VertexSet u(g.vertex_count());
    long demand = 0;
    for (const auto& [c, leaves] : centres) {
        u.insert(image[c]);
        f[image[c]] = static_cast<int>(leaves.size());
        demand += static_cast<long>(leaves.size());
    }
    if (demand != w.count())
        throw Error("internal error: " + std::to_string(demand) + " leaves for " + std::to_string(w.count()) +
                    " free vertices");
    auto fm = f_matching(g, u, w, f);
    ph.note("f-matching: " + std::to_string(u.count()) + " centres, " + std::to_string(demand) + " leaves");
    if (!fm.feasible)
        ph.fail("Hall violation: " + std::to_string(fm.witness.deficient.size()) + " free vertices see capacity " +
                std::to_string(fm.witness.capacity));
    for (const auto& [c, leaves] : centres) {
        const auto& hosts = fm.family.stars.at(image[c]);
        for (std::size_t i = 0; i < leaves.size(); ++i) image[leaves[i]] = hosts[i];
    }
}

inline Embedding finish(const Tree& t, const Graph& g, const std::vector<Vertex>& image) {
    return Embedding{t.vertex_count(), g.vertex_count(), image};
}

}  // namespace detail

// ---- Case 1: pendant stars ---------------------------------------------------------------------

inline Embedding case1_embed(const Graph& g, const Tree& t, const TreeClassification& cls, const PipelineConfig& cfg,
                             RunReport& rep, std::optional<int> alpha_n = std::nullopt) {
    if (cls.case_tag != TreeCase::pendant_stars) throw ContractError("case1_embed: not a pendant-star tree");
    const int n = t.vertex_count();
    const int Delta = cfg.delta_max;
    const double d = cfg.effective_d();

    // vertex-disjoint stars: distinct roots, and no root is another chosen star's centre
    std::vector<PendantStar> stars;
    {
        VertexSet taken(n);
        const long cap = cfg.gamma > 0 ? std::max(1L, static_cast<long>(std::floor(cfg.gamma * n))) : n;
        for (const auto& s : cls.stars) {
            if (static_cast<long>(stars.size()) >= cap) break;
            if (s.root < 0 || taken.contains(s.root) || taken.contains(s.center)) continue;
            taken.insert(s.root);
            taken.insert(s.center);
            stars.push_back(s);
        }
    }
    if (stars.empty()) throw ContractError("case1_embed: no usable pendant star");
    const int s = static_cast<int>(stars.size());
    VertexSet keep = VertexSet::full(n);
    int leaf_total = 0;
    for (const auto& st : stars) {
        keep.erase(st.center);
        for (Vertex l : st.leaves) keep.erase(l);
        leaf_total += static_cast<int>(st.leaves.size());
    }
    const int t1 = keep.count();

    std::vector<std::vector<Vertex>> parts;
    {
        detail::PhaseClock ph(rep, "partition");
        const double n1f = (d * t1 + 4.0 * Delta * d) / (d - 2.0 * Delta);
        if (std::abs(n1f - 4.0 * Delta * (n1f / (2 * d) + 1) - t1) > 1e-6 * std::max(1.0, n1f))
            throw Error("internal error: size formula identity failed");
        const int n3_floor = (s + 3) / 4;
        int n1 = static_cast<int>(std::ceil(n1f - 1e-9));
        ph.note(std::to_string(s) + " stars with " + std::to_string(leaf_total) + " leaves, |T1| = " +
                std::to_string(t1) + ", n1 formula " + detail::fmt(n1f));
        if (n1 > n - s - n3_floor) {
            ph.warn("outside proof regime: n1 clamped from " + std::to_string(n1) + " to " +
                    std::to_string(n - s - n3_floor));
            n1 = n - s - n3_floor;
        }
        const int n3 = n - n1 - s;
        ph.note("sizes " + std::to_string(n1) + "/" + std::to_string(s) + "/" + std::to_string(n3));
        parts = detail::split_vertices(g, {n1, s, n3}, cfg.eps / 2, detail::seed_for(rep, "partition", 1),
                                       cfg.partition_retries, ph);
    }

    detail::CoreEmbedding core;
    {
        detail::PhaseClock ph(rep, "core-embed");
        core = detail::core_embed(g, t, keep, parts[0], cfg, alpha_n, detail::seed_for(rep, "core-embed", 2), ph);
    }
    auto& image = core.image;

    std::vector<std::pair<Vertex, std::vector<Vertex>>> matched;
    VertexSet v3free = VertexSet::of(g.vertex_count(), parts[2]);
    VertexSet l3 = VertexSet::of(g.vertex_count(), parts[1]);
    {
        detail::PhaseClock ph(rep, "matchings");
        VertexSet roots(g.vertex_count());
        std::vector<int> star_of(g.vertex_count(), -1);
        for (int i = 0; i < s; ++i) {
            roots.insert(image[stars[i].root]);
            star_of[image[stars[i].root]] = i;
        }
        auto m = max_bipartite_matching(g, roots, l3);
        ph.note("matching roots to V2: " + std::to_string(m.size()) + " of " + std::to_string(s) +
                (alpha_n ? ", defect bound " + std::to_string(*alpha_n) : std::string()));
        if (alpha_n && s - m.size() >= std::max(1, *alpha_n))
            ph.warn("matching defect " + std::to_string(s - m.size()) + " is not below the hole bound");
        std::vector<char> done(s, 0);
        for (auto [a, b] : m.edges) {
            int i = star_of[a];
            image[stars[i].center] = b;
            l3.erase(b);
            done[i] = 1;
            matched.push_back({stars[i].center, stars[i].leaves});
        }
        // leftover stars go into V3, centre first, lowest residual degree that still fits
        std::vector<int> order;
        for (int i = 0; i < s; ++i)
            if (!done[i]) order.push_back(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return stars[a].leaves.size() > stars[b].leaves.size(); });
        for (int i : order) {
            const auto& st = stars[i];
            const int need = static_cast<int>(st.leaves.size());
            Vertex best = -1;
            int best_deg = 0;
            (v3free & g.neighbor_set(image[st.root])).for_each([&](Vertex c) {
                int deg = g.degree_into(c, v3free);
                if (deg >= need && (best < 0 || deg < best_deg)) {
                    best = c;
                    best_deg = deg;
                }
            });
            if (best < 0) ph.fail("no room in V3 for the star at tree vertex " + std::to_string(st.center));
            image[st.center] = best;
            v3free.erase(best);
            auto cands = (v3free & g.neighbor_set(best)).to_vector();
            std::stable_sort(cands.begin(), cands.end(), [&](Vertex a, Vertex b) {
                return g.degree_into(a, v3free) < g.degree_into(b, v3free);
            });
            for (int j = 0; j < need; ++j) {
                image[st.leaves[j]] = cands[j];
                v3free.erase(cands[j]);
            }
        }
        if (!order.empty()) ph.note(std::to_string(order.size()) + " stars placed greedily in V3");
    }
    {
        detail::PhaseClock ph(rep, "star-matching");
        VertexSet w = core.leftover | l3 | v3free;
        detail::embed_leaves(g, matched, w, image, ph);
    }
    return detail::finish(t, g, image);
}

// ---- Case 2: caterpillars ----------------------------------------------------------------------

namespace detail {

/// Random split of `pool` into `layers` sets of equal size; best of `cap` tries by minimum
/// degree of any host vertex into any layer.
inline std::vector<std::vector<Vertex>> layer_split(const Graph& g, std::vector<Vertex> pool, int layers,
                                                    double need, Rng& rng, int cap, int& tries, double& worst) {
    const int size = static_cast<int>(pool.size()) / layers;
    std::vector<std::vector<Vertex>> best;
    worst = -1;
    for (tries = 1; tries <= cap; ++tries) {
        rng.shuffle(pool);
        std::vector<std::vector<Vertex>> xs(layers);
        for (int i = 0; i < layers; ++i) xs[i].assign(pool.begin() + i * size, pool.begin() + (i + 1) * size);
        int low = g.vertex_count();
        for (const auto& x : xs) {
            auto xs_set = VertexSet::of(g.vertex_count(), x);
            for (Vertex v = 0; v < g.vertex_count(); ++v) low = std::min(low, g.degree_into(v, xs_set));
        }
        if (low > worst) {
            worst = low;
            best = xs;
        }
        if (low >= need) break;
    }
    tries = std::min(tries, cap);
    return best;
}

}  // namespace detail

inline Embedding case2_embed(const Graph& g, const Tree& t, const TreeClassification& cls, const PipelineConfig& cfg,
                             RunReport& rep, std::optional<int> alpha_n = std::nullopt) {
    if (cls.case_tag != TreeCase::caterpillars) throw ContractError("case2_embed: not a caterpillar tree");
    const int n = t.vertex_count();
    const int Delta = cfg.delta_max;
    const double d = cfg.effective_d();
    const int kp = select_k_prime(cfg.k);
    if ((kp - 2) % 4 != 0) throw Error("internal error: k' - 2 is not a multiple of 4");
    auto fam = extract_caterpillars_case2(t, cls, kp);
    if (cfg.eta > 0) {
        std::size_t cap = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(cfg.eta * n / 2)));
        if (fam.members.size() > cap) fam.members.resize(cap);
    }
    const int np = static_cast<int>(fam.members.size());
    if (np == 0) throw ContractError("case2_embed: no caterpillar");

    VertexSet keep = VertexSet::full(n);
    int leaf_total = 0;
    for (const auto& m : fam.members) {
        const auto& p = m.body.central_path;
        for (std::size_t i = 1; i + 1 < p.size(); ++i) keep.erase(p[i]);
        for (const auto& [b, ls] : m.body.leaves) {
            for (Vertex l : ls) keep.erase(l);
            leaf_total += static_cast<int>(ls.size());
        }
    }
    const bool leafy = leaf_total > 0;
    const int t2 = keep.count();
    const int inner = np * (kp - 1);

    std::vector<std::vector<Vertex>> parts;
    {
        detail::PhaseClock ph(rep, "partition");
        const double slack_f = (2.0 * Delta * t2 + 4.0 * Delta * d) / (d - 2.0 * Delta);
        const double v1f = t2 + slack_f;
        if (std::abs(v1f - 4.0 * Delta * (v1f / (2 * d) + 1) - t2) > 1e-6 * std::max(1.0, v1f))
            throw Error("internal error: size formula identity failed");
        int slack = static_cast<int>(std::ceil(slack_f - 1e-9));
        ph.note(std::to_string(np) + (leafy ? " leafy" : " bare") + " caterpillars of length " + std::to_string(kp) +
                ", |T2| = " + std::to_string(t2) + ", V1 formula " + detail::fmt(v1f));
        if (slack > inner / 2) {
            ph.warn("outside proof regime: V1 slack clamped from " + std::to_string(slack) + " to " +
                    std::to_string(inner / 2));
            slack = inner / 2;
        }
        const int n1 = t2 + slack, n2 = inner - slack, n3 = n - n1 - n2;
        if (!leafy) ph.note("all-bare subcase: two-part split");
        ph.note("sizes " + std::to_string(n1) + "/" + std::to_string(n2) + "/" + std::to_string(n3));
        std::vector<int> sizes{n1, n2};
        if (leafy) sizes.push_back(n3);
        parts = detail::split_vertices(g, sizes, cfg.eps / 2, detail::seed_for(rep, "partition", 1),
                                       cfg.partition_retries, ph);
        if (!leafy) parts.emplace_back();
    }

    detail::CoreEmbedding core;
    {
        detail::PhaseClock ph(rep, "core-embed");
        core = detail::core_embed(g, t, keep, parts[0], cfg, alpha_n, detail::seed_for(rep, "core-embed", 2), ph);
    }
    auto& image = core.image;
    std::vector<Vertex> pool = parts[1];
    core.leftover.for_each([&](Vertex v) { pool.push_back(v); });
    std::sort(pool.begin(), pool.end());

    const int kh = kp - 2;
    Rng rng(detail::seed_for(rep, "matchings", 3));
    const std::uint64_t factor_seed = detail::seed_for(rep, "factor", 4);
    {
    detail::PhaseClock mph(rep, "matchings");
    std::optional<detail::PhaseClock> fph;
    std::string last_failure;
    bool placed = false;
    for (int attempt = 0; attempt < cfg.split_retries; ++attempt) {
        mph->retries = attempt;
        int tries = 0;
        double worst = 0;
        auto xs = detail::layer_split(g, pool, kp - 1, cfg.eps * np / 4, rng, cfg.partition_retries, tries, worst);
        const VertexSet none(g.vertex_count());
        auto set_of = [&](const std::vector<Vertex>& v) { return VertexSet::of(g.vertex_count(), v); };
        VertexSet s_img(g.vertex_count()), w_img(g.vertex_count());
        std::vector<int> owner_s(g.vertex_count(), -1), owner_w(g.vertex_count(), -1);
        for (int j = 0; j < np; ++j) {
            Vertex sv = image[fam.members[j].body.first()], wv = image[fam.members[j].body.last()];
            s_img.insert(sv);
            w_img.insert(wv);
            owner_s[sv] = j;
            owner_w[wv] = j;
        }
        VertexSet x1 = set_of(xs[0]), x2 = set_of(xs[1]), xl = set_of(xs[kp - 2]);
        auto m1 = max_bipartite_matching(g, s_img, x1);
        auto m2 = max_bipartite_matching(g, w_img, xl);
        auto m3 = max_bipartite_matching(g, VertexSet::of(g.vertex_count(), m1.unmatched_a), x2);
        VertexSet x2_rest = x2;
        for (auto [a, b] : m3.edges) x2_rest.erase(b);
        auto m4 = max_bipartite_matching(g, VertexSet::of(g.vertex_count(), m2.unmatched_a), x2_rest);
        if (!m3.unmatched_a.empty() || !m4.unmatched_a.empty()) {
            last_failure = "ends left unmatched after completing into X2 (" + std::to_string(m3.unmatched_a.size()) +
                           " + " + std::to_string(m4.unmatched_a.size()) + ")";
            mph.note("attempt " + std::to_string(attempt) + ": " + last_failure);
            continue;
        }
        mph.note("attempt " + std::to_string(attempt) + ": layer min degree " + detail::fmt(worst) + " after " +
                 std::to_string(tries) + " splits, |M1| = " + std::to_string(m1.size()) +
                 ", |M2| = " + std::to_string(m2.size()));
        // reshuffled layers: X1' and X'_{k'-1} are perfectly matched to the caterpillar ends
        std::vector<Vertex> xj(np), yj(np);
        VertexSet x2p = x2_rest;
        for (auto [a, b] : m4.edges) x2p.erase(b);
        VertexSet x1_used(g.vertex_count()), xl_used(g.vertex_count());
        for (const auto* m : {&m1, &m3})
            for (auto [a, b] : m->edges) {
                xj[owner_s[a]] = b;
                if (m == &m1) x1_used.insert(b);
            }
        for (const auto* m : {&m2, &m4})
            for (auto [a, b] : m->edges) {
                yj[owner_w[a]] = b;
                if (m == &m2) xl_used.insert(b);
            }
        x2p |= (x1 - x1_used);
        x2p |= (xl - xl_used);
        std::vector<std::vector<Vertex>> layer(kh);  // H part i >= 1 is X'_{i+1}
        layer[1] = x2p.to_vector();
        for (int i = 2; i < kh; ++i) layer[i] = xs[i];

        // auxiliary blow-up: part 0 holds fresh vertices z_j wired through x_j and y_j
        std::vector<Edge> he;
        auto hid = [&](int part, int pos) { return part * np + pos; };
        for (int j = 0; j < np; ++j) {
            for (int b = 0; b < np; ++b) {
                if (g.adjacent(xj[j], layer[1][b])) he.emplace_back(hid(0, j), hid(1, b));
                if (g.adjacent(yj[j], layer[kh - 1][b])) he.emplace_back(hid(0, j), hid(kh - 1, b));
            }
        }
        for (int i = 1; i + 1 < kh; ++i)
            for (int a = 0; a < np; ++a)
                for (int b = 0; b < np; ++b)
                    if (g.adjacent(layer[i][a], layer[i + 1][b])) he.emplace_back(hid(i, a), hid(i + 1, b));
        auto h = PartitionedGraph::ranged(kh, np, he);

        if (!fph) fph.emplace(rep, "factor");
        (*fph)->retries = attempt;
        FactorParams fp;
        fp.route = cfg.factor_route;
        auto fr = transversal_factor(h, fp, factor_seed + attempt);
        std::string trail;
        for (const auto& a : fr.attempts) trail += (trail.empty() ? "" : "; ") + a.route + ": " + a.outcome;
        fph->note("H: " + std::to_string(kh) + " parts of " + std::to_string(np) + ", min pair degree " +
                  std::to_string(pair_min_degree(h)) + "; " + trail);
        if (!fr.factor) {
            last_failure = "no transversal factor of H (" + trail + ")";
            continue;
        }
        for (const auto& c : *fr.factor) {
            const int j = c.vertices[0];
            const auto& p = fam.members[j].body.central_path;
            image[p[1]] = xj[j];
            for (int i = 1; i < kh; ++i) image[p[i + 1]] = layer[i][c.vertices[i] - hid(i, 0)];
            image[p[kp - 1]] = yj[j];
        }
        placed = true;
        break;
    }
    if (!placed) {
        if (fph && last_failure.rfind("no transversal", 0) == 0) fph->fail(last_failure);
        mph.fail(last_failure);
    }
    }
    {
        detail::PhaseClock ph(rep, "star-matching");
        if (!leafy) {
            ph->status = "skipped";
            ph.note("all-bare subcase has no leaves to place");
        } else {
            std::vector<std::pair<Vertex, std::vector<Vertex>>> centres;
            for (const auto& m : fam.members)
                for (const auto& [b, ls] : m.body.leaves) centres.push_back({b, ls});
            detail::embed_leaves(g, centres, VertexSet::of(g.vertex_count(), parts[2]), image, ph);
        }
    }
    return detail::finish(t, g, image);
}

// ---- entry point -------------------------------------------------------------------------------

/// Pre-flight hypothesis checks, dispatch on the tree's case, and a final verification pass.
inline RunReport embed_spanning_tree(const Graph& g, const Tree& t, const PipelineConfig& cfg,
                                     const std::optional<InstanceMetadata>& meta = std::nullopt) {
    cfg.validate();
    RunReport rep;
    rep.config = cfg;
    const int n = g.vertex_count();
    std::optional<int> alpha_n;
    auto reject = [&](detail::PhaseClock& ph, const std::string& why) {
        ph->status = "failed";
        ph.note(why);
        rep.verdict = "rejected";
        rep.failed_phase = ph->name;
    };
    {
        detail::PhaseClock ph(rep, "preflight");
        const int need = static_cast<int>(std::ceil(cfg.eps * n - 1e-9));
        if (t.vertex_count() != n) {
            reject(ph, "tree has " + std::to_string(t.vertex_count()) + " vertices, host has " + std::to_string(n));
            return rep;
        }
        if (t.max_degree() > cfg.delta_max) {
            reject(ph, "tree max degree " + std::to_string(t.max_degree()) + " exceeds " +
                           std::to_string(cfg.delta_max));
            return rep;
        }
        if (g.min_degree() < need) {
            reject(ph, "min degree " + std::to_string(g.min_degree()) + " below eps*n = " + std::to_string(need));
            return rep;
        }
        auto lb = alpha_star_lower_bound(g, cfg.hole_budget, detail::seed_for(rep, "preflight", 0));
        ph.note("hole search found alpha* >= " + std::to_string(lb.value));
        const int hole_limit = static_cast<int>(std::ceil(cfg.eps * n / 2 - 1e-9));
        if (lb.value >= hole_limit) {
            reject(ph, "hole of size " + std::to_string(lb.value) + " found, limit " + std::to_string(hole_limit));
            return rep;
        }
        alpha_n = lb.value;
        if (meta && meta->alpha_bound > 0) {
            alpha_n = std::max(lb.value, meta->alpha_bound);
            ph.note(std::string("metadata bound alpha* <= ") + std::to_string(meta->alpha_bound) + " (" +
                    to_string(meta->bound_mode) + ")");
        }
        const int threshold = expander_threshold(n, cfg.effective_d());
        if (*alpha_n >= threshold)
            ph.warn("outside proof regime: hole bound " + std::to_string(*alpha_n) + " not below n/(2d) = " +
                    std::to_string(threshold));
    }
    TreeClassification cls;
    {
        detail::PhaseClock ph(rep, "classify");
        try {
            cls = classify(t, cfg.k, cfg.delta_max);
        } catch (const ContractError& e) {
            reject(ph, e.what());
            return rep;
        }
        rep.case_tag = to_string(cls.case_tag);
        ph.note(std::string(to_string(cls.case_tag)) + ": " + std::to_string(cls.count()) + " found, bound " +
                detail::fmt(static_cast<double>(n) / (4.0 * cfg.k * cfg.delta_max)));
    }
    Embedding emb;
    try {
        emb = cls.case_tag == TreeCase::pendant_stars ? case1_embed(g, t, cls, cfg, rep, alpha_n)
                                                      : case2_embed(g, t, cls, cfg, rep, alpha_n);
    } catch (const PhaseFailure& e) {
        rep.verdict = "failure";
        rep.failed_phase = e.phase;
        return rep;
    }
    {
        detail::PhaseClock ph(rep, "verify");
        auto v = check_embedding(g, t, emb);
        if (!v.ok) {
            ph->status = "failed";
            ph.note(v.violation);
            rep.verdict = "failure";
            rep.failed_phase = "verify";
            return rep;
        }
        ph.note("injective, all " + std::to_string(t.vertex_count() - 1) + " tree edges present");
    }
    rep.embedding = std::move(emb);
    rep.verdict = "success";
    return rep;
}

}  // namespace bht
