#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bht/blowup/absorbing_set.hpp"
#include "bht/blowup/tiling.hpp"

namespace bht {

enum class FactorRoute { automatic, absorbing, chain, search };

inline const char* to_string(FactorRoute r) {
    switch (r) {
        case FactorRoute::automatic: return "auto";
        case FactorRoute::absorbing: return "absorbing";
        case FactorRoute::chain: return "chain";
        default: return "search";
    }
}

inline FactorRoute parse_factor_route(const std::string& s) {
    if (s == "auto") return FactorRoute::automatic;
    if (s == "absorbing") return FactorRoute::absorbing;
    if (s == "chain") return FactorRoute::chain;
    if (s == "search") return FactorRoute::search;
    throw ContractError("unknown factor route '" + s + "' (auto|absorbing|chain|search)");
}

struct FactorParams {
    FactorRoute route = FactorRoute::automatic;
    AbsorbingParams absorbing;
    int repair_rounds = 30;  ///< leftover + a few tiles re-solved together
    int repair_tiles = 4;
    int chain_attempts = 200;
    long search_budget = 200000;
};

struct RouteAttempt {
    std::string route;
    std::string outcome;  ///< "ok" or the failing stage
};

struct FactorReport {
    std::optional<Factor> factor;
    std::string route;  ///< route that produced the factor
    std::vector<RouteAttempt> attempts;
    bool proved_none = false;  ///< exhaustive search finished without a factor
    int reservoir_size = 0;    ///< |R| when the absorbing route got that far
    int leftover = -1;         ///< per-part leftover handed to absorb
};

namespace detail {

// Shrinks the leftover by re-solving it together with a few random tiles.
inline void repair_leftover(const PartitionedGraph& pg, Tiling& t, const FactorParams& p, Rng& rng) {
    for (int round = 0; round < p.repair_rounds && !t.uncovered.empty(); ++round) {
        std::vector<std::size_t> picked;
        VertexSet target = t.uncovered;
        for (int j = 0; j < p.repair_tiles && j < static_cast<int>(t.cycles.size()); ++j) {
            std::size_t idx = rng.index(t.cycles.size());
            if (std::find(picked.begin(), picked.end(), idx) != picked.end()) continue;
            picked.push_back(idx);
            for (Vertex v : t.cycles[idx].vertices) target.insert(v);
        }
        Factor fresh;
        if (auto f = chain_transversal_factor(pg, target, rng, 20)) {
            fresh = *f;
        } else {
            FactorSearchOptions fo;
            fo.node_budget = 2000;
            fo.rng = &rng;
            auto s = search_transversal_factor(pg, target, fo);
            if (!s.factor) continue;
            fresh = *s.factor;
        }
        std::sort(picked.rbegin(), picked.rend());
        for (std::size_t idx : picked) t.cycles.erase(t.cycles.begin() + static_cast<long>(idx));
        t.cycles.insert(t.cycles.end(), fresh.begin(), fresh.end());
        t.uncovered = VertexSet(pg.vertex_count());
    }
}

inline std::optional<Factor> absorbing_route(const PartitionedGraph& pg, const FactorParams& p, std::uint64_t seed,
                                             FactorReport& rep, std::string& stage) {
    AbsorbingSet as;
    try {
        as = build_absorbing_set(pg, p.absorbing, seed);
    } catch (const StageError& e) {
        stage = e.what();
        return std::nullopt;
    } catch (const ContractError& e) {
        stage = std::string("absorbing set: ") + e.what();
        return std::nullopt;
    }
    rep.reservoir_size = as.r.count();
    Rng rng = Rng::derive(seed, 7);
    const VertexSet rest = pg.graph().all() - as.r;
    TilingOptions topt;
    topt.stop_at_zeta = false;
    auto t = almost_tiling(pg, rest, 0, TilingStrategy::greedy, rng.next(), topt);
    repair_leftover(pg, t, p, rng);
    rep.leftover = t.uncovered.intersection_count(pg.part_set(0));
    if (rep.leftover > as.capacity) {
        stage = "tiling: leftover " + std::to_string(rep.leftover) + " per part exceeds capacity " +
                std::to_string(as.capacity);
        return std::nullopt;
    }
    auto a = absorb(pg, as, t.uncovered, rng, p.absorbing);
    if (!a.factor) {
        stage = "absorb: " + a.failed_stage;
        return std::nullopt;
    }
    Factor f = t.cycles;
    f.insert(f.end(), a.factor->begin(), a.factor->end());
    return f;
}

}  // namespace detail

/// Transversal C_k-factor of the whole blow-up. Auto tries the absorbing route, then chained
/// matchings, then bounded exhaustive search. Every returned factor is verified.
inline FactorReport transversal_factor(const PartitionedGraph& pg, const FactorParams& p, std::uint64_t seed) {
    FactorReport rep;
    const VertexSet all = pg.graph().all();
    auto want = [&](FactorRoute r) { return p.route == FactorRoute::automatic || p.route == r; };
    auto done = [&](Factor f, const char* route) {
        if (!verify_factor(pg, f, all)) throw Error(std::string("transversal_factor: ") + route + " route produced an invalid factor");
        rep.factor = std::move(f);
        rep.route = route;
        rep.attempts.push_back({route, "ok"});
    };
    for (int i = 0; i < pg.k(); ++i)
        if (static_cast<int>(pg.part(i).size()) != pg.part_size()) throw ContractError("transversal_factor: parts must have equal size");

    if (want(FactorRoute::absorbing)) {
        std::string stage;
        if (auto f = detail::absorbing_route(pg, p, seed, rep, stage)) {
            done(std::move(*f), "absorbing");
            return rep;
        }
        rep.attempts.push_back({"absorbing", stage});
    }
    if (want(FactorRoute::chain)) {
        Rng rng = Rng::derive(seed, 11);
        if (auto f = chain_transversal_factor(pg, all, rng, p.chain_attempts)) {
            done(std::move(*f), "chain");
            return rep;
        }
        rep.attempts.push_back({"chain", "no closing matching in " + std::to_string(p.chain_attempts) + " attempts"});
    }
    if (want(FactorRoute::search)) {
        Rng rng = Rng::derive(seed, 13);
        FactorSearchOptions fo;
        fo.node_budget = p.search_budget;
        fo.rng = &rng;
        auto s = search_transversal_factor(pg, all, fo);
        if (s.factor) {
            done(std::move(*s.factor), "search");
            return rep;
        }
        rep.proved_none = s.exhausted;
        rep.attempts.push_back({"search", s.exhausted ? "exhausted: no factor exists" : "node budget reached"});
    }
    return rep;
}

}  // namespace bht
