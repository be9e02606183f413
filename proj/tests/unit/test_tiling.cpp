#include <gtest/gtest.h>

#include "bht/blowup/tiling.hpp"
#include "bht/generators.hpp"

using namespace bht;

namespace {

PartitionedGraph random_blowup(int k, int m, double p, Rng& rng) {
    std::vector<Edge> e;
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (rng.bernoulli(p)) e.emplace_back(i * m + a, ((i + 1) % k) * m + b);
    return PartitionedGraph::ranged(k, m, e);
}

Graph bipartite(int nx, int ny, const std::vector<Edge>& e) { return Graph(nx + ny, e); }

VertexSet range_set(int universe, int from, int to) {
    VertexSet s(universe);
    for (int v = from; v < to; ++v) s.insert(v);
    return s;
}

}  // namespace

TEST(RegularPair, CompletePairHasNoDeviation) {
    std::vector<Edge> e;
    for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b) e.emplace_back(a, 10 + b);
    auto g = bipartite(10, 10, e);
    auto r = regular_pair_check(g, range_set(20, 0, 10), range_set(20, 10, 20), 0.2, 0.5, 50, 1);
    EXPECT_DOUBLE_EQ(r.density, 1.0);
    EXPECT_DOUBLE_EQ(r.max_deviation, 0.0);
    EXPECT_TRUE(r.passed());
}

TEST(RegularPair, HalfSplitIsCaught) {
    // only the first half of X has edges: density 1/2, a low-degree X' has density 0
    std::vector<Edge> e;
    for (int a = 0; a < 30; ++a)
        for (int b = 0; b < 60; ++b) e.emplace_back(a, 60 + b);
    auto g = bipartite(60, 60, e);
    auto r = regular_pair_check(g, range_set(120, 0, 60), range_set(120, 60, 120), 0.3, 0.1, 40, 2);
    EXPECT_NEAR(r.density, 0.5, 1e-12);
    EXPECT_NEAR(r.max_deviation, 0.5, 1e-12);
    EXPECT_FALSE(r.passed());
}

TEST(RegularPair, RandomPairPasses) {
    Rng rng(3);
    std::vector<Edge> e;
    for (int a = 0; a < 60; ++a)
        for (int b = 0; b < 60; ++b)
            if (rng.bernoulli(0.5)) e.emplace_back(a, 60 + b);
    auto g = bipartite(60, 60, e);
    auto r = regular_pair_check(g, range_set(120, 0, 60), range_set(120, 60, 120), 0.25, 0.3, 100, 4);
    EXPECT_TRUE(r.passed());
    EXPECT_LT(r.max_deviation, 0.25);
}

TEST(Tiling, CompleteBlowupIsPerfect) {
    Rng rng(1);
    auto pg = random_blowup(5, 9, 1.0, rng);
    auto t = almost_tiling(pg, pg.graph().all(), 0, TilingStrategy::greedy, 1);
    EXPECT_TRUE(t.uncovered.empty());
    EXPECT_EQ(t.cycles.size(), 9u);
    EXPECT_TRUE(t.reached);
}

TEST(Tiling, GreedyNeverBeatsExact) {
    Rng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        auto pg = random_blowup(4, 2 + trial % 5, 0.45, rng);
        auto all = pg.graph().all();
        auto ex = almost_tiling(pg, all, 0, TilingStrategy::exact, trial);
        auto gr = almost_tiling(pg, all, 0, TilingStrategy::greedy, trial);
        EXPECT_LE(gr.cycles.size(), ex.cycles.size());
        EXPECT_TRUE(verify_tiling(pg, all, ex));
        EXPECT_TRUE(verify_tiling(pg, all, gr));
        // exact tiling is perfect exactly when the factor oracle finds a factor
        EXPECT_EQ(ex.uncovered.empty(), exact_transversal_factor(pg).factor.has_value());
    }
}

TEST(Tiling, ExactCoverageMonotoneUnderRemoval) {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        auto pg = random_blowup(4, 5, 0.5, rng);
        VertexSet target = pg.graph().all();
        std::size_t prev = almost_tiling(pg, target, 0, TilingStrategy::exact, 0).cycles.size();
        auto order = target.to_vector();
        rng.shuffle(order);
        for (int r = 0; r < 6; ++r) {
            target.erase(order[r]);
            std::size_t now = almost_tiling(pg, target, 0, TilingStrategy::exact, 0).cycles.size();
            EXPECT_LE(now, prev);
            prev = now;
        }
    }
}

TEST(Tiling, ExactCapExceeded) {
    Rng rng(7);
    auto pg = random_blowup(4, 9, 0.5, rng);
    EXPECT_THROW(almost_tiling(pg, pg.graph().all(), 0, TilingStrategy::exact, 0), CapExceeded);
}

TEST(Tiling, GreedyStopsAtZeta) {
    Rng rng(8);
    auto pg = random_blowup(4, 20, 1.0, rng);
    auto t = almost_tiling(pg, pg.graph().all(), 0.5, TilingStrategy::greedy, 3);
    EXPECT_TRUE(t.reached);
    EXPECT_EQ(t.uncovered.count(), 40);
    TilingOptions keep_going;
    keep_going.stop_at_zeta = false;
    auto full = almost_tiling(pg, pg.graph().all(), 0.5, TilingStrategy::greedy, 3, keep_going);
    EXPECT_TRUE(full.uncovered.empty());
}

TEST(Tiling, PartitionRouteCoverage) {
    auto gb = gen_blowup(48, 8, 0.3, 0.5, 2, 6);
    TilingOptions opt;
    opt.blocks = 6;
    const double zeta = 0.1;
    auto t = almost_tiling(gb.graph, gb.graph.graph().all(), zeta, TilingStrategy::partition_route, 2, opt);
    EXPECT_LE(t.uncovered.count(), zeta * 8 * 48);
    ASSERT_EQ(t.copies.size(), 6u);
    for (const auto& c : t.copies) {
        EXPECT_EQ(c.size, 64);
        EXPECT_LE(c.leftover, zeta * 8 / 2);
    }
    EXPECT_EQ(t.matching_sizes.size(), 4u);
}

TEST(Tiling, PartitionRoutePreconditions) {
    auto gb = gen_blowup(12, 6, 0.3, 0.5, 1, 3);
    TilingOptions opt;
    opt.blocks = 3;
    EXPECT_THROW(almost_tiling(gb.graph, gb.graph.graph().all(), 0.1, TilingStrategy::partition_route, 1, opt),
                 ContractError);
    auto gb8 = gen_blowup(12, 8, 0.3, 0.5, 1);
    EXPECT_THROW(almost_tiling(gb8.graph, gb8.graph.graph().all(), 0.1, TilingStrategy::partition_route, 1),
                 ContractError);
}
