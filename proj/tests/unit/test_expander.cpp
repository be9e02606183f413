#include <gtest/gtest.h>

#include "bht/expander.hpp"

using namespace bht;

namespace {

Graph complete(int n) {
    std::vector<Edge> e;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) e.emplace_back(a, b);
    return Graph(n, e);
}

Graph gnp(int n, double p, Rng& rng) {
    std::vector<Edge> e;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.bernoulli(p)) e.emplace_back(a, b);
    return Graph(n, e);
}

Tree random_tree(int n, int max_deg, Rng& rng) {
    std::vector<Edge> e;
    std::vector<int> deg(n, 0);
    for (int v = 1; v < n; ++v) {
        int p;
        do p = rng.index(v);
        while (deg[p] >= max_deg);
        ++deg[p];
        ++deg[v];
        e.emplace_back(p, v);
    }
    return Tree(n, e);
}

}  // namespace

TEST(Expander, CompleteGraphPasses) {
    auto c = check_expander(complete(16), 4, ExpanderMode::exact);
    EXPECT_TRUE(c.passed());
}

TEST(Expander, TwoCliquesViolateCondition2) {
    std::vector<Edge> e;
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 8; ++a)
            for (int b = a + 1; b < 8; ++b) e.emplace_back(c * 8 + a, c * 8 + b);
    Graph g(16, e);
    auto c = check_expander(g, 4, ExpanderMode::exact);
    ASSERT_FALSE(c.passed());
    EXPECT_EQ(c.violation->condition, 2);
    auto x = VertexSet::of(16, c.violation->x), y = VertexSet::of(16, c.violation->y);
    EXPECT_EQ(edges_between(g, x, y), 0);
    auto h = check_expander(g, 4, ExpanderMode::heuristic);
    EXPECT_FALSE(h.passed());
}

TEST(Expander, ExactCap) {
    EXPECT_THROW(check_expander(Graph(30), 2, ExpanderMode::exact), CapExceeded);
}

TEST(Expander, HeuristicPassOnDenseRandom) {
    Rng rng(31);
    auto g = gnp(200, 0.3, rng);
    // at d = 10 the threshold is 10, and G(200, 0.3) has (10,10)-holes with high probability
    auto strict = check_expander(g, 10, ExpanderMode::heuristic);
    ASSERT_FALSE(strict.passed());
    EXPECT_EQ(strict.violation->condition, 2);
    EXPECT_EQ(edges_between(g, VertexSet::of(200, strict.violation->x), VertexSet::of(200, strict.violation->y)), 0);
    auto c = check_expander(g, 5, ExpanderMode::heuristic);
    EXPECT_TRUE(c.passed());
}

TEST(Expander, HeuristicPassesAgreeWithExactAtSmallScale) {
    Rng rng(32);
    int agree = 0, total = 0;
    for (int it = 0; it < 40; ++it) {
        auto g = gnp(18, 0.3 + 0.5 * rng.unit(), rng);
        double d = 1 + rng.index(3);
        auto h = check_expander(g, d, ExpanderMode::heuristic, {std::nullopt, 500, 2000, rng.next()});
        auto ex = check_expander(g, d, ExpanderMode::exact);
        // a heuristic violation is always real
        if (!h.passed()) EXPECT_FALSE(ex.passed());
        if (h.passed()) {
            ++total;
            agree += ex.passed() ? 1 : 0;
        }
    }
    EXPECT_GE(agree * 10, total * 9);
}

TEST(Embedding, SingleEdge) {
    Graph host(3, {{1, 2}});
    auto r = embed_tree_in_expander(host, Tree::path(2));
    ASSERT_TRUE(r.success);
    EXPECT_TRUE(verify_embedding(host, Tree::path(2).graph(), r.embedding));
}

TEST(Embedding, PathIntoComplete) {
    auto host = complete(60);
    auto t = Tree::path(50);
    auto r = embed_tree_in_expander(host, t);
    ASSERT_TRUE(r.success);
    EXPECT_TRUE(verify_embedding(host, t.graph(), r.embedding));
}

TEST(Embedding, RandomTreeIntoRandomGraph) {
    Rng rng(33);
    auto host = gnp(500, 0.15, rng);
    for (int it = 0; it < 5; ++it) {
        auto t = random_tree(400, 4, rng);
        auto r = embed_tree_in_expander(host, t, {50, 3, rng.next()});
        ASSERT_TRUE(r.success);
        EXPECT_TRUE(verify_embedding(host, t.graph(), r.embedding));
    }
}

TEST(Embedding, ForestPattern) {
    Rng rng(34);
    auto host = gnp(100, 0.3, rng);
    Graph forest(9, {{0, 1}, {1, 2}, {3, 4}, {5, 6}, {6, 7}, {6, 8}});
    auto r = embed_tree_in_expander(host, forest);
    ASSERT_TRUE(r.success);
    EXPECT_TRUE(verify_embedding(host, forest, r.embedding));
}

TEST(Embedding, ReportsFailure) {
    Graph host(10, {{0, 1}, {2, 3}});
    auto r = embed_tree_in_expander(host, Tree::path(3), {5, 1, 0});
    EXPECT_FALSE(r.success);
    EXPECT_GE(r.best_partial, 2);
}

TEST(Embedding, VerifierRejectsBadMaps) {
    Graph host(4, {{0, 1}, {1, 2}});
    auto t = Tree::path(3);
    EXPECT_FALSE(verify_embedding(host, t.graph(), {3, 4, {0, 0, 1}}));
    EXPECT_FALSE(verify_embedding(host, t.graph(), {3, 4, {0, 2, 1}}));
    EXPECT_TRUE(verify_embedding(host, t.graph(), {3, 4, {0, 1, 2}}));
    EXPECT_TRUE(verify_embedding(host, t.graph(), {3, 4, {0, 1, -1}}, false));
}
