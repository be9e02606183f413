#include <gtest/gtest.h>

#include "bht/blowup/absorbing_set.hpp"
#include "bht/generators.hpp"

using namespace bht;

namespace {

PartitionedGraph complete_blowup(int k, int m) {
    std::vector<Edge> e;
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) e.emplace_back(i * m + a, ((i + 1) % k) * m + b);
    return PartitionedGraph::ranged(k, m, e);
}

// Independent check: the exact oracle finds a factor of the balanced subgraph induced by s.
bool oracle_has_factor(const PartitionedGraph& pg, const VertexSet& s) {
    auto sub = induced_partitioned(pg, s);
    return exact_transversal_factor(sub.graph, ExactCaps{12, 8}).factor.has_value();
}

}  // namespace

TEST(Connector, TwinsInCompleteBlowup) {
    for (int k = 4; k <= 8; ++k) {
        auto pg = complete_blowup(k, 6);
        Rng rng(k);
        auto c = find_connector(pg, 0, 1, VertexSet(pg.vertex_count()), rng);
        ASSERT_TRUE(c) << c.failed_stage;
        EXPECT_TRUE(verify_connector(pg, *c.value));
        EXPECT_LE(static_cast<int>(c.value->set.size()), 2 * k - 1);
    }
}

TEST(Connector, RandomInstancesAgreeWithOracle) {
    int found = 0, tries = 0;
    for (int k = 4; k <= 6; ++k)
        for (std::uint64_t s = 0; s < 6; ++s) {
            auto gb = gen_blowup(8, k, 0.5, 0.7, s);
            const auto& pg = gb.graph;
            Rng rng(s);
            ++tries;
            auto c = find_connector(pg, pg.part(0)[0], pg.part(0)[1], VertexSet(pg.vertex_count()), rng);
            if (!c) continue;
            ++found;
            const auto& con = *c.value;
            auto s_set = VertexSet::of(pg.vertex_count(), con.set);
            auto with_u = s_set, with_v = s_set;
            with_u.insert(con.u);
            with_v.insert(con.v);
            EXPECT_TRUE(verify_connector(pg, con));
            EXPECT_TRUE(oracle_has_factor(pg, with_u));
            EXPECT_TRUE(oracle_has_factor(pg, with_v));
        }
    EXPECT_GE(found * 10, tries * 8);
}

TEST(Connector, StarvedNeighbourhoodNamesStage) {
    // u has no neighbours at all
    auto full = complete_blowup(4, 4);
    std::vector<Edge> e;
    for (auto [a, b] : full.graph().edges())
        if (a != 0 && b != 0) e.emplace_back(a, b);
    auto pg = PartitionedGraph::ranged(4, 4, e);
    Rng rng(1);
    auto c = find_connector(pg, 0, 1, VertexSet(pg.vertex_count()), rng);
    EXPECT_FALSE(c);
    EXPECT_EQ(c.failed_stage, "neighbourhood sets");
}

TEST(Absorber, ConnectorKindInCompleteBlowup) {
    for (int k = 4; k <= 6; ++k) {
        auto pg = complete_blowup(k, 2 * k + 2);
        std::vector<Vertex> s;
        for (int i = 0; i < k; ++i) s.push_back(pg.part(i)[0]);
        Rng rng(k);
        AbsorberOptions opt;
        opt.allow_empty = opt.allow_swap = false;
        auto a = find_absorber(pg, s, VertexSet(pg.vertex_count()), rng, opt);
        ASSERT_TRUE(a) << a.failed_stage;
        EXPECT_EQ(a.value->kind, Absorber::Kind::connectors);
        EXPECT_TRUE(verify_absorber(pg, *a.value));
        EXPECT_LE(static_cast<int>(a.value->set.size()), 2 * k * k);
    }
}

TEST(Absorber, CheapKindsPreferred) {
    auto pg = complete_blowup(4, 5);
    std::vector<Vertex> s{0, 5, 10, 15};
    Rng rng(2);
    auto a = find_absorber(pg, s, VertexSet(pg.vertex_count()), rng);
    ASSERT_TRUE(a);
    EXPECT_EQ(a.value->kind, Absorber::Kind::empty);
    AbsorberOptions no_empty;
    no_empty.allow_empty = false;
    auto b = find_absorber(pg, s, VertexSet(pg.vertex_count()), rng, no_empty);
    ASSERT_TRUE(b);
    EXPECT_EQ(b.value->kind, Absorber::Kind::swap);
    EXPECT_TRUE(verify_absorber(pg, *b.value));
    EXPECT_EQ(static_cast<int>(b.value->set.size()), 4);
}

TEST(Absorber, WitnessesAgreeWithOracle) {
    auto gb = gen_blowup(10, 4, 0.6, 0.8, 3);
    const auto& pg = gb.graph;
    Rng rng(4);
    AbsorberOptions opt;
    opt.allow_empty = opt.allow_swap = false;
    int checked = 0;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vertex> s;
        for (int i = 0; i < 4; ++i) s.push_back(pg.part(i)[trial]);
        auto a = find_absorber(pg, s, VertexSet(pg.vertex_count()), rng, opt);
        if (!a) continue;
        ++checked;
        auto as = VertexSet::of(pg.vertex_count(), a.value->set);
        EXPECT_TRUE(oracle_has_factor(pg, as));
        EXPECT_TRUE(oracle_has_factor(pg, as | VertexSet::of(pg.vertex_count(), s)));
    }
    EXPECT_GT(checked, 0);
}

TEST(Absorber, GreedyDisjointCountMeetsBound) {
    const int k = 4, n = 60;
    const double beta = 0.5;
    auto gb = gen_blowup(n, k, 0.3, 0.5, 11);
    const auto& pg = gb.graph;
    std::vector<Vertex> s;
    for (int i = 0; i < k; ++i) s.push_back(pg.part(i)[0]);
    Rng rng(5);
    AbsorberOptions opt;
    opt.allow_empty = opt.allow_swap = false;
    VertexSet used(pg.vertex_count());
    int count = 0;
    while (used.count() <= beta * n - k) {
        auto a = find_absorber(pg, s, used, rng, opt);
        if (!a) break;
        ASSERT_TRUE(verify_absorber(pg, *a.value));
        for (Vertex v : a.value->set) used.insert(v);
        ++count;
    }
    EXPECT_GE(count, static_cast<int>(std::ceil((beta * n - k) / (4.0 * k * k))));
}

TEST(Fan, CompleteBlowupReachesTarget) {
    auto pg = complete_blowup(5, 7);
    auto f = build_fan(pg, 3, 7, VertexSet(pg.vertex_count()));
    EXPECT_EQ(f.cycles.size(), 7u);
    EXPECT_EQ(f.shortfall, 0);
    EXPECT_TRUE(verify_fan(pg, f));
    auto capped = build_fan(pg, 3, 20, VertexSet(pg.vertex_count()));
    EXPECT_EQ(capped.shortfall, 13);
}

TEST(Fan, RandomInstanceLinearSize) {
    auto gb = gen_blowup(40, 4, 0.3, 0.5, 8);
    const auto& pg = gb.graph;
    Rng rng(1);
    for (Vertex v = 0; v < pg.vertex_count(); v += 13) {
        auto f = build_fan(pg, v, 40, VertexSet(pg.vertex_count()), &rng);
        EXPECT_TRUE(verify_fan(pg, f));
        EXPECT_GE(static_cast<int>(f.cycles.size()), 40 / 4);
    }
}

TEST(Template, SizesAndDegree) {
    for (int m : {1, 3, 30}) {
        auto t = build_template(m, 0.1, 7);
        EXPECT_EQ(t.x_size, m + static_cast<int>(0.1 * m));
        EXPECT_EQ(t.y_size, 2 * m);
        EXPECT_EQ(t.z_size, 3 * m);
        EXPECT_LE(t.max_degree(), 40);
    }
}

TEST(Template, RandomConstructionAcceptedAndRobust) {
    TemplateOptions opt;
    opt.construction = TemplateOptions::Construction::random;
    auto t = build_template(30, 0.1, 9, opt);
    EXPECT_EQ(t.kind, Template::Kind::random);
    EXPECT_LE(t.max_degree(), 40);
    EXPECT_EQ(t.samples_checked, 200);
    // independent check by max flow on fresh samples
    Rng rng(10);
    const int left = t.left_size();
    for (int s = 0; s < 50; ++s) {
        auto xs = detail::sample_subset(t.x_size, 30, rng);
        std::vector<Edge> edges;
        for (auto [a, z] : t.edges) edges.emplace_back(a, left + z);
        Graph g(left + t.z_size, edges);
        VertexSet a_side(g.vertex_count()), b_side(g.vertex_count());
        for (int x : xs) a_side.insert(x);
        for (int y = t.x_size; y < left; ++y) a_side.insert(y);
        for (int z = 0; z < t.z_size; ++z) b_side.insert(left + z);
        EXPECT_EQ(max_bipartite_matching(g, a_side, b_side).size(), t.z_size);
    }
}

TEST(Template, StructuredIsRobustForEverySubset) {
    auto t = build_template(2, 3, 1);
    EXPECT_EQ(t.kind, Template::Kind::structured);
    EXPECT_EQ(t.samples_checked, 28);  // C(8, 2)
}

TEST(Template, RejectsBadArguments) {
    EXPECT_THROW(build_template(0, 0.1, 1), ContractError);
    EXPECT_THROW(build_template(3, -1, 1), ContractError);
}

class AbsorbingSetTest : public ::testing::Test {
protected:
    void SetUp() override {
        gb = gen_blowup(40, 4, 0.3, 0.5, 21);
        as = build_absorbing_set(gb.graph, params, 21);
    }
    AbsorbingParams params;
    GeneratedBlowup gb = gen_blowup(4, 4, 0, 1, 0);
    AbsorbingSet as;
};

TEST_F(AbsorbingSetTest, StructureVerifies) {
    const auto& pg = gb.graph;
    EXPECT_TRUE(verify_absorbing_set(pg, as));
    EXPECT_LE(as.r.count(), static_cast<int>(params.gamma * 4 * 40));
    EXPECT_EQ(as.capacity, as.spare / 3);
    for (const auto& part : as.parts) {
        EXPECT_EQ(static_cast<int>(part.x.size()), as.x_size);
        EXPECT_EQ(static_cast<int>(part.y.size()), 2 * as.m);
        EXPECT_EQ(static_cast<int>(part.z_sets.size()), 3 * as.m);
    }
}

TEST_F(AbsorbingSetTest, EmptyLeftover) {
    Rng rng(1);
    auto r = absorb(gb.graph, as, VertexSet(gb.graph.vertex_count()), rng, params);
    ASSERT_TRUE(r.factor) << r.failed_stage;
    EXPECT_TRUE(verify_factor(gb.graph, *r.factor, as.r));
}

TEST_F(AbsorbingSetTest, SingleTransversalSet) {
    Rng rng(2);
    auto u = random_leftover(gb.graph, as, 1, rng);
    auto r = absorb(gb.graph, as, u, rng, params);
    ASSERT_TRUE(r.factor) << r.failed_stage;
    EXPECT_TRUE(verify_factor(gb.graph, *r.factor, as.r | u));
}

TEST_F(AbsorbingSetTest, CapacityBoundary) {
    Rng rng(3);
    int ok = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto u = random_leftover(gb.graph, as, as.capacity, rng);
        auto r = absorb(gb.graph, as, u, rng, params);
        if (r.factor) {
            ++ok;
            EXPECT_TRUE(verify_factor(gb.graph, *r.factor, as.r | u));
        }
    }
    EXPECT_GE(ok, 9);
}

TEST_F(AbsorbingSetTest, Preconditions) {
    Rng rng(4);
    VertexSet inside(gb.graph.vertex_count());
    inside.insert(as.r.first());
    EXPECT_THROW(absorb(gb.graph, as, inside, rng), ContractError);
    auto unbalanced = random_leftover(gb.graph, as, 1, rng);
    unbalanced.erase(unbalanced.first());
    EXPECT_THROW(absorb(gb.graph, as, unbalanced, rng), ContractError);
    EXPECT_THROW(absorb(gb.graph, as, random_leftover(gb.graph, as, as.capacity + 1, rng), rng), ContractError);
}

TEST(AbsorbingSet, StarvedReservoirNamesStage) {
    // a perfect matching between consecutive parts has exactly one cycle per vertex: fans exist
    // but no reservoir survives when every vertex outside X needs its own cycle inside X
    std::vector<Edge> e;
    const int k = 4, n = 40;
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < n; ++a) e.emplace_back(i * n + a, ((i + 1) % k) * n + a);
    auto pg = PartitionedGraph::ranged(k, n, e);
    AbsorbingParams p;
    p.x_retries = 3;
    p.build_retries = 1;
    try {
        build_absorbing_set(pg, p, 1);
        FAIL() << "expected a stage error";
    } catch (const StageError& err) {
        EXPECT_EQ(err.stage, "absorbing set");
        EXPECT_NE(std::string(err.what()).find("reservoir"), std::string::npos);
    }
}

TEST(AbsorbingSet, SkeletonOverBudgetIsContractError) {
    std::vector<Edge> e;
    const int k = 4, n = 20;
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < n; ++a) e.emplace_back(i * n + a, ((i + 1) % k) * n + a);
    auto pg = PartitionedGraph::ranged(k, n, e);
    EXPECT_THROW(build_absorbing_set(pg, {}, 1), ContractError);
}
