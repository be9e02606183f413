#include <gtest/gtest.h>

#include "bht/pipeline.hpp"

using namespace bht;

namespace {

struct Host {
    GeneratedGraph g = gen_low_hole_graph(400, 0.25, 0.15, 11);
};

const Host& host() {
    static Host h;
    return h;
}

int count_commas(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), ',')); }

}  // namespace

TEST(Pipeline, PathIsCase2AndVerifies) {
    auto t = gen_tree(400, 4, TreeProfile::path, 1);
    auto rep = embed_spanning_tree(host().g.graph, t, {}, host().g.meta);
    ASSERT_TRUE(rep.success()) << to_json(rep).dump(1);
    EXPECT_EQ(rep.case_tag, "caterpillars");
    EXPECT_TRUE(check_embedding(host().g.graph, t, *rep.embedding).ok);
    EXPECT_EQ(rep.phase("star-matching")->status, "skipped");
    EXPECT_EQ(rep.phase("factor")->status, "ok");
}

TEST(Pipeline, StarHeavyIsCase1AndVerifies) {
    auto t = gen_tree(400, 4, TreeProfile::star_heavy, 2);
    auto rep = embed_spanning_tree(host().g.graph, t, {}, host().g.meta);
    ASSERT_TRUE(rep.success()) << to_json(rep).dump(1);
    EXPECT_EQ(rep.case_tag, "pendant_stars");
    EXPECT_TRUE(verify_embedding(host().g.graph, t.graph(), *rep.embedding));
    EXPECT_EQ(rep.phase("factor"), nullptr);
}

TEST(Pipeline, LeafyCaterpillarsUseAllPhases) {
    auto t = gen_tree(400, 4, TreeProfile::caterpillar, 3);
    auto rep = embed_spanning_tree(host().g.graph, t, {}, host().g.meta);
    ASSERT_TRUE(rep.success()) << to_json(rep).dump(1);
    EXPECT_EQ(rep.case_tag, "caterpillars");
    EXPECT_EQ(rep.phase("star-matching")->status, "ok");
}

TEST(Pipeline, TwoCliquesRejectedBeforeSearch) {
    std::vector<Edge> e;
    for (int a = 0; a < 200; ++a)
        for (int b = a + 1; b < 200; ++b) {
            e.emplace_back(a, b);
            e.emplace_back(200 + a, 200 + b);
        }
    Graph g(400, e);
    auto t = gen_tree(400, 4, TreeProfile::random, 4);
    auto rep = embed_spanning_tree(g, t, {});
    EXPECT_EQ(rep.verdict, "rejected");
    EXPECT_EQ(rep.failed_phase, "preflight");
    EXPECT_EQ(rep.phases.size(), 1u);
}

TEST(Pipeline, LowMinDegreeRejected) {
    auto g = gen_low_hole_graph(400, 0.1, 0.05, 5);
    auto t = gen_tree(400, 4, TreeProfile::random, 5);
    auto rep = embed_spanning_tree(g.graph, t, {});
    EXPECT_EQ(rep.verdict, "rejected");
    EXPECT_NE(rep.phases[0].notes.back().find("min degree"), std::string::npos);
}

TEST(Pipeline, WrongSizesRejected) {
    auto t = gen_tree(100, 4, TreeProfile::random, 6);
    auto rep = embed_spanning_tree(host().g.graph, t, {});
    EXPECT_EQ(rep.verdict, "rejected");
}

TEST(Pipeline, SameSeedSameReport) {
    auto t = gen_tree(400, 4, TreeProfile::random, 7);
    PipelineConfig c;
    c.seed = 42;
    auto a = to_json(embed_spanning_tree(host().g.graph, t, c, host().g.meta)).dump();
    auto b = to_json(embed_spanning_tree(host().g.graph, t, c, host().g.meta)).dump();
    EXPECT_EQ(a, b);
    c.seed = 43;
    auto other = to_json(embed_spanning_tree(host().g.graph, t, c, host().g.meta)).dump();
    EXPECT_NE(a, other);
}

TEST(Pipeline, TimingsOnlyWhenAsked) {
    auto t = gen_tree(400, 4, TreeProfile::random, 8);
    auto rep = embed_spanning_tree(host().g.graph, t, {}, host().g.meta);
    EXPECT_TRUE(to_json(rep)["phases"][0]["ms"].is_null());
    EXPECT_TRUE(to_json(rep, true)["phases"][0]["ms"].is_number());
    EXPECT_EQ(count_commas(report_csv_row(rep, "x", 400)), count_commas(report_csv_header()));
}

TEST(Pipeline, ConfigValidationAndJson) {
    PipelineConfig c;
    c.d = 8;  // equals 2Δ
    EXPECT_THROW(c.validate(), ContractError);
    c.d = 6;
    EXPECT_THROW(c.validate(), ContractError);
    auto p = PipelineConfig::asymptotic_defaults(0.25, 4);
    EXPECT_EQ(p.k, 192);
    EXPECT_DOUBLE_EQ(p.gamma, 1.0 / (4.0 * 192 * 16));
    auto back = config_from_json(to_json(p));
    EXPECT_EQ(to_json(back), to_json(p));
    EXPECT_THROW(config_from_json(Json{{"colour", 1}}), ParseError);
}

TEST(CheckEmbedding, IdentityAndViolations) {
    auto t = gen_tree(30, 3, TreeProfile::random, 9);
    Embedding id{30, 30, {}};
    for (int v = 0; v < 30; ++v) id.map.push_back(v);
    EXPECT_TRUE(check_embedding(t.graph(), t, id).ok);
    auto dup = id;
    dup.map[1] = dup.map[0];
    auto r = check_embedding(t.graph(), t, dup);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.violation.find("share image"), std::string::npos);
    // swapping images stays injective; on a path, swapping the two ends breaks an edge
    auto p = gen_tree(30, 2, TreeProfile::path, 1);
    Embedding sw{30, 30, {}};
    for (int v = 0; v < 30; ++v) sw.map.push_back(v);
    auto ends = std::find_if(sw.map.begin(), sw.map.end(), [&](Vertex v) { return p.is_leaf(v); });
    auto other = std::find_if(ends + 1, sw.map.end(), [&](Vertex v) { return p.is_leaf(v); });
    std::iter_swap(ends, other);
    auto s = check_embedding(p.graph(), p, sw);
    EXPECT_FALSE(s.ok);
    EXPECT_NE(s.violation.find("non-edge"), std::string::npos);
}

TEST(Pipeline, CaterpillarLengthArithmetic) {
    for (int k = 12; k <= 400; ++k) {
        int kp = select_k_prime(k);
        EXPECT_EQ((kp - 2) % 4, 0);
        EXPECT_GE(kp, k / 2 - 3);
        EXPECT_LE(kp, k / 2);
    }
}
