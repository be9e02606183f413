// bht: command-line front end for generators, analysis, embedding and factor search.
//
// Exit codes: 0 success, 1 verified failure (no embedding / no factor / invalid witness),
// 2 usage or input error.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "bht/pipeline.hpp"

using namespace bht;

namespace {

struct Usage : Error {
    using Error::Error;
};

struct Globals {
    std::uint64_t seed = 1;
    std::string config;
    std::string out;
    std::string format = "json";
    bool timings = false;
};

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text << "\n";
        return;
    }
    write_file(g.out, text + "\n");
}

PipelineConfig load_config(const Globals& g) {
    PipelineConfig c;
    if (!g.config.empty()) c = config_from_json(read_json_file(g.config));
    c.seed = g.seed;
    return c;
}

std::optional<InstanceMetadata> load_meta(const std::string& instance, const std::string& meta_path) {
    if (!meta_path.empty()) return metadata_from_json(read_json_file(meta_path));
    if (is_json_path(instance)) {
        auto j = read_json_file(instance);
        if (j.contains("meta")) return metadata_from_json(j.at("meta"));
    }
    return std::nullopt;
}

PartitionedGraph load_partitioned(const std::string& path) {
    if (!is_json_path(path)) throw Usage(path + ": blow-up instances must be JSON with parts");
    auto j = read_json_file(path);
    const Json& body = j.contains("graph") ? j.at("graph") : j;
    if (!body.contains("parts")) throw Usage(path + ": not a partitioned instance (no \"parts\")");
    return partitioned_from_json(body);
}

std::string sidecar_path(const std::string& out) {
    std::filesystem::path p(out);
    return (p.parent_path() / p.stem()).string() + ".meta.json";
}

// ---- gen --------------------------------------------------------------------------------------

struct GenArgs {
    std::string kind;
    int n = 400, k = 4, delta_max = 4, blocks = 0;
    double eps = 0.25, p = 0.15, delta = 0.3;
    std::string profile = "random";
};

int run_gen(const Globals& g, const GenArgs& a) {
    Json inst;
    if (a.kind == "lowhole") {
        auto gg = gen_low_hole_graph(a.n, a.eps, a.p, g.seed);
        inst = {{"graph", to_json(gg.graph)}, {"meta", to_json(gg.meta)}};
    } else if (a.kind == "blowup") {
        auto gb = gen_blowup(a.n, a.k, a.delta, a.p, g.seed, a.blocks);
        inst = {{"graph", to_json(gb.graph)}, {"meta", to_json(gb.meta)}};
    } else if (a.kind == "barrier") {
        auto gb = gen_space_barrier(a.n, a.k, g.seed);
        inst = {{"graph", to_json(gb.graph)}, {"meta", to_json(gb.meta)}};
    } else if (a.kind == "tree") {
        auto t = gen_tree(a.n, a.delta_max, parse_tree_profile(a.profile), g.seed);
        if (!g.out.empty() && !is_json_path(g.out)) {
            std::ostringstream s;
            write_parent_array(s, t);
            write_file(g.out, s.str());
            return 0;
        }
        emit(g, Json{{"tree", tree_to_json(t)}}.dump());
        return 0;
    } else {
        throw Usage("gen: unknown kind '" + a.kind + "' (lowhole|blowup|barrier|tree)");
    }
    if (!g.out.empty() && !is_json_path(g.out)) {
        if (inst["graph"].contains("parts")) throw Usage("gen: blow-up instances need a .json output");
        std::ostringstream s;
        write_edge_list(s, graph_from_json(inst["graph"]));
        write_file(g.out, s.str());
    } else {
        emit(g, inst.dump());
    }
    if (!g.out.empty()) write_file(sidecar_path(g.out), inst["meta"].dump(1) + "\n");
    return 0;
}

// ---- analyze ----------------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string in, tree;
    double d = 16;
    int k = 12, delta_max = 4;
    long budget = 20000;
};

Json hole_json(const HoleReport& h) {
    Json j = {{"value", h.value}, {"mode", to_string(h.mode)}};
    if (h.witness) j["witness"] = {{"s", h.witness->s_side}, {"t", h.witness->t_side}};
    return j;
}

int run_analyze(const Globals& g, const AnalyzeArgs& a) {
    if (a.in.empty() && a.tree.empty()) throw Usage("analyze: give --in and/or --tree");
    Json out = Json::object();
    if (!a.in.empty()) {
        bool partitioned = false;
        if (is_json_path(a.in)) {
            auto j = read_json_file(a.in);
            partitioned = (j.contains("graph") ? j.at("graph") : j).contains("parts");
        }
        if (partitioned) {
            auto pg = load_partitioned(a.in);
            HoleReport h;
            try {
                h = alpha_star_b(pg, HoleMode::exact);
            } catch (const CapExceeded&) {
                h = alpha_star_b(pg, HoleMode::lower_bound, a.budget, g.seed);
            }
            out["blowup"] = {{"k", pg.k()},
                             {"part_size", pg.part_size()},
                             {"edges", pg.graph().edge_count()},
                             {"pair_min_degree", pair_min_degree(pg)},
                             {"alpha_star_b", hole_json(h)}};
        } else {
            auto gr = load_graph(a.in);
            HoleReport h;
            try {
                h = alpha_star_exact(gr);
            } catch (const CapExceeded&) {
                h = alpha_star_lower_bound(gr, a.budget, g.seed);
            }
            ExpanderOptions eo;
            eo.seed = g.seed;
            auto cert = check_expander(gr, a.d, ExpanderMode::heuristic, eo);
            Json ex = {{"d", a.d}, {"mode", to_string(cert.mode)}, {"passed", cert.passed()},
                       {"checked_sets", cert.checked_sets}, {"notes", cert.notes}};
            if (cert.violation) ex["violation"] = {{"condition", cert.violation->condition},
                                                   {"x", cert.violation->x}, {"y", cert.violation->y}};
            out["graph"] = {{"n", gr.vertex_count()},
                            {"edges", gr.edge_count()},
                            {"min_degree", gr.min_degree()},
                            {"alpha_star", hole_json(h)},
                            {"expander", ex}};
        }
    }
    if (!a.tree.empty()) {
        auto t = load_tree(a.tree);
        Json tj = {{"n", t.vertex_count()}, {"max_degree", t.max_degree()}};
        auto cls = classify(t, a.k, a.delta_max);
        tj["case"] = to_string(cls.case_tag);
        tj["count"] = cls.count();
        tj["bound"] = static_cast<double>(t.vertex_count()) / (4.0 * a.k * a.delta_max);
        if (cls.case_tag == TreeCase::caterpillars) {
            auto fam = extract_caterpillars_case2(t, cls, select_k_prime(a.k));
            tj["k_prime"] = fam.k_prime;
            tj["leafy"] = fam.leafy;
            tj["family_size"] = fam.members.size();
        }
        out["tree"] = tj;
    }
    emit(g, out.dump(1));
    return 0;
}

// ---- embed / bench ----------------------------------------------------------------------------

struct EmbedArgs {
    std::string host, tree, meta, label = "run";
};

int run_embed(const Globals& g, const EmbedArgs& a) {
    auto host = load_graph(a.host);
    auto tree = load_tree(a.tree);
    auto rep = embed_spanning_tree(host, tree, load_config(g), load_meta(a.host, a.meta));
    if (g.format == "csv")
        emit(g, report_csv_header() + "\n" + report_csv_row(rep, a.label, host.vertex_count(), g.timings));
    else
        emit(g, to_json(rep, g.timings).dump(1));
    if (rep.verdict != "success") std::cerr << "embed: " << rep.verdict << " in phase " << rep.failed_phase << "\n";
    return rep.success() ? 0 : 1;
}

struct BenchArgs {
    std::vector<int> sizes{400};
    std::vector<std::string> profiles{"path", "random", "star_heavy", "caterpillar"};
    int runs = 1;
    double eps = 0.25, p = 0.15;
    int threads = 0;
};

int run_bench(const Globals& g, const BenchArgs& a) {
    struct Job {
        int n;
        std::string profile;
        int run;
    };
    std::vector<Job> jobs;
    for (int n : a.sizes)
        for (const auto& prof : a.profiles)
            for (int r = 0; r < a.runs; ++r) jobs.push_back({n, prof, r});
    for (const auto& prof : a.profiles) parse_tree_profile(prof);
    const PipelineConfig base = load_config(g);
    std::vector<RunReport> reports(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::string first_error;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < jobs.size();) {
            try {
                // every job owns a stream derived from the master seed and its index
                const std::uint64_t s = Rng::derive(g.seed, i).next();
                auto host = gen_low_hole_graph(jobs[i].n, a.eps, a.p, s);
                auto tree = gen_tree(jobs[i].n, base.delta_max, parse_tree_profile(jobs[i].profile), s ^ 1);
                PipelineConfig c = base;
                c.seed = s;
                reports[i] = embed_spanning_tree(host.graph, tree, c, host.meta);
            } catch (const std::exception& e) {
                std::lock_guard lock(err_mu);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    const int nt = a.threads > 0 ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(nt, static_cast<int>(jobs.size())); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw Error("bench: " + first_error);

    int ok = 0;
    std::string text;
    if (g.format == "csv") {
        text = report_csv_header();
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            text += "\n" + report_csv_row(reports[i], jobs[i].profile, jobs[i].n, g.timings);
            ok += reports[i].success();
        }
    } else {
        Json arr = Json::array();
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            Json r = to_json(reports[i], g.timings);
            r.erase("embedding");
            arr.push_back({{"n", jobs[i].n}, {"profile", jobs[i].profile}, {"report", r}});
            ok += reports[i].success();
        }
        text = arr.dump(1);
    }
    emit(g, text);
    std::cerr << "bench: " << ok << "/" << jobs.size() << " verified embeddings\n";
    return ok == static_cast<int>(jobs.size()) ? 0 : 1;
}

// ---- factor / verify --------------------------------------------------------------------------

struct FactorArgs {
    std::string in, route = "auto", absorbing_out;
};

int run_factor(const Globals& g, const FactorArgs& a) {
    auto pg = load_partitioned(a.in);
    FactorParams fp;
    fp.route = parse_factor_route(a.route);
    auto r = transversal_factor(pg, fp, g.seed);
    Json attempts = Json::array();
    for (const auto& at : r.attempts) attempts.push_back({{"route", at.route}, {"outcome", at.outcome}});
    Json out = {{"factor", r.factor ? to_json(*r.factor) : Json(nullptr)},
                {"route", r.route},
                {"attempts", attempts},
                {"proved_none", r.proved_none},
                {"reservoir_size", r.reservoir_size},
                {"seed", g.seed}};
    emit(g, out.dump(1));
    if (!a.absorbing_out.empty()) {
        auto as = build_absorbing_set(pg, fp.absorbing, g.seed);
        write_file(a.absorbing_out, to_json(as).dump() + "\n");
    }
    return r.factor ? 0 : 1;
}

struct VerifyArgs {
    std::string in, witness, tree;
};

int run_verify(const Globals& g, const VerifyArgs& a) {
    auto w = read_json_file(a.witness);
    Json out;
    bool ok = false;
    if (w.is_object() && w.contains("parts") && w.contains("capacity")) {
        auto pg = load_partitioned(a.in);
        auto as = absorbing_set_from_json(w, pg.vertex_count());
        ok = verify_absorbing_set(pg, as);
        out = {{"witness", "absorbing_set"}, {"valid", ok}};
    } else if (w.is_array() || (w.is_object() && w.contains("factor"))) {
        const Json& fj = w.is_array() ? w : w.at("factor");
        if (fj.is_null()) throw Usage("verify: witness holds no factor");
        auto pg = load_partitioned(a.in);
        auto f = factor_from_json(fj);
        ok = verify_factor(pg, f, pg.graph().all());
        out = {{"witness", "factor"}, {"valid", ok}, {"cycles", f.size()}};
    } else if (w.is_object() && (w.contains("embedding") || w.contains("map"))) {
        if (a.tree.empty()) throw Usage("verify: embedding witnesses need --tree");
        auto host = load_graph(a.in);
        auto t = load_tree(a.tree);
        Embedding e;
        if (w.contains("map")) {
            e = embedding_from_json(w);
        } else {
            if (w.at("embedding").is_null()) throw Usage("verify: report holds no embedding");
            e.map = w.at("embedding").get<std::vector<Vertex>>();
        }
        auto v = check_embedding(host, t, e);
        ok = v.ok;
        out = {{"witness", "embedding"}, {"valid", ok}, {"violation", v.violation}};
    } else {
        throw Usage("verify: unrecognised witness format");
    }
    emit(g, out.dump(1));
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spanning trees in dense low-hole graphs and transversal cycle factors"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--config", g.config, "pipeline config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output path (default stdout)");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timings", g.timings, "include wall-clock timings in reports");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "generate an instance");
    gen->add_option("kind", ga.kind, "lowhole | blowup | barrier | tree")->required();
    gen->add_option("--n", ga.n, "vertex count, or part size for blow-ups");
    gen->add_option("--k", ga.k, "number of parts");
    gen->add_option("--eps", ga.eps, "minimum degree fraction (lowhole)");
    gen->add_option("--p", ga.p, "edge probability");
    gen->add_option("--delta", ga.delta, "pair minimum degree fraction (blowup)");
    gen->add_option("--blocks", ga.blocks, "planted blocks per part (blowup)");
    gen->add_option("--delta-max", ga.delta_max, "tree max degree");
    gen->add_option("--profile", ga.profile, "tree profile");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "hole, expander and tree reports");
    analyze->add_option("--in", aa.in, "graph or blow-up instance")->check(CLI::ExistingFile);
    analyze->add_option("--tree", aa.tree, "tree file")->check(CLI::ExistingFile);
    analyze->add_option("--d", aa.d, "expansion parameter");
    analyze->add_option("--k", aa.k, "caterpillar length");
    analyze->add_option("--delta-max", aa.delta_max, "tree max degree bound");
    analyze->add_option("--budget", aa.budget, "hole search budget above exact caps");

    EmbedArgs ea;
    auto* embed = app.add_subcommand("embed", "embed a spanning tree");
    embed->add_option("--host", ea.host, "host graph")->required()->check(CLI::ExistingFile);
    embed->add_option("--tree", ea.tree, "tree")->required()->check(CLI::ExistingFile);
    embed->add_option("--meta", ea.meta, "metadata sidecar")->check(CLI::ExistingFile);
    embed->add_option("--label", ea.label, "CSV label");

    FactorArgs fa;
    auto* factor = app.add_subcommand("factor", "transversal cycle factor of a blow-up");
    factor->add_option("--in", fa.in, "blow-up instance")->required()->check(CLI::ExistingFile);
    factor->add_option("--route", fa.route, "auto | absorbing | chain | search");
    factor->add_option("--absorbing-out", fa.absorbing_out, "also write an absorbing set witness");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "check a witness offline");
    verify->add_option("--in", va.in, "instance")->required()->check(CLI::ExistingFile);
    verify->add_option("--witness", va.witness, "factor, embedding or absorbing set")->required()->check(CLI::ExistingFile);
    verify->add_option("--tree", va.tree, "tree (embedding witnesses)")->check(CLI::ExistingFile);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "many seeded pipeline runs");
    bench->add_option("--sizes", ba.sizes, "host sizes");
    bench->add_option("--profiles", ba.profiles, "tree profiles");
    bench->add_option("--runs", ba.runs, "runs per (size, profile)");
    bench->add_option("--eps", ba.eps, "host minimum degree fraction");
    bench->add_option("--p", ba.p, "host edge probability");
    bench->add_option("--threads", ba.threads, "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*gen) return run_gen(g, ga);
        if (*analyze) return run_analyze(g, aa);
        if (*embed) return run_embed(g, ea);
        if (*factor) return run_factor(g, fa);
        if (*verify) return run_verify(g, va);
        if (*bench) return run_bench(g, ba);
    } catch (const Usage& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
