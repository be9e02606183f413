#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bht/blowup/absorbing_set.hpp"
#include "bht/expander.hpp"
#include "bht/generators.hpp"
#include "bht/graph.hpp"
#include "bht/tree.hpp"

namespace bht {

using Json = nlohmann::json;

struct ParseError : Error {
    using Error::Error;
};

// ---- edge-list text ---------------------------------------------------------------------------

/// One "u v" pair per line, 0-indexed; blank lines and '#' comments are ignored, except that a
/// leading "# n N" comment fixes the vertex count (otherwise max index + 1).
inline Graph read_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    int n = -1, max_v = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            std::istringstream c(line.substr(hash + 1));
            std::string key;
            int value;
            if (c >> key >> value && key == "n") n = value;
            line.resize(hash);
        }
        std::istringstream ls(line);
        long u, v;
        if (!(ls >> u)) continue;
        std::string extra;
        if (!(ls >> v) || (ls >> extra))
            throw ParseError("edge list line " + std::to_string(lineno) + ": expected two vertex indices");
        if (u < 0 || v < 0) throw ParseError("edge list line " + std::to_string(lineno) + ": negative index");
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
        max_v = std::max<int>(max_v, static_cast<int>(std::max(u, v)));
    }
    if (n < 0) n = max_v + 1;
    if (max_v >= n) throw ParseError("edge list: index " + std::to_string(max_v) + " exceeds declared n");
    return Graph(n, edges);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    out << "# n " << g.vertex_count() << "\n";
    for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
}

// ---- structured text --------------------------------------------------------------------------

inline Json to_json(const Graph& g) {
    Json e = Json::array();
    for (auto [u, v] : g.edges()) e.push_back({u, v});
    return {{"n", g.vertex_count()}, {"edges", e}};
}

inline Graph graph_from_json(const Json& j) {
    try {
        return Graph(j.at("n").get<int>(), j.at("edges").get<std::vector<Edge>>());
    } catch (const Json::exception& e) {
        throw ParseError(std::string("graph JSON: ") + e.what());
    }
}

inline Json to_json(const PartitionedGraph& pg) {
    Json j = to_json(pg.graph());
    j["k"] = pg.k();
    j["part_size"] = pg.part_size();
    j["parts"] = pg.parts();
    return j;
}

inline PartitionedGraph partitioned_from_json(const Json& j) {
    try {
        return PartitionedGraph(graph_from_json(j), j.at("k").get<int>(),
                                j.at("parts").get<std::vector<std::vector<Vertex>>>());
    } catch (const Json::exception& e) {
        throw ParseError(std::string("partitioned graph JSON: ") + e.what());
    }
}

inline Json to_json(const InstanceMetadata& m) {
    return {{"seed", m.seed},           {"construction", m.construction},
            {"n", m.n},                 {"k", m.k},
            {"min_degree", m.min_degree}, {"alpha_bound", m.alpha_bound},
            {"bound_mode", to_string(m.bound_mode)}, {"repairs", m.repairs},
            {"blocks", m.blocks},       {"no_factor", m.no_factor},
            {"notes", m.notes}};
}

inline InstanceMetadata metadata_from_json(const Json& j) {
    InstanceMetadata m;
    try {
        m.seed = j.value("seed", std::uint64_t{0});
        m.construction = j.value("construction", std::string());
        m.n = j.value("n", 0);
        m.k = j.value("k", 0);
        m.min_degree = j.value("min_degree", 0);
        m.alpha_bound = j.value("alpha_bound", 0);
        auto mode = j.value("bound_mode", std::string("whp"));
        m.bound_mode = mode == "planted" ? BoundMode::planted : mode == "exact" ? BoundMode::exact : BoundMode::whp;
        m.repairs = j.value("repairs", 0L);
        m.blocks = j.value("blocks", 0);
        m.no_factor = j.value("no_factor", false);
        m.notes = j.value("notes", std::string());
    } catch (const Json::exception& e) {
        throw ParseError(std::string("metadata JSON: ") + e.what());
    }
    return m;
}

// ---- trees ------------------------------------------------------------------------------------

/// Parent-array text: n, then the parents of vertices 1..n-1 (vertex 0 is the root).
inline void write_parent_array(std::ostream& out, const Tree& t) {
    auto parent = t.parents_from(0);
    out << t.vertex_count() << "\n";
    for (Vertex v = 1; v < t.vertex_count(); ++v) out << parent[v] << (v + 1 < t.vertex_count() ? " " : "");
    out << "\n";
}

/// Parent-array text when the first data line holds a single number, otherwise an edge list.
inline Tree read_tree_text(std::istream& in) {
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<long> tok;
        long x;
        while (ls >> x) tok.push_back(x);
        if (tok.empty()) continue;
        if (tok.size() == 1) {
            std::istringstream all(text);
            std::string stripped, l;
            while (std::getline(all, l)) {
                auto h = l.find('#');
                stripped += (h == std::string::npos ? l : l.substr(0, h)) + "\n";
            }
            std::istringstream nums(stripped);
            long n;
            nums >> n;
            std::vector<Vertex> parents;
            while (nums >> x) parents.push_back(static_cast<Vertex>(x));
            if (n < 1 || static_cast<long>(parents.size()) != n - 1)
                throw ParseError("parent array: expected " + std::to_string(n - 1) + " parents, got " +
                                 std::to_string(parents.size()));
            return Tree::from_parents(static_cast<int>(n), parents);
        }
        break;
    }
    std::istringstream again(text);
    return Tree(read_edge_list(again));
}

inline Json tree_to_json(const Tree& t) {
    auto parent = t.parents_from(0);
    return {{"n", t.vertex_count()}, {"parents", std::vector<Vertex>(parent.begin() + 1, parent.end())}};
}

inline Tree tree_from_json(const Json& j) {
    try {
        if (j.contains("parents"))
            return Tree::from_parents(j.at("n").get<int>(), j.at("parents").get<std::vector<Vertex>>());
        return Tree(graph_from_json(j));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("tree JSON: ") + e.what());
    }
}

// ---- witnesses --------------------------------------------------------------------------------

inline Json to_json(const Factor& f) {
    Json a = Json::array();
    for (const auto& c : f) a.push_back(c.vertices);
    return a;
}

inline Factor factor_from_json(const Json& j) {
    Factor f;
    try {
        for (const auto& c : j) f.push_back(TransversalCycle{c.get<std::vector<Vertex>>()});
    } catch (const Json::exception& e) {
        throw ParseError(std::string("factor JSON: ") + e.what());
    }
    return f;
}

inline Json to_json(const Embedding& e) {
    return {{"pattern_size", e.pattern_size}, {"host_size", e.host_size}, {"map", e.map}};
}

inline Embedding embedding_from_json(const Json& j) {
    Embedding e;
    try {
        e.map = j.at("map").get<std::vector<Vertex>>();
        e.pattern_size = j.value("pattern_size", static_cast<int>(e.map.size()));
        e.host_size = j.value("host_size", 0);
    } catch (const Json::exception& ex) {
        throw ParseError(std::string("embedding JSON: ") + ex.what());
    }
    return e;
}

inline Json to_json(const Absorber& a) {
    return {{"kind", to_string(a.kind)},
            {"target", a.target},
            {"set", a.set},
            {"factor_alone", to_json(a.factor_alone)},
            {"factor_with_target", to_json(a.factor_with_target)}};
}

inline Absorber absorber_from_json(const Json& j) {
    Absorber a;
    auto kind = j.at("kind").get<std::string>();
    a.kind = kind == "empty" ? Absorber::Kind::empty : kind == "swap" ? Absorber::Kind::swap : Absorber::Kind::connectors;
    a.target = j.at("target").get<std::vector<Vertex>>();
    a.set = j.at("set").get<std::vector<Vertex>>();
    a.factor_alone = factor_from_json(j.at("factor_alone"));
    a.factor_with_target = factor_from_json(j.at("factor_with_target"));
    return a;
}

inline Json to_json(const AbsorbingSet& as) {
    Json parts = Json::array();
    for (const auto& p : as.parts) {
        Json edges = Json::array();
        for (const auto& e : p.edges) {
            Json je = {{"left", e.left}, {"z", e.z}, {"enabled", e.enabled}};
            if (e.enabled) je["absorber"] = to_json(e.absorber);
            edges.push_back(je);
        }
        parts.push_back({{"x", p.x},
                         {"y", p.y},
                         {"z_sets", p.z_sets},
                         {"template",
                          {{"kind", p.tmpl.kind == Template::Kind::structured ? "structured" : "random"},
                           {"m", p.tmpl.m},
                           {"x_size", p.tmpl.x_size},
                           {"edges", p.tmpl.edges},
                           {"samples_checked", p.tmpl.samples_checked}}},
                         {"edges", edges}});
    }
    return {{"k", as.k},           {"part_size", as.part_size}, {"m", as.m},
            {"x_size", as.x_size}, {"spare", as.spare},         {"capacity", as.capacity},
            {"xi", as.xi},         {"gamma", as.gamma},         {"r", as.r.to_vector()},
            {"parts", parts}};
}

inline AbsorbingSet absorbing_set_from_json(const Json& j, int vertex_count) {
    AbsorbingSet as;
    try {
        as.k = j.at("k").get<int>();
        as.part_size = j.at("part_size").get<int>();
        as.m = j.at("m").get<int>();
        as.x_size = j.at("x_size").get<int>();
        as.spare = j.at("spare").get<int>();
        as.capacity = j.at("capacity").get<int>();
        as.xi = j.at("xi").get<double>();
        as.gamma = j.at("gamma").get<double>();
        as.r = VertexSet::of(vertex_count, j.at("r").get<std::vector<Vertex>>());
        for (const auto& jp : j.at("parts")) {
            AbsorbingPart p;
            p.x = jp.at("x").get<std::vector<Vertex>>();
            p.y = jp.at("y").get<std::vector<Vertex>>();
            p.z_sets = jp.at("z_sets").get<std::vector<std::vector<Vertex>>>();
            const auto& jt = jp.at("template");
            p.tmpl.kind = jt.at("kind").get<std::string>() == "structured" ? Template::Kind::structured
                                                                           : Template::Kind::random;
            p.tmpl.m = jt.at("m").get<int>();
            p.tmpl.x_size = jt.at("x_size").get<int>();
            p.tmpl.y_size = 2 * p.tmpl.m;
            p.tmpl.z_size = 3 * p.tmpl.m;
            p.tmpl.edges = jt.at("edges").get<std::vector<std::pair<int, int>>>();
            p.tmpl.samples_checked = jt.value("samples_checked", 0);
            for (const auto& je : jp.at("edges")) {
                TemplateEdge e;
                e.left = je.at("left").get<int>();
                e.z = je.at("z").get<int>();
                e.enabled = je.at("enabled").get<bool>();
                if (e.enabled) e.absorber = absorber_from_json(je.at("absorber"));
                p.edges.push_back(std::move(e));
            }
            as.parts.push_back(std::move(p));
        }
    } catch (const Json::exception& e) {
        throw ParseError(std::string("absorbing set JSON: ") + e.what());
    }
    return as;
}

// ---- files ------------------------------------------------------------------------------------

inline bool is_json_path(const std::string& path) {
    return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

inline Json read_json_file(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

/// Graph from either format, chosen by extension; a JSON instance may wrap it under "graph".
inline Graph load_graph(const std::string& path) {
    if (is_json_path(path)) {
        auto j = read_json_file(path);
        return graph_from_json(j.contains("graph") ? j.at("graph") : j);
    }
    std::istringstream in(read_file(path));
    return read_edge_list(in);
}

inline Tree load_tree(const std::string& path) {
    if (is_json_path(path)) {
        auto j = read_json_file(path);
        return tree_from_json(j.contains("tree") ? j.at("tree") : j);
    }
    std::istringstream in(read_file(path));
    return read_tree_text(in);
}

}  // namespace bht
