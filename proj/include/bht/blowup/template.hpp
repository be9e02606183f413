#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bht/graph.hpp"
#include "bht/matching.hpp"
#include "bht/rng.hpp"

namespace bht {

/// Bipartite graph on (X ∪ Y) vs Z with |X| = m + ⌊βm⌋, |Y| = 2m, |Z| = 3m.
/// Left index a < x_size is X_a, otherwise Y_{a - x_size}.
struct Template {
    enum class Kind { structured, random };
    Kind kind = Kind::structured;
    int m = 0;
    int x_size = 0;
    int y_size = 0;
    int z_size = 0;
    std::vector<std::pair<int, int>> edges;  ///< (left, z)
    int samples_checked = 0;
    int attempts = 0;

    int left_size() const { return x_size + y_size; }
    int max_degree() const {
        std::vector<int> dl(left_size(), 0), dz(z_size, 0);
        for (auto [a, z] : edges) ++dl[a], ++dz[z];
        int d = 0;
        for (int v : dl) d = std::max(d, v);
        for (int v : dz) d = std::max(d, v);
        return d;
    }
};

struct TemplateOptions {
    enum class Construction { automatic, structured, random };
    Construction construction = Construction::automatic;
    int samples = 200;
    int retries = 50;
    int left_degree = 8;  ///< random construction only
    int max_degree = 40;
};

/// Perfect matching of X' ∪ Y onto Z using edges with enabled[e] set, as left index -> z.
inline std::optional<std::vector<int>> template_matching(const Template& t, const std::vector<int>& x_prime,
                                                         const std::vector<char>* enabled = nullptr) {
    std::vector<int> left = x_prime;
    for (int j = 0; j < t.y_size; ++j) left.push_back(t.x_size + j);
    if (static_cast<int>(left.size()) != t.z_size) return std::nullopt;
    std::vector<int> pos(t.left_size(), -1);
    for (std::size_t i = 0; i < left.size(); ++i) pos[left[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(left.size());
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        if (enabled && !(*enabled)[e]) continue;
        auto [a, z] = t.edges[e];
        if (pos[a] >= 0) adj[pos[a]].push_back(z);
    }
    auto r = hopcroft_karp(static_cast<int>(left.size()), t.z_size, adj);
    if (r.size != t.z_size) return std::nullopt;
    std::vector<int> mate(t.left_size(), -1);
    for (std::size_t i = 0; i < left.size(); ++i) mate[left[i]] = r.mate_a[i];
    return mate;
}

namespace detail {

inline std::vector<int> sample_subset(int n, int m, Rng& rng) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    all.resize(m);
    std::sort(all.begin(), all.end());
    return all;
}

// Every m-subset of X when there are at most `limit` of them, otherwise `limit` random ones.
inline std::vector<std::vector<int>> template_samples(int n, int m, int limit, Rng& rng) {
    double count = 1;
    for (int i = 0; i < m; ++i) count = count * (n - i) / (i + 1);
    std::vector<std::vector<int>> out;
    if (count <= limit) {
        std::vector<int> cur(m);
        std::iota(cur.begin(), cur.end(), 0);
        while (true) {
            out.push_back(cur);
            int i = m - 1;
            while (i >= 0 && cur[i] == n - m + i) --i;
            if (i < 0) break;
            ++cur[i];
            for (int j = i + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
        }
        return out;
    }
    for (int s = 0; s < limit; ++s) out.push_back(sample_subset(n, m, rng));
    return out;
}

}  // namespace detail

/// Template with the robust-matching property checked on sampled m-subsets of X.
///
/// Structured: Y_j–z_j plus X complete to the last m indices, robust for every subset; used
/// while |X| fits the degree bound. Random: every left vertex picks left_degree indices
/// under the degree cap, Y_j keeping z_j as a backbone.
inline Template build_template(int m, double beta, std::uint64_t seed, const TemplateOptions& opt = {}) {
    if (m < 1) throw ContractError("build_template: m must be positive");
    if (beta < 0) throw ContractError("build_template: beta must be non-negative");
    Template t;
    t.m = m;
    t.x_size = m + static_cast<int>(beta * m);
    t.y_size = 2 * m;
    t.z_size = 3 * m;
    bool structured = opt.construction == TemplateOptions::Construction::structured ||
                      (opt.construction == TemplateOptions::Construction::automatic && t.x_size <= opt.max_degree);
    t.kind = structured ? Template::Kind::structured : Template::Kind::random;
    Rng rng(seed);
    for (t.attempts = 1; t.attempts <= opt.retries; ++t.attempts) {
        t.edges.clear();
        for (int j = 0; j < t.y_size; ++j) t.edges.emplace_back(t.x_size + j, j);
        if (structured) {
            for (int a = 0; a < t.x_size; ++a)
                for (int z = t.y_size; z < t.z_size; ++z) t.edges.emplace_back(a, z);
        } else {
            std::vector<int> dz(t.z_size, 0);
            for (int j = 0; j < t.y_size; ++j) dz[j] = 1;
            for (int a = 0; a < t.left_size(); ++a) {
                const bool is_y = a >= t.x_size;
                int want = std::min(opt.left_degree - (is_y ? 1 : 0), t.z_size - (is_y ? 1 : 0));
                std::vector<int> zs(t.z_size);
                std::iota(zs.begin(), zs.end(), 0);
                rng.shuffle(zs);
                for (int z : zs) {
                    if (want == 0) break;
                    if (dz[z] >= opt.max_degree || (is_y && z == a - t.x_size)) continue;
                    t.edges.emplace_back(a, z);
                    ++dz[z];
                    --want;
                }
            }
        }
        if (t.max_degree() > opt.max_degree) {
            if (structured) throw Error("build_template: structured template exceeds the degree bound");
            continue;
        }
        auto samples = detail::template_samples(t.x_size, m, opt.samples, rng);
        bool ok = true;
        for (const auto& xs : samples)
            if (!template_matching(t, xs)) {
                ok = false;
                break;
            }
        if (ok) {
            t.samples_checked = static_cast<int>(samples.size());
            return t;
        }
        if (structured) throw Error("build_template: internal error, structured template not robust");
    }
    throw Error("build_template: retry cap exceeded for m=" + std::to_string(m) + " (m too small)");
}

}  // namespace bht
