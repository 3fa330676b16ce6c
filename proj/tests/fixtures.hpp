#pragma once

#include <sys/wait.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gbh/graph.hpp"
#include "gbh/operators.hpp"

namespace fixtures {

struct Instance {
    gbh::WeightedGraph g;
    gbh::Domain d;
    gbh::BiharmonicForm form;
};

inline Instance make_instance(std::vector<gbh::VertexSpec> vs, std::vector<gbh::EdgeSpec> es,
                              std::vector<std::string> interior) {
    gbh::WeightedGraph g(std::move(vs), std::move(es));
    gbh::Domain d = gbh::boundary_of(g, interior);
    gbh::BiharmonicForm form = gbh::assemble_form(g, d);
    return Instance{std::move(g), std::move(d), std::move(form)};
}

/// Path a - b - c, unit data, interior {b}.
inline Instance p3() {
    return make_instance({{"a", 1.0}, {"b", 1.0}, {"c", 1.0}},
                         {{"a", "b", 1.0}, {"b", "c", 1.0}}, {"b"});
}

/// Path a - b - c - d - e, unit data, interior {b, c, d}.
inline Instance p5() {
    return make_instance(
        {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 1.0}, {"e", 1.0}},
        {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "d", 1.0}, {"d", "e", 1.0}}, {"b", "c", "d"});
}

/// Three leaves around a center, unit data, interior {c}.
inline Instance star3() {
    return make_instance({{"c", 1.0}, {"l1", 1.0}, {"l2", 1.0}, {"l3", 1.0}},
                         {{"c", "l1", 1.0}, {"c", "l2", 1.0}, {"c", "l3", 1.0}}, {"c"});
}

/// Connected random graph with total_max vertices at most, random measures
/// mu in [0.5, 2], weights in [wmin, wmax] (default [0.1, 3]), and a random
/// proper interior subset (boundary nonempty by connectivity). interior_max
/// caps |interior| when positive.
inline Instance random_instance(std::uint64_t seed, int total_max = 30, int interior_max = 0,
                                double wmin = 0.1, double wmax = 3.0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> total_dist(3, total_max);
    const int total = total_dist(rng);
    std::uniform_real_distribution<double> mu_dist(0.5, 2.0);
    std::uniform_real_distribution<double> w_dist(wmin, wmax);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    auto name = [](int i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "v%02d", i);
        return std::string(buf);
    };

    std::vector<gbh::VertexSpec> vs;
    for (int i = 0; i < total; ++i)
        vs.push_back({name(i), mu_dist(rng)});

    std::vector<gbh::EdgeSpec> es;
    for (int i = 1; i < total; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        es.push_back({name(parent(rng)), name(i), w_dist(rng)});
    }
    for (int i = 0; i < total; ++i)
        for (int j = i + 2; j < total; ++j)
            if (coin(rng) < 2.0 / total)
                es.push_back({name(i), name(j), w_dist(rng)});
    // tree edges and extras can collide; the graph requires unique pairs
    std::vector<gbh::EdgeSpec> dedup;
    std::vector<std::pair<std::string, std::string>> seen;
    for (auto& e : es) {
        auto key = e.u < e.v ? std::make_pair(e.u, e.v) : std::make_pair(e.v, e.u);
        bool dup = false;
        for (auto& s : seen)
            if (s == key)
                dup = true;
        if (!dup) {
            seen.push_back(key);
            dedup.push_back(e);
        }
    }

    int icap = interior_max > 0 ? std::min(interior_max, total - 1) : total - 1;
    std::uniform_int_distribution<int> isize_dist(1, icap);
    int isize = isize_dist(rng);
    std::vector<int> perm(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i)
        perm[static_cast<std::size_t>(i)] = i;
    for (int i = total - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<std::string> interior;
    for (int i = 0; i < isize; ++i)
        interior.push_back(name(perm[static_cast<std::size_t>(i)]));

    return make_instance(std::move(vs), std::move(dedup), std::move(interior));
}

inline std::string p3_json() {
    return R"({
  "vertices": [{"id": "a", "mu": 1.0}, {"id": "b", "mu": 1.0}, {"id": "c", "mu": 1.0}],
  "edges": [{"u": "a", "v": "b", "w": 1.0}, {"u": "b", "v": "c", "w": 1.0}],
  "interior": ["b"]
})";
}

inline std::string p5_json() {
    return R"({
  "vertices": [{"id": "a", "mu": 1.0}, {"id": "b", "mu": 1.0}, {"id": "c", "mu": 1.0},
               {"id": "d", "mu": 1.0}, {"id": "e", "mu": 1.0}],
  "edges": [{"u": "a", "v": "b", "w": 1.0}, {"u": "b", "v": "c", "w": 1.0},
            {"u": "c", "v": "d", "w": 1.0}, {"u": "d", "v": "e", "w": 1.0}],
  "interior": ["b", "c", "d"]
})";
}

/// Write content to a unique file under the system temp directory.
inline std::string write_temp_file(const std::string& stem, const std::string& content) {
    static int counter = 0;
    std::filesystem::path dir = std::filesystem::temp_directory_path();
    std::filesystem::path path =
        dir / ("gbh_test_" + std::to_string(++counter) + "_" + stem);
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

/// Run the CLI binary with the given argument string; stderr is folded into
/// stdout. Requires the GBH_CLI_PATH compile definition.
inline CliResult run_cli(const std::string& args) {
    CliResult res;
#ifdef GBH_CLI_PATH
    std::string cmd = std::string(GBH_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return res;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe))
        res.output.append(buf, got);
    int status = pclose(pipe);
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
#else
    (void)args;
#endif
    return res;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

}  // namespace fixtures
