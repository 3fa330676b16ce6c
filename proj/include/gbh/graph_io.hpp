#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gbh/graph.hpp"

namespace gbh {

/// Parsed contents of a graph file: the validated graph plus the declared
/// interior ids (possibly empty; domain construction rejects that later).
struct GraphFile {
    WeightedGraph graph;
    std::vector<std::string> interior;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const std::string& k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw parse_error("unknown field \"" + it.key() + "\" in " + where);
    }
}

}  // namespace detail

/// Load and validate a graph file.
///
/// Schema (unknown fields rejected):
///   {"vertices":[{"id":str,"mu":num}],
///    "edges":[{"u":str,"v":str,"w":num}],
///    "interior":[str,...]}        // optional
inline GraphFile load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw parse_error("cannot open graph file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed graph file " + path + ": " + e.what());
    }

    if (!j.is_object())
        throw parse_error("graph file must contain a JSON object");
    detail::reject_unknown_keys(j, {"vertices", "edges", "interior"}, "graph file");
    if (!j.contains("vertices") || !j["vertices"].is_array())
        throw parse_error("graph file missing \"vertices\" array");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw parse_error("graph file missing \"edges\" array");

    std::vector<VertexSpec> vertices;
    for (const auto& v : j["vertices"]) {
        if (!v.is_object() || !v.contains("id") || !v.contains("mu") ||
            !v["id"].is_string() || !v["mu"].is_number())
            throw parse_error("vertex entries must be {\"id\":str,\"mu\":num}");
        detail::reject_unknown_keys(v, {"id", "mu"}, "vertex entry");
        vertices.push_back({v["id"].get<std::string>(), v["mu"].get<double>()});
    }

    std::vector<EdgeSpec> edges;
    for (const auto& e : j["edges"]) {
        if (!e.is_object() || !e.contains("u") || !e.contains("v") || !e.contains("w") ||
            !e["u"].is_string() || !e["v"].is_string() || !e["w"].is_number())
            throw parse_error("edge entries must be {\"u\":str,\"v\":str,\"w\":num}");
        detail::reject_unknown_keys(e, {"u", "v", "w"}, "edge entry");
        edges.push_back({e["u"].get<std::string>(), e["v"].get<std::string>(), e["w"].get<double>()});
    }

    std::vector<std::string> interior;
    if (j.contains("interior")) {
        if (!j["interior"].is_array())
            throw parse_error("\"interior\" must be an array of vertex ids");
        for (const auto& s : j["interior"]) {
            if (!s.is_string())
                throw parse_error("\"interior\" must be an array of vertex ids");
            interior.push_back(s.get<std::string>());
        }
    }

    return GraphFile{WeightedGraph(std::move(vertices), std::move(edges)), std::move(interior)};
}

/// Load just the graph, ignoring any interior declaration.
inline WeightedGraph load_graph(const std::string& path) {
    return load_graph_file(path).graph;
}

}  // namespace gbh
