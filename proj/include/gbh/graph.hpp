#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gbh {

/// Input rejected because it violates a structural invariant. The message
/// names the first violated invariant.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input file could not be parsed at all.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VertexSpec {
    std::string id;
    double mu = 1.0;
};

struct EdgeSpec {
    std::string u;
    std::string v;
    double w = 1.0;
};

/// Finite weighted graph: vertices with a positive measure mu and undirected
/// positively weighted edges. Immutable after construction; construction
/// validates positivity, simple-graph structure and connectivity.
///
/// Vertex ids are arbitrary strings; internally vertices are indexed
/// 0..|V|-1 in lexicographic id order, which makes every derived index map
/// reproducible across loads.
class WeightedGraph {
public:
    WeightedGraph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges) {
        if (vertices.empty())
            throw validation_error("empty vertex set");
        std::sort(vertices.begin(), vertices.end(),
                  [](const VertexSpec& a, const VertexSpec& b) { return a.id < b.id; });
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
            if (vertices[i].id == vertices[i + 1].id)
                throw validation_error("duplicate vertex id: " + vertices[i].id);

        ids_.reserve(vertices.size());
        mu_.resize(static_cast<Eigen::Index>(vertices.size()));
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (!(vertices[i].mu > 0.0))
                throw validation_error("nonpositive measure at vertex " + vertices[i].id);
            index_.emplace(vertices[i].id, static_cast<int>(i));
            ids_.push_back(vertices[i].id);
            mu_[static_cast<Eigen::Index>(i)] = vertices[i].mu;
        }

        adj_.resize(ids_.size());
        std::set<std::pair<int, int>> seen;
        for (const EdgeSpec& e : edges) {
            auto iu = index_.find(e.u);
            auto iv = index_.find(e.v);
            if (iu == index_.end())
                throw validation_error("unknown endpoint: " + e.u);
            if (iv == index_.end())
                throw validation_error("unknown endpoint: " + e.v);
            int a = iu->second, b = iv->second;
            if (a == b)
                throw validation_error("self-loop at vertex " + e.u);
            if (!(e.w > 0.0))
                throw validation_error("nonpositive weight on edge " + e.u + "-" + e.v);
            auto key = std::minmax(a, b);
            if (!seen.insert(key).second)
                throw validation_error("duplicate edge " + e.u + "-" + e.v);
            adj_[static_cast<std::size_t>(a)].emplace_back(b, e.w);
            adj_[static_cast<std::size_t>(b)].emplace_back(a, e.w);
        }
        for (auto& nbrs : adj_)
            std::sort(nbrs.begin(), nbrs.end());
        edge_count_ = seen.size();

        if (!connected())
            throw validation_error("disconnected graph");
    }

    int num_vertices() const { return static_cast<int>(ids_.size()); }
    int num_edges() const { return static_cast<int>(edge_count_); }

    bool has_vertex(const std::string& id) const { return index_.count(id) != 0; }

    int index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw validation_error("unknown vertex: " + id);
        return it->second;
    }

    const std::string& id_of(int idx) const { return ids_.at(static_cast<std::size_t>(idx)); }
    double mu(int idx) const { return mu_[idx]; }
    const Eigen::VectorXd& mu_all() const { return mu_; }

    /// Neighbors of vertex `idx` as (neighbor index, edge weight), sorted by index.
    const std::vector<std::pair<int, double>>& neighbors(int idx) const {
        return adj_.at(static_cast<std::size_t>(idx));
    }

    double min_mu() const { return mu_.minCoeff(); }
    double max_mu() const { return mu_.maxCoeff(); }

    std::pair<double, double> weight_range() const {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (int x = 0; x < num_vertices(); ++x)
            for (const auto& [y, w] : adj_[static_cast<std::size_t>(x)]) {
                if (first) { lo = hi = w; first = false; }
                lo = std::min(lo, w);
                hi = std::max(hi, w);
            }
        return {lo, hi};
    }

private:
    bool connected() const {
        std::vector<char> seen(ids_.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (const auto& [y, w] : adj_[static_cast<std::size_t>(x)])
                if (!seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    ++count;
                    stack.push_back(y);
                }
        }
        return count == ids_.size();
    }

    std::vector<std::string> ids_;
    std::map<std::string, int> index_;
    Eigen::VectorXd mu_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::size_t edge_count_ = 0;
};

/// Dirichlet domain: an interior vertex set Omega together with its derived
/// boundary  dOmega = { y not in Omega : exists x in Omega with xy an edge }
/// and a contiguous index map for Omega union dOmega (interior first, each
/// part sorted by vertex id).
class Domain {
public:
    Domain(const WeightedGraph& g, std::vector<int> interior_indices) {
        if (interior_indices.empty())
            throw validation_error("empty interior");
        std::sort(interior_indices.begin(), interior_indices.end());
        interior_indices.erase(std::unique(interior_indices.begin(), interior_indices.end()),
                               interior_indices.end());
        interior_ = std::move(interior_indices);

        std::vector<char> in_interior(static_cast<std::size_t>(g.num_vertices()), 0);
        for (int x : interior_) {
            if (x < 0 || x >= g.num_vertices())
                throw validation_error("interior vertex out of range");
            in_interior[static_cast<std::size_t>(x)] = 1;
        }

        std::set<int> bset;
        for (int x : interior_)
            for (const auto& [y, w] : g.neighbors(x))
                if (!in_interior[static_cast<std::size_t>(y)])
                    bset.insert(y);
        if (bset.empty())
            throw validation_error("empty boundary");
        boundary_.assign(bset.begin(), bset.end());

        // ids are lex-sorted by graph construction, so ascending graph index
        // equals ascending id within each part.
        effective_ = interior_;
        effective_.insert(effective_.end(), boundary_.begin(), boundary_.end());
        eff_of_graph_.assign(static_cast<std::size_t>(g.num_vertices()), -1);
        for (std::size_t k = 0; k < effective_.size(); ++k)
            eff_of_graph_[static_cast<std::size_t>(effective_[k])] = static_cast<int>(k);
    }

    int interior_size() const { return static_cast<int>(interior_.size()); }
    int boundary_size() const { return static_cast<int>(boundary_.size()); }
    int effective_size() const { return static_cast<int>(effective_.size()); }

    const std::vector<int>& interior() const { return interior_; }
    const std::vector<int>& boundary() const { return boundary_; }

    /// Graph index of effective index k (0..m-1; interior occupies 0..n-1).
    int graph_of_effective(int k) const { return effective_.at(static_cast<std::size_t>(k)); }

    /// Effective index of a graph vertex, or -1 if outside Omega union dOmega.
    int effective_of_graph(int gidx) const {
        return eff_of_graph_.at(static_cast<std::size_t>(gidx));
    }

    bool is_interior(int gidx) const {
        int k = effective_of_graph(gidx);
        return k >= 0 && k < interior_size();
    }

    bool is_boundary(int gidx) const { return effective_of_graph(gidx) >= interior_size(); }
    bool in_effective(int gidx) const { return effective_of_graph(gidx) >= 0; }

    /// Interior index (0..n-1) of a graph vertex, or -1.
    int interior_index_of(int gidx) const {
        int k = effective_of_graph(gidx);
        return (k >= 0 && k < interior_size()) ? k : -1;
    }

private:
    std::vector<int> interior_;
    std::vector<int> boundary_;
    std::vector<int> effective_;
    std::vector<int> eff_of_graph_;
};

/// Build the Domain induced by an interior id set.
inline Domain boundary_of(const WeightedGraph& g, const std::vector<std::string>& interior_ids) {
    std::vector<int> idx;
    idx.reserve(interior_ids.size());
    for (const std::string& id : interior_ids)
        idx.push_back(g.index_of(id));
    return Domain(g, std::move(idx));
}

}  // namespace gbh
