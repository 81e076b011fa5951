#include "ltm/graph.hpp"

#include <algorithm>
#include <string>

#include "ltm/errors.hpp"

namespace ltm {

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges) {
    if (node_count == 0) throw ParameterError("graph needs at least one node");
    Graph g;
    g.offsets_.assign(node_count + 1, 0);
    for (const Edge& e : edges) {
        if (e.u >= node_count || e.v >= node_count)
            throw ParameterError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") out of range");
        if (e.u == e.v) throw ParameterError("self-loop at node " + std::to_string(e.u));
        ++g.offsets_[e.u + 1];
        ++g.offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];

    g.neighbors_.resize(g.offsets_.back());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : edges) {
        g.neighbors_[fill[e.u]++] = e.v;
        g.neighbors_[fill[e.v]++] = e.u;
    }
    for (std::size_t i = 0; i < node_count; ++i) {
        auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
        auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
        std::sort(first, last);
        if (auto dup = std::adjacent_find(first, last); dup != last)
            throw ParameterError("duplicate edge (" + std::to_string(i) + "," + std::to_string(*dup) + ")");
    }
    return g;
}

bool Graph::has_edge(NodeId a, NodeId b) const noexcept {
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
}

std::vector<std::size_t> Graph::degrees() const {
    std::vector<std::size_t> d(node_count());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = degree(static_cast<NodeId>(i));
    return d;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId i = 0; i < node_count(); ++i)
        for (NodeId j : neighbors(i))
            if (i < j) out.push_back({i, j});
    return out;
}

std::uint64_t fingerprint(const Graph& g, std::uint64_t h) {
    auto feed = [&h](std::uint64_t x) {
        for (int b = 0; b < 8; ++b) {
            h ^= (x >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(g.node_count());
    for (const Edge& e : g.edges()) {
        feed(e.u);
        feed(e.v);
    }
    return h;
}

}  // namespace ltm
