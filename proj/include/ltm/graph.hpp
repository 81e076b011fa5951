#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ltm {

using NodeId = std::uint32_t;

struct Edge {
    NodeId u;
    NodeId v;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph in compressed adjacency form.
/// Neighbor lists are sorted; the structure is safe to share read-only
/// across threads.
class Graph {
public:
    Graph() = default;

    /// Builds from an undirected edge list (each edge once, any orientation).
    /// Throws ParameterError on out-of-range ids, self-loops or duplicates.
    static Graph from_edges(std::size_t node_count, std::span<const Edge> edges);

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId i) const noexcept {
        return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
    }
    std::size_t degree(NodeId i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
    bool has_edge(NodeId a, NodeId b) const noexcept;

    std::vector<std::size_t> degrees() const;
    /// Edges with u < v, sorted lexicographically.
    std::vector<Edge> edges() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> neighbors_;
};

/// FNV-1a over the canonical edge list; used to tag experiment rows.
std::uint64_t fingerprint(const Graph& g, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ltm
