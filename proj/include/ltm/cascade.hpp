#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ltm/graph.hpp"

namespace ltm {

/// Deterministic linear-threshold spread on a fixed graph.
///
/// Each node carries an integer residual resistance: the number of further
/// active neighbors it needs. An activation decrements the residual of every
/// inactive neighbor; a node whose residual reaches zero or below activates.
/// Activation is permanent. Propagation uses a FIFO queue; the fixpoint does
/// not depend on the order.
///
/// The state refers to the graph it was built from; the graph must outlive it.
class CascadeState {
public:
    /// Nodes with zero initial resistance activate immediately and their
    /// spread is run to the fixpoint.
    CascadeState(const Graph& g, std::vector<int> resistance);

    const Graph& graph() const noexcept { return *graph_; }
    std::size_t node_count() const noexcept { return active_.size(); }

    bool is_active(NodeId i) const noexcept { return active_[i] != 0; }
    int residual(NodeId i) const noexcept { return residual_[i]; }
    /// Number of currently inactive neighbors (dynamic out-degree).
    int live_degree(NodeId i) const noexcept { return live_degree_[i]; }
    std::size_t active_count() const noexcept { return active_count_; }
    double active_fraction() const noexcept {
        return static_cast<double>(active_count_) / static_cast<double>(node_count());
    }
    std::span<const std::uint8_t> active() const noexcept { return active_; }
    std::span<const int> residuals() const noexcept { return residual_; }
    std::span<const int> initial_resistance() const noexcept { return initial_; }

    /// Sum of residuals over inactive nodes.
    long long total_resistance() const noexcept;

    /// Forces `node` active and spreads. Returns every node activated by the
    /// call, the seed first. Throws UsageError if `node` is already active.
    std::vector<NodeId> seed(NodeId node);
    /// Same, appending to `activated`; returns the number appended.
    std::size_t seed(NodeId node, std::vector<NodeId>& activated);

private:
    void propagate(std::size_t head, std::vector<NodeId>& queue);

    const Graph* graph_;
    std::vector<int> initial_;
    std::vector<std::uint8_t> active_;
    std::vector<int> residual_;
    std::vector<int> live_degree_;
    std::size_t active_count_ = 0;
};

inline constexpr int kUnbounded = std::numeric_limits<int>::max();

/// What-if spread evaluation on top of a CascadeState without mutating it.
///
/// Residual and activation overrides are epoch-stamped, so reset() is O(1)
/// and several seeds can be stacked within one epoch. Each worker thread needs
/// its own instance; the base state must not change while one is in use.
class ScratchCascade {
public:
    explicit ScratchCascade(const CascadeState& base);

    /// Drops every override; the scratch view equals the base state again.
    void reset() noexcept;

    bool is_active(NodeId i) const noexcept { return current(i) == kActiveMark; }
    int residual(NodeId i) const noexcept {
        const int r = current(i);
        return r == kActiveMark ? 0 : r;
    }

    /// Seeds an inactive node in the scratch view and spreads. Nodes reached
    /// at `max_depth` hops from the seed (along the activation front) may
    /// activate but do not propagate further. Returns the number activated,
    /// seed included; appends them to `out` when given.
    std::size_t seed(NodeId node, int max_depth = kUnbounded, std::vector<NodeId>* out = nullptr);

private:
    static constexpr int kActiveMark = std::numeric_limits<int>::min();

    struct Cell {
        std::uint32_t stamp;
        int residual;  // kActiveMark once active
    };

    int current(NodeId i) const noexcept { return cells_[i].stamp == epoch_ ? cells_[i].residual : base_[i]; }
    int& cell(NodeId i) noexcept {
        Cell& c = cells_[i];
        if (c.stamp != epoch_) {
            c.stamp = epoch_;
            c.residual = base_[i];
        }
        return c.residual;
    }

    const Graph* graph_;
    std::vector<int> base_;  // snapshot of the base state, kActiveMark for active nodes
    std::uint32_t epoch_ = 1;
    std::vector<Cell> cells_;
    std::vector<std::pair<NodeId, int>> queue_;
};

/// Number of nodes activated when `node` is seeded on `state`, propagating at
/// most `max_hops` levels away from it. The state is not modified.
std::size_t bounded_spread(const CascadeState& state, NodeId node, int max_hops);

/// f(X): active count at the fixpoint reached from the initial state after
/// seeding every not-yet-active member of `seeds`.
std::size_t cascade_size(const Graph& g, const std::vector<int>& resistance, std::span<const NodeId> seeds);

}  // namespace ltm
