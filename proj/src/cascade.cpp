#include "ltm/cascade.hpp"

#include <algorithm>
#include <string>

#include "ltm/errors.hpp"

namespace ltm {

CascadeState::CascadeState(const Graph& g, std::vector<int> resistance)
    : graph_(&g),
      initial_(std::move(resistance)),
      active_(g.node_count(), 0),
      residual_(initial_),
      live_degree_(g.node_count()) {
    if (initial_.size() != g.node_count()) throw ParameterError("resistance vector size does not match node count");
    for (NodeId i = 0; i < g.node_count(); ++i) {
        if (initial_[i] < 0) throw ParameterError("negative resistance at node " + std::to_string(i));
        live_degree_[i] = static_cast<int>(g.degree(i));
    }
    std::vector<NodeId> queue;
    for (NodeId i = 0; i < g.node_count(); ++i) {
        if (initial_[i] == 0) {
            active_[i] = 1;
            ++active_count_;
            queue.push_back(i);
        }
    }
    propagate(0, queue);
}

long long CascadeState::total_resistance() const noexcept {
    long long total = 0;
    for (std::size_t i = 0; i < residual_.size(); ++i)
        if (!active_[i]) total += residual_[i];
    return total;
}

std::vector<NodeId> CascadeState::seed(NodeId node) {
    std::vector<NodeId> activated;
    seed(node, activated);
    return activated;
}

std::size_t CascadeState::seed(NodeId node, std::vector<NodeId>& activated) {
    if (node >= node_count()) throw ParameterError("seed node out of range");
    if (active_[node]) throw UsageError("node " + std::to_string(node) + " is already active");
    const std::size_t head = activated.size();
    active_[node] = 1;
    residual_[node] = 0;
    ++active_count_;
    activated.push_back(node);
    propagate(head, activated);
    return activated.size() - head;
}

// Processes queue[head..] in FIFO order; newly activated nodes are appended.
void CascadeState::propagate(std::size_t head, std::vector<NodeId>& queue) {
    for (; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        for (NodeId j : graph_->neighbors(u)) {
            --live_degree_[j];
            if (active_[j]) continue;
            if (--residual_[j] <= 0) {
                active_[j] = 1;
                residual_[j] = 0;
                ++active_count_;
                queue.push_back(j);
            }
        }
    }
}

ScratchCascade::ScratchCascade(const CascadeState& base)
    : graph_(&base.graph()), base_(base.node_count()), cells_(base.node_count(), Cell{0, 0}) {
    for (NodeId i = 0; i < base.node_count(); ++i) base_[i] = base.is_active(i) ? kActiveMark : base.residual(i);
}

void ScratchCascade::reset() noexcept {
    if (++epoch_ == 0) {
        for (Cell& c : cells_) c.stamp = 0;
        epoch_ = 1;
    }
}

std::size_t ScratchCascade::seed(NodeId node, int max_depth, std::vector<NodeId>* out) {
    int& own = cell(node);
    if (own == kActiveMark) throw UsageError("node " + std::to_string(node) + " is already active");
    own = kActiveMark;
    if (out) out->push_back(node);
    std::size_t count = 1;

    queue_.clear();
    queue_.emplace_back(node, 0);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        const auto [u, depth] = queue_[head];
        if (depth >= max_depth) continue;
        for (NodeId j : graph_->neighbors(u)) {
            int& r = cell(j);
            if (r == kActiveMark) continue;
            if (--r <= 0) {
                r = kActiveMark;
                ++count;
                if (out) out->push_back(j);
                queue_.emplace_back(j, depth + 1);
            }
        }
    }
    return count;
}

std::size_t bounded_spread(const CascadeState& state, NodeId node, int max_hops) {
    if (max_hops < 0) throw ParameterError("bounded_spread: L must be >= 0");
    if (node >= state.node_count()) throw ParameterError("node out of range");
    ScratchCascade scratch(state);
    return scratch.seed(node, max_hops);
}

std::size_t cascade_size(const Graph& g, const std::vector<int>& resistance, std::span<const NodeId> seeds) {
    std::vector<NodeId> sorted(seeds.begin(), seeds.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ParameterError("cascade_size: seeds must be distinct");
    CascadeState state(g, resistance);
    for (NodeId s : seeds)
        if (!state.is_active(s)) state.seed(s);
    return state.active_count();
}

}  // namespace ltm
