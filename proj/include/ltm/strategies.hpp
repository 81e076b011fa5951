#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltm/cascade.hpp"
#include "ltm/graph.hpp"

namespace ltm {

/// A graph together with its node thresholds and the derived resistances.
struct Instance {
    const Graph* graph = nullptr;
    std::vector<double> phi;
    std::vector<int> resistance;

    /// Computes resistances from phi; the graph must outlive the instance.
    static Instance make(const Graph& g, std::vector<double> phi);
    std::size_t node_count() const noexcept { return graph->node_count(); }
};

/// Weights of the balanced index a*r + b*k_out + c*sum_{j subcritical}(k_out_j - 1).
struct BIWeights {
    double a = 1.0 / 3.0;
    double b = 1.0 / 3.0;
    double c = 1.0 / 3.0;

    /// Throws ParameterError unless a, b, c >= 0 and a + b + c = 1 (within 1e-9).
    static BIWeights make(double a, double b, double c);
};

enum class StrategyKind { thres, deg, res, dd, id, bi, citm, greedy, random };

struct StrategySpec {
    StrategyKind kind = StrategyKind::id;
    BIWeights weights{};  // bi only
    int sphere = 6;       // citm only, L >= 1

    static StrategySpec make(StrategyKind kind) { return StrategySpec{kind, {}, 6}; }
    static StrategySpec bi(double a, double b, double c) { return {StrategyKind::bi, BIWeights::make(a, b, c), 6}; }
    static StrategySpec citm(int sphere);

    /// Parses "thres", "deg", "res", "dd", "id", "greedy", "random",
    /// "citm" / "citm(L)" and "bi(a,b,c)".
    static StrategySpec parse(std::string_view text);
    /// Inverse of parse; stable, used as the CSV label.
    std::string label() const;
};

/// When to stop adding seeds: once the active fraction reaches `fraction`
/// (goal) or once floor(fraction * N) seeds have been placed (budget).
struct StopRule {
    enum class Kind { goal, budget };
    Kind kind = Kind::goal;
    double fraction = 0.5;

    static StopRule goal(double s) { return {Kind::goal, s}; }
    static StopRule budget(double p) { return {Kind::budget, p}; }
    void validate() const;
    std::size_t goal_count(std::size_t n) const;
    std::size_t budget_count(std::size_t n) const;
};

struct CurvePoint {
    double p;  // seeds so far / N
    double S;  // active fraction
};

struct SelectionTrajectory {
    std::vector<NodeId> seeds;
    /// Starts with the (0, S0) point, then one point per seed (per batch for GPI).
    std::vector<CurvePoint> curve;
    /// Smallest p with S >= goal, when a goal rule was used and reached.
    std::optional<double> p_c;
};

/// Smallest p on the curve whose S reaches `target`.
std::optional<double> first_p_reaching(const SelectionTrajectory& t, double target);
/// S at the largest curve point with p <= `p` (+1e-12).
double coverage_at(const SelectionTrajectory& t, double p);

struct SelectOptions {
    std::uint64_t rng_seed = 0;  // random strategy only
    unsigned workers = 1;        // greedy candidate evaluation
    bool greedy_prune = false;   // skip candidates whose inactive component cannot beat the best
};

/// Score of an inactive node under `spec`, evaluated on the current state.
/// Throws UsageError for an active node or for the random strategy.
double metric_value(const CascadeState& state, NodeId node, const StrategySpec& spec, std::span<const double> phi);

/// Collective-influence score on the inactive subgraph: live_degree(i) plus
/// (live_degree(j) - 1) for every inactive j != i reached from i through a
/// chain of subcritical (residual 1) nodes of length <= L.
double metric_citm(const CascadeState& state, NodeId node, int sphere);

/// Keeps the metric of every inactive node current across seedings and
/// serves the argmax (ties -> lowest id) from a max-heap with lazy deletion.
/// Only nodes whose metric inputs can change are rescored after a seeding.
class MetricTracker {
public:
    MetricTracker(const CascadeState& state, const StrategySpec& spec, std::span<const double> phi);

    /// Highest-scoring inactive node, or nullopt when every node is active.
    std::optional<NodeId> best();
    /// Cached score (as last computed) of an inactive node.
    double value(NodeId i) const noexcept { return value_[i]; }
    /// Rescore after `activated` became active on the tracked state.
    void update(std::span<const NodeId> activated);

private:
    struct Entry {
        std::int64_t key;
        NodeId node;
        std::uint32_t version;
        bool operator<(const Entry& o) const noexcept { return key != o.key ? key < o.key : node > o.node; }
    };

    void rescore(NodeId i);
    int dirty_radius() const noexcept;

    const CascadeState* state_;
    StrategySpec spec_;
    std::span<const double> phi_;
    std::vector<double> value_;
    std::vector<std::uint32_t> version_;
    std::priority_queue<Entry> heap_;
    std::vector<std::uint32_t> seen_;
    std::uint32_t seen_epoch_ = 0;
};

/// Metric values are compared on a 2^-30 grid so that algebraically equal
/// scores computed along different floating-point paths tie exactly.
std::int64_t metric_key(double value) noexcept;

/// Inactive node with the largest what-if cascade gain (ties -> lowest id).
/// Throws UsageError when no inactive node remains.
NodeId greedy_step(const CascadeState& state, unsigned workers = 1, bool prune = false);
/// Gain reported alongside the chosen node.
std::pair<NodeId, std::size_t> greedy_best(const CascadeState& state, unsigned workers = 1, bool prune = false);

/// Sequential one-at-a-time seeding on the inactive subgraph.
SelectionTrajectory select_seeds(const Instance& inst, const StrategySpec& spec, const StopRule& stop,
                                 const SelectOptions& options = {});

}  // namespace ltm
