#include "ltm/strategies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "ltm/errors.hpp"
#include "ltm/parallel.hpp"
#include "ltm/rng.hpp"
#include "ltm/thresholds.hpp"

namespace ltm {

Instance Instance::make(const Graph& g, std::vector<double> phi) {
    Instance inst;
    inst.graph = &g;
    inst.resistance = resistances(g, phi);
    inst.phi = std::move(phi);
    return inst;
}

BIWeights BIWeights::make(double a, double b, double c) {
    if (!(a >= 0.0 && b >= 0.0 && c >= 0.0)) throw ParameterError("BI weights must be non-negative");
    if (std::abs(a + b + c - 1.0) > 1e-9) throw ParameterError("BI weights must sum to 1");
    return {a, b, c};
}

StrategySpec StrategySpec::citm(int sphere) {
    if (sphere < 1) throw ParameterError("CI-TM sphere L must be >= 1");
    return {StrategyKind::citm, {}, sphere};
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Accepts decimals and simple fractions such as "1/3".
double parse_weight(std::string_view text) {
    text = trim(text);
    auto number = [&](std::string_view t) {
        t = trim(t);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size())
            throw ParameterError("bad number '" + std::string(t) + "'");
        return v;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const double den = number(text.substr(slash + 1));
        if (den == 0.0) throw ParameterError("zero denominator in weight");
        return number(text.substr(0, slash)) / den;
    }
    return number(text);
}

std::vector<std::string_view> split_args(std::string_view inner) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
        if (i == inner.size() || inner[i] == ',') {
            parts.push_back(inner.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

std::string shortest(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

}  // namespace

StrategySpec StrategySpec::parse(std::string_view text) {
    text = trim(text);
    std::string_view name = text;
    std::string_view args;
    bool has_args = false;
    if (auto open = text.find('('); open != std::string_view::npos) {
        if (text.back() != ')') throw ParameterError("unbalanced parentheses in strategy '" + std::string(text) + "'");
        name = trim(text.substr(0, open));
        args = text.substr(open + 1, text.size() - open - 2);
        has_args = true;
    }
    auto no_args = [&](StrategyKind k) {
        if (has_args) throw ParameterError("strategy '" + std::string(name) + "' takes no parameters");
        return make(k);
    };
    if (name == "thres") return no_args(StrategyKind::thres);
    if (name == "deg") return no_args(StrategyKind::deg);
    if (name == "res") return no_args(StrategyKind::res);
    if (name == "dd") return no_args(StrategyKind::dd);
    if (name == "id") return no_args(StrategyKind::id);
    if (name == "greedy") return no_args(StrategyKind::greedy);
    if (name == "random") return no_args(StrategyKind::random);
    if (name == "citm") {
        if (!has_args) return citm(6);
        const double l = parse_weight(args);
        if (l != std::floor(l)) throw ParameterError("CI-TM sphere must be an integer");
        return citm(static_cast<int>(l));
    }
    if (name == "bi") {
        if (!has_args) throw ParameterError("bi needs weights: bi(a,b,c)");
        auto parts = split_args(args);
        if (parts.size() != 3) throw ParameterError("bi needs exactly three weights");
        return bi(parse_weight(parts[0]), parse_weight(parts[1]), parse_weight(parts[2]));
    }
    throw ParameterError("unknown strategy '" + std::string(text) + "'");
}

std::string StrategySpec::label() const {
    switch (kind) {
    case StrategyKind::thres: return "thres";
    case StrategyKind::deg: return "deg";
    case StrategyKind::res: return "res";
    case StrategyKind::dd: return "dd";
    case StrategyKind::id: return "id";
    case StrategyKind::greedy: return "greedy";
    case StrategyKind::random: return "random";
    case StrategyKind::citm: return "citm(" + std::to_string(sphere) + ")";
    case StrategyKind::bi:
        return "bi(" + shortest(weights.a) + "," + shortest(weights.b) + "," + shortest(weights.c) + ")";
    }
    return "?";
}

void StopRule::validate() const {
    if (kind == Kind::goal && !(fraction > 0.0 && fraction <= 1.0))
        throw ParameterError("goal fraction must lie in (0, 1]");
    if (kind == Kind::budget && !(fraction >= 0.0 && fraction <= 1.0))
        throw ParameterError("budget fraction must lie in [0, 1]");
}

std::size_t StopRule::goal_count(std::size_t n) const {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

std::size_t StopRule::budget_count(std::size_t n) const {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

std::optional<double> first_p_reaching(const SelectionTrajectory& t, double target) {
    for (const auto& pt : t.curve)
        if (pt.S >= target - 1e-12) return pt.p;
    return std::nullopt;
}

double coverage_at(const SelectionTrajectory& t, double p) {
    double s = t.curve.empty() ? 0.0 : t.curve.front().S;
    for (const auto& pt : t.curve) {
        if (pt.p > p + 1e-12) break;
        s = pt.S;
    }
    return s;
}

std::int64_t metric_key(double value) noexcept { return std::llround(std::ldexp(value, 30)); }

namespace {

// Sum over inactive subcritical neighbors j of (live_degree(j) - 1).
double subcritical_term(const CascadeState& state, NodeId i) {
    double sum = 0.0;
    for (NodeId j : state.graph().neighbors(i))
        if (!state.is_active(j) && state.residual(j) == 1) sum += state.live_degree(j) - 1;
    return sum;
}

// BFS workspace for the CI-TM metric; epoch stamps avoid O(N) clears.
class CitmWorkspace {
public:
    explicit CitmWorkspace(std::size_t n) : stamp_(n, 0) {}

    void ensure(std::size_t n) {
        if (stamp_.size() != n) {
            stamp_.assign(n, 0);
            epoch_ = 0;
        }
    }

    double score(const CascadeState& state, NodeId i, int sphere) {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
        const Graph& g = state.graph();
        double total = state.live_degree(i);
        stamp_[i] = epoch_;
        frontier_.clear();
        frontier_.emplace_back(i, 0);
        for (std::size_t head = 0; head < frontier_.size(); ++head) {
            const auto [u, depth] = frontier_[head];
            if (depth >= sphere) continue;
            for (NodeId j : g.neighbors(u)) {
                if (stamp_[j] == epoch_ || state.is_active(j) || state.residual(j) != 1) continue;
                stamp_[j] = epoch_;
                total += state.live_degree(j) - 1;
                frontier_.emplace_back(j, depth + 1);
            }
        }
        return total;
    }

private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<std::pair<NodeId, int>> frontier_;
};

CitmWorkspace& citm_workspace(std::size_t n) {
    thread_local CitmWorkspace ws(0);
    ws.ensure(n);
    return ws;
}

}  // namespace

double metric_citm(const CascadeState& state, NodeId node, int sphere) {
    if (node >= state.node_count()) throw ParameterError("node out of range");
    if (state.is_active(node)) throw UsageError("metric of an active node");
    if (sphere < 1) throw ParameterError("CI-TM sphere L must be >= 1");
    return citm_workspace(state.node_count()).score(state, node, sphere);
}

double metric_value(const CascadeState& state, NodeId node, const StrategySpec& spec, std::span<const double> phi) {
    if (node >= state.node_count()) throw ParameterError("node out of range");
    if (state.is_active(node)) throw UsageError("metric of an active node");
    const double r = state.residual(node);
    const double k = state.live_degree(node);
    switch (spec.kind) {
    case StrategyKind::thres:
        if (phi.size() != state.node_count()) throw ParameterError("thres needs the threshold vector");
        return phi[node];
    case StrategyKind::deg: return k;
    case StrategyKind::res: return r;
    case StrategyKind::dd: return r + k;
    case StrategyKind::id: return r + k + subcritical_term(state, node);
    case StrategyKind::bi: {
        const auto& w = spec.weights;
        return w.a * r + w.b * k + (w.c != 0.0 ? w.c * subcritical_term(state, node) : 0.0);
    }
    case StrategyKind::citm: return metric_citm(state, node, spec.sphere);
    case StrategyKind::greedy: return static_cast<double>(bounded_spread(state, node, kUnbounded));
    case StrategyKind::random: throw UsageError("the random strategy has no metric");
    }
    return 0.0;
}

MetricTracker::MetricTracker(const CascadeState& state, const StrategySpec& spec, std::span<const double> phi)
    : state_(&state),
      spec_(spec),
      phi_(phi),
      value_(state.node_count(), 0.0),
      version_(state.node_count(), 0),
      seen_(state.node_count(), 0) {
    if (spec.kind == StrategyKind::greedy || spec.kind == StrategyKind::random)
        throw UsageError("MetricTracker serves metric strategies only");
    for (NodeId i = 0; i < state.node_count(); ++i)
        if (!state.is_active(i)) rescore(i);
}

int MetricTracker::dirty_radius() const noexcept {
    switch (spec_.kind) {
    case StrategyKind::thres: return 0;
    case StrategyKind::deg:
    case StrategyKind::res:
    case StrategyKind::dd: return 1;
    case StrategyKind::id: return 2;
    case StrategyKind::bi: return spec_.weights.c != 0.0 ? 2 : 1;
    case StrategyKind::citm: return spec_.sphere + 1;
    default: return 0;
    }
}

void MetricTracker::rescore(NodeId i) {
    value_[i] = metric_value(*state_, i, spec_, phi_);
    heap_.push({metric_key(value_[i]), i, ++version_[i]});
}

std::optional<NodeId> MetricTracker::best() {
    while (!heap_.empty()) {
        const Entry& top = heap_.top();
        if (!state_->is_active(top.node) && top.version == version_[top.node]) return top.node;
        heap_.pop();
    }
    return std::nullopt;
}

void MetricTracker::update(std::span<const NodeId> activated) {
    const int radius = dirty_radius();
    if (radius == 0 || activated.empty()) return;
    const Graph& g = state_->graph();

    // Beyond two hops the dirty ball of a sparse graph is most of the graph.
    if (radius > 2) {
        for (NodeId i = 0; i < state_->node_count(); ++i)
            if (!state_->is_active(i)) rescore(i);
        return;
    }
    if (++seen_epoch_ == 0) {
        std::fill(seen_.begin(), seen_.end(), 0);
        seen_epoch_ = 1;
    }
    std::vector<NodeId> frontier(activated.begin(), activated.end());
    for (NodeId a : frontier) seen_[a] = seen_epoch_;
    std::vector<NodeId> next;
    for (int level = 0; level < radius; ++level) {
        next.clear();
        for (NodeId u : frontier) {
            for (NodeId j : g.neighbors(u)) {
                if (seen_[j] == seen_epoch_) continue;
                seen_[j] = seen_epoch_;
                next.push_back(j);
                if (!state_->is_active(j)) rescore(j);
            }
        }
        frontier.swap(next);
    }
}

std::pair<NodeId, std::size_t> greedy_best(const CascadeState& state, unsigned workers, bool prune) {
    std::vector<NodeId> candidates;
    for (NodeId i = 0; i < state.node_count(); ++i)
        if (!state.is_active(i)) candidates.push_back(i);
    if (candidates.empty()) throw UsageError("greedy_step: no inactive node left");

    // Upper bound for pruning: size of the inactive component holding the node.
    std::vector<std::size_t> bound;
    if (prune) {
        const Graph& g = state.graph();
        bound.assign(state.node_count(), 0);
        std::vector<NodeId> comp;
        std::vector<std::uint8_t> done(state.node_count(), 0);
        for (NodeId s : candidates) {
            if (done[s]) continue;
            comp.assign(1, s);
            done[s] = 1;
            for (std::size_t h = 0; h < comp.size(); ++h)
                for (NodeId j : g.neighbors(comp[h]))
                    if (!done[j] && !state.is_active(j)) {
                        done[j] = 1;
                        comp.push_back(j);
                    }
            for (NodeId c : comp) bound[c] = comp.size();
        }
    }

    struct Best {
        std::size_t gain = 0;
        NodeId node = 0;
        bool set = false;
    };
    std::vector<Best> local(std::max(1U, workers));
    parallel_chunks(candidates.size(), workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        ScratchCascade scratch(state);
        Best b;
        for (std::size_t idx = begin; idx < end; ++idx) {
            const NodeId c = candidates[idx];
            if (prune && b.set && bound[c] <= b.gain) continue;
            scratch.reset();
            const std::size_t gain = scratch.seed(c);
            if (!b.set || gain > b.gain) b = {gain, c, true};
        }
        local[w] = b;
    });
    Best best;
    for (const Best& b : local) {
        if (!b.set) continue;
        if (!best.set || b.gain > best.gain || (b.gain == best.gain && b.node < best.node)) best = b;
    }
    return {best.node, best.gain};
}

NodeId greedy_step(const CascadeState& state, unsigned workers, bool prune) {
    return greedy_best(state, workers, prune).first;
}

SelectionTrajectory select_seeds(const Instance& inst, const StrategySpec& spec, const StopRule& stop,
                                 const SelectOptions& options) {
    stop.validate();
    const Graph& g = *inst.graph;
    const std::size_t n = g.node_count();
    CascadeState state(g, inst.resistance);

    SelectionTrajectory traj;
    traj.curve.push_back({0.0, state.active_fraction()});
    const std::size_t goal = stop.kind == StopRule::Kind::goal ? stop.goal_count(n) : n + 1;
    const std::size_t budget = stop.kind == StopRule::Kind::budget ? stop.budget_count(n) : n;

    std::optional<MetricTracker> tracker;
    if (spec.kind != StrategyKind::greedy && spec.kind != StrategyKind::random)
        tracker.emplace(state, spec, inst.phi);
    Rng rng(options.rng_seed);
    std::uniform_int_distribution<NodeId> any_node(0, static_cast<NodeId>(n - 1));

    std::vector<NodeId> activated;
    while (state.active_count() < goal && traj.seeds.size() < budget && state.active_count() < n) {
        NodeId pick = 0;
        switch (spec.kind) {
        case StrategyKind::greedy: pick = greedy_step(state, options.workers, options.greedy_prune); break;
        case StrategyKind::random:
            do {
                pick = any_node(rng);
            } while (state.is_active(pick));
            break;
        default: pick = *tracker->best(); break;
        }
        activated.clear();
        state.seed(pick, activated);
        traj.seeds.push_back(pick);
        traj.curve.push_back({static_cast<double>(traj.seeds.size()) / static_cast<double>(n), state.active_fraction()});
        if (tracker) tracker->update(activated);
    }
    if (stop.kind == StopRule::Kind::goal) traj.p_c = first_p_reaching(traj, stop.fraction);
    return traj;
}

}  // namespace ltm
