#include "ltm/gpi.hpp"

#include <algorithm>
#include <cmath>

#include "ltm/errors.hpp"
#include "ltm/parallel.hpp"
#include "ltm/rng.hpp"

namespace ltm {

GpiMode parse_gpi_mode(std::string_view text) {
    if (text == "alg_literal") return GpiMode::alg_literal;
    if (text == "per_simulation") return GpiMode::per_simulation;
    if (text == "seeds_only") return GpiMode::seeds_only;
    throw ParameterError("unknown GPI mode '" + std::string(text) + "'");
}

std::string to_string(GpiMode mode) {
    switch (mode) {
    case GpiMode::alg_literal: return "alg_literal";
    case GpiMode::per_simulation: return "per_simulation";
    case GpiMode::seeds_only: return "seeds_only";
    }
    return "?";
}

void GpiParams::validate(std::size_t n) const {
    if (!(s > 0.0 && s <= 1.0)) throw ParameterError("GPI s must lie in (0, 1]");
    if (v == 0) throw ParameterError("GPI v must be positive");
    if (!(s_goal > 0.0 && s_goal <= 1.0)) throw ParameterError("GPI S_goal must lie in (0, 1]");
    if (sphere < 0) throw ParameterError("GPI sphere must be >= 0");
    if (budget_fraction && !(*budget_fraction >= 0.0 && *budget_fraction <= 1.0))
        throw ParameterError("GPI budget must lie in [0, 1]");
    if (batch_size(n) < 1) throw ParameterError("GPI batch size ceil(sN) must be >= 1");
}

std::size_t GpiParams::batch_size(std::size_t n) const {
    return static_cast<std::size_t>(std::ceil(s * static_cast<double>(n) - 1e-9));
}

bool GpiAccumulators::better(NodeId a, NodeId b) const noexcept {
    const bool ra = de[a] > 0;
    const bool rb = de[b] > 0;
    if (ra != rb) return ra;
    if (ra) {
        // nu_a/de_a vs nu_b/de_b without rounding.
        const auto lhs = static_cast<unsigned __int128>(nu[a]) * de[b];
        const auto rhs = static_cast<unsigned __int128>(nu[b]) * de[a];
        if (lhs != rhs) return lhs < rhs;
    }
    return a < b;
}

namespace {

struct SimulationBuffers {
    std::vector<NodeId> members;       // test set in join order
    std::vector<std::uint32_t> joined; // seed index at which each member joined (1-based)
    std::vector<std::uint64_t> csum;   // csum[t] = sum of test-set sizes after seeds 1..t
};

void run_simulation(const std::vector<NodeId>& pool, std::size_t need,
                    const GpiParams& params, std::uint64_t seed, ScratchCascade& scratch, SimulationBuffers& buf,
                    std::vector<std::uint64_t>& nu, std::vector<std::uint64_t>& de) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> draw(0, pool.size() - 1);
    scratch.reset();
    buf.members.clear();
    buf.joined.clear();
    buf.csum.assign(1, 0);

    const bool seeds_only = params.mode == GpiMode::seeds_only;
    std::size_t gained = 0;
    std::uint32_t t = 0;
    while (gained < need) {
        NodeId pick;
        do {
            pick = pool[draw(rng)];
        } while (scratch.is_active(pick));
        ++t;
        if (seeds_only) {
            gained += scratch.seed(pick, params.sphere, nullptr);
            buf.members.push_back(pick);
        } else {
            const std::size_t before = buf.members.size();
            gained += scratch.seed(pick, params.sphere, &buf.members);
            buf.joined.insert(buf.joined.end(), buf.members.size() - before, t);
            buf.csum.push_back(buf.csum.back() + buf.members.size());
        }
    }

    const std::uint64_t size = buf.members.size();
    switch (params.mode) {
    case GpiMode::alg_literal:
        // A member that joined at seed t_i is counted after seeds t_i..T.
        for (std::size_t m = 0; m < buf.members.size(); ++m) {
            const NodeId i = buf.members[m];
            const std::uint32_t ti = buf.joined[m];
            de[i] += t - ti + 1;
            nu[i] += buf.csum[t] - buf.csum[ti - 1];
        }
        break;
    case GpiMode::per_simulation:
    case GpiMode::seeds_only:
        for (NodeId i : buf.members) {
            de[i] += 1;
            nu[i] += size;
        }
        break;
    }
}

}  // namespace

GpiAccumulators gpi_score_step(const CascadeState& state, const GpiParams& params, std::uint64_t rng_seed) {
    const std::size_t n = state.node_count();
    params.validate(n);
    const std::size_t target = StopRule::goal(params.s_goal).goal_count(n);
    if (state.active_count() >= target) throw UsageError("gpi_score_step: cascade goal already met");
    const std::size_t need = target - state.active_count();

    std::vector<NodeId> pool;
    pool.reserve(n - state.active_count());
    for (NodeId i = 0; i < n; ++i)
        if (!state.is_active(i)) pool.push_back(i);

    const unsigned workers = std::max(1U, params.workers);
    std::vector<GpiAccumulators> partial(workers);
    parallel_chunks(params.v, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        auto& acc = partial[w];
        acc.nu.assign(n, 0);
        acc.de.assign(n, 0);
        ScratchCascade scratch(state);
        SimulationBuffers buf;
        for (std::size_t j = begin; j < end; ++j)
            run_simulation(pool, need, params, derive_seed(rng_seed, {tag(Stream::gpi_simulation), j}),
                           scratch, buf, acc.nu, acc.de);
    });

    GpiAccumulators total;
    total.nu.assign(n, 0);
    total.de.assign(n, 0);
    for (const auto& acc : partial) {
        if (acc.nu.empty()) continue;
        for (std::size_t i = 0; i < n; ++i) {
            total.nu[i] += acc.nu[i];
            total.de[i] += acc.de[i];
        }
    }
    return total;
}

std::vector<NodeId> gpi_rank(const CascadeState& state, const GpiAccumulators& acc, std::size_t limit) {
    std::vector<NodeId> order;
    for (NodeId i = 0; i < state.node_count(); ++i)
        if (!state.is_active(i)) order.push_back(i);
    limit = std::min(limit, order.size());
    auto cmp = [&acc](NodeId a, NodeId b) { return acc.better(a, b); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(limit), order.end(), cmp);
    order.resize(limit);
    return order;
}

SelectionTrajectory gpi_select(const Instance& inst, const GpiParams& params, std::uint64_t rng_seed) {
    const Graph& g = *inst.graph;
    const std::size_t n = g.node_count();
    params.validate(n);
    CascadeState state(g, inst.resistance);

    SelectionTrajectory traj;
    traj.curve.push_back({0.0, state.active_fraction()});
    const std::size_t goal = StopRule::goal(params.s_goal).goal_count(n);
    const std::size_t budget = params.budget_fraction ? StopRule::budget(*params.budget_fraction).budget_count(n) : n;
    const std::size_t batch = params.batch_size(n);

    for (std::uint64_t step = 0; state.active_count() < goal && traj.seeds.size() < budget; ++step) {
        const auto acc = gpi_score_step(state, params, derive_seed(rng_seed, {tag(Stream::gpi_step), step}));
        const auto q = gpi_rank(state, acc, std::min(batch, budget - traj.seeds.size()));
        for (NodeId node : q) {
            if (state.is_active(node)) continue;
            state.seed(node);
            traj.seeds.push_back(node);
        }
        traj.curve.push_back({static_cast<double>(traj.seeds.size()) / static_cast<double>(n), state.active_fraction()});
    }
    if (state.active_count() >= goal) traj.p_c = static_cast<double>(traj.seeds.size()) / static_cast<double>(n);
    return traj;
}

}  // namespace ltm
