#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltm/cascade.hpp"
#include "ltm/strategies.hpp"

namespace ltm {

/// How the per-node accumulators are fed by one random simulation.
enum class GpiMode {
    /// Test set holds random seeds and the nodes they activate; after every
    /// seed, each member gets de += 1 and nu += current test-set size.
    alg_literal,
    /// Same test set, but one update per simulation with its final size.
    per_simulation,
    /// Test set holds only the random seeds; one update per simulation.
    seeds_only,
};

GpiMode parse_gpi_mode(std::string_view text);
std::string to_string(GpiMode mode);

struct GpiParams {
    double s = 1e-3;          // batch granularity: ceil(s*N) seeds per step
    std::size_t v = 100000;   // random simulations per step
    double s_goal = 0.5;      // target active fraction
    GpiMode mode = GpiMode::seeds_only;
    int sphere = kUnbounded;  // hop bound for spread inside simulations
    /// Stop once floor(budget * N) seeds are placed, even below s_goal.
    std::optional<double> budget_fraction;
    unsigned workers = 1;

    void validate(std::size_t n) const;
    std::size_t batch_size(std::size_t n) const;
};

/// Per-node sums over one step's simulations. score = nu / de; nodes with
/// de = 0 never took part and are unranked.
struct GpiAccumulators {
    std::vector<std::uint64_t> nu;
    std::vector<std::uint64_t> de;

    bool ranked(NodeId i) const noexcept { return de[i] > 0; }
    double score(NodeId i) const noexcept {
        return de[i] > 0 ? static_cast<double>(nu[i]) / static_cast<double>(de[i])
                         : std::numeric_limits<double>::infinity();
    }
    /// Exact ranking order: ranked before unranked, lower score first, then lower id.
    bool better(NodeId a, NodeId b) const noexcept;
};

/// Runs params.v random simulations on top of `state`. Each grows a random
/// test-initiator set one uniformly drawn inactive node at a time until the
/// additional active fraction reaches s_goal - S_y. Simulation j draws from
/// its own stream derived from (rng_seed, j), so the result does not depend
/// on params.workers. Throws UsageError when the goal is already met.
GpiAccumulators gpi_score_step(const CascadeState& state, const GpiParams& params, std::uint64_t rng_seed);

/// Inactive nodes of `state` in ranking order (best first).
std::vector<NodeId> gpi_rank(const CascadeState& state, const GpiAccumulators& acc, std::size_t limit);

/// Batch seeding driven by the group performance index. Per step, the top
/// ceil(sN) ranked nodes are seeded in rank order; members already activated
/// by an earlier member of the batch are skipped and not counted as seeds.
/// One curve point per batch; p_c = |Y|/N once S_goal is reached.
SelectionTrajectory gpi_select(const Instance& inst, const GpiParams& params, std::uint64_t rng_seed);

}  // namespace ltm
