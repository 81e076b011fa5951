#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ltm/graph.hpp"
#include "ltm/rng.hpp"

namespace ltm {

/// G(n, p) with p = avg_degree / (n - 1).
Graph generate_er(std::size_t n, double avg_degree, std::uint64_t rng_seed);

/// Spearman rank correlation of endpoint degrees over the 2|E| ordered edge
/// incidences (ties get averaged ranks). Zero when all degrees are equal.
/// Throws UndefinedInputError on an edgeless graph.
double spearman_assortativity(const Graph& g);

struct AssortativityReport {
    double rho = 0.0;
    std::size_t swap_count = 0;  // accepted swaps
    std::size_t proposals = 0;
    bool converged = false;
};

struct TuneOptions {
    double tol = 0.01;
    /// Proposal budget; defaults to 100 * |E|.
    std::optional<std::size_t> max_swaps;
    /// Metropolis temperature on |rho - target|; 0 is a strict hill climb.
    double temperature = 0.0;
};

/// Degree-preserving double-edge-swap rewiring that drives the Spearman
/// assortativity towards a target. The degree ranks never change, so only
/// the cross-product sum of endpoint ranks is tracked.
class AssortativityRewirer {
public:
    AssortativityRewirer(const Graph& g, std::uint64_t rng_seed);

    double rho() const noexcept;
    /// Proposes one swap (a,b),(c,d) -> (a,d),(c,b) and accepts it if it moves
    /// rho closer to target (or per the Metropolis rule when temperature > 0).
    bool step(double rho_target, double temperature = 0.0);

    Graph graph() const;
    std::size_t accepted() const noexcept { return accepted_; }

private:
    static std::uint64_t key(NodeId a, NodeId b) noexcept;

    std::size_t n_;
    std::vector<Edge> edges_;
    std::unordered_set<std::uint64_t> present_;
    std::vector<double> rank_;  // tie-averaged incidence rank by node
    double cross_ = 0.0;        // sum over undirected edges of rank(u)*rank(v)
    double incidences_ = 0.0;
    double mean_ = 0.0;
    double var_ = 0.0;
    std::size_t accepted_ = 0;
    Rng rng_;
};

std::pair<Graph, AssortativityReport> tune_assortativity(const Graph& g, double rho_target,
                                                         const TuneOptions& options, std::uint64_t rng_seed);

/// Edge-list text: one "u v" pair per line, 0-based, '#' starts a comment line.
void save_edge_list(const Graph& g, const std::filesystem::path& path);
/// Node count is max id + 1 unless given explicitly (for trailing isolated nodes).
Graph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> node_count = std::nullopt);

}  // namespace ltm
