#include "ltm/graphgen.hpp"

#include <cmath>
#include <string>

#include "ltm/errors.hpp"

namespace ltm {

Graph generate_er(std::size_t n, double avg_degree, std::uint64_t rng_seed) {
    if (n < 2) throw ParameterError("generate_er: n must be >= 2");
    if (!(avg_degree >= 0.0) || avg_degree > static_cast<double>(n - 1))
        throw ParameterError("generate_er: avg_degree must lie in [0, n-1]");

    const double p = avg_degree / static_cast<double>(n - 1);
    std::vector<Edge> edges;
    if (p > 0.0) {
        edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * static_cast<double>(n - 1) / 2.0 * 1.1) + 16);
        Rng rng(rng_seed);
        // Geometric skipping over the lower triangle (Batagelj-Brandes); each
        // pair is still an independent Bernoulli(p) trial.
        std::geometric_distribution<long long> skip(p);
        long long v = 1;
        long long w = -1;
        const auto nn = static_cast<long long>(n);
        while (v < nn) {
            w += 1 + (p < 1.0 ? skip(rng) : 0);
            while (w >= v && v < nn) {
                w -= v;
                ++v;
            }
            if (v < nn) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
        }
    }
    return Graph::from_edges(n, edges);
}

namespace {

// Tie-averaged rank of each degree value among the 2|E| incidences.
std::vector<double> incidence_ranks(const Graph& g) {
    std::size_t max_deg = 0;
    for (NodeId i = 0; i < g.node_count(); ++i) max_deg = std::max(max_deg, g.degree(i));
    std::vector<double> count(max_deg + 1, 0.0);
    for (NodeId i = 0; i < g.node_count(); ++i) count[g.degree(i)] += static_cast<double>(g.degree(i));
    std::vector<double> rank_of_degree(max_deg + 1, 0.0);
    double below = 0.0;
    for (std::size_t d = 0; d <= max_deg; ++d) {
        rank_of_degree[d] = below + (count[d] + 1.0) / 2.0;
        below += count[d];
    }
    std::vector<double> rank(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) rank[i] = rank_of_degree[g.degree(i)];
    return rank;
}

struct RankMoments {
    double mean;
    double var;
};

RankMoments moments(const Graph& g, const std::vector<double>& rank) {
    const double m = 2.0 * static_cast<double>(g.edge_count());
    double sum = 0.0;
    double sq = 0.0;
    for (NodeId i = 0; i < g.node_count(); ++i) {
        const double k = static_cast<double>(g.degree(i));
        sum += k * rank[i];
        sq += k * rank[i] * rank[i];
    }
    const double mean = sum / m;
    return {mean, sq / m - mean * mean};
}

double correlation(double cross_ordered, double incidences, RankMoments mom) {
    if (mom.var <= 0.0) return 0.0;
    return (cross_ordered / incidences - mom.mean * mom.mean) / mom.var;
}

}  // namespace

double spearman_assortativity(const Graph& g) {
    if (g.edge_count() == 0) throw UndefinedInputError("assortativity of an edgeless graph is undefined");
    const auto rank = incidence_ranks(g);
    const auto mom = moments(g, rank);
    double cross = 0.0;
    for (NodeId i = 0; i < g.node_count(); ++i)
        for (NodeId j : g.neighbors(i)) cross += rank[i] * rank[j];
    return correlation(cross, 2.0 * static_cast<double>(g.edge_count()), mom);
}

AssortativityRewirer::AssortativityRewirer(const Graph& g, std::uint64_t rng_seed)
    : n_(g.node_count()), edges_(g.edges()), rank_(incidence_ranks(g)), rng_(rng_seed) {
    if (edges_.empty()) throw UndefinedInputError("cannot rewire an edgeless graph");
    const auto mom = moments(g, rank_);
    mean_ = mom.mean;
    var_ = mom.var;
    incidences_ = 2.0 * static_cast<double>(edges_.size());
    present_.reserve(edges_.size() * 2);
    for (const Edge& e : edges_) {
        present_.insert(key(e.u, e.v));
        cross_ += rank_[e.u] * rank_[e.v];
    }
}

std::uint64_t AssortativityRewirer::key(NodeId a, NodeId b) noexcept {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

double AssortativityRewirer::rho() const noexcept {
    return correlation(2.0 * cross_, incidences_, {mean_, var_});
}

bool AssortativityRewirer::step(double rho_target, double temperature) {
    if (edges_.size() < 2) return false;
    std::uniform_int_distribution<std::size_t> pick(0, edges_.size() - 1);
    const std::size_t i = pick(rng_);
    std::size_t j = pick(rng_);
    while (j == i) j = pick(rng_);

    const NodeId a = edges_[i].u;
    const NodeId b = edges_[i].v;
    NodeId c = edges_[j].u;
    NodeId d = edges_[j].v;
    if (rng_() & 1U) std::swap(c, d);

    // (a,b),(c,d) -> (a,d),(c,b)
    if (a == d || c == b) return false;
    if (present_.contains(key(a, d)) || present_.contains(key(c, b))) return false;

    const double delta = rank_[a] * rank_[d] + rank_[c] * rank_[b] - rank_[a] * rank_[b] - rank_[c] * rank_[d];
    const double rho_now = rho();
    const double rho_next = correlation(2.0 * (cross_ + delta), incidences_, {mean_, var_});
    const double gap_now = std::abs(rho_now - rho_target);
    const double gap_next = std::abs(rho_next - rho_target);

    bool accept = gap_next < gap_now;
    if (!accept && temperature > 0.0) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        accept = u01(rng_) < std::exp(-(gap_next - gap_now) / temperature);
    }
    if (!accept) return false;

    present_.erase(key(a, b));
    present_.erase(key(c, d));
    present_.insert(key(a, d));
    present_.insert(key(c, b));
    edges_[i] = {std::min(a, d), std::max(a, d)};
    edges_[j] = {std::min(c, b), std::max(c, b)};
    cross_ += delta;
    ++accepted_;
    return true;
}

Graph AssortativityRewirer::graph() const { return Graph::from_edges(n_, edges_); }

std::pair<Graph, AssortativityReport> tune_assortativity(const Graph& g, double rho_target,
                                                         const TuneOptions& options, std::uint64_t rng_seed) {
    if (!(rho_target >= -1.0 && rho_target <= 1.0))
        throw ParameterError("tune_assortativity: rho_target must lie in [-1, 1]");
    if (!(options.tol > 0.0)) throw ParameterError("tune_assortativity: tol must be positive");
    if (options.temperature < 0.0) throw ParameterError("tune_assortativity: temperature must be >= 0");

    AssortativityRewirer rewirer(g, rng_seed);
    AssortativityReport report;
    const std::size_t budget = options.max_swaps.value_or(100 * g.edge_count());
    while (std::abs(rewirer.rho() - rho_target) > options.tol && report.proposals < budget) {
        rewirer.step(rho_target, options.temperature);
        ++report.proposals;
    }
    report.swap_count = rewirer.accepted();
    report.converged = std::abs(rewirer.rho() - rho_target) <= options.tol;
    Graph out = report.swap_count > 0 ? rewirer.graph() : g;
    // Report the exact value rather than the running sum.
    report.rho = spearman_assortativity(out);
    return {std::move(out), report};
}

}  // namespace ltm
