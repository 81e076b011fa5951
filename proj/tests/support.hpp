#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "ltm/graph.hpp"
#include "ltm/rng.hpp"

namespace ltm::testing {

inline Graph star(std::size_t leaves) {
    std::vector<Edge> e;
    for (NodeId i = 1; i <= leaves; ++i) e.push_back({0, i});
    return Graph::from_edges(leaves + 1, e);
}

inline Graph path(std::size_t n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return Graph::from_edges(n, e);
}

inline Graph cycle(std::size_t n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i < n; ++i) e.push_back({i, static_cast<NodeId>((i + 1) % n)});
    return Graph::from_edges(n, e);
}

/// G(n, p) by testing every pair; independent of the library generator.
inline Graph random_graph(std::size_t n, double p, Rng& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<Edge> e;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (coin(rng)) e.push_back({i, j});
    return Graph::from_edges(n, e);
}

inline std::vector<double> random_phi(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> phi(n);
    for (auto& x : phi) x = u(rng);
    return phi;
}

/// Synchronous relaxation: full passes over all nodes against the previous
/// pass's active set until nothing changes. Activation rule is the raw
/// threshold count "active neighbors >= resistance".
inline std::vector<bool> relax(const Graph& g, const std::vector<int>& r, const std::vector<NodeId>& seeds) {
    const std::size_t n = g.node_count();
    std::vector<bool> active(n, false);
    for (NodeId s : seeds) active[s] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<bool> next = active;
        for (NodeId i = 0; i < n; ++i) {
            if (active[i]) continue;
            int count = 0;
            for (NodeId j : g.neighbors(i)) count += active[j] ? 1 : 0;
            if (count >= r[i]) {
                next[i] = true;
                changed = true;
            }
        }
        active = std::move(next);
    }
    return active;
}

inline std::size_t relax_size(const Graph& g, const std::vector<int>& r, const std::vector<NodeId>& seeds) {
    const auto a = relax(g, r, seeds);
    return static_cast<std::size_t>(std::count(a.begin(), a.end(), true));
}

}  // namespace ltm::testing
