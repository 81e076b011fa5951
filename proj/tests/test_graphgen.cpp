#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "ltm/errors.hpp"
#include "ltm/graphgen.hpp"
#include "support.hpp"

using namespace ltm;
using namespace ltm::testing;

namespace {

// Pearson correlation of tie-averaged ranks over the 2|E| ordered incidences,
// written out longhand.
double spearman_oracle(const Graph& g) {
    std::vector<double> x, y;
    for (NodeId i = 0; i < g.node_count(); ++i)
        for (NodeId j : g.neighbors(i)) {
            x.push_back(static_cast<double>(g.degree(i)));
            y.push_back(static_cast<double>(g.degree(j)));
        }
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
            for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
            i = j;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double m = static_cast<double>(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / m;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / m;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        sxy += (rx[k] - mx) * (ry[k] - my);
        sxx += (rx[k] - mx) * (rx[k] - mx);
        syy += (ry[k] - my) * (ry[k] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<std::size_t> sorted_degrees(const Graph& g) {
    auto d = g.degrees();
    std::sort(d.begin(), d.end());
    return d;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("ltm_test_" + name);
}

}  // namespace

TEST_CASE("graph construction keeps a simple symmetric CSR") {
    const Edge e[] = {{2, 1}, {0, 1}};
    const Graph g = Graph::from_edges(3, e);
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.degrees() == std::vector<std::size_t>{1, 2, 1});
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(0, 2));
    const auto n1 = g.neighbors(1);
    CHECK(std::vector<NodeId>(n1.begin(), n1.end()) == std::vector<NodeId>{0, 2});
    CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});

    const Edge loop[] = {{1, 1}};
    CHECK_THROWS_AS(Graph::from_edges(3, loop), ParameterError);
    const Edge dup[] = {{0, 1}, {1, 0}};
    CHECK_THROWS_AS(Graph::from_edges(3, dup), ParameterError);
    const Edge far[] = {{0, 3}};
    CHECK_THROWS_AS(Graph::from_edges(3, far), ParameterError);
}

TEST_CASE("ER generation") {
    SUBCASE("zero degree gives no edges") {
        const Graph g = generate_er(50, 0.0, 1);
        CHECK(g.node_count() == 50);
        CHECK(g.edge_count() == 0);
    }
    SUBCASE("complete graph at avg_degree n-1") {
        CHECK(generate_er(12, 11.0, 3).edge_count() == 66);
    }
    SUBCASE("same seed, same graph; other seed, other graph") {
        CHECK(generate_er(500, 6.0, 42) == generate_er(500, 6.0, 42));
        CHECK_FALSE(generate_er(500, 6.0, 42) == generate_er(500, 6.0, 43));
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(generate_er(1, 0.0, 1), ParameterError);
        CHECK_THROWS_AS(generate_er(10, 9.5, 1), ParameterError);
        CHECK_THROWS_AS(generate_er(10, -1.0, 1), ParameterError);
    }
    SUBCASE("edge count matches the binomial mean") {
        const std::size_t n = 1000;
        const double p = 10.0 / (n - 1.0);
        const double pairs = n * (n - 1.0) / 2.0;
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) total += static_cast<double>(generate_er(n, 10.0, seed).edge_count());
        const double mean = total / 100.0;
        const double sd_of_mean = std::sqrt(pairs * p * (1.0 - p)) / 10.0;
        CHECK(std::abs(mean - pairs * p) < 3.0 * sd_of_mean);
    }
    SUBCASE("pair frequencies are uniform") {
        // Each of the 45 pairs of a 10-node graph should appear with probability p.
        const std::size_t n = 10, runs = 20000;
        const double p = 3.0 / 9.0;
        std::vector<double> hits(n * n, 0.0);
        for (std::uint64_t seed = 0; seed < runs; ++seed)
            for (const Edge& e : generate_er(n, 3.0, seed).edges()) hits[e.u * n + e.v] += 1.0;
        const double sd = std::sqrt(runs * p * (1 - p));
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = u + 1; v < n; ++v) CHECK(std::abs(hits[u * n + v] - runs * p) < 5.0 * sd);
    }
}

TEST_CASE("Spearman assortativity") {
    CHECK(spearman_assortativity(star(4)) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(spearman_assortativity(cycle(7)) == 0.0);
    CHECK_THROWS_AS(spearman_assortativity(Graph::from_edges(3, {})), UndefinedInputError);

    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const Graph g = random_graph(40, 0.1, rng);
        if (g.edge_count() == 0) continue;
        CHECK(spearman_assortativity(g) == doctest::Approx(spearman_oracle(g)).epsilon(1e-12));

        std::vector<NodeId> perm(g.node_count());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Edge> relabeled;
        for (const Edge& e : g.edges()) relabeled.push_back({perm[e.u], perm[e.v]});
        const Graph h = Graph::from_edges(g.node_count(), relabeled);
        CHECK(spearman_assortativity(h) == doctest::Approx(spearman_assortativity(g)).epsilon(1e-12));
    }
}

TEST_CASE("large ER graph is nearly neutral") {
    CHECK(std::abs(spearman_assortativity(generate_er(10000, 10.0, 11))) < 0.02);
}

TEST_CASE("incremental rho equals full recomputation after every accepted swap") {
    Rng rng(9);
    const Graph g = random_graph(120, 0.06, rng);
    AssortativityRewirer rw(g, 77);
    const auto degrees = sorted_degrees(g);
    std::size_t accepted = 0;
    for (int step = 0; step < 3000 && accepted < 300; ++step) {
        const double target = step < 1500 ? 0.6 : -0.6;
        if (!rw.step(target, step % 3 == 0 ? 0.01 : 0.0)) continue;
        ++accepted;
        const Graph now = rw.graph();
        REQUIRE(std::abs(rw.rho() - spearman_assortativity(now)) < 1e-9);
        REQUIRE(sorted_degrees(now) == degrees);
    }
    CHECK(accepted > 50);
}

TEST_CASE("tuning preserves degrees and reports honestly") {
    const Graph g = generate_er(600, 8.0, 3);
    const auto degrees = sorted_degrees(g);
    for (double target : {-0.5, 0.0, 0.5}) {
        const auto [out, report] = tune_assortativity(g, target, {}, 17);
        CHECK(report.converged);
        CHECK(std::abs(report.rho - target) <= 0.01 + 1e-9);
        CHECK(report.rho == spearman_assortativity(out));
        CHECK(sorted_degrees(out) == degrees);
        CHECK(out.edge_count() == g.edge_count());
        CHECK(report.swap_count <= report.proposals);
    }
    SUBCASE("already at target means no swaps") {
        const double rho0 = spearman_assortativity(g);
        const auto [out, report] = tune_assortativity(g, rho0, {}, 1);
        CHECK(report.converged);
        CHECK(report.swap_count == 0);
        CHECK(report.proposals == 0);
        CHECK(out == g);
    }
    SUBCASE("annealing keeps degrees") {
        TuneOptions opt;
        opt.temperature = 0.005;
        const auto [out, report] = tune_assortativity(g, 0.3, opt, 4);
        CHECK(sorted_degrees(out) == degrees);
    }
    SUBCASE("unreachable target stops at the proposal budget") {
        TuneOptions opt;
        opt.max_swaps = 100;
        const auto [out, report] = tune_assortativity(star(6), 0.5, opt, 2);
        CHECK_FALSE(report.converged);
        CHECK(report.proposals == 100);
        CHECK(report.swap_count == 0);
        CHECK(report.rho == doctest::Approx(-1.0));
    }
    SUBCASE("deterministic") {
        const auto a = tune_assortativity(g, 0.4, {}, 99);
        const auto b = tune_assortativity(g, 0.4, {}, 99);
        CHECK(a.first == b.first);
        CHECK(a.second.proposals == b.second.proposals);
    }
    CHECK_THROWS_AS(tune_assortativity(g, 1.5, {}, 1), ParameterError);
}

TEST_CASE("edge list files") {
    const auto file = temp_file("edges.txt");
    SUBCASE("round trip") {
        const Graph g = star(5);
        save_edge_list(g, file);
        CHECK(load_edge_list(file) == g);
        const Graph isolated = Graph::from_edges(8, std::vector<Edge>{{0, 1}});
        save_edge_list(isolated, file);
        CHECK(load_edge_list(file).node_count() == 8);
    }
    SUBCASE("plain edge lines") {
        std::ofstream(file) << "# comment\n0 1\n\n1 2\n";
        const Graph g = load_edge_list(file);
        CHECK(g.degrees() == std::vector<std::size_t>{1, 2, 1});
    }
    SUBCASE("self-loop names its line") {
        std::ofstream(file) << "0 1\n3 3\n";
        try {
            load_edge_list(file);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("duplicate and malformed lines") {
        std::ofstream(file) << "0 1\n2 1\n1 0\n";
        CHECK_THROWS_AS(load_edge_list(file), ParseError);
        std::ofstream(file) << "0 1\n1 x\n";
        CHECK_THROWS_AS(load_edge_list(file), ParseError);
        std::ofstream(file) << "0 1 2\n";
        CHECK_THROWS_AS(load_edge_list(file), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_edge_list(temp_file("does_not_exist.txt")), IoError);
    }
    std::filesystem::remove(file);
}
