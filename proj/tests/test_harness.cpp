#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "ltm/errors.hpp"
#include "ltm/harness.hpp"
#include "support.hpp"

using namespace ltm;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.n = 100;
    cfg.avg_degree = 6.0;
    cfg.realizations = 2;
    cfg.master_seed = 2024;
    cfg.strategies = parse_strategy_list("deg");
    cfg.gpi.v = 200;
    cfg.gpi.s = 0.02;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("ltm_harness_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("strategy list parsing") {
    const auto list = parse_strategy_list("id, bi(0.53,0.32,0.15),citm(6), gpi@20 ,deg@3");
    REQUIRE(list.size() == 5);
    CHECK(list[0].label() == "id");
    CHECK(list[1].label() == "bi(0.53,0.32,0.15)");
    CHECK(list[2].label() == "citm(6)");
    CHECK(list[3].is_gpi);
    CHECK(list[3].realizations == 20u);
    CHECK(list[3].label() == "gpi");
    CHECK(list[4].realizations == 3u);
    CHECK_THROWS_AS(HarnessStrategy::parse("gpi@0"), ParameterError);
    CHECK_THROWS_AS(HarnessStrategy::parse("id@x"), ParameterError);
}

TEST_CASE("config validation") {
    auto cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.realizations = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = small_config();
    cfg.rho_list.clear();
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = small_config();
    cfg.sigma_list = {0.4};
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = small_config();
    cfg.stop = StopRule::goal(0.0);
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("comparison rows") {
    auto cfg = small_config();
    const auto result = run_comparison(cfg);
    const auto dir = scratch_dir("compare");
    write_comparison_csv(result.rows, dir / "comparison.csv");
    const std::string text = slurp(dir / "comparison.csv");
    CHECK(text.rfind("strategy,rho,sigma,instance_hash,realization_seed,p,S,wall_ms\n", 0) == 0);
    CHECK(text.back() == '\n');

    std::size_t starts = 0;
    for (const auto& r : result.rows) {
        starts += r.p == 0.0 ? 1 : 0;
        CHECK(r.p >= 0.0);
        CHECK(r.p <= 1.0);
        CHECK(r.S >= 0.0);
        CHECK(r.S <= 1.0);
        CHECK(r.wall_ms == 0.0);
    }
    CHECK(starts == 2);
    CHECK(result.tuning.size() == 2);
    CHECK(aggregate_pc(result.rows, 0.5).at(0).count == 2);
}

TEST_CASE("strategies of one realization share the instance") {
    auto cfg = small_config();
    cfg.strategies = parse_strategy_list("id,deg,random,gpi@1");
    cfg.rho_list = {0.0, 0.3};
    cfg.sigma_list = {0.0, 0.2};
    const auto result = run_comparison(cfg);
    std::map<std::tuple<double, double, std::uint64_t>, std::set<std::uint64_t>> hashes;
    std::map<std::string, std::set<std::uint64_t>> seeds_by_strategy;
    for (const auto& r : result.rows) {
        hashes[{r.rho, r.sigma, r.realization_seed}].insert(r.instance_hash);
        seeds_by_strategy[r.strategy].insert(r.realization_seed);
    }
    CHECK(hashes.size() == 8);
    for (const auto& [key, set] : hashes) CHECK(set.size() == 1);
    CHECK(seeds_by_strategy["gpi"].size() == 1);
    CHECK(seeds_by_strategy["id"].size() == 2);

    // The graph of a realization is the same ER draw at every (rho, sigma).
    const auto a = make_instance(cfg, 0.0, 0.0, 1);
    const auto b = make_instance(cfg, 0.0, 0.2, 1);
    CHECK(a.graph == b.graph);
    CHECK(a.phi != b.phi);
    CHECK(a.hash != b.hash);
}

TEST_CASE("outputs are reproducible and independent of worker count") {
    auto cfg = small_config();
    cfg.strategies = parse_strategy_list("id,greedy,random,gpi");
    cfg.sigma_list = {0.0, 0.2887};
    cfg.realizations = 3;
    const auto dir = scratch_dir("repro");
    write_comparison_csv(run_comparison(cfg).rows, dir / "a.csv");
    write_comparison_csv(run_comparison(cfg).rows, dir / "b.csv");
    cfg.workers = 3;
    write_comparison_csv(run_comparison(cfg).rows, dir / "c.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "c.csv"));
    cfg.master_seed += 1;
    write_comparison_csv(run_comparison(cfg).rows, dir / "d.csv");
    CHECK(slurp(dir / "a.csv") != slurp(dir / "d.csv"));
}

TEST_CASE("p_c aggregation") {
    SUBCASE("deg and bi(0,1,0) give identical distributions") {
        auto cfg = small_config();
        cfg.strategies = parse_strategy_list("deg,bi(0,1,0)");
        cfg.realizations = 4;
        const auto table = aggregate_pc(run_comparison(cfg).rows, 0.5);
        REQUIRE(table.size() == 2);
        CHECK(table[0].mean_pc == table[1].mean_pc);
        CHECK(table[0].std_pc == table[1].std_pc);
    }
    SUBCASE("greedy on a star needs one seed") {
        for (std::size_t leaves : {4, 9, 19}) {
            const Graph g = testing::star(leaves);
            const Instance inst = Instance::make(g, std::vector<double>(leaves + 1, 0.5));
            const auto traj = run_strategy(HarnessStrategy::parse("greedy"), inst, StopRule::goal(0.5), {}, 0, 1);
            CHECK(traj.p_c == doctest::Approx(1.0 / (leaves + 1)));
        }
    }
    SUBCASE("random seeding needs fewer initiators with wider thresholds") {
        auto cfg = small_config();
        cfg.n = 500;
        cfg.avg_degree = 10;
        cfg.realizations = 4;
        cfg.strategies = parse_strategy_list("random");
        cfg.sigma_list = {0.0, 0.2887};
        const auto table = aggregate_pc(run_comparison(cfg).rows, 0.5);
        REQUIRE(table.size() == 2);
        CHECK(table[1].mean_pc < table[0].mean_pc);
    }
    SUBCASE("hand-built rows") {
        std::vector<RunRecord> rows{{"a", 0, 0, 1, 10, 0.0, 0.0, 0},  {"a", 0, 0, 1, 10, 0.1, 0.6, 0},
                                    {"a", 0, 0, 2, 11, 0.0, 0.0, 0},  {"a", 0, 0, 2, 11, 0.1, 0.2, 0},
                                    {"a", 0, 0, 2, 11, 0.2, 0.55, 0}, {"a", 0, 0, 3, 12, 0.0, 0.1, 0}};
        const auto table = aggregate_pc(rows, 0.5);
        REQUIRE(table.size() == 1);
        CHECK(table[0].count == 2);
        CHECK(table[0].missing == 1);
        CHECK(table[0].mean_pc == doctest::Approx(0.15));
        CHECK(table[0].std_pc == doctest::Approx(std::sqrt(0.005)));
    }
}

TEST_CASE("weight scan") {
    auto cfg = small_config();
    cfg.realizations = 2;
    const auto scan = weight_scan(cfg, 1.0 / 3.0);
    CHECK(scan.surface.size() == 10);
    REQUIRE(scan.argmin.size() == 1);
    double at_id = 0.0, at_deg = 0.0, minimum = 1.0;
    for (const auto& w : scan.surface) {
        CHECK(w.a + w.b + w.c == doctest::Approx(1.0));
        minimum = std::min(minimum, w.mean_pc);
        if (std::abs(w.a - 1.0 / 3) < 1e-9 && std::abs(w.b - 1.0 / 3) < 1e-9) at_id = w.mean_pc;
        if (w.a == 0.0 && std::abs(w.b - 1.0) < 1e-9) at_deg = w.mean_pc;
    }
    CHECK(scan.argmin[0].mean_pc == minimum);
    CHECK(minimum <= at_id);

    cfg.strategies = parse_strategy_list("deg");
    CHECK(aggregate_pc(run_comparison(cfg).rows, 0.5).at(0).mean_pc == doctest::Approx(at_deg));
    CHECK_THROWS_AS(weight_scan(cfg, 0.3), ParameterError);
}

TEST_CASE("best strategy probability") {
    auto cfg = small_config();
    cfg.realizations = 5;
    cfg.sigma_list = {0.2};
    SUBCASE("single strategy always wins") {
        const auto r = best_strategy_probability(cfg, {0.01, 0.05, 0.2});
        for (const auto& row : r.table) CHECK(row.probability == 1.0);
        CHECK(r.runs.size() == 15);
    }
    SUBCASE("everything ties once every node is a seed") {
        cfg.strategies = parse_strategy_list("deg,id,random,greedy");
        const auto r = best_strategy_probability(cfg, {0.02, 1.0});
        double total_small = 0.0;
        for (const auto& row : r.table) {
            if (row.p == 1.0) CHECK(row.probability == doctest::Approx(0.25));
            if (row.p == 0.02) total_small += row.probability;
        }
        CHECK(total_small == doctest::Approx(1.0));
    }
}

TEST_CASE("GPI sweep") {
    auto cfg = small_config();
    const auto r = gpi_sweep(cfg, {100, 200}, {0.05, 1.0}, 2);
    CHECK(r.rows.size() == 8);
    CHECK(r.summary.size() == 4);
    for (const auto& row : r.rows) {
        CHECK(row.p_c > 0.0);
        CHECK(row.p_c <= 1.0);
    }
    const auto again = gpi_sweep(cfg, {100, 200}, {0.05, 1.0}, 2);
    for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].p_c == again.rows[i].p_c);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-3) == "0.001");
    CHECK(format_number(-0.9) == "-0.9");
    CHECK(format_number(std::nan("")) == "nan");
}
