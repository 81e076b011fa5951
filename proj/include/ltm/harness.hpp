#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltm/gpi.hpp"
#include "ltm/graphgen.hpp"
#include "ltm/strategies.hpp"
#include "ltm/thresholds.hpp"

namespace ltm {

/// One strategy column of an experiment: a direct strategy or GPI, optionally
/// restricted to the first `realizations` realizations ("gpi@20").
struct HarnessStrategy {
    bool is_gpi = false;
    StrategySpec spec{};
    std::optional<std::size_t> realizations;

    static HarnessStrategy parse(std::string_view text);
    std::string label() const;
};

std::vector<HarnessStrategy> parse_strategy_list(std::string_view comma_separated);

struct ExperimentConfig {
    std::size_t n = 2000;
    double avg_degree = 10.0;
    std::vector<double> rho_list{0.0};
    std::vector<double> sigma_list{0.0};
    double mean_threshold = 0.5;
    std::vector<HarnessStrategy> strategies;
    std::size_t realizations = 20;
    std::uint64_t master_seed = 0;
    StopRule stop = StopRule::goal(0.5);
    std::filesystem::path output_dir = ".";
    double weight_grid_step = 0.05;
    GpiParams gpi = desk_gpi();
    TuneOptions tune{};
    unsigned workers = 1;
    /// Fill wall_ms with measured times. Off by default so that reruns are
    /// byte-identical.
    bool timing = false;

    static GpiParams desk_gpi() {
        GpiParams p;
        p.v = 20000;
        p.s = 2.5e-3;
        p.s_goal = 0.5;
        return p;
    }
    void validate() const;
};

/// A generated problem instance: tuned graph plus thresholds.
struct ExperimentInstance {
    Graph graph;
    std::vector<double> phi;
    AssortativityReport tuning;
    std::uint64_t realization_seed = 0;
    std::uint64_t hash = 0;
};

/// Seed of realization i, derived from the master seed.
std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization);

/// ER graph from the realization seed, rewired to rho, thresholds drawn for
/// sigma. The base graph depends on the realization only, so every (rho,
/// sigma) cell of one realization starts from the same ER graph.
ExperimentInstance make_instance(const ExperimentConfig& cfg, double rho, double sigma, std::size_t realization);
/// Same graph, thresholds from an explicit seed (threshold generations on a fixed graph).
std::vector<double> make_thresholds(const ExperimentConfig& cfg, double sigma, std::uint64_t seed);

std::uint64_t instance_hash(const Graph& g, const std::vector<double>& phi);

/// Runs one harness strategy on an instance with the given stop rule.
SelectionTrajectory run_strategy(const HarnessStrategy& strategy, const Instance& inst, const StopRule& stop,
                                 const GpiParams& gpi, std::uint64_t seed, unsigned workers);

struct RunRecord {
    std::string strategy;
    double rho = 0.0;
    double sigma = 0.0;
    std::uint64_t instance_hash = 0;
    std::uint64_t realization_seed = 0;
    double p = 0.0;
    double S = 0.0;
    double wall_ms = 0.0;
};

struct TuningRecord {
    double rho_target;
    double sigma;
    std::uint64_t realization_seed;
    AssortativityReport report;
};

struct ComparisonResult {
    std::vector<RunRecord> rows;
    std::vector<TuningRecord> tuning;
};

/// Every strategy on identical instances for each (rho, sigma, realization).
/// Rows are ordered by (rho, sigma, realization, strategy, step).
ComparisonResult run_comparison(const ExperimentConfig& cfg);

struct PcRow {
    std::string strategy;
    double rho;
    double sigma;
    double mean_pc;
    double std_pc;
    std::size_t count;    // trajectories reaching the target
    std::size_t missing;  // trajectories that stopped below it
};

/// p_c per trajectory (smallest p with S >= s_target), aggregated per
/// (strategy, rho, sigma). Only needs the raw rows.
std::vector<PcRow> aggregate_pc(const std::vector<RunRecord>& rows, double s_target);

struct WeightPoint {
    double rho, sigma, a, b, c, mean_pc, std_pc;
};

struct WeightScanResult {
    std::vector<WeightPoint> surface;
    std::vector<WeightPoint> argmin;  // one per (rho, sigma); first grid point on ties
};

/// bi(a, b, 1-a-b) over the simplex grid with spacing grid_step, p_c for the
/// config's goal fraction averaged over realizations.
WeightScanResult weight_scan(const ExperimentConfig& cfg, double grid_step);

struct BestProbRow {
    double p;
    std::string strategy;
    double probability;
};

struct BestProbRun {
    std::size_t generation;
    std::string strategy;
    double p;
    double S;
};

struct BestProbResult {
    std::vector<BestProbRow> table;
    std::vector<BestProbRun> runs;
};

/// One fixed graph (realization 0, first rho), cfg.realizations threshold
/// generations at the first sigma. For each p, the share of generations in
/// which a strategy attains the maximum S; ties split equally.
BestProbResult best_strategy_probability(const ExperimentConfig& cfg, const std::vector<double>& p_grid);

struct GpiSweepRow {
    std::size_t v;
    double s;
    std::size_t repeat;
    double p_c;
};

struct GpiSweepSummary {
    std::size_t v;
    double s;
    double mean_pc;
    std::size_t count;
    double std_pc;
};

struct GpiSweepResult {
    std::vector<GpiSweepRow> rows;
    std::vector<GpiSweepSummary> summary;
};

/// GPI p_c on one fixed instance (realization 0, first rho and sigma) for
/// every (v, s) pair and `repeats` GPI seeds.
GpiSweepResult gpi_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& v_list,
                         const std::vector<double>& s_list, std::size_t repeats);

// CSV output. Numbers use the shortest round-trip decimal form.
std::string format_number(double x);
void write_comparison_csv(const std::vector<RunRecord>& rows, const std::filesystem::path& path);
void write_tuning_csv(const std::vector<TuningRecord>& rows, const std::filesystem::path& path);
void write_pc_csv(const std::vector<PcRow>& rows, const std::filesystem::path& path);
void write_weight_scan_csv(const WeightScanResult& r, const std::filesystem::path& surface,
                           const std::filesystem::path& argmin);
void write_best_prob_csv(const BestProbResult& r, const std::filesystem::path& table,
                         const std::filesystem::path& runs);
void write_gpi_sweep_csv(const GpiSweepResult& r, const std::filesystem::path& rows,
                         const std::filesystem::path& summary);
/// Gnuplot data: one index block per strategy with "rho sigma mean_pc std_pc" lines.
void write_pc_gnuplot(const std::vector<PcRow>& rows, const std::filesystem::path& path);

}  // namespace ltm
