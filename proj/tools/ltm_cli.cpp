#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltm/cascade.hpp"
#include "ltm/errors.hpp"
#include "ltm/gpi.hpp"
#include "ltm/graphgen.hpp"
#include "ltm/harness.hpp"
#include "ltm/strategies.hpp"
#include "ltm/thresholds.hpp"

namespace {

using namespace ltm;

constexpr int kExitParameter = 1;
constexpr int kExitIo = 2;
constexpr int kExitNotConverged = 3;

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw ParameterError(key + ": not a number: '" + text + "'");
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw ParameterError(key + ": not a non-negative integer: '" + text + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ParameterError(key + ": not a boolean: '" + text + "'");
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(',', start);
        out.push_back(trim(text.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_commas(text)) out.push_back(to_double(key, item));
    return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_commas(text)) out.push_back(to_uint(key, item));
    return out;
}

// Experiment settings as raw strings: read from --config, then overridden by flags.
using Settings = std::map<std::string, std::string>;

const std::vector<std::pair<std::string, std::string>>& setting_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys{
        {"n", "number of nodes"},
        {"avg_degree", "mean degree of the ER graph"},
        {"rho", "comma-separated assortativity targets"},
        {"sigma", "comma-separated threshold standard deviations"},
        {"mean_threshold", "mean threshold"},
        {"strategies", "comma-separated strategies, e.g. id,deg,bi(0.53,0.32,0.15),citm(6),gpi@20"},
        {"realizations", "number of realizations"},
        {"master_seed", "master seed"},
        {"goal", "stop once this active fraction is reached"},
        {"budget", "stop once this seed fraction is placed"},
        {"output_dir", "directory for CSV output"},
        {"weight_grid_step", "grid spacing of the BI weight scan"},
        {"gpi_v", "GPI simulations per step"},
        {"gpi_s", "GPI batch fraction per step"},
        {"gpi_mode", "GPI accumulator mode: seeds_only, per_simulation, alg_literal"},
        {"gpi_sphere", "hop bound for spread inside GPI simulations (0 = unbounded)"},
        {"tune_tol", "assortativity tolerance"},
        {"tune_max_swaps", "swap proposal budget (default 100 * edges)"},
        {"tune_temperature", "Metropolis temperature for rewiring (0 = greedy)"},
        {"workers", "worker threads"},
        {"timing", "record wall-clock times (true/false)"},
        {"p_grid", "best-prob: comma-separated seed fractions"},
        {"v_list", "gpi-sweep: comma-separated simulation counts"},
        {"s_list", "gpi-sweep: comma-separated batch fractions"},
        {"repeats", "gpi-sweep: GPI seeds per (v, s) cell"},
        {"s_target", "pc-curve: target active fraction"},
    };
    return keys;
}

void read_config_file(const std::string& path, Settings& settings) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        bool known = false;
        for (const auto& [k, help] : setting_keys()) known = known || k == key;
        if (!known) throw ParameterError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        settings[key] = trim(line.substr(eq + 1));
    }
}

struct ExperimentCommand {
    CLI::App* app = nullptr;
    std::string config_path;
    Settings flags;
    bool strict = false;
    bool gnuplot = false;
};

void add_experiment_flags(ExperimentCommand& cmd) {
    cmd.app->add_option("--config", cmd.config_path, "key = value config file");
    for (const auto& [key, help] : setting_keys()) {
        std::string flag = "--" + key;
        for (auto& ch : flag)
            if (ch == '_') ch = '-';
        cmd.app->add_option_function<std::string>(
            flag, [&cmd, key = key](const std::string& v) { cmd.flags[key] = v; }, help);
    }
}

struct Experiment {
    ExperimentConfig cfg;
    Settings settings;

    bool has(const std::string& key) const { return settings.count(key) > 0; }
    const std::string& get(const std::string& key) const { return settings.at(key); }
};

Experiment build_experiment(const ExperimentCommand& cmd) {
    Experiment ex;
    if (!cmd.config_path.empty()) read_config_file(cmd.config_path, ex.settings);
    for (const auto& [k, v] : cmd.flags) ex.settings[k] = v;
    auto& s = ex.settings;
    auto& cfg = ex.cfg;
    if (!s.count("master_seed")) throw ParameterError("--master-seed is required");
    cfg.master_seed = to_uint("master_seed", s["master_seed"]);
    if (s.count("n")) cfg.n = to_uint("n", s["n"]);
    if (s.count("avg_degree")) cfg.avg_degree = to_double("avg_degree", s["avg_degree"]);
    if (s.count("rho")) cfg.rho_list = to_doubles("rho", s["rho"]);
    if (s.count("sigma")) cfg.sigma_list = to_doubles("sigma", s["sigma"]);
    if (s.count("mean_threshold")) cfg.mean_threshold = to_double("mean_threshold", s["mean_threshold"]);
    if (s.count("strategies")) cfg.strategies = parse_strategy_list(s["strategies"]);
    if (s.count("realizations")) cfg.realizations = to_uint("realizations", s["realizations"]);
    if (s.count("goal") && s.count("budget")) throw ParameterError("goal and budget are mutually exclusive");
    if (s.count("goal")) cfg.stop = StopRule::goal(to_double("goal", s["goal"]));
    if (s.count("budget")) cfg.stop = StopRule::budget(to_double("budget", s["budget"]));
    if (s.count("output_dir")) cfg.output_dir = s["output_dir"];
    if (s.count("weight_grid_step")) cfg.weight_grid_step = to_double("weight_grid_step", s["weight_grid_step"]);
    if (s.count("gpi_v")) cfg.gpi.v = to_uint("gpi_v", s["gpi_v"]);
    if (s.count("gpi_s")) cfg.gpi.s = to_double("gpi_s", s["gpi_s"]);
    if (s.count("gpi_mode")) cfg.gpi.mode = parse_gpi_mode(trim(s["gpi_mode"]));
    if (s.count("gpi_sphere")) {
        const auto hops = to_uint("gpi_sphere", s["gpi_sphere"]);
        cfg.gpi.sphere = hops == 0 ? kUnbounded : static_cast<int>(hops);
    }
    if (s.count("tune_tol")) cfg.tune.tol = to_double("tune_tol", s["tune_tol"]);
    if (s.count("tune_max_swaps")) cfg.tune.max_swaps = to_uint("tune_max_swaps", s["tune_max_swaps"]);
    if (s.count("tune_temperature")) cfg.tune.temperature = to_double("tune_temperature", s["tune_temperature"]);
    if (s.count("workers")) cfg.workers = static_cast<unsigned>(to_uint("workers", s["workers"]));
    if (s.count("timing")) cfg.timing = to_bool("timing", s["timing"]);
    cfg.validate();
    return ex;
}

void report_tuning(const std::vector<TuningRecord>& rows, bool strict, int& exit_code) {
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.report.converged ? 0 : 1;
    if (failed == 0) return;
    std::cerr << "warning: assortativity tuning did not converge for " << failed << " of " << rows.size()
              << " instances (see tuning.csv)\n";
    if (strict) exit_code = kExitNotConverged;
}

std::vector<NodeId> parse_seed_list(const std::string& text) {
    std::vector<NodeId> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split_commas(text)) out.push_back(static_cast<NodeId>(to_uint("seeds", item)));
    return out;
}

std::vector<NodeId> read_seed_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open seed file " + path);
    std::vector<NodeId> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            out.push_back(static_cast<NodeId>(to_uint("seed", line)));
        } catch (const ParameterError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Seed selection for the linear threshold model"};
    app.require_subcommand(1);

    // gen-graph
    auto* gen = app.add_subcommand("gen-graph", "Generate an Erdos-Renyi graph");
    std::size_t gen_n = 2000;
    double gen_k = 10.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "number of nodes")->capture_default_str();
    gen->add_option("--avg-degree", gen_k, "mean degree")->capture_default_str();
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--out", gen_out, "edge list output")->required();

    // tune-rho
    auto* tune = app.add_subcommand("tune-rho", "Rewire a graph towards a target assortativity");
    std::string tune_in, tune_out;
    double tune_rho = 0.0;
    std::uint64_t tune_seed = 0;
    TuneOptions tune_opt;
    std::size_t tune_swaps = 0;
    bool tune_strict = false;
    tune->add_option("--graph", tune_in, "input edge list")->required();
    tune->add_option("--rho", tune_rho, "target Spearman assortativity")->required();
    tune->add_option("--seed", tune_seed, "RNG seed")->required();
    tune->add_option("--out", tune_out, "edge list output")->required();
    tune->add_option("--tol", tune_opt.tol, "tolerance")->capture_default_str();
    auto* swaps_opt = tune->add_option("--max-swaps", tune_swaps, "swap proposal budget");
    tune->add_option("--temperature", tune_opt.temperature, "Metropolis temperature")->capture_default_str();
    tune->add_flag("--strict", tune_strict, "exit 3 when the target is not reached");

    // sample-thresholds
    auto* thr = app.add_subcommand("sample-thresholds", "Draw node thresholds");
    std::size_t thr_n = 2000;
    double thr_sigma = 0.0, thr_mean = 0.5;
    std::uint64_t thr_seed = 0;
    std::string thr_out;
    thr->add_option("--n", thr_n, "number of nodes")->capture_default_str();
    thr->add_option("--sigma", thr_sigma, "standard deviation")->capture_default_str();
    thr->add_option("--mean", thr_mean, "mean threshold")->capture_default_str();
    thr->add_option("--seed", thr_seed, "RNG seed")->required();
    thr->add_option("--out", thr_out, "threshold file output")->required();

    // run-cascade
    auto* casc = app.add_subcommand("run-cascade", "Final cascade size for a seed set");
    std::string casc_graph, casc_thr, casc_seeds, casc_seed_file;
    casc->add_option("--graph", casc_graph, "edge list")->required();
    casc->add_option("--thresholds", casc_thr, "threshold file")->required();
    casc->add_option("--seeds", casc_seeds, "comma-separated seed ids");
    casc->add_option("--seed-file", casc_seed_file, "file with one seed id per line");

    // select
    auto* sel = app.add_subcommand("select", "Run one seed-selection strategy on a given instance");
    std::string sel_graph, sel_thr, sel_strategy = "id", sel_out;
    std::optional<double> sel_goal, sel_budget;
    std::uint64_t sel_seed = 0;
    unsigned sel_workers = 1;
    std::size_t sel_v = ExperimentConfig::desk_gpi().v;
    double sel_s = ExperimentConfig::desk_gpi().s;
    std::string sel_mode = to_string(ExperimentConfig::desk_gpi().mode);
    sel->add_option("--graph", sel_graph, "edge list")->required();
    sel->add_option("--thresholds", sel_thr, "threshold file")->required();
    sel->add_option("--strategy", sel_strategy, "strategy, e.g. id, bi(0.5,0.3,0.2), citm(6), greedy, gpi")
        ->capture_default_str();
    sel->add_option("--goal", sel_goal, "stop at this active fraction (default 0.5)");
    sel->add_option("--budget", sel_budget, "stop at this seed fraction");
    sel->add_option("--seed", sel_seed, "RNG seed (random and gpi)")->capture_default_str();
    sel->add_option("--workers", sel_workers, "worker threads")->capture_default_str();
    sel->add_option("--gpi-v", sel_v, "GPI simulations per step")->capture_default_str();
    sel->add_option("--gpi-s", sel_s, "GPI batch fraction")->capture_default_str();
    sel->add_option("--gpi-mode", sel_mode, "GPI accumulator mode")->capture_default_str();
    sel->add_option("--out", sel_out, "trajectory CSV (default stdout)");

    ExperimentCommand compare{app.add_subcommand("compare", "Strategy comparison over (rho, sigma) grids")};
    ExperimentCommand pc{app.add_subcommand("pc-curve", "Mean and std of p_c per strategy and (rho, sigma)")};
    ExperimentCommand wscan{app.add_subcommand("weight-scan", "BI weight scan over the (a, b) simplex")};
    ExperimentCommand bprob{app.add_subcommand("best-prob", "Probability of each strategy being the best")};
    ExperimentCommand gsweep{app.add_subcommand("gpi-sweep", "GPI p_c over v and s grids")};
    for (auto* cmd : {&compare, &pc, &wscan, &bprob, &gsweep}) {
        add_experiment_flags(*cmd);
        cmd->app->add_flag("--strict", cmd->strict, "exit 3 when assortativity tuning does not converge");
    }
    pc.app->add_flag("--gnuplot", pc.gnuplot, "also write pc_curve.dat");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParameter;
    }

    if (gen->parsed()) {
        save_edge_list(generate_er(gen_n, gen_k, gen_seed), gen_out);
        return 0;
    }
    if (tune->parsed()) {
        if (swaps_opt->count() > 0) tune_opt.max_swaps = tune_swaps;
        const Graph g = load_edge_list(tune_in);
        auto [out, report] = tune_assortativity(g, tune_rho, tune_opt, tune_seed);
        save_edge_list(out, tune_out);
        std::cout << "rho " << format_number(report.rho) << " swaps " << report.swap_count << " proposals "
                  << report.proposals << " converged " << (report.converged ? "yes" : "no") << '\n';
        if (!report.converged) {
            std::cerr << "warning: target assortativity not reached\n";
            if (tune_strict) return kExitNotConverged;
        }
        return 0;
    }
    if (thr->parsed()) {
        save_thresholds(sample_thresholds(ThresholdSpec::from_sigma(thr_sigma, thr_mean), thr_n, thr_seed), thr_out);
        return 0;
    }
    if (casc->parsed()) {
        const Graph g = load_edge_list(casc_graph);
        const auto phi = load_thresholds(casc_thr);
        if (phi.size() != g.node_count()) throw ParameterError("threshold count does not match node count");
        std::vector<NodeId> seeds = parse_seed_list(casc_seeds);
        if (!casc_seed_file.empty()) {
            const auto more = read_seed_file(casc_seed_file);
            seeds.insert(seeds.end(), more.begin(), more.end());
        }
        const auto size = cascade_size(g, resistances(g, phi), seeds);
        std::cout << "active " << size << " fraction "
                  << format_number(static_cast<double>(size) / static_cast<double>(g.node_count())) << '\n';
        return 0;
    }
    if (sel->parsed()) {
        if (sel_goal && sel_budget) throw ParameterError("--goal and --budget are mutually exclusive");
        const StopRule stop = sel_budget ? StopRule::budget(*sel_budget) : StopRule::goal(sel_goal.value_or(0.5));
        stop.validate();
        const Graph g = load_edge_list(sel_graph);
        const auto phi = load_thresholds(sel_thr);
        if (phi.size() != g.node_count()) throw ParameterError("threshold count does not match node count");
        const Instance inst = Instance::make(g, phi);
        GpiParams gpi = ExperimentConfig::desk_gpi();
        gpi.v = sel_v;
        gpi.s = sel_s;
        gpi.mode = parse_gpi_mode(sel_mode);
        const auto traj = run_strategy(HarnessStrategy::parse(sel_strategy), inst, stop, gpi, sel_seed, sel_workers);

        std::ofstream file;
        if (!sel_out.empty()) {
            file.open(sel_out, std::ios::binary);
            if (!file) throw IoError("cannot open " + sel_out + " for writing");
        }
        std::ostream& out = sel_out.empty() ? std::cout : file;
        out << "seeds,p,S\n";
        // GPI curve points are per batch; the seed count is recovered from p.
        for (const auto& pt : traj.curve) {
            const auto count = static_cast<std::size_t>(std::llround(pt.p * static_cast<double>(g.node_count())));
            out << count << ',' << format_number(pt.p) << ',' << format_number(pt.S) << '\n';
        }
        out << "# seed order:";
        for (NodeId s : traj.seeds) out << ' ' << s;
        out << '\n';
        if (traj.p_c) std::cerr << "p_c " << format_number(*traj.p_c) << '\n';
        out.flush();
        if (!out) throw IoError("write failed");
        return 0;
    }

    int exit_code = 0;
    if (compare.app->parsed()) {
        const auto ex = build_experiment(compare);
        const auto result = run_comparison(ex.cfg);
        write_comparison_csv(result.rows, ex.cfg.output_dir / "comparison.csv");
        write_tuning_csv(result.tuning, ex.cfg.output_dir / "tuning.csv");
        report_tuning(result.tuning, compare.strict, exit_code);
    } else if (pc.app->parsed()) {
        const auto ex = build_experiment(pc);
        if (ex.cfg.stop.kind != StopRule::Kind::goal) throw ParameterError("pc-curve needs a goal stop rule");
        const double target = ex.has("s_target") ? to_double("s_target", ex.get("s_target")) : ex.cfg.stop.fraction;
        if (!(target > 0.0 && target <= ex.cfg.stop.fraction))
            throw ParameterError("s_target must lie in (0, goal]");
        const auto result = run_comparison(ex.cfg);
        const auto table = aggregate_pc(result.rows, target);
        write_comparison_csv(result.rows, ex.cfg.output_dir / "comparison.csv");
        write_tuning_csv(result.tuning, ex.cfg.output_dir / "tuning.csv");
        write_pc_csv(table, ex.cfg.output_dir / "pc_curve.csv");
        if (pc.gnuplot) write_pc_gnuplot(table, ex.cfg.output_dir / "pc_curve.dat");
        report_tuning(result.tuning, pc.strict, exit_code);
    } else if (wscan.app->parsed()) {
        const auto ex = build_experiment(wscan);
        const auto result = weight_scan(ex.cfg, ex.cfg.weight_grid_step);
        write_weight_scan_csv(result, ex.cfg.output_dir / "weight_scan.csv", ex.cfg.output_dir / "weight_argmin.csv");
    } else if (bprob.app->parsed()) {
        const auto ex = build_experiment(bprob);
        std::vector<double> grid;
        if (ex.has("p_grid")) {
            grid = to_doubles("p_grid", ex.get("p_grid"));
        } else {
            for (int i = 1; i <= 20; ++i) grid.push_back(i * 0.001);
        }
        const auto result = best_strategy_probability(ex.cfg, grid);
        write_best_prob_csv(result, ex.cfg.output_dir / "best_prob.csv", ex.cfg.output_dir / "best_prob_runs.csv");
    } else if (gsweep.app->parsed()) {
        const auto ex = build_experiment(gsweep);
        const auto v_list =
            ex.has("v_list") ? to_sizes("v_list", ex.get("v_list")) : std::vector<std::size_t>{2500, 5000, 10000, 20000};
        const auto s_list =
            ex.has("s_list") ? to_doubles("s_list", ex.get("s_list")) : std::vector<double>{1e-2, 5e-3, 2.5e-3};
        const std::size_t repeats = ex.has("repeats") ? to_uint("repeats", ex.get("repeats")) : 5;
        const auto result = gpi_sweep(ex.cfg, v_list, s_list, repeats);
        write_gpi_sweep_csv(result, ex.cfg.output_dir / "gpi_sweep.csv", ex.cfg.output_dir / "gpi_sweep_summary.csv");
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ltm::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ltm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParameter;
    }
}
