#include "ltm/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "ltm/errors.hpp"
#include "ltm/parallel.hpp"
#include "ltm/rng.hpp"

namespace ltm {

HarnessStrategy HarnessStrategy::parse(std::string_view text) {
    HarnessStrategy out;
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (auto at = text.rfind('@'); at != std::string_view::npos) {
        const auto count = text.substr(at + 1);
        std::size_t r = 0;
        auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), r);
        if (ec != std::errc{} || ptr != count.data() + count.size() || r == 0)
            throw ParameterError("bad realization count in '" + std::string(text) + "'");
        out.realizations = r;
        text = text.substr(0, at);
    }
    if (text == "gpi") {
        out.is_gpi = true;
    } else {
        out.spec = StrategySpec::parse(text);
    }
    return out;
}

std::string HarnessStrategy::label() const { return is_gpi ? "gpi" : spec.label(); }

std::vector<HarnessStrategy> parse_strategy_list(std::string_view text) {
    // Commas inside bi(...) belong to the weights.
    std::vector<HarnessStrategy> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i < text.size() && text[i] == '(') ++depth;
        if (i < text.size() && text[i] == ')') --depth;
        if (i == text.size() || (text[i] == ',' && depth == 0)) {
            auto item = text.substr(start, i - start);
            if (item.find_first_not_of(' ') != std::string_view::npos) out.push_back(HarnessStrategy::parse(item));
            start = i + 1;
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (n < 2) throw ParameterError("n must be >= 2");
    if (!(avg_degree >= 0.0 && avg_degree <= static_cast<double>(n - 1)))
        throw ParameterError("avg_degree must lie in [0, n-1]");
    if (rho_list.empty() || sigma_list.empty()) throw ParameterError("rho and sigma grids must be non-empty");
    for (double r : rho_list)
        if (!(r >= -1.0 && r <= 1.0)) throw ParameterError("rho values must lie in [-1, 1]");
    for (double s : sigma_list)
        if (!(s >= 0.0 && s <= kMaxSigma)) throw ParameterError("sigma values must lie in [0, 1/sqrt(12)]");
    if (!(mean_threshold >= 0.0 && mean_threshold <= 1.0)) throw ParameterError("mean threshold must lie in [0, 1]");
    if (realizations < 1) throw ParameterError("realizations must be >= 1");
    stop.validate();
    if (stop.kind == StopRule::Kind::budget && !(stop.fraction > 0.0))
        throw ParameterError("budget fraction must be positive");
    if (!(weight_grid_step > 0.0 && weight_grid_step <= 1.0)) throw ParameterError("weight grid step must lie in (0, 1]");
    gpi.validate(n);
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization) {
    return derive_seed(master_seed, {tag(Stream::realization), realization});
}

std::uint64_t instance_hash(const Graph& g, const std::vector<double>& phi) {
    std::uint64_t h = fingerprint(g);
    for (double x : phi) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::vector<double> make_thresholds(const ExperimentConfig& cfg, double sigma, std::uint64_t seed) {
    return sample_thresholds(ThresholdSpec::from_sigma(sigma, cfg.mean_threshold), cfg.n, seed);
}

ExperimentInstance make_instance(const ExperimentConfig& cfg, double rho, double sigma, std::size_t realization) {
    ExperimentInstance inst;
    inst.realization_seed = realization_seed(cfg.master_seed, realization);
    Graph er = generate_er(cfg.n, cfg.avg_degree, derive_seed(inst.realization_seed, {tag(Stream::graph)}));
    if (er.edge_count() > 0) {
        auto [tuned, report] =
            tune_assortativity(er, rho, cfg.tune, derive_seed(inst.realization_seed, {tag(Stream::rewire)}));
        inst.graph = std::move(tuned);
        inst.tuning = report;
    } else {
        inst.graph = std::move(er);
    }
    inst.phi = make_thresholds(cfg, sigma, derive_seed(inst.realization_seed, {tag(Stream::thresholds)}));
    inst.hash = instance_hash(inst.graph, inst.phi);
    return inst;
}

SelectionTrajectory run_strategy(const HarnessStrategy& strategy, const Instance& inst, const StopRule& stop,
                                 const GpiParams& gpi, std::uint64_t seed, unsigned workers) {
    if (strategy.is_gpi) {
        GpiParams p = gpi;
        p.workers = workers;
        if (stop.kind == StopRule::Kind::goal) {
            p.s_goal = stop.fraction;
        } else {
            p.budget_fraction = stop.fraction;
        }
        return gpi_select(inst, p, seed);
    }
    SelectOptions opt;
    opt.rng_seed = seed;
    opt.workers = workers;
    return select_seeds(inst, strategy.spec, stop, opt);
}

namespace {

using Clock = std::chrono::steady_clock;

// Realization jobs run in parallel; a job gets the inner workers only when it is alone.
struct WorkerSplit {
    unsigned outer;
    unsigned inner;
};

WorkerSplit split_workers(unsigned workers, std::size_t jobs) {
    workers = std::max(1U, workers);
    if (jobs <= 1) return {1, workers};
    return {static_cast<unsigned>(std::min<std::size_t>(workers, jobs)), 1};
}

std::uint64_t strategy_seed(std::uint64_t realization_seed, std::size_t strategy_index) {
    return derive_seed(realization_seed, {tag(Stream::strategy), strategy_index});
}

}  // namespace

ComparisonResult run_comparison(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.strategies.empty()) throw ParameterError("no strategies configured");
    ComparisonResult result;
    for (double rho : cfg.rho_list) {
        for (double sigma : cfg.sigma_list) {
            std::vector<std::vector<RunRecord>> per_real(cfg.realizations);
            std::vector<TuningRecord> tuning(cfg.realizations);
            const auto split = split_workers(cfg.workers, cfg.realizations);
            parallel_chunks(cfg.realizations, split.outer, [&](unsigned, std::size_t begin, std::size_t end) {
                for (std::size_t r = begin; r < end; ++r) {
                    const auto ex = make_instance(cfg, rho, sigma, r);
                    tuning[r] = {rho, sigma, ex.realization_seed, ex.tuning};
                    const Instance inst = Instance::make(ex.graph, ex.phi);
                    for (std::size_t k = 0; k < cfg.strategies.size(); ++k) {
                        const auto& strat = cfg.strategies[k];
                        if (strat.realizations && r >= *strat.realizations) continue;
                        const auto t0 = Clock::now();
                        const auto traj = run_strategy(strat, inst, cfg.stop, cfg.gpi,
                                                       strategy_seed(ex.realization_seed, k), split.inner);
                        const double ms =
                            cfg.timing ? std::chrono::duration<double, std::milli>(Clock::now() - t0).count() : 0.0;
                        const std::string label = strat.label();
                        for (const auto& pt : traj.curve)
                            per_real[r].push_back({label, rho, sigma, ex.hash, ex.realization_seed, pt.p, pt.S, ms});
                    }
                }
            });
            for (auto& rows : per_real) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
            result.tuning.insert(result.tuning.end(), tuning.begin(), tuning.end());
        }
    }
    return result;
}

namespace {

struct Stats {
    double mean = 0.0;
    double sd = 0.0;
};

Stats mean_sd(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

std::vector<PcRow> aggregate_pc(const std::vector<RunRecord>& rows, double s_target) {
    struct Group {
        std::string strategy;
        double rho, sigma;
        std::vector<double> pcs;
        std::size_t missing = 0;
    };
    std::vector<Group> groups;
    std::map<std::tuple<std::string, double, double>, std::size_t> index;

    // A trajectory is a maximal run of rows sharing (strategy, rho, sigma, seed, hash).
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        std::optional<double> pc;
        while (j < rows.size() && rows[j].strategy == rows[i].strategy && rows[j].rho == rows[i].rho &&
               rows[j].sigma == rows[i].sigma && rows[j].realization_seed == rows[i].realization_seed &&
               rows[j].instance_hash == rows[i].instance_hash && (j == i || rows[j].p >= rows[j - 1].p)) {
            if (!pc && rows[j].S >= s_target - 1e-12) pc = rows[j].p;
            ++j;
        }
        const auto key = std::make_tuple(rows[i].strategy, rows[i].rho, rows[i].sigma);
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) groups.push_back({rows[i].strategy, rows[i].rho, rows[i].sigma, {}, 0});
        auto& g = groups[it->second];
        if (pc) {
            g.pcs.push_back(*pc);
        } else {
            ++g.missing;
        }
        i = j;
    }
    std::vector<PcRow> out;
    for (const auto& g : groups) {
        const auto st = mean_sd(g.pcs);
        out.push_back({g.strategy, g.rho, g.sigma, g.pcs.empty() ? std::nan("") : st.mean, st.sd, g.pcs.size(), g.missing});
    }
    return out;
}

WeightScanResult weight_scan(const ExperimentConfig& cfg, double grid_step) {
    cfg.validate();
    if (!(grid_step > 0.0 && grid_step <= 1.0)) throw ParameterError("grid step must lie in (0, 1]");
    const double steps_real = 1.0 / grid_step;
    const auto m = static_cast<int>(std::llround(steps_real));
    if (std::abs(steps_real - m) > 1e-6) throw ParameterError("1 / grid_step must be an integer");
    if (cfg.stop.kind != StopRule::Kind::goal) throw ParameterError("weight scan needs a goal stop rule");

    struct GridPoint {
        double a, b, c;
    };
    std::vector<GridPoint> grid;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; i + j <= m; ++j)
            grid.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m, static_cast<double>(m - i - j) / m});

    WeightScanResult out;
    for (double rho : cfg.rho_list) {
        for (double sigma : cfg.sigma_list) {
            std::vector<std::vector<double>> pc(grid.size(), std::vector<double>(cfg.realizations, 0.0));
            const auto split = split_workers(cfg.workers, cfg.realizations);
            parallel_chunks(cfg.realizations, split.outer, [&](unsigned, std::size_t begin, std::size_t end) {
                for (std::size_t r = begin; r < end; ++r) {
                    const auto ex = make_instance(cfg, rho, sigma, r);
                    const Instance inst = Instance::make(ex.graph, ex.phi);
                    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                        StrategySpec spec{StrategyKind::bi, {grid[gi].a, grid[gi].b, grid[gi].c}, 6};
                        pc[gi][r] = select_seeds(inst, spec, cfg.stop).p_c.value_or(1.0);
                    }
                }
            });
            std::size_t best = 0;
            std::vector<Stats> stats(grid.size());
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                stats[gi] = mean_sd(pc[gi]);
                out.surface.push_back({rho, sigma, grid[gi].a, grid[gi].b, grid[gi].c, stats[gi].mean, stats[gi].sd});
                if (stats[gi].mean < stats[best].mean) best = gi;
            }
            out.argmin.push_back({rho, sigma, grid[best].a, grid[best].b, grid[best].c, stats[best].mean, stats[best].sd});
        }
    }
    return out;
}

BestProbResult best_strategy_probability(const ExperimentConfig& cfg, const std::vector<double>& p_grid) {
    cfg.validate();
    if (cfg.strategies.empty()) throw ParameterError("no strategies configured");
    if (p_grid.empty()) throw ParameterError("p grid must be non-empty");
    for (double p : p_grid)
        if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p grid values must lie in [0, 1]");
    const double p_max = *std::max_element(p_grid.begin(), p_grid.end());
    const StopRule stop = StopRule::budget(p_max);

    const double rho = cfg.rho_list.front();
    const double sigma = cfg.sigma_list.front();
    const auto base = make_instance(cfg, rho, sigma, 0);
    const std::size_t ns = cfg.strategies.size();

    // coverage[gen][strategy][p index]
    std::vector<std::vector<std::vector<double>>> coverage(
        cfg.realizations, std::vector<std::vector<double>>(ns, std::vector<double>(p_grid.size(), 0.0)));
    const auto split = split_workers(cfg.workers, cfg.realizations);
    parallel_chunks(cfg.realizations, split.outer, [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t gen = begin; gen < end; ++gen) {
            const std::uint64_t gen_seed = realization_seed(cfg.master_seed, gen);
            const auto phi = make_thresholds(cfg, sigma, derive_seed(gen_seed, {tag(Stream::thresholds)}));
            const Instance inst = Instance::make(base.graph, phi);
            for (std::size_t k = 0; k < ns; ++k) {
                const auto traj =
                    run_strategy(cfg.strategies[k], inst, stop, cfg.gpi, strategy_seed(gen_seed, k), split.inner);
                for (std::size_t pi = 0; pi < p_grid.size(); ++pi) coverage[gen][k][pi] = coverage_at(traj, p_grid[pi]);
            }
        }
    });

    BestProbResult out;
    for (std::size_t gen = 0; gen < cfg.realizations; ++gen)
        for (std::size_t k = 0; k < ns; ++k)
            for (std::size_t pi = 0; pi < p_grid.size(); ++pi)
                out.runs.push_back({gen, cfg.strategies[k].label(), p_grid[pi], coverage[gen][k][pi]});

    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        std::vector<double> share(ns, 0.0);
        for (std::size_t gen = 0; gen < cfg.realizations; ++gen) {
            double best = -1.0;
            for (std::size_t k = 0; k < ns; ++k) best = std::max(best, coverage[gen][k][pi]);
            std::size_t ties = 0;
            for (std::size_t k = 0; k < ns; ++k) ties += coverage[gen][k][pi] == best ? 1 : 0;
            for (std::size_t k = 0; k < ns; ++k)
                if (coverage[gen][k][pi] == best) share[k] += 1.0 / static_cast<double>(ties);
        }
        for (std::size_t k = 0; k < ns; ++k)
            out.table.push_back({p_grid[pi], cfg.strategies[k].label(), share[k] / static_cast<double>(cfg.realizations)});
    }
    return out;
}

GpiSweepResult gpi_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& v_list,
                         const std::vector<double>& s_list, std::size_t repeats) {
    cfg.validate();
    if (v_list.empty() || s_list.empty()) throw ParameterError("v and s lists must be non-empty");
    if (repeats < 1) throw ParameterError("repeats must be >= 1");
    if (cfg.stop.kind != StopRule::Kind::goal) throw ParameterError("GPI sweep needs a goal stop rule");

    const auto ex = make_instance(cfg, cfg.rho_list.front(), cfg.sigma_list.front(), 0);
    const Instance inst = Instance::make(ex.graph, ex.phi);

    struct Job {
        std::size_t v;
        double s;
        std::size_t repeat;
    };
    std::vector<Job> jobs;
    for (std::size_t v : v_list)
        for (double s : s_list)
            for (std::size_t rep = 0; rep < repeats; ++rep) jobs.push_back({v, s, rep});

    std::vector<double> pcs(jobs.size(), 0.0);
    const auto split = split_workers(cfg.workers, jobs.size());
    parallel_chunks(jobs.size(), split.outer, [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            GpiParams p = cfg.gpi;
            p.v = jobs[j].v;
            p.s = jobs[j].s;
            p.s_goal = cfg.stop.fraction;
            p.workers = split.inner;
            // The GPI stream depends on the repeat only: every (v, s) cell sees the same seeds.
            const auto traj = gpi_select(inst, p, derive_seed(ex.realization_seed, {tag(Stream::strategy), jobs[j].repeat}));
            pcs[j] = traj.p_c.value_or(1.0);
        }
    });

    GpiSweepResult out;
    for (std::size_t j = 0; j < jobs.size(); ++j) out.rows.push_back({jobs[j].v, jobs[j].s, jobs[j].repeat, pcs[j]});
    for (std::size_t j = 0; j < jobs.size(); j += repeats) {
        std::vector<double> xs(pcs.begin() + static_cast<std::ptrdiff_t>(j),
                               pcs.begin() + static_cast<std::ptrdiff_t>(j + repeats));
        const auto st = mean_sd(xs);
        out.summary.push_back({jobs[j].v, jobs[j].s, st.mean, repeats, st.sd});
    }
    return out;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (x == 0.0) return "0";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, 16);
    std::string s(buf, ptr);
    return std::string(16 - s.size(), '0') + s;
}

// Labels such as bi(a,b,c) contain commas.
std::string quoted(const std::string& label) {
    return label.find(',') == std::string::npos ? label : "\"" + label + "\"";
}

}  // namespace

void write_comparison_csv(const std::vector<RunRecord>& rows, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "strategy,rho,sigma,instance_hash,realization_seed,p,S,wall_ms\n";
    for (const auto& r : rows)
        out << quoted(r.strategy) << ',' << format_number(r.rho) << ',' << format_number(r.sigma) << ','
            << hex64(r.instance_hash) << ',' << r.realization_seed << ',' << format_number(r.p) << ','
            << format_number(r.S) << ',' << format_number(std::round(r.wall_ms * 1000.0) / 1000.0) << '\n';
    finish(out, path);
}

void write_tuning_csv(const std::vector<TuningRecord>& rows, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "rho_target,sigma,realization_seed,rho,swap_count,proposals,converged\n";
    for (const auto& r : rows)
        out << format_number(r.rho_target) << ',' << format_number(r.sigma) << ',' << r.realization_seed << ',' << format_number(r.report.rho) << ','
            << r.report.swap_count << ',' << r.report.proposals << ',' << (r.report.converged ? 1 : 0) << '\n';
    finish(out, path);
}

void write_pc_csv(const std::vector<PcRow>& rows, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "strategy,rho,sigma,mean_pc,std_pc,count,missing\n";
    for (const auto& r : rows)
        out << quoted(r.strategy) << ',' << format_number(r.rho) << ',' << format_number(r.sigma) << ','
            << format_number(r.mean_pc) << ',' << format_number(r.std_pc) << ',' << r.count << ',' << r.missing << '\n';
    finish(out, path);
}

void write_weight_scan_csv(const WeightScanResult& r, const std::filesystem::path& surface,
                           const std::filesystem::path& argmin) {
    auto emit = [](const std::vector<WeightPoint>& pts, const std::filesystem::path& path) {
        auto out = open_csv(path);
        out << "rho,sigma,a,b,c,mean_pc,std_pc\n";
        for (const auto& w : pts)
            out << format_number(w.rho) << ',' << format_number(w.sigma) << ',' << format_number(w.a) << ','
                << format_number(w.b) << ',' << format_number(w.c) << ',' << format_number(w.mean_pc) << ','
                << format_number(w.std_pc) << '\n';
        finish(out, path);
    };
    emit(r.surface, surface);
    emit(r.argmin, argmin);
}

void write_best_prob_csv(const BestProbResult& r, const std::filesystem::path& table,
                         const std::filesystem::path& runs) {
    auto out = open_csv(table);
    out << "p,strategy,probability\n";
    for (const auto& row : r.table)
        out << format_number(row.p) << ',' << quoted(row.strategy) << ',' << format_number(row.probability) << '\n';
    finish(out, table);

    auto raw = open_csv(runs);
    raw << "generation,strategy,p,S\n";
    for (const auto& row : r.runs)
        raw << row.generation << ',' << quoted(row.strategy) << ',' << format_number(row.p) << ','
            << format_number(row.S) << '\n';
    finish(raw, runs);
}

void write_gpi_sweep_csv(const GpiSweepResult& r, const std::filesystem::path& rows,
                         const std::filesystem::path& summary) {
    auto out = open_csv(rows);
    out << "v,s,repeat,p_c\n";
    for (const auto& row : r.rows)
        out << row.v << ',' << format_number(row.s) << ',' << row.repeat << ',' << format_number(row.p_c) << '\n';
    finish(out, rows);

    auto sum = open_csv(summary);
    sum << "v,s,mean_pc,std_pc,count\n";
    for (const auto& row : r.summary)
        sum << row.v << ',' << format_number(row.s) << ',' << format_number(row.mean_pc) << ','
            << format_number(row.std_pc) << ',' << row.count << '\n';
    finish(sum, summary);
}

void write_pc_gnuplot(const std::vector<PcRow>& rows, const std::filesystem::path& path) {
    auto out = open_csv(path);
    std::vector<std::string> seen;
    for (const auto& r : rows)
        if (std::find(seen.begin(), seen.end(), r.strategy) == seen.end()) seen.push_back(r.strategy);
    // One gnuplot index block per strategy: "rho sigma mean_pc std_pc".
    for (const auto& name : seen) {
        out << "# " << name << '\n';
        for (const auto& r : rows)
            if (r.strategy == name)
                out << format_number(r.rho) << ' ' << format_number(r.sigma) << ' ' << format_number(r.mean_pc) << ' '
                    << format_number(r.std_pc) << '\n';
        out << "\n\n";
    }
    finish(out, path);
}

}  // namespace ltm
