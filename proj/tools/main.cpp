// Command-line front end: campaigns, single snapshots, the solver
// equivalence suite, LP-format model export, and power calibration.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmudn/config.hpp"
#include "mmudn/experiments.hpp"
#include "mmudn/milp.hpp"
#include "mmudn/scenario.hpp"
#include "mmudn/sinr.hpp"
#include "mmudn/solver.hpp"

namespace {

using namespace mmudn;

// Unset flags keep sentinel values so config-file settings are only
// overridden when the user actually passed the option.
struct CommonArgs {
    std::string config_path;
    std::string seed_text;  // empty = unset (0 is a legal seed)
    int snapshots = -1;     // -1 = unset
    std::string solver;     // empty = unset (defaults differ per command)
    std::string out_dir = ".";
    double time_limit_s = 0.0;

    bool seed_set() const { return !seed_text.empty(); }
    std::uint64_t seed() const {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(seed_text, &used);
        if (used != seed_text.size()) throw std::runtime_error("--seed wants a 64-bit integer");
        return v;
    }
    bool snapshots_set() const { return snapshots >= 0; }
    bool solver_set() const { return !solver.empty(); }
};

SolverChoice parse_solver(const std::string& name) {
    if (name == "milp") return SolverChoice::kMilp;
    if (name == "brute") return SolverChoice::kBrute;
    if (name == "both") return SolverChoice::kBoth;
    throw std::runtime_error("unknown solver '" + name + "' (want milp, brute or both)");
}

KeyValueConfig load_config(const std::string& path) {
    KeyValueConfig cfg;
    if (!path.empty()) cfg = KeyValueConfig::parse_file(path);
    return cfg;
}

void write_file_checked(const std::filesystem::path& path,
                        const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writer(out);
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

int cmd_run(const CommonArgs& args) {
    if (args.config_path.empty()) throw std::runtime_error("run: --config is required");
    ExperimentSpec spec = ExperimentSpec::from_config(load_config(args.config_path));
    if (args.seed_set()) spec.scenario.base_seed = args.seed();
    if (args.snapshots_set()) spec.snapshots = args.snapshots;
    if (args.solver_set()) spec.solver = parse_solver(args.solver);
    if (args.time_limit_s > 0.0) spec.solve_time_limit_s = args.time_limit_s;
    if (args.out_dir != ".") spec.out_dir = args.out_dir;

    AggregateReport report = spec.campaign == Campaign::kElementBudget
                                 ? run_element_budget_sweep(spec)
                                 : run_densification_sweep(spec);
    for (const SweepPointStats& p : report.points) {
        std::printf(
            "point M=%d K=%d L=%d snr_db=%s: base_rate=%s opt_rate=%s gain=%s "
            "base_active=%s opt_active=%s limit_hits=%d\n",
            p.num_ans, p.num_ues, p.antennas, format_sig(p.snr_db).c_str(),
            format_sig(p.base_rate_mean).c_str(), format_sig(p.opt_rate_mean).c_str(),
            format_sig(p.relative_gain).c_str(), format_sig(p.base_active_mean).c_str(),
            format_sig(p.opt_active_mean).c_str(), p.limit_hits);
    }
    std::printf("wrote %s and %s\n",
                (std::filesystem::path(spec.out_dir) / "snapshots.csv").c_str(),
                (std::filesystem::path(spec.out_dir) / "aggregate.csv").c_str());
    return 0;
}

int cmd_snapshot(const CommonArgs& args) {
    ScenarioConfig cfg = scenario_from_config(load_config(args.config_path));
    if (args.seed_set()) cfg.base_seed = args.seed();
    SolverChoice solver = parse_solver(args.solver_set() ? args.solver : "milp");

    PowerConfig power = calibrate_power(cfg);
    BnBConfig bnb;
    bnb.time_limit_s = args.time_limit_s;
    SnapshotResult rec = run_snapshot(cfg, 0, solver, power, bnb);

    // Re-derive the associations for the CSV outputs (run_snapshot only
    // keeps the scalar record).
    ClusterTopology topo = generate_topology(cfg, 0);
    PathGainMatrix gains = compute_gain_matrix(topo, cfg, 0);
    Association base = baseline_association(gains);

    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path out(args.out_dir);
    write_file_checked(out / "topology.csv",
                       [&](std::ostream& os) { write_topology_csv(topo, os); });
    write_file_checked(out / "association_baseline.csv",
                       [&](std::ostream& os) { write_association_csv(base, os); });

    std::printf("snapshot seed=%llu M=%d K=%d L=%d snr_db=%s\n",
                static_cast<unsigned long long>(cfg.base_seed), cfg.num_ans, cfg.num_ues,
                cfg.antennas_per_an, format_sig(cfg.target_snr_db).c_str());
    std::printf("baseline min_rate=%s active_ans=%d\n",
                format_sig(rec.baseline_min_rate).c_str(), rec.baseline_active);

    if (solver == SolverChoice::kBrute) {
        BruteForceResult bf = brute_force_maxmin(gains, cfg.antennas_per_an,
                                                 power.per_an_power_linear);
        if (!bf.best.serving_an.empty()) {
            write_file_checked(out / "association_optimal.csv",
                               [&](std::ostream& os) { write_association_csv(bf.best, os); });
        }
    } else {
        MilpModel model = build_milp(gains, cfg.antennas_per_an, power.per_an_power_linear,
                                     choose_big_m(gains, cfg.antennas_per_an,
                                                  power.per_an_power_linear));
        SolveResult res = solve_milp(model, bnb);
        if (!res.incumbent.serving_an.empty()) {
            write_file_checked(out / "association_optimal.csv", [&](std::ostream& os) {
                write_association_csv(res.incumbent, os);
            });
        }
        if (solver == SolverChoice::kBoth) {
            BruteForceResult bf = brute_force_maxmin(gains, cfg.antennas_per_an,
                                                     power.per_an_power_linear);
            if (!bf.best.serving_an.empty()) {
                write_file_checked(out / "association_brute.csv", [&](std::ostream& os) {
                    write_association_csv(bf.best, os);
                });
            }
            double gap = std::abs(res.theta_star - bf.theta_star) /
                         (1.0 + std::abs(bf.theta_star));
            std::printf("comparison milp_theta=%s brute_theta=%s rel_gap=%s match=%s\n",
                        format_sig(res.theta_star).c_str(),
                        format_sig(bf.theta_star).c_str(), format_sig(gap).c_str(),
                        gap <= 1e-6 ? "yes" : "no");
        }
    }

    std::printf("optimal min_rate=%s active_ans=%d theta=%s status=%s nodes=%lld seconds=%s\n",
                rec.has_incumbent ? format_sig(rec.optimal_min_rate).c_str() : "-",
                rec.optimal_active, format_sig(rec.optimal_theta).c_str(),
                to_string(rec.status), rec.nodes, format_sig(rec.seconds).c_str());
    std::printf("wrote topology.csv and association CSVs to %s\n", args.out_dir.c_str());
    return 0;
}

// Oracle-equivalence suite: seeded instances cycling through the small grid
// where exhaustive enumeration stays cheap, each solved by both the tree
// search and brute force.
int cmd_verify(const CommonArgs& args) {
    ScenarioConfig base_cfg = scenario_from_config(load_config(args.config_path));
    if (args.seed_set()) base_cfg.base_seed = args.seed();
    const int instances = args.snapshots_set() ? args.snapshots : 100;
    if (instances <= 0) throw std::runtime_error("verify: --snapshots must be positive");

    const int m_grid[] = {2, 3, 4};
    const int k_grid[] = {2, 3, 4, 5, 6};
    const int l_grid[] = {16, 64};

    base_cfg.target_snr_db = 20.0;
    const double mean_gain = estimate_mean_gain(base_cfg, base_cfg.calibration_draws);

    BnBConfig bnb;
    bnb.time_limit_s = args.time_limit_s;

    int matched = 0;
    double max_gap = 0.0;
    for (int i = 0; i < instances; ++i) {
        ScenarioConfig cfg = base_cfg;
        cfg.num_ans = m_grid[i % 3];
        cfg.num_ues = k_grid[(i / 3) % 5];
        cfg.antennas_per_an = l_grid[(i / 15) % 2];
        ClusterTopology topo = generate_topology(cfg, static_cast<std::uint64_t>(i));
        PathGainMatrix gains = compute_gain_matrix(topo, cfg, static_cast<std::uint64_t>(i));
        PowerConfig power = power_from_mean_gain(cfg, mean_gain);

        EquivalenceReport rep = verify_equivalence(gains, cfg.antennas_per_an,
                                                   power.per_an_power_linear, bnb);
        max_gap = std::max(max_gap, rep.relative_gap);
        if (rep.relative_gap <= 1e-6 && rep.milp_incumbent_consistent &&
            rep.brute_incumbent_consistent) {
            ++matched;
        } else {
            std::fprintf(stderr,
                         "mismatch instance=%d M=%d K=%d L=%d milp_theta=%s brute_theta=%s "
                         "rel_gap=%s\n",
                         i, cfg.num_ans, cfg.num_ues, cfg.antennas_per_an,
                         format_sig(rep.theta_milp).c_str(),
                         format_sig(rep.theta_brute).c_str(),
                         format_sig(rep.relative_gap).c_str());
        }
    }

    if (matched == instances) {
        std::printf("%d/%d instances matched, max rel gap ≤ 1e-6\n", matched, instances);
        return 0;
    }
    std::fprintf(stderr, "error: verify: %d/%d instances matched, max rel gap = %s\n",
                 matched, instances, format_sig(max_gap).c_str());
    return 1;
}

int cmd_export_lp(const CommonArgs& args) {
    ScenarioConfig cfg = scenario_from_config(load_config(args.config_path));
    if (args.seed_set()) cfg.base_seed = args.seed();

    ClusterTopology topo = generate_topology(cfg, 0);
    PathGainMatrix gains = compute_gain_matrix(topo, cfg, 0);
    PowerConfig power = calibrate_power(cfg);
    MilpModel model = build_milp(gains, cfg.antennas_per_an, power.per_an_power_linear,
                                 choose_big_m(gains, cfg.antennas_per_an,
                                              power.per_an_power_linear));

    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path out(args.out_dir);
    write_file_checked(out / "model.lp", [&](std::ostream& os) { export_lp(model, os); });
    write_file_checked(out / "model_stats.csv",
                       [&](std::ostream& os) { write_model_stats_csv(model, os); });
    std::printf("wrote %s (%d binaries, %d continuous, %zu rows) and %s\n",
                (out / "model.lp").c_str(), model.vars.num_binaries(),
                model.vars.num_vars() - model.vars.num_binaries(), model.rows.size(),
                (out / "model_stats.csv").c_str());
    return 0;
}

int cmd_calibrate(const CommonArgs& args) {
    ScenarioConfig cfg = scenario_from_config(load_config(args.config_path));
    if (args.seed_set()) cfg.base_seed = args.seed();

    const double mean_gain = estimate_mean_gain(cfg, cfg.calibration_draws);
    PowerConfig power = power_from_mean_gain(cfg, mean_gain);
    std::printf("mean_gain=%s\n", format_sig(mean_gain).c_str());
    std::printf("noise_power_w=%s\n", format_sig(cfg.noise_power_w()).c_str());
    std::printf("total_power_w=%s\n", format_sig(power.total_power_linear).c_str());
    std::printf("per_an_power_w=%s\n", format_sig(power.per_an_power_linear).c_str());
    std::printf("target_snr_db=%s num_ans=%d draws=%lld\n",
                format_sig(cfg.target_snr_db).c_str(), cfg.num_ans,
                static_cast<long long>(cfg.calibration_draws));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultra-dense Massive-MIMO cluster simulator and max-min association optimizer"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub, bool with_snapshots, bool with_solver) {
        sub->add_option("--config", args.config_path, "key=value config file");
        sub->add_option("--seed", args.seed_text, "base seed (overrides config)");
        if (with_snapshots) {
            sub->add_option("--snapshots", args.snapshots, "snapshot / instance count");
        }
        if (with_solver) {
            sub->add_option("--solver", args.solver, "milp, brute or both")
                ->check(CLI::IsMember({"milp", "brute", "both"}));
        }
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--time-limit", args.time_limit_s, "per-solve wall limit [s]");
    };

    CLI::App* run = app.add_subcommand("run", "run a sweep campaign from a config file");
    add_common(run, true, true);
    CLI::App* snap = app.add_subcommand("snapshot", "solve one snapshot and dump CSVs");
    add_common(snap, false, true);
    CLI::App* verify = app.add_subcommand("verify", "tree search vs. brute force suite");
    add_common(verify, true, false);
    CLI::App* exportlp = app.add_subcommand("export-lp", "write the model in LP format");
    add_common(exportlp, false, false);
    CLI::App* calibrate = app.add_subcommand("calibrate", "print the power calibration");
    add_common(calibrate, false, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(args);
        if (snap->parsed()) return cmd_snapshot(args);
        if (verify->parsed()) return cmd_verify(args);
        if (exportlp->parsed()) return cmd_export_lp(args);
        if (calibrate->parsed()) return cmd_calibrate(args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
