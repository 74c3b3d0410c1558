#include "mmudn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "mmudn/milp.hpp"
#include "mmudn/svg.hpp"

namespace mmudn {

namespace {

double elapsed_s(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Every key either function below understands. Both readers validate against
// the union so a scenario-only file may carry campaign keys and vice versa,
// but a misspelled key always fails loudly.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        // scenario
        "num_ans", "num_ues", "antennas_per_an", "target_snr_db",
        "an_drop_radius_m", "ue_drop_radius_m", "min_pair_distance_m",
        "carrier_ghz", "noise_density_dbm_hz", "bandwidth_mhz",
        "pathloss_dist", "pathloss_offset", "pathloss_freq",
        "shadowing_sigma_db", "calibration_draws", "base_seed",
        // campaign
        "campaign", "m_values", "l_values", "snr_values_db", "budget_pairs",
        "snapshots", "solver", "out_dir", "solve_time_limit_s",
        "solve_node_limit", "emit_svg",
    };
    return keys;
}

void reject_unknown_keys(const KeyValueConfig& cfg) {
    for (const auto& [key, value] : cfg.entries()) {
        if (!known_keys().count(key)) {
            throw std::runtime_error("unknown config key '" + key + "'");
        }
    }
}

std::vector<int> int_list(const KeyValueConfig& cfg, const std::string& key) {
    std::vector<int> out;
    for (double v : cfg.get_list(key)) {
        int i = static_cast<int>(std::llround(v));
        if (std::abs(v - i) > 1e-9 || i <= 0) {
            throw std::runtime_error("config key '" + key + "' wants positive integers");
        }
        out.push_back(i);
    }
    if (out.empty()) throw std::runtime_error("config key '" + key + "' is empty");
    return out;
}

SolveStatus solve_into(SnapshotResult& rec, const ScenarioConfig& cfg,
                       const PathGainMatrix& gains, SolverChoice solver,
                       const PowerConfig& power, const BnBConfig& bnb) {
    const double p = power.per_an_power_linear;

    SolveResult milp;
    bool ran_milp = false;
    if (solver == SolverChoice::kMilp || solver == SolverChoice::kBoth) {
        MilpModel model = build_milp(gains, cfg.antennas_per_an, p, choose_big_m(gains, cfg.antennas_per_an, p));
        milp = solve_milp(model, bnb);
        ran_milp = true;
    }

    BruteForceResult brute;
    bool ran_brute = false;
    if (solver == SolverChoice::kBrute || solver == SolverChoice::kBoth) {
        brute = brute_force_maxmin(gains, cfg.antennas_per_an, p);
        ran_brute = true;
    }

    if (ran_milp && ran_brute && milp.status == SolveStatus::kOptimal) {
        const bool brute_feasible = !brute.best.serving_an.empty();
        const bool milp_feasible = !milp.incumbent.serving_an.empty();
        double gap = std::numeric_limits<double>::infinity();
        if (brute_feasible && milp_feasible) {
            gap = std::abs(milp.theta_star - brute.theta_star) / (1.0 + std::abs(brute.theta_star));
        } else if (!brute_feasible && !milp_feasible) {
            gap = 0.0;
        }
        if (gap > 1e-6) {
            throw std::runtime_error("solver cross-check failed: tree search and exhaustive "
                                     "search disagree on snapshot " + std::to_string(rec.snapshot_index));
        }
    }

    if (ran_milp) {
        rec.nodes = milp.nodes_explored;
        rec.has_incumbent = !milp.incumbent.serving_an.empty();
        if (rec.has_incumbent) {
            RateReport rep = evaluate_association(milp.incumbent, gains, cfg.antennas_per_an, p);
            rec.optimal_min_rate = rep.min_rate;
            rec.optimal_active = rep.active_an_count;
            rec.optimal_theta = milp.theta_star;
        }
        return milp.status;
    }

    rec.nodes = static_cast<long long>(brute.evaluated);
    rec.has_incumbent = !brute.best.serving_an.empty();
    if (rec.has_incumbent) {
        RateReport rep = evaluate_association(brute.best, gains, cfg.antennas_per_an, p);
        rec.optimal_min_rate = rep.min_rate;
        rec.optimal_active = rep.active_an_count;
        rec.optimal_theta = brute.theta_star;
        return SolveStatus::kOptimal;
    }
    return SolveStatus::kInfeasible;
}

SweepPointStats summarize(const ScenarioConfig& cfg, const std::vector<SnapshotResult>& batch) {
    SweepPointStats s;
    s.num_ans = cfg.num_ans;
    s.num_ues = cfg.num_ues;
    s.antennas = cfg.antennas_per_an;
    s.snr_db = cfg.target_snr_db;
    s.snapshots = static_cast<int>(batch.size());

    auto mean_ci = [](const std::vector<double>& xs, double& mean, double& ci) {
        mean = 0.0;
        ci = 0.0;
        if (xs.empty()) return;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        if (xs.size() < 2) return;
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        ci = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
    };

    std::vector<double> base_rate, opt_rate, base_active, opt_active, nodes, seconds;
    for (const SnapshotResult& r : batch) {
        base_rate.push_back(r.baseline_min_rate);
        base_active.push_back(static_cast<double>(r.baseline_active));
        nodes.push_back(static_cast<double>(r.nodes));
        seconds.push_back(r.seconds);
        if (r.status == SolveStatus::kFeasibleLimit) ++s.limit_hits;
        // A snapshot enters the optimized-scheme means only when a feasible
        // association exists for it (it always does away from overload).
        if (r.has_incumbent) {
            opt_rate.push_back(r.optimal_min_rate);
            opt_active.push_back(static_cast<double>(r.optimal_active));
        }
    }
    double dummy = 0.0;
    mean_ci(base_rate, s.base_rate_mean, s.base_rate_ci);
    mean_ci(opt_rate, s.opt_rate_mean, s.opt_rate_ci);
    mean_ci(base_active, s.base_active_mean, dummy);
    mean_ci(opt_active, s.opt_active_mean, dummy);
    mean_ci(nodes, s.mean_nodes, dummy);
    mean_ci(seconds, s.mean_seconds, dummy);
    s.relative_gain = s.base_rate_mean > 0.0
                          ? (s.opt_rate_mean - s.base_rate_mean) / s.base_rate_mean
                          : 0.0;
    return s;
}

BnBConfig bnb_from_spec(const ExperimentSpec& spec) {
    BnBConfig bnb;
    bnb.time_limit_s = spec.solve_time_limit_s;
    if (spec.solve_node_limit > 0) bnb.node_limit = spec.solve_node_limit;
    return bnb;
}

std::string label(const char* prefix, int m, int l, bool with_m, bool with_l) {
    char buf[64];
    if (with_m && with_l) {
        std::snprintf(buf, sizeof buf, "%s %dx%d", prefix, m, l);
    } else if (with_l) {
        std::snprintf(buf, sizeof buf, "%s L=%d", prefix, l);
    } else {
        std::snprintf(buf, sizeof buf, "%s M=%d", prefix, m);
    }
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << body;
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void emit_csvs(const ExperimentSpec& spec, const AggregateReport& report) {
    std::filesystem::create_directories(spec.out_dir);
    {
        std::ofstream out(std::filesystem::path(spec.out_dir) / "snapshots.csv");
        if (!out) throw std::runtime_error("cannot open snapshots.csv in " + spec.out_dir);
        write_snapshots_csv(report, out);
    }
    {
        std::ofstream out(std::filesystem::path(spec.out_dir) / "aggregate.csv");
        if (!out) throw std::runtime_error("cannot open aggregate.csv in " + spec.out_dir);
        write_aggregate_csv(report, out);
    }
}

// Densification charts: x axis is the number of ANs, one optimized and one
// baseline line per antenna count, one file pair per SNR value.
void emit_densification_svgs(const ExperimentSpec& spec, const AggregateReport& report) {
    for (double snr : spec.snr_values_db) {
        LineChart rate, active;
        char title[96];
        std::snprintf(title, sizeof title, "Worst-UE rate vs. deployment size (SNR %g dB)", snr);
        rate.title = title;
        rate.x_label = "access nodes";
        rate.y_label = "min rate [bit/s/Hz]";
        std::snprintf(title, sizeof title, "Active access nodes vs. deployment size (SNR %g dB)", snr);
        active.title = title;
        active.x_label = "access nodes";
        active.y_label = "mean active ANs";

        for (int l : spec.l_values) {
            ChartSeries opt_rate{label("opt", 0, l, false, true), {}, {}};
            ChartSeries base_rate{label("base", 0, l, false, true), {}, {}};
            ChartSeries opt_act = opt_rate, base_act = base_rate;
            for (const SweepPointStats& p : report.points) {
                if (p.antennas != l || p.snr_db != snr) continue;
                opt_rate.x.push_back(p.num_ans);
                opt_rate.y.push_back(p.opt_rate_mean);
                base_rate.x.push_back(p.num_ans);
                base_rate.y.push_back(p.base_rate_mean);
                opt_act.x.push_back(p.num_ans);
                opt_act.y.push_back(p.opt_active_mean);
                base_act.x.push_back(p.num_ans);
                base_act.y.push_back(p.base_active_mean);
            }
            if (opt_rate.x.empty()) continue;
            rate.series.push_back(std::move(opt_rate));
            rate.series.push_back(std::move(base_rate));
            active.series.push_back(std::move(opt_act));
            active.series.push_back(std::move(base_act));
        }
        if (rate.series.empty()) continue;

        char name[64];
        std::snprintf(name, sizeof name, "rate_vs_m_snr%g.svg", snr);
        std::string svg;
        {
            std::ostringstream os;
            write_svg(rate, os);
            svg = os.str();
        }
        write_text_file(std::filesystem::path(spec.out_dir) / name, svg);
        std::snprintf(name, sizeof name, "active_vs_m_snr%g.svg", snr);
        {
            std::ostringstream os;
            write_svg(active, os);
            svg = os.str();
        }
        write_text_file(std::filesystem::path(spec.out_dir) / name, svg);
    }
}

// Element-budget charts: x axis is the target SNR, one line pair per (M, L)
// configuration sharing the antenna budget.
void emit_budget_svgs(const ExperimentSpec& spec, const AggregateReport& report) {
    LineChart rate, active;
    rate.title = "Worst-UE rate vs. target SNR (fixed antenna budget)";
    rate.x_label = "target SNR [dB]";
    rate.y_label = "min rate [bit/s/Hz]";
    active.title = "Active access nodes vs. target SNR (fixed antenna budget)";
    active.x_label = "target SNR [dB]";
    active.y_label = "mean active ANs";

    for (const auto& [m, l] : spec.budget_pairs) {
        ChartSeries opt_rate{label("opt", m, l, true, true), {}, {}};
        ChartSeries base_rate{label("base", m, l, true, true), {}, {}};
        ChartSeries opt_act = opt_rate, base_act = base_rate;
        for (const SweepPointStats& p : report.points) {
            if (p.num_ans != m || p.antennas != l) continue;
            opt_rate.x.push_back(p.snr_db);
            opt_rate.y.push_back(p.opt_rate_mean);
            base_rate.x.push_back(p.snr_db);
            base_rate.y.push_back(p.base_rate_mean);
            opt_act.x.push_back(p.snr_db);
            opt_act.y.push_back(p.opt_active_mean);
            base_act.x.push_back(p.snr_db);
            base_act.y.push_back(p.base_active_mean);
        }
        if (opt_rate.x.empty()) continue;
        rate.series.push_back(std::move(opt_rate));
        rate.series.push_back(std::move(base_rate));
        active.series.push_back(std::move(opt_act));
        active.series.push_back(std::move(base_act));
    }
    if (rate.series.empty()) return;

    std::string svg;
    {
        std::ostringstream os;
        write_svg(rate, os);
        svg = os.str();
    }
    write_text_file(std::filesystem::path(spec.out_dir) / "rate_vs_snr.svg", svg);
    {
        std::ostringstream os;
        write_svg(active, os);
        svg = os.str();
    }
    write_text_file(std::filesystem::path(spec.out_dir) / "active_vs_snr.svg", svg);
}

}  // namespace

SnapshotResult run_snapshot(const ScenarioConfig& cfg, std::uint64_t snapshot_index,
                            SolverChoice solver, const PowerConfig& power,
                            const BnBConfig& bnb) {
    ClusterTopology topo = generate_topology(cfg, snapshot_index);
    PathGainMatrix gains = compute_gain_matrix(topo, cfg, snapshot_index);

    SnapshotResult rec;
    rec.snapshot_index = snapshot_index;
    rec.num_ans = cfg.num_ans;
    rec.num_ues = cfg.num_ues;
    rec.antennas = cfg.antennas_per_an;
    rec.snr_db = cfg.target_snr_db;

    Association base = baseline_association(gains);
    RateReport base_rep = evaluate_association(base, gains, cfg.antennas_per_an,
                                               power.per_an_power_linear);
    rec.baseline_min_rate = base_rep.min_rate;
    rec.baseline_min_sinr = base_rep.min_sinr;
    rec.baseline_active = base_rep.active_an_count;

    auto t0 = std::chrono::steady_clock::now();
    rec.status = solve_into(rec, cfg, gains, solver, power, bnb);
    rec.seconds = elapsed_s(t0);
    return rec;
}

std::vector<SnapshotResult> run_snapshot_batch(const ScenarioConfig& cfg, int snapshots,
                                               SolverChoice solver, const PowerConfig& power,
                                               const BnBConfig& bnb, bool parallel) {
    std::vector<SnapshotResult> results(static_cast<std::size_t>(std::max(snapshots, 0)));
    std::vector<std::exception_ptr> errors(results.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < snapshots; ++i) {
        try {
            results[static_cast<std::size_t>(i)] =
                run_snapshot(cfg, static_cast<std::uint64_t>(i), solver, power, bnb);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

namespace {

// Shared sweep core: one point per (M, L, SNR) triple, all points reusing a
// single mean-gain estimate (the fading statistics do not depend on M, L or
// the SNR target, so recalibrating per point would only add noise).
AggregateReport run_points(const ExperimentSpec& spec,
                           const std::vector<std::pair<int, int>>& ml_pairs) {
    spec.scenario.validate();
    if (spec.snapshots <= 0) throw std::invalid_argument("snapshots must be positive");
    if (spec.snr_values_db.empty()) throw std::invalid_argument("no SNR values given");

    const double mean_gain = estimate_mean_gain(spec.scenario, spec.scenario.calibration_draws);
    const BnBConfig bnb = bnb_from_spec(spec);

    AggregateReport report;
    for (double snr : spec.snr_values_db) {
        for (const auto& [m, l] : ml_pairs) {
            ScenarioConfig cfg = spec.scenario;
            cfg.num_ans = m;
            cfg.antennas_per_an = l;
            cfg.target_snr_db = snr;
            cfg.validate();
            PowerConfig power = power_from_mean_gain(cfg, mean_gain);
            std::vector<SnapshotResult> batch =
                run_snapshot_batch(cfg, spec.snapshots, spec.solver, power, bnb, true);
            report.points.push_back(summarize(cfg, batch));
            report.snapshots.insert(report.snapshots.end(), batch.begin(), batch.end());
        }
    }
    return report;
}

}  // namespace

AggregateReport run_densification_sweep(const ExperimentSpec& spec) {
    if (spec.m_values.empty() || spec.l_values.empty()) {
        throw std::invalid_argument("densification sweep needs m_values and l_values");
    }
    std::vector<std::pair<int, int>> pairs;
    for (int m : spec.m_values) {
        for (int l : spec.l_values) pairs.emplace_back(m, l);
    }
    AggregateReport report = run_points(spec, pairs);
    emit_csvs(spec, report);
    if (spec.emit_svg) emit_densification_svgs(spec, report);
    return report;
}

AggregateReport run_element_budget_sweep(const ExperimentSpec& spec) {
    if (spec.budget_pairs.empty()) {
        throw std::invalid_argument("element-budget sweep needs budget_pairs");
    }
    AggregateReport report = run_points(spec, spec.budget_pairs);
    emit_csvs(spec, report);
    if (spec.emit_svg) emit_budget_svgs(spec, report);
    return report;
}

void write_snapshots_csv(const AggregateReport& report, std::ostream& out) {
    out << "seed,M,K,L,snr_db,scheme,min_rate,active_ans,theta,status,nodes,seconds\n";
    for (const SnapshotResult& r : report.snapshots) {
        const std::string head = std::to_string(r.snapshot_index) + ',' +
                                 std::to_string(r.num_ans) + ',' +
                                 std::to_string(r.num_ues) + ',' +
                                 std::to_string(r.antennas) + ',' + format_sig(r.snr_db) + ',';
        out << head << "baseline," << format_sig(r.baseline_min_rate) << ','
            << r.baseline_active << ',' << format_sig(r.baseline_min_sinr) << ",-,0,0\n";
        out << head << "optimal,";
        if (r.has_incumbent) {
            out << format_sig(r.optimal_min_rate) << ',' << r.optimal_active << ','
                << format_sig(r.optimal_theta);
        } else {
            out << "-,-,-";
        }
        out << ',' << to_string(r.status) << ',' << r.nodes << ','
            << format_sig(r.seconds) << '\n';
    }
}

void write_aggregate_csv(const AggregateReport& report, std::ostream& out) {
    out << "M,K,L,snr_db,snapshots,base_rate_mean,base_rate_ci,opt_rate_mean,opt_rate_ci,"
           "base_active_mean,opt_active_mean,relative_gain,mean_nodes,mean_seconds,limit_hits\n";
    for (const SweepPointStats& p : report.points) {
        out << p.num_ans << ',' << p.num_ues << ',' << p.antennas << ','
            << format_sig(p.snr_db) << ',' << p.snapshots << ','
            << format_sig(p.base_rate_mean) << ',' << format_sig(p.base_rate_ci) << ','
            << format_sig(p.opt_rate_mean) << ',' << format_sig(p.opt_rate_ci) << ','
            << format_sig(p.base_active_mean) << ',' << format_sig(p.opt_active_mean) << ','
            << format_sig(p.relative_gain) << ',' << format_sig(p.mean_nodes) << ','
            << format_sig(p.mean_seconds) << ',' << p.limit_hits << '\n';
    }
}

ScenarioConfig scenario_from_config(const KeyValueConfig& cfg) {
    reject_unknown_keys(cfg);
    ScenarioConfig sc;
    sc.num_ans = static_cast<int>(cfg.get_int("num_ans", sc.num_ans));
    sc.num_ues = static_cast<int>(cfg.get_int("num_ues", sc.num_ues));
    sc.antennas_per_an = static_cast<int>(cfg.get_int("antennas_per_an", sc.antennas_per_an));
    sc.target_snr_db = cfg.get_double("target_snr_db", sc.target_snr_db);
    sc.an_drop_radius_m = cfg.get_double("an_drop_radius_m", sc.an_drop_radius_m);
    sc.ue_drop_radius_m = cfg.get_double("ue_drop_radius_m", sc.ue_drop_radius_m);
    sc.min_pair_distance_m = cfg.get_double("min_pair_distance_m", sc.min_pair_distance_m);
    sc.carrier_ghz = cfg.get_double("carrier_ghz", sc.carrier_ghz);
    sc.noise_density_dbm_hz = cfg.get_double("noise_density_dbm_hz", sc.noise_density_dbm_hz);
    sc.bandwidth_mhz = cfg.get_double("bandwidth_mhz", sc.bandwidth_mhz);
    sc.pathloss.dist = cfg.get_double("pathloss_dist", sc.pathloss.dist);
    sc.pathloss.offset = cfg.get_double("pathloss_offset", sc.pathloss.offset);
    sc.pathloss.freq = cfg.get_double("pathloss_freq", sc.pathloss.freq);
    sc.shadowing_sigma_db = cfg.get_double("shadowing_sigma_db", sc.shadowing_sigma_db);
    sc.calibration_draws = cfg.get_int("calibration_draws", sc.calibration_draws);
    sc.base_seed = cfg.get_uint64("base_seed", sc.base_seed);
    sc.validate();
    return sc;
}

ExperimentSpec ExperimentSpec::from_config(const KeyValueConfig& cfg) {
    ExperimentSpec spec;
    spec.scenario = scenario_from_config(cfg);  // also rejects unknown keys

    const std::string campaign = cfg.get_string("campaign", "densification");
    if (campaign == "densification") {
        spec.campaign = Campaign::kDensification;
    } else if (campaign == "element_budget") {
        spec.campaign = Campaign::kElementBudget;
    } else if (campaign == "single") {
        spec.campaign = Campaign::kSingle;
    } else {
        throw std::runtime_error("unknown campaign '" + campaign + "'");
    }

    if (cfg.has("m_values")) spec.m_values = int_list(cfg, "m_values");
    if (cfg.has("l_values")) spec.l_values = int_list(cfg, "l_values");
    if (cfg.has("snr_values_db")) {
        spec.snr_values_db = cfg.get_list("snr_values_db");
        if (spec.snr_values_db.empty()) throw std::runtime_error("snr_values_db is empty");
    } else if (spec.campaign == Campaign::kElementBudget) {
        spec.snr_values_db = {10.0, 20.0, 30.0};
    }
    if (cfg.has("budget_pairs")) {
        spec.budget_pairs.clear();
        for (const auto& [m, l] : cfg.get_pairs("budget_pairs")) {
            if (m <= 0 || l <= 0) throw std::runtime_error("budget_pairs wants positive MxL");
            spec.budget_pairs.push_back({m, l});
        }
        if (spec.budget_pairs.empty()) throw std::runtime_error("budget_pairs is empty");
    }
    if (spec.campaign == Campaign::kSingle) {
        spec.m_values = {spec.scenario.num_ans};
        spec.l_values = {spec.scenario.antennas_per_an};
        spec.snr_values_db = {spec.scenario.target_snr_db};
    }

    spec.snapshots = static_cast<int>(cfg.get_int("snapshots", spec.snapshots));
    const std::string solver = cfg.get_string("solver", "milp");
    if (solver == "milp") {
        spec.solver = SolverChoice::kMilp;
    } else if (solver == "brute") {
        spec.solver = SolverChoice::kBrute;
    } else if (solver == "both") {
        spec.solver = SolverChoice::kBoth;
    } else {
        throw std::runtime_error("unknown solver '" + solver + "' (want milp, brute or both)");
    }
    spec.out_dir = cfg.get_string("out_dir", spec.out_dir);
    spec.solve_time_limit_s = cfg.get_double("solve_time_limit_s", spec.solve_time_limit_s);
    spec.solve_node_limit = cfg.get_int("solve_node_limit", spec.solve_node_limit);
    spec.emit_svg = cfg.get_bool("emit_svg", spec.emit_svg);
    return spec;
}

}  // namespace mmudn
