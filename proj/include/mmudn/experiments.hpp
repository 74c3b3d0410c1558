#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmudn/config.hpp"
#include "mmudn/scenario.hpp"
#include "mmudn/solver.hpp"

namespace mmudn {

enum class Campaign { kDensification, kElementBudget, kSingle };
enum class SolverChoice { kMilp, kBrute, kBoth };

struct ExperimentSpec {
    Campaign campaign = Campaign::kDensification;
    // Densification sweep: all (M, L) combinations at each target SNR.
    std::vector<int> m_values = {2, 4, 6, 8, 10};
    std::vector<int> l_values = {100, 150, 200, 250};
    std::vector<double> snr_values_db = {30.0};
    // Element-budget sweep: explicit (M, L) pairs with M*L ~ budget.
    std::vector<std::pair<int, int>> budget_pairs = {{2, 250}, {4, 125}, {6, 83}, {10, 50}};
    int snapshots = 200;
    ScenarioConfig scenario;  // K, radii, pathloss, seed, ... (M/L/SNR overridden per point)
    SolverChoice solver = SolverChoice::kMilp;
    std::string out_dir = ".";
    double solve_time_limit_s = 0.0;   // per snapshot solve; 0 = none
    // Per-solve node budget (0 = solver default). Unlike a wall-clock limit
    // this keeps budgeted sweeps bit-reproducible.
    long long solve_node_limit = 0;
    bool emit_svg = true;

    static ExperimentSpec from_config(const KeyValueConfig& cfg);
};

// One solved snapshot: the baseline scheme and the optimized scheme on the
// same topology and power.
struct SnapshotResult {
    std::uint64_t snapshot_index = 0;
    int num_ans = 0, num_ues = 0, antennas = 0;
    double snr_db = 0.0;
    double baseline_min_rate = 0.0;
    double baseline_min_sinr = 0.0;
    int baseline_active = 0;
    double optimal_min_rate = 0.0;
    double optimal_theta = 0.0;
    int optimal_active = 0;
    SolveStatus status = SolveStatus::kOptimal;
    bool has_incumbent = true;
    long long nodes = 0;
    double seconds = 0.0;
};

struct SweepPointStats {
    int num_ans = 0, num_ues = 0, antennas = 0;
    double snr_db = 0.0;
    int snapshots = 0;
    double base_rate_mean = 0.0, base_rate_ci = 0.0;
    double opt_rate_mean = 0.0, opt_rate_ci = 0.0;
    double base_active_mean = 0.0, opt_active_mean = 0.0;
    double relative_gain = 0.0;  // (opt - base) / base on the means
    double mean_nodes = 0.0, mean_seconds = 0.0;
    int limit_hits = 0;  // snapshots whose solve stopped at a limit
};

struct AggregateReport {
    std::vector<SweepPointStats> points;
    std::vector<SnapshotResult> snapshots;
};

// Solves one snapshot end to end: topology, gains, power, baseline
// evaluation, optimized association via the chosen solver.
SnapshotResult run_snapshot(const ScenarioConfig& cfg, std::uint64_t snapshot_index,
                            SolverChoice solver, const PowerConfig& power,
                            const BnBConfig& bnb);

// The two campaigns. Snapshot loops are OpenMP-parallel with pre-assigned
// seeds; outputs are deterministic regardless of execution order. Files
// written to spec.out_dir: snapshots.csv, aggregate.csv, optional SVGs.
AggregateReport run_densification_sweep(const ExperimentSpec& spec);
AggregateReport run_element_budget_sweep(const ExperimentSpec& spec);

// Serial reference for the parallel snapshot batch (benchmark comparisons
// and equality tests).
std::vector<SnapshotResult> run_snapshot_batch(const ScenarioConfig& cfg, int snapshots,
                                               SolverChoice solver, const PowerConfig& power,
                                               const BnBConfig& bnb, bool parallel);

void write_snapshots_csv(const AggregateReport& report, std::ostream& out);
void write_aggregate_csv(const AggregateReport& report, std::ostream& out);

ScenarioConfig scenario_from_config(const KeyValueConfig& cfg);

}  // namespace mmudn
