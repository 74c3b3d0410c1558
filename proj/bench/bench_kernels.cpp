// Compares the OpenMP kernels against their serial reference twins: the
// spatial mean-gain estimator, the exhaustive association search, and the
// snapshot batch runner. The pairs are proven bitwise-equal in the unit
// suite; this target shows what the parallel versions buy on this machine.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "mmudn/experiments.hpp"
#include "mmudn/scenario.hpp"
#include "mmudn/solver.hpp"

using namespace mmudn;

namespace {

ScenarioConfig bench_scenario(int num_ans, int num_ues, int antennas) {
    ScenarioConfig cfg;
    cfg.num_ans = num_ans;
    cfg.num_ues = num_ues;
    cfg.antennas_per_an = antennas;
    cfg.target_snr_db = 20.0;
    cfg.calibration_draws = 1'000'000;  // benchmark fixtures need no precision
    cfg.base_seed = 42;
    return cfg;
}

void BM_mean_gain_serial(benchmark::State& state) {
    const ScenarioConfig cfg = bench_scenario(4, 8, 64);
    const long long draws = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_mean_gain_serial(cfg, draws));
    }
    state.SetItemsProcessed(state.iterations() * draws);
}

void BM_mean_gain_parallel(benchmark::State& state) {
    const ScenarioConfig cfg = bench_scenario(4, 8, 64);
    const long long draws = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_mean_gain(cfg, draws));
    }
    state.SetItemsProcessed(state.iterations() * draws);
}

void BM_brute_force_serial(benchmark::State& state) {
    const ScenarioConfig cfg = bench_scenario(4, static_cast<int>(state.range(0)), 64);
    const ClusterTopology topo = generate_topology(cfg, 0);
    const PathGainMatrix gains = compute_gain_matrix(topo, cfg, 0);
    const double power = calibrate_power(cfg).per_an_power_linear;
    unsigned long long evaluated = 0;
    for (auto _ : state) {
        BruteForceResult res =
            brute_force_maxmin_serial(gains, cfg.antennas_per_an, power);
        evaluated = res.evaluated;
        benchmark::DoNotOptimize(res.theta_star);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(evaluated));
}

void BM_brute_force_parallel(benchmark::State& state) {
    const ScenarioConfig cfg = bench_scenario(4, static_cast<int>(state.range(0)), 64);
    const ClusterTopology topo = generate_topology(cfg, 0);
    const PathGainMatrix gains = compute_gain_matrix(topo, cfg, 0);
    const double power = calibrate_power(cfg).per_an_power_linear;
    unsigned long long evaluated = 0;
    for (auto _ : state) {
        BruteForceResult res = brute_force_maxmin(gains, cfg.antennas_per_an, power);
        evaluated = res.evaluated;
        benchmark::DoNotOptimize(res.theta_star);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(evaluated));
}

void BM_snapshot_batch_serial(benchmark::State& state) {
    const ScenarioConfig cfg = bench_scenario(3, 6, 32);
    const PowerConfig power = calibrate_power(cfg);
    const BnBConfig bnb;
    const int snapshots = static_cast<int>(state.range(0));
    for (auto _ : state) {
        std::vector<SnapshotResult> out = run_snapshot_batch(
            cfg, snapshots, SolverChoice::kMilp, power, bnb, false);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * snapshots);
}

void BM_snapshot_batch_parallel(benchmark::State& state) {
    const ScenarioConfig cfg = bench_scenario(3, 6, 32);
    const PowerConfig power = calibrate_power(cfg);
    const BnBConfig bnb;
    const int snapshots = static_cast<int>(state.range(0));
    for (auto _ : state) {
        std::vector<SnapshotResult> out = run_snapshot_batch(
            cfg, snapshots, SolverChoice::kMilp, power, bnb, true);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * snapshots);
}

}  // namespace

BENCHMARK(BM_mean_gain_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_mean_gain_parallel)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_brute_force_serial)->Arg(7)->Arg(8);
BENCHMARK(BM_brute_force_parallel)->Arg(7)->Arg(8);
BENCHMARK(BM_snapshot_batch_serial)->Arg(8);
BENCHMARK(BM_snapshot_batch_parallel)->Arg(8);

BENCHMARK_MAIN();
