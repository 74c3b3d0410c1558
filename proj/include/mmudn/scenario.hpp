#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mmudn/rng.hpp"

namespace mmudn {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Log-distance pathloss PL(dB) = dist * log10(d_m) + offset + freq * log10(f_GHz).
// Defaults are the UMi NLOS coefficients.
struct PathlossCoefficients {
    double dist = 36.7;
    double offset = 22.7;
    double freq = 26.0;
};

// One cluster: M access nodes (ANs), each with L antenna elements, dropped
// uniformly over a disk of radius an_drop_radius_m; K single-antenna users
// (UEs) over a co-centered disk of radius ue_drop_radius_m. target_snr_db
// fixes the total cluster power budget via calibrate_power.
struct ScenarioConfig {
    int num_ans = 10;           // M
    int num_ues = 10;           // K
    int antennas_per_an = 100;  // L
    double target_snr_db = 30.0;
    double an_drop_radius_m = 50.0;
    double ue_drop_radius_m = 70.0;
    double min_pair_distance_m = 3.0;
    double carrier_ghz = 3.5;
    double noise_density_dbm_hz = -174.0;
    double bandwidth_mhz = 10.0;
    PathlossCoefficients pathloss;
    double shadowing_sigma_db = 0.0;  // 0 disables shadowing
    // Pair draws used to estimate the spatial mean gain for power
    // calibration. The estimator's relative std is ~12/sqrt(draws) (the
    // near-field tail of the pathloss dominates), so 2e7 draws put the
    // +-0.1 dB calibration check at ~6 sigma.
    long long calibration_draws = 20'000'000;
    std::uint64_t base_seed = 1;

    double bandwidth_hz() const { return bandwidth_mhz * 1e6; }
    // Linear noise power in watts over the configured bandwidth.
    double noise_power_w() const;
    // The SINR model assumes antennas strictly outnumber per-AN loads;
    // K > L configs are accepted but flagged.
    bool outside_mimo_regime() const { return num_ues > antennas_per_an; }
    void validate() const;  // throws std::invalid_argument on bad fields
};

struct ClusterTopology {
    std::vector<Point> an_positions;
    std::vector<Point> ue_positions;
};

// Row-major K x M matrix of link gains normalized by noise power, so that
// p * at(k, m) is the interference-free SNR of UE k towards AN m.
struct PathGainMatrix {
    int num_ues = 0;
    int num_ans = 0;
    std::vector<double> values;

    PathGainMatrix() = default;
    PathGainMatrix(int k, int m)
        : num_ues(k), num_ans(m),
          values(static_cast<std::size_t>(k) * static_cast<std::size_t>(m), 0.0) {}

    double& at(int k, int m) {
        return values[static_cast<std::size_t>(k) * num_ans + m];
    }
    double at(int k, int m) const {
        return values[static_cast<std::size_t>(k) * num_ans + m];
    }
};

struct PowerConfig {
    double total_power_linear = 0.0;
    double per_an_power_linear = 0.0;  // total / M
};

// Uniform disk drops; UE positions closer than min_pair_distance_m to any
// AN are redrawn (bounded retries, then throws std::runtime_error).
// Deterministic in (cfg.base_seed, snapshot_index).
ClusterTopology generate_topology(const ScenarioConfig& cfg,
                                  std::uint64_t snapshot_index);

// Pathloss in dB at the given distance (no shadowing term).
double pathloss_db(double distance_m, const ScenarioConfig& cfg);

// Noise-normalized gain matrix for a topology; when shadowing is enabled a
// per-link log-normal term is drawn from the snapshot's shadowing stream.
PathGainMatrix compute_gain_matrix(const ClusterTopology& topo,
                                   const ScenarioConfig& cfg,
                                   std::uint64_t snapshot_index = 0);

// Monte-Carlo mean of the noise-normalized gain over independent random
// (AN, UE) pair drops (no shadowing). The parallel version and the serial
// reference accumulate identical per-chunk partial sums and agree bitwise.
double estimate_mean_gain(const ScenarioConfig& cfg, long long draws,
                          std::uint64_t stream_tag = stream::kCalibration);
double estimate_mean_gain_serial(const ScenarioConfig& cfg, long long draws,
                                 std::uint64_t stream_tag = stream::kCalibration);

// Total budget such that the full budget on a spatially-averaged link meets
// target_snr_db; the per-AN share is total / M (the budget is independent
// of M, so densifying reduces per-AN power).
PowerConfig calibrate_power(const ScenarioConfig& cfg);
// Same split given an already-estimated mean gain (lets campaigns reuse one
// estimate across sweep points with identical geometry).
PowerConfig power_from_mean_gain(const ScenarioConfig& cfg, double mean_gain);

// CSV dump, columns: kind,index,x_m,y_m with kind in {AN, UE}.
void write_topology_csv(const ClusterTopology& topo, std::ostream& out);

}  // namespace mmudn
