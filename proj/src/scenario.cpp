#include "mmudn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mmudn/config.hpp"

namespace mmudn {
namespace {

constexpr int kMaxRedraws = 10'000;
constexpr long long kChunkDraws = 1 << 16;  // calibration chunk granularity

Point draw_disk_point(SplitMix64& rng, double radius) {
    // Polar sampling with area-uniform radius; two uniforms per point in a
    // fixed order so redraw behavior is reproducible.
    double r = radius * std::sqrt(rng.uniform());
    double angle = 2.0 * std::numbers::pi * rng.uniform();
    return {r * std::cos(angle), r * std::sin(angle)};
}

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

double ScenarioConfig::noise_power_w() const {
    return std::pow(10.0, (noise_density_dbm_hz - 30.0) / 10.0) * bandwidth_hz();
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (num_ans < 1) fail("num_ans must be >= 1");
    if (num_ues < 1) fail("num_ues must be >= 1");
    if (antennas_per_an < 1) fail("antennas_per_an must be >= 1");
    if (an_drop_radius_m < 0.0) fail("an_drop_radius_m must be >= 0");
    if (ue_drop_radius_m < 0.0) fail("ue_drop_radius_m must be >= 0");
    if (min_pair_distance_m <= 0.0) fail("min_pair_distance_m must be > 0");
    if (carrier_ghz <= 0.0) fail("carrier_ghz must be > 0");
    if (bandwidth_mhz <= 0.0) fail("bandwidth_mhz must be > 0");
    if (shadowing_sigma_db < 0.0) fail("shadowing_sigma_db must be >= 0");
    if (calibration_draws < 1) fail("calibration_draws must be >= 1");
}

ClusterTopology generate_topology(const ScenarioConfig& cfg,
                                  std::uint64_t snapshot_index) {
    cfg.validate();
    ClusterTopology topo;
    topo.an_positions.reserve(cfg.num_ans);
    topo.ue_positions.reserve(cfg.num_ues);

    SplitMix64 an_rng(mix_seed(cfg.base_seed, snapshot_index, stream::kAnPositions));
    for (int m = 0; m < cfg.num_ans; ++m) {
        topo.an_positions.push_back(draw_disk_point(an_rng, cfg.an_drop_radius_m));
    }

    SplitMix64 ue_rng(mix_seed(cfg.base_seed, snapshot_index, stream::kUePositions));
    for (int k = 0; k < cfg.num_ues; ++k) {
        Point candidate;
        bool placed = false;
        for (int attempt = 0; attempt < kMaxRedraws && !placed; ++attempt) {
            candidate = draw_disk_point(ue_rng, cfg.ue_drop_radius_m);
            placed = true;
            for (const Point& an : topo.an_positions) {
                if (distance(candidate, an) < cfg.min_pair_distance_m) {
                    placed = false;
                    break;
                }
            }
        }
        if (!placed) {
            throw std::runtime_error(
                "generate_topology: could not satisfy min_pair_distance_m after " +
                std::to_string(kMaxRedraws) + " redraws");
        }
        topo.ue_positions.push_back(candidate);
    }
    return topo;
}

double pathloss_db(double distance_m, const ScenarioConfig& cfg) {
    if (distance_m < cfg.min_pair_distance_m) {
        throw std::invalid_argument("pathloss_db: distance below min_pair_distance_m");
    }
    const PathlossCoefficients& c = cfg.pathloss;
    return c.dist * std::log10(distance_m) + c.offset + c.freq * std::log10(cfg.carrier_ghz);
}

PathGainMatrix compute_gain_matrix(const ClusterTopology& topo,
                                   const ScenarioConfig& cfg,
                                   std::uint64_t snapshot_index) {
    const int K = static_cast<int>(topo.ue_positions.size());
    const int M = static_cast<int>(topo.an_positions.size());
    PathGainMatrix gains(K, M);
    const double noise_w = cfg.noise_power_w();

    SplitMix64 shadow_rng(mix_seed(cfg.base_seed, snapshot_index, stream::kShadowing));
    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
            double pl = pathloss_db(distance(topo.ue_positions[k], topo.an_positions[m]), cfg);
            if (cfg.shadowing_sigma_db > 0.0) {
                pl += cfg.shadowing_sigma_db * shadow_rng.normal();
            }
            gains.at(k, m) = std::pow(10.0, -pl / 10.0) / noise_w;
        }
    }
    return gains;
}

namespace {

// Mean gain over one chunk of pair draws. Chunks are seeded independently
// so the parallel estimator can hand whole chunks to threads and still sum
// partial results in a fixed order.
double chunk_gain_sum(const ScenarioConfig& cfg, std::uint64_t stream_tag,
                      long long chunk_index, long long count) {
    SplitMix64 rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(chunk_index),
                            stream_tag));
    const double noise_w = cfg.noise_power_w();
    double sum = 0.0;
    for (long long d = 0; d < count; ++d) {
        Point an = draw_disk_point(rng, cfg.an_drop_radius_m);
        Point ue;
        do {
            ue = draw_disk_point(rng, cfg.ue_drop_radius_m);
        } while (distance(ue, an) < cfg.min_pair_distance_m);
        double pl = pathloss_db(distance(ue, an), cfg);
        sum += std::pow(10.0, -pl / 10.0) / noise_w;
    }
    return sum;
}

double mean_gain_impl(const ScenarioConfig& cfg, long long draws,
                      std::uint64_t stream_tag, bool parallel) {
    if (draws < 1) throw std::invalid_argument("estimate_mean_gain: draws must be >= 1");
    const long long chunks = (draws + kChunkDraws - 1) / kChunkDraws;
    std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (long long c = 0; c < chunks; ++c) {
        long long count = std::min(kChunkDraws, draws - c * kChunkDraws);
        partial[static_cast<std::size_t>(c)] = chunk_gain_sum(cfg, stream_tag, c, count);
    }
    double total = 0.0;
    for (double s : partial) total += s;  // fixed order, independent of threads
    return total / static_cast<double>(draws);
}

}  // namespace

double estimate_mean_gain(const ScenarioConfig& cfg, long long draws,
                          std::uint64_t stream_tag) {
    return mean_gain_impl(cfg, draws, stream_tag, true);
}

double estimate_mean_gain_serial(const ScenarioConfig& cfg, long long draws,
                                 std::uint64_t stream_tag) {
    return mean_gain_impl(cfg, draws, stream_tag, false);
}

PowerConfig power_from_mean_gain(const ScenarioConfig& cfg, double mean_gain) {
    if (mean_gain <= 0.0) throw std::invalid_argument("mean_gain must be > 0");
    PowerConfig power;
    power.total_power_linear = std::pow(10.0, cfg.target_snr_db / 10.0) / mean_gain;
    power.per_an_power_linear = power.total_power_linear / cfg.num_ans;
    return power;
}

PowerConfig calibrate_power(const ScenarioConfig& cfg) {
    cfg.validate();
    double mean_gain = estimate_mean_gain(cfg, cfg.calibration_draws, stream::kCalibration);
    return power_from_mean_gain(cfg, mean_gain);
}

void write_topology_csv(const ClusterTopology& topo, std::ostream& out) {
    out << "kind,index,x_m,y_m\n";
    for (std::size_t i = 0; i < topo.an_positions.size(); ++i) {
        out << "AN," << i << ',' << format_sig(topo.an_positions[i].x) << ','
            << format_sig(topo.an_positions[i].y) << '\n';
    }
    for (std::size_t i = 0; i < topo.ue_positions.size(); ++i) {
        out << "UE," << i << ',' << format_sig(topo.ue_positions[i].x) << ','
            << format_sig(topo.ue_positions[i].y) << '\n';
    }
}

}  // namespace mmudn
