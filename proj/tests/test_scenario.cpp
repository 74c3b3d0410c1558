#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "mmudn/rng.hpp"
#include "mmudn/scenario.hpp"

using namespace mmudn;

namespace {
double dist(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}
}  // namespace

TEST_CASE("pathloss matches the closed form at reference distances") {
    ScenarioConfig cfg;  // 36.7 log10 d + 22.7 + 26 log10(3.5)
    CHECK(pathloss_db(50.0, cfg) == doctest::Approx(99.19796831223906).epsilon(1e-12));
    CHECK(pathloss_db(10.0, cfg) == doctest::Approx(73.54576915310717).epsilon(1e-12));
    // One decade of distance adds exactly the distance coefficient.
    CHECK(pathloss_db(100.0, cfg) - pathloss_db(10.0, cfg) ==
          doctest::Approx(36.7).epsilon(1e-12));
}

TEST_CASE("noise power over 10 MHz at -174 dBm/Hz") {
    ScenarioConfig cfg;
    CHECK(cfg.noise_power_w() == doctest::Approx(3.981071705534986e-14).epsilon(1e-12));
    // Doubling the bandwidth doubles the noise power.
    ScenarioConfig wide = cfg;
    wide.bandwidth_mhz = 20.0;
    CHECK(wide.noise_power_w() == doctest::Approx(2.0 * cfg.noise_power_w()).epsilon(1e-12));
}

TEST_CASE("noise-normalized gain: 100 dB link over 10 MHz") {
    // 10^(-100/10) W/W divided by the noise power above.
    ScenarioConfig cfg;
    ClusterTopology topo;
    topo.an_positions.push_back({0.0, 0.0});
    // Place the UE so that the pathloss is exactly 100 dB:
    // d = 10^((100 - offset - freq·log10(f)) / dist)
    double d = std::pow(10.0, (100.0 - 22.7 - 26.0 * std::log10(3.5)) / 36.7);
    topo.ue_positions.push_back({d, 0.0});
    cfg.num_ans = 1;
    cfg.num_ues = 1;
    PathGainMatrix gains = compute_gain_matrix(topo, cfg);
    CHECK(gains.at(0, 0) == doctest::Approx(2511.886431509572).epsilon(1e-9));
}

TEST_CASE("topology drops are deterministic, in-disk and distance-constrained") {
    ScenarioConfig cfg;
    cfg.num_ans = 8;
    cfg.num_ues = 12;
    ClusterTopology a = generate_topology(cfg, 3);
    ClusterTopology b = generate_topology(cfg, 3);
    REQUIRE(a.an_positions.size() == 8);
    REQUIRE(a.ue_positions.size() == 12);
    for (std::size_t i = 0; i < a.an_positions.size(); ++i) {
        CHECK(a.an_positions[i].x == b.an_positions[i].x);
        CHECK(a.an_positions[i].y == b.an_positions[i].y);
        CHECK(std::hypot(a.an_positions[i].x, a.an_positions[i].y) <=
              cfg.an_drop_radius_m + 1e-9);
    }
    for (std::size_t i = 0; i < a.ue_positions.size(); ++i) {
        CHECK(a.ue_positions[i].x == b.ue_positions[i].x);
        CHECK(std::hypot(a.ue_positions[i].x, a.ue_positions[i].y) <=
              cfg.ue_drop_radius_m + 1e-9);
        for (const Point& an : a.an_positions) {
            CHECK(dist(a.ue_positions[i], an) >= cfg.min_pair_distance_m);
        }
    }
    // Different snapshot index: different draws.
    ClusterTopology c = generate_topology(cfg, 4);
    CHECK(c.an_positions[0].x != a.an_positions[0].x);
}

TEST_CASE("growing M keeps the first AN draws and all UE draws") {
    ScenarioConfig small;
    small.num_ans = 4;
    small.num_ues = 10;
    ScenarioConfig big = small;
    big.num_ans = 10;
    ClusterTopology ts = generate_topology(small, 5);
    ClusterTopology tb = generate_topology(big, 5);
    for (int m = 0; m < 4; ++m) {
        CHECK(ts.an_positions[m].x == tb.an_positions[m].x);
        CHECK(ts.an_positions[m].y == tb.an_positions[m].y);
    }
    // UE rejection depends on AN proximity, so exact equality only holds
    // when no UE redraw differs; check the common case statistically: the
    // first UE with clearance to all ten ANs must coincide.
    bool found_shared = false;
    for (std::size_t k = 0; k < ts.ue_positions.size(); ++k) {
        bool clear = true;
        for (const Point& an : tb.an_positions) {
            if (dist(ts.ue_positions[k], an) < big.min_pair_distance_m) clear = false;
        }
        if (clear && ts.ue_positions[k].x == tb.ue_positions[k].x) {
            found_shared = true;
            break;
        }
    }
    CHECK(found_shared);
}

TEST_CASE("gain decreases with distance and shadowing is seed-stable") {
    ScenarioConfig cfg;
    cfg.num_ans = 1;
    cfg.num_ues = 2;
    ClusterTopology topo;
    topo.an_positions.push_back({0.0, 0.0});
    topo.ue_positions.push_back({10.0, 0.0});
    topo.ue_positions.push_back({40.0, 0.0});
    PathGainMatrix g = compute_gain_matrix(topo, cfg);
    CHECK(g.at(0, 0) > g.at(1, 0));

    ScenarioConfig shadowed = cfg;
    shadowed.shadowing_sigma_db = 4.0;
    PathGainMatrix s1 = compute_gain_matrix(topo, shadowed, 9);
    PathGainMatrix s2 = compute_gain_matrix(topo, shadowed, 9);
    PathGainMatrix s3 = compute_gain_matrix(topo, shadowed, 10);
    CHECK(s1.at(0, 0) == s2.at(0, 0));
    CHECK(s1.at(0, 0) != s3.at(0, 0));
    CHECK(s1.at(0, 0) != g.at(0, 0));
}

TEST_CASE("mean-gain estimate agrees with the quadrature value") {
    ScenarioConfig cfg;
    double mean = estimate_mean_gain(cfg, 2'000'000);
    // Quadrature over the exact pair-distance density gives 201220.4; the
    // estimator's relative std at 2e6 draws is about 0.85%.
    CHECK(mean == doctest::Approx(201220.40456258296).epsilon(0.03));
}

TEST_CASE("parallel and serial mean-gain estimates agree bitwise") {
    ScenarioConfig cfg;
    CHECK(estimate_mean_gain(cfg, 1'000'000) == estimate_mean_gain_serial(cfg, 1'000'000));
}

TEST_CASE("power calibration splits the budget across ANs") {
    ScenarioConfig cfg;
    cfg.num_ans = 5;
    PowerConfig p = power_from_mean_gain(cfg, 201220.40456258296);
    CHECK(p.total_power_linear ==
          doctest::Approx(std::pow(10.0, 3.0) / 201220.40456258296).epsilon(1e-12));
    CHECK(p.per_an_power_linear == doctest::Approx(p.total_power_linear / 5.0).epsilon(1e-12));
    // The M split: same budget, smaller slice per AN.
    ScenarioConfig denser = cfg;
    denser.num_ans = 10;
    PowerConfig q = power_from_mean_gain(denser, 201220.40456258296);
    CHECK(q.total_power_linear == doctest::Approx(p.total_power_linear).epsilon(1e-12));
    CHECK(q.per_an_power_linear == doctest::Approx(p.per_an_power_linear * 0.5).epsilon(1e-12));
}

TEST_CASE("config validation rejects nonsense") {
    ScenarioConfig cfg;
    cfg.num_ans = 0;
    CHECK_THROWS(cfg.validate());
    cfg = ScenarioConfig{};
    cfg.an_drop_radius_m = -1.0;
    CHECK_THROWS(cfg.validate());
    cfg = ScenarioConfig{};
    cfg.bandwidth_mhz = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = ScenarioConfig{};
    cfg.num_ues = 200;
    cfg.antennas_per_an = 100;
    CHECK(cfg.outside_mimo_regime());
}

TEST_CASE("topology CSV uses the pinned schema") {
    ScenarioConfig cfg;
    cfg.num_ans = 2;
    cfg.num_ues = 1;
    ClusterTopology topo = generate_topology(cfg, 0);
    std::ostringstream out;
    write_topology_csv(topo, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "kind,index,x_m,y_m");
    std::getline(in, line);
    CHECK(line.substr(0, 5) == "AN,0,");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.substr(0, 5) == "UE,0,");
}
