#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmudn/config.hpp"
#include "mmudn/experiments.hpp"
#include "mmudn/scenario.hpp"

using namespace mmudn;

namespace {

// Small cluster that solves in milliseconds but still has real structure.
ScenarioConfig small_scenario() {
    ScenarioConfig cfg;
    cfg.num_ans = 3;
    cfg.num_ues = 5;
    cfg.antennas_per_an = 32;
    cfg.target_snr_db = 20.0;
    cfg.shadowing_sigma_db = 4.0;
    cfg.calibration_draws = 200'000;
    cfg.base_seed = 7;
    return cfg;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(bool(in));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("key-value files parse comments, blanks and typed values") {
    KeyValueConfig cfg = KeyValueConfig::parse_string(
        "# leading comment\n"
        "alpha = 3.5   # trailing comment\n"
        "\n"
        "beta= -2\n"
        "  words  =  two tokens  \n"
        "flag = yes\n"
        "ids = 1, 2.5 ,3\n"
        "pairs = 2x250, 4X125\n"
        "big = 18446744073709551615\n");
    CHECK(cfg.has("alpha"));
    CHECK(!cfg.has("gamma"));
    CHECK(cfg.get_double("alpha", 0.0) == doctest::Approx(3.5));
    CHECK(cfg.get_int("beta", 0) == -2);
    CHECK(cfg.get_string("words", "") == "two tokens");
    CHECK(cfg.get_bool("flag", false));
    CHECK(cfg.get_bool("missing", true));
    CHECK(cfg.get_list("ids") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(cfg.get_pairs("pairs") ==
          std::vector<std::pair<int, int>>{{2, 250}, {4, 125}});
    CHECK(cfg.get_uint64("big", 0) == 18446744073709551615ULL);
    CHECK(cfg.get_double("missing", 1.25) == 1.25);

    CHECK_THROWS_AS(KeyValueConfig::parse_string("just words\n"), std::runtime_error);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("= no key\n"), std::runtime_error);
    CHECK_THROWS_AS(cfg.get_int("alpha", 0), std::runtime_error);      // 3.5 not integral
    CHECK_THROWS_AS(cfg.get_bool("alpha", false), std::runtime_error);
    CHECK_THROWS_AS(cfg.get_uint64("beta", 0), std::runtime_error);    // negative
    KeyValueConfig bad_pairs = KeyValueConfig::parse_string("p = 2y250\n");
    CHECK_THROWS_AS(bad_pairs.get_pairs("p"), std::runtime_error);
}

TEST_CASE("numbers format with six significant digits, fixed decimal") {
    CHECK(format_sig(0.0) == "0");
    CHECK(format_sig(20.0) == "20.0000");
    CHECK(format_sig(1.5) == "1.50000");
    CHECK(format_sig(0.5) == "0.500000");
    CHECK(format_sig(-3.25) == "-3.25000");
    CHECK(format_sig(123456.0) == "123456");
    CHECK(format_sig(1234567.0) == "1234570");  // rounded to 6 digits
    CHECK(format_sig(0.001953125) == "0.00195312");  // exact 2^-9, banker's rounding
    CHECK(format_sig(201220.40456) == "201220");
}

TEST_CASE("scenario reader fills every field and rejects typos") {
    KeyValueConfig cfg = KeyValueConfig::parse_string(
        "num_ans = 4\n"
        "num_ues = 6\n"
        "antennas_per_an = 48\n"
        "target_snr_db = 25\n"
        "an_drop_radius_m = 40\n"
        "ue_drop_radius_m = 60\n"
        "min_pair_distance_m = 2.5\n"
        "carrier_ghz = 2.6\n"
        "noise_density_dbm_hz = -170\n"
        "bandwidth_mhz = 20\n"
        "pathloss_dist = 35\n"
        "pathloss_offset = 20\n"
        "pathloss_freq = 24\n"
        "shadowing_sigma_db = 3\n"
        "calibration_draws = 1000\n"
        "base_seed = 99\n");
    ScenarioConfig sc = scenario_from_config(cfg);
    CHECK(sc.num_ans == 4);
    CHECK(sc.num_ues == 6);
    CHECK(sc.antennas_per_an == 48);
    CHECK(sc.target_snr_db == 25.0);
    CHECK(sc.an_drop_radius_m == 40.0);
    CHECK(sc.ue_drop_radius_m == 60.0);
    CHECK(sc.min_pair_distance_m == 2.5);
    CHECK(sc.carrier_ghz == 2.6);
    CHECK(sc.noise_density_dbm_hz == -170.0);
    CHECK(sc.bandwidth_mhz == 20.0);
    CHECK(sc.pathloss.dist == 35.0);
    CHECK(sc.pathloss.offset == 20.0);
    CHECK(sc.pathloss.freq == 24.0);
    CHECK(sc.shadowing_sigma_db == 3.0);
    CHECK(sc.calibration_draws == 1000);
    CHECK(sc.base_seed == 99);

    KeyValueConfig typo = KeyValueConfig::parse_string("num_anns = 4\n");
    CHECK_THROWS_WITH_AS(scenario_from_config(typo),
                         doctest::Contains("unknown config key"), std::runtime_error);
}

TEST_CASE("campaign reader maps enums, lists and budgets") {
    KeyValueConfig cfg = KeyValueConfig::parse_string(
        "campaign = element_budget\n"
        "budget_pairs = 2x32, 4x16\n"
        "snapshots = 17\n"
        "solver = both\n"
        "out_dir = /tmp/somewhere\n"
        "solve_time_limit_s = 2.5\n"
        "solve_node_limit = 5000\n"
        "emit_svg = no\n"
        "num_ues = 4\n");
    ExperimentSpec spec = ExperimentSpec::from_config(cfg);
    CHECK(spec.campaign == Campaign::kElementBudget);
    CHECK(spec.budget_pairs ==
          std::vector<std::pair<int, int>>{{2, 32}, {4, 16}});
    // No explicit SNR list: the budget campaign defaults to 10/20/30 dB.
    CHECK(spec.snr_values_db == std::vector<double>{10.0, 20.0, 30.0});
    CHECK(spec.snapshots == 17);
    CHECK(spec.solver == SolverChoice::kBoth);
    CHECK(spec.out_dir == "/tmp/somewhere");
    CHECK(spec.solve_time_limit_s == 2.5);
    CHECK(spec.solve_node_limit == 5000);
    CHECK(!spec.emit_svg);
    CHECK(spec.scenario.num_ues == 4);

    KeyValueConfig single = KeyValueConfig::parse_string(
        "campaign = single\n"
        "num_ans = 5\n"
        "antennas_per_an = 77\n"
        "target_snr_db = 15\n");
    ExperimentSpec one = ExperimentSpec::from_config(single);
    CHECK(one.m_values == std::vector<int>{5});
    CHECK(one.l_values == std::vector<int>{77});
    CHECK(one.snr_values_db == std::vector<double>{15.0});

    CHECK_THROWS_AS(
        ExperimentSpec::from_config(KeyValueConfig::parse_string("campaign = coverage\n")),
        std::runtime_error);
    CHECK_THROWS_AS(
        ExperimentSpec::from_config(KeyValueConfig::parse_string("solver = cplex\n")),
        std::runtime_error);
    CHECK_THROWS_AS(ExperimentSpec::from_config(
                        KeyValueConfig::parse_string("m_values = 2.5,3\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(ExperimentSpec::from_config(
                        KeyValueConfig::parse_string("budget_pairs = 0x5\n")),
                    std::runtime_error);
}

TEST_CASE("optimized scheme dominates the baseline on every snapshot") {
    ScenarioConfig cfg = small_scenario();
    PowerConfig power = calibrate_power(cfg);
    BnBConfig bnb;
    for (std::uint64_t index = 0; index < 20; ++index) {
        SnapshotResult rec = run_snapshot(cfg, index, SolverChoice::kMilp, power, bnb);
        CHECK(rec.snapshot_index == index);
        CHECK(rec.num_ans == cfg.num_ans);
        CHECK(rec.num_ues == cfg.num_ues);
        CHECK(rec.antennas == cfg.antennas_per_an);
        CHECK(rec.status == SolveStatus::kOptimal);
        REQUIRE(rec.has_incumbent);
        CHECK(rec.optimal_theta >= rec.baseline_min_sinr - 1e-9);
        CHECK(rec.optimal_min_rate >= rec.baseline_min_rate - 1e-9);
        CHECK(rec.baseline_min_rate ==
              doctest::Approx(std::log2(1.0 + rec.baseline_min_sinr)).epsilon(1e-12));
        CHECK(rec.optimal_min_rate ==
              doctest::Approx(std::log2(1.0 + rec.optimal_theta)).epsilon(1e-9));
        CHECK(rec.baseline_active >= 1);
        CHECK(rec.baseline_active <= cfg.num_ans);
        CHECK(rec.optimal_active >= 1);
        CHECK(rec.optimal_active <= cfg.num_ans);
        CHECK(rec.nodes >= 1);
    }
}

TEST_CASE("snapshot runs are deterministic") {
    ScenarioConfig cfg = small_scenario();
    PowerConfig power = calibrate_power(cfg);
    BnBConfig bnb;
    SnapshotResult a = run_snapshot(cfg, 5, SolverChoice::kMilp, power, bnb);
    SnapshotResult b = run_snapshot(cfg, 5, SolverChoice::kMilp, power, bnb);
    CHECK(a.baseline_min_sinr == b.baseline_min_sinr);
    CHECK(a.baseline_min_rate == b.baseline_min_rate);
    CHECK(a.baseline_active == b.baseline_active);
    CHECK(a.optimal_theta == b.optimal_theta);
    CHECK(a.optimal_min_rate == b.optimal_min_rate);
    CHECK(a.optimal_active == b.optimal_active);
    CHECK(a.nodes == b.nodes);
    CHECK(a.status == b.status);

    // A different snapshot index draws a different topology.
    SnapshotResult c = run_snapshot(cfg, 6, SolverChoice::kMilp, power, bnb);
    CHECK(c.baseline_min_sinr != a.baseline_min_sinr);
}

TEST_CASE("snapshot batches agree between serial and parallel runs") {
    ScenarioConfig cfg = small_scenario();
    PowerConfig power = calibrate_power(cfg);
    BnBConfig bnb;
    std::vector<SnapshotResult> serial =
        run_snapshot_batch(cfg, 12, SolverChoice::kMilp, power, bnb, false);
    std::vector<SnapshotResult> parallel =
        run_snapshot_batch(cfg, 12, SolverChoice::kMilp, power, bnb, true);
    REQUIRE(serial.size() == 12);
    REQUIRE(parallel.size() == 12);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].snapshot_index == parallel[i].snapshot_index);
        CHECK(serial[i].baseline_min_sinr == parallel[i].baseline_min_sinr);
        CHECK(serial[i].optimal_theta == parallel[i].optimal_theta);
        CHECK(serial[i].optimal_active == parallel[i].optimal_active);
        CHECK(serial[i].nodes == parallel[i].nodes);
        CHECK(serial[i].status == parallel[i].status);
    }
}

TEST_CASE("more antenna elements never hurt the optimum") {
    // Same topology and power budget (neither depends on L); the larger
    // array weakly improves every association, so it weakly improves the
    // optimum as well.
    ScenarioConfig lo = small_scenario();
    lo.antennas_per_an = 24;
    ScenarioConfig hi = lo;
    hi.antennas_per_an = 48;
    PowerConfig power = calibrate_power(lo);
    BnBConfig bnb;
    for (std::uint64_t index = 0; index < 6; ++index) {
        SnapshotResult a = run_snapshot(lo, index, SolverChoice::kMilp, power, bnb);
        SnapshotResult b = run_snapshot(hi, index, SolverChoice::kMilp, power, bnb);
        REQUIRE(a.has_incumbent);
        REQUIRE(b.has_incumbent);
        CHECK(b.optimal_theta >= a.optimal_theta - 1e-9);
        CHECK(b.baseline_min_sinr >= a.baseline_min_sinr - 1e-12);
    }
}

TEST_CASE("exhaustive and cross-checked solver choices work end to end") {
    ScenarioConfig cfg = small_scenario();
    cfg.num_ues = 4;
    PowerConfig power = calibrate_power(cfg);
    BnBConfig bnb;

    SnapshotResult brute = run_snapshot(cfg, 2, SolverChoice::kBrute, power, bnb);
    CHECK(brute.status == SolveStatus::kOptimal);
    CHECK(brute.nodes == 81);  // 3^4 vectors enumerated
    CHECK(brute.optimal_theta >= brute.baseline_min_sinr - 1e-9);

    // kBoth runs the tree search and re-derives the same optimum
    // exhaustively; a disagreement would throw.
    SnapshotResult both = run_snapshot(cfg, 2, SolverChoice::kBoth, power, bnb);
    CHECK(both.status == SolveStatus::kOptimal);
    CHECK(both.optimal_theta == doctest::Approx(brute.optimal_theta).epsilon(1e-9));
}

TEST_CASE("snapshot CSV rows follow the documented schema") {
    AggregateReport report;
    SnapshotResult good;
    good.snapshot_index = 3;
    good.num_ans = 2;
    good.num_ues = 4;
    good.antennas = 64;
    good.snr_db = 20.0;
    good.baseline_min_rate = 1.5;
    good.baseline_min_sinr = 1.25;
    good.baseline_active = 2;
    good.optimal_min_rate = 2.5;
    good.optimal_theta = 4.5;
    good.optimal_active = 1;
    good.status = SolveStatus::kOptimal;
    good.nodes = 7;
    good.seconds = 0.5;
    SnapshotResult stuck = good;
    stuck.snapshot_index = 4;
    stuck.baseline_min_rate = 0.0;
    stuck.baseline_min_sinr = 0.0;
    stuck.baseline_active = 1;
    stuck.has_incumbent = false;
    stuck.status = SolveStatus::kInfeasible;
    stuck.nodes = 1;
    stuck.seconds = 0.0;
    report.snapshots = {good, stuck};

    std::ostringstream out;
    write_snapshots_csv(report, out);
    CHECK(out.str() ==
          "seed,M,K,L,snr_db,scheme,min_rate,active_ans,theta,status,nodes,seconds\n"
          "3,2,4,64,20.0000,baseline,1.50000,2,1.25000,-,0,0\n"
          "3,2,4,64,20.0000,optimal,2.50000,1,4.50000,optimal,7,0.500000\n"
          "4,2,4,64,20.0000,baseline,0,1,0,-,0,0\n"
          "4,2,4,64,20.0000,optimal,-,-,-,infeasible,1,0\n");
}

TEST_CASE("aggregate CSV rows follow the documented schema") {
    AggregateReport report;
    SweepPointStats p;
    p.num_ans = 4;
    p.num_ues = 10;
    p.antennas = 125;
    p.snr_db = 10.0;
    p.snapshots = 200;
    p.base_rate_mean = 1.5;
    p.base_rate_ci = 0.25;
    p.opt_rate_mean = 2.5;
    p.opt_rate_ci = 0.125;
    p.base_active_mean = 3.5;
    p.opt_active_mean = 2.25;
    p.relative_gain = 2.0 / 3.0;
    p.mean_nodes = 500.0;
    p.mean_seconds = 0.5;
    p.limit_hits = 2;
    report.points = {p};

    std::ostringstream out;
    write_aggregate_csv(report, out);
    CHECK(out.str() ==
          "M,K,L,snr_db,snapshots,base_rate_mean,base_rate_ci,opt_rate_mean,opt_rate_ci,"
          "base_active_mean,opt_active_mean,relative_gain,mean_nodes,mean_seconds,"
          "limit_hits\n"
          "4,10,125,10.0000,200,1.50000,0.250000,2.50000,0.125000,3.50000,2.25000,"
          "0.666667,500.000,0.500000,2\n");
}

TEST_CASE("densification sweep writes CSVs and charts per SNR") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mmudn_test_densification";
    fs::remove_all(dir);

    ExperimentSpec spec;
    spec.campaign = Campaign::kDensification;
    spec.m_values = {2, 3};
    spec.l_values = {16};
    spec.snr_values_db = {20.0};
    spec.snapshots = 4;
    spec.scenario = small_scenario();
    spec.scenario.num_ues = 4;
    spec.out_dir = dir.string();

    AggregateReport report = run_densification_sweep(spec);
    REQUIRE(report.points.size() == 2);
    CHECK(report.snapshots.size() == 8);
    for (const SweepPointStats& p : report.points) {
        CHECK(p.snapshots == 4);
        CHECK(p.antennas == 16);
        CHECK(p.snr_db == 20.0);
        CHECK(p.opt_rate_mean >= p.base_rate_mean - 1e-9);
        CHECK(p.limit_hits == 0);
    }
    CHECK(report.points[0].num_ans == 2);
    CHECK(report.points[1].num_ans == 3);

    CHECK(slurp(dir / "snapshots.csv").rfind("seed,M,K,L,", 0) == 0);
    CHECK(slurp(dir / "aggregate.csv").rfind("M,K,L,snr_db,", 0) == 0);
    CHECK(slurp(dir / "rate_vs_m_snr20.svg").find("<svg") != std::string::npos);
    CHECK(slurp(dir / "active_vs_m_snr20.svg").find("<svg") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("element-budget sweep honors explicit pairs and SVG opt-out") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mmudn_test_budget";
    fs::remove_all(dir);

    ExperimentSpec spec;
    spec.campaign = Campaign::kElementBudget;
    spec.budget_pairs = {{2, 32}, {3, 21}};
    spec.snr_values_db = {10.0, 20.0};
    spec.snapshots = 3;
    spec.scenario = small_scenario();
    spec.scenario.num_ues = 4;
    spec.out_dir = dir.string();
    spec.emit_svg = false;

    AggregateReport report = run_element_budget_sweep(spec);
    REQUIRE(report.points.size() == 4);
    for (const SweepPointStats& p : report.points) {
        bool known = (p.num_ans == 2 && p.antennas == 32) ||
                     (p.num_ans == 3 && p.antennas == 21);
        CHECK(known);
        CHECK((p.snr_db == 10.0 || p.snr_db == 20.0));
    }
    CHECK(fs::exists(dir / "snapshots.csv"));
    CHECK(fs::exists(dir / "aggregate.csv"));
    CHECK(!fs::exists(dir / "rate_vs_snr.svg"));
    CHECK(!fs::exists(dir / "active_vs_snr.svg"));
    fs::remove_all(dir);
}
