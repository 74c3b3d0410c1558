#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "mmudn/sinr.hpp"

using namespace mmudn;

namespace {
PathGainMatrix matrix(int k, int m, std::initializer_list<double> vals) {
    PathGainMatrix g(k, m);
    auto it = vals.begin();
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) g.at(i, j) = *it++;
    }
    return g;
}
}  // namespace

TEST_CASE("per-user beamforming gain factor") {
    CHECK(massive_mimo_gain(100, 1) == doctest::Approx(100.0));
    CHECK(massive_mimo_gain(100, 4) == doctest::Approx(24.25));  // (100-4+1)/4
    CHECK(massive_mimo_gain(100, 100) == doctest::Approx(0.01));
    CHECK(massive_mimo_gain(100, 101) == doctest::Approx(0.0));  // boundary load
    CHECK(massive_mimo_gain(100, 102) < 0.0);
    CHECK_THROWS(massive_mimo_gain(100, 0));
    // Strictly decreasing in the load.
    for (int s = 1; s < 101; ++s) {
        CHECK(massive_mimo_gain(100, s) > massive_mimo_gain(100, s + 1));
    }
}

TEST_CASE("single-link SINR is gain factor times transmit SNR") {
    PathGainMatrix g = matrix(1, 1, {1.0});
    Association a{{0}};
    CHECK(effective_sinr(0, a, g, 100, 5.0) == doctest::Approx(500.0));
    PathGainMatrix g2 = matrix(1, 1, {999.0});
    RateReport rep = evaluate_association(a, g2, 100, 0.01);
    CHECK(rep.sinr[0] == doctest::Approx(999.0).epsilon(1e-12));  // 100*0.01*999
    CHECK(rep.rate[0] == doctest::Approx(9.965784284662087).epsilon(1e-12));  // log2(1000)
}

TEST_CASE("idle ANs do not interfere") {
    // Two ANs, both UEs on AN 0: AN 1 is switched off, so its (large) gain
    // towards the UEs must not appear in the denominator.
    PathGainMatrix g = matrix(2, 2, {10.0, 1e9, 2.0, 1e9});
    Association both{{0, 0}};
    RateReport rep = evaluate_association(both, g, 100, 1.0);
    CHECK(rep.active_an_count == 1);
    // load 2: factor (100-2+1)/2 = 49.5, no interference
    CHECK(rep.sinr[0] == doctest::Approx(49.5 * 10.0).epsilon(1e-12));
    CHECK(rep.sinr[1] == doctest::Approx(49.5 * 2.0).epsilon(1e-12));

    Association split{{0, 1}};
    RateReport rep2 = evaluate_association(split, g, 100, 1.0);
    CHECK(rep2.active_an_count == 2);
    CHECK(rep2.sinr[0] < rep.sinr[0]);  // the monster interferer now radiates
}

TEST_CASE("worked two-user example with interference") {
    PathGainMatrix g = matrix(2, 2, {10.0, 1.0, 2.0, 8.0});
    Association split{{0, 1}};
    RateReport rep = evaluate_association(split, g, 100, 1.0);
    CHECK(rep.sinr[0] == doctest::Approx(100.0 * 10.0 / (1.0 + 1.0)).epsilon(1e-12));
    CHECK(rep.sinr[1] == doctest::Approx(100.0 * 8.0 / (1.0 + 2.0)).epsilon(1e-12));
    CHECK(rep.min_sinr == doctest::Approx(800.0 / 3.0).epsilon(1e-12));
    CHECK(rep.min_rate == doctest::Approx(std::log2(1.0 + 800.0 / 3.0)).epsilon(1e-12));
    CHECK(rep.feasible);
}

TEST_CASE("overload semantics at the L+1 boundary") {
    const int antennas = 2;
    PathGainMatrix g3 = matrix(3, 1, {1.0, 1.0, 1.0});
    Association all3{{0, 0, 0}};  // load 3 = L+1: factor 0, SINR 0, feasible
    RateReport rep = evaluate_association(all3, g3, antennas, 1.0);
    CHECK(rep.feasible);
    CHECK(rep.min_sinr == doctest::Approx(0.0));
    CHECK(rep.min_rate == doctest::Approx(0.0));

    PathGainMatrix g4 = matrix(4, 1, {1.0, 1.0, 1.0, 1.0});
    Association all4{{0, 0, 0, 0}};  // load 4 > L+1: infeasible
    RateReport rep2 = evaluate_association(all4, g4, antennas, 1.0);
    CHECK_FALSE(rep2.feasible);
    CHECK(rep2.min_sinr == -std::numeric_limits<double>::infinity());
}

TEST_CASE("baseline association picks the strongest gain with low-index ties") {
    PathGainMatrix g = matrix(3, 3,
                              {1.0, 5.0, 2.0,
                               7.0, 7.0, 3.0,
                               0.1, 0.2, 0.9});
    Association base = baseline_association(g);
    CHECK(base.serving_an == std::vector<int>{1, 0, 2});
    CHECK(base.loads(3) == std::vector<int>{1, 1, 1});
    CHECK(base.active_count(3) == 3);
}

TEST_CASE("SINR is invariant to gain/power rescaling of the noiseless part") {
    // Scaling all gains by c and the power by 1/c preserves every p*g term.
    PathGainMatrix g = matrix(2, 2, {10.0, 1.0, 2.0, 8.0});
    PathGainMatrix gc = matrix(2, 2, {100.0, 10.0, 20.0, 80.0});
    Association a{{0, 1}};
    RateReport r1 = evaluate_association(a, g, 64, 3.0);
    RateReport r2 = evaluate_association(a, gc, 64, 0.3);
    for (int k = 0; k < 2; ++k) {
        CHECK(r1.sinr[k] == doctest::Approx(r2.sinr[k]).epsilon(1e-12));
    }
}

TEST_CASE("adding load to the serving AN lowers everyone on it") {
    PathGainMatrix g = matrix(3, 2, {5.0, 1.0, 4.0, 1.0, 1.0, 6.0});
    Association light{{0, 1, 1}};
    Association heavy{{0, 0, 1}};  // UE1 moves onto AN0
    double before = effective_sinr(0, light, g, 32, 1.0);
    double after = effective_sinr(0, heavy, g, 32, 1.0);
    CHECK(after < before);
}

TEST_CASE("association CSV uses the pinned schema") {
    Association a{{2, 0, 1}};
    std::ostringstream out;
    write_association_csv(a, out);
    CHECK(out.str() == "ue_index,an_index\n0,2\n1,0\n2,1\n");
}
