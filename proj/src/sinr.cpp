#include "mmudn/sinr.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mmudn {

std::vector<int> Association::loads(int num_ans) const {
    std::vector<int> counts(num_ans, 0);
    for (int m : serving_an) {
        if (m < 0 || m >= num_ans) throw std::out_of_range("serving AN index out of range");
        ++counts[m];
    }
    return counts;
}

int Association::active_count(int num_ans) const {
    auto counts = loads(num_ans);
    int active = 0;
    for (int c : counts) active += (c > 0);
    return active;
}

double massive_mimo_gain(int antennas, int load) {
    if (load < 1) throw std::invalid_argument("massive_mimo_gain: load must be >= 1");
    return static_cast<double>(antennas - load + 1) / static_cast<double>(load);
}

namespace {

// Shared kernel: SINR of one UE given precomputed loads and the sum of
// p*g_km over all active ANs (including the serving one).
double sinr_from_sums(int ue, int serving, const PathGainMatrix& gains,
                      const std::vector<int>& loads, double active_power_sum,
                      int antennas, double per_an_power) {
    double signal = per_an_power * gains.at(ue, serving);
    double interference = active_power_sum - signal;
    double factor = massive_mimo_gain(antennas, loads[serving]);
    return factor * signal / (1.0 + interference);
}

}  // namespace

double effective_sinr(int ue, const Association& assoc, const PathGainMatrix& gains,
                      int antennas, double per_an_power) {
    auto loads = assoc.loads(gains.num_ans);
    double active_sum = 0.0;
    for (int m = 0; m < gains.num_ans; ++m) {
        if (loads[m] > 0) active_sum += per_an_power * gains.at(ue, m);
    }
    return sinr_from_sums(ue, assoc.serving_an[ue], gains, loads, active_sum,
                          antennas, per_an_power);
}

Association baseline_association(const PathGainMatrix& gains) {
    Association assoc;
    assoc.serving_an.resize(gains.num_ues, 0);
    for (int k = 0; k < gains.num_ues; ++k) {
        int best = 0;
        for (int m = 1; m < gains.num_ans; ++m) {
            if (gains.at(k, m) > gains.at(k, best)) best = m;
        }
        assoc.serving_an[k] = best;
    }
    return assoc;
}

RateReport evaluate_association(const Association& assoc, const PathGainMatrix& gains,
                                int antennas, double per_an_power) {
    const int K = gains.num_ues;
    const int M = gains.num_ans;
    if (static_cast<int>(assoc.serving_an.size()) != K) {
        throw std::invalid_argument("evaluate_association: association size != K");
    }
    RateReport report;
    report.sinr.resize(K);
    report.rate.resize(K);

    auto loads = assoc.loads(M);
    report.active_an_count = 0;
    for (int m = 0; m < M; ++m) {
        if (loads[m] > 0) ++report.active_an_count;
        if (loads[m] > antennas + 1) report.feasible = false;
    }
    report.min_sinr = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        double active_sum = 0.0;
        for (int m = 0; m < M; ++m) {
            if (loads[m] > 0) active_sum += per_an_power * gains.at(k, m);
        }
        double gamma = sinr_from_sums(k, assoc.serving_an[k], gains, loads, active_sum,
                                      antennas, per_an_power);
        report.sinr[k] = gamma;
        report.rate[k] = gamma > -1.0 ? std::log2(1.0 + gamma)
                                      : -std::numeric_limits<double>::infinity();
        report.min_sinr = std::min(report.min_sinr, gamma);
    }
    if (!report.feasible) {
        // Some MIMO gain factor is nonpositive: the association cannot
        // guarantee any SINR level.
        report.min_sinr = -std::numeric_limits<double>::infinity();
        report.min_rate = -std::numeric_limits<double>::infinity();
        return report;
    }
    report.min_rate = std::log2(1.0 + report.min_sinr);
    return report;
}

void write_association_csv(const Association& assoc, std::ostream& out) {
    out << "ue_index,an_index\n";
    for (std::size_t k = 0; k < assoc.serving_an.size(); ++k) {
        out << k << ',' << assoc.serving_an[k] << '\n';
    }
}

}  // namespace mmudn
