#include "mmudn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mmudn {
namespace {

constexpr int kChunks = 64;  // fixed split so results ignore thread count

// Best vector seen in one index range. Strict improvement keeps the earliest
// (lexicographically smallest) vector on value ties.
struct RangeBest {
    double theta = -kInfinity;
    unsigned long long index = 0;
    std::vector<int> serving;
};

// Enumerates serving vectors with index in [start, start+count). The index
// encodes the vector in base M with UE 0 as the most significant digit, so
// ascending index is lexicographic order. Loads are maintained by an
// odometer; the SINR arithmetic per vector touches only the current loads in
// a fixed AN order, so a vector evaluates to bit-identical numbers no matter
// where the enumeration started.
RangeBest enumerate_range(const PathGainMatrix& gains, int antennas, double per_an_power,
                          unsigned long long start, unsigned long long count) {
    const int num_ues = gains.num_ues;
    const int num_ans = gains.num_ans;
    const double p = per_an_power;

    std::vector<int> serving(num_ues, 0);
    {
        unsigned long long rest = start;
        for (int k = num_ues - 1; k >= 0; --k) {
            serving[k] = static_cast<int>(rest % num_ans);
            rest /= num_ans;
        }
    }
    std::vector<int> loads(num_ans, 0);
    for (int k = 0; k < num_ues; ++k) ++loads[serving[k]];
    int overloaded = 0;
    for (int m = 0; m < num_ans; ++m) {
        if (loads[m] > antennas + 1) ++overloaded;
    }
    std::vector<int> active;  // loaded AN indices, ascending
    active.reserve(num_ans);

    RangeBest best;
    for (unsigned long long offset = 0; offset < count; ++offset) {
        if (overloaded == 0) {
            active.clear();
            for (int m = 0; m < num_ans; ++m) {
                if (loads[m] > 0) active.push_back(m);
            }
            double min_gamma = kInfinity;
            for (int k = 0; k < num_ues; ++k) {
                int m_serv = serving[k];
                double signal = p * gains.at(k, m_serv);
                double interference = 0.0;
                for (int m : active) {
                    if (m != m_serv) interference += p * gains.at(k, m);
                }
                int load = loads[m_serv];
                double factor = static_cast<double>(antennas - load + 1) /
                                static_cast<double>(load);
                double gamma = factor * signal / (1.0 + interference);
                if (gamma < min_gamma) min_gamma = gamma;
                if (min_gamma <= best.theta) break;  // cannot beat the best
            }
            if (min_gamma > best.theta) {
                best.theta = min_gamma;
                best.index = start + offset;
                best.serving = serving;
            }
        }

        // Advance the odometer (last UE fastest).
        int k = num_ues - 1;
        while (k >= 0) {
            int m = serving[k];
            if (loads[m] == antennas + 2) --overloaded;
            --loads[m];
            if (m + 1 < num_ans) {
                serving[k] = m + 1;
                ++loads[m + 1];
                if (loads[m + 1] == antennas + 2) ++overloaded;
                break;
            }
            serving[k] = 0;
            ++loads[0];
            if (loads[0] == antennas + 2) ++overloaded;
            --k;
        }
        if (k < 0) break;  // wrapped past the last vector
    }
    return best;
}

unsigned long long checked_power(int base, int exponent, unsigned long long limit) {
    unsigned long long total = 1;
    for (int i = 0; i < exponent; ++i) {
        if (total > limit / static_cast<unsigned long long>(base)) {
            return 0;  // would exceed the limit
        }
        total *= static_cast<unsigned long long>(base);
    }
    return total;
}

BruteForceResult finish(const RangeBest& best, unsigned long long total) {
    BruteForceResult result;
    result.evaluated = total;
    if (!best.serving.empty()) {
        result.theta_star = best.theta;
        result.best.serving_an = best.serving;
    } else {
        result.theta_star = -kInfinity;
    }
    return result;
}

}  // namespace

BruteForceResult brute_force_maxmin_serial(const PathGainMatrix& gains, int antennas,
                                           double per_an_power,
                                           unsigned long long enum_limit) {
    if (gains.num_ues < 1 || gains.num_ans < 1) {
        throw std::invalid_argument("brute_force_maxmin: empty instance");
    }
    unsigned long long total = checked_power(gains.num_ans, gains.num_ues, enum_limit);
    if (total == 0) {
        throw std::invalid_argument(
            "brute_force_maxmin: M^K exceeds the enumeration limit");
    }
    return finish(enumerate_range(gains, antennas, per_an_power, 0, total), total);
}

BruteForceResult brute_force_maxmin(const PathGainMatrix& gains, int antennas,
                                    double per_an_power,
                                    unsigned long long enum_limit) {
    if (gains.num_ues < 1 || gains.num_ans < 1) {
        throw std::invalid_argument("brute_force_maxmin: empty instance");
    }
    unsigned long long total = checked_power(gains.num_ans, gains.num_ues, enum_limit);
    if (total == 0) {
        throw std::invalid_argument(
            "brute_force_maxmin: M^K exceeds the enumeration limit");
    }
    if (total < 4096) {
        return finish(enumerate_range(gains, antennas, per_an_power, 0, total), total);
    }

    const int chunks = kChunks;
    const unsigned long long base = total / chunks;
    const unsigned long long extra = total % chunks;
    std::vector<RangeBest> bests(chunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (int c = 0; c < chunks; ++c) {
        unsigned long long uc = static_cast<unsigned long long>(c);
        unsigned long long lo = uc * base + std::min(uc, extra);
        unsigned long long count = base + (uc < extra ? 1 : 0);
        bests[c] = enumerate_range(gains, antennas, per_an_power, lo, count);
    }

    // Ascending merge: strict improvement keeps the smallest index on ties,
    // matching the serial scan exactly.
    RangeBest merged;
    for (const RangeBest& candidate : bests) {
        if (!candidate.serving.empty() && candidate.theta > merged.theta) {
            merged = candidate;
        }
    }
    return finish(merged, total);
}

}  // namespace mmudn
