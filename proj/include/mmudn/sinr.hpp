#pragma once

#include <iosfwd>
#include <vector>

#include "mmudn/scenario.hpp"

namespace mmudn {

// A complete user association: serving_an[k] is the AN index serving UE k.
// Loads and the active set are derived; an AN is active iff it serves at
// least one UE (idle ANs are switched off and create no interference).
struct Association {
    std::vector<int> serving_an;

    std::vector<int> loads(int num_ans) const;
    int active_count(int num_ans) const;
    bool operator==(const Association& other) const = default;
};

struct RateReport {
    std::vector<double> sinr;  // per-UE effective SINR, linear
    std::vector<double> rate;  // log2(1 + sinr), bits/s/Hz
    double min_sinr = 0.0;
    double min_rate = 0.0;
    int active_an_count = 0;
    // False when some AN carries more than L+1 UEs, which drives the
    // MIMO gain factor negative; min_sinr is then -inf.
    bool feasible = true;
};

// Massive-MIMO gain factor (L - S + 1) / S for an AN with L antenna
// elements serving S users. Nonpositive when S > L + 1 (callers treat such
// loads as infeasible). Throws on S < 1.
double massive_mimo_gain(int antennas, int load);

// Effective SINR of UE k: gain factor times p*g towards the serving AN,
// over unit noise plus p*g summed across the other ACTIVE ANs.
double effective_sinr(int ue, const Association& assoc,
                      const PathGainMatrix& gains, int antennas,
                      double per_an_power);

// Max-received-power association: serving_an[k] = argmax_m g_km, ties to
// the lowest AN index. With equal AN powers and monotone pathloss this is
// the closest-AN rule.
Association baseline_association(const PathGainMatrix& gains);

RateReport evaluate_association(const Association& assoc,
                                const PathGainMatrix& gains, int antennas,
                                double per_an_power);

// CSV dump of an association, columns: ue_index,an_index.
void write_association_csv(const Association& assoc, std::ostream& out);

}  // namespace mmudn
