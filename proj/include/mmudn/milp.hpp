#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmudn/lp.hpp"
#include "mmudn/scenario.hpp"
#include "mmudn/sinr.hpp"

namespace mmudn {

// Variable layout of the linearized max-min association model, in fixed
// blocks. Binaries: alpha_km (UE k served by AN m), rho_m (AN m active),
// and the product binaries z_imj = alpha_im*rho_j, v_imk = alpha_im*alpha_km,
// u_imjk = z_imj*alpha_km. Continuous: w_imk = v_imk*theta, n_imjk =
// u_imjk*theta, and theta itself (the guaranteed SINR level, the objective).
// Index j always ranges over ANs other than m and is stored compressed.
class VarCatalog {
public:
    VarCatalog() = default;
    VarCatalog(int num_ues, int num_ans);

    int alpha(int k, int m) const { return k * M_ + m; }
    int rho(int m) const { return K_ * M_ + m; }
    int z(int i, int m, int j) const { return z0_ + pair_im(i, m) * (M_ - 1) + squeeze(j, m); }
    int v(int i, int m, int k) const { return v0_ + pair_im(i, m) * K_ + k; }
    int u(int i, int m, int j, int k) const {
        return u0_ + (pair_im(i, m) * (M_ - 1) + squeeze(j, m)) * K_ + k;
    }
    int w(int i, int m, int k) const { return w0_ + pair_im(i, m) * K_ + k; }
    int n(int i, int m, int j, int k) const {
        return n0_ + (pair_im(i, m) * (M_ - 1) + squeeze(j, m)) * K_ + k;
    }
    int theta() const { return n0_ + K_ * K_ * M_ * (M_ - 1); }

    int num_ues() const { return K_; }
    int num_ans() const { return M_; }
    int num_binaries() const { return w0_; }  // binaries occupy [0, w0)
    int num_vars() const { return theta() + 1; }
    bool is_binary(int col) const { return col < w0_; }

    std::string name(int col) const;

private:
    int pair_im(int i, int m) const { return i * M_ + m; }
    // Maps j != m to 0..M-2.
    int squeeze(int j, int m) const { return j < m ? j : j - 1; }

    int K_ = 0, M_ = 0;
    int z0_ = 0, v0_ = 0, u0_ = 0, w0_ = 0, n0_ = 0;
};

struct ModelSize {
    long long binaries = 0;
    long long continuous = 0;
    long long rows = 0;
};

// Closed-form variable/row counts for a K-UE, M-AN model.
ModelSize model_size(int num_ues, int num_ans);

// Families of emitted rows, used for deterministic row naming and debugging.
enum class RowFamily : unsigned char {
    kAssign,      // (per UE) sum_m alpha_km = 1
    kLink,        // alpha_km <= rho_m
    kZUpperA, kZUpperR, kZLower,     // z product gadget
    kVUpperA, kVUpperB, kVLower,     // v product gadget
    kUUpperZ, kUUpperA, kULower,     // u product gadget
    kWUpperQ, kWUpperT, kWLower,     // w = v*theta gadget
    kNUpperQ, kNUpperT, kNLower,     // n = u*theta gadget
    kMaster,      // per (k, m) SINR guarantee row
};

struct RowTag {
    RowFamily family;
    std::int16_t i = -1, m = -1, j = -1, k = -1;
};

struct MilpModel {
    VarCatalog vars;
    std::vector<double> lower, upper;   // per column
    std::vector<LinearConstraint> rows;
    std::vector<RowTag> row_tags;
    // Objective: maximize theta (single nonzero objective column).
    int objective_col = -1;

    // The instance the model was built from, kept so the solver can run
    // association-level heuristics and verify incumbents independently.
    PathGainMatrix gains;
    int antennas = 0;
    double per_an_power = 0.0;
    double big_m = 0.0;

    std::string row_name(int row) const;
};

// Q = L * p * max_km g_km: the interference-free single-user SINR of the
// best link, an upper bound on any achievable effective SINR.
double choose_big_m(const PathGainMatrix& gains, int antennas, double per_an_power);

// Emits the exact linearization: assignment rows, activation links, the
// three product gadgets, the two big-M product-with-theta gadgets, and per
// (k, m) the master row
//   g_km (L + 1) - g_km sum_i alpha_im >=
//       (1/p) sum_i w_imk + sum_i sum_{j != m} g_kj n_imjk,
// which for alpha_km = 1 is exactly theta <= effective SINR of UE k.
MilpModel build_milp(const PathGainMatrix& gains, int antennas,
                     double per_an_power, double big_m);

// Full variable assignment corresponding to an association: alpha/rho from
// the serving vector, products as products, theta = min_k SINR, w/n as
// gated copies of theta. Satisfies every model row exactly. Throws if the
// association overloads an AN (load > L + 1).
std::vector<double> lift_association(const Association& assoc, const MilpModel& model);

// Reads the serving vector back from an integral solution: per UE the
// unique alpha within tol of 1. Throws if alphas are fractional or not
// one-hot. rho values are recomputed from loads (idle ANs stripped).
Association extract_association(const std::vector<double>& solution,
                                const MilpModel& model, double tol = 1e-6);

// Largest absolute row violation of a candidate assignment (bounds are not
// checked); used by tests and the lift validator.
double max_violation(const MilpModel& model, const std::vector<double>& x);

// Power-of-two per-column equilibration factors for the model (theta/w/n
// scale with Q, master rows with g); shared by all node solves.
std::vector<double> column_scales(const MilpModel& model);

// CPLEX LP text format with the deterministic naming scheme a_k_m, rho_m,
// z_i_m_j, v_i_m_k, u_i_m_j_k, w_i_m_k, n_i_m_j_k, theta.
void export_lp(const MilpModel& model, std::ostream& out);

// CSV row: K,M,n_bin,n_cont,n_rows.
void write_model_stats_csv(const MilpModel& model, std::ostream& out);

}  // namespace mmudn
