#pragma once

#include <chrono>
#include <limits>
#include <vector>

namespace mmudn {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { kLe, kGe, kEq };

struct LinearConstraint {
    std::vector<std::pair<int, double>> terms;  // (column, coefficient)
    RowSense sense = RowSense::kLe;
    double rhs = 0.0;
};

// Maximization LP over bounded variables. Rows are stored sparsely (term
// lists); the simplex engine keeps a dense basis inverse, so the practical
// ceiling is a few thousand rows per solve. The branch-and-bound layer
// keeps its working problems small instead of handing the full model over.
struct LpProblem {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LinearConstraint> rows;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalError };

struct LpOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    // Consecutive degenerate pivots before switching to Bland's rule
    // (anti-cycling); Dantzig pricing resumes once the objective moves.
    int stall_threshold = 60;
    long long iteration_limit = 200'000;
    int refactor_every = 100;
    // Wall-clock budget per solve() call, checked every few iterations;
    // 0 disables. Expiry reports kIterationLimit.
    double time_limit_s = 0.0;
};

struct LpResult {
    LpStatus status = LpStatus::kIterationLimit;
    double objective = 0.0;
    std::vector<double> x;
    long long iterations = 0;
};

// Two-phase bounded-variable primal simplex with Dantzig pricing, Bland's
// rule after stalls, periodic refactorization, and power-of-two
// equilibration scaling.
LpResult solve_lp(const LpProblem& problem, const LpOptions& options = {});

// Incremental interface for branch-and-bound node solves: rows can be
// appended and variable bounds tightened between solves, and each solve
// restarts from the previous basis. Appending a row keeps the old basis
// and enters the new slack as basic, so a re-solve after a few new rows
// typically costs a handful of pivots.
class SimplexSolver {
public:
    // column_scales: optional per-variable equilibration factors (powers of
    // two) computed from a larger model than the rows initially present.
    SimplexSolver(int num_vars, std::vector<double> objective,
                  std::vector<double> lower, std::vector<double> upper,
                  const std::vector<double>* column_scales = nullptr,
                  const LpOptions& options = {});

    void append_row(const LinearConstraint& row);
    // Replaces one variable's bounds for subsequent solves (tightening or
    // relaxing; node changes move bounds in both directions).
    void set_bounds(int var, double lower, double upper);

    LpResult solve();

    int num_rows() const { return static_cast<int>(rows_.size()); }
    long long total_iterations() const { return total_iterations_; }
    // Mutable so per-solve budgets (iteration or wall-clock) can be adjusted
    // between solves.
    LpOptions& options() { return options_; }

private:
    struct Row {
        std::vector<std::pair<int, double>> terms;  // scaled
        RowSense sense;
        double rhs;  // scaled
    };

    enum class VarState : unsigned char { kAtLower, kAtUpper, kBasic, kFree };

    int column_count() const { return num_vars_ + static_cast<int>(rows_.size()); }
    bool is_slack(int col) const { return col >= num_vars_; }
    double nonbasic_value(int col) const;
    void collapse_to_slack_basis();
    void compute_basic_values();
    bool refactorize();
    void price(std::vector<double>& reduced, const std::vector<double>& costs) const;
    void column_in_basis_coords(int col, std::vector<double>& out) const;
    void pivot(int entering, int leaving_pos, const std::vector<double>& direction,
               double step, int entering_dir);
    LpStatus run_phase(bool phase_one, long long& iterations);

    int num_vars_;
    LpOptions options_;
    std::vector<double> objective_;        // scaled
    std::vector<double> lower_, upper_;    // scaled
    std::vector<double> col_scale_;        // structural columns only
    std::vector<Row> rows_;
    std::vector<double> row_scale_;
    std::vector<std::vector<std::pair<int, double>>> columns_;  // structural CSC
    std::vector<int> basic_;               // basic column per row
    std::vector<VarState> state_;          // per column (structural + slack)
    std::vector<double> basic_value_;
    std::vector<double> binv_;             // dense row-major basis inverse
    long long total_iterations_ = 0;
    std::chrono::steady_clock::time_point deadline_ =
        std::chrono::steady_clock::time_point::max();
    bool basis_valid_ = false;   // binv_ matches basic_
    bool values_stale_ = true;   // basic_value_ needs recomputation
};

}  // namespace mmudn
