#include "mmudn/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mmudn {
namespace {

constexpr double kPivotEps = 1e-9;       // smallest acceptable pivot element
constexpr double kDegenerateStep = 1e-11;

double pow2_round(double magnitude) {
    if (!(magnitude > 0.0) || !std::isfinite(magnitude)) return 1.0;
    return std::exp2(std::round(std::log2(magnitude)));
}

}  // namespace

SimplexSolver::SimplexSolver(int num_vars, std::vector<double> objective,
                             std::vector<double> lower, std::vector<double> upper,
                             const std::vector<double>* column_scales,
                             const LpOptions& options)
    : num_vars_(num_vars),
      options_(options),
      objective_(std::move(objective)),
      lower_(std::move(lower)),
      upper_(std::move(upper)) {
    col_scale_.assign(num_vars_, 1.0);
    if (column_scales) {
        for (int j = 0; j < num_vars_ && j < static_cast<int>(column_scales->size()); ++j) {
            col_scale_[j] = pow2_round((*column_scales)[j]);
        }
    }
    // Scale into x' = x / C: bounds shrink by C, objective grows by C so
    // the optimum value is unchanged.
    state_.assign(num_vars_, VarState::kFree);
    for (int j = 0; j < num_vars_; ++j) {
        double c = col_scale_[j];
        objective_[j] *= c;
        if (std::isfinite(lower_[j])) lower_[j] /= c;
        if (std::isfinite(upper_[j])) upper_[j] /= c;
        if (std::isfinite(lower_[j])) {
            state_[j] = VarState::kAtLower;
        } else if (std::isfinite(upper_[j])) {
            state_[j] = VarState::kAtUpper;
        }
    }
    columns_.resize(num_vars_);
}

void SimplexSolver::append_row(const LinearConstraint& row) {
    Row scaled;
    scaled.sense = row.sense;
    scaled.terms.reserve(row.terms.size());
    double max_abs = 0.0;
    for (auto [col, coeff] : row.terms) {
        if (col < 0 || col >= num_vars_) throw std::out_of_range("append_row: bad column");
        double c = coeff * col_scale_[col];
        if (c != 0.0) {
            scaled.terms.push_back({col, c});
            max_abs = std::max(max_abs, std::abs(c));
        }
    }
    double rscale = pow2_round(max_abs);
    for (auto& [col, coeff] : scaled.terms) coeff /= rscale;
    scaled.rhs = row.rhs / rscale;

    const int m_old = static_cast<int>(rows_.size());
    rows_.push_back(std::move(scaled));
    row_scale_.push_back(rscale);
    for (auto [col, coeff] : rows_.back().terms) columns_[col].push_back({m_old, coeff});

    // Slack column for the new row; enters the basis immediately, so an
    // existing factorization stays valid:
    //   B_new = [[B, 0], [a_B, 1]]  =>  B_new^{-1} = [[B^{-1}, 0], [-a_B B^{-1}, 1]].
    state_.push_back(VarState::kBasic);
    const int m_new = m_old + 1;
    if (basis_valid_) {
        std::vector<double> grown(static_cast<std::size_t>(m_new) * m_new, 0.0);
        for (int p = 0; p < m_old; ++p) {
            std::copy_n(binv_.begin() + static_cast<std::size_t>(p) * m_old, m_old,
                        grown.begin() + static_cast<std::size_t>(p) * m_new);
        }
        // Coefficients of the current basic columns in the new row, by
        // basis position.
        std::vector<double> a_basic(m_old, 0.0);
        for (auto [col, coeff] : rows_.back().terms) {
            if (state_[col] == VarState::kBasic) {
                for (int p = 0; p < m_old; ++p) {
                    if (basic_[p] == col) {
                        a_basic[p] = coeff;
                        break;
                    }
                }
            }
        }
        double* last = grown.data() + static_cast<std::size_t>(m_old) * m_new;
        for (int q = 0; q < m_old; ++q) {
            double sum = 0.0;
            for (int p = 0; p < m_old; ++p) {
                sum += a_basic[p] * binv_[static_cast<std::size_t>(p) * m_old + q];
            }
            last[q] = -sum;
        }
        last[m_old] = 1.0;
        binv_ = std::move(grown);
    }
    basic_.push_back(num_vars_ + m_old);
    values_stale_ = true;
}

void SimplexSolver::set_bounds(int var, double lower, double upper) {
    if (var < 0 || var >= num_vars_) throw std::out_of_range("set_bounds: bad variable");
    double c = col_scale_[var];
    lower_[var] = std::isfinite(lower) ? lower / c : lower;
    upper_[var] = std::isfinite(upper) ? upper / c : upper;
    if (state_[var] != VarState::kBasic) {
        if (state_[var] == VarState::kAtUpper && !std::isfinite(upper_[var])) {
            state_[var] = std::isfinite(lower_[var]) ? VarState::kAtLower : VarState::kFree;
        }
        if (state_[var] == VarState::kAtLower && !std::isfinite(lower_[var])) {
            state_[var] = std::isfinite(upper_[var]) ? VarState::kAtUpper : VarState::kFree;
        }
        if (state_[var] == VarState::kFree && std::isfinite(lower_[var])) {
            state_[var] = VarState::kAtLower;
        }
        values_stale_ = true;  // a nonbasic value moved; basis is unaffected
    }
}

double SimplexSolver::nonbasic_value(int col) const {
    double lo, hi;
    if (is_slack(col)) {
        const Row& row = rows_[col - num_vars_];
        lo = row.sense == RowSense::kGe ? -kInfinity : 0.0;
        hi = row.sense == RowSense::kLe ? kInfinity : 0.0;
        if (row.sense == RowSense::kEq) lo = hi = 0.0;
    } else {
        lo = lower_[col];
        hi = upper_[col];
    }
    switch (state_[col]) {
        case VarState::kAtLower: return lo;
        case VarState::kAtUpper: return hi;
        default: return 0.0;
    }
}

void SimplexSolver::compute_basic_values() {
    const int m = static_cast<int>(rows_.size());
    // rhs minus the nonbasic contribution, in row space.
    std::vector<double> residual(m, 0.0);
    for (int r = 0; r < m; ++r) {
        double acc = rows_[r].rhs;
        for (auto [col, coeff] : rows_[r].terms) {
            if (state_[col] != VarState::kBasic) acc -= coeff * nonbasic_value(col);
        }
        int slack = num_vars_ + r;
        if (state_[slack] != VarState::kBasic) acc -= nonbasic_value(slack);
        residual[r] = acc;
    }
    basic_value_.assign(m, 0.0);
    for (int p = 0; p < m; ++p) {
        const double* row = binv_.data() + static_cast<std::size_t>(p) * m;
        double acc = 0.0;
        for (int r = 0; r < m; ++r) acc += row[r] * residual[r];
        basic_value_[p] = acc;
    }
}

bool SimplexSolver::refactorize() {
    const int m = static_cast<int>(rows_.size());
    // Gauss-Jordan on [B | I] with partial pivoting. B's column p is the
    // constraint-matrix column of basic_[p].
    std::vector<double> b(static_cast<std::size_t>(m) * m, 0.0);
    for (int p = 0; p < m; ++p) {
        int col = basic_[p];
        if (is_slack(col)) {
            b[static_cast<std::size_t>(col - num_vars_) * m + p] = 1.0;
        } else {
            for (auto [r, coeff] : columns_[col]) {
                b[static_cast<std::size_t>(r) * m + p] = coeff;
            }
        }
    }
    binv_.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) binv_[static_cast<std::size_t>(i) * m + i] = 1.0;

    for (int p = 0; p < m; ++p) {
        int pivot_row = -1;
        double best = kPivotEps;
        for (int r = p; r < m; ++r) {
            double v = std::abs(b[static_cast<std::size_t>(r) * m + p]);
            if (v > best) {
                best = v;
                pivot_row = r;
            }
        }
        if (pivot_row < 0) return false;  // numerically singular basis
        if (pivot_row != p) {
            for (int c2 = 0; c2 < m; ++c2) {
                std::swap(b[static_cast<std::size_t>(pivot_row) * m + c2],
                          b[static_cast<std::size_t>(p) * m + c2]);
                std::swap(binv_[static_cast<std::size_t>(pivot_row) * m + c2],
                          binv_[static_cast<std::size_t>(p) * m + c2]);
            }
            std::swap(basic_[pivot_row], basic_[p]);
        }
        double piv = b[static_cast<std::size_t>(p) * m + p];
        double inv = 1.0 / piv;
        for (int c2 = 0; c2 < m; ++c2) {
            b[static_cast<std::size_t>(p) * m + c2] *= inv;
            binv_[static_cast<std::size_t>(p) * m + c2] *= inv;
        }
        for (int r = 0; r < m; ++r) {
            if (r == p) continue;
            double f = b[static_cast<std::size_t>(r) * m + p];
            if (f == 0.0) continue;
            for (int c2 = 0; c2 < m; ++c2) {
                b[static_cast<std::size_t>(r) * m + c2] -=
                    f * b[static_cast<std::size_t>(p) * m + c2];
                binv_[static_cast<std::size_t>(r) * m + c2] -=
                    f * binv_[static_cast<std::size_t>(p) * m + c2];
            }
        }
    }
    return true;
}

void SimplexSolver::price(std::vector<double>& reduced,
                          const std::vector<double>& costs) const {
    const int m = static_cast<int>(rows_.size());
    // y = c_B^T B^{-1}
    std::vector<double> y(m, 0.0);
    for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        for (int p = 0; p < m; ++p) {
            double cb = costs[basic_[p]];
            if (cb != 0.0) acc += cb * binv_[static_cast<std::size_t>(p) * m + r];
        }
        y[r] = acc;
    }
    reduced = costs;
    for (int r = 0; r < m; ++r) {
        double yr = y[r];
        if (yr == 0.0) continue;
        for (auto [col, coeff] : rows_[r].terms) reduced[col] -= yr * coeff;
        reduced[num_vars_ + r] -= yr;  // slack column is e_r
    }
}

void SimplexSolver::column_in_basis_coords(int col, std::vector<double>& out) const {
    const int m = static_cast<int>(rows_.size());
    out.assign(m, 0.0);
    if (is_slack(col)) {
        int r = col - num_vars_;
        for (int p = 0; p < m; ++p) out[p] = binv_[static_cast<std::size_t>(p) * m + r];
        return;
    }
    for (auto [r, coeff] : columns_[col]) {
        for (int p = 0; p < m; ++p) {
            out[p] += coeff * binv_[static_cast<std::size_t>(p) * m + r];
        }
    }
}

void SimplexSolver::pivot(int entering, int leaving_pos,
                          const std::vector<double>& direction, double step,
                          int entering_dir) {
    const int m = static_cast<int>(rows_.size());
    for (int p = 0; p < m; ++p) {
        basic_value_[p] -= entering_dir * step * direction[p];
    }
    int leaving = basic_[leaving_pos];
    // Classify which bound the leaving variable landed on.
    double lo, hi;
    if (is_slack(leaving)) {
        const Row& row = rows_[leaving - num_vars_];
        lo = row.sense == RowSense::kGe ? -kInfinity : 0.0;
        hi = row.sense == RowSense::kLe ? kInfinity : 0.0;
        if (row.sense == RowSense::kEq) lo = hi = 0.0;
    } else {
        lo = lower_[leaving];
        hi = upper_[leaving];
    }
    double landed = basic_value_[leaving_pos];
    state_[leaving] = std::abs(landed - lo) <= std::abs(landed - hi)
                          ? VarState::kAtLower
                          : VarState::kAtUpper;

    basic_[leaving_pos] = entering;
    basic_value_[leaving_pos] = nonbasic_value(entering) + entering_dir * step;
    state_[entering] = VarState::kBasic;

    // Elementary row update of B^{-1}: divide the pivot row by the pivot
    // element, eliminate the entering column from the other rows.
    double piv = direction[leaving_pos];
    double* prow = binv_.data() + static_cast<std::size_t>(leaving_pos) * m;
    double inv = 1.0 / piv;
    for (int c2 = 0; c2 < m; ++c2) prow[c2] *= inv;
    for (int p = 0; p < m; ++p) {
        if (p == leaving_pos) continue;
        double f = direction[p];
        if (f == 0.0) continue;
        double* row = binv_.data() + static_cast<std::size_t>(p) * m;
        for (int c2 = 0; c2 < m; ++c2) row[c2] -= f * prow[c2];
    }
}

LpStatus SimplexSolver::run_phase(bool phase_one, long long& iterations) {
    const int m = static_cast<int>(rows_.size());
    const int ncols = column_count();
    const double ftol = options_.feasibility_tol;
    const double dtol = options_.optimality_tol;

    std::vector<double> costs(ncols, 0.0);
    std::vector<double> reduced;
    std::vector<double> direction;
    int stall = 0;
    bool bland = false;
    int pivots_since_refactor = 0;
    double last_merit = kInfinity;

    auto bound_of = [&](int col, bool want_lower) {
        if (is_slack(col)) {
            const Row& row = rows_[col - num_vars_];
            if (row.sense == RowSense::kEq) return 0.0;
            if (row.sense == RowSense::kGe) return want_lower ? -kInfinity : 0.0;
            return want_lower ? 0.0 : kInfinity;
        }
        return want_lower ? lower_[col] : upper_[col];
    };

    while (true) {
        if (iterations >= options_.iteration_limit) return LpStatus::kIterationLimit;
        if ((iterations & 127) == 0 && std::chrono::steady_clock::now() >= deadline_) {
            return LpStatus::kIterationLimit;
        }
        ++iterations;
        ++total_iterations_;

        // Costs: phase 1 charges infeasible basics +-1; phase 2 minimizes
        // the negated objective.
        double merit = 0.0;
        if (phase_one) {
            std::fill(costs.begin(), costs.end(), 0.0);
            bool any_infeasible = false;
            for (int p = 0; p < m; ++p) {
                int col = basic_[p];
                double lo = bound_of(col, true), hi = bound_of(col, false);
                double v = basic_value_[p];
                if (v < lo - ftol) {
                    costs[col] = -1.0;
                    merit += lo - v;
                    any_infeasible = true;
                } else if (v > hi + ftol) {
                    costs[col] = 1.0;
                    merit += v - hi;
                    any_infeasible = true;
                }
            }
            if (!any_infeasible) return LpStatus::kOptimal;
        } else {
            for (int j = 0; j < ncols; ++j) costs[j] = j < num_vars_ ? -objective_[j] : 0.0;
            for (int p = 0; p < m; ++p) {
                merit += costs[basic_[p]] * basic_value_[p];
            }
            for (int j = 0; j < ncols; ++j) {
                if (state_[j] != VarState::kBasic && costs[j] != 0.0) {
                    merit += costs[j] * nonbasic_value(j);
                }
            }
        }
        if (merit < last_merit - 1e-12 * (1.0 + std::abs(last_merit))) {
            stall = 0;
            bland = false;
        }
        last_merit = merit;

        price(reduced, costs);

        // Entering variable: a nonbasic column whose allowed movement
        // direction improves the (minimization) merit.
        int entering = -1;
        int entering_dir = 0;
        double best_score = dtol;
        for (int j = 0; j < ncols; ++j) {
            if (state_[j] == VarState::kBasic) continue;
            if (!is_slack(j) && lower_[j] == upper_[j] && state_[j] != VarState::kFree) {
                continue;  // fixed variable can never move
            }
            double d = reduced[j];
            int dir = 0;
            if (state_[j] == VarState::kAtLower && d < -best_score) {
                dir = 1;
            } else if (state_[j] == VarState::kAtUpper && d > best_score) {
                dir = -1;
            } else if (state_[j] == VarState::kFree && std::abs(d) > best_score) {
                dir = d < 0 ? 1 : -1;
            }
            if (dir != 0) {
                entering = j;
                entering_dir = dir;
                if (bland) break;       // lowest-index rule
                best_score = std::abs(d);
            }
        }
        if (entering < 0) {
            return phase_one ? LpStatus::kInfeasible  // merit > 0 yet optimal
                             : LpStatus::kOptimal;
        }

        column_in_basis_coords(entering, direction);

        // Ratio test. Movement of basic p per unit step: -dir * direction[p].
        double limit = kInfinity;
        int leaving_pos = -1;
        {
            double own_range = bound_of(entering, false) - bound_of(entering, true);
            if (std::isfinite(own_range)) limit = own_range;
        }
        for (int p = 0; p < m; ++p) {
            double rate = -entering_dir * direction[p];
            if (std::abs(rate) < kPivotEps) continue;
            int col = basic_[p];
            double lo = bound_of(col, true), hi = bound_of(col, false);
            double v = basic_value_[p];
            // First breakpoint ahead of basic p. A phase-1-violated basic
            // moving toward its violated bound stops there (its cost flips);
            // one moving further away has no breakpoint (the worsening is
            // already priced into its +-1 cost).
            double t = kInfinity;
            if (rate > 0.0) {
                if (phase_one && v < lo - ftol) {
                    t = (lo - v) / rate;
                } else if (v <= hi + ftol && std::isfinite(hi)) {
                    t = (hi - v) / rate;
                }
            } else {
                if (phase_one && v > hi + ftol) {
                    t = (v - hi) / (-rate);
                } else if (v >= lo - ftol && std::isfinite(lo)) {
                    t = (v - lo) / (-rate);
                }
            }
            if (!std::isfinite(t)) continue;
            t = std::max(t, 0.0);  // drift can push t slightly negative
            if (t < limit - 1e-12 ||
                (t < limit + 1e-12 && leaving_pos >= 0 &&
                 (bland ? col < basic_[leaving_pos]
                        : std::abs(direction[p]) > std::abs(direction[leaving_pos])))) {
                limit = t;
                leaving_pos = p;
            }
        }

        if (!std::isfinite(limit)) {
            // Improving ray. In phase 1 the merit is bounded below, so this
            // is numerical breakdown rather than a real ray.
            return phase_one ? LpStatus::kNumericalError : LpStatus::kUnbounded;
        }

        if (limit <= kDegenerateStep) {
            if (++stall > options_.stall_threshold) bland = true;
        } else {
            stall = 0;
        }

        if (leaving_pos < 0) {
            // Bound flip: the entering variable runs to its other bound.
            for (int p = 0; p < m; ++p) {
                basic_value_[p] -= entering_dir * limit * direction[p];
            }
            state_[entering] = state_[entering] == VarState::kAtLower
                                   ? VarState::kAtUpper
                                   : VarState::kAtLower;
            continue;
        }

        pivot(entering, leaving_pos, direction, limit, entering_dir);
        if (++pivots_since_refactor >= options_.refactor_every) {
            pivots_since_refactor = 0;
            if (!refactorize()) return LpStatus::kNumericalError;
            compute_basic_values();
        }
    }
}

void SimplexSolver::collapse_to_slack_basis() {
    const int m = static_cast<int>(rows_.size());
    for (int p = 0; p < static_cast<int>(basic_.size()); ++p) {
        int col = basic_[p];
        if (!is_slack(col)) {
            state_[col] = std::isfinite(lower_[col]) ? VarState::kAtLower
                          : std::isfinite(upper_[col]) ? VarState::kAtUpper
                                                       : VarState::kFree;
        }
    }
    for (int r = 0; r < m; ++r) {
        basic_[r] = num_vars_ + r;
        state_[num_vars_ + r] = VarState::kBasic;
    }
    basis_valid_ = false;
    values_stale_ = true;
}

LpResult SimplexSolver::solve() {
    LpResult result;
    const int m = static_cast<int>(rows_.size());
    if (!basis_valid_) {
        if (!refactorize()) {
            // Retry once from the all-slack basis (identity, never singular).
            collapse_to_slack_basis();
            if (!refactorize()) {
                result.status = LpStatus::kNumericalError;
                return result;
            }
        }
        basis_valid_ = true;
        values_stale_ = true;
    }
    if (values_stale_) {
        compute_basic_values();
        values_stale_ = false;
    }

    deadline_ = options_.time_limit_s > 0.0
                    ? std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(options_.time_limit_s))
                    : std::chrono::steady_clock::time_point::max();

    long long iterations = 0;
    LpStatus status = run_phase(true, iterations);
    if (status == LpStatus::kOptimal) {
        status = run_phase(false, iterations);
    }
    result.iterations = iterations;
    result.status = status;
    if (status == LpStatus::kUnbounded || status == LpStatus::kNumericalError ||
        status == LpStatus::kIterationLimit) {
        if (status == LpStatus::kNumericalError) collapse_to_slack_basis();
        return result;
    }

    // Unscale the structural solution.
    result.x.assign(num_vars_, 0.0);
    for (int j = 0; j < num_vars_; ++j) {
        double v = state_[j] == VarState::kBasic ? 0.0 : nonbasic_value(j);
        result.x[j] = v * col_scale_[j];
    }
    for (int p = 0; p < m; ++p) {
        if (basic_[p] < num_vars_) {
            result.x[basic_[p]] = basic_value_[p] * col_scale_[basic_[p]];
        }
    }
    double obj = 0.0;
    for (int j = 0; j < num_vars_; ++j) {
        // objective_ was scaled by C, values unscaled by C: recompute from
        // the original coefficients to avoid double scaling.
        obj += (objective_[j] / col_scale_[j]) * result.x[j];
    }
    result.objective = obj;
    return result;
}

LpResult solve_lp(const LpProblem& problem, const LpOptions& options) {
    if (static_cast<int>(problem.objective.size()) != problem.num_vars ||
        static_cast<int>(problem.lower.size()) != problem.num_vars ||
        static_cast<int>(problem.upper.size()) != problem.num_vars) {
        throw std::invalid_argument("solve_lp: inconsistent problem dimensions");
    }
    // Bound-range based column scaling, same policy as the MILP layer.
    std::vector<double> scales(problem.num_vars, 1.0);
    for (int j = 0; j < problem.num_vars; ++j) {
        double hi = std::abs(problem.upper[j]);
        double lo = std::abs(problem.lower[j]);
        double magnitude = 0.0;
        if (std::isfinite(problem.upper[j])) magnitude = std::max(magnitude, hi);
        if (std::isfinite(problem.lower[j])) magnitude = std::max(magnitude, lo);
        if (magnitude > 1.0) scales[j] = magnitude;
    }
    SimplexSolver solver(problem.num_vars, problem.objective, problem.lower,
                         problem.upper, &scales, options);
    for (const LinearConstraint& row : problem.rows) solver.append_row(row);
    return solver.solve();
}

}  // namespace mmudn
