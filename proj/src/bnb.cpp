#include "mmudn/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mmudn {
namespace {

constexpr int kMaxTreeUes = 24;
constexpr int kMaxTreeAns = 24;
// The LP relaxation is solved at the root, where its bound shapes the whole
// search; descendants inherit it and rely on the combinatorial bound, which
// is exact arithmetic and orders of magnitude cheaper per node. The LP is
// skipped entirely for models too large to pay off, and for solves given a
// small node budget (the budget is better spent on the tree).
constexpr int kLpDepth = 0;
constexpr int kRootLazyRounds = 12;
constexpr int kNodeLazyRounds = 6;
constexpr int kRowsPerRound = 64;
constexpr int kMaxWorkingRows = 600;
constexpr int kLpModelVarCap = 8000;
constexpr long long kLpMinNodeBudget = 100'000;
constexpr int kPolishCandidates = 8;
// Simplex works to 1e-7 tolerances; inflating LP bounds by the same margin
// keeps a tolerance-level underestimate from pruning the true optimum.
constexpr double kLpBoundSafety = 1e-7;

double prune_line(double incumbent, double gap) {
    return incumbent + gap * (1.0 + std::abs(incumbent));
}

std::uint32_t bit(int m) { return std::uint32_t{1} << m; }

// One open subproblem. allowed[k] is the bitmask of ANs UE k may still use;
// a singleton mask is a fixed assignment, so assignment-row propagation is
// built into the representation.
struct Node {
    std::array<std::uint32_t, kMaxTreeUes> allowed;
    double bound = 0.0;
    long long seq = 0;
    int depth = 0;
};

// Max-heap order for best-bound selection: larger bound first, FIFO on ties.
struct NodeHeapLess {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.seq > b.seq;
    }
};

std::vector<double> sorted_sinr_profile(const RateReport& report) {
    std::vector<double> key = report.sinr;
    std::sort(key.begin(), key.end());
    return key;
}

// One first-improvement pass: single-UE moves in (k, m) order, then pair
// swaps in (k1, k2) order. Returns true after accepting one move.
bool local_search_step(Association& assoc, const PathGainMatrix& gains,
                       int antennas, double per_an_power, double& value) {
    const int num_ues = gains.num_ues;
    const int num_ans = gains.num_ans;
    for (int k = 0; k < num_ues; ++k) {
        int original = assoc.serving_an[k];
        for (int m = 0; m < num_ans; ++m) {
            if (m == original) continue;
            assoc.serving_an[k] = m;
            RateReport report = evaluate_association(assoc, gains, antennas, per_an_power);
            if (report.feasible && report.min_sinr > value) {
                value = report.min_sinr;
                return true;
            }
        }
        assoc.serving_an[k] = original;
    }
    for (int k1 = 0; k1 < num_ues; ++k1) {
        for (int k2 = k1 + 1; k2 < num_ues; ++k2) {
            if (assoc.serving_an[k1] == assoc.serving_an[k2]) continue;
            std::swap(assoc.serving_an[k1], assoc.serving_an[k2]);
            RateReport report = evaluate_association(assoc, gains, antennas, per_an_power);
            if (report.feasible && report.min_sinr > value) {
                value = report.min_sinr;
                return true;
            }
            std::swap(assoc.serving_an[k1], assoc.serving_an[k2]);
        }
    }
    return false;
}

double polish(Association& assoc, const PathGainMatrix& gains, int antennas,
              double per_an_power) {
    RateReport report = evaluate_association(assoc, gains, antennas, per_an_power);
    double value = report.feasible ? report.min_sinr : -kInfinity;
    while (local_search_step(assoc, gains, antennas, per_an_power, value)) {
    }
    return value;
}

class TreeSearch {
public:
    TreeSearch(const MilpModel& model, const BnBConfig& config)
        : model_(model),
          config_(config),
          num_ues_(model.vars.num_ues()),
          num_ans_(model.vars.num_ans()) {}

    SolveResult run();

private:
    struct LpNodeOutcome {
        enum class Kind { kPruned, kBounded, kNoBound };
        Kind kind = Kind::kNoBound;
        double bound = kInfinity;
        bool integral = false;
        bool exact = false;  // no model row violated: the LP value is the node optimum
        std::vector<double> x;
    };

    bool decided(const Node& node) const {
        for (int k = 0; k < num_ues_; ++k) {
            if (std::popcount(node.allowed[k]) != 1) return false;
        }
        return true;
    }

    Association association_from(const Node& node) const {
        Association assoc;
        assoc.serving_an.resize(num_ues_);
        for (int k = 0; k < num_ues_; ++k) {
            assoc.serving_an[k] = std::countr_zero(node.allowed[k]);
        }
        return assoc;
    }

    bool try_incumbent(const Association& assoc, SolveResult& result) {
        if (static_cast<int>(assoc.serving_an.size()) != num_ues_) return false;
        RateReport report =
            evaluate_association(assoc, model_.gains, model_.antennas, model_.per_an_power);
        if (!report.feasible) return false;
        if (!has_incumbent_ || report.min_sinr > result.theta_star) {
            result.theta_star = report.min_sinr;
            result.incumbent = assoc;
            has_incumbent_ = true;
            return true;
        }
        return false;
    }

    // Upper bound from the fixings alone: each UE's best remaining AN under
    // a load lower bound (its fixed co-users plus itself) and interference
    // from every AN that already carries a fixed UE. -inf when some UE has
    // no feasible AN left.
    double combinatorial_bound(const Node& node) const {
        const int antennas = model_.antennas;
        const double p = model_.per_an_power;
        std::array<int, kMaxTreeAns> fixed_load{};
        for (int k = 0; k < num_ues_; ++k) {
            if (std::popcount(node.allowed[k]) == 1) {
                ++fixed_load[std::countr_zero(node.allowed[k])];
            }
        }
        double bound = kInfinity;
        for (int k = 0; k < num_ues_; ++k) {
            double sure_interference = 0.0;
            for (int m = 0; m < num_ans_; ++m) {
                if (fixed_load[m] > 0) sure_interference += p * model_.gains.at(k, m);
            }
            bool fixed_here = std::popcount(node.allowed[k]) == 1;
            double best = -kInfinity;
            for (std::uint32_t rest = node.allowed[k]; rest != 0; rest &= rest - 1) {
                int m = std::countr_zero(rest);
                int load = fixed_load[m] + (fixed_here ? 0 : 1);
                if (load > antennas + 1) continue;
                double factor =
                    static_cast<double>(antennas - load + 1) / static_cast<double>(load);
                double interference = sure_interference;
                if (fixed_load[m] > 0) interference -= p * model_.gains.at(k, m);
                double gamma = factor * p * model_.gains.at(k, m) / (1.0 + interference);
                best = std::max(best, gamma);
            }
            if (best == -kInfinity) return -kInfinity;
            bound = std::min(bound, best);
        }
        return bound;
    }

    // Column fixings implied by the node's masks, for the LP: alpha and rho
    // bounds, plus the product binaries (z, v, u) and the w/n ceilings they
    // force to zero. Forced-one products are pinned as well.
    void target_bounds(const Node& node, std::vector<double>& lo,
                       std::vector<double>& hi) const {
        const VarCatalog& vars = model_.vars;
        lo = model_.lower;
        hi = model_.upper;

        // 0 = fixed zero, 1 = fixed one, 2 = free.
        auto alpha_state = [&](int k, int m) -> int {
            std::uint32_t mask = node.allowed[k];
            if ((mask & bit(m)) == 0) return 0;
            return mask == bit(m) ? 1 : 2;
        };
        std::array<int, kMaxTreeAns> rho_state;
        for (int m = 0; m < num_ans_; ++m) {
            bool usable = false, forced = false;
            for (int k = 0; k < num_ues_; ++k) {
                std::uint32_t mask = node.allowed[k];
                if (mask & bit(m)) usable = true;
                if (mask == bit(m)) forced = true;
            }
            // An AN no UE may use is switched off outright: completions that
            // keep it active are dominated (pure extra interference).
            rho_state[m] = forced ? 1 : (usable ? 2 : 0);
        }

        for (int k = 0; k < num_ues_; ++k) {
            for (int m = 0; m < num_ans_; ++m) {
                int a = alpha_state(k, m);
                int col = vars.alpha(k, m);
                if (a == 0) hi[col] = 0.0;
                if (a == 1) lo[col] = 1.0;
            }
        }
        for (int m = 0; m < num_ans_; ++m) {
            int col = vars.rho(m);
            if (rho_state[m] == 0) hi[col] = 0.0;
            if (rho_state[m] == 1) lo[col] = 1.0;
        }
        for (int i = 0; i < num_ues_; ++i) {
            for (int m = 0; m < num_ans_; ++m) {
                int aim = alpha_state(i, m);
                for (int j = 0; j < num_ans_; ++j) {
                    if (j == m) continue;
                    int z = aim == 0 || rho_state[j] == 0
                                ? 0
                                : (aim == 1 && rho_state[j] == 1 ? 1 : 2);
                    int zcol = vars.z(i, m, j);
                    if (z == 0) hi[zcol] = 0.0;
                    if (z == 1) lo[zcol] = 1.0;
                    for (int k = 0; k < num_ues_; ++k) {
                        int akm = alpha_state(k, m);
                        int u = z == 0 || akm == 0 ? 0 : (z == 1 && akm == 1 ? 1 : 2);
                        int ucol = vars.u(i, m, j, k);
                        if (u == 0) {
                            hi[ucol] = 0.0;
                            hi[vars.n(i, m, j, k)] = 0.0;
                        }
                        if (u == 1) lo[ucol] = 1.0;
                    }
                }
                for (int k = 0; k < num_ues_; ++k) {
                    int akm = alpha_state(k, m);
                    int v = aim == 0 || akm == 0 ? 0 : (aim == 1 && akm == 1 ? 1 : 2);
                    int vcol = vars.v(i, m, k);
                    if (v == 0) {
                        hi[vcol] = 0.0;
                        hi[vars.w(i, m, k)] = 0.0;
                    }
                    if (v == 1) lo[vcol] = 1.0;
                }
            }
        }
    }

    void ensure_lp() {
        if (lp_) return;
        const int n = model_.vars.num_vars();
        std::vector<double> objective(n, 0.0);
        objective[model_.objective_col] = 1.0;
        std::vector<double> scales = column_scales(model_);
        lp_ = std::make_unique<SimplexSolver>(n, std::move(objective), model_.lower,
                                              model_.upper, &scales, lp_options_);
        current_lo_ = model_.lower;
        current_hi_ = model_.upper;
        in_working_.assign(model_.rows.size(), false);
        // The assignment and activation-link rows carry the association
        // structure; everything else is pulled in on violation.
        for (std::size_t r = 0; r < model_.rows.size(); ++r) {
            RowFamily family = model_.row_tags[r].family;
            if (family == RowFamily::kAssign || family == RowFamily::kLink) {
                lp_->append_row(model_.rows[r]);
                in_working_[r] = true;
                ++working_rows_;
            }
        }
    }

    void apply_node_bounds(const Node& node) {
        target_bounds(node, scratch_lo_, scratch_hi_);
        for (int j = 0; j < model_.vars.num_vars(); ++j) {
            if (scratch_lo_[j] != current_lo_[j] || scratch_hi_[j] != current_hi_[j]) {
                lp_->set_bounds(j, scratch_lo_[j], scratch_hi_[j]);
                current_lo_[j] = scratch_lo_[j];
                current_hi_[j] = scratch_hi_[j];
            }
        }
    }

    LpNodeOutcome run_node_lp(const Node& node, SolveResult& result) {
        ensure_lp();
        apply_node_bounds(node);
        LpNodeOutcome out;
        const int rounds = node.depth == 0 ? kRootLazyRounds : kNodeLazyRounds;
        for (int round = 0; round < rounds; ++round) {
            if (config_.time_limit_s > 0.0) {
                double remaining = config_.time_limit_s - elapsed_s_();
                if (remaining <= 0.0) return out;
                lp_->options().time_limit_s = remaining;
            }
            LpResult res = lp_->solve();
            result.lp_iterations += res.iterations;
            if (res.status == LpStatus::kInfeasible) {
                out.kind = LpNodeOutcome::Kind::kPruned;
                return out;
            }
            if (res.status != LpStatus::kOptimal) {
                // Iteration limit or numerical trouble: any bound from an
                // earlier round is still valid (rows only accumulate).
                return out;
            }
            out.kind = LpNodeOutcome::Kind::kBounded;
            out.bound = res.objective;
            out.x = std::move(res.x);
            out.integral = true;
            for (int j = 0; j < model_.vars.num_binaries(); ++j) {
                double frac = out.x[j];
                if (frac > config_.integrality_tol && frac < 1.0 - config_.integrality_tol) {
                    out.integral = false;
                    break;
                }
            }

            // Activate the most violated absent rows and re-solve.
            violated_.clear();
            for (std::size_t r = 0; r < model_.rows.size(); ++r) {
                if (in_working_[r]) continue;
                const LinearConstraint& row = model_.rows[r];
                double activity = 0.0;
                for (auto [col, coeff] : row.terms) activity += coeff * out.x[col];
                double violation = 0.0;
                switch (row.sense) {
                    case RowSense::kGe: violation = row.rhs - activity; break;
                    case RowSense::kLe: violation = activity - row.rhs; break;
                    case RowSense::kEq: violation = std::abs(activity - row.rhs); break;
                }
                if (violation > 1e-7 * (1.0 + std::abs(row.rhs))) {
                    violated_.push_back({violation, static_cast<int>(r)});
                }
            }
            if (violated_.empty()) {
                out.exact = true;
                return out;
            }
            if (working_rows_ >= kMaxWorkingRows) return out;
            std::sort(violated_.begin(), violated_.end(),
                      [](const std::pair<double, int>& a, const std::pair<double, int>& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });
            int appended = 0;
            for (auto [violation, r] : violated_) {
                if (appended >= kRowsPerRound || working_rows_ >= kMaxWorkingRows) break;
                lp_->append_row(model_.rows[r]);
                in_working_[r] = true;
                ++working_rows_;
                ++appended;
            }
            if (appended == 0) return out;
        }
        return out;
    }

    Association round_from_x(const Node& node, const std::vector<double>& x) const {
        Association assoc;
        assoc.serving_an.resize(num_ues_);
        for (int k = 0; k < num_ues_; ++k) {
            int best_m = -1;
            double best_val = -1.0;
            for (std::uint32_t rest = node.allowed[k]; rest != 0; rest &= rest - 1) {
                int m = std::countr_zero(rest);
                double val = x[model_.vars.alpha(k, m)];
                if (val > best_val) {
                    best_val = val;
                    best_m = m;
                }
            }
            assoc.serving_an[k] = best_m;
        }
        return assoc;
    }

    // Branching column: most-fractional free alpha when an LP point is at
    // hand (ties to the lowest column index); otherwise the first undecided
    // UE paired with its strongest remaining AN. The lowest-index rule
    // ignores the LP point entirely.
    std::pair<int, int> pick_branch(const Node& node, const std::vector<double>* x) const {
        if (config_.branching == BranchRule::kLowestIndex || x == nullptr) {
            for (int k = 0; k < num_ues_; ++k) {
                if (std::popcount(node.allowed[k]) <= 1) continue;
                if (config_.branching == BranchRule::kLowestIndex) {
                    return {k, std::countr_zero(node.allowed[k])};
                }
                int best_m = -1;
                double best_gain = -1.0;
                for (std::uint32_t rest = node.allowed[k]; rest != 0; rest &= rest - 1) {
                    int m = std::countr_zero(rest);
                    if (model_.gains.at(k, m) > best_gain) {
                        best_gain = model_.gains.at(k, m);
                        best_m = m;
                    }
                }
                return {k, best_m};
            }
            return {-1, -1};
        }
        int best_k = -1, best_m = -1;
        double best_dist = kInfinity;
        for (int k = 0; k < num_ues_; ++k) {
            if (std::popcount(node.allowed[k]) <= 1) continue;
            for (std::uint32_t rest = node.allowed[k]; rest != 0; rest &= rest - 1) {
                int m = std::countr_zero(rest);
                double dist = std::abs((*x)[model_.vars.alpha(k, m)] - 0.5);
                if (dist < best_dist) {
                    best_dist = dist;
                    best_k = k;
                    best_m = m;
                }
            }
        }
        return {best_k, best_m};
    }

    void log_progress(const SolveResult& result, double bound, std::size_t open) const {
        if (config_.log == nullptr) return;
        char line[160];
        std::snprintf(line, sizeof(line),
                      "nodes=%lld open=%zu bound=%.9g incumbent=%.9g gap=%.3e\n",
                      result.nodes_explored, open, bound,
                      has_incumbent_ ? result.theta_star : std::nan(""),
                      has_incumbent_ ? (bound - result.theta_star) / (1.0 + std::abs(bound))
                                     : std::nan(""));
        *config_.log << line;
    }

    double elapsed_s_() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

    const MilpModel& model_;
    const BnBConfig& config_;
    int num_ues_;
    int num_ans_;
    std::chrono::steady_clock::time_point start_;
    bool use_lp_ = true;
    bool has_incumbent_ = false;

    LpOptions lp_options_{1e-7, 1e-7, 60, 20'000, 100};
    std::unique_ptr<SimplexSolver> lp_;
    std::vector<double> current_lo_, current_hi_;
    std::vector<double> scratch_lo_, scratch_hi_;
    std::vector<bool> in_working_;
    std::vector<std::pair<double, int>> violated_;
    int working_rows_ = 0;
};

SolveResult TreeSearch::run() {
    start_ = std::chrono::steady_clock::now();
    if (num_ues_ > kMaxTreeUes || num_ans_ > kMaxTreeAns) {
        throw std::invalid_argument(
            "solve_milp: instance exceeds the built-in tree limits (24 UEs / 24 ANs); "
            "export the model and use an external solver");
    }
    use_lp_ = model_.vars.num_vars() <= kLpModelVarCap &&
              (config_.node_limit <= 0 || config_.node_limit >= kLpMinNodeBudget);

    SolveResult result;
    try_incumbent(baseline_association(model_.gains), result);
    try_incumbent(greedy_incumbent(model_.gains, model_.antennas, model_.per_an_power),
                  result);

    Node root;
    root.allowed.fill(0);
    std::uint32_t full = num_ans_ >= 32 ? ~std::uint32_t{0} : bit(num_ans_) - 1;
    for (int k = 0; k < num_ues_; ++k) root.allowed[k] = full;
    root.bound = model_.big_m;
    root.seq = 0;
    long long next_seq = 1;

    const bool best_bound_mode = config_.node_selection == NodeSelection::kBestBound;
    std::vector<Node> open;
    open.push_back(root);
    if (best_bound_mode) std::push_heap(open.begin(), open.end(), NodeHeapLess{});

    bool limit_hit = false;
    while (!open.empty()) {
        if (config_.node_limit > 0 && result.nodes_explored >= config_.node_limit) {
            limit_hit = true;
            break;
        }
        if (config_.time_limit_s > 0.0 && elapsed_s_() >= config_.time_limit_s) {
            limit_hit = true;
            break;
        }

        Node node;
        if (best_bound_mode) {
            std::pop_heap(open.begin(), open.end(), NodeHeapLess{});
            node = std::move(open.back());
        } else {
            node = std::move(open.back());
        }
        open.pop_back();
        ++result.nodes_explored;
        if (config_.log_every_nodes > 0 &&
            result.nodes_explored % config_.log_every_nodes == 0) {
            log_progress(result, node.bound, open.size());
        }

        if (has_incumbent_ &&
            node.bound <= prune_line(result.theta_star, config_.relative_gap)) {
            continue;
        }
        if (decided(node)) {
            try_incumbent(association_from(node), result);
            continue;
        }

        node.bound = std::min(node.bound, combinatorial_bound(node));
        if (node.bound == -kInfinity) continue;  // no feasible completion
        if (has_incumbent_ &&
            node.bound <= prune_line(result.theta_star, config_.relative_gap)) {
            continue;
        }

        std::vector<double> lp_x;
        const std::vector<double>* branch_x = nullptr;
        if (use_lp_ && node.depth <= kLpDepth) {
            LpNodeOutcome out = run_node_lp(node, result);
            if (out.kind == LpNodeOutcome::Kind::kPruned) continue;
            if (out.kind == LpNodeOutcome::Kind::kBounded) {
                node.bound = std::min(
                    node.bound, out.bound + kLpBoundSafety * (1.0 + std::abs(out.bound)));
                if (has_incumbent_ &&
                    node.bound <= prune_line(result.theta_star, config_.relative_gap)) {
                    continue;
                }
                try_incumbent(round_from_x(node, out.x), result);
                if (out.integral && out.exact) {
                    // The LP point itself is integer-feasible for the full
                    // model, so it solves this subtree.
                    try {
                        try_incumbent(
                            extract_association(out.x, model_, config_.integrality_tol),
                            result);
                        continue;
                    } catch (const std::exception&) {
                        // fall through to branching
                    }
                }
                lp_x = std::move(out.x);
                branch_x = &lp_x;
            }
        }

        auto [bk, bm] = pick_branch(node, branch_x);
        if (bk < 0) {  // defensive: undecided node must have a free alpha
            try_incumbent(association_from(node), result);
            continue;
        }
        Node take = node;
        take.allowed[bk] = bit(bm);
        take.depth = node.depth + 1;
        take.seq = next_seq++;
        Node ban = node;
        ban.allowed[bk] &= ~bit(bm);
        ban.depth = node.depth + 1;
        ban.seq = next_seq++;

        if (best_bound_mode) {
            open.push_back(std::move(take));
            std::push_heap(open.begin(), open.end(), NodeHeapLess{});
            if (ban.allowed[bk] != 0) {
                open.push_back(std::move(ban));
                std::push_heap(open.begin(), open.end(), NodeHeapLess{});
            }
        } else {
            // Stack order: the "take" child pops first to reach leaves fast.
            if (ban.allowed[bk] != 0) open.push_back(std::move(ban));
            open.push_back(std::move(take));
        }
    }

    if (!limit_hit) {
        if (has_incumbent_) {
            result.status = SolveStatus::kOptimal;
            result.best_bound = result.theta_star;
        } else {
            result.status = SolveStatus::kInfeasible;
            result.theta_star = 0.0;
            result.best_bound = 0.0;
        }
    } else {
        result.status = SolveStatus::kFeasibleLimit;
        double open_bound = has_incumbent_ ? result.theta_star : 0.0;
        for (const Node& node : open) open_bound = std::max(open_bound, node.bound);
        result.best_bound = open_bound;
    }
    result.wall_time_s = elapsed_s_();
    return result;
}

}  // namespace

double SolveResult::gap() const {
    double diff = best_bound - theta_star;
    if (!(diff > 0.0)) return 0.0;
    return diff / (1.0 + std::abs(best_bound));
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::kOptimal: return "optimal";
        case SolveStatus::kFeasibleLimit: return "feasible_limit";
        case SolveStatus::kInfeasible: return "infeasible";
    }
    return "unknown";
}

SolveResult solve_milp(const MilpModel& model, const BnBConfig& config) {
    TreeSearch search(model, config);
    return search.run();
}

Association greedy_incumbent(const PathGainMatrix& gains, int antennas,
                             double per_an_power) {
    const int num_ues = gains.num_ues;
    const int num_ans = gains.num_ans;

    Association best = baseline_association(gains);
    double best_value = polish(best, gains, antennas, per_an_power);

    if (num_ans <= 14) {
        // Rank every candidate active set by the leximin SINR profile of
        // its restricted max-gain association, then polish the leaders.
        struct Candidate {
            std::vector<double> key;  // per-UE SINRs, ascending
            std::uint32_t mask;
            Association assoc;
        };
        std::vector<Candidate> candidates;
        const std::uint32_t full = bit(num_ans) - 1;
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            Association assoc;
            assoc.serving_an.resize(num_ues);
            for (int k = 0; k < num_ues; ++k) {
                int best_m = -1;
                double best_gain = -1.0;
                for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
                    int m = std::countr_zero(rest);
                    if (gains.at(k, m) > best_gain) {
                        best_gain = gains.at(k, m);
                        best_m = m;
                    }
                }
                assoc.serving_an[k] = best_m;
            }
            RateReport report = evaluate_association(assoc, gains, antennas, per_an_power);
            if (!report.feasible) continue;
            candidates.push_back({sorted_sinr_profile(report), mask, std::move(assoc)});
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const Candidate& a, const Candidate& b) {
                      if (a.key != b.key) return a.key > b.key;  // leximin, best first
                      return a.mask < b.mask;
                  });
        int polished = 0;
        for (Candidate& candidate : candidates) {
            if (polished >= kPolishCandidates) break;
            ++polished;
            double value = polish(candidate.assoc, gains, antennas, per_an_power);
            if (value > best_value) {
                best_value = value;
                best = candidate.assoc;
            }
        }
    }
    return best;
}

EquivalenceReport verify_equivalence(const PathGainMatrix& gains, int antennas,
                                     double per_an_power, const BnBConfig& config) {
    EquivalenceReport report;
    double big_m = choose_big_m(gains, antennas, per_an_power);
    MilpModel model = build_milp(gains, antennas, per_an_power, big_m);
    report.milp = solve_milp(model, config);
    report.theta_milp = report.milp.theta_star;

    BruteForceResult brute = brute_force_maxmin(gains, antennas, per_an_power);
    report.theta_brute = brute.theta_star;

    bool milp_infeasible = report.milp.status == SolveStatus::kInfeasible;
    bool brute_infeasible = brute.best.serving_an.empty();
    if (milp_infeasible || brute_infeasible) {
        bool agree = milp_infeasible && brute_infeasible;
        report.relative_gap = agree ? 0.0 : kInfinity;
        report.milp_incumbent_consistent = agree;
        report.brute_incumbent_consistent = agree;
        return report;
    }

    report.relative_gap =
        std::abs(report.theta_milp - report.theta_brute) / (1.0 + report.theta_brute);

    auto consistent = [&](const Association& assoc, double theta) {
        RateReport eval = evaluate_association(assoc, gains, antennas, per_an_power);
        return eval.feasible &&
               std::abs(eval.min_sinr - theta) <= 1e-6 * (1.0 + std::abs(theta));
    };
    report.milp_incumbent_consistent = consistent(report.milp.incumbent, report.theta_milp);
    report.brute_incumbent_consistent = consistent(brute.best, report.theta_brute);
    return report;
}

}  // namespace mmudn
