#include "mmudn/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace mmudn {

VarCatalog::VarCatalog(int num_ues, int num_ans) : K_(num_ues), M_(num_ans) {
    z0_ = K_ * M_ + M_;
    v0_ = z0_ + K_ * M_ * (M_ - 1);
    u0_ = v0_ + K_ * M_ * K_;
    w0_ = u0_ + K_ * M_ * (M_ - 1) * K_;
    n0_ = w0_ + K_ * M_ * K_;
}

std::string VarCatalog::name(int col) const {
    char buf[64];
    auto fmt = [&](const char* pattern, auto... args) {
        std::snprintf(buf, sizeof(buf), pattern, args...);
        return std::string(buf);
    };
    if (col < z0_) {
        if (col < K_ * M_) return fmt("a_%d_%d", col / M_, col % M_);
        return fmt("rho_%d", col - K_ * M_);
    }
    if (col < v0_) {
        int r = col - z0_;
        int jj = r % (M_ - 1), m = (r / (M_ - 1)) % M_, i = r / ((M_ - 1) * M_);
        return fmt("z_%d_%d_%d", i, m, jj < m ? jj : jj + 1);
    }
    if (col < u0_) {
        int r = col - v0_;
        return fmt("v_%d_%d_%d", r / (M_ * K_), (r / K_) % M_, r % K_);
    }
    if (col < w0_) {
        int r = col - u0_;
        int k = r % K_, jj = (r / K_) % (M_ - 1);
        int m = (r / (K_ * (M_ - 1))) % M_, i = r / (K_ * (M_ - 1) * M_);
        return fmt("u_%d_%d_%d_%d", i, m, jj < m ? jj : jj + 1, k);
    }
    if (col < n0_) {
        int r = col - w0_;
        return fmt("w_%d_%d_%d", r / (M_ * K_), (r / K_) % M_, r % K_);
    }
    if (col < theta()) {
        int r = col - n0_;
        int k = r % K_, jj = (r / K_) % (M_ - 1);
        int m = (r / (K_ * (M_ - 1))) % M_, i = r / (K_ * (M_ - 1) * M_);
        return fmt("n_%d_%d_%d_%d", i, m, jj < m ? jj : jj + 1, k);
    }
    return "theta";
}

ModelSize model_size(int num_ues, int num_ans) {
    const long long K = num_ues, M = num_ans;
    ModelSize size;
    size.binaries = K * M + M + K * M * (M - 1) + K * K * M + K * K * M * (M - 1);
    size.continuous = K * K * M + K * K * M * (M - 1) + 1;
    size.rows = K                          // assignment
                + K * M                    // activation links
                + 3 * K * M * (M - 1)      // z gadgets
                + 3 * K * K * M            // v gadgets
                + 3 * K * K * M * (M - 1)  // u gadgets
                + 3 * K * K * M            // w gadgets
                + 3 * K * K * M * (M - 1)  // n gadgets
                + K * M;                   // master rows
    return size;
}

std::string MilpModel::row_name(int row) const {
    const RowTag& t = row_tags[row];
    char buf[64];
    auto fmt = [&](const char* pattern, auto... args) {
        std::snprintf(buf, sizeof(buf), pattern, args...);
        return std::string(buf);
    };
    switch (t.family) {
        case RowFamily::kAssign: return fmt("assign_%d", t.k);
        case RowFamily::kLink: return fmt("link_%d_%d", t.k, t.m);
        case RowFamily::kZUpperA: return fmt("z_ub1_%d_%d_%d", t.i, t.m, t.j);
        case RowFamily::kZUpperR: return fmt("z_ub2_%d_%d_%d", t.i, t.m, t.j);
        case RowFamily::kZLower: return fmt("z_lb_%d_%d_%d", t.i, t.m, t.j);
        case RowFamily::kVUpperA: return fmt("v_ub1_%d_%d_%d", t.i, t.m, t.k);
        case RowFamily::kVUpperB: return fmt("v_ub2_%d_%d_%d", t.i, t.m, t.k);
        case RowFamily::kVLower: return fmt("v_lb_%d_%d_%d", t.i, t.m, t.k);
        case RowFamily::kUUpperZ: return fmt("u_ub1_%d_%d_%d_%d", t.i, t.m, t.j, t.k);
        case RowFamily::kUUpperA: return fmt("u_ub2_%d_%d_%d_%d", t.i, t.m, t.j, t.k);
        case RowFamily::kULower: return fmt("u_lb_%d_%d_%d_%d", t.i, t.m, t.j, t.k);
        case RowFamily::kWUpperQ: return fmt("w_ub1_%d_%d_%d", t.i, t.m, t.k);
        case RowFamily::kWUpperT: return fmt("w_ub2_%d_%d_%d", t.i, t.m, t.k);
        case RowFamily::kWLower: return fmt("w_lb_%d_%d_%d", t.i, t.m, t.k);
        case RowFamily::kNUpperQ: return fmt("n_ub1_%d_%d_%d_%d", t.i, t.m, t.j, t.k);
        case RowFamily::kNUpperT: return fmt("n_ub2_%d_%d_%d_%d", t.i, t.m, t.j, t.k);
        case RowFamily::kNLower: return fmt("n_lb_%d_%d_%d_%d", t.i, t.m, t.j, t.k);
        case RowFamily::kMaster: return fmt("master_%d_%d", t.k, t.m);
    }
    return "row";
}

double choose_big_m(const PathGainMatrix& gains, int antennas, double per_an_power) {
    double max_gain = 0.0;
    for (double g : gains.values) max_gain = std::max(max_gain, g);
    return antennas * per_an_power * max_gain;
}

namespace {

// The three rows forcing product = x * y for binary x, y:
//   product <= x, product <= y, product >= x + y - 1.
void emit_binary_product(MilpModel& model, int product, int x, int y,
                         RowFamily fam_x, RowFamily fam_y, RowFamily fam_lower,
                         RowTag tag) {
    tag.family = fam_x;
    model.rows.push_back({{{product, 1.0}, {x, -1.0}}, RowSense::kLe, 0.0});
    model.row_tags.push_back(tag);
    tag.family = fam_y;
    model.rows.push_back({{{product, 1.0}, {y, -1.0}}, RowSense::kLe, 0.0});
    model.row_tags.push_back(tag);
    tag.family = fam_lower;
    model.rows.push_back({{{product, 1.0}, {x, -1.0}, {y, -1.0}}, RowSense::kGe, -1.0});
    model.row_tags.push_back(tag);
}

// The three rows forcing product = gate * theta for binary gate and
// theta in [0, Q] (the fourth relation, product >= 0, is a bound):
//   product <= Q*gate, product <= theta, product >= theta - (1-gate)*Q.
// The last row is emitted as ">=": with "<=" (as printed in some
// renditions of this gadget) nothing pins product = theta when gate = 1,
// and the relaxation could cheat the master rows.
void emit_theta_product(MilpModel& model, int product, int gate, int theta, double q,
                        RowFamily fam_q, RowFamily fam_t, RowFamily fam_lower,
                        RowTag tag) {
    tag.family = fam_q;
    model.rows.push_back({{{product, 1.0}, {gate, -q}}, RowSense::kLe, 0.0});
    model.row_tags.push_back(tag);
    tag.family = fam_t;
    model.rows.push_back({{{product, 1.0}, {theta, -1.0}}, RowSense::kLe, 0.0});
    model.row_tags.push_back(tag);
    tag.family = fam_lower;
    model.rows.push_back({{{product, 1.0}, {theta, -1.0}, {gate, -q}}, RowSense::kGe, -q});
    model.row_tags.push_back(tag);
}

}  // namespace

MilpModel build_milp(const PathGainMatrix& gains, int antennas, double per_an_power,
                     double big_m) {
    const int K = gains.num_ues;
    const int M = gains.num_ans;
    if (K < 1 || M < 1) throw std::invalid_argument("build_milp: empty instance");
    if (per_an_power <= 0.0) throw std::invalid_argument("build_milp: power must be > 0");
    if (static_cast<int>(gains.values.size()) != K * M) {
        throw std::invalid_argument("build_milp: gain matrix dimension mismatch");
    }

    MilpModel model;
    model.vars = VarCatalog(K, M);
    model.gains = gains;
    model.antennas = antennas;
    model.per_an_power = per_an_power;
    model.big_m = big_m;

    const VarCatalog& c = model.vars;
    model.lower.assign(c.num_vars(), 0.0);
    model.upper.assign(c.num_vars(), 1.0);
    model.upper[c.theta()] = big_m;
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) model.upper[c.w(i, m, k)] = big_m;
            for (int j = 0; j < M; ++j) {
                if (j == m) continue;
                for (int k = 0; k < K; ++k) model.upper[c.n(i, m, j, k)] = big_m;
            }
        }
    }
    model.objective_col = c.theta();

    const ModelSize counts = model_size(K, M);
    model.rows.reserve(static_cast<std::size_t>(counts.rows));
    model.row_tags.reserve(static_cast<std::size_t>(counts.rows));

    // Assignment: each UE is served by exactly one AN.
    for (int k = 0; k < K; ++k) {
        LinearConstraint row;
        row.sense = RowSense::kEq;
        row.rhs = 1.0;
        for (int m = 0; m < M; ++m) row.terms.push_back({c.alpha(k, m), 1.0});
        model.rows.push_back(std::move(row));
        model.row_tags.push_back({RowFamily::kAssign, -1, -1, -1,
                                  static_cast<std::int16_t>(k)});
    }
    // Activation links: no UE on an inactive AN.
    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
            model.rows.push_back({{{c.alpha(k, m), 1.0}, {c.rho(m), -1.0}},
                                  RowSense::kLe, 0.0});
            model.row_tags.push_back({RowFamily::kLink, -1, static_cast<std::int16_t>(m),
                                      -1, static_cast<std::int16_t>(k)});
        }
    }
    // z_imj = alpha_im * rho_j.
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            for (int j = 0; j < M; ++j) {
                if (j == m) continue;
                RowTag tag{RowFamily::kZLower, static_cast<std::int16_t>(i),
                           static_cast<std::int16_t>(m), static_cast<std::int16_t>(j), -1};
                emit_binary_product(model, c.z(i, m, j), c.alpha(i, m), c.rho(j),
                                    RowFamily::kZUpperA, RowFamily::kZUpperR,
                                    RowFamily::kZLower, tag);
            }
        }
    }
    // v_imk = alpha_im * alpha_km.
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) {
                RowTag tag{RowFamily::kVLower, static_cast<std::int16_t>(i),
                           static_cast<std::int16_t>(m), -1, static_cast<std::int16_t>(k)};
                emit_binary_product(model, c.v(i, m, k), c.alpha(i, m), c.alpha(k, m),
                                    RowFamily::kVUpperA, RowFamily::kVUpperB,
                                    RowFamily::kVLower, tag);
            }
        }
    }
    // u_imjk = z_imj * alpha_km.
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            for (int j = 0; j < M; ++j) {
                if (j == m) continue;
                for (int k = 0; k < K; ++k) {
                    RowTag tag{RowFamily::kULower, static_cast<std::int16_t>(i),
                               static_cast<std::int16_t>(m), static_cast<std::int16_t>(j),
                               static_cast<std::int16_t>(k)};
                    emit_binary_product(model, c.u(i, m, j, k), c.z(i, m, j),
                                        c.alpha(k, m), RowFamily::kUUpperZ,
                                        RowFamily::kUUpperA, RowFamily::kULower, tag);
                }
            }
        }
    }
    // w_imk = v_imk * theta.
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) {
                RowTag tag{RowFamily::kWLower, static_cast<std::int16_t>(i),
                           static_cast<std::int16_t>(m), -1, static_cast<std::int16_t>(k)};
                emit_theta_product(model, c.w(i, m, k), c.v(i, m, k), c.theta(), big_m,
                                   RowFamily::kWUpperQ, RowFamily::kWUpperT,
                                   RowFamily::kWLower, tag);
            }
        }
    }
    // n_imjk = u_imjk * theta.
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            for (int j = 0; j < M; ++j) {
                if (j == m) continue;
                for (int k = 0; k < K; ++k) {
                    RowTag tag{RowFamily::kNLower, static_cast<std::int16_t>(i),
                               static_cast<std::int16_t>(m), static_cast<std::int16_t>(j),
                               static_cast<std::int16_t>(k)};
                    emit_theta_product(model, c.n(i, m, j, k), c.u(i, m, j, k), c.theta(),
                                       big_m, RowFamily::kNUpperQ, RowFamily::kNUpperT,
                                       RowFamily::kNLower, tag);
                }
            }
        }
    }
    // Master rows: for every (k, m),
    //   g_km (L+1) - g_km sum_i alpha_im >= (1/p) sum_i w_imk
    //                                       + sum_i sum_{j!=m} g_kj n_imjk.
    // When alpha_km = 1 the right side is S_m*theta*(1/p + sum_{j active}
    // g_kj) and the row is theta <= effective SINR of UE k; when
    // alpha_km = 0 it degenerates to the load cap S_m <= L+1.
    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) {
            LinearConstraint row;
            row.sense = RowSense::kGe;
            const double g_km = gains.at(k, m);
            row.rhs = -g_km * (antennas + 1);
            for (int i = 0; i < K; ++i) {
                row.terms.push_back({c.alpha(i, m), -g_km});
                row.terms.push_back({c.w(i, m, k), -1.0 / per_an_power});
                for (int j = 0; j < M; ++j) {
                    if (j == m) continue;
                    row.terms.push_back({c.n(i, m, j, k), -gains.at(k, j)});
                }
            }
            std::sort(row.terms.begin(), row.terms.end());
            model.rows.push_back(std::move(row));
            model.row_tags.push_back({RowFamily::kMaster, -1, static_cast<std::int16_t>(m),
                                      -1, static_cast<std::int16_t>(k)});
        }
    }
    return model;
}

std::vector<double> lift_association(const Association& assoc, const MilpModel& model) {
    const VarCatalog& c = model.vars;
    const int K = c.num_ues();
    const int M = c.num_ans();
    RateReport report = evaluate_association(assoc, model.gains, model.antennas,
                                             model.per_an_power);
    if (!report.feasible) {
        throw std::invalid_argument("lift_association: association overloads an AN");
    }
    const double theta = report.min_sinr;

    std::vector<double> x(c.num_vars(), 0.0);
    auto loads = assoc.loads(M);
    std::vector<double> alpha(static_cast<std::size_t>(K) * M, 0.0);
    std::vector<double> rho(M, 0.0);
    for (int k = 0; k < K; ++k) alpha[static_cast<std::size_t>(k) * M + assoc.serving_an[k]] = 1.0;
    for (int m = 0; m < M; ++m) rho[m] = loads[m] > 0 ? 1.0 : 0.0;

    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) x[c.alpha(k, m)] = alpha[static_cast<std::size_t>(k) * M + m];
    }
    for (int m = 0; m < M; ++m) x[c.rho(m)] = rho[m];
    x[c.theta()] = theta;
    for (int i = 0; i < K; ++i) {
        for (int m = 0; m < M; ++m) {
            double a_im = alpha[static_cast<std::size_t>(i) * M + m];
            for (int j = 0; j < M; ++j) {
                if (j == m) continue;
                double z = a_im * rho[j];
                x[c.z(i, m, j)] = z;
                for (int k = 0; k < K; ++k) {
                    double u = z * alpha[static_cast<std::size_t>(k) * M + m];
                    x[c.u(i, m, j, k)] = u;
                    x[c.n(i, m, j, k)] = u * theta;
                }
            }
            for (int k = 0; k < K; ++k) {
                double v = a_im * alpha[static_cast<std::size_t>(k) * M + m];
                x[c.v(i, m, k)] = v;
                x[c.w(i, m, k)] = v * theta;
            }
        }
    }
    return x;
}

Association extract_association(const std::vector<double>& solution,
                                const MilpModel& model, double tol) {
    const VarCatalog& c = model.vars;
    Association assoc;
    assoc.serving_an.resize(c.num_ues(), -1);
    for (int k = 0; k < c.num_ues(); ++k) {
        int serving = -1;
        for (int m = 0; m < c.num_ans(); ++m) {
            double a = solution[c.alpha(k, m)];
            if (a > tol && a < 1.0 - tol) {
                throw std::invalid_argument("extract_association: fractional alpha");
            }
            if (a >= 1.0 - tol) {
                if (serving >= 0) {
                    throw std::invalid_argument("extract_association: multiple serving ANs");
                }
                serving = m;
            }
        }
        if (serving < 0) {
            throw std::invalid_argument("extract_association: UE with no serving AN");
        }
        assoc.serving_an[k] = serving;
    }
    return assoc;
}

double max_violation(const MilpModel& model, const std::vector<double>& x) {
    double worst = 0.0;
    for (const LinearConstraint& row : model.rows) {
        double lhs = 0.0;
        for (auto [col, coeff] : row.terms) lhs += coeff * x[col];
        double violation = 0.0;
        switch (row.sense) {
            case RowSense::kLe: violation = lhs - row.rhs; break;
            case RowSense::kGe: violation = row.rhs - lhs; break;
            case RowSense::kEq: violation = std::abs(lhs - row.rhs); break;
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

std::vector<double> column_scales(const MilpModel& model) {
    // Scale each column by its bound range rounded to a power of two:
    // theta/w/n live in [0, Q] while the binaries live in [0, 1], and that
    // spread (Q can reach 1e6) is what hurts the simplex. Powers of two
    // keep the scaled data exactly representable.
    const int n = model.vars.num_vars();
    std::vector<double> scales(n, 1.0);
    for (int j = 0; j < n; ++j) {
        double ub = model.upper[j];
        if (std::isfinite(ub) && ub > 1.0) {
            scales[j] = std::exp2(std::round(std::log2(ub)));
        }
    }
    return scales;
}

void export_lp(const MilpModel& model, std::ostream& out) {
    const VarCatalog& c = model.vars;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "\\ max-min effective-SINR user association, K=" << c.num_ues()
        << " M=" << c.num_ans() << " L=" << model.antennas << "\n";
    out << "Maximize\n obj: " << c.name(model.objective_col) << "\n";
    out << "Subject To\n";
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        const LinearConstraint& row = model.rows[r];
        out << ' ' << model.row_name(static_cast<int>(r)) << ':';
        for (auto [col, coeff] : row.terms) {
            out << (coeff < 0 ? " - " : " + ") << num(std::abs(coeff)) << ' ' << c.name(col);
        }
        switch (row.sense) {
            case RowSense::kLe: out << " <= "; break;
            case RowSense::kGe: out << " >= "; break;
            case RowSense::kEq: out << " = "; break;
        }
        out << num(row.rhs) << '\n';
    }
    out << "Bounds\n";
    for (int j = 0; j < c.num_vars(); ++j) {
        if (c.is_binary(j)) continue;  // binaries are declared below
        out << ' ' << num(model.lower[j]) << " <= " << c.name(j) << " <= "
            << num(model.upper[j]) << '\n';
    }
    out << "Binaries\n";
    for (int j = 0; j < c.num_binaries(); ++j) {
        out << ' ' << c.name(j) << '\n';
    }
    out << "End\n";
}

void write_model_stats_csv(const MilpModel& model, std::ostream& out) {
    ModelSize size = model_size(model.vars.num_ues(), model.vars.num_ans());
    out << "K,M,n_bin,n_cont,n_rows\n";
    out << model.vars.num_ues() << ',' << model.vars.num_ans() << ',' << size.binaries
        << ',' << size.continuous << ',' << size.rows << '\n';
}

}  // namespace mmudn
