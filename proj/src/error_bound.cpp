#include "saddlebench/error_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "saddlebench/rng.hpp"
#include "saddlebench/textfmt.hpp"

namespace saddlebench {

namespace {

constexpr double kIdentityTol = 1e-8;

Eigen::VectorXd restrict_to(const Eigen::VectorXd& full,
                            const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out(k) = full(idx[k]);
    return out;
}

// Distance from v to span of the columns of S; S may have zero columns.
double dist_to_span(const Eigen::MatrixXd& S, const Eigen::VectorXd& v) {
    if (S.cols() == 0) return v.norm();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(S);
    return (v - S * cod.solve(v)).norm();
}

// Distances of each column to the span of the remaining columns.
std::vector<double> column_span_distances(const Eigen::MatrixXd& M) {
    const Eigen::Index m = M.cols();
    std::vector<double> d(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::MatrixXd others(M.rows(), m - 1);
        Eigen::Index c = 0;
        for (Eigen::Index k = 0; k < m; ++k) {
            if (k != j) others.col(c++) = M.col(k);
        }
        d[static_cast<std::size_t>(j)] = dist_to_span(others, M.col(j));
    }
    return d;
}

double min_or_one(const std::vector<double>& v) {
    if (v.empty()) return 1.0;
    return *std::min_element(v.begin(), v.end());
}

}  // namespace

QSystem q_transform(const Game& g, const Equilibrium& eq) {
    const std::vector<int>& B = eq.support_x;
    const std::vector<int>& N = eq.support_y;
    if (B.empty() || N.empty()) {
        throw std::invalid_argument("q_transform: empty support");
    }
    const Eigen::MatrixXd& A = g.A();
    QSystem qs;
    qs.elim_i = B.front();
    qs.elim_j = N.front();
    for (std::size_t k = 1; k < B.size(); ++k) qs.B_tilde.push_back(B[k]);
    for (std::size_t k = 1; k < N.size(); ++k) qs.N_tilde.push_back(N[k]);
    qs.empty_reduction = qs.B_tilde.empty() || qs.N_tilde.empty();
    qs.d = A(qs.elim_i, qs.elim_j);
    qs.b.resize(static_cast<Eigen::Index>(qs.N_tilde.size()));
    for (std::size_t k = 0; k < qs.N_tilde.size(); ++k) {
        qs.b(k) = qs.d - A(qs.elim_i, qs.N_tilde[k]);
    }
    qs.c.resize(static_cast<Eigen::Index>(qs.B_tilde.size()));
    for (std::size_t k = 0; k < qs.B_tilde.size(); ++k) {
        qs.c(k) = qs.d - A(qs.B_tilde[k], qs.elim_j);
    }
    qs.Q.resize(static_cast<Eigen::Index>(qs.B_tilde.size()),
                static_cast<Eigen::Index>(qs.N_tilde.size()));
    for (std::size_t r = 0; r < qs.B_tilde.size(); ++r) {
        for (std::size_t s = 0; s < qs.N_tilde.size(); ++s) {
            qs.Q(r, s) = A(qs.B_tilde[r], qs.N_tilde[s]) -
                         A(qs.elim_i, qs.N_tilde[s]) -
                         A(qs.B_tilde[r], qs.elim_j) + qs.d;
        }
    }

    // Defining identities: the reduced system must reproduce the restricted
    // equilibrium and the game value. Failure means eq is inconsistent with
    // its own supports (degenerate or mis-solved input).
    const Eigen::VectorXd xt = restrict_to(eq.x_star.values(), qs.B_tilde);
    const Eigen::VectorXd yt = restrict_to(eq.y_star.values(), qs.N_tilde);
    double resid = 0.0;
    if (!qs.empty_reduction) {
        resid = std::max((qs.Q * yt - qs.c).cwiseAbs().maxCoeff(),
                         (qs.Q.transpose() * xt - qs.b).cwiseAbs().maxCoeff());
    } else if (qs.B_tilde.empty() && !qs.N_tilde.empty()) {
        resid = qs.b.cwiseAbs().maxCoeff();  // Q^T x~ = b with x~ empty
    } else if (!qs.B_tilde.empty() && qs.N_tilde.empty()) {
        resid = qs.c.cwiseAbs().maxCoeff();
    }
    const double v_resid =
        std::abs(eq.value - (qs.d - (qs.empty_reduction
                                         ? 0.0
                                         : xt.dot(qs.Q * yt))));
    if (resid > kIdentityTol || v_resid > kIdentityTol) {
        throw std::invalid_argument(
            "q_transform: reduced-system identities violated (residual " +
            fmt_g17(std::max(resid, v_resid)) +
            "); equilibrium inconsistent with its supports");
    }
    return qs;
}

Eigen::MatrixXd build_T(const std::vector<int>& B, const std::vector<int>& N,
                        int elim_i, int elim_j) {
    const int k = static_cast<int>(B.size());
    const int l = static_cast<int>(N.size());
    if (k < 1 || l < 1) throw std::invalid_argument("build_T: empty support");
    const auto pos_in = [](const std::vector<int>& v, int x) {
        const auto it = std::find(v.begin(), v.end(), x);
        return it == v.end() ? -1 : static_cast<int>(it - v.begin());
    };
    const int pi = pos_in(B, elim_i);
    const int pj = pos_in(N, elim_j);
    if (pi < 0 || pj < 0) {
        throw std::invalid_argument("build_T: eliminated pair not in support");
    }
    // Column layout: vec Q (row-major over B~ x N~), then b, then c, then d.
    const int qcols = (k - 1) * (l - 1);
    const int bcols = l - 1;
    const int ccols = k - 1;
    const int dim = k * l;
    const auto tilde_pos = [](int p, int elim) { return p < elim ? p : p - 1; };
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
    for (int r = 0; r < k; ++r) {
        for (int s = 0; s < l; ++s) {
            const int row = r * l + s;
            const int dcol = qcols + bcols + ccols;
            if (r == pi && s == pj) {
                T(row, dcol) = 1.0;  // A[i,j] = d
            } else if (r == pi) {
                T(row, dcol) = 1.0;  // A[i,j'] = d - b[j']
                T(row, qcols + tilde_pos(s, pj)) = -1.0;
            } else if (s == pj) {
                T(row, dcol) = 1.0;  // A[i',j] = d - c[i']
                T(row, qcols + bcols + tilde_pos(r, pi)) = -1.0;
            } else {
                // A[i',j'] = Q[i',j'] - b[j'] - c[i'] + d
                T(row, tilde_pos(r, pi) * (l - 1) + tilde_pos(s, pj)) = 1.0;
                T(row, qcols + tilde_pos(s, pj)) = -1.0;
                T(row, qcols + bcols + tilde_pos(r, pi)) = -1.0;
                T(row, dcol) = 1.0;
            }
        }
    }
    return T;
}

AlphaBeta compute_alpha_beta(const Game& g, const Equilibrium& eq) {
    const Eigen::MatrixXd& A = g.A();
    const int n = g.n();
    const int m = g.m();
    AlphaBeta ab;
    ab.alpha_P = std::numeric_limits<double>::infinity();
    for (int i : eq.support_x) ab.alpha_P = std::min(ab.alpha_P, eq.x_star[i]);
    ab.alpha_D = std::numeric_limits<double>::infinity();
    for (int j : eq.support_y) ab.alpha_D = std::min(ab.alpha_D, eq.y_star[j]);
    if (eq.support_x.empty()) ab.alpha_P = 1.0;
    if (eq.support_y.empty()) ab.alpha_D = 1.0;

    const Eigen::VectorXd ATx = A.transpose() * eq.x_star.values();
    const Eigen::VectorXd Ay = A * eq.y_star.values();
    std::vector<double> slack_P, slack_D;
    std::vector<bool> inN(m, false), inB(n, false);
    for (int j : eq.support_y) inN[j] = true;
    for (int i : eq.support_x) inB[i] = true;
    for (int j = 0; j < m; ++j) {
        if (!inN[j]) slack_P.push_back(eq.value - ATx(j));
    }
    for (int i = 0; i < n; ++i) {
        if (!inB[i]) slack_D.push_back(Ay(i) - eq.value);
    }
    ab.beta_P = min_or_one(slack_P);
    ab.beta_D = min_or_one(slack_D);
    return ab;
}

Gammas compute_gamma(const QSystem& qs) {
    Gammas gm;
    if (qs.empty_reduction) return gm;  // convention: empty minima are 1
    gm.gamma_P = min_or_one(column_span_distances(qs.Q));
    gm.gamma_D = min_or_one(column_span_distances(qs.Q.transpose()));
    return gm;
}

Eigen::MatrixXd bar_Q(const QSystem& qs) {
    Eigen::MatrixXd out = qs.Q;
    for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) -= qs.c;
    return out;
}

double sigma_min(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1);
}

InverseSquareMoments inverse_square_moments(const Eigen::MatrixXd& M) {
    InverseSquareMoments out;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    for (Eigen::Index r = 0; r < sv.size(); ++r) {
        out.from_singular_values += 1.0 / (sv(r) * sv(r));
    }
    for (double d : column_span_distances(Eigen::MatrixXd(M.transpose()))) {
        out.from_rows += 1.0 / (d * d);
    }
    for (double d : column_span_distances(M)) {
        out.from_cols += 1.0 / (d * d);
    }
    return out;
}

double kappa_core(const Game& g, const Equilibrium& eq) {
    const AlphaBeta ab = compute_alpha_beta(g, eq);
    const QSystem qs = q_transform(g, eq);
    const Gammas gm = compute_gamma(qs);
    const double a_flat = g.A().cwiseAbs().maxCoeff();
    if (a_flat == 0.0) return 0.0;
    const double mn = static_cast<double>(std::min(g.n(), g.m()));
    const double lhs = ab.alpha_D * ab.alpha_D * ab.beta_D * gm.gamma_P;
    const double rhs = ab.alpha_P * ab.alpha_P * ab.beta_P * gm.gamma_D;
    return (1.0 / a_flat) * (1.0 / (mn * mn * mn)) * std::min(lhs, rhs);
}

double kappa_empirical(const Game& g, const Equilibrium& eq, int n_samples,
                       std::uint64_t seed) {
    if (n_samples < 0) {
        throw std::invalid_argument("kappa_empirical: n_samples < 0");
    }
    const Eigen::MatrixXd& A = g.A();
    const int n = g.n();
    const int m = g.m();
    Eigen::VectorXd zs(n + m);
    zs.head(n) = eq.x_star.values();
    zs.tail(m) = eq.y_star.values();

    double best = std::numeric_limits<double>::infinity();
    const auto consider = [&](const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
        Eigen::VectorXd z(n + m);
        z.head(n) = x;
        z.tail(m) = y;
        const double dist = (z - zs).norm();
        if (dist <= 1e-12) return;
        best = std::min(best, duality_gap_xy(A, x, y) / dist);
    };

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            consider(Eigen::VectorXd::Unit(n, i), Eigen::VectorXd::Unit(m, j));
        }
    }

    Rng root(seed);
    Rng dir_rng = root.substream(1);
    const auto dirichlet = [](Rng& r, int d) {
        Eigen::VectorXd v(d);
        for (int i = 0; i < d; ++i) v(i) = -std::log(1.0 - r.uniform01());
        const double s = v.sum();
        if (s <= 0.0) return Eigen::VectorXd::Constant(d, 1.0 / d).eval();
        return (v / s).eval();
    };
    for (int s = 0; s < n_samples; ++s) {
        Rng r = dir_rng.substream(static_cast<std::uint64_t>(s));
        consider(dirichlet(r, n), dirichlet(r, m));
    }

    Rng seg_rng = root.substream(2);
    const double offsets[] = {1e-1, 1e-2, 1e-3};
    for (int s = 0; s < n_samples; ++s) {
        Rng r = seg_rng.substream(static_cast<std::uint64_t>(s));
        const int i = static_cast<int>(r.below(static_cast<std::uint64_t>(n)));
        const int j = static_cast<int>(r.below(static_cast<std::uint64_t>(m)));
        Eigen::VectorXd vz(n + m);
        vz.head(n) = Eigen::VectorXd::Unit(n, i);
        vz.tail(m) = Eigen::VectorXd::Unit(m, j);
        const Eigen::VectorXd dir = vz - zs;
        const double len = dir.norm();
        if (len <= 1e-12) continue;
        for (double t : offsets) {
            const double frac = std::min(t / len, 1.0);
            const Eigen::VectorXd z = zs + frac * dir;
            consider(z.head(n), z.tail(m));
        }
    }
    return best;
}

Diagnostics compute_diagnostics(const Game& g, const Equilibrium& eq,
                                int n_samples, std::uint64_t seed) {
    Diagnostics d;
    const AlphaBeta ab = compute_alpha_beta(g, eq);
    const QSystem qs = q_transform(g, eq);
    const Gammas gm = compute_gamma(qs);
    d.alpha_P = ab.alpha_P;
    d.alpha_D = ab.alpha_D;
    d.beta_P = ab.beta_P;
    d.beta_D = ab.beta_D;
    d.gamma_P = gm.gamma_P;
    d.gamma_D = gm.gamma_D;
    const Eigen::MatrixXd qb = bar_Q(qs);
    d.sigma_min_Qbar = qb.size() == 0 ? 1.0 : sigma_min(qb);
    d.a_flat_inf = g.A().cwiseAbs().maxCoeff();
    const double mn = static_cast<double>(std::min(g.n(), g.m()));
    d.kappa_core =
        d.a_flat_inf == 0.0
            ? 0.0
            : (1.0 / d.a_flat_inf) * (1.0 / (mn * mn * mn)) *
                  std::min(d.alpha_D * d.alpha_D * d.beta_D * d.gamma_P,
                           d.alpha_P * d.alpha_P * d.beta_P * d.gamma_D);
    d.kappa_empirical = kappa_empirical(g, eq, n_samples, seed);
    return d;
}

StabilityBounds stability_bounds(const Game& g, const Equilibrium& eq,
                                 const QSystem& qs, int n_directions,
                                 std::uint64_t seed) {
    if (n_directions < 1) {
        throw std::invalid_argument("stability_bounds: n_directions < 1");
    }
    const Eigen::MatrixXd& A = g.A();
    const int n = g.n();
    const int m = g.m();
    const double inf = std::numeric_limits<double>::infinity();
    StabilityBounds sb{inf, inf, inf, inf};

    const AlphaBeta ab = compute_alpha_beta(g, eq);
    const bool has_off_N = eq.support_y.size() < static_cast<std::size_t>(m);
    const bool has_off_B = eq.support_x.size() < static_cast<std::size_t>(n);
    if (has_off_N) sb.delta_ub_beta = std::min(sb.delta_ub_beta, ab.beta_P);
    if (has_off_B) sb.delta_ub_beta = std::min(sb.delta_ub_beta, ab.beta_D);

    if (!qs.empty_reduction) {
        // Rank-one move of Q onto the nearest singular matrix, mapped back
        // into the rows/columns of A that Q occupies.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            qs.Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const Eigen::Index last = sv.size() - 1;
        const Eigen::MatrixXd dQ = -sv(last) * svd.matrixU().col(last) *
                                   svd.matrixV().col(last).transpose();
        Eigen::MatrixXd dA = Eigen::MatrixXd::Zero(n, m);
        for (std::size_t r = 0; r < qs.B_tilde.size(); ++r) {
            for (std::size_t s = 0; s < qs.N_tilde.size(); ++s) {
                dA(qs.B_tilde[r], qs.N_tilde[s]) = dQ(r, s);
            }
        }
        sb.delta_ub_sigma = spectral_norm(dA);

        // Row move that zeroes (or evenly redistributes) the smallest
        // support mass of x*, transported through b = Q^T x~.
        int i_min = eq.support_x.front();
        for (int i : eq.support_x) {
            if (eq.x_star[i] < eq.x_star[i_min]) i_min = i;
        }
        Eigen::VectorXd dxt = Eigen::VectorXd::Zero(
            static_cast<Eigen::Index>(qs.B_tilde.size()));
        const auto it =
            std::find(qs.B_tilde.begin(), qs.B_tilde.end(), i_min);
        if (it != qs.B_tilde.end()) {
            dxt(it - qs.B_tilde.begin()) = -ab.alpha_P;
        } else {
            dxt.setConstant(ab.alpha_P /
                            static_cast<double>(qs.B_tilde.size()));
        }
        const Eigen::VectorXd db = qs.Q.transpose() * dxt;
        Eigen::MatrixXd dA2 = Eigen::MatrixXd::Zero(n, m);
        for (std::size_t s = 0; s < qs.N_tilde.size(); ++s) {
            dA2(qs.elim_i, qs.N_tilde[s]) = -db(s);
        }
        sb.delta_ub_alpha = spectral_norm(dA2);
    }

    // Measured radius: bisect along random unit-spectral-norm directions
    // for the first step at which the support set changes (or the game
    // goes degenerate / unsolvable).
    const double hi_cap = 2.0 * spectral_norm(A);
    if (hi_cap > 0.0) {
        Rng root(seed);
        const auto support_unchanged = [&](double t,
                                           const Eigen::MatrixXd& E) {
            try {
                const Game gp(A + t * E);
                const Equilibrium ep = solve_exact(gp, 1e-9);
                const NonDegeneracyCertificate cp =
                    certify_nondegenerate(gp, ep, 1e-9);
                return cp.is_nondegenerate && ep.support_x == eq.support_x &&
                       ep.support_y == eq.support_y;
            } catch (const std::exception&) {
                return false;
            }
        };
        double best = inf;
        for (int k = 0; k < n_directions; ++k) {
            Rng r = root.substream(3).substream(static_cast<std::uint64_t>(k));
            Eigen::MatrixXd E(n, m);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < m; ++j) E(i, j) = r.gaussian();
            }
            const double en = spectral_norm(E);
            if (en <= 0.0) continue;
            E /= en;
            double lo = 0.0, hi = hi_cap;
            if (support_unchanged(hi, E)) {
                best = std::min(best, hi);
                continue;
            }
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                if (support_unchanged(mid, E)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = std::min(best, hi);
        }
        sb.delta_empirical = best;
    }
    return sb;
}

namespace {

struct Field {
    const char* name;
    double value;
    bool always;  // infinite values are dropped when false
};

std::vector<Field> report_fields(const Diagnostics& d,
                                 const StabilityBounds* b) {
    std::vector<Field> f = {
        {"alpha_P", d.alpha_P, true},
        {"alpha_D", d.alpha_D, true},
        {"beta_P", d.beta_P, true},
        {"beta_D", d.beta_D, true},
        {"gamma_P", d.gamma_P, true},
        {"gamma_D", d.gamma_D, true},
        {"sigma_min_Qbar", d.sigma_min_Qbar, true},
        {"kappa_core", d.kappa_core, true},
        {"kappa_empirical", d.kappa_empirical, true},
        {"a_flat_inf", d.a_flat_inf, true},
    };
    if (b != nullptr) {
        f.push_back({"delta_ub_beta", b->delta_ub_beta, false});
        f.push_back({"delta_ub_sigma", b->delta_ub_sigma, false});
        f.push_back({"delta_ub_alpha", b->delta_ub_alpha, false});
        f.push_back({"delta_empirical", b->delta_empirical, false});
    }
    return f;
}

}  // namespace

std::string report_text(const Diagnostics& diag, const StabilityBounds* bounds) {
    std::string out;
    for (const Field& f : report_fields(diag, bounds)) {
        if (!f.always && !std::isfinite(f.value)) continue;
        out += f.name;
        out += '=';
        out += fmt_g17(f.value);
        out += '\n';
    }
    return out;
}

std::string report_json(const Diagnostics& diag, const StabilityBounds* bounds) {
    std::string out = "{";
    bool first = true;
    for (const Field& f : report_fields(diag, bounds)) {
        if (!f.always && !std::isfinite(f.value)) continue;
        if (!first) out += ',';
        first = false;
        out += '"';
        out += f.name;
        out += "\":";
        out += fmt_g17(f.value);
    }
    out += "}\n";
    return out;
}

}  // namespace saddlebench
