#include "saddlebench/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace saddlebench {

namespace {

constexpr int kMaxOracleDim = 20;

// Advances a k-subset of {0..n-1} in lexicographic order; false at the end.
bool next_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::vector<int> first_combination(int k) {
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = i;
    return c;
}

// Solves the square support system on B x N:
//   A[B,N] y_N = v 1,  sum y_N = 1,  A[B,N]^T x_B = v 1,  sum x_B = 1.
// Returns nothing when the bordered matrix is singular. Both bordered
// systems share the same value v (both equal x_B^T A[B,N] y_N).
struct SupportSolution {
    Eigen::VectorXd x_B;
    Eigen::VectorXd y_N;
    double value = 0.0;
};

std::optional<SupportSolution> solve_support(const Eigen::MatrixXd& A,
                                             const std::vector<int>& B,
                                             const std::vector<int>& N) {
    const int k = static_cast<int>(B.size());
    Eigen::MatrixXd S(k, k);
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) S(r, c) = A(B[r], N[c]);
    }
    Eigen::MatrixXd My(k + 1, k + 1);
    My.topLeftCorner(k, k) = S;
    My.topRightCorner(k, 1).setConstant(-1.0);
    My.bottomLeftCorner(1, k).setConstant(1.0);
    My(k, k) = 0.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu_y(My);
    if (!lu_y.isInvertible()) return std::nullopt;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs(k) = 1.0;
    const Eigen::VectorXd sol_y = lu_y.solve(rhs);

    Eigen::MatrixXd Mx(k + 1, k + 1);
    Mx.topLeftCorner(k, k) = S.transpose();
    Mx.topRightCorner(k, 1).setConstant(-1.0);
    Mx.bottomLeftCorner(1, k).setConstant(1.0);
    Mx(k, k) = 0.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu_x(Mx);
    if (!lu_x.isInvertible()) return std::nullopt;
    const Eigen::VectorXd sol_x = lu_x.solve(rhs);

    SupportSolution out;
    out.y_N = sol_y.head(k);
    out.x_B = sol_x.head(k);
    out.value = 0.5 * (sol_y(k) + sol_x(k));
    if (!out.x_B.allFinite() || !out.y_N.allFinite() ||
        !std::isfinite(out.value)) {
        return std::nullopt;
    }
    return out;
}

std::vector<int> support_of(const Eigen::VectorXd& v) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) > kSupportTol) s.push_back(static_cast<int>(i));
    }
    return s;
}

bool optimal_pair(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& y, double v, double tol) {
    const Eigen::VectorXd Ay = A * y;
    const Eigen::VectorXd ATx = A.transpose() * x;
    return Ay.minCoeff() >= v - tol && ATx.maxCoeff() <= v + tol;
}

// One enumeration sweep. In strict mode candidate support entries must
// exceed kSupportTol; the relaxed mode (second sweep) accepts entries down
// to -tol and clamps, which covers degenerate games whose every square
// system has a boundary solution.
std::optional<Equilibrium> enumerate_supports(const Game& g, double tol,
                                              bool strict) {
    const Eigen::MatrixXd& A = g.A();
    const int n = g.n();
    const int m = g.m();
    for (int k = 1; k <= std::min(n, m); ++k) {
        std::vector<int> B = first_combination(k);
        do {
            std::vector<int> N = first_combination(k);
            do {
                auto sol = solve_support(A, B, N);
                if (!sol) continue;
                const bool feasible =
                    strict ? (sol->x_B.minCoeff() > kSupportTol &&
                              sol->y_N.minCoeff() > kSupportTol)
                           : (sol->x_B.minCoeff() >= -tol &&
                              sol->y_N.minCoeff() >= -tol);
                if (!feasible) continue;
                Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
                for (int r = 0; r < k; ++r) {
                    x(B[r]) = std::max(sol->x_B(r), 0.0);
                    y(N[r]) = std::max(sol->y_N(r), 0.0);
                }
                if (!optimal_pair(A, x, y, sol->value, tol)) continue;
                Equilibrium eq{SimplexVector::renormalized(std::move(x)),
                               SimplexVector::renormalized(std::move(y)),
                               sol->value,
                               {},
                               {}};
                eq.support_x = support_of(eq.x_star.values());
                eq.support_y = support_of(eq.y_star.values());
                return eq;
            } while (next_combination(N, m));
        } while (next_combination(B, n));
    }
    return std::nullopt;
}

}  // namespace

Equilibrium solve_exact(const Game& g, double tol) {
    if (g.n() > kMaxOracleDim || g.m() > kMaxOracleDim) {
        throw UnsupportedSizeError(
            "solve_exact: support enumeration handles at most 20x20, got " +
            std::to_string(g.n()) + "x" + std::to_string(g.m()));
    }
    if (!(tol >= 1e-12) || !(tol <= 1e-6)) {
        throw std::invalid_argument(
            "solve_exact: tol must lie in [1e-12, 1e-6]");
    }
    if (auto eq = enumerate_supports(g, tol, /*strict=*/true)) return *eq;
    if (auto eq = enumerate_supports(g, tol, /*strict=*/false)) return *eq;
    throw SolverFailureError(
        "solve_exact: no support pair yielded a feasible optimal solution");
}

NonDegeneracyCertificate certify_nondegenerate(const Game& g,
                                               const Equilibrium& eq,
                                               double tol) {
    const Eigen::MatrixXd& A = g.A();
    const int n = g.n();
    const int m = g.m();
    const double v = eq.value;
    const Eigen::VectorXd& x = eq.x_star.values();
    const Eigen::VectorXd& y = eq.y_star.values();
    const Eigen::VectorXd Ay = A * y;
    const Eigen::VectorXd ATx = A.transpose() * x;

    NonDegeneracyCertificate cert;
    for (int i = 0; i < n; ++i) {
        if (x(i) <= tol) ++cert.tight_count_x;
    }
    for (int j = 0; j < m; ++j) {
        if (std::abs(ATx(j) - v) <= tol) ++cert.tight_count_x;
    }
    for (int j = 0; j < m; ++j) {
        if (y(j) <= tol) ++cert.tight_count_y;
    }
    for (int i = 0; i < n; ++i) {
        if (std::abs(Ay(i) - v) <= tol) ++cert.tight_count_y;
    }
    cert.complementarity_ok = eq.support_x.size() == eq.support_y.size();
    cert.unique = false;
    if (cert.complementarity_ok && !eq.support_x.empty()) {
        const int k = static_cast<int>(eq.support_x.size());
        Eigen::MatrixXd M(k + 1, k + 1);
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) {
                M(r, c) = A(eq.support_x[r], eq.support_y[c]);
            }
        }
        M.topRightCorner(k, 1).setConstant(-1.0);
        M.bottomLeftCorner(1, k).setConstant(1.0);
        M(k, k) = 0.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        cert.unique = lu.isInvertible();
    }
    cert.is_nondegenerate = cert.tight_count_x == n &&
                            cert.tight_count_y == m && cert.unique &&
                            cert.complementarity_ok;
    return cert;
}

}  // namespace saddlebench
