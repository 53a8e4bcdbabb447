#include "saddlebench/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "saddlebench/textfmt.hpp"

namespace saddlebench {

namespace {

constexpr double kDiameter = 2.0;  // l2 diameter of the simplex product

struct Recorder {
    std::vector<TrajectoryRecord>* records;
    std::int64_t every;
    const Eigen::VectorXd* zstar;  // stacked equilibrium or null
    std::int64_t last_iter = -1;

    void record(std::int64_t iter, double phi, const Eigen::VectorXd& x,
                const Eigen::VectorXd& y, bool force) {
        if (iter == last_iter) return;
        if (!force && every > 1 && iter % every != 0) return;
        TrajectoryRecord r;
        r.iter = iter;
        r.phi = phi;
        if (zstar != nullptr) {
            Eigen::VectorXd z(x.size() + y.size());
            z.head(x.size()) = x;
            z.tail(y.size()) = y;
            r.dist_to_eq = (z - *zstar).norm();
        }
        records->push_back(r);
        last_iter = iter;
    }
};

Eigen::VectorXd stacked_or_empty(const Equilibrium* eq) {
    if (eq == nullptr) return {};
    Eigen::VectorXd z(eq->x_star.dim() + eq->y_star.dim());
    z.head(eq->x_star.dim()) = eq->x_star.values();
    z.tail(eq->y_star.dim()) = eq->y_star.values();
    return z;
}

void validate_config(const SolverConfig& cfg) {
    if (!(cfg.eps > 0.0)) {
        throw std::invalid_argument("solver: eps must be > 0");
    }
    if (cfg.max_iters < 1) {
        throw std::invalid_argument("solver: max_iters must be >= 1");
    }
    if (cfg.record_every < 1) {
        throw std::invalid_argument("solver: record_every must be >= 1");
    }
    if (cfg.algorithm == Algorithm::ITERSMOOTH && !(cfg.rho > 1.0)) {
        throw std::invalid_argument("solver: rho must be > 1");
    }
}

double resolve_eta(const Game& g, const SolverConfig& cfg) {
    double eta = cfg.eta > 0.0 ? cfg.eta : default_eta(cfg.algorithm, g);
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("solver: step size must be positive");
    }
    if (cfg.algorithm == Algorithm::OGDA && !cfg.allow_large_eta) {
        const double norm = spectral_norm(g.A());
        if (norm > 0.0 && eta > (1.0 + 1e-9) / (8.0 * norm)) {
            throw std::invalid_argument(
                "solver: OGDA step size " + fmt_g17(eta) +
                " exceeds 1/(8||A||) = " + fmt_g17(1.0 / (8.0 * norm)) +
                "; set allow_large_eta to override");
        }
    }
    return eta;
}

SolveResult finish(const Game& g, Eigen::VectorXd x, Eigen::VectorXd y,
                   std::int64_t iters, double phi, bool converged,
                   std::vector<TrajectoryRecord> records) {
    SolveResult res{JointStrategy{SimplexVector::renormalized(std::move(x)),
                                  SimplexVector::renormalized(std::move(y))},
                    iters, phi, std::move(records), converged};
    (void)g;
    return res;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::OGDA: return "ogda";
        case Algorithm::OMWU: return "omwu";
        case Algorithm::EGDA: return "egda";
        case Algorithm::ITERSMOOTH: return "itersmooth";
    }
    return "ogda";
}

Algorithm algorithm_from_name(const std::string& name) {
    std::string s;
    for (char c : name) s += static_cast<char>(std::tolower(c));
    if (s == "ogda") return Algorithm::OGDA;
    if (s == "omwu") return Algorithm::OMWU;
    if (s == "egda") return Algorithm::EGDA;
    if (s == "itersmooth") return Algorithm::ITERSMOOTH;
    throw std::invalid_argument("unknown algorithm: " + name);
}

double default_eta(Algorithm a, const Game& g) {
    switch (a) {
        case Algorithm::OGDA:
        case Algorithm::EGDA: {
            const double norm = spectral_norm(g.A());
            return norm > 0.0 ? 1.0 / (8.0 * norm) : 1.0;
        }
        case Algorithm::OMWU: {
            const double flat = g.A().cwiseAbs().maxCoeff();
            return flat > 0.0 ? 1.0 / (16.0 * flat) : 1.0;
        }
        case Algorithm::ITERSMOOTH:
            return 0.0;  // derived per stage from the stage accuracy
    }
    return 1.0;
}

SolveResult run_ogda(const Game& g, const SolverConfig& cfg,
                     const JointStrategy& z0, const Equilibrium* eq) {
    validate_config(cfg);
    const double eta = resolve_eta(g, cfg);
    const Eigen::MatrixXd& A = g.A();
    if (z0.x.dim() != g.n() || z0.y.dim() != g.m()) {
        throw std::invalid_argument("run_ogda: start dimension mismatch");
    }
    const Eigen::VectorXd zstar = stacked_or_empty(eq);
    std::vector<TrajectoryRecord> records;
    Recorder rec{&records, cfg.record_every,
                 eq != nullptr ? &zstar : nullptr};

    Eigen::VectorXd x = z0.x.values(), y = z0.y.values();
    double phi = duality_gap_xy(A, x, y);
    rec.record(0, phi, x, y, true);
    if (phi <= cfg.eps) {
        return finish(g, std::move(x), std::move(y), 0, phi, true,
                      std::move(records));
    }

    // Half-iterate state: z comes from the running point zhat minus the
    // gradient at the previous z; zhat then advances with the gradient at
    // the new z.
    Eigen::VectorXd hx = x, hy = y;       // zhat
    Eigen::VectorXd gx = A * y;           // x-block gradient A y at z_prev
    Eigen::VectorXd gy = A.transpose() * x;
    bool converged = false;
    std::int64_t t = 0;
    while (t < cfg.max_iters) {
        ++t;
        x = project_simplex_raw(hx - eta * gx);
        y = project_simplex_raw(hy + eta * gy);
        phi = duality_gap_xy(A, x, y);
        const bool done = phi <= cfg.eps || t == cfg.max_iters;
        rec.record(t, phi, x, y, done);
        if (phi <= cfg.eps) {
            converged = true;
            break;
        }
        gx = A * y;
        gy = A.transpose() * x;
        hx = project_simplex_raw(hx - eta * gx);
        hy = project_simplex_raw(hy + eta * gy);
    }
    return finish(g, std::move(x), std::move(y), t, phi, converged,
                  std::move(records));
}

SolveResult run_egda(const Game& g, const SolverConfig& cfg,
                     const JointStrategy& z0, const Equilibrium* eq) {
    validate_config(cfg);
    const double eta = resolve_eta(g, cfg);
    const Eigen::MatrixXd& A = g.A();
    if (z0.x.dim() != g.n() || z0.y.dim() != g.m()) {
        throw std::invalid_argument("run_egda: start dimension mismatch");
    }
    const Eigen::VectorXd zstar = stacked_or_empty(eq);
    std::vector<TrajectoryRecord> records;
    Recorder rec{&records, cfg.record_every,
                 eq != nullptr ? &zstar : nullptr};

    Eigen::VectorXd x = z0.x.values(), y = z0.y.values();
    double phi = duality_gap_xy(A, x, y);
    rec.record(0, phi, x, y, true);
    if (phi <= cfg.eps) {
        return finish(g, std::move(x), std::move(y), 0, phi, true,
                      std::move(records));
    }

    bool converged = false;
    std::int64_t t = 0;
    while (t < cfg.max_iters) {
        ++t;
        // Probe step, then the real step with the probe's gradient.
        const Eigen::VectorXd px = project_simplex_raw(x - eta * (A * y));
        const Eigen::VectorXd py =
            project_simplex_raw(y + eta * (A.transpose() * x));
        x = project_simplex_raw(x - eta * (A * py));
        y = project_simplex_raw(y + eta * (A.transpose() * px));
        phi = duality_gap_xy(A, x, y);
        const bool done = phi <= cfg.eps || t == cfg.max_iters;
        rec.record(t, phi, x, y, done);
        if (phi <= cfg.eps) {
            converged = true;
            break;
        }
    }
    return finish(g, std::move(x), std::move(y), t, phi, converged,
                  std::move(records));
}

SolveResult run_omwu(const Game& g, const SolverConfig& cfg,
                     const Equilibrium* eq) {
    validate_config(cfg);
    const double eta = resolve_eta(g, cfg);
    const Eigen::MatrixXd& A = g.A();
    const int n = g.n();
    const int m = g.m();
    const Eigen::VectorXd zstar = stacked_or_empty(eq);
    std::vector<TrajectoryRecord> records;
    Recorder rec{&records, cfg.record_every,
                 eq != nullptr ? &zstar : nullptr};

    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(m, 1.0 / m);
    double phi = duality_gap_xy(A, x, y);
    rec.record(0, phi, x, y, true);
    if (phi <= cfg.eps) {
        return finish(g, std::move(x), std::move(y), 0, phi, true,
                      std::move(records));
    }

    // Log-space weights with max-shift renormalization each step; the two
    // most recent payoff vectors drive the optimistic correction. Both lag
    // states start at the uniform point.
    Eigen::VectorXd lx = Eigen::VectorXd::Constant(n, -std::log(double(n)));
    Eigen::VectorXd ly = Eigen::VectorXd::Constant(m, -std::log(double(m)));
    Eigen::VectorXd gx1 = A * y, gx2 = gx1;            // A y at t-1, t-2
    Eigen::VectorXd gy1 = A.transpose() * x, gy2 = gy1;
    bool converged = false;
    std::int64_t t = 0;
    while (t < cfg.max_iters) {
        ++t;
        lx += -2.0 * eta * gx1 + eta * gx2;
        ly += 2.0 * eta * gy1 - eta * gy2;
        if (!lx.allFinite() || !ly.allFinite()) {
            throw StepSizeError(
                "run_omwu: log-weights overflowed at iteration " +
                std::to_string(t) + "; step size too large");
        }
        // Shift so the max log-weight is 0; the accumulators stay finite
        // even when individual weights underflow to zero in exp().
        lx.array() -= lx.maxCoeff();
        ly.array() -= ly.maxCoeff();
        const Eigen::VectorXd ex = lx.array().exp();
        const Eigen::VectorXd ey = ly.array().exp();
        x = ex / ex.sum();
        y = ey / ey.sum();
        phi = duality_gap_xy(A, x, y);
        const bool done = phi <= cfg.eps || t == cfg.max_iters;
        rec.record(t, phi, x, y, done);
        if (phi <= cfg.eps) {
            converged = true;
            break;
        }
        gx2 = gx1;
        gx1 = A * y;
        gy2 = gy1;
        gy1 = A.transpose() * x;
    }
    return finish(g, std::move(x), std::move(y), t, phi, converged,
                  std::move(records));
}

namespace {

// One accelerated pass on the smoothed gap
//   F_eta(z) = max_w { <F(z), z - w> - (eta/2) ||z - w||^2 },
// whose gradient is F(w*(z)) - eta (z - w*(z)) with
// w*(z) = P(z - F(z)/eta) (F is linear and antisymmetric). Runs until
// Phi < eps_target or cap steps; on_step is invoked once per step.
template <typename OnStep>
SmoothingPass smoothing_pass_impl(const Eigen::MatrixXd& A,
                                  Eigen::VectorXd x0, Eigen::VectorXd y0,
                                  double eps_target, std::int64_t cap,
                                  OnStep&& on_step) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(A.cols());
    const double eta = eps_target / kDiameter;
    const double L = spectral_norm(A);
    const double prox_step = L > 0.0 ? eta / (L * L) : 1.0;

    const auto grad_smoothed = [&](const Eigen::VectorXd& ux,
                                   const Eigen::VectorXd& uy) {
        Eigen::VectorXd fx = A * uy;                // F x-block
        Eigen::VectorXd fy = -(A.transpose() * ux); // F y-block
        const Eigen::VectorXd wx = project_simplex_raw(ux - fx / eta);
        const Eigen::VectorXd wy = project_simplex_raw(uy - fy / eta);
        Eigen::VectorXd g(n + m);
        g.head(n) = A * wy - eta * (ux - wx);
        g.tail(m) = -(A.transpose() * wx) - eta * (uy - wy);
        return g;
    };

    Eigen::VectorXd zx = x0, zy = y0;    // z^{(t)}
    Eigen::VectorXd hx = x0, hy = y0;    // zhat^{(t)}
    Eigen::VectorXd gsum = Eigen::VectorXd::Zero(n + m);
    bool reached = false;
    std::int64_t iters = 0;
    for (std::int64_t it = 0; it < cap; ++it) {
        const double w = 2.0 / (2.0 + static_cast<double>(it));
        const Eigen::VectorXd ux = w * hx + (1.0 - w) * zx;
        const Eigen::VectorXd uy = w * hy + (1.0 - w) * zy;
        const Eigen::VectorXd grad = grad_smoothed(ux, uy);
        zx = project_simplex_raw(ux - prox_step * grad.head(n));
        zy = project_simplex_raw(uy - prox_step * grad.tail(m));
        ++iters;
        const double phi = duality_gap_xy(A, zx, zy);
        const bool stop = phi < eps_target;
        on_step(zx, zy, phi, stop || it + 1 == cap);
        if (stop) {
            reached = true;
            break;
        }
        // Weighted dual averaging anchored at the pass start.
        gsum += (static_cast<double>(it) + 1.0) / 2.0 * grad;
        hx = project_simplex_raw(x0 - prox_step * gsum.head(n));
        hy = project_simplex_raw(y0 - prox_step * gsum.tail(m));
    }
    return SmoothingPass{JointStrategy{SimplexVector::renormalized(zx),
                                       SimplexVector::renormalized(zy)},
                         reached, iters};
}

std::int64_t stage_cap(double L, double eps_stage) {
    const double raw = 2.0 * L * kDiameter / eps_stage;
    const double capped =
        std::min(raw, 9.0e17);  // keep ceil well inside int64
    return 4 * static_cast<std::int64_t>(std::ceil(capped)) + 16;
}

}  // namespace

SmoothingPass run_smoothing_pass(const Game& g, const JointStrategy& z0,
                                 double eps_target, std::int64_t cap) {
    if (!(eps_target > 0.0)) {
        throw std::invalid_argument("run_smoothing_pass: eps_target <= 0");
    }
    if (cap < 1) {
        throw std::invalid_argument("run_smoothing_pass: cap < 1");
    }
    return smoothing_pass_impl(
        g.A(), z0.x.values(), z0.y.values(), eps_target, cap,
        [](const Eigen::VectorXd&, const Eigen::VectorXd&, double, bool) {});
}

SolveResult run_itersmooth(const Game& g, const SolverConfig& cfg,
                           const JointStrategy& z0, const Equilibrium* eq) {
    validate_config(cfg);
    const Eigen::MatrixXd& A = g.A();
    if (z0.x.dim() != g.n() || z0.y.dim() != g.m()) {
        throw std::invalid_argument("run_itersmooth: start dimension mismatch");
    }
    const Eigen::VectorXd zstar = stacked_or_empty(eq);
    std::vector<TrajectoryRecord> records;
    Recorder rec{&records, cfg.record_every,
                 eq != nullptr ? &zstar : nullptr};

    Eigen::VectorXd x = z0.x.values(), y = z0.y.values();
    double phi = duality_gap_xy(A, x, y);
    rec.record(0, phi, x, y, true);
    if (phi <= cfg.eps) {
        return finish(g, std::move(x), std::move(y), 0, phi, true,
                      std::move(records));
    }

    const double L = spectral_norm(A);
    double eps_stage = phi;
    std::int64_t global_iter = 0;
    bool converged = false;
    while (!converged) {
        eps_stage /= cfg.rho;
        if (!(eps_stage > 1e-300)) break;  // no representable progress left
        const std::int64_t budget_left = cfg.max_iters - global_iter;
        if (budget_left <= 0) break;
        const std::int64_t cap = std::min(stage_cap(L, eps_stage), budget_left);
        const SmoothingPass pass = smoothing_pass_impl(
            A, x, y, eps_stage, cap,
            [&](const Eigen::VectorXd& px, const Eigen::VectorXd& py,
                double p, bool force) {
                ++global_iter;
                phi = p;
                rec.record(global_iter, p, px, py, force);
            });
        x = pass.z.x.values();
        y = pass.z.y.values();
        if (!pass.reached_target) {
            // Stage cap exhausted (or global budget): report honestly.
            break;
        }
        if (phi <= cfg.eps) converged = true;
    }
    rec.record(global_iter, phi, x, y, true);
    return finish(g, std::move(x), std::move(y), global_iter, phi, converged,
                  std::move(records));
}

SolveResult run_solver(const Game& g, const SolverConfig& cfg,
                       const JointStrategy& z0, const Equilibrium* eq) {
    switch (cfg.algorithm) {
        case Algorithm::OGDA: return run_ogda(g, cfg, z0, eq);
        case Algorithm::EGDA: return run_egda(g, cfg, z0, eq);
        case Algorithm::OMWU: return run_omwu(g, cfg, eq);
        case Algorithm::ITERSMOOTH: return run_itersmooth(g, cfg, z0, eq);
    }
    throw std::invalid_argument("run_solver: unknown algorithm");
}

double residual_gap_bound(const Game& g, const JointStrategy& z, double eta) {
    if (!(eta > 0.0)) {
        throw std::invalid_argument("residual_gap_bound: eta <= 0");
    }
    const Eigen::MatrixXd& A = g.A();
    const Eigen::VectorXd& x = z.x.values();
    const Eigen::VectorXd& y = z.y.values();
    const Eigen::VectorXd px = project_simplex_raw(x - eta * (A * y));
    const Eigen::VectorXd py =
        project_simplex_raw(y + eta * (A.transpose() * x));
    const double nx = (x - px).squaredNorm();
    const double ny = (y - py).squaredNorm();
    return 2.0 / eta * std::sqrt(nx + ny);
}

std::int64_t iteration_bound(double kappa_prime, double norm_A, double eps) {
    if (!(kappa_prime > 0.0) || !(norm_A > 0.0) || !(eps > 0.0)) {
        throw std::invalid_argument(
            "iteration_bound: arguments must be positive");
    }
    const double num = std::log(8.0 * kDiameter / eps);
    const double den =
        std::log1p(kappa_prime * kappa_prime / (324.0 * norm_A * norm_A));
    return 2 * static_cast<std::int64_t>(std::ceil(num / den));
}

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryRecord>& records) {
    os << "iter,phi,dist_to_eq\n";
    for (const TrajectoryRecord& r : records) {
        os << r.iter << ',' << fmt_g17(r.phi) << ',';
        if (r.dist_to_eq) os << fmt_g17(*r.dist_to_eq);
        os << '\n';
    }
}

}  // namespace saddlebench
