#include "saddlebench/smoothed_lab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "saddlebench/parallel.hpp"
#include "saddlebench/rng.hpp"
#include "saddlebench/svg.hpp"
#include "saddlebench/textfmt.hpp"

namespace saddlebench {

namespace {

constexpr double kOracleTol = 1e-9;

std::uint64_t cell_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
    return Rng(root).substream(a).substream(b).next_u64();
}

double dist_to(const JointStrategy& z, const Equilibrium& eq) {
    Eigen::VectorXd d(z.x.dim() + z.y.dim());
    d.head(z.x.dim()) = z.x.values() - eq.x_star.values();
    d.tail(z.y.dim()) = z.y.values() - eq.y_star.values();
    return d.norm();
}

void validate_base(const Eigen::MatrixXd& base) {
    if (base.rows() < 1 || base.cols() < 1 || !base.allFinite() ||
        base.cwiseAbs().maxCoeff() > 1.0) {
        throw std::invalid_argument(
            "trial base matrix must be nonempty with entries in [-1, 1]");
    }
}

}  // namespace

std::vector<TrialOutcome> run_trials(const TrialSpec& spec) {
    validate_base(spec.base_matrix);
    if (spec.n_trials < 1) {
        throw std::invalid_argument("run_trials: n_trials < 1");
    }
    if (spec.sigma_list.empty()) {
        throw std::invalid_argument("run_trials: empty sigma list");
    }
    for (double s : spec.sigma_list) {
        if (!(s > 0.0) || s > 1.0) {
            throw std::invalid_argument("run_trials: sigma must be in (0, 1]");
        }
    }
    const std::int64_t n_cells =
        static_cast<std::int64_t>(spec.sigma_list.size()) * spec.n_trials;
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(n_cells));
    parallel_for(n_cells, spec.jobs, [&](std::int64_t cell) {
        const std::size_t si =
            static_cast<std::size_t>(cell / spec.n_trials);
        const std::int64_t k = cell % spec.n_trials;
        const double sigma = spec.sigma_list[si];
        const std::uint64_t seed = cell_seed(
            spec.root_seed, static_cast<std::uint64_t>(si),
            static_cast<std::uint64_t>(k));
        const Game gp = gaussian_perturb(spec.base_matrix, sigma, seed);

        TrialOutcome out;
        out.sigma = sigma;
        out.seed = seed;
        bool have_eq = false;
        Equilibrium eq{SimplexVector::uniform(gp.n()),
                       SimplexVector::uniform(gp.m()),
                       0.0,
                       {},
                       {}};
        try {
            eq = solve_exact(gp, kOracleTol);
            have_eq = true;
        } catch (const UnsupportedSizeError&) {
            throw;  // a spec problem, not a bad draw
        } catch (const SolverFailureError&) {
            // counted as a degenerate draw
        }
        if (have_eq) {
            out.nondegenerate =
                certify_nondegenerate(gp, eq, kOracleTol).is_nondegenerate;
        }
        if (out.nondegenerate) {
            out.diagnostics =
                compute_diagnostics(gp, eq, spec.n_diag_samples, seed);
        }
        const JointStrategy z0{SimplexVector::uniform(gp.n()),
                               SimplexVector::uniform(gp.m())};
        const SolveResult res = run_solver(
            gp, spec.solver, z0, out.nondegenerate ? &eq : nullptr);
        out.iters_to_eps = res.iters_used;
        out.phi_final = res.phi_final;
        if (out.nondegenerate) out.dist_final = dist_to(res.z_final, eq);
        outcomes[static_cast<std::size_t>(cell)] = std::move(out);
    });
    return outcomes;
}

void write_trials_csv(std::ostream& os,
                      const std::vector<TrialOutcome>& outcomes) {
    os << "sigma,seed,nondegenerate,alpha_P,alpha_D,beta_P,beta_D,gamma_P,"
          "gamma_D,sigma_min_Qbar,kappa_core,kappa_empirical,iters_to_eps,"
          "phi_final,dist_final\n";
    for (const TrialOutcome& o : outcomes) {
        os << fmt_g17(o.sigma) << ',' << o.seed << ','
           << (o.nondegenerate ? 1 : 0) << ',';
        if (o.diagnostics) {
            const Diagnostics& d = *o.diagnostics;
            os << fmt_g17(d.alpha_P) << ',' << fmt_g17(d.alpha_D) << ','
               << fmt_g17(d.beta_P) << ',' << fmt_g17(d.beta_D) << ','
               << fmt_g17(d.gamma_P) << ',' << fmt_g17(d.gamma_D) << ','
               << fmt_g17(d.sigma_min_Qbar) << ',' << fmt_g17(d.kappa_core)
               << ',' << fmt_g17(d.kappa_empirical) << ',';
        } else {
            os << ",,,,,,,,,";
        }
        os << o.iters_to_eps << ',' << fmt_g17(o.phi_final) << ',';
        if (o.dist_final) os << fmt_g17(*o.dist_final);
        os << '\n';
    }
}

TailQuantity tail_quantity_from_name(const std::string& name) {
    if (name == "beta" || name == "beta_P") return TailQuantity::BetaP;
    if (name == "gamma" || name == "gamma_P") return TailQuantity::GammaP;
    if (name == "alpha" || name == "alpha_P") return TailQuantity::AlphaP;
    throw std::invalid_argument("unknown tail quantity: " + name);
}

std::string tail_quantity_name(TailQuantity q) {
    switch (q) {
        case TailQuantity::BetaP: return "beta_P";
        case TailQuantity::GammaP: return "gamma_P";
        case TailQuantity::AlphaP: return "alpha_P";
    }
    return "beta_P";
}

namespace {

double tail_bound_coefficient(TailQuantity q, int n, int m, double sigma) {
    const double mn = static_cast<double>(std::min(n, m));
    const double e = std::numbers::e;
    const double s2 = sigma * sigma;
    switch (q) {
        case TailQuantity::BetaP:
            return e * mn * mn / s2;
        case TailQuantity::GammaP:
            return 4.0 * e * mn * mn * mn / s2;
        case TailQuantity::AlphaP:
            return 8.0 * e * e * static_cast<double>(m) *
                   static_cast<double>(n) * mn / s2;
    }
    return 0.0;
}

// eps-scaled threshold the margin is compared against for one draw.
double tail_threshold(TailQuantity q, const Game& g, const Equilibrium& eq,
                      double eps) {
    const double a_flat = g.A().cwiseAbs().maxCoeff();
    switch (q) {
        case TailQuantity::BetaP:
            return eps / (5.0 * a_flat);
        case TailQuantity::GammaP: {
            const QSystem qs = q_transform(g, eq);
            double max_col = 0.0;
            for (Eigen::Index j = 0; j < qs.Q.cols(); ++j) {
                max_col = std::max(max_col, qs.Q.col(j).norm());
            }
            return eps / (4.0 * max_col + 20.0 * a_flat + 3.0);
        }
        case TailQuantity::AlphaP:
            return eps / (25.0 * (a_flat + 1.0) * (a_flat + 1.0));
    }
    return 0.0;
}

double tail_margin(TailQuantity q, const Game& g, const Equilibrium& eq) {
    switch (q) {
        case TailQuantity::BetaP:
            return compute_alpha_beta(g, eq).beta_P;
        case TailQuantity::GammaP:
            return compute_gamma(q_transform(g, eq)).gamma_P;
        case TailQuantity::AlphaP:
            return compute_alpha_beta(g, eq).alpha_P;
    }
    return 0.0;
}

}  // namespace

double tail_eps_for_bound(TailQuantity q, int n, int m, double sigma,
                          double target) {
    if (!(target > 0.0)) {
        throw std::invalid_argument("tail_eps_for_bound: target <= 0");
    }
    return target / tail_bound_coefficient(q, n, m, sigma);
}

TailValidation validate_tail(TailQuantity q, int n, int m, double sigma,
                             int n_trials, double eps, std::uint64_t root_seed,
                             int jobs, const Eigen::MatrixXd* base) {
    if (n < 1 || m < 1) throw std::invalid_argument("validate_tail: bad shape");
    if (n_trials < 1) throw std::invalid_argument("validate_tail: n_trials < 1");
    if (!(sigma > 0.0) || sigma > 1.0) {
        throw std::invalid_argument("validate_tail: sigma must be in (0, 1]");
    }
    if (!(eps >= 0.0)) throw std::invalid_argument("validate_tail: eps < 0");
    Eigen::MatrixXd base_m =
        base != nullptr ? *base : Eigen::MatrixXd::Zero(n, m);
    if (base_m.rows() != n || base_m.cols() != m) {
        throw std::invalid_argument("validate_tail: base shape mismatch");
    }
    validate_base(base_m);

    TailValidation tv;
    tv.quantity = q;
    tv.eps = eps;
    tv.sigma = sigma;
    tv.n_trials = n_trials;
    tv.bound = eps * tail_bound_coefficient(q, n, m, sigma);
    if (tv.bound >= 0.5) {
        throw std::invalid_argument(
            "validate_tail: analytic bound " + fmt_g17(tv.bound) +
            " at eps " + fmt_g17(eps) +
            " is not informative; choose a smaller eps");
    }

    struct Cell {
        bool nondeg = false;
        bool below = false;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(n_trials));
    parallel_for(n_trials, jobs, [&](std::int64_t k) {
        const std::uint64_t seed =
            cell_seed(root_seed, 0, static_cast<std::uint64_t>(k));
        const Game gp = gaussian_perturb(base_m, sigma, seed);
        Cell& cell = cells[static_cast<std::size_t>(k)];
        try {
            const Equilibrium eq = solve_exact(gp, kOracleTol);
            if (!certify_nondegenerate(gp, eq, kOracleTol).is_nondegenerate) {
                return;
            }
            cell.nondeg = true;
            cell.below = tail_margin(q, gp, eq) <= tail_threshold(q, gp, eq, eps);
        } catch (const SolverFailureError&) {
            // degenerate draw, excluded
        }
    });
    for (const Cell& c : cells) {
        if (c.nondeg) {
            ++tv.n_nondegenerate;
            if (c.below) ++tv.n_below;
        }
    }
    tv.empirical_freq =
        tv.n_nondegenerate > 0
            ? static_cast<double>(tv.n_below) / tv.n_nondegenerate
            : 0.0;
    tv.slack = 3.0 * std::sqrt(tv.bound * (1.0 - tv.bound) / n_trials) +
               1.0 / n_trials;
    tv.pass = tv.empirical_freq <= tv.bound + tv.slack;
    return tv;
}

std::string tail_report_text(const TailValidation& tv) {
    std::string out;
    out += "quantity=" + tail_quantity_name(tv.quantity) + "\n";
    out += "sigma=" + fmt_g17(tv.sigma) + "\n";
    out += "eps=" + fmt_g17(tv.eps) + "\n";
    out += "trials=" + std::to_string(tv.n_trials) + "\n";
    out += "nondegenerate=" + std::to_string(tv.n_nondegenerate) + "\n";
    out += "below=" + std::to_string(tv.n_below) + "\n";
    out += "empirical_freq=" + fmt_g17(tv.empirical_freq) + "\n";
    out += "bound=" + fmt_g17(tv.bound) + "\n";
    out += "slack=" + fmt_g17(tv.slack) + "\n";
    out += std::string("pass=") + (tv.pass ? "1" : "0") + "\n";
    return out;
}

namespace {

struct SeedTrajectory {
    std::vector<double> phi;
    std::vector<double> dist;
};

SeedTrajectory figure_run(const Game& g, std::int64_t iters) {
    const Equilibrium eq = solve_exact(g, kOracleTol);
    SolverConfig cfg;
    cfg.algorithm = Algorithm::OGDA;
    cfg.eps = std::numeric_limits<double>::denorm_min();  // never stop early
    cfg.max_iters = iters;
    cfg.record_every = 1;
    const JointStrategy z0{SimplexVector::uniform(g.n()),
                           SimplexVector::uniform(g.m())};
    const SolveResult res = run_ogda(g, cfg, z0, &eq);
    SeedTrajectory t;
    t.phi.reserve(static_cast<std::size_t>(iters));
    t.dist.reserve(static_cast<std::size_t>(iters));
    for (const TrajectoryRecord& r : res.trajectory) {
        if (r.iter >= iters) break;
        t.phi.push_back(r.phi);
        t.dist.push_back(r.dist_to_eq.value_or(0.0));
    }
    while (t.phi.size() < static_cast<std::size_t>(iters)) {
        // A run that stopped early holds its final point.
        t.phi.push_back(t.phi.back());
        t.dist.push_back(t.dist.back());
    }
    return t;
}

}  // namespace

std::vector<std::string> reproduce_figure(const FigureSpec& spec) {
    if (spec.n_seeds < 1) {
        throw std::invalid_argument("reproduce_figure: n_seeds < 1");
    }
    if (spec.iters < 1) {
        throw std::invalid_argument("reproduce_figure: iters < 1");
    }
    if (spec.sigmas.empty()) {
        throw std::invalid_argument("reproduce_figure: empty sigma list");
    }
    for (double s : spec.sigmas) {
        if (!(s >= 0.0) || s > 1.0) {
            throw std::invalid_argument(
                "reproduce_figure: sigma must be in [0, 1]");
        }
    }
    const Game base = make_illcond_game(spec.gamma);
    std::filesystem::create_directories(spec.out_dir);

    // Flat cell list: sigma 0 runs once, others n_seeds times.
    struct CellRef {
        std::size_t si;
        int k;
    };
    std::vector<CellRef> cells;
    std::vector<std::vector<SeedTrajectory>> per_sigma(spec.sigmas.size());
    for (std::size_t si = 0; si < spec.sigmas.size(); ++si) {
        const int runs = spec.sigmas[si] == 0.0 ? 1 : spec.n_seeds;
        per_sigma[si].resize(static_cast<std::size_t>(runs));
        for (int k = 0; k < runs; ++k) cells.push_back({si, k});
    }
    parallel_for(static_cast<std::int64_t>(cells.size()), spec.jobs,
                 [&](std::int64_t c) {
                     const CellRef ref = cells[static_cast<std::size_t>(c)];
                     const double sigma = spec.sigmas[ref.si];
                     Game g = base;
                     if (sigma != 0.0) {
                         const std::uint64_t seed = cell_seed(
                             spec.root_seed,
                             static_cast<std::uint64_t>(ref.si),
                             static_cast<std::uint64_t>(ref.k));
                         g = gaussian_perturb(base.A(), sigma, seed);
                     }
                     per_sigma[ref.si][static_cast<std::size_t>(ref.k)] =
                         figure_run(g, spec.iters);
                 });

    std::vector<std::string> written;
    std::vector<SvgSeries> phi_series, dist_series;
    for (std::size_t si = 0; si < spec.sigmas.size(); ++si) {
        const std::vector<SeedTrajectory>& runs = per_sigma[si];
        const double denom = static_cast<double>(runs.size());
        std::vector<double> phi_mean(spec.iters), phi_std(spec.iters),
            dist_mean(spec.iters), dist_std(spec.iters);
        for (std::int64_t t = 0; t < spec.iters; ++t) {
            double sp = 0.0, sd = 0.0;
            for (const SeedTrajectory& r : runs) {
                sp += r.phi[static_cast<std::size_t>(t)];
                sd += r.dist[static_cast<std::size_t>(t)];
            }
            const double mp = sp / denom;
            const double md = sd / denom;
            double vp = 0.0, vd = 0.0;
            for (const SeedTrajectory& r : runs) {
                const double ep = r.phi[static_cast<std::size_t>(t)] - mp;
                const double ed = r.dist[static_cast<std::size_t>(t)] - md;
                vp += ep * ep;
                vd += ed * ed;
            }
            phi_mean[static_cast<std::size_t>(t)] = mp;
            dist_mean[static_cast<std::size_t>(t)] = md;
            phi_std[static_cast<std::size_t>(t)] = std::sqrt(vp / denom);
            dist_std[static_cast<std::size_t>(t)] = std::sqrt(vd / denom);
        }

        const std::string csv_path =
            spec.out_dir + "/figure_gamma" + fmt_g(spec.gamma) + "_sigma" +
            fmt_g(spec.sigmas[si]) + ".csv";
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) {
            throw std::runtime_error("cannot write " + csv_path);
        }
        csv << "iter,phi_mean,phi_std,dist_mean,dist_std\n";
        for (std::int64_t t = 0; t < spec.iters; ++t) {
            const std::size_t u = static_cast<std::size_t>(t);
            csv << t << ',' << fmt_g17(phi_mean[u]) << ','
                << fmt_g17(phi_std[u]) << ',' << fmt_g17(dist_mean[u]) << ','
                << fmt_g17(dist_std[u]) << '\n';
        }
        written.push_back(csv_path);

        const std::string label = "sigma=" + fmt_g(spec.sigmas[si]);
        phi_series.push_back(SvgSeries{label, phi_mean});
        dist_series.push_back(SvgSeries{label, dist_mean});
    }

    const std::string stem = spec.out_dir + "/figure_gamma" + fmt_g(spec.gamma);
    const std::string phi_path = stem + "_phi.svg";
    {
        std::ofstream svg(phi_path, std::ios::binary);
        if (!svg) throw std::runtime_error("cannot write " + phi_path);
        svg << render_line_chart(
            "Duality gap, gamma=" + fmt_g(spec.gamma) + " (mean over seeds)",
            "iteration", "duality gap", phi_series, /*log10_y=*/true);
    }
    written.push_back(phi_path);
    const std::string dist_path = stem + "_dist.svg";
    {
        std::ofstream svg(dist_path, std::ios::binary);
        if (!svg) throw std::runtime_error("cannot write " + dist_path);
        svg << render_line_chart(
            "Distance to equilibrium, gamma=" + fmt_g(spec.gamma) +
                " (mean over seeds)",
            "iteration", "distance", dist_series, /*log10_y=*/false);
    }
    written.push_back(dist_path);
    return written;
}

}  // namespace saddlebench
