// saddlebench command line front-end.
//
// Exit codes: 0 success, 1 usage or input error, 2 solver did not reach the
// target accuracy, 3 degeneracy detected, 4 statistical validation failed.

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saddlebench/error_bound.hpp"
#include "saddlebench/game.hpp"
#include "saddlebench/oracle.hpp"
#include "saddlebench/smoothed_lab.hpp"
#include "saddlebench/solvers.hpp"
#include "saddlebench/textfmt.hpp"

namespace sb = saddlebench;

namespace {

constexpr double kOracleTol = 1e-9;

// ----- game source flags shared by solve / diagnose / stability -----

struct GameSource {
    std::string file;
    double illcond_gamma = 0.0;
    int identity_d = 0;
    std::vector<int> zero_shape;
    bool pennies = false;
    CLI::Option* illcond_opt = nullptr;
    CLI::Option* identity_opt = nullptr;
    CLI::Option* zero_opt = nullptr;
};

void add_game_options(CLI::App* cmd, GameSource& src) {
    cmd->add_option("game", src.file, "game JSON file");
    src.illcond_opt =
        cmd->add_option("--illcond-gamma", src.illcond_gamma,
                        "diag(g, 2g, 1) instance with the given g in (0,1)");
    cmd->add_flag("--matching-pennies", src.pennies,
                  "the 2x2 matching pennies game");
    src.identity_opt = cmd->add_option("--identity", src.identity_d,
                                       "identity game of the given size");
    src.zero_opt = cmd->add_option("--zero", src.zero_shape,
                                   "zero game with the given rows and cols")
                       ->expected(2);
}

// Returns the game plus a short tag for the config echo.
std::pair<sb::Game, std::string> resolve_game(const GameSource& src) {
    const int n_sources = (src.file.empty() ? 0 : 1) +
                          (src.illcond_opt->count() > 0 ? 1 : 0) +
                          (src.pennies ? 1 : 0) +
                          (src.identity_opt->count() > 0 ? 1 : 0) +
                          (src.zero_opt->count() > 0 ? 1 : 0);
    if (n_sources != 1) {
        throw std::invalid_argument(
            "provide exactly one game source: a JSON file or one of "
            "--illcond-gamma, --matching-pennies, --identity, --zero");
    }
    if (!src.file.empty()) {
        return {sb::load_game(src.file), "file:" + src.file};
    }
    if (src.illcond_opt->count() > 0) {
        return {sb::make_illcond_game(src.illcond_gamma),
                "illcond:" + sb::fmt_g(src.illcond_gamma)};
    }
    if (src.pennies) {
        return {sb::matching_pennies(), "pennies"};
    }
    if (src.identity_opt->count() > 0) {
        return {sb::identity_game(src.identity_d),
                "identity:" + std::to_string(src.identity_d)};
    }
    return {sb::zero_game(src.zero_shape[0], src.zero_shape[1]),
            "zero:" + std::to_string(src.zero_shape[0]) + "x" +
                std::to_string(src.zero_shape[1])};
}

// ----- seed resolution: --seed wins over SADDLEBENCH_SEED over 0 -----

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t given) {
    if (seed_opt != nullptr && seed_opt->count() > 0) return given;
    if (const char* env = std::getenv("SADDLEBENCH_SEED")) {
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (errno != 0 || end == env || *end != '\0') {
            throw std::invalid_argument(
                std::string("SADDLEBENCH_SEED is not an unsigned integer: ") +
                env);
        }
        return static_cast<std::uint64_t>(v);
    }
    return 0;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << content;
}

int print_certificate_and_fail(const sb::NonDegeneracyCertificate& cert) {
    std::cout << "is_nondegenerate=0\n"
              << "tight_count_x=" << cert.tight_count_x << "\n"
              << "tight_count_y=" << cert.tight_count_y << "\n"
              << "unique=" << (cert.unique ? 1 : 0) << "\n"
              << "complementarity_ok=" << (cert.complementarity_ok ? 1 : 0)
              << "\n";
    std::cerr << "degenerate instance; diagnostics require a non-degenerate "
                 "equilibrium\n";
    return 3;
}

// ----- solve -----

struct SolveArgs {
    GameSource src;
    std::string algo = "ogda";
    sb::SolverConfig cfg;
    std::string out;
    bool track_dist = false;
};

int run_solve(const SolveArgs& a) {
    auto [game, tag] = resolve_game(a.src);
    sb::SolverConfig cfg = a.cfg;
    cfg.algorithm = sb::algorithm_from_name(a.algo);
    const double eta_resolved =
        cfg.eta > 0.0 ? cfg.eta : sb::default_eta(cfg.algorithm, game);
    std::cerr << "config: cmd=solve game=" << tag
              << " algo=" << sb::algorithm_name(cfg.algorithm)
              << " eta=" << sb::fmt_g(eta_resolved)
              << " eps=" << sb::fmt_g(cfg.eps)
              << " max_iters=" << cfg.max_iters << " rho=" << sb::fmt_g(cfg.rho)
              << " record_every=" << cfg.record_every
              << " allow_large_eta=" << (cfg.allow_large_eta ? 1 : 0)
              << " track_dist=" << (a.track_dist ? 1 : 0)
              << " out=" << (a.out.empty() ? "-" : a.out) << "\n";

    sb::Equilibrium eq{sb::SimplexVector::uniform(game.n()),
                       sb::SimplexVector::uniform(game.m()),
                       0.0,
                       {},
                       {}};
    bool have_eq = false;
    if (a.track_dist) {
        try {
            eq = sb::solve_exact(game, kOracleTol);
            have_eq = true;
        } catch (const std::exception& e) {
            std::cerr << "warning: distance tracking disabled, oracle failed: "
                      << e.what() << "\n";
        }
    }
    const sb::JointStrategy z0{sb::SimplexVector::uniform(game.n()),
                               sb::SimplexVector::uniform(game.m())};
    const sb::SolveResult res =
        sb::run_solver(game, cfg, z0, have_eq ? &eq : nullptr);
    if (!a.out.empty()) {
        std::ostringstream ss;
        sb::write_trajectory_csv(ss, res.trajectory);
        write_text_file(a.out, ss.str());
    }
    std::cout << "algorithm=" << sb::algorithm_name(cfg.algorithm)
              << " converged=" << (res.converged ? 1 : 0)
              << " iters=" << res.iters_used
              << " phi_final=" << sb::fmt_g17(res.phi_final) << "\n";
    if (!res.converged) {
        std::cerr << "did not reach eps=" << sb::fmt_g(cfg.eps) << " within "
                  << cfg.max_iters << " iterations\n";
        return 2;
    }
    return 0;
}

// ----- diagnose / stability -----

struct DiagnoseArgs {
    GameSource src;
    int samples = 200;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::string out;
    bool json = false;
};

int run_diagnose(const DiagnoseArgs& a) {
    auto [game, tag] = resolve_game(a.src);
    const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
    std::cerr << "config: cmd=diagnose game=" << tag
              << " samples=" << a.samples << " seed=" << seed
              << " json=" << (a.json ? 1 : 0)
              << " out=" << (a.out.empty() ? "-" : a.out) << "\n";
    sb::Equilibrium eq{sb::SimplexVector::uniform(game.n()),
                       sb::SimplexVector::uniform(game.m()),
                       0.0,
                       {},
                       {}};
    try {
        eq = sb::solve_exact(game, kOracleTol);
    } catch (const sb::SolverFailureError& e) {
        std::cerr << "degenerate instance: " << e.what() << "\n";
        return 3;
    }
    const sb::NonDegeneracyCertificate cert =
        sb::certify_nondegenerate(game, eq, kOracleTol);
    if (!cert.is_nondegenerate) return print_certificate_and_fail(cert);
    const sb::Diagnostics diag =
        sb::compute_diagnostics(game, eq, a.samples, seed);
    std::cout << (a.json ? sb::report_json(diag) : sb::report_text(diag));
    if (!a.out.empty()) write_text_file(a.out, sb::report_json(diag));
    return 0;
}

struct StabilityArgs {
    GameSource src;
    int samples = 200;
    int directions = 20;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::string out;
    bool json = false;
};

int run_stability(const StabilityArgs& a) {
    auto [game, tag] = resolve_game(a.src);
    const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
    std::cerr << "config: cmd=stability game=" << tag
              << " samples=" << a.samples << " directions=" << a.directions
              << " seed=" << seed << " json=" << (a.json ? 1 : 0)
              << " out=" << (a.out.empty() ? "-" : a.out) << "\n";
    sb::Equilibrium eq{sb::SimplexVector::uniform(game.n()),
                       sb::SimplexVector::uniform(game.m()),
                       0.0,
                       {},
                       {}};
    try {
        eq = sb::solve_exact(game, kOracleTol);
    } catch (const sb::SolverFailureError& e) {
        std::cerr << "degenerate instance: " << e.what() << "\n";
        return 3;
    }
    const sb::NonDegeneracyCertificate cert =
        sb::certify_nondegenerate(game, eq, kOracleTol);
    if (!cert.is_nondegenerate) return print_certificate_and_fail(cert);
    const sb::QSystem qs = sb::q_transform(game, eq);
    const sb::Diagnostics diag =
        sb::compute_diagnostics(game, eq, a.samples, seed);
    const sb::StabilityBounds bounds =
        sb::stability_bounds(game, eq, qs, a.directions, seed);
    std::cout << (a.json ? sb::report_json(diag, &bounds)
                         : sb::report_text(diag, &bounds));
    if (!a.out.empty()) write_text_file(a.out, sb::report_json(diag, &bounds));
    return 0;
}

// ----- trials -----

Eigen::MatrixXd resolve_base(const std::string& token) {
    if (std::filesystem::exists(token)) {
        return sb::load_game(token).A();
    }
    if (token == "pennies") return sb::matching_pennies().A();
    const auto starts_with = [&](const char* p) {
        return token.rfind(p, 0) == 0;
    };
    const auto parse_rest = [&](std::size_t off) {
        return token.substr(off);
    };
    try {
        if (starts_with("identity")) {
            return sb::identity_game(std::stoi(parse_rest(8))).A();
        }
        if (starts_with("illcond")) {
            return sb::make_illcond_game(std::stod(parse_rest(7))).A();
        }
        if (starts_with("zero")) {
            const std::string rest = parse_rest(4);
            const std::size_t x = rest.find('x');
            if (x == std::string::npos) {
                const int d = std::stoi(rest);
                return sb::zero_game(d, d).A();
            }
            return sb::zero_game(std::stoi(rest.substr(0, x)),
                                 std::stoi(rest.substr(x + 1)))
                .A();
        }
    } catch (const std::invalid_argument&) {
        // falls through to the error below (std::stoi/stod failure)
    } catch (const std::out_of_range&) {
    }
    throw std::invalid_argument(
        "--base: not a file or generator token (zero<n>[x<m>], identity<d>, "
        "illcond<gamma>, pennies): " +
        token);
}

struct TrialsArgs {
    std::string base;
    std::vector<double> sigmas;
    int trials = 100;
    std::string algo = "ogda";
    sb::SolverConfig cfg;
    int samples = 100;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    int jobs = 1;
    std::string out;
};

int run_trials_cmd(const TrialsArgs& a) {
    sb::TrialSpec spec;
    spec.base_matrix = resolve_base(a.base);
    spec.sigma_list = a.sigmas;
    spec.n_trials = a.trials;
    spec.solver = a.cfg;
    spec.solver.algorithm = sb::algorithm_from_name(a.algo);
    spec.root_seed = resolve_seed(a.seed_opt, a.seed);
    spec.n_diag_samples = a.samples;
    spec.jobs = a.jobs;
    std::cerr << "config: cmd=trials base=" << a.base << " sigmas=";
    for (std::size_t i = 0; i < a.sigmas.size(); ++i) {
        std::cerr << (i ? "," : "") << sb::fmt_g(a.sigmas[i]);
    }
    std::cerr << " trials=" << a.trials
              << " algo=" << sb::algorithm_name(spec.solver.algorithm)
              << " eta=" << sb::fmt_g(spec.solver.eta)
              << " eps=" << sb::fmt_g(spec.solver.eps)
              << " max_iters=" << spec.solver.max_iters
              << " samples=" << a.samples << " seed=" << spec.root_seed
              << " jobs=" << a.jobs << " out=" << (a.out.empty() ? "-" : a.out)
              << "\n";
    const std::vector<sb::TrialOutcome> outcomes = sb::run_trials(spec);
    std::ostringstream ss;
    sb::write_trials_csv(ss, outcomes);
    if (a.out.empty()) {
        std::cout << ss.str();
    } else {
        write_text_file(a.out, ss.str());
    }
    return 0;
}

// ----- tails -----

struct TailsArgs {
    std::string which;
    int n = 5, m = 5;
    double sigma = 1.0;
    int trials = 400;
    double eps = -1.0;  // <0: choose so the analytic bound is 0.2
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    int jobs = 1;
};

int run_tails(const TailsArgs& a) {
    const sb::TailQuantity q = sb::tail_quantity_from_name(a.which);
    const double eps =
        a.eps >= 0.0
            ? a.eps
            : sb::tail_eps_for_bound(q, a.n, a.m, a.sigma, 0.2);
    const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
    std::cerr << "config: cmd=tails which=" << sb::tail_quantity_name(q)
              << " n=" << a.n << " m=" << a.m << " sigma=" << sb::fmt_g(a.sigma)
              << " trials=" << a.trials << " eps=" << sb::fmt_g17(eps)
              << " seed=" << seed << " jobs=" << a.jobs << "\n";
    const sb::TailValidation tv =
        sb::validate_tail(q, a.n, a.m, a.sigma, a.trials, eps, seed, a.jobs);
    std::cout << sb::tail_report_text(tv);
    if (!tv.pass) {
        std::cerr << "tail bound violated: empirical_freq="
                  << sb::fmt_g17(tv.empirical_freq)
                  << " exceeds bound+slack=" << sb::fmt_g17(tv.bound + tv.slack)
                  << "\n";
        return 4;
    }
    return 0;
}

// ----- figure -----

struct FigureArgs {
    sb::FigureSpec spec;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

int run_figure(FigureArgs a) {
    a.spec.root_seed = resolve_seed(a.seed_opt, a.seed);
    std::cerr << "config: cmd=figure gamma=" << sb::fmt_g(a.spec.gamma)
              << " sigmas=";
    for (std::size_t i = 0; i < a.spec.sigmas.size(); ++i) {
        std::cerr << (i ? "," : "") << sb::fmt_g(a.spec.sigmas[i]);
    }
    std::cerr << " seeds=" << a.spec.n_seeds << " iters=" << a.spec.iters
              << " seed=" << a.spec.root_seed << " jobs=" << a.spec.jobs
              << " out_dir=" << a.spec.out_dir << "\n";
    for (const std::string& path : sb::reproduce_figure(a.spec)) {
        std::cout << path << "\n";
    }
    return 0;
}

void add_solver_options(CLI::App* cmd, std::string& algo,
                        sb::SolverConfig& cfg) {
    cmd->add_option("--algo", algo, "ogda, omwu, egda or itersmooth")
        ->capture_default_str();
    cmd->add_option("--eta", cfg.eta,
                    "step size; 0 picks the per-algorithm default");
    cmd->add_option("--eps", cfg.eps, "target duality gap")
        ->capture_default_str();
    cmd->add_option("--max-iters", cfg.max_iters, "iteration cap")
        ->capture_default_str();
    cmd->add_option("--rho", cfg.rho, "itersmooth stage shrink factor")
        ->capture_default_str();
    cmd->add_option("--record-every", cfg.record_every,
                    "trajectory sampling stride")
        ->capture_default_str();
    cmd->add_flag("--allow-large-eta", cfg.allow_large_eta,
                  "let OGDA run with eta above 1/(8||A||)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "zero-sum matrix game solvers and conditioning diagnostics"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve_cmd = app.add_subcommand(
        "solve", "run a first-order solver and report convergence");
    add_game_options(solve_cmd, solve_args.src);
    add_solver_options(solve_cmd, solve_args.algo, solve_args.cfg);
    solve_cmd->add_option("--out", solve_args.out, "trajectory CSV path");
    solve_cmd->add_flag("--track-dist", solve_args.track_dist,
                        "record distance to the oracle equilibrium");

    DiagnoseArgs diag_args;
    CLI::App* diag_cmd = app.add_subcommand(
        "diagnose", "solve exactly and report conditioning diagnostics");
    add_game_options(diag_cmd, diag_args.src);
    diag_cmd->add_option("--samples", diag_args.samples,
                         "sampling effort for kappa_empirical")
        ->capture_default_str();
    diag_args.seed_opt =
        diag_cmd->add_option("--seed", diag_args.seed, "sampling seed");
    diag_cmd->add_option("--out", diag_args.out, "write JSON report here");
    diag_cmd->add_flag("--json", diag_args.json, "print JSON instead of text");

    StabilityArgs stab_args;
    CLI::App* stab_cmd = app.add_subcommand(
        "stability", "diagnostics plus support-stability bounds");
    add_game_options(stab_cmd, stab_args.src);
    stab_cmd->add_option("--samples", stab_args.samples,
                         "sampling effort for kappa_empirical")
        ->capture_default_str();
    stab_cmd->add_option("--directions", stab_args.directions,
                         "random directions for the measured radius")
        ->capture_default_str();
    stab_args.seed_opt =
        stab_cmd->add_option("--seed", stab_args.seed, "sampling seed");
    stab_cmd->add_option("--out", stab_args.out, "write JSON report here");
    stab_cmd->add_flag("--json", stab_args.json, "print JSON instead of text");

    TrialsArgs trials_args;
    CLI::App* trials_cmd = app.add_subcommand(
        "trials", "Monte Carlo sweep over Gaussian perturbations");
    trials_cmd
        ->add_option("--base", trials_args.base,
                     "base game: JSON file or zero<n>[x<m>], identity<d>, "
                     "illcond<gamma>, pennies")
        ->required();
    trials_cmd->add_option("--sigma", trials_args.sigmas, "noise levels")
        ->required();
    trials_cmd->add_option("--trials", trials_args.trials, "trials per sigma")
        ->capture_default_str();
    add_solver_options(trials_cmd, trials_args.algo, trials_args.cfg);
    trials_cmd->add_option("--samples", trials_args.samples,
                           "sampling effort for kappa_empirical")
        ->capture_default_str();
    trials_args.seed_opt =
        trials_cmd->add_option("--seed", trials_args.seed, "root seed");
    trials_cmd->add_option("--jobs", trials_args.jobs, "worker threads")
        ->capture_default_str();
    trials_cmd->add_option("--out", trials_args.out, "CSV path (default stdout)");

    TailsArgs tails_args;
    CLI::App* tails_cmd = app.add_subcommand(
        "tails", "validate a tail bound for a conditioning margin");
    tails_cmd
        ->add_option("--which", tails_args.which, "beta, gamma or alpha")
        ->required();
    tails_cmd->add_option("--n", tails_args.n, "rows")->capture_default_str();
    tails_cmd->add_option("--m", tails_args.m, "cols")->capture_default_str();
    tails_cmd->add_option("--sigma", tails_args.sigma, "noise level")
        ->capture_default_str();
    tails_cmd->add_option("--trials", tails_args.trials, "number of draws")
        ->capture_default_str();
    tails_cmd->add_option("--eps", tails_args.eps,
                          "margin scale; default targets bound 0.2");
    tails_args.seed_opt =
        tails_cmd->add_option("--seed", tails_args.seed, "root seed");
    tails_cmd->add_option("--jobs", tails_args.jobs, "worker threads")
        ->capture_default_str();

    FigureArgs fig_args;
    CLI::App* fig_cmd = app.add_subcommand(
        "figure", "trajectory aggregates (CSV) and SVG plots");
    fig_cmd->add_option("--gamma", fig_args.spec.gamma, "base game gamma")
        ->capture_default_str();
    fig_cmd->add_option("--sigma", fig_args.spec.sigmas, "noise levels")
        ->capture_default_str();
    fig_cmd->add_option("--seeds", fig_args.spec.n_seeds, "seeds per sigma")
        ->capture_default_str();
    fig_cmd->add_option("--iters", fig_args.spec.iters, "rows per CSV")
        ->capture_default_str();
    fig_args.seed_opt =
        fig_cmd->add_option("--seed", fig_args.seed, "root seed");
    fig_cmd->add_option("--jobs", fig_args.spec.jobs, "worker threads")
        ->capture_default_str();
    fig_cmd->add_option("--out-dir", fig_args.spec.out_dir, "output directory")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*solve_cmd) return run_solve(solve_args);
        if (*diag_cmd) return run_diagnose(diag_args);
        if (*stab_cmd) return run_stability(stab_args);
        if (*trials_cmd) return run_trials_cmd(trials_args);
        if (*tails_cmd) return run_tails(tails_args);
        if (*fig_cmd) return run_figure(fig_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
