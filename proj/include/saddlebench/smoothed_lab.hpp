#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saddlebench/error_bound.hpp"
#include "saddlebench/solvers.hpp"

namespace saddlebench {

// Monte Carlo study: for each sigma and each trial k, solve and diagnose
// A_bar + sigma * G_k.
struct TrialSpec {
    Eigen::MatrixXd base_matrix;     // entries in [-1, 1]
    std::vector<double> sigma_list;  // each in (0, 1]
    int n_trials = 1;
    SolverConfig solver;
    std::uint64_t root_seed = 0;
    int n_diag_samples = 100;  // kappa_empirical sampling effort
    int jobs = 1;
};

struct TrialOutcome {
    double sigma = 0.0;
    std::uint64_t seed = 0;  // per-trial derived seed
    bool nondegenerate = false;
    std::optional<Diagnostics> diagnostics;  // absent for degenerate draws
    std::int64_t iters_to_eps = 0;
    double phi_final = 0.0;
    std::optional<double> dist_final;  // absent when no unique equilibrium
};

// Runs all (sigma, trial) cells. Degenerate draws are recorded, never
// fatal. Output depends only on spec.root_seed, not on spec.jobs.
std::vector<TrialOutcome> run_trials(const TrialSpec& spec);

// Header: sigma,seed,nondegenerate,alpha_P,alpha_D,beta_P,beta_D,gamma_P,
// gamma_D,sigma_min_Qbar,kappa_core,kappa_empirical,iters_to_eps,phi_final,
// dist_final. Absent fields serialize as empty cells.
void write_trials_csv(std::ostream& os,
                      const std::vector<TrialOutcome>& outcomes);

enum class TailQuantity { BetaP, GammaP, AlphaP };

TailQuantity tail_quantity_from_name(const std::string& name);
std::string tail_quantity_name(TailQuantity q);

// Tail validation for one conditioning margin on pure-noise draws
// A = base + sigma * G: the fraction of non-degenerate trials whose margin
// falls below the eps-scaled threshold must not exceed the analytic bound
// plus sampling slack.
struct TailValidation {
    TailQuantity quantity = TailQuantity::BetaP;
    double eps = 0.0;
    double sigma = 0.0;
    int n_trials = 0;
    int n_nondegenerate = 0;
    int n_below = 0;          // margin <= threshold among non-degenerate
    double empirical_freq = 0.0;
    double bound = 0.0;       // analytic tail probability at eps
    double slack = 0.0;       // 3 * sqrt(bound (1-bound) / n) + 1/n
    bool pass = false;        // empirical_freq <= bound + slack
};

// base may be empty (defaults to the zero matrix). Requires the analytic
// bound at eps to be below 0.5, otherwise the check is uninformative and an
// invalid_argument is thrown.
TailValidation validate_tail(TailQuantity q, int n, int m, double sigma,
                             int n_trials, double eps, std::uint64_t root_seed,
                             int jobs = 1,
                             const Eigen::MatrixXd* base = nullptr);

// eps at which the analytic bound equals target (used for CLI defaults).
double tail_eps_for_bound(TailQuantity q, int n, int m, double sigma,
                          double target);

std::string tail_report_text(const TailValidation& tv);

// Mean/std duality-gap and distance trajectories of OGDA on perturbations
// of the gamma ill-conditioned game, one CSV per sigma plus one SVG per
// metric. sigma = 0 runs the unperturbed game once (zero std). Every CSV
// has exactly `iters` data rows (iterations 0 .. iters-1; converged runs
// repeat their final record).
struct FigureSpec {
    double gamma = 0.25;
    std::vector<double> sigmas = {0.0, 0.05, 0.25};
    int n_seeds = 10;
    std::int64_t iters = 1000;
    std::uint64_t root_seed = 0;
    int jobs = 1;
    std::string out_dir = ".";
};

// Returns the paths written (CSVs then SVGs). Byte-identical across reruns
// and across jobs settings.
std::vector<std::string> reproduce_figure(const FigureSpec& spec);

}  // namespace saddlebench
