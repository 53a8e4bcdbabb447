#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saddlebench/game.hpp"
#include "saddlebench/oracle.hpp"

namespace saddlebench {

// Reduced system obtained by eliminating one support row i and one support
// column j of a non-degenerate equilibrium:
//   Q[i',j'] = A[i',j'] - A[i,j'] - A[i',j] + A[i,j]   (i' in B~, j' in N~)
//   b[j']   = A[i,j] - A[i,j']
//   c[i']   = A[i,j] - A[i',j]
//   d       = A[i,j]
// with B~ = B \ {i}, N~ = N \ {j}. The map is invertible, so (Q, b, c, d)
// carries exactly the support block of A.
struct QSystem {
    Eigen::MatrixXd Q;  // |B~| x |N~|
    Eigen::VectorXd b;  // over N~
    Eigen::VectorXd c;  // over B~
    double d = 0.0;
    int elim_i = 0;
    int elim_j = 0;
    std::vector<int> B_tilde;
    std::vector<int> N_tilde;
    bool empty_reduction = false;  // |B| == 1 or |N| == 1
};

struct AlphaBeta {
    double alpha_P = 1.0;  // min support mass of x*
    double alpha_D = 1.0;  // min support mass of y*
    double beta_P = 1.0;   // min payoff slack over columns off N
    double beta_D = 1.0;   // min payoff slack over rows off B
};

struct Gammas {
    double gamma_P = 1.0;  // min distance of a column of Q to the span of
                           // the other columns
    double gamma_D = 1.0;  // same over rows
};

// Conditioning summary of a non-degenerate instance. Empty minima (full
// support, empty reduction) default to 1.
struct Diagnostics {
    double alpha_P = 0.0;
    double alpha_D = 0.0;
    double beta_P = 0.0;
    double beta_D = 0.0;
    double gamma_P = 0.0;
    double gamma_D = 0.0;
    double sigma_min_Qbar = 0.0;
    double kappa_core = 0.0;
    double kappa_empirical = 0.0;
    double a_flat_inf = 0.0;  // max |A_ij|
};

// How far A can move before the equilibrium support structure can change.
// Non-finite entries mean "not applicable" (e.g. full support) and are
// omitted from serialized reports.
struct StabilityBounds {
    double delta_ub_beta = 0.0;
    double delta_ub_sigma = 0.0;
    double delta_ub_alpha = 0.0;
    double delta_empirical = 0.0;
};

// Builds the reduced system for eq, eliminating i = min(B), j = min(N).
// Validates the defining identities Q y~* = c, Q^T x~* = b and
// v = d - <x~*, Q y~*> to 1e-8 before returning.
QSystem q_transform(const Game& g, const Equilibrium& eq);

// Linear map from (vec Q row-major over B~ x N~, b, c, d) back to
// vec A[B,N] row-major. Every row has at most 4 entries, each +/-1, and
// |det T| = 1.
Eigen::MatrixXd build_T(const std::vector<int>& B, const std::vector<int>& N,
                        int elim_i, int elim_j);

AlphaBeta compute_alpha_beta(const Game& g, const Equilibrium& eq);

// Column/row least-squares distances of Q (rank-revealing factorization).
Gammas compute_gamma(const QSystem& qs);

// Q with c subtracted from every column.
Eigen::MatrixXd bar_Q(const QSystem& qs);

// Smallest singular value, full relative accuracy. Empty matrix -> 0.
double sigma_min(const Eigen::MatrixXd& M);

// Sum of inverse squared singular values, together with the same quantity
// computed from row and from column distances-to-complement-span. The three
// agree for any full-rank matrix; disagreement beyond rounding indicates a
// broken distance computation.
struct InverseSquareMoments {
    double from_singular_values = 0.0;
    double from_rows = 0.0;
    double from_cols = 0.0;
};
InverseSquareMoments inverse_square_moments(const Eigen::MatrixXd& M);

// Certified error-bound constant
//   (1 / max|A|) * (1 / min(n,m)^3) * min(alpha_D^2 beta_D gamma_P,
//                                         alpha_P^2 beta_P gamma_D).
// Returns 0 when any factor vanishes (degenerate margin). Homogeneous of
// degree 1 in A, matching how the duality gap itself scales.
double kappa_core(const Game& g, const Equilibrium& eq);

// Empirical lower-envelope estimate min Phi(z) / ||z - z*|| over all vertex
// pairs, n_samples Dirichlet(1,..,1) pairs and short segments from z*
// toward random vertices (offsets 1e-1, 1e-2, 1e-3). Samples closer than
// 1e-12 to z* are excluded. By construction every sampled z satisfies
// Phi(z) >= result * ||z - z*||.
double kappa_empirical(const Game& g, const Equilibrium& eq, int n_samples,
                       std::uint64_t seed);

// Assembles all Diagnostics fields for a non-degenerate instance.
Diagnostics compute_diagnostics(const Game& g, const Equilibrium& eq,
                                int n_samples, std::uint64_t seed);

// Three analytic perturbation budgets plus a measured one:
//   delta_ub_beta  = min applicable payoff slack,
//   delta_ub_sigma = norm of the rank-one perturbation that makes Q singular,
//   delta_ub_alpha = norm of the row perturbation that zeroes the smallest
//                    support mass,
//   delta_empirical = smallest step along n_directions random unit-spectral-
//                     norm directions at which the support set actually
//                     changes (bisection to 1e-6 on (0, 2||A||]).
StabilityBounds stability_bounds(const Game& g, const Equilibrium& eq,
                                 const QSystem& qs, int n_directions,
                                 std::uint64_t seed);

// Flat name=value report (one field per line) and the matching flat JSON
// object. Field order is fixed; stability fields appear only when bounds
// are supplied, and non-finite bounds are omitted.
std::string report_text(const Diagnostics& diag,
                        const StabilityBounds* bounds = nullptr);
std::string report_json(const Diagnostics& diag,
                        const StabilityBounds* bounds = nullptr);

}  // namespace saddlebench
