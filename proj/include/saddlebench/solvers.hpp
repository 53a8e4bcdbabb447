#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "saddlebench/game.hpp"
#include "saddlebench/oracle.hpp"

namespace saddlebench {

enum class Algorithm { OGDA, OMWU, EGDA, ITERSMOOTH };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct SolverConfig {
    Algorithm algorithm = Algorithm::OGDA;
    // Step size; <= 0 selects the per-algorithm default
    // (1/(8||A||) for OGDA/EGDA, 1/(16 max|A|) for OMWU; unused by
    // ITERSMOOTH, which derives its inner step from the stage accuracy).
    double eta = 0.0;
    double eps = 1e-6;             // target duality gap, > 0
    std::int64_t max_iters = 1000000;
    double rho = 2.0;              // ITERSMOOTH stage shrink factor, > 1
    std::int64_t record_every = 1;
    // OGDA rejects eta > 1/(8||A||) unless this is set; the run then
    // proceeds but convergence is no longer guaranteed.
    bool allow_large_eta = false;
};

struct SolveResult {
    JointStrategy z_final;
    std::int64_t iters_used = 0;
    double phi_final = 0.0;
    std::vector<TrajectoryRecord> trajectory;  // strictly increasing iter
    bool converged = false;  // implies phi_final <= eps
};

// All solvers evaluate Phi before the first step and stop at iteration 0
// when the start already meets eps. Iterates are recorded every
// record_every iterations plus always the final one; dist_to_eq is filled
// when eq is non-null.

SolveResult run_ogda(const Game& g, const SolverConfig& cfg,
                     const JointStrategy& z0, const Equilibrium* eq = nullptr);

SolveResult run_egda(const Game& g, const SolverConfig& cfg,
                     const JointStrategy& z0, const Equilibrium* eq = nullptr);

// Starts from the uniform pair (the classical multiplicative-weights
// initialization); z0 is not a parameter. Throws StepSizeError when the
// log-weights overflow.
SolveResult run_omwu(const Game& g, const SolverConfig& cfg,
                     const Equilibrium* eq = nullptr);

// Stagewise smoothing: each stage halves (by rho) the target accuracy and
// runs an accelerated pass on the smoothed gap, warm-started at the
// previous stage's iterate. iters_used and trajectory count inner steps
// cumulatively; max_iters caps that global count. A stage that exhausts
// its own cap 4*ceil(2*||A||*D/eps_stage) + 16 yields converged == false.
SolveResult run_itersmooth(const Game& g, const SolverConfig& cfg,
                           const JointStrategy& z0,
                           const Equilibrium* eq = nullptr);

// Dispatch on cfg.algorithm. z0 is ignored by OMWU (fixed uniform start).
SolveResult run_solver(const Game& g, const SolverConfig& cfg,
                       const JointStrategy& z0, const Equilibrium* eq = nullptr);

// One smoothing stage: accelerated steps on the smoothed gap until
// Phi < eps_target or cap steps have run. Exposed for testing the stage
// contract in isolation.
struct SmoothingPass {
    JointStrategy z;
    bool reached_target = false;
    std::int64_t iters = 0;
};
SmoothingPass run_smoothing_pass(const Game& g, const JointStrategy& z0,
                                 double eps_target, std::int64_t cap);

// Fixed-point-residual bound: Phi(z) <= (2/eta) * ||z - P(z - eta F(z))||
// for any eta <= 1/||A||. Cheap certificate usable at every iterate.
double residual_gap_bound(const Game& g, const JointStrategy& z, double eta);

// Worst-case iteration count for the OGDA linear rate:
//   2 * ceil( log(8 D / eps) / log(1 + kappa_prime^2 / (324 ||A||^2)) )
// with D = 2 the diameter of the strategy product.
std::int64_t iteration_bound(double kappa_prime, double norm_A, double eps);

// Per-algorithm default step size (see SolverConfig::eta).
double default_eta(Algorithm a, const Game& g);

// Header "iter,phi,dist_to_eq"; 17 significant digits; empty dist cell when
// no oracle was supplied.
void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryRecord>& records);

}  // namespace saddlebench
