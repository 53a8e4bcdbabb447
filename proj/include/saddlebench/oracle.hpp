#pragma once

#include <vector>

#include "saddlebench/game.hpp"

namespace saddlebench {

// Entries below this are treated as off-support everywhere in the toolkit.
inline constexpr double kSupportTol = 1e-9;

struct Equilibrium {
    SimplexVector x_star;
    SimplexVector y_star;
    double value = 0.0;
    std::vector<int> support_x;  // B = { i : x*_i > kSupportTol }, sorted
    std::vector<int> support_y;  // N = { j : y*_j > kSupportTol }, sorted
};

struct NonDegeneracyCertificate {
    bool is_nondegenerate = false;
    int tight_count_x = 0;  // active constraints at x*: zeros of x* plus
                            // columns j with (A^T x*)_j = v
    int tight_count_y = 0;  // zeros of y* plus rows i with (A y*)_i = v
    bool unique = false;
    bool complementarity_ok = false;  // |B| == |N|
};

// Exact equilibrium by support enumeration (supports ordered by size, then
// lexicographically; first feasible optimal candidate wins, so the result
// is a deterministic function of A). Requires n, m <= 20 and
// tol in [1e-12, 1e-6]. Throws UnsupportedSizeError / SolverFailureError.
Equilibrium solve_exact(const Game& g, double tol);

// Counts active constraints at (x*, y*) and checks uniqueness through the
// square reduced system. Degenerate input yields is_nondegenerate == false,
// never an error.
NonDegeneracyCertificate certify_nondegenerate(const Game& g,
                                               const Equilibrium& eq,
                                               double tol);

}  // namespace saddlebench
