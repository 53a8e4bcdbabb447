#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "saddlebench/errors.hpp"
#include "saddlebench/game.hpp"
#include "saddlebench/oracle.hpp"
#include "saddlebench/rng.hpp"

namespace sb = saddlebench;

namespace {

// Closed form for a fully mixed 2x2 equilibrium (row indifference). Only
// valid when all four margins share the sign of D; callers check that.
struct Mixed2x2 {
    bool interior = false;
    double x0 = 0, y0 = 0, v = 0;
};

Mixed2x2 mixed_2x2(const Eigen::MatrixXd& A) {
    const double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    const double D = a - b - c + d;
    Mixed2x2 out;
    if (D == 0.0) return out;
    const double x0 = (d - c) / D;
    const double y0 = (d - b) / D;
    if (x0 <= 0 || x0 >= 1 || y0 <= 0 || y0 >= 1) return out;
    out.interior = true;
    out.x0 = x0;
    out.y0 = y0;
    out.v = (a * d - b * c) / D;
    return out;
}

}  // namespace

TEST_CASE("exact solve on the diagonal fixture") {
    const sb::Game g = sb::make_illcond_game(0.25);
    const sb::Equilibrium eq = sb::solve_exact(g, 1e-9);
    // Interior equilibrium of diag(g, 2g, 1): masses proportional to the
    // inverse diagonal (4, 2, 1)/7, value 1/7.
    CHECK(eq.x_star[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(eq.x_star[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
    CHECK(eq.x_star[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(eq.y_star[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(eq.value == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(eq.support_x == std::vector<int>{0, 1, 2});
    CHECK(eq.support_y == std::vector<int>{0, 1, 2});
    CHECK(sb::duality_gap(g, {eq.x_star, eq.y_star}) < 1e-12);
}

TEST_CASE("exact solve on matching pennies") {
    const sb::Equilibrium eq = sb::solve_exact(sb::matching_pennies(), 1e-9);
    CHECK(eq.x_star[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eq.y_star[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eq.value == doctest::Approx(0.0));
}

TEST_CASE("exact solve finds pure saddle points") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.0, 2.0, 3.0;  // row 0 dominates, column 1 dominates
    const sb::Equilibrium eq = sb::solve_exact(sb::Game(A), 1e-9);
    CHECK(eq.value == doctest::Approx(1.0));
    CHECK(eq.support_x == std::vector<int>{0});
    CHECK(eq.support_y == std::vector<int>{1});
    CHECK(eq.x_star[0] == doctest::Approx(1.0));
    CHECK(eq.y_star[1] == doctest::Approx(1.0));
}

TEST_CASE("exact solve matches the 2x2 closed form") {
    sb::Rng rng(601);
    int checked = 0;
    while (checked < 100) {
        Eigen::MatrixXd A(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) A(i, j) = 2.0 * rng.uniform01() - 1.0;
        const Mixed2x2 want = mixed_2x2(A);
        if (!want.interior) continue;
        ++checked;
        const sb::Equilibrium eq = sb::solve_exact(sb::Game(A), 1e-9);
        CHECK(eq.x_star[0] == doctest::Approx(want.x0).epsilon(1e-10));
        CHECK(eq.y_star[0] == doctest::Approx(want.y0).epsilon(1e-10));
        CHECK(eq.value == doctest::Approx(want.v).epsilon(1e-10));
    }
}

TEST_CASE("exact solve output is an equilibrium on random games") {
    sb::Rng rng(602);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const int m = 2 + static_cast<int>(rng.below(4));
        Eigen::MatrixXd A(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) A(i, j) = 2.0 * rng.uniform01() - 1.0;
        const sb::Game g(A);
        const sb::Equilibrium eq = sb::solve_exact(g, 1e-9);
        CHECK(sb::duality_gap(g, {eq.x_star, eq.y_star}) < 1e-8);
        // Supports are consistent with the strategies.
        for (int i : eq.support_x) CHECK(eq.x_star[i] > 0.0);
        for (int j : eq.support_y) CHECK(eq.y_star[j] > 0.0);
    }
}

TEST_CASE("exact solve is bitwise idempotent") {
    const sb::Game g = sb::gaussian_perturb(Eigen::MatrixXd::Zero(4, 4), 0.5,
                                            12345);
    const sb::Equilibrium a = sb::solve_exact(g, 1e-9);
    const sb::Equilibrium b = sb::solve_exact(g, 1e-9);
    CHECK(a.x_star.values() == b.x_star.values());
    CHECK(a.y_star.values() == b.y_star.values());
    CHECK(a.value == b.value);
    CHECK(a.support_x == b.support_x);
}

TEST_CASE("exact solve validates size and tolerance") {
    CHECK_THROWS_AS(sb::solve_exact(sb::zero_game(21, 3), 1e-9),
                    sb::UnsupportedSizeError);
    CHECK_THROWS_AS(sb::solve_exact(sb::zero_game(3, 21), 1e-9),
                    sb::UnsupportedSizeError);
    const sb::Game g = sb::matching_pennies();
    CHECK_THROWS_AS(sb::solve_exact(g, 1e-13), std::invalid_argument);
    CHECK_THROWS_AS(sb::solve_exact(g, 1e-5), std::invalid_argument);
    CHECK_NOTHROW(sb::solve_exact(sb::zero_game(20, 20), 1e-9));
}

TEST_CASE("certificate accepts the interior fixture") {
    const sb::Game g = sb::make_illcond_game(0.25);
    const sb::Equilibrium eq = sb::solve_exact(g, 1e-9);
    const sb::NonDegeneracyCertificate cert =
        sb::certify_nondegenerate(g, eq, 1e-9);
    CHECK(cert.is_nondegenerate);
    CHECK(cert.tight_count_x == 3);
    CHECK(cert.tight_count_y == 3);
    CHECK(cert.unique);
    CHECK(cert.complementarity_ok);
}

TEST_CASE("certificate rejects the zero game") {
    const sb::Game g = sb::zero_game(2, 2);
    const sb::Equilibrium eq = sb::solve_exact(g, 1e-9);
    const sb::NonDegeneracyCertificate cert =
        sb::certify_nondegenerate(g, eq, 1e-9);
    CHECK_FALSE(cert.is_nondegenerate);
}

TEST_CASE("certificate rejects duplicated-row degeneracy") {
    // Two identical best rows: the equilibrium set is a segment.
    Eigen::MatrixXd A(3, 2);
    A << 0.5, -0.5, 0.5, -0.5, 1.0, 1.0;
    const sb::Game g(A);
    const sb::Equilibrium eq = sb::solve_exact(g, 1e-9);
    const sb::NonDegeneracyCertificate cert =
        sb::certify_nondegenerate(g, eq, 1e-9);
    CHECK_FALSE(cert.is_nondegenerate);
}

TEST_CASE("gaussian draws are almost always nondegenerate") {
    const Eigen::MatrixXd base = Eigen::MatrixXd::Zero(5, 5);
    int good = 0;
    for (int s = 0; s < 100; ++s) {
        const sb::Game g = sb::gaussian_perturb(base, 0.5, 70000 + s);
        try {
            const sb::Equilibrium eq = sb::solve_exact(g, 1e-9);
            if (sb::certify_nondegenerate(g, eq, 1e-9).is_nondegenerate) {
                ++good;
            }
        } catch (const sb::SolverFailureError&) {
        }
    }
    CHECK(good >= 99);
}
