#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

#include "saddlebench/errors.hpp"

namespace saddlebench {

// Provenance of a perturbed instance: A = A_bar + sigma * G with G standard
// normal entries drawn from the given seed.
struct Provenance {
    Eigen::MatrixXd A_bar;  // entries in [-1, 1]
    double sigma = 0.0;     // in (0, 1]
    std::uint64_t seed = 0;
};

// Two-player zero-sum game. The row player picks x and minimizes x^T A y,
// the column player picks y and maximizes it.
class Game {
public:
    explicit Game(Eigen::MatrixXd A,
                  std::optional<Provenance> provenance = std::nullopt);

    int n() const { return static_cast<int>(A_.rows()); }
    int m() const { return static_cast<int>(A_.cols()); }
    const Eigen::MatrixXd& A() const { return A_; }
    const std::optional<Provenance>& provenance() const { return provenance_; }

private:
    Eigen::MatrixXd A_;
    std::optional<Provenance> provenance_;
};

// Point on the probability simplex. Construction rejects negative entries
// and component sums farther than 1e-12 from 1.
class SimplexVector {
public:
    explicit SimplexVector(Eigen::VectorXd v);

    static SimplexVector uniform(int dim);

    // Divides by the component sum first when the drift exceeds 1e-12.
    // Entries must already be nonnegative.
    static SimplexVector renormalized(Eigen::VectorXd v);

    int dim() const { return static_cast<int>(v_.size()); }
    const Eigen::VectorXd& values() const { return v_; }
    double operator[](int i) const { return v_[i]; }

private:
    SimplexVector() = default;
    Eigen::VectorXd v_;
};

struct JointStrategy {
    SimplexVector x;
    SimplexVector y;

    // (x, y) stacked into one vector of length n + m.
    Eigen::VectorXd stacked() const;
};

struct TrajectoryRecord {
    std::int64_t iter = 0;
    double phi = 0.0;
    std::optional<double> dist_to_eq;
};

// Euclidean projection onto the simplex (sorted-prefix threshold rule).
SimplexVector project_simplex(const Eigen::VectorXd& v);

// Duality gap Phi(x, y) = max_j (A^T x)_j - min_i (A y)_i. Nonnegative on
// the product of simplices, zero exactly at equilibria.
double duality_gap(const Game& g, const JointStrategy& z);

// Saddle operator F(x, y) = (A y, -A^T x) stacked into length n + m.
Eigen::VectorXd operator_F(const Game& g, const JointStrategy& z);

// Largest singular value, computed to full relative accuracy.
double spectral_norm(const Eigen::MatrixXd& M);

// diag(gamma, 2*gamma, 1) for gamma in (0, 1); conditioning degrades as
// gamma -> 0 while the equilibrium stays strictly interior.
Game make_illcond_game(double gamma);

Game matching_pennies();
Game identity_game(int d);
Game zero_game(int n, int m);

// A_bar + sigma * G with iid standard normal G; bit-for-bit deterministic
// in (A_bar, sigma, seed). Requires |A_bar| entries <= 1 and sigma in (0,1].
Game gaussian_perturb(const Eigen::MatrixXd& A_bar, double sigma,
                      std::uint64_t seed);

// Low-level variants used by solver loops; x and y must already lie on
// their simplices (no validation, no wrapper types).
double duality_gap_xy(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y);
Eigen::VectorXd project_simplex_raw(const Eigen::VectorXd& v);

// JSON persistence. Numbers carry 17 significant digits; writing then
// reading reproduces matrices bit-for-bit.
std::string game_to_json(const Game& g);
Game game_from_json(const std::string& text);
Game load_game(const std::string& path);
void save_game(const Game& g, const std::string& path);

}  // namespace saddlebench
