#include "saddlebench/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "saddlebench/rng.hpp"
#include "saddlebench/textfmt.hpp"

namespace saddlebench {

namespace {

constexpr double kSumTol = 1e-12;

void check_matrix(const Eigen::MatrixXd& A, const char* what) {
    if (A.rows() < 1 || A.cols() < 1) {
        throw std::invalid_argument(std::string(what) + ": empty matrix");
    }
    if (!A.allFinite()) {
        throw std::invalid_argument(std::string(what) +
                                    ": non-finite entries");
    }
}

}  // namespace

Game::Game(Eigen::MatrixXd A, std::optional<Provenance> provenance)
    : A_(std::move(A)), provenance_(std::move(provenance)) {
    check_matrix(A_, "Game");
    if (provenance_) {
        const Provenance& p = *provenance_;
        if (p.A_bar.rows() != A_.rows() || p.A_bar.cols() != A_.cols()) {
            throw std::invalid_argument("Game: provenance shape mismatch");
        }
        check_matrix(p.A_bar, "Game provenance");
        if (p.A_bar.cwiseAbs().maxCoeff() > 1.0) {
            throw std::invalid_argument(
                "Game: provenance base entries must lie in [-1, 1]");
        }
        if (!(p.sigma > 0.0) || p.sigma > 1.0) {
            throw std::invalid_argument(
                "Game: provenance sigma must lie in (0, 1]");
        }
    }
}

SimplexVector::SimplexVector(Eigen::VectorXd v) : v_(std::move(v)) {
    if (v_.size() < 1) {
        throw std::invalid_argument("SimplexVector: empty vector");
    }
    if (!v_.allFinite()) {
        throw std::invalid_argument("SimplexVector: non-finite entries");
    }
    if (v_.minCoeff() < 0.0) {
        throw std::invalid_argument("SimplexVector: negative entry");
    }
    if (std::abs(v_.sum() - 1.0) > kSumTol) {
        throw std::invalid_argument("SimplexVector: components sum to " +
                                    fmt_g17(v_.sum()) + ", expected 1");
    }
}

SimplexVector SimplexVector::uniform(int dim) {
    if (dim < 1) throw std::invalid_argument("SimplexVector: dim < 1");
    Eigen::VectorXd v = Eigen::VectorXd::Constant(dim, 1.0 / dim);
    return SimplexVector::renormalized(std::move(v));
}

SimplexVector SimplexVector::renormalized(Eigen::VectorXd v) {
    if (v.size() < 1 || !v.allFinite() || v.minCoeff() < 0.0) {
        throw std::invalid_argument(
            "SimplexVector: renormalize needs finite nonnegative entries");
    }
    const double s = v.sum();
    if (std::abs(s - 1.0) > kSumTol) {
        if (s <= 0.0) {
            throw std::invalid_argument("SimplexVector: zero mass");
        }
        v /= s;
    }
    return SimplexVector(std::move(v));
}

Eigen::VectorXd JointStrategy::stacked() const {
    Eigen::VectorXd z(x.dim() + y.dim());
    z.head(x.dim()) = x.values();
    z.tail(y.dim()) = y.values();
    return z;
}

Eigen::VectorXd project_simplex_raw(const Eigen::VectorXd& v) {
    const Eigen::Index d = v.size();
    if (d < 1 || !v.allFinite()) {
        throw std::invalid_argument("project_simplex: bad input");
    }
    std::vector<double> u(v.data(), v.data() + d);
    std::sort(u.begin(), u.end(), std::greater<double>());
    // Largest prefix whose thresholded entries stay positive.
    double cumsum = 0.0;
    double tau = u[0] - 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        cumsum += u[k];
        const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[k] > t) tau = t;
    }
    Eigen::VectorXd out = (v.array() - tau).max(0.0);
    const double s = out.sum();
    if (std::abs(s - 1.0) > kSumTol) out /= s;
    return out;
}

SimplexVector project_simplex(const Eigen::VectorXd& v) {
    return SimplexVector::renormalized(project_simplex_raw(v));
}

double duality_gap_xy(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y) {
    return (A.transpose() * x).maxCoeff() - (A * y).minCoeff();
}

double duality_gap(const Game& g, const JointStrategy& z) {
    if (z.x.dim() != g.n() || z.y.dim() != g.m()) {
        throw std::invalid_argument("duality_gap: dimension mismatch");
    }
    return duality_gap_xy(g.A(), z.x.values(), z.y.values());
}

Eigen::VectorXd operator_F(const Game& g, const JointStrategy& z) {
    if (z.x.dim() != g.n() || z.y.dim() != g.m()) {
        throw std::invalid_argument("operator_F: dimension mismatch");
    }
    Eigen::VectorXd out(g.n() + g.m());
    out.head(g.n()) = g.A() * z.y.values();
    out.tail(g.m()) = -(g.A().transpose() * z.x.values());
    return out;
}

double spectral_norm(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

Game make_illcond_game(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("make_illcond_game: gamma must be in (0,1)");
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    A(0, 0) = gamma;
    A(1, 1) = 2.0 * gamma;
    A(2, 2) = 1.0;
    return Game(std::move(A));
}

Game matching_pennies() {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, -1.0, -1.0, 1.0;
    return Game(std::move(A));
}

Game identity_game(int d) {
    if (d < 1) throw std::invalid_argument("identity_game: d < 1");
    return Game(Eigen::MatrixXd::Identity(d, d));
}

Game zero_game(int n, int m) {
    if (n < 1 || m < 1) throw std::invalid_argument("zero_game: bad shape");
    return Game(Eigen::MatrixXd::Zero(n, m));
}

Game gaussian_perturb(const Eigen::MatrixXd& A_bar, double sigma,
                      std::uint64_t seed) {
    check_matrix(A_bar, "gaussian_perturb");
    if (A_bar.cwiseAbs().maxCoeff() > 1.0) {
        throw std::invalid_argument(
            "gaussian_perturb: base entries must lie in [-1, 1]");
    }
    if (!(sigma > 0.0) || sigma > 1.0) {
        throw std::invalid_argument("gaussian_perturb: sigma must be in (0, 1]");
    }
    Rng rng(seed);
    Eigen::MatrixXd A = A_bar;
    // Row-major fill order is part of the determinism contract.
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            A(i, j) += sigma * rng.gaussian();
        }
    }
    Provenance prov{A_bar, sigma, seed};
    return Game(std::move(A), std::move(prov));
}

namespace {

void append_matrix_json(std::string& out, const Eigen::MatrixXd& M) {
    out += '[';
    bool first = true;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (!first) out += ',';
            first = false;
            out += fmt_g17(M(i, j));
        }
    }
    out += ']';
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& arr, int n, int m,
                                 const char* field) {
    if (!arr.is_array() ||
        arr.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m)) {
        throw std::invalid_argument(std::string("game json: field '") + field +
                                    "' must be a flat array of n*m numbers");
    }
    Eigen::MatrixXd M(n, m);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const nlohmann::json& v = arr[k++];
            if (!v.is_number()) {
                throw std::invalid_argument(std::string("game json: field '") +
                                            field + "' has a non-number");
            }
            M(i, j) = v.get<double>();
        }
    }
    return M;
}

}  // namespace

std::string game_to_json(const Game& g) {
    std::string out = "{\"n\":" + std::to_string(g.n()) +
                      ",\"m\":" + std::to_string(g.m()) + ",\"A\":";
    append_matrix_json(out, g.A());
    if (g.provenance()) {
        const Provenance& p = *g.provenance();
        out += ",\"provenance\":{\"A_bar\":";
        append_matrix_json(out, p.A_bar);
        out += ",\"sigma\":" + fmt_g17(p.sigma) +
               ",\"seed\":" + std::to_string(p.seed) + "}";
    }
    out += "}\n";
    return out;
}

Game game_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("game json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("m") ||
        !j.contains("A")) {
        throw std::invalid_argument("game json: need fields n, m, A");
    }
    if (!j["n"].is_number_integer() || !j["m"].is_number_integer()) {
        throw std::invalid_argument("game json: n and m must be integers");
    }
    const int n = j["n"].get<int>();
    const int m = j["m"].get<int>();
    if (n < 1 || m < 1) {
        throw std::invalid_argument("game json: n and m must be positive");
    }
    Eigen::MatrixXd A = matrix_from_json(j["A"], n, m, "A");
    std::optional<Provenance> prov;
    if (j.contains("provenance") && !j["provenance"].is_null()) {
        const nlohmann::json& p = j["provenance"];
        if (!p.is_object() || !p.contains("A_bar") || !p.contains("sigma") ||
            !p.contains("seed")) {
            throw std::invalid_argument(
                "game json: provenance needs A_bar, sigma, seed");
        }
        Provenance pr;
        pr.A_bar = matrix_from_json(p["A_bar"], n, m, "A_bar");
        pr.sigma = p["sigma"].get<double>();
        pr.seed = p["seed"].get<std::uint64_t>();
        prov = std::move(pr);
    }
    return Game(std::move(A), std::move(prov));
}

Game load_game(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open game file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return game_from_json(ss.str());
}

void save_game(const Game& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::invalid_argument("cannot write game file: " + path);
    }
    out << game_to_json(g);
}

}  // namespace saddlebench
