#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "saddlebench/error_bound.hpp"
#include "saddlebench/game.hpp"
#include "saddlebench/oracle.hpp"
#include "saddlebench/solvers.hpp"

namespace py = pybind11;
namespace sb = saddlebench;

PYBIND11_MODULE(saddlebench, m) {
    m.doc() = "zero-sum matrix game solvers and conditioning diagnostics";

    py::class_<sb::Provenance>(m, "Provenance")
        .def(py::init<>())
        .def_readwrite("A_bar", &sb::Provenance::A_bar)
        .def_readwrite("sigma", &sb::Provenance::sigma)
        .def_readwrite("seed", &sb::Provenance::seed);

    py::class_<sb::Game>(m, "Game")
        .def(py::init<Eigen::MatrixXd, std::optional<sb::Provenance>>(),
             py::arg("A"), py::arg("provenance") = std::nullopt)
        .def_property_readonly("n", &sb::Game::n)
        .def_property_readonly("m", &sb::Game::m)
        .def_property_readonly("A", &sb::Game::A);

    py::class_<sb::SimplexVector>(m, "SimplexVector")
        .def(py::init<Eigen::VectorXd>(), py::arg("v"))
        .def_static("uniform", &sb::SimplexVector::uniform, py::arg("dim"))
        .def_property_readonly("dim", &sb::SimplexVector::dim)
        .def_property_readonly("values", &sb::SimplexVector::values)
        .def("__getitem__",
             [](const sb::SimplexVector& v, int i) {
                 if (i < 0 || i >= v.dim()) throw py::index_error();
                 return v[i];
             });

    py::class_<sb::JointStrategy>(m, "JointStrategy")
        .def(py::init<sb::SimplexVector, sb::SimplexVector>(), py::arg("x"),
             py::arg("y"))
        .def_readwrite("x", &sb::JointStrategy::x)
        .def_readwrite("y", &sb::JointStrategy::y)
        .def("stacked", &sb::JointStrategy::stacked);

    py::class_<sb::TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("iter", &sb::TrajectoryRecord::iter)
        .def_readonly("phi", &sb::TrajectoryRecord::phi)
        .def_readonly("dist_to_eq", &sb::TrajectoryRecord::dist_to_eq);

    m.def("make_illcond_game", &sb::make_illcond_game, py::arg("gamma"));
    m.def("matching_pennies", &sb::matching_pennies);
    m.def("identity_game", &sb::identity_game, py::arg("d"));
    m.def("zero_game", &sb::zero_game, py::arg("n"), py::arg("m"));
    m.def("gaussian_perturb", &sb::gaussian_perturb, py::arg("A_bar"),
          py::arg("sigma"), py::arg("seed"));
    m.def("project_simplex", &sb::project_simplex, py::arg("v"));
    m.def("duality_gap", &sb::duality_gap, py::arg("game"), py::arg("z"));
    m.def("operator_F", &sb::operator_F, py::arg("game"), py::arg("z"));
    m.def("spectral_norm", &sb::spectral_norm, py::arg("M"));
    m.def("game_to_json", &sb::game_to_json, py::arg("game"));
    m.def("game_from_json", &sb::game_from_json, py::arg("text"));

    py::class_<sb::Equilibrium>(m, "Equilibrium")
        .def_readonly("x_star", &sb::Equilibrium::x_star)
        .def_readonly("y_star", &sb::Equilibrium::y_star)
        .def_readonly("value", &sb::Equilibrium::value)
        .def_readonly("support_x", &sb::Equilibrium::support_x)
        .def_readonly("support_y", &sb::Equilibrium::support_y);

    py::class_<sb::NonDegeneracyCertificate>(m, "NonDegeneracyCertificate")
        .def_readonly("is_nondegenerate",
                      &sb::NonDegeneracyCertificate::is_nondegenerate)
        .def_readonly("tight_count_x",
                      &sb::NonDegeneracyCertificate::tight_count_x)
        .def_readonly("tight_count_y",
                      &sb::NonDegeneracyCertificate::tight_count_y)
        .def_readonly("unique", &sb::NonDegeneracyCertificate::unique)
        .def_readonly("complementarity_ok",
                      &sb::NonDegeneracyCertificate::complementarity_ok);

    m.def("solve_exact", &sb::solve_exact, py::arg("game"),
          py::arg("tol") = 1e-9);
    m.def("certify_nondegenerate", &sb::certify_nondegenerate, py::arg("game"),
          py::arg("eq"), py::arg("tol") = 1e-9);

    py::class_<sb::QSystem>(m, "QSystem")
        .def_readonly("Q", &sb::QSystem::Q)
        .def_readonly("b", &sb::QSystem::b)
        .def_readonly("c", &sb::QSystem::c)
        .def_readonly("d", &sb::QSystem::d)
        .def_readonly("elim_i", &sb::QSystem::elim_i)
        .def_readonly("elim_j", &sb::QSystem::elim_j)
        .def_readonly("B_tilde", &sb::QSystem::B_tilde)
        .def_readonly("N_tilde", &sb::QSystem::N_tilde)
        .def_readonly("empty_reduction", &sb::QSystem::empty_reduction);

    m.def("q_transform", &sb::q_transform, py::arg("game"), py::arg("eq"));
    m.def("build_T", &sb::build_T, py::arg("B"), py::arg("N"),
          py::arg("elim_i"), py::arg("elim_j"));

    py::class_<sb::Diagnostics>(m, "Diagnostics")
        .def_readonly("alpha_P", &sb::Diagnostics::alpha_P)
        .def_readonly("alpha_D", &sb::Diagnostics::alpha_D)
        .def_readonly("beta_P", &sb::Diagnostics::beta_P)
        .def_readonly("beta_D", &sb::Diagnostics::beta_D)
        .def_readonly("gamma_P", &sb::Diagnostics::gamma_P)
        .def_readonly("gamma_D", &sb::Diagnostics::gamma_D)
        .def_readonly("sigma_min_Qbar", &sb::Diagnostics::sigma_min_Qbar)
        .def_readonly("kappa_core", &sb::Diagnostics::kappa_core)
        .def_readonly("kappa_empirical", &sb::Diagnostics::kappa_empirical)
        .def_readonly("a_flat_inf", &sb::Diagnostics::a_flat_inf);

    m.def("compute_diagnostics", &sb::compute_diagnostics, py::arg("game"),
          py::arg("eq"), py::arg("n_samples") = 100, py::arg("seed") = 0);

    py::class_<sb::StabilityBounds>(m, "StabilityBounds")
        .def_readonly("delta_ub_beta", &sb::StabilityBounds::delta_ub_beta)
        .def_readonly("delta_ub_sigma", &sb::StabilityBounds::delta_ub_sigma)
        .def_readonly("delta_ub_alpha", &sb::StabilityBounds::delta_ub_alpha)
        .def_readonly("delta_empirical", &sb::StabilityBounds::delta_empirical);

    m.def("stability_bounds", &sb::stability_bounds, py::arg("game"),
          py::arg("eq"), py::arg("qs"), py::arg("n_directions") = 20,
          py::arg("seed") = 0);
    m.def(
        "report_json",
        [](const sb::Diagnostics& d,
           std::optional<sb::StabilityBounds> bounds) {
            return sb::report_json(d, bounds ? &*bounds : nullptr);
        },
        py::arg("diagnostics"), py::arg("bounds") = std::nullopt);

    py::enum_<sb::Algorithm>(m, "Algorithm")
        .value("OGDA", sb::Algorithm::OGDA)
        .value("OMWU", sb::Algorithm::OMWU)
        .value("EGDA", sb::Algorithm::EGDA)
        .value("ITERSMOOTH", sb::Algorithm::ITERSMOOTH);

    py::class_<sb::SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("algorithm", &sb::SolverConfig::algorithm)
        .def_readwrite("eta", &sb::SolverConfig::eta)
        .def_readwrite("eps", &sb::SolverConfig::eps)
        .def_readwrite("max_iters", &sb::SolverConfig::max_iters)
        .def_readwrite("rho", &sb::SolverConfig::rho)
        .def_readwrite("record_every", &sb::SolverConfig::record_every)
        .def_readwrite("allow_large_eta", &sb::SolverConfig::allow_large_eta);

    py::class_<sb::SolveResult>(m, "SolveResult")
        .def_readonly("z_final", &sb::SolveResult::z_final)
        .def_readonly("iters_used", &sb::SolveResult::iters_used)
        .def_readonly("phi_final", &sb::SolveResult::phi_final)
        .def_readonly("trajectory", &sb::SolveResult::trajectory)
        .def_readonly("converged", &sb::SolveResult::converged);

    m.def(
        "run_solver",
        [](const sb::Game& g, const sb::SolverConfig& cfg,
           std::optional<sb::JointStrategy> z0,
           std::optional<sb::Equilibrium> eq) {
            const sb::JointStrategy start =
                z0 ? *z0
                   : sb::JointStrategy{sb::SimplexVector::uniform(g.n()),
                                       sb::SimplexVector::uniform(g.m())};
            return sb::run_solver(g, cfg, start, eq ? &*eq : nullptr);
        },
        py::arg("game"), py::arg("config"), py::arg("z0") = std::nullopt,
        py::arg("eq") = std::nullopt);
    m.def("default_eta", &sb::default_eta, py::arg("algorithm"),
          py::arg("game"));
    m.def("iteration_bound", &sb::iteration_bound, py::arg("kappa_prime"),
          py::arg("norm_A"), py::arg("eps"));
}
