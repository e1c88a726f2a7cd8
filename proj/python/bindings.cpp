// Python bindings for the core operations.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncar/montecarlo.hpp"

namespace py = pybind11;
using namespace ncar;

namespace {

ModelSpec make_spec(const Vector& theta, double sigma2, const std::string& family, double nu) {
    ModelSpec spec;
    spec.theta = theta;
    spec.noise.sigma2 = sigma2;
    spec.noise.nu = nu;
    if (family == "gaussian")
        spec.noise.family = NoiseFamily::Gaussian;
    else if (family == "rademacher")
        spec.noise.family = NoiseFamily::Rademacher;
    else if (family == "uniform")
        spec.noise.family = NoiseFamily::UniformCentered;
    else if (family == "student_t")
        spec.noise.family = NoiseFamily::StudentT;
    else
        throw BadSpec("unknown noise family: " + family);
    spec.validate();
    return spec;
}

}  // namespace

PYBIND11_MODULE(_ncar, m) {
    m.doc() = "stationary solutions of purely explosive autoregressions";

    py::register_exception<Error>(m, "NcarError");

    m.def(
        "classify",
        [](const Vector& theta) {
            ModelSpec spec;
            spec.theta = theta;
            SpectralReport rep;
            if (theta(theta.size() - 1) == 0.0) {
                Matrix b = Matrix::Zero(theta.size(), theta.size());
                b.row(0) = theta.transpose();
                if (theta.size() > 1)
                    b.block(1, 0, theta.size() - 1, theta.size() - 1).setIdentity();
                rep = spectral_info(b);
            } else {
                rep = build_companion(spec).spectral;
            }
            py::dict out;
            out["rho"] = rep.rho;
            out["rho_lower"] = rep.rho_lower;
            out["region"] = to_string(rep.region);
            out["boundary"] = rep.boundary;
            out["eigenvalues"] = rep.eigenvalues;
            return out;
        },
        py::arg("theta"));

    m.def(
        "companion",
        [](const Vector& theta) {
            ModelSpec spec;
            spec.theta = theta;
            CompanionPair cp = build_companion(spec);
            return py::make_tuple(cp.b, cp.b_inv);
        },
        py::arg("theta"), "returns (B, B inverse)");

    m.def(
        "phi",
        [](const Vector& theta) {
            PhiResult r = phi_map(theta);
            return py::make_tuple(r.value, r.extended);
        },
        py::arg("theta"), "coefficient involution; second element marks the zero extension");

    m.def(
        "moments",
        [](const Vector& theta, double sigma2) {
            ModelSpec spec = make_spec(theta, sigma2, "gaussian", 5.0);
            CovarianceStructure cov = covariance_structure(spec);
            py::dict out;
            out["sigma"] = cov.sigma_mat;
            out["gamma_mat"] = cov.gamma_mat;
            out["gamma"] = cov.gamma;
            out["theta_star"] = cov.theta_star;
            out["min_eig_sigma"] = cov.min_eig_sigma;
            return out;
        },
        py::arg("theta"), py::arg("sigma2") = 1.0);

    m.def(
        "simulate",
        [](const Vector& theta, int n, std::uint64_t seed, double sigma2,
           const std::string& family, double nu, double tol) {
            ModelSpec spec = make_spec(theta, sigma2, family, nu);
            SimulationPath p = simulate_stationary(spec, n, seed, tol);
            Vector y = Eigen::Map<const Vector>(p.y.data(), static_cast<long>(p.y.size()));
            Vector z = Eigen::Map<const Vector>(p.noise.values.data(),
                                                static_cast<long>(p.noise.values.size()));
            py::dict out;
            out["y"] = y;  // Y_{-d+1} .. Y_n
            out["z"] = z;  // Z_1 .. Z_n
            out["truncation_k"] = p.truncation_k;
            out["truncation_bound"] = p.truncation_bound;
            return out;
        },
        py::arg("theta"), py::arg("n"), py::arg("seed"), py::arg("sigma2") = 1.0,
        py::arg("family") = "gaussian", py::arg("nu") = 5.0, py::arg("tol") = 1e-12);

    m.def(
        "estimate",
        [](const Vector& theta, int n, std::uint64_t seed, double sigma2, double tol) {
            ModelSpec spec = make_spec(theta, sigma2, "gaussian", 5.0);
            SimulationPath p = simulate_stationary(spec, n, seed, tol);
            EstimationResult r = lse(p);
            py::dict out;
            out["theta_hat"] = r.theta_hat;
            out["theta_corrected"] = r.theta_corrected;
            out["corrected_extended"] = r.corrected_extended;
            out["n"] = r.n;
            out["gram_singular"] = r.gram_singular;
            return out;
        },
        py::arg("theta"), py::arg("n"), py::arg("seed"), py::arg("sigma2") = 1.0,
        py::arg("tol") = 1e-12, "simulate a stationary path and run least squares on it");

    m.def(
        "forward_equiv",
        [](const Vector& theta_stable, int n, std::uint64_t seed, double sigma2, double tol) {
            NoiseSpec noise;
            noise.sigma2 = sigma2;
            EquivalenceReport rep =
                forward_backward_equivalence(theta_stable, noise, n, seed, tol);
            return py::make_tuple(rep.max_discrepancy, rep.combined_bound);
        },
        py::arg("theta"), py::arg("n"), py::arg("seed"), py::arg("sigma2") = 1.0,
        py::arg("tol") = 1e-12);

    m.def(
        "mc",
        [](const Vector& theta, const std::string& statistic, int n, int replications,
           std::uint64_t seed, double sigma2, int workers) {
            ExperimentConfig cfg;
            cfg.spec = make_spec(theta, sigma2, "gaussian", 5.0);
            cfg.n = n;
            cfg.replications = replications;
            cfg.base_seed = seed;
            cfg.workers = workers;
            if (statistic == "mean_clt_u")
                cfg.statistic = StatisticKind::MeanCltU;
            else if (statistic == "mean_clt_y")
                cfg.statistic = StatisticKind::MeanCltY;
            else if (statistic == "h_clt")
                cfg.statistic = StatisticKind::HClt;
            else if (statistic == "lse_clt")
                cfg.statistic = StatisticKind::LseClt;
            else if (statistic == "corrected_clt")
                cfg.statistic = StatisticKind::CorrectedClt;
            else
                throw BadSpec("unknown statistic: " + statistic);
            MonteCarloReport rep = run_experiment(cfg);
            py::dict out;
            out["empirical_cov"] = rep.empirical_cov;
            out["target_cov"] = rep.target_cov;
            out["cov_rel_err"] = rep.cov_rel_err;
            out["mahalanobis_ks"] = rep.mahalanobis_ks;
            out["ks_threshold"] = rep.ks_threshold;
            out["failed_replications"] = rep.failed_replications;
            out["pass"] = rep.pass;
            return out;
        },
        py::arg("theta"), py::arg("statistic"), py::arg("n"), py::arg("replications"),
        py::arg("seed"), py::arg("sigma2") = 1.0, py::arg("workers") = 1);
}
