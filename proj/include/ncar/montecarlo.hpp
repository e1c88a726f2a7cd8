#ifndef NCAR_MONTECARLO_HPP
#define NCAR_MONTECARLO_HPP

#include "ncar/estimate.hpp"

namespace ncar {

enum class StatisticKind { MeanCltU, MeanCltY, HClt, LseClt, CorrectedClt };

std::string to_string(StatisticKind s);

struct ExperimentConfig {
    ModelSpec spec;
    int n = 5000;
    int replications = 2000;
    std::uint64_t base_seed = 0;
    StatisticKind statistic = StatisticKind::MeanCltY;
    HSpec h;                    // HClt only
    double tol_cov_rel = 0.10;
    double sim_tol = 1e-12;
    int workers = 1;
};

struct MonteCarloReport {
    Matrix samples;             // R x m
    Vector empirical_mean;
    Matrix empirical_cov;
    Matrix target_cov;
    double cov_rel_err = 0.0;   // relative Frobenius distance
    double mahalanobis_ks = 0.0;
    Vector marginal_ks;
    double ks_threshold = 0.0;  // 1.63/sqrt(R), asymptotic 1% critical value
    int failed_replications = 0;
    bool pass = false;
};

/// ||empirical - target||_F / max(||target||_F, 1e-300).
double covariance_distance(const Matrix& empirical, const Matrix& target);

/// KS distance of squared Mahalanobis radii against chi-square(rank) plus
/// per-coordinate KS against the standardized normal. Rank-deficient
/// targets are handled on their column space (eigenvalue threshold
/// 1e-10 * max eigenvalue).
struct NormalityDiagnostics {
    double mahalanobis_ks = 0.0;
    Vector marginal_ks;
    int rank = 0;
};
NormalityDiagnostics normality_diagnostics(const Matrix& samples, const Matrix& target_cov);

/// Runs R independent replications of the chosen statistic and assembles
/// covariance and normality diagnostics against the analytic target.
/// Deterministic for a fixed config, independent of `workers`.
MonteCarloReport run_experiment(const ExperimentConfig& config);

std::string report_summary_json(const ExperimentConfig& config, const MonteCarloReport& rep);
std::string report_samples_csv(const MonteCarloReport& rep);
std::string report_summary_csv(const MonteCarloReport& rep);

}  // namespace ncar

#endif
