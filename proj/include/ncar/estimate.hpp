#ifndef NCAR_ESTIMATE_HPP
#define NCAR_ESTIMATE_HPP

#include <functional>
#include <optional>

#include "ncar/moments.hpp"
#include "ncar/simulate.hpp"

namespace ncar {

struct EstimationResult {
    Vector theta_hat;
    Vector theta_corrected;   // phi(theta_hat), zero-extended off Theta
    bool corrected_extended = false;
    int n = 0;
    bool gram_singular = false;
    double gram_min_eig = 0.0;
    // Filled only when the caller supplies the true (theta, theta*).
    std::optional<Vector> normalized_dev_star;   // sqrt(n)(theta_hat - theta*)
    std::optional<Vector> normalized_dev_theta;  // sqrt(n)(phi(theta_hat) - theta)
};

/// Built-in family of h maps for the weighted CLT statistic.
struct HSpec {
    enum class Kind { Identity, Projection, Linear, ProofMap, TanhCoords, Constant };
    Kind kind = Kind::Identity;
    int coordinate = 1;      // Projection: 1..d
    Matrix linear;           // Linear: m x d
    double theta_d = 1.0;    // ProofMap: x -> -(1/theta_d)(x_d, ..., x_1)^T

    int output_dim(int d) const;
    Vector apply(const Vector& u) const;
    bool is_linear() const;
    /// The m x d matrix M with h(x) = Mx, valid for linear kinds.
    Matrix as_matrix(int d) const;
};

/// Least squares estimate over the pairs (U_{k-1}, Y_k), k = 1..n, with the
/// zero convention when the Gram matrix is numerically singular
/// (min eigenvalue <= 1e-12 * trace / d). Targets, when given, populate the
/// normalized deviation fields.
EstimationResult lse(const SimulationPath& path,
                     std::optional<Vector> theta_true = std::nullopt,
                     std::optional<Vector> theta_star_true = std::nullopt);

/// n^{-1/2} sum_{k=1}^n h(U_k) Z_k using the path's exposed noise.
Vector h_weighted_statistic(const SimulationPath& path, const HSpec& h);

/// Target covariance sigma^2 E(h(U_1) h(U_1)^T): analytic sigma^2 M Gamma M^T
/// when h is linear, plug-in Monte Carlo over the stationary law otherwise.
struct HTargetCov {
    Matrix cov;
    double mc_standard_error = 0.0;  // 0 for the analytic route
};
HTargetCov target_cov_h(const ModelSpec& spec, const HSpec& h,
                        int mc_draws = 1'000'000, std::uint64_t mc_seed = 20260826);

/// (1/n) sum Y_j Y_{j+k} over valid indices, no mean subtraction.
double sample_autocovariance(const SimulationPath& path, int k);

/// One-row CSV export (flattened) of an estimation result.
std::string estimation_result_csv(const EstimationResult& r);
std::string estimation_result_json(const EstimationResult& r);

}  // namespace ncar

#endif
