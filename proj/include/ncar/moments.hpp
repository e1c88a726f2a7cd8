#ifndef NCAR_MOMENTS_HPP
#define NCAR_MOMENTS_HPP

#include "ncar/companion.hpp"

namespace ncar {

/// Exact second-order quantities of the stationary solution.
struct CovarianceStructure {
    Matrix sigma_mat;          // Sigma
    Matrix gamma_mat;          // Gamma = sigma^2 Sigma
    std::vector<double> gamma; // gamma(0..d)
    Vector theta_star;         // phi(theta)
    double min_eig_sigma = 0.0;
};

struct ResidualReport {
    double yule_walker = 0.0;       // ||Gamma theta* - (gamma(1..d))||, scale-relative
    double gamma_identity = 0.0;    // ||(theta*-theta) + (sigma^2/theta_d) Gamma^{-1} e_d||
    double sigma_identity = 0.0;    // ||(theta*-theta) + (1/theta_d) Sigma^{-1} e_d||
};

struct PdCertificate {
    double min_eig = 0.0;     // of sum_{j=1}^d B^{-j} e_1 e_1^T B^{-jT}
    double det_stack = 0.0;   // det of stacked first columns (B^{-d})..(B^{-1})
};

/// Sigma = sum_{j>=1} B^{-j} e_1 e_1^T (B^{-j})^T by partial sums, stopped
/// once the next term is below tol*(1-q) relative to the accumulated sum
/// in Frobenius norm (so tol reads as a relative tolerance).
Matrix sigma_series(const CompanionPair& pair, double tol,
                    int cap = 1'000'000);

/// Sigma from the vectorized Stein fixed point
/// (I - B^{-1} (x) B^{-1}) vec(Sigma) = vec(B^{-1} e_1 e_1^T B^{-1T}).
Matrix sigma_fixed_point(const CompanionPair& pair);

/// Full second-order structure: Gamma, gamma(0..d), theta*, with the k=0
/// identity gamma(0) = sum_j theta_j gamma(j) validated to 1e-9 relative.
CovarianceStructure covariance_structure(const ModelSpec& spec);

/// Residual norms of the Yule-Walker and theta*-theta identities,
/// scale-relative; all must be <= 1e-9 for a healthy structure.
ResidualReport theta_star_residuals(const CovarianceStructure& cs, const ModelSpec& spec);

/// Limit covariance of n^{-1/2} sum U_k: sigma^2/(sum theta_i - 1)^2 E_d,
/// plus the scalar for Y. Verifies the (I - B^{-1})^{-1} e_d column formula.
struct CltTarget {
    Matrix cov_u;     // rank-1, sigma^2/(s-1)^2 * E_d
    double var_y = 0.0;
};
CltTarget clt_mean_covariance(const ModelSpec& spec);

/// Positive-definiteness certificate of Lemma-level quantities.
PdCertificate positive_definiteness_certificate(const CompanionPair& pair);

/// (sigma^2/theta_d^2) Gamma^{-1}: limit covariance of sqrt(n)(theta_hat - theta*).
Matrix asymptotic_cov_lse(const ModelSpec& spec);

/// sigma^2 D Gamma^{-1} D^T with the delta-method matrix D; cross-checked
/// against the gradient form with grad phi(theta*) = -theta_d D.
Matrix asymptotic_cov_corrected(const ModelSpec& spec);

/// The delta-method D matrix: D_{i,d-i} = 1 for i < d, last column theta.
Matrix delta_method_d(const Vector& theta);

/// JSON export of the full structure plus asymptotic covariances.
std::string covariance_structure_json(const ModelSpec& spec);

}  // namespace ncar

#endif
