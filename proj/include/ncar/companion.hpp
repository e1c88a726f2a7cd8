#ifndef NCAR_COMPANION_HPP
#define NCAR_COMPANION_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "ncar/errors.hpp"

namespace ncar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class NoiseFamily { Gaussian, Rademacher, UniformCentered, StudentT };

/// Zero-mean i.i.d. noise specification with variance sigma2.
/// student_t is rescaled so its variance equals sigma2 and requires nu > 2.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Gaussian;
    double sigma2 = 1.0;
    double nu = 0.0;  // degrees of freedom, student_t only

    void validate() const;
    double sigma() const;
};

/// AR(d) model: Y_n = theta_1 Y_{n-1} + ... + theta_d Y_{n-d} + Z_n.
struct ModelSpec {
    Vector theta;
    NoiseSpec noise;

    int d() const { return static_cast<int>(theta.size()); }
    void validate() const;
};

enum class Region { PurelyExplosive, Stable, Other };

std::string to_string(Region r);

struct SpectralReport {
    std::vector<std::complex<double>> eigenvalues;
    double rho = 0.0;        // spectral radius, max |lambda|
    double rho_lower = 0.0;  // lower spectral radius, min |lambda|
    Region region = Region::Other;
    bool boundary = false;   // some |lambda| within 1e-9 of the unit circle
};

/// B(theta) together with its closed-form inverse and cached spectral data.
struct CompanionPair {
    Vector theta;
    Matrix b;
    Matrix b_inv;
    SpectralReport spectral;

    int d() const { return static_cast<int>(theta.size()); }
};

/// Result of the involution phi; extended == true marks the Borel extension
/// by zero off Theta (theta_d == 0), where the value is meaningless.
struct PhiResult {
    Vector value;
    bool extended = false;
};

// Half-width of the |lambda| = 1 band classified as Other with boundary flag.
inline constexpr double kBoundaryTol = 1e-9;

/// Builds B(theta) and its closed-form inverse; never inverts numerically.
/// Throws DegenerateTheta if theta_d == 0.
CompanionPair build_companion(const ModelSpec& spec);

/// Eigenvalues of B and region classification by spectral radii.
SpectralReport spectral_info(const Matrix& b);

/// Closed-form d=2 region label of the (theta_1, theta_2) plane.
/// Throws WrongOrder unless theta has exactly two entries.
Region classify_region_d2(const Vector& theta);

/// phi(theta) = (-theta_{d-1}/theta_d, ..., -theta_1/theta_d, 1/theta_d);
/// an involution on {theta_d != 0}, extended by 0 elsewhere.
PhiResult phi_map(const Vector& theta);

/// First column of B^{-j}, 1 <= j <= d, with the structural zero pattern
/// asserted: entries 1..d-j vanish and entry d-j+1 equals 1/theta_d.
Vector inverse_power_first_column(const CompanionPair& pair, int j);

}  // namespace ncar

#endif
