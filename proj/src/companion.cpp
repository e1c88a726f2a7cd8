#include "ncar/companion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace ncar {

void NoiseSpec::validate() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw BadSpec("sigma2 must be positive and finite");
    }
    if (family == NoiseFamily::StudentT && !(nu > 2.0)) {
        throw BadSpec("student_t requires nu > 2 for finite variance");
    }
}

double NoiseSpec::sigma() const { return std::sqrt(sigma2); }

void ModelSpec::validate() const {
    if (theta.size() < 1) throw BadSpec("order d must be >= 1");
    if (!theta.allFinite()) throw BadSpec("theta entries must be finite");
    noise.validate();
}

std::string to_string(Region r) {
    switch (r) {
        case Region::PurelyExplosive: return "PurelyExplosive";
        case Region::Stable: return "Stable";
        case Region::Other: return "Other";
    }
    return "Other";
}

CompanionPair build_companion(const ModelSpec& spec) {
    spec.validate();
    const int d = spec.d();
    const Vector& theta = spec.theta;
    if (theta(d - 1) == 0.0) {
        throw DegenerateTheta("theta_d = 0: companion matrix is singular");
    }

    Matrix b = Matrix::Zero(d, d);
    b.row(0) = theta.transpose();
    if (d > 1) b.block(1, 0, d - 1, d - 1).setIdentity();

    // Closed form: identity block in the top-right, last row
    // (1/theta_d, -theta_1/theta_d, ..., -theta_{d-1}/theta_d).
    Matrix b_inv = Matrix::Zero(d, d);
    if (d > 1) b_inv.block(0, 1, d - 1, d - 1).setIdentity();
    b_inv(d - 1, 0) = 1.0 / theta(d - 1);
    for (int j = 1; j < d; ++j) {
        b_inv(d - 1, j) = -theta(j - 1) / theta(d - 1);
    }

    CompanionPair pair;
    pair.theta = theta;
    pair.b = std::move(b);
    pair.b_inv = std::move(b_inv);
    pair.spectral = spectral_info(pair.b);
    return pair;
}

SpectralReport spectral_info(const Matrix& b) {
    Eigen::EigenSolver<Matrix> solver(b, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("eigenvalue solver did not converge");
    }
    SpectralReport rep;
    const auto& ev = solver.eigenvalues();
    rep.eigenvalues.reserve(ev.size());
    rep.rho = 0.0;
    rep.rho_lower = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const std::complex<double> lambda(ev(i).real(), ev(i).imag());
        rep.eigenvalues.push_back(lambda);
        const double a = std::abs(lambda);
        rep.rho = std::max(rep.rho, a);
        rep.rho_lower = std::min(rep.rho_lower, a);
        if (std::abs(a - 1.0) <= kBoundaryTol) rep.boundary = true;
    }
    if (rep.boundary) {
        rep.region = Region::Other;
    } else if (rep.rho_lower > 1.0) {
        rep.region = Region::PurelyExplosive;
    } else if (rep.rho < 1.0) {
        rep.region = Region::Stable;
    } else {
        rep.region = Region::Other;
    }
    return rep;
}

Region classify_region_d2(const Vector& theta) {
    if (theta.size() != 2) throw WrongOrder("classify_region_d2 requires d = 2");
    const double t1 = theta(0), t2 = theta(1);
    if (std::abs(t1) < 2.0 && -1.0 < t2 && t2 < 1.0 - std::abs(t1)) {
        return Region::Stable;
    }
    if (t2 > 1.0 + std::abs(t1)) return Region::PurelyExplosive;
    if (t2 < -1.0 && t2 < 1.0 - std::abs(t1)) return Region::PurelyExplosive;
    return Region::Other;
}

PhiResult phi_map(const Vector& theta) {
    const int d = static_cast<int>(theta.size());
    PhiResult out;
    if (d < 1) throw BadSpec("phi_map: empty theta");
    const double td = theta(d - 1);
    if (td == 0.0) {
        out.value = Vector::Zero(d);
        out.extended = true;
        return out;
    }
    out.value.resize(d);
    for (int i = 0; i < d - 1; ++i) {
        out.value(i) = -theta(d - 2 - i) / td;
    }
    out.value(d - 1) = 1.0 / td;
    return out;
}

Vector inverse_power_first_column(const CompanionPair& pair, int j) {
    const int d = pair.d();
    if (j < 1 || j > d) throw BadSpec("inverse_power_first_column: j out of 1..d");
    Vector col = Vector::Zero(d);
    col(0) = 1.0;
    for (int i = 0; i < j; ++i) col = pair.b_inv * col;

    const double scale = std::max(1.0, col.cwiseAbs().maxCoeff());
    for (int k = 0; k < d - j; ++k) {
        if (std::abs(col(k)) > 1e-12 * scale) {
            throw PatternViolation("expected structural zero in first column of B^{-j}");
        }
    }
    const double pivot = 1.0 / pair.theta(d - 1);
    if (std::abs(col(d - j) - pivot) > 1e-12 * std::abs(pivot)) {
        throw PatternViolation("expected 1/theta_d pivot in first column of B^{-j}");
    }
    return col;
}

}  // namespace ncar
