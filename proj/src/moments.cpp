#include "ncar/moments.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "ncar/util.hpp"

namespace ncar {

namespace {

void require_pe(const CompanionPair& pair, const char* what) {
    if (pair.spectral.region != Region::PurelyExplosive) {
        throw NotPurelyExplosive(std::string(what) + " requires theta in Theta_pe");
    }
}

}  // namespace

Matrix sigma_series(const CompanionPair& pair, double tol, int cap) {
    require_pe(pair, "sigma_series");
    const int d = pair.d();

    // Terms are rank one: B^{-j} e_1 e_1^T B^{-jT} = c_j c_j^T with
    // c_j the first column of B^{-j}.
    Vector c = pair.b_inv.col(0);
    Matrix sum = Matrix::Zero(d, d);
    double prev_norm = 0.0;
    double q = 0.5;
    for (int j = 1; j <= cap; ++j) {
        const Matrix term = c * c.transpose();
        const double tn = term.norm();
        if (j > 1 && prev_norm > 0.0) q = std::min(0.999999, tn / prev_norm);
        sum += term;
        if (tn <= tol * (1.0 - q) * std::max(sum.norm(), 1e-300)) {
            return 0.5 * (sum + sum.transpose());
        }
        prev_norm = tn;
        c = pair.b_inv * c;
        if (!c.allFinite()) throw NoConvergence("sigma_series: term overflow");
    }
    throw NoConvergence("sigma_series: terms failed to decay within cap");
}

Matrix sigma_fixed_point(const CompanionPair& pair) {
    require_pe(pair, "sigma_fixed_point");
    const int d = pair.d();
    const Matrix& binv = pair.b_inv;

    Matrix kron = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            kron.block(i * d, j * d, d, d) = binv(i, j) * binv;

    const Vector c = binv.col(0);
    const Matrix rhs_mat = c * c.transpose();
    Vector rhs(d * d);
    for (int j = 0; j < d; ++j) rhs.segment(j * d, d) = rhs_mat.col(j);

    const Matrix system = Matrix::Identity(d * d, d * d) - kron;
    Vector vec_sigma = system.partialPivLu().solve(rhs);
    Matrix sigma(d, d);
    for (int j = 0; j < d; ++j) sigma.col(j) = vec_sigma.segment(j * d, d);
    return 0.5 * (sigma + sigma.transpose());
}

CovarianceStructure covariance_structure(const ModelSpec& spec) {
    const CompanionPair pair = build_companion(spec);
    require_pe(pair, "covariance_structure");
    const int d = spec.d();
    const double s2 = spec.noise.sigma2;
    const double td = spec.theta(d - 1);

    CovarianceStructure cs;
    cs.sigma_mat = sigma_fixed_point(pair);
    cs.gamma_mat = s2 * cs.sigma_mat;
    cs.theta_star = phi_map(spec.theta).value;

    cs.gamma.resize(static_cast<std::size_t>(d + 1));
    for (int k = 0; k < d; ++k) cs.gamma[static_cast<std::size_t>(k)] = cs.gamma_mat(0, k);
    double gd = -s2 / td;
    for (int j = 1; j <= d; ++j) {
        gd += cs.gamma[static_cast<std::size_t>(std::abs(j - d))] * spec.theta(j - 1);
    }
    cs.gamma[static_cast<std::size_t>(d)] = gd;

    Eigen::SelfAdjointEigenSolver<Matrix> es(cs.sigma_mat);
    cs.min_eig_sigma = es.eigenvalues().minCoeff();

    // k = 0 identity: gamma(0) = sum_j theta_j gamma(j).
    double g0 = 0.0;
    for (int j = 1; j <= d; ++j) g0 += spec.theta(j - 1) * cs.gamma[static_cast<std::size_t>(j)];
    const double scale = std::max(std::abs(cs.gamma[0]), 1e-300);
    if (std::abs(g0 - cs.gamma[0]) > 1e-9 * scale) {
        throw NumericalFailure("covariance_structure: gamma(0) identity violated");
    }
    return cs;
}

ResidualReport theta_star_residuals(const CovarianceStructure& cs, const ModelSpec& spec) {
    const int d = spec.d();
    const double s2 = spec.noise.sigma2;
    const double td = spec.theta(d - 1);
    Vector ed = Vector::Zero(d);
    ed(d - 1) = 1.0;

    Vector gamma_vec(d);
    for (int k = 1; k <= d; ++k) gamma_vec(k - 1) = cs.gamma[static_cast<std::size_t>(k)];

    ResidualReport rep;
    const double gscale = std::max(cs.gamma_mat.norm(), 1e-300);
    rep.yule_walker = (cs.gamma_mat * cs.theta_star - gamma_vec).norm() / gscale;

    const Vector diff = cs.theta_star - spec.theta;
    const double dscale = std::max(diff.norm(), 1.0);
    rep.gamma_identity =
        (diff + (s2 / td) * cs.gamma_mat.llt().solve(ed)).norm() / dscale;
    rep.sigma_identity =
        (diff + (1.0 / td) * cs.sigma_mat.llt().solve(ed)).norm() / dscale;
    return rep;
}

CltTarget clt_mean_covariance(const ModelSpec& spec) {
    const CompanionPair pair = build_companion(spec);
    require_pe(pair, "clt_mean_covariance");
    const int d = spec.d();
    const double s = spec.theta.sum();
    const double denom = (s - 1.0) * (s - 1.0);

    CltTarget t;
    t.var_y = spec.noise.sigma2 / denom;
    t.cov_u = t.var_y * Matrix::Ones(d, d);

    // Column formula check: (I - B^{-1})^{-1} e_d = theta_d/(s-1) * ones.
    Vector ed = Vector::Zero(d);
    ed(d - 1) = 1.0;
    const Matrix m = Matrix::Identity(d, d) - pair.b_inv;
    const Vector col = m.partialPivLu().solve(ed);
    const Vector expect = (spec.theta(d - 1) / (s - 1.0)) * Vector::Ones(d);
    if ((col - expect).norm() > 1e-10 * std::max(1.0, expect.norm())) {
        throw NumericalFailure("clt_mean_covariance: column formula violated");
    }
    return t;
}

PdCertificate positive_definiteness_certificate(const CompanionPair& pair) {
    const int d = pair.d();
    if (pair.theta(d - 1) == 0.0) throw DegenerateTheta("certificate requires theta_d != 0");

    Matrix partial = Matrix::Zero(d, d);
    Matrix stack(d, d);
    Vector c = pair.b_inv.col(0);
    std::vector<Vector> cols(static_cast<std::size_t>(d));
    for (int j = 1; j <= d; ++j) {
        cols[static_cast<std::size_t>(j - 1)] = c;
        partial += c * c.transpose();
        c = pair.b_inv * c;
    }
    // Rows are (B^{-d})_{.1}^T down to (B^{-1})_{.1}^T.
    for (int j = 0; j < d; ++j) stack.row(j) = cols[static_cast<std::size_t>(d - 1 - j)].transpose();

    Eigen::SelfAdjointEigenSolver<Matrix> es(partial);
    return {es.eigenvalues().minCoeff(), stack.determinant()};
}

Matrix asymptotic_cov_lse(const ModelSpec& spec) {
    CovarianceStructure cs = covariance_structure(spec);
    const double td = spec.theta(spec.d() - 1);
    Matrix inv = cs.gamma_mat.llt().solve(Matrix::Identity(spec.d(), spec.d()));
    Matrix out = (spec.noise.sigma2 / (td * td)) * inv;
    return 0.5 * (out + out.transpose());
}

Matrix delta_method_d(const Vector& theta) {
    const int d = static_cast<int>(theta.size());
    Matrix dm = Matrix::Zero(d, d);
    for (int i = 1; i <= d - 1; ++i) dm(i - 1, d - 1 - i) = 1.0;
    dm.col(d - 1) = theta;
    return dm;
}

Matrix asymptotic_cov_corrected(const ModelSpec& spec) {
    CovarianceStructure cs = covariance_structure(spec);
    const int d = spec.d();
    const double td = spec.theta(d - 1);
    const Matrix dm = delta_method_d(spec.theta);
    const Matrix ginv = cs.gamma_mat.llt().solve(Matrix::Identity(d, d));
    Matrix out = spec.noise.sigma2 * dm * ginv * dm.transpose();
    out = 0.5 * (out + out.transpose());

    // Gradient-form cross-check: grad phi at theta* must equal -theta_d D.
    const Vector& ts = cs.theta_star;
    Matrix grad = Matrix::Zero(d, d);
    const double xd = ts(d - 1);
    for (int i = 1; i <= d - 1; ++i) {
        grad(i - 1, d - 1 - i) = -1.0 / xd;
        grad(i - 1, d - 1) = ts(d - 1 - i) / (xd * xd);
    }
    grad(d - 1, d - 1) = -1.0 / (xd * xd);
    const Matrix alt =
        grad * ((spec.noise.sigma2 / (td * td)) * ginv) * grad.transpose();
    if ((alt - out).norm() > 1e-10 * std::max(1.0, out.norm())) {
        throw NumericalFailure("asymptotic_cov_corrected: gradient cross-check failed");
    }
    return out;
}

std::string covariance_structure_json(const ModelSpec& spec) {
    CovarianceStructure cs = covariance_structure(spec);
    ResidualReport rr = theta_star_residuals(cs, spec);
    Matrix lse_cov = asymptotic_cov_lse(spec);
    Matrix corr_cov = asymptotic_cov_corrected(spec);

    auto mat = [](const Matrix& m) {
        std::ostringstream os;
        os << '[';
        for (int i = 0; i < m.rows(); ++i) {
            if (i) os << ',';
            os << '[';
            for (int j = 0; j < m.cols(); ++j) {
                if (j) os << ',';
                os << fmt_double(m(i, j));
            }
            os << ']';
        }
        os << ']';
        return os.str();
    };
    auto vec = [](const Vector& v) {
        std::ostringstream os;
        os << '[';
        for (int i = 0; i < v.size(); ++i) {
            if (i) os << ',';
            os << fmt_double(v(i));
        }
        os << ']';
        return os.str();
    };

    std::ostringstream os;
    os << "{\"theta\":" << vec(spec.theta)
       << ",\"sigma2\":" << fmt_double(spec.noise.sigma2)
       << ",\"sigma\":" << mat(cs.sigma_mat)
       << ",\"gamma_mat\":" << mat(cs.gamma_mat) << ",\"gamma\":[";
    for (std::size_t i = 0; i < cs.gamma.size(); ++i) {
        if (i) os << ',';
        os << fmt_double(cs.gamma[i]);
    }
    os << "],\"theta_star\":" << vec(cs.theta_star)
       << ",\"min_eig_sigma\":" << fmt_double(cs.min_eig_sigma)
       << ",\"asymptotic_cov_lse\":" << mat(lse_cov)
       << ",\"asymptotic_cov_corrected\":" << mat(corr_cov)
       << ",\"residuals\":{\"yule_walker\":" << fmt_double(rr.yule_walker)
       << ",\"gamma_identity\":" << fmt_double(rr.gamma_identity)
       << ",\"sigma_identity\":" << fmt_double(rr.sigma_identity) << "}}";
    return os.str();
}

}  // namespace ncar
