#include "ncar/estimate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "ncar/util.hpp"

namespace ncar {

int HSpec::output_dim(int d) const {
    switch (kind) {
        case Kind::Identity: return d;
        case Kind::Projection: return 1;
        case Kind::Linear: return static_cast<int>(linear.rows());
        case Kind::ProofMap: return d;
        case Kind::TanhCoords: return d;
        case Kind::Constant: return 1;
    }
    return 0;
}

bool HSpec::is_linear() const {
    return kind == Kind::Identity || kind == Kind::Projection ||
           kind == Kind::Linear || kind == Kind::ProofMap;
}

Matrix HSpec::as_matrix(int d) const {
    switch (kind) {
        case Kind::Identity: return Matrix::Identity(d, d);
        case Kind::Projection: {
            if (coordinate < 1 || coordinate > d) throw BadH("projection coordinate out of range");
            Matrix m = Matrix::Zero(1, d);
            m(0, coordinate - 1) = 1.0;
            return m;
        }
        case Kind::Linear: {
            if (linear.cols() != d) throw BadH("linear map has wrong input dimension");
            return linear;
        }
        case Kind::ProofMap: {
            if (theta_d == 0.0) throw BadH("proof map requires theta_d != 0");
            Matrix m = Matrix::Zero(d, d);
            for (int i = 0; i < d; ++i) m(i, d - 1 - i) = -1.0 / theta_d;
            return m;
        }
        default: throw BadH("h is not linear");
    }
}

Vector HSpec::apply(const Vector& u) const {
    const int d = static_cast<int>(u.size());
    switch (kind) {
        case Kind::TanhCoords: {
            Vector out(d);
            for (int i = 0; i < d; ++i) out(i) = std::tanh(u(i));
            return out;
        }
        case Kind::Constant: {
            Vector out(1);
            out(0) = 1.0;
            return out;
        }
        default: return as_matrix(d) * u;
    }
}

EstimationResult lse(const SimulationPath& path, std::optional<Vector> theta_true,
                     std::optional<Vector> theta_star_true) {
    const int d = path.d;
    const int n = path.n;
    if (n < d + 1) throw PathTooShort("lse needs at least d+1 pairs");

    Matrix gram = Matrix::Zero(d, d);
    Vector cross = Vector::Zero(d);
    for (int k = 1; k <= n; ++k) {
        const Vector& prev = path.u[static_cast<std::size_t>(k - 1)];
        gram.noalias() += prev * prev.transpose();
        cross.noalias() += prev * path.yat(k);
    }

    EstimationResult r;
    r.n = n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    r.gram_min_eig = es.eigenvalues().minCoeff();
    const double eps = 1e-12 * gram.trace() / d;
    if (r.gram_min_eig <= eps) {
        r.gram_singular = true;
        r.theta_hat = Vector::Zero(d);
    } else {
        r.theta_hat = gram.llt().solve(cross);
    }
    PhiResult corrected = phi_map(r.theta_hat);
    r.theta_corrected = corrected.value;
    r.corrected_extended = corrected.extended;

    const double root_n = std::sqrt(static_cast<double>(n));
    if (theta_star_true) r.normalized_dev_star = root_n * (r.theta_hat - *theta_star_true);
    if (theta_true) r.normalized_dev_theta = root_n * (r.theta_corrected - *theta_true);
    return r;
}

Vector h_weighted_statistic(const SimulationPath& path, const HSpec& h) {
    const int m = h.output_dim(path.d);
    Vector sum = Vector::Zero(m);
    for (int k = 1; k <= path.n; ++k) {
        const Vector hu = h.apply(path.u[static_cast<std::size_t>(k)]);
        if (hu.size() != m) throw BadH("h output dimension inconsistent");
        sum.noalias() += hu * path.zat(k);
    }
    return sum / std::sqrt(static_cast<double>(path.n));
}

HTargetCov target_cov_h(const ModelSpec& spec, const HSpec& h, int mc_draws,
                        std::uint64_t mc_seed) {
    const double s2 = spec.noise.sigma2;
    if (h.kind == HSpec::Kind::Constant) {
        Matrix cov(1, 1);
        cov(0, 0) = s2;
        return {cov, 0.0};
    }
    if (h.is_linear()) {
        CovarianceStructure cs = covariance_structure(spec);
        const Matrix m = h.as_matrix(spec.d());
        Matrix cov = s2 * m * cs.gamma_mat * m.transpose();
        return {0.5 * (cov + cov.transpose()), 0.0};
    }

    // Plug-in Monte Carlo over the stationary law: one long path supplies
    // mc_draws states; the SE reported is for the largest matrix entry.
    SimulationPath path = simulate_stationary(spec, mc_draws, mc_seed, 1e-12);
    const int m = h.output_dim(spec.d());
    Matrix sum = Matrix::Zero(m, m);
    Matrix sumsq = Matrix::Zero(m, m);
    for (int k = 1; k <= mc_draws; ++k) {
        const Vector hu = h.apply(path.u[static_cast<std::size_t>(k)]);
        const Matrix outer = hu * hu.transpose();
        sum += outer;
        sumsq += outer.cwiseProduct(outer);
    }
    const double inv_n = 1.0 / mc_draws;
    Matrix mean = sum * inv_n;
    Matrix var = (sumsq * inv_n - mean.cwiseProduct(mean)).cwiseMax(0.0);
    HTargetCov out;
    out.cov = s2 * 0.5 * (mean + mean.transpose());
    out.mc_standard_error = s2 * std::sqrt(var.maxCoeff() * inv_n);
    return out;
}

double sample_autocovariance(const SimulationPath& path, int k) {
    if (k < 0 || k > path.d) throw LagTooLarge("lag must be in 0..d");
    const int lo = -path.d + 1;
    const int hi = path.n - k;
    if (hi - lo + 1 < 2) throw PathTooShort("not enough observations for this lag");
    double sum = 0.0;
    int count = 0;
    for (int j = lo; j <= hi; ++j) {
        sum += path.yat(j) * path.yat(j + k);
        ++count;
    }
    return sum / count;
}

std::string estimation_result_csv(const EstimationResult& r) {
    std::ostringstream os;
    os << "n,gram_singular,gram_min_eig";
    const int d = static_cast<int>(r.theta_hat.size());
    for (int i = 1; i <= d; ++i) os << ",theta_hat_" << i;
    for (int i = 1; i <= d; ++i) os << ",theta_corrected_" << i;
    os << '\n' << r.n << ',' << (r.gram_singular ? 1 : 0) << ',' << fmt_double(r.gram_min_eig);
    for (int i = 0; i < d; ++i) os << ',' << fmt_double(r.theta_hat(i));
    for (int i = 0; i < d; ++i) os << ',' << fmt_double(r.theta_corrected(i));
    os << '\n';
    return os.str();
}

std::string estimation_result_json(const EstimationResult& r) {
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
    os << "{\"n\":" << r.n << ",\"theta_hat\":" << vec(r.theta_hat)
       << ",\"theta_corrected\":" << vec(r.theta_corrected)
       << ",\"corrected_extended\":" << (r.corrected_extended ? "true" : "false")
       << ",\"gram_singular\":" << (r.gram_singular ? "true" : "false")
       << ",\"gram_min_eig\":" << fmt_double(r.gram_min_eig);
    if (r.normalized_dev_star) os << ",\"normalized_dev_star\":" << vec(*r.normalized_dev_star);
    if (r.normalized_dev_theta) os << ",\"normalized_dev_theta\":" << vec(*r.normalized_dev_theta);
    os << '}';
    return os.str();
}

}  // namespace ncar
