#include "ncar/montecarlo.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <thread>

#include "ncar/stats.hpp"
#include "ncar/util.hpp"

namespace ncar {

std::string to_string(StatisticKind s) {
    switch (s) {
        case StatisticKind::MeanCltU: return "mean_clt_u";
        case StatisticKind::MeanCltY: return "mean_clt_y";
        case StatisticKind::HClt: return "h_clt";
        case StatisticKind::LseClt: return "lse_clt";
        case StatisticKind::CorrectedClt: return "corrected_clt";
    }
    return "?";
}

double covariance_distance(const Matrix& empirical, const Matrix& target) {
    if (empirical.rows() != target.rows() || empirical.cols() != target.cols()) {
        throw DimensionMismatch("covariance_distance: shape mismatch");
    }
    return (empirical - target).norm() / std::max(target.norm(), 1e-300);
}

NormalityDiagnostics normality_diagnostics(const Matrix& samples, const Matrix& target_cov) {
    const int r = static_cast<int>(samples.rows());
    const int m = static_cast<int>(samples.cols());
    if (r < 100) throw BadSpec("normality diagnostics need R >= 100");
    if (target_cov.rows() != m || target_cov.cols() != m) {
        throw DimensionMismatch("normality_diagnostics: target shape mismatch");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(target_cov);
    const Vector evals = es.eigenvalues();
    const double max_eig = evals.maxCoeff();
    if (!(max_eig > 0.0)) throw RankZero("target covariance is numerically zero");
    const double floor = 1e-10 * max_eig;

    NormalityDiagnostics diag;
    std::vector<int> keep;
    for (int i = 0; i < m; ++i) {
        if (evals(i) > floor) keep.push_back(i);
    }
    diag.rank = static_cast<int>(keep.size());

    // Whitening restricted to the column space of the target.
    Matrix whiten(diag.rank, m);
    for (int i = 0; i < diag.rank; ++i) {
        whiten.row(i) = es.eigenvectors().col(keep[static_cast<std::size_t>(i)]).transpose() /
                        std::sqrt(evals(keep[static_cast<std::size_t>(i)]));
    }

    std::vector<double> radii(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        radii[static_cast<std::size_t>(i)] = (whiten * samples.row(i).transpose()).squaredNorm();
    }
    const int dof = diag.rank;
    diag.mahalanobis_ks =
        ks_distance(radii, [dof](double x) { return chi_square_cdf(x, dof); });

    diag.marginal_ks = Vector::Zero(m);
    for (int j = 0; j < m; ++j) {
        const double v = target_cov(j, j);
        if (v <= floor) continue;
        const double sd = std::sqrt(v);
        std::vector<double> col(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) col[static_cast<std::size_t>(i)] = samples(i, j) / sd;
        diag.marginal_ks(j) = ks_distance(col, [](double x) { return normal_cdf(x); });
    }
    return diag;
}

namespace {

struct StatContext {
    StatisticKind kind;
    HSpec h;
    Vector theta_true;
    Vector theta_star;
};

Vector replication_statistic(const ExperimentConfig& cfg, const StatContext& ctx,
                             std::uint64_t seed) {
    SimulationPath path = simulate_stationary(cfg.spec, cfg.n, seed, cfg.sim_tol);
    const double root_n = std::sqrt(static_cast<double>(cfg.n));
    switch (ctx.kind) {
        case StatisticKind::MeanCltU: {
            Vector sum = Vector::Zero(cfg.spec.d());
            for (int k = 1; k <= cfg.n; ++k) sum += path.u[static_cast<std::size_t>(k)];
            return sum / root_n;
        }
        case StatisticKind::MeanCltY: {
            double sum = 0.0;
            for (int k = 1; k <= cfg.n; ++k) sum += path.yat(k);
            Vector out(1);
            out(0) = sum / root_n;
            return out;
        }
        case StatisticKind::HClt:
            return h_weighted_statistic(path, ctx.h);
        case StatisticKind::LseClt: {
            EstimationResult r = lse(path, std::nullopt, ctx.theta_star);
            return *r.normalized_dev_star;
        }
        case StatisticKind::CorrectedClt: {
            EstimationResult r = lse(path, ctx.theta_true, std::nullopt);
            return *r.normalized_dev_theta;
        }
    }
    throw BadSpec("unknown statistic");
}

}  // namespace

MonteCarloReport run_experiment(const ExperimentConfig& cfg) {
    cfg.spec.validate();
    if (cfg.replications < 100) throw BadSpec("covariance comparison needs R >= 100");
    const CompanionPair pair = build_companion(cfg.spec);
    if (pair.spectral.region != Region::PurelyExplosive) {
        throw NotPurelyExplosive("run_experiment requires theta in Theta_pe");
    }

    StatContext ctx;
    ctx.kind = cfg.statistic;
    ctx.h = cfg.h;
    ctx.theta_true = cfg.spec.theta;
    ctx.theta_star = phi_map(cfg.spec.theta).value;

    Matrix target;
    switch (cfg.statistic) {
        case StatisticKind::MeanCltU: target = clt_mean_covariance(cfg.spec).cov_u; break;
        case StatisticKind::MeanCltY: {
            target = Matrix::Constant(1, 1, clt_mean_covariance(cfg.spec).var_y);
            break;
        }
        case StatisticKind::HClt: target = target_cov_h(cfg.spec, cfg.h).cov; break;
        case StatisticKind::LseClt: target = asymptotic_cov_lse(cfg.spec); break;
        case StatisticKind::CorrectedClt: target = asymptotic_cov_corrected(cfg.spec); break;
    }
    const int m = static_cast<int>(target.rows());
    const int reps = cfg.replications;

    Matrix rows = Matrix::Zero(reps, m);
    std::vector<char> ok(static_cast<std::size_t>(reps), 0);

    const int workers = std::max(1, cfg.workers);
    auto work = [&](int begin, int end) {
        for (int r = begin; r < end; ++r) {
            try {
                rows.row(r) =
                    replication_statistic(cfg, ctx, mix_seed(cfg.base_seed, r)).transpose();
                ok[static_cast<std::size_t>(r)] = 1;
            } catch (const Error&) {
                ok[static_cast<std::size_t>(r)] = 0;
            }
        }
    };
    if (workers == 1) {
        work(0, reps);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (reps + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(reps, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    MonteCarloReport rep;
    int good = 0;
    for (int r = 0; r < reps; ++r) {
        if (ok[static_cast<std::size_t>(r)]) ++good;
    }
    rep.failed_replications = reps - good;
    rep.samples.resize(good, m);
    int row = 0;
    for (int r = 0; r < reps; ++r) {
        if (ok[static_cast<std::size_t>(r)]) rep.samples.row(row++) = rows.row(r);
    }

    rep.empirical_mean = rep.samples.colwise().mean();
    Matrix centered = rep.samples.rowwise() - rep.empirical_mean.transpose();
    rep.empirical_cov = centered.transpose() * centered / std::max(1, good - 1);
    rep.target_cov = target;
    rep.cov_rel_err = covariance_distance(rep.empirical_cov, target);

    NormalityDiagnostics diag = normality_diagnostics(rep.samples, target);
    rep.mahalanobis_ks = diag.mahalanobis_ks;
    rep.marginal_ks = diag.marginal_ks;
    rep.ks_threshold = 1.63 / std::sqrt(static_cast<double>(good));

    const bool failures_ok = rep.failed_replications <= reps / 100;
    const bool ks_ok = rep.mahalanobis_ks < rep.ks_threshold &&
                       (rep.marginal_ks.size() == 0 ||
                        rep.marginal_ks.maxCoeff() < rep.ks_threshold);
    rep.pass = failures_ok && ks_ok && rep.cov_rel_err <= cfg.tol_cov_rel;
    return rep;
}

std::string report_samples_csv(const MonteCarloReport& rep) {
    std::ostringstream os;
    for (int j = 0; j < rep.samples.cols(); ++j) {
        if (j) os << ',';
        os << "stat_" << (j + 1);
    }
    os << '\n';
    for (int i = 0; i < rep.samples.rows(); ++i) {
        for (int j = 0; j < rep.samples.cols(); ++j) {
            if (j) os << ',';
            os << fmt_double(rep.samples(i, j));
        }
        os << '\n';
    }
    return os.str();
}

std::string report_summary_csv(const MonteCarloReport& rep) {
    std::ostringstream os;
    os << "cov_rel_err,mahalanobis_ks,max_marginal_ks,ks_threshold,failed_replications,pass\n"
       << fmt_double(rep.cov_rel_err) << ',' << fmt_double(rep.mahalanobis_ks) << ','
       << fmt_double(rep.marginal_ks.size() ? rep.marginal_ks.maxCoeff() : 0.0) << ','
       << fmt_double(rep.ks_threshold) << ',' << rep.failed_replications << ','
       << (rep.pass ? 1 : 0) << '\n';
    return os.str();
}

std::string report_summary_json(const ExperimentConfig& cfg, const MonteCarloReport& rep) {
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
    std::ostringstream os;
    os << "{\"statistic\":\"" << to_string(cfg.statistic) << "\",\"n\":" << cfg.n
       << ",\"replications\":" << cfg.replications << ",\"base_seed\":" << cfg.base_seed
       << ",\"theta\":[";
    for (int i = 0; i < cfg.spec.d(); ++i) {
        if (i) os << ',';
        os << fmt_double(cfg.spec.theta(i));
    }
    os << "],\"sigma2\":" << fmt_double(cfg.spec.noise.sigma2) << ",\"empirical_mean\":[";
    for (int i = 0; i < rep.empirical_mean.size(); ++i) {
        if (i) os << ',';
        os << fmt_double(rep.empirical_mean(i));
    }
    os << "],\"empirical_cov\":" << mat(rep.empirical_cov)
       << ",\"target_cov\":" << mat(rep.target_cov)
       << ",\"cov_rel_err\":" << fmt_double(rep.cov_rel_err)
       << ",\"mahalanobis_ks\":" << fmt_double(rep.mahalanobis_ks)
       << ",\"marginal_ks\":[";
    for (int i = 0; i < rep.marginal_ks.size(); ++i) {
        if (i) os << ',';
        os << fmt_double(rep.marginal_ks(i));
    }
    os << "],\"ks_threshold\":" << fmt_double(rep.ks_threshold)
       << ",\"failed_replications\":" << rep.failed_replications
       << ",\"pass\":" << (rep.pass ? "true" : "false") << '}';
    return os.str();
}

}  // namespace ncar
