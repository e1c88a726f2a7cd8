#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ncar/estimate.hpp"

using namespace ncar;

namespace {

ModelSpec make_spec(std::initializer_list<double> theta, double sigma2 = 1.0) {
    ModelSpec s;
    s.theta = Eigen::Map<const Vector>(theta.begin(), static_cast<long>(theta.size()));
    s.noise.sigma2 = sigma2;
    return s;
}

SimulationPath zero_path(int d, int n) {
    SimulationPath p;
    p.d = d;
    p.n = n;
    p.y.assign(static_cast<std::size_t>(n + d), 0.0);
    p.u.assign(static_cast<std::size_t>(n + 1), Vector::Zero(d));
    p.noise.values.assign(static_cast<std::size_t>(n), 0.0);
    return p;
}

}  // namespace

TEST_CASE("lse converges to theta*, d=1") {
    auto spec = make_spec({2.0});
    auto path = simulate_stationary(spec, 10'000, 2024, 1e-12);
    auto r = lse(path);
    CHECK(std::abs(r.theta_hat(0) - 0.5) <= 0.05);
    CHECK(!r.gram_singular);
    CHECK(std::abs(r.theta_corrected(0) - 2.0) <= 0.25);
}

TEST_CASE("lse converges to theta*, d=2") {
    auto spec = make_spec({0.0, 4.0});
    auto path = simulate_stationary(spec, 10'000, 7, 1e-12);
    auto r = lse(path);
    Vector star(2);
    star << 0.0, 0.25;
    CHECK((r.theta_hat - star).norm() <= 0.05);
}

TEST_CASE("lse zero convention on a degenerate path") {
    auto r = lse(zero_path(2, 100));
    CHECK(r.gram_singular);
    CHECK(r.theta_hat.norm() == 0.0);
    CHECK(r.corrected_extended);
    CHECK(r.theta_corrected.norm() == 0.0);
}

TEST_CASE("lse rejects short paths") {
    CHECK_THROWS_AS(lse(zero_path(3, 3)), PathTooShort);
}

TEST_CASE("lse normalized deviations echo supplied targets") {
    auto spec = make_spec({2.0});
    auto path = simulate_stationary(spec, 1000, 3, 1e-12);
    Vector theta(1), star(1);
    theta << 2.0;
    star << 0.5;
    auto r = lse(path, theta, star);
    REQUIRE(r.normalized_dev_star);
    REQUIRE(r.normalized_dev_theta);
    const double root_n = std::sqrt(1000.0);
    CHECK((*r.normalized_dev_star)(0) ==
          doctest::Approx(root_n * (r.theta_hat(0) - 0.5)).epsilon(1e-14));
    CHECK((*r.normalized_dev_theta)(0) ==
          doctest::Approx(root_n * (r.theta_corrected(0) - 2.0)).epsilon(1e-14));
}

TEST_CASE("h_weighted_statistic constant h is the plain noise CLT statistic") {
    auto spec = make_spec({2.0});
    auto path = simulate_stationary(spec, 5000, 15, 1e-12);
    HSpec h;
    h.kind = HSpec::Kind::Constant;
    auto stat = h_weighted_statistic(path, h);
    double sum = 0.0;
    for (int k = 1; k <= path.n; ++k) sum += path.zat(k);
    CHECK(stat(0) == doctest::Approx(sum / std::sqrt(5000.0)).epsilon(1e-12));
    auto target = target_cov_h(spec, h);
    CHECK(target.cov(0, 0) == 1.0);
}

TEST_CASE("target_cov_h analytic routes") {
    auto spec = make_spec({0.0, 4.0});
    auto cs = covariance_structure(spec);

    HSpec ident;
    ident.kind = HSpec::Kind::Identity;
    auto t_id = target_cov_h(spec, ident);
    CHECK((t_id.cov - cs.gamma_mat).norm() <= 1e-12 * cs.gamma_mat.norm());
    CHECK(t_id.mc_standard_error == 0.0);

    HSpec proj;
    proj.kind = HSpec::Kind::Projection;
    proj.coordinate = 1;
    auto t_pi = target_cov_h(spec, proj);
    CHECK(t_pi.cov(0, 0) == doctest::Approx(cs.gamma[0]).epsilon(1e-12));

    HSpec proof;
    proof.kind = HSpec::Kind::ProofMap;
    proof.theta_d = 4.0;
    auto t_pr = target_cov_h(spec, proof);
    // E(h h^T) = Gamma / theta_d^2 for the reversal map
    CHECK((t_pr.cov - cs.gamma_mat / 16.0).norm() <= 1e-12 * cs.gamma_mat.norm());
}

TEST_CASE("target_cov_h nonlinear route reports a standard error") {
    auto spec = make_spec({2.0});
    HSpec tanh_h;
    tanh_h.kind = HSpec::Kind::TanhCoords;
    auto t = target_cov_h(spec, tanh_h, 200'000, 5);
    CHECK(t.mc_standard_error > 0.0);
    // tanh is a contraction: the target must not exceed sigma^2 Gamma
    auto cs = covariance_structure(spec);
    CHECK(t.cov(0, 0) < cs.gamma_mat(0, 0));
    CHECK(t.cov(0, 0) > 0.0);
}

TEST_CASE("sample_autocovariance oracles") {
    auto spec = make_spec({2.0});
    auto path = simulate_stationary(spec, 100'000, 71, 1e-12);
    const double se0 = 2.0 * (1.0 / 3) / std::sqrt(100'000.0);
    CHECK(std::abs(sample_autocovariance(path, 0) - 1.0 / 3) <= 5.0 * se0);
    CHECK(std::abs(sample_autocovariance(path, 1) - 1.0 / 6) <= 5.0 * se0);
    CHECK_THROWS_AS(sample_autocovariance(path, 2), LagTooLarge);

    auto zeros = zero_path(1, 100);
    CHECK(sample_autocovariance(zeros, 0) == 0.0);
}

TEST_CASE("strong laws: Gram, cross term, orthogonality") {
    auto spec = make_spec({0.0, 4.0});
    auto cs = covariance_structure(spec);
    auto path = simulate_stationary(spec, 100'000, 83, 1e-12);

    Matrix gram = Matrix::Zero(2, 2);
    Vector cross = Vector::Zero(2);
    for (int k = 1; k <= path.n; ++k) {
        const Vector& prev = path.u[static_cast<std::size_t>(k - 1)];
        gram += prev * prev.transpose();
        cross += prev * path.yat(k);
    }
    gram /= path.n;
    cross /= path.n;
    CHECK((gram - cs.gamma_mat).norm() <= 0.05 * cs.gamma_mat.norm());
    Vector rhs(2);
    rhs << cs.gamma[1], cs.gamma[2];
    CHECK((cross - rhs).norm() <= 0.05 * std::max(1.0, rhs.norm()));

    HSpec proj;
    proj.kind = HSpec::Kind::Projection;
    proj.coordinate = 1;
    double ortho = 0.0;
    for (int k = 1; k <= path.n; ++k) ortho += path.yat(k) * path.zat(k);
    ortho /= path.n;
    const double target_sd = std::sqrt(cs.gamma[0]);
    CHECK(std::abs(ortho) <= 5.0 * target_sd / std::sqrt(static_cast<double>(path.n)));
}

TEST_CASE("estimation result exports") {
    auto spec = make_spec({2.0});
    auto path = simulate_stationary(spec, 1000, 4, 1e-12);
    auto r = lse(path);
    auto csv = estimation_result_csv(r);
    CHECK(csv.find("theta_hat_1") != std::string::npos);
    auto js = estimation_result_json(r);
    CHECK(js.find("\"gram_singular\":false") != std::string::npos);
}
