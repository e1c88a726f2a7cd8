#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ncar/moments.hpp"
#include "ncar/simulate.hpp"

using namespace ncar;

namespace {

ModelSpec make_spec(std::initializer_list<double> theta, double sigma2 = 1.0) {
    ModelSpec s;
    s.theta = Eigen::Map<const Vector>(theta.begin(), static_cast<long>(theta.size()));
    s.noise.sigma2 = sigma2;
    return s;
}

Vector random_pe_theta(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> mag(1.2, 3.0);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> roots(static_cast<std::size_t>(d));
    for (auto& r : roots) r = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    std::vector<double> coef{1.0};
    for (double r : roots) {
        std::vector<double> next(coef.size() + 1, 0.0);
        for (std::size_t i = 0; i < coef.size(); ++i) {
            next[i] += coef[i];
            next[i + 1] -= r * coef[i];
        }
        coef = next;
    }
    Vector theta(d);
    for (int j = 1; j <= d; ++j) theta(j - 1) = -coef[static_cast<std::size_t>(j)];
    return theta;
}

}  // namespace

TEST_CASE("sigma_series scalar geometric oracles") {
    auto p2 = build_companion(make_spec({2.0}));
    CHECK(sigma_series(p2, 1e-14)(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    auto p10 = build_companion(make_spec({10.0}));
    CHECK(sigma_series(p10, 1e-14)(0, 0) == doctest::Approx(1.0 / 99).epsilon(1e-12));
    auto stable = build_companion(make_spec({0.5}));
    CHECK_THROWS_AS(sigma_series(stable, 1e-12), NotPurelyExplosive);
}

TEST_CASE("sigma_fixed_point scalar solve") {
    auto p2 = build_companion(make_spec({2.0}));
    CHECK(sigma_fixed_point(p2)(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("series and fixed point agree on random specs (double oracle)") {
    std::mt19937_64 rng(17);
    for (int d = 1; d <= 4; ++d) {
        for (int trial = 0; trial < 25; ++trial) {
            auto pair = build_companion({random_pe_theta(rng, d), {}});
            Matrix a = sigma_series(pair, 1e-12);
            Matrix b = sigma_fixed_point(pair);
            CHECK((a - b).norm() <= 1e-10 * std::max(1.0, b.norm()));
        }
    }
}

TEST_CASE("covariance_structure d=1 hand chain") {
    auto cs = covariance_structure(make_spec({2.0}));
    CHECK(cs.gamma[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    // gamma(1) via theta*: gamma(0) * 0.5, and via the gamma(d) identity:
    // gamma(0)*2 - 1/2. Both give 1/6.
    CHECK(cs.gamma[1] == doctest::Approx(1.0 / 6).epsilon(1e-12));
    CHECK(cs.gamma[0] * 2.0 - 0.5 == doctest::Approx(cs.gamma[1]).epsilon(1e-12));
    CHECK(cs.theta_star(0) == 0.5);
    CHECK(cs.min_eig_sigma > 0.0);
    // k=0 identity: gamma(0) = theta_1 gamma(1)
    CHECK(cs.gamma[0] == doctest::Approx(2.0 * cs.gamma[1]).epsilon(1e-12));
}

TEST_CASE("Toeplitz and Yule-Walker invariants on random specs") {
    std::mt19937_64 rng(23);
    for (int d = 1; d <= 4; ++d) {
        for (int trial = 0; trial < 25; ++trial) {
            ModelSpec spec{random_pe_theta(rng, d), {}};
            auto cs = covariance_structure(spec);
            for (int j = 0; j < d; ++j) {
                for (int k = 0; k < d; ++k) {
                    CHECK(cs.gamma_mat(j, k) ==
                          doctest::Approx(cs.gamma[static_cast<std::size_t>(std::abs(j - k))])
                              .epsilon(1e-12));
                }
            }
            Vector rhs(d);
            for (int k = 1; k <= d; ++k) rhs(k - 1) = cs.gamma[static_cast<std::size_t>(k)];
            CHECK((cs.gamma_mat * cs.theta_star - rhs).norm() <=
                  1e-10 * std::max(1.0, cs.gamma_mat.norm()));
            // restricted Yule-Walker for 1 <= k <= d-1
            for (int k = 1; k <= d - 1; ++k) {
                double sum = 0.0;
                for (int j = 1; j <= d; ++j) {
                    sum += cs.gamma[static_cast<std::size_t>(std::abs(j - k))] * spec.theta(j - 1);
                }
                CHECK(std::abs(cs.gamma[static_cast<std::size_t>(k)] - sum) <=
                      1e-9 * std::abs(cs.gamma[0]));
            }
        }
    }
}

TEST_CASE("theta_star_residuals") {
    auto spec1 = make_spec({2.0});
    auto cs1 = covariance_structure(spec1);
    auto rr1 = theta_star_residuals(cs1, spec1);
    CHECK(rr1.yule_walker <= 1e-9);
    CHECK(rr1.gamma_identity <= 1e-9);
    CHECK(rr1.sigma_identity <= 1e-9);
    // d=1 scalar: theta* - theta = -1.5 and -(1/2) Sigma^{-1} = -1.5
    CHECK(cs1.theta_star(0) - spec1.theta(0) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(-(1.0 / 2.0) * (1.0 / cs1.sigma_mat(0, 0)) == doctest::Approx(-1.5).epsilon(1e-12));

    auto spec2 = make_spec({0.0, 4.0});
    auto rr2 = theta_star_residuals(covariance_structure(spec2), spec2);
    CHECK(rr2.yule_walker <= 1e-9);
    CHECK(rr2.gamma_identity <= 1e-9);
    CHECK(rr2.sigma_identity <= 1e-9);
}

TEST_CASE("clt_mean_covariance") {
    auto t1 = clt_mean_covariance(make_spec({2.0}));
    CHECK(t1.var_y == doctest::Approx(1.0).epsilon(1e-14));

    auto t2 = clt_mean_covariance(make_spec({0.0, 4.0}));
    CHECK(t2.var_y == doctest::Approx(1.0 / 9).epsilon(1e-14));
    CHECK(t2.cov_u(0, 1) == doctest::Approx(1.0 / 9).epsilon(1e-14));
    CHECK(t2.cov_u(1, 1) == doctest::Approx(1.0 / 9).epsilon(1e-14));
    // column formula checked internally; a hand value: (I-B^{-1})^{-1} e_2 = (4/3)(1,1)
    auto pair = build_companion(make_spec({0.0, 4.0}));
    Vector e2(2);
    e2 << 0, 1;
    Vector col = (Matrix::Identity(2, 2) - pair.b_inv).partialPivLu().solve(e2);
    CHECK(col(0) == doctest::Approx(4.0 / 3).epsilon(1e-12));
    CHECK(col(1) == doctest::Approx(4.0 / 3).epsilon(1e-12));
}

TEST_CASE("positive_definiteness_certificate") {
    auto c1 = positive_definiteness_certificate(build_companion(make_spec({2.0})));
    CHECK(c1.min_eig == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(c1.det_stack == doctest::Approx(0.5).epsilon(1e-12));

    auto c2 = positive_definiteness_certificate(build_companion(make_spec({0.0, 4.0})));
    CHECK(std::abs(c2.det_stack) == doctest::Approx(1.0 / 16).epsilon(1e-8));

    auto c3 = positive_definiteness_certificate(build_companion(make_spec({1.0, 2.0, 3.0})));
    CHECK(c3.min_eig > 0.0);
    CHECK(std::abs(c3.det_stack) == doctest::Approx(1.0 / 27).epsilon(1e-8));
}

TEST_CASE("asymptotic_cov_lse") {
    auto m1 = asymptotic_cov_lse(make_spec({2.0}));
    CHECK(m1(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
    auto m10 = asymptotic_cov_lse(make_spec({10.0}));
    CHECK(m10(0, 0) == doctest::Approx(0.99).epsilon(1e-12));

    auto m2 = asymptotic_cov_lse(make_spec({0.0, 4.0}));
    CHECK((m2 - m2.transpose()).norm() <= 1e-14 * m2.norm());
    Eigen::LLT<Matrix> llt(m2);
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("asymptotic_cov_corrected") {
    auto m1 = asymptotic_cov_corrected(make_spec({2.0}));
    CHECK(m1(0, 0) == doctest::Approx(12.0).epsilon(1e-12));

    Vector t2(2);
    t2 << 0, 4;
    Matrix dm = delta_method_d(t2);
    CHECK(dm(0, 0) == 1.0);
    CHECK(dm(0, 1) == 0.0);
    CHECK(dm(1, 0) == 0.0);
    CHECK(dm(1, 1) == 4.0);

    auto m2 = asymptotic_cov_corrected(make_spec({0.0, 4.0}));
    CHECK((m2 - m2.transpose()).norm() <= 1e-14 * m2.norm());
    Eigen::LLT<Matrix> llt(m2);
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("Monte Carlo consistency of gamma(0..d)") {
    auto spec = make_spec({0.0, 4.0});
    auto cs = covariance_structure(spec);
    auto path = simulate_stationary(spec, 100'000, 101, 1e-12);
    for (int k = 0; k <= 2; ++k) {
        double sum = 0.0;
        int count = 0;
        for (int j = 1; j + k <= path.n; ++j) {
            sum += path.yat(j) * path.yat(j + k);
            ++count;
        }
        const double est = sum / count;
        const double se = 2.0 * cs.gamma[0] / std::sqrt(static_cast<double>(count));
        CHECK(std::abs(est - cs.gamma[static_cast<std::size_t>(k)]) <= 5.0 * se);
    }
}

TEST_CASE("all covariance outputs symmetric and Cholesky-positive") {
    std::mt19937_64 rng(29);
    for (int d = 1; d <= 4; ++d) {
        for (int trial = 0; trial < 10; ++trial) {
            ModelSpec spec{random_pe_theta(rng, d), {}};
            auto cs = covariance_structure(spec);
            CHECK((cs.sigma_mat - cs.sigma_mat.transpose()).norm() <=
                  1e-14 * std::max(1.0, cs.sigma_mat.norm()));
            CHECK(Eigen::LLT<Matrix>(cs.sigma_mat).info() == Eigen::Success);
            CHECK(Eigen::LLT<Matrix>(cs.gamma_mat).info() == Eigen::Success);
        }
    }
}

TEST_CASE("covariance_structure_json carries residuals") {
    std::string js = covariance_structure_json(make_spec({2.0}));
    CHECK(js.find("\"theta_star\":[0.5]") != std::string::npos);
    CHECK(js.find("yule_walker") != std::string::npos);
}
