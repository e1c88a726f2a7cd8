#include "ncar/simulate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ncar/util.hpp"

namespace ncar {

double SimulationPath::recursion_residual(const Vector& theta) const {
    const int order = static_cast<int>(theta.size());
    double worst = 0.0;
    for (int k = 1; k <= n; ++k) {
        double pred = zat(k);
        for (int j = 1; j <= order; ++j) pred += theta(j - 1) * yat(k - j);
        worst = std::max(worst, std::abs(yat(k) - pred));
    }
    return worst;
}

NoiseDraw generate_noise(const NoiseSpec& spec, int length, std::uint64_t seed) {
    spec.validate();
    if (length < 1) throw BadSpec("noise length must be >= 1");

    NoiseDraw draw;
    draw.seed = seed;
    draw.spec = spec;
    draw.values.resize(static_cast<std::size_t>(length));

    std::mt19937_64 rng(seed);
    const double sigma = spec.sigma();
    switch (spec.family) {
        case NoiseFamily::Gaussian: {
            std::normal_distribution<double> dist(0.0, sigma);
            for (auto& v : draw.values) v = dist(rng);
            break;
        }
        case NoiseFamily::Rademacher: {
            std::bernoulli_distribution dist(0.5);
            for (auto& v : draw.values) v = dist(rng) ? sigma : -sigma;
            break;
        }
        case NoiseFamily::UniformCentered: {
            const double half = sigma * std::sqrt(3.0);
            std::uniform_real_distribution<double> dist(-half, half);
            for (auto& v : draw.values) v = dist(rng);
            break;
        }
        case NoiseFamily::StudentT: {
            std::student_t_distribution<double> dist(spec.nu);
            const double scale = sigma * std::sqrt((spec.nu - 2.0) / spec.nu);
            for (auto& v : draw.values) v = scale * dist(rng);
            break;
        }
    }
    return draw;
}

namespace {

// Smallest K with ||M^K||_F * ||M||_F / (1-q) * sigma <= tol for a matrix M
// with rho(M) < 1; q = ||M^m||_F^{1/m} probed at growing powers.
HorizonResult horizon_for(const Matrix& m, double tol, double sigma, int cap,
                          const char* what) {
    if (!(tol > 0.0)) throw BadSpec("tol must be positive");
    const double m_norm = m.norm();

    // Find a probing power with contraction ratio q < 1. rho(M) < 1
    // guarantees one exists; powers are doubled until it shows up.
    Matrix power = m;
    int probe = 1;
    double q = m_norm;
    while (std::pow(power.norm(), 1.0 / probe) >= 1.0) {
        if (probe > 4096) throw NoConvergence(std::string(what) + ": no contracting power found");
        power = power * power;
        probe *= 2;
    }
    q = std::pow(power.norm(), 1.0 / probe);

    const double factor = m_norm / (1.0 - q) * sigma;
    Matrix mk = m;
    for (int k = 1; k <= cap; ++k) {
        const double bound = mk.norm() * factor;
        if (bound <= tol) return {k, bound};
        mk = mk * m;
        if (!mk.allFinite()) throw NumericalFailure(std::string(what) + ": power overflow");
    }
    throw HorizonOverflow(std::string(what) + ": tolerance unreachable at cap");
}

}  // namespace

HorizonResult truncation_horizon(const CompanionPair& pair, double tol, double sigma,
                                 int cap) {
    if (pair.spectral.region != Region::PurelyExplosive) {
        throw NotPurelyExplosive("truncation_horizon requires theta in Theta_pe");
    }
    return horizon_for(pair.b_inv, tol, sigma, cap, "truncation_horizon");
}

HorizonResult forward_horizon(const CompanionPair& pair, double tol, double sigma,
                              int cap) {
    if (pair.spectral.region != Region::Stable) {
        throw NotStable("forward_horizon requires theta in Theta_s");
    }
    return horizon_for(pair.b, tol, sigma, cap, "forward_horizon");
}

SimulationPath simulate_stationary_with_noise(const ModelSpec& spec, int n,
                                              const NoiseDraw& noise, double tol) {
    if (n < 1) throw BadSpec("n must be >= 1");
    const CompanionPair pair = build_companion(spec);
    const HorizonResult hor = truncation_horizon(pair, tol, spec.noise.sigma());
    const int d = spec.d();
    const int k_trunc = hor.k;
    if (static_cast<int>(noise.values.size()) < n + k_trunc) {
        throw BadSpec("noise draw too short for n + K");
    }

    SimulationPath path;
    path.d = d;
    path.n = n;
    path.noise = noise;
    path.truncation_k = k_trunc;
    path.truncation_bound = hor.bound;
    path.u.resize(static_cast<std::size_t>(n + 1));

    // Tail state via Horner: sum_{k=1}^K B^{-k} e_1 Z_{n+k}
    //   = B^{-1}(e_1 Z_{n+1} + B^{-1}(e_1 Z_{n+2} + ...)).
    Vector acc = Vector::Zero(d);
    for (int k = k_trunc; k >= 1; --k) {
        acc(0) += noise.values[static_cast<std::size_t>(n + k - 1)];
        acc = pair.b_inv * acc;
    }
    path.u[static_cast<std::size_t>(n)] = -acc;

    // Exact backward recursion U_{k-1} = B^{-1}(U_k - e_1 Z_k).
    for (int k = n; k >= 1; --k) {
        Vector prev = path.u[static_cast<std::size_t>(k)];
        prev(0) -= noise.values[static_cast<std::size_t>(k - 1)];
        path.u[static_cast<std::size_t>(k - 1)] = pair.b_inv * prev;
    }

    // y[i] = Y_{i-d+1}: early values come from U_0, the rest from pi_1(U_k).
    path.y.resize(static_cast<std::size_t>(n + d));
    for (int j = 0; j < d; ++j) {
        path.y[static_cast<std::size_t>(d - 1 - j)] = path.u[0](j);
    }
    for (int k = 1; k <= n; ++k) {
        path.y[static_cast<std::size_t>(k + d - 1)] = path.u[static_cast<std::size_t>(k)](0);
    }
    return path;
}

SimulationPath simulate_stationary(const ModelSpec& spec, int n, std::uint64_t seed,
                                   double tol) {
    const CompanionPair pair = build_companion(spec);
    const HorizonResult hor = truncation_horizon(pair, tol, spec.noise.sigma());
    NoiseDraw noise = generate_noise(spec.noise, n + hor.k, seed);
    return simulate_stationary_with_noise(spec, n, noise, tol);
}

ForwardPath simulate_forward_ar_with_noise(const Vector& theta_stable,
                                           const NoiseDraw& noise, int n, double tol) {
    if (n < 1) throw BadSpec("n must be >= 1");
    ModelSpec spec{theta_stable, noise.spec};
    spec.validate();
    Matrix b = Matrix::Zero(spec.d(), spec.d());
    b.row(0) = theta_stable.transpose();
    if (spec.d() > 1) b.block(1, 0, spec.d() - 1, spec.d() - 1).setIdentity();
    SpectralReport sr = spectral_info(b);
    if (sr.region != Region::Stable) {
        throw NotStable("simulate_forward_ar requires theta in Theta_s");
    }
    CompanionPair pair;
    pair.theta = theta_stable;
    pair.b = b;
    pair.b_inv = Matrix();  // unused; theta_d may be 0 here
    pair.spectral = sr;
    const HorizonResult hor = forward_horizon(pair, tol, noise.spec.sigma());

    const int d = spec.d();
    if (static_cast<int>(noise.values.size()) < n + d - 1 + hor.k) {
        throw BadSpec("noise draw too short for n + d - 1 + K");
    }

    ForwardPath path;
    path.d = d;
    path.n = n;
    path.noise = noise;
    path.truncation_k = hor.k;
    path.truncation_bound = hor.bound;
    path.v.resize(static_cast<std::size_t>(n));

    // V_n tail: sum_{k=0}^K B^k e_1 Z_{n+k} by Horner, then
    // V_{m} = B V_{m+1} + e_1 Z_m downwards.
    Vector acc = Vector::Zero(d);
    for (int k = hor.k; k >= 0; --k) {
        if (k < hor.k) acc = b * acc;
        acc(0) += noise.values[static_cast<std::size_t>(n + k - 1)];
    }
    path.v[static_cast<std::size_t>(n - 1)] = acc;
    for (int m = n - 1; m >= 1; --m) {
        Vector next = b * path.v[static_cast<std::size_t>(m)];
        next(0) += noise.values[static_cast<std::size_t>(m - 1)];
        path.v[static_cast<std::size_t>(m - 1)] = next;
    }
    path.y.resize(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) {
        path.y[static_cast<std::size_t>(m - 1)] = path.v[static_cast<std::size_t>(m - 1)](0);
    }
    return path;
}

ForwardPath simulate_forward_ar(const Vector& theta_stable, const NoiseSpec& noise,
                                int n, std::uint64_t seed, double tol) {
    ModelSpec spec{theta_stable, noise};
    spec.validate();
    Matrix b = Matrix::Zero(spec.d(), spec.d());
    b.row(0) = theta_stable.transpose();
    if (spec.d() > 1) b.block(1, 0, spec.d() - 1, spec.d() - 1).setIdentity();
    CompanionPair pair;
    pair.theta = theta_stable;
    pair.b = b;
    pair.spectral = spectral_info(b);
    if (pair.spectral.region != Region::Stable) {
        throw NotStable("simulate_forward_ar requires theta in Theta_s");
    }
    const HorizonResult hor = forward_horizon(pair, tol, noise.sigma());
    NoiseDraw draw = generate_noise(noise, n + spec.d() - 1 + hor.k, seed);
    return simulate_forward_ar_with_noise(theta_stable, draw, n, tol);
}

EquivalenceReport forward_backward_equivalence(const Vector& theta_stable,
                                               const NoiseSpec& noise, int n,
                                               std::uint64_t seed, double tol) {
    const int d = static_cast<int>(theta_stable.size());
    if (theta_stable(d - 1) == 0.0) {
        throw DegenerateTheta("equivalence check requires theta_d != 0");
    }

    // One shared draw, long enough for both constructions. The backward
    // model runs on Z*_k = -Z_k/theta_d, variance sigma^2/theta_d^2.
    const Vector theta_star = phi_map(theta_stable).value;
    NoiseSpec star_noise_spec = noise;
    star_noise_spec.sigma2 = noise.sigma2 / (theta_stable(d - 1) * theta_stable(d - 1));
    ModelSpec star_spec{theta_star, star_noise_spec};
    const CompanionPair star_pair = build_companion(star_spec);
    const HorizonResult back_hor =
        truncation_horizon(star_pair, tol, star_noise_spec.sigma());

    ModelSpec fwd_spec{theta_stable, noise};
    Matrix b = Matrix::Zero(d, d);
    b.row(0) = theta_stable.transpose();
    if (d > 1) b.block(1, 0, d - 1, d - 1).setIdentity();
    CompanionPair fwd_pair;
    fwd_pair.theta = theta_stable;
    fwd_pair.b = b;
    fwd_pair.spectral = spectral_info(b);
    const HorizonResult fwd_hor = forward_horizon(fwd_pair, tol, noise.sigma());

    const int length = n + d + std::max(back_hor.k, fwd_hor.k);
    NoiseDraw shared = generate_noise(noise, length, seed);

    // Forward path pi_1(V_m), m = 1..n.
    ForwardPath fwd = simulate_forward_ar_with_noise(theta_stable, shared, n, tol);

    // Backward model under theta* with Z*_k = -Z_k/theta_d; compare
    // pi_1(V_m) against pi_d(U*_{m-1}).
    NoiseDraw star_noise = shared;
    const double td = theta_stable(d - 1);
    for (auto& v : star_noise.values) v = -v / td;
    star_noise.spec = star_noise_spec;
    SimulationPath back =
        simulate_stationary_with_noise(star_spec, n, star_noise, tol);

    EquivalenceReport rep;
    rep.combined_bound = back_hor.bound + fwd_hor.bound;
    for (int m = 1; m <= n; ++m) {
        const double lhs = fwd.v[static_cast<std::size_t>(m - 1)](0);
        const double rhs = back.u[static_cast<std::size_t>(m - 1)](d - 1);
        rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(lhs - rhs));
    }
    return rep;
}

std::vector<DemoPoint> explosive_demo(const ModelSpec& spec, InitialValueMode mode,
                                      const Vector& u0_custom, int n,
                                      std::uint64_t seed, double tol) {
    const CompanionPair pair = build_companion(spec);
    if (pair.spectral.region != Region::PurelyExplosive) {
        throw NotPurelyExplosive("explosive_demo requires theta in Theta_pe");
    }
    const int d = spec.d();

    Vector u0;
    NoiseDraw noise;
    if (mode == InitialValueMode::Stationary) {
        // The stationary U_0 and the forward iteration must share one draw.
        SimulationPath path = simulate_stationary(spec, n, seed, tol);
        u0 = path.u[0];
        noise = path.noise;
    } else {
        const HorizonResult hor = truncation_horizon(pair, tol, spec.noise.sigma());
        noise = generate_noise(spec.noise, n + hor.k, seed);
        u0 = (mode == InitialValueMode::Zero) ? Vector::Zero(d) : u0_custom;
        if (u0.size() != d) throw BadSpec("custom U_0 has wrong dimension");
    }

    // B^{-k} U_k = U_0 + sum_{j<=k} B^{-j} e_1 Z_j, accumulated with
    // p_j = B^{-j} e_1 so the forward state never needs to be formed for
    // the scaled trajectory; the raw norm is tracked separately and
    // saturates once it exceeds 1e300.
    std::vector<DemoPoint> out(static_cast<std::size_t>(n + 1));
    Vector scaled = u0;
    Vector p = Vector::Zero(d);
    p(0) = 1.0;
    Vector state = u0;
    bool saturated = false;
    out[0] = {scaled, state.norm(), false};
    for (int k = 1; k <= n; ++k) {
        p = pair.b_inv * p;
        scaled += p * noise.values[static_cast<std::size_t>(k - 1)];
        if (!saturated) {
            state = pair.b * state;
            state(0) += noise.values[static_cast<std::size_t>(k - 1)];
            if (!state.allFinite() || state.norm() > 1e300) saturated = true;
        }
        out[static_cast<std::size_t>(k)] = {scaled, saturated ? 1e300 : state.norm(),
                                            saturated};
    }
    return out;
}

std::string path_to_csv(const SimulationPath& path) {
    std::ostringstream os;
    os << "k,Y_k,Z_k\n";
    for (int k = -path.d + 1; k <= path.n; ++k) {
        os << k << ',' << fmt_double(path.yat(k)) << ',';
        if (k >= 1) os << fmt_double(path.zat(k));
        os << '\n';
    }
    return os.str();
}

std::string path_metadata_json(const ModelSpec& spec, const SimulationPath& path) {
    std::ostringstream os;
    os << "{\"theta\":[";
    for (int i = 0; i < spec.d(); ++i) {
        if (i) os << ',';
        os << fmt_double(spec.theta(i));
    }
    os << "],\"sigma2\":" << fmt_double(spec.noise.sigma2)
       << ",\"seed\":" << path.noise.seed << ",\"K\":" << path.truncation_k
       << ",\"truncation_bound\":" << fmt_double(path.truncation_bound) << "}";
    return os.str();
}

ParsedPathCsv parse_path_csv(const std::string& csv) {
    ParsedPathCsv out;
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);  // header
    int min_k = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const int k = std::stoi(line.substr(0, c1));
        out.k.push_back(k);
        out.y.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
        if (k >= 1) out.z.push_back(std::stod(line.substr(c2 + 1)));
        min_k = std::min(min_k, k);
    }
    out.d = 1 - min_k;
    return out;
}

}  // namespace ncar
