#ifndef NCAR_SIMULATE_HPP
#define NCAR_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ncar/companion.hpp"

namespace ncar {

/// Reproducible i.i.d. draw Z_1..Z_length (values[k-1] holds Z_k).
struct NoiseDraw {
    std::vector<double> values;
    std::uint64_t seed = 0;
    NoiseSpec spec;
};

/// A simulated stationary path. y holds Y_{-d+1}..Y_n (y[i] = Y_{i-d+1}),
/// u holds the state vectors U_0..U_n with U_k = (Y_k, ..., Y_{k-d+1})^T.
/// Only Z_1..Z_n of the draw are exposed to estimators; the extra K values
/// seed the far-future tail state.
struct SimulationPath {
    int d = 1;
    int n = 0;
    std::vector<double> y;
    std::vector<Vector> u;
    NoiseDraw noise;
    int truncation_k = 0;
    double truncation_bound = 0.0;

    double yat(int k) const { return y[static_cast<std::size_t>(k + d - 1)]; }
    double zat(int k) const { return noise.values[static_cast<std::size_t>(k - 1)]; }

    /// max_k |Y_k - sum_j theta_j Y_{k-j} - Z_k| over 1 <= k <= n.
    double recursion_residual(const Vector& theta) const;
};

struct HorizonResult {
    int k = 0;
    double bound = 0.0;  // certified tail bound at k
};

struct DemoPoint {
    Vector scaled_state;  // B^{-k} U_k
    double state_norm = 0.0;
    bool saturated = false;
};

inline constexpr int kDefaultHorizonCap = 1'000'000;

/// Deterministic i.i.d. noise; identical (seed, spec, length) reproduces
/// the same values bit-for-bit within one build.
NoiseDraw generate_noise(const NoiseSpec& spec, int length, std::uint64_t seed);

/// Smallest K with ||B^{-K}||_F ||B^{-1}||_F / (1-q) * sigma <= tol, where
/// q = ||B^{-m}||_F^{1/m} < 1 for a probing power m. Requires theta in
/// Theta_pe; throws HorizonOverflow past the cap.
HorizonResult truncation_horizon(const CompanionPair& pair, double tol, double sigma,
                                 int cap = kDefaultHorizonCap);

/// Stationary-horizon analogue for the forward model: smallest K with
/// ||B^K||_F ||B||_F / (1-q) * sigma <= tol (powers of B contract).
HorizonResult forward_horizon(const CompanionPair& pair, double tol, double sigma,
                              int cap = kDefaultHorizonCap);

/// Simulates the unique stationary solution of the purely explosive AR(d):
/// the tail state U_n = -sum_{k=1}^K B^{-k} e_1 Z_{n+k} is seeded first,
/// then U_{k-1} = B^{-1}(U_k - e_1 Z_k) fills the path backwards, so a
/// single truncation error enters at U_n and contracts from there.
SimulationPath simulate_stationary(const ModelSpec& spec, int n, std::uint64_t seed,
                                   double tol);

/// Same construction on a caller-supplied noise draw (values.size() >= n+K
/// required, K from truncation_horizon).
SimulationPath simulate_stationary_with_noise(const ModelSpec& spec, int n,
                                              const NoiseDraw& noise, double tol);

/// Stationary solution of the forward-looking AR under theta in Theta_s:
/// V_m = sum_{k>=0} B^k e_1 Z_{m+k}, returned as Y_m = pi_1(V_m), m=1..n.
/// The path is stored with the same layout (u[m] = V_{m+?}); here u[k]
/// holds V_{k+1} for k = 0..n-1 and y holds Y_1..Y_n.
struct ForwardPath {
    int d = 1;
    int n = 0;
    std::vector<double> y;       // Y_1..Y_n
    std::vector<Vector> v;       // V_1..V_n
    NoiseDraw noise;
    int truncation_k = 0;
    double truncation_bound = 0.0;
};

ForwardPath simulate_forward_ar(const Vector& theta_stable, const NoiseSpec& noise,
                                int n, std::uint64_t seed, double tol);

ForwardPath simulate_forward_ar_with_noise(const Vector& theta_stable,
                                           const NoiseDraw& noise, int n, double tol);

/// Shared-noise check that the forward stable model and the transformed
/// backward explosive model (theta* = phi(theta), Z*_k = -Z_k/theta_d)
/// produce the same path: max_n |pi_1(V_n) - pi_d(U*_{n-1})|.
struct EquivalenceReport {
    double max_discrepancy = 0.0;
    double combined_bound = 0.0;
};

EquivalenceReport forward_backward_equivalence(const Vector& theta_stable,
                                               const NoiseSpec& noise, int n,
                                               std::uint64_t seed, double tol);

enum class InitialValueMode { Stationary, Custom, Zero };

/// Forward-iterates U_k = B U_{k-1} + e_1 Z_k from the chosen U_0 and
/// reports B^{-k} U_k for k = 0..n. With the stationary U_0 the scaled
/// state tends to 0; with a generic U_0 it tends to a nonzero limit and
/// ||U_k|| grows like rho_lower(B)^k. Saturates past 1e300 with a flag.
std::vector<DemoPoint> explosive_demo(const ModelSpec& spec, InitialValueMode mode,
                                      const Vector& u0_custom, int n,
                                      std::uint64_t seed, double tol = 1e-12);

/// CSV export: header "k,Y_k,Z_k", Y indexed from -d+1 (Z empty for k <= 0).
std::string path_to_csv(const SimulationPath& path);

/// Metadata sidecar JSON: theta, sigma2, seed, K, truncation_bound.
std::string path_metadata_json(const ModelSpec& spec, const SimulationPath& path);

/// Parses a CSV produced by path_to_csv back into (k, Y, Z) columns.
struct ParsedPathCsv {
    std::vector<int> k;
    std::vector<double> y;
    std::vector<double> z;  // aligned with k > 0 rows only
    int d = 1;
};
ParsedPathCsv parse_path_csv(const std::string& csv);

}  // namespace ncar

#endif
