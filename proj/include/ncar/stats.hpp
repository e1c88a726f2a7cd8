#ifndef NCAR_STATS_HPP
#define NCAR_STATS_HPP

#include <vector>

namespace ncar {

/// Standard normal CDF.
double normal_cdf(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Chi-square CDF with k degrees of freedom.
double chi_square_cdf(double x, int k);

/// Two-sided Kolmogorov-Smirnov distance of a sample against a CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        if (hi > dist) dist = hi;
        if (lo > dist) dist = lo;
    }
    return dist;
}

}  // namespace ncar

#endif
