#pragma once

#include <functional>
#include <span>
#include <vector>

/// Sample statistics and the Kolmogorov-Smirnov machinery.
namespace suslab::stats {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;         ///< unbiased
    double variance_stderr = 0.0;  ///< sqrt((m4 - s^4) / m), from the sample itself
};

Moments moments(std::span<const double> xs);

/// Linear-interpolation quantile (type 7) of an already sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);
double median(std::vector<double> xs);

/// sup_x |F_m(x) - cdf(x)|.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);

/// P(K > lambda) for the Kolmogorov distribution K = lim sqrt(m) D_m.
double kolmogorov_survival(double lambda);

/// lambda with P(K > lambda) = alpha.
double kolmogorov_quantile(double alpha);

/// Asymptotic critical value lambda_alpha / sqrt(m).
double ks_critical(double alpha, std::size_t m);

double normal_cdf(double x, double mean, double variance);

}  // namespace suslab::stats
