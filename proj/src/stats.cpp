#include "suslab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "suslab/errors.hpp"
#include "suslab/numerics.hpp"

namespace suslab::stats {

Moments moments(std::span<const double> xs) {
    if (xs.size() < 2) throw DomainError("moments: need at least two observations");
    const auto m = static_cast<double>(xs.size());
    numerics::CompensatedSum sum;
    for (double x : xs) sum += x;
    Moments out;
    out.mean = sum.value() / m;
    numerics::CompensatedSum s2;
    numerics::CompensatedSum s4;
    for (double x : xs) {
        const double d = (x - out.mean) * (x - out.mean);
        s2 += d;
        s4 += d * d;
    }
    out.variance = s2.value() / (m - 1.0);
    const double m2 = s2.value() / m;
    const double m4 = s4.value() / m;
    out.variance_stderr = std::sqrt(std::max(0.0, m4 - m2 * m2) / m);
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, 0.5);
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw DomainError("ks_statistic: empty sample");
    std::sort(xs.begin(), xs.end());
    const auto m = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return d;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("kolmogorov_quantile: alpha must lie in (0, 1)");
    double lo = 0.2;
    double hi = 5.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_survival(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double ks_critical(double alpha, std::size_t m) {
    return kolmogorov_quantile(alpha) / std::sqrt(static_cast<double>(m));
}

double normal_cdf(double x, double mean, double variance) {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

}  // namespace suslab::stats
