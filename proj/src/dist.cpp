#include "suslab/dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "suslab/errors.hpp"
#include "suslab/numerics.hpp"

namespace suslab::dist {

namespace {

constexpr double kSeriesRelTol = 1e-18;
constexpr int kSeriesMaxTerms = 10000;
constexpr double kNegligible = 1e-18;
constexpr int kNegligibleRun = 50;

void require_rate(double rate, const char* what) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw DomainError(std::string(what) + ": rate must be finite and >= 0, got " +
                          std::to_string(rate));
    }
}

// Sum_{j>=0} (z^2/4)^j k! / (j! (j+k)!), i.e. I_k(z) / ((z/2)^k / k!).
double bessel_series(std::int64_t order, double z) {
    const double q = 0.25 * z * z;
    const double k = static_cast<double>(order);
    double term = 1.0;
    double sum = 1.0;
    for (int j = 0; j < kSeriesMaxTerms; ++j) {
        const double jj = static_cast<double>(j + 1);
        term *= q / (jj * (jj + k));
        sum += term;
        if (term < kSeriesRelTol * sum) break;
    }
    return sum;
}

double log_add_exp(double x, double y) {
    if (x == kLogZero) return y;
    if (y == kLogZero) return x;
    const double hi = std::max(x, y);
    return hi + std::log1p(std::exp(-std::abs(x - y)));
}

}  // namespace

double poisson_log_pmf(double rate, std::int64_t k) {
    require_rate(rate, "poisson_log_pmf");
    if (k < 0) return kLogZero;
    if (rate == 0.0) return k == 0 ? 0.0 : kLogZero;
    const double kd = static_cast<double>(k);
    return -rate + kd * std::log(rate) - std::lgamma(kd + 1.0);
}

double poisson_pmf(double rate, std::int64_t k) {
    const double lp = poisson_log_pmf(rate, k);
    return is_log_zero(lp) ? 0.0 : std::exp(lp);
}

double log_bessel_i(std::int64_t k, double z) {
    if (!(z >= 0.0)) throw DomainError("bessel_i: z must be >= 0");
    const std::int64_t order = k < 0 ? -k : k;
    if (z == 0.0) return order == 0 ? 0.0 : kLogZero;
    const double kd = static_cast<double>(order);
    return kd * std::log(0.5 * z) - std::lgamma(kd + 1.0) + std::log(bessel_series(order, z));
}

double bessel_i(std::int64_t k, double z) {
    if (!(z >= 0.0)) throw DomainError("bessel_i: z must be >= 0");
    const std::int64_t order = k < 0 ? -k : k;
    if (z == 0.0) return order == 0 ? 1.0 : 0.0;
    if (order > 150) {
        const double lv = log_bessel_i(order, z);
        return is_log_zero(lv) ? 0.0 : std::exp(lv);
    }
    double prefactor = 1.0;
    const double half_z = 0.5 * z;
    for (std::int64_t i = 1; i <= order; ++i) prefactor *= half_z / static_cast<double>(i);
    return prefactor * bessel_series(order, z);
}

double skellam_log_pmf(const SkellamLaw& law, std::int64_t k) {
    require_rate(law.a, "skellam_pmf(a)");
    require_rate(law.b, "skellam_pmf(b)");
    if (law.b == 0.0) return poisson_log_pmf(law.a, k);
    if (law.a == 0.0) return poisson_log_pmf(law.b, -k);
    const double z = 2.0 * std::sqrt(law.a * law.b);
    const double half_k = 0.5 * static_cast<double>(k);
    return -(law.a + law.b) + half_k * (std::log(law.a) - std::log(law.b)) + log_bessel_i(k, z);
}

double skellam_pmf(const SkellamLaw& law, std::int64_t k) {
    const double lp = skellam_log_pmf(law, k);
    return is_log_zero(lp) ? 0.0 : std::exp(lp);
}

std::complex<double> skellam_cf(const SkellamLaw& law, double t) {
    const double s = law.a + law.b;
    const double re = s * (std::cos(t) - 1.0);
    const double im = (law.a - law.b) * std::sin(t);
    return std::exp(std::complex<double>(re, im));
}

SkellamMoments skellam_moments(const SkellamLaw& law) {
    return {law.a - law.b, law.a + law.b};
}

std::int64_t skellam_cutoff(const SkellamLaw& law) {
    const auto mode_reach = static_cast<std::int64_t>(std::ceil(std::max(law.a, law.b)));
    int run = 0;
    std::int64_t k = mode_reach;
    for (;; ++k) {
        const bool small = skellam_pmf(law, k) < kNegligible && skellam_pmf(law, -k) < kNegligible;
        run = small ? run + 1 : 0;
        if (run >= kNegligibleRun) break;
    }
    return k;
}

SkellamTail skellam_tail(const SkellamLaw& law, std::int64_t L) {
    if (L < 1) throw DomainError("skellam_tail: L must be >= 1");
    numerics::CompensatedSum tail;
    int run = 0;
    const auto mode_reach = static_cast<std::int64_t>(std::ceil(std::max(law.a, law.b)));
    for (std::int64_t k = L;; ++k) {
        const double up = skellam_pmf(law, k);
        const double down = skellam_pmf(law, -k);
        tail += up;
        tail += down;
        const bool small = up < kNegligible && down < kNegligible;
        run = small ? run + 1 : 0;
        if (run >= kNegligibleRun && k >= mode_reach) break;
    }

    const double Ld = static_cast<double>(L);
    const double log_a_part = law.a > 0.0 ? Ld * std::log(law.a) + law.a : kLogZero;
    const double log_b_part = law.b > 0.0 ? Ld * std::log(law.b) + law.b : kLogZero;
    const double log_sum = log_add_exp(log_a_part, log_b_part);
    SkellamTail out;
    out.exact_tail = tail.value();
    out.bound = is_log_zero(log_sum)
                    ? 0.0
                    : std::exp(-(law.a + law.b) + law.a * law.b + log_sum - std::lgamma(Ld + 1.0));
    return out;
}

std::vector<double> grid_sup_tails(double A, std::int64_t max_L) {
    if (!(A >= 0.25) || !std::isfinite(A)) throw DomainError("grid_sup_tails: A must be >= 0.25");
    if (max_L < 1) throw DomainError("grid_sup_tails: max_L must be >= 1");
    std::vector<double> sup(static_cast<std::size_t>(max_L), 0.0);
    const auto steps = static_cast<int>(std::floor(A / 0.25 + 1e-9));
    for (int i = 1; i <= steps; ++i) {
        for (int j = 1; j <= steps; ++j) {
            const SkellamLaw law{0.25 * i, 0.25 * j};
            const std::int64_t cutoff = std::max(skellam_cutoff(law), max_L);
            // Accumulate the two-sided tail from the outside in.
            numerics::CompensatedSum tail;
            for (std::int64_t k = cutoff; k >= 1; --k) {
                tail += skellam_pmf(law, k);
                tail += skellam_pmf(law, -k);
                if (k <= max_L) {
                    auto& slot = sup[static_cast<std::size_t>(k - 1)];
                    slot = std::max(slot, tail.value());
                }
            }
        }
    }
    return sup;
}

std::optional<std::int64_t> tail_threshold(double A, std::int64_t max_L) {
    const auto sup = grid_sup_tails(A, max_L);
    std::optional<std::int64_t> best;
    for (std::int64_t l = max_L; l >= 1; --l) {
        if (sup[static_cast<std::size_t>(l - 1)] > std::pow(static_cast<double>(l), -8.0)) break;
        best = l;
    }
    return best;
}

double hellinger_sq_poisson(double a, double b) {
    require_rate(a, "hellinger_sq_poisson(a)");
    require_rate(b, "hellinger_sq_poisson(b)");
    const double d = std::sqrt(a) - std::sqrt(b);
    return -std::expm1(-0.5 * d * d);
}

}  // namespace suslab::dist
