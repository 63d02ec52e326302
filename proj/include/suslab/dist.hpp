#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

/// Special functions and the Poisson/Skellam distributional kernel.
///
/// Probabilities that enter long products are kept in log space; log(0) is
/// represented by the explicit sentinel kLogZero rather than by an underflowed
/// linear value.
namespace suslab::dist {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double log_value) { return log_value == kLogZero; }

/// Poisson law of a single atom.
struct PoissonLaw {
    double rate = 0.0;
};

/// Law of X - Y with X ~ Poisson(a), Y ~ Poisson(b) independent.
struct SkellamLaw {
    double a = 0.0;
    double b = 0.0;
};

struct SkellamMoments {
    double mean = 0.0;
    double variance = 0.0;
};

struct SkellamTail {
    double exact_tail = 0.0;  ///< P(|X - Y| >= L)
    double bound = 0.0;       ///< e^{-(a+b)+ab} (a^L e^a + b^L e^b) / L!
};

/// log P(N = k) for N ~ Poisson(rate). Returns kLogZero for rate == 0, k > 0.
/// Throws DomainError for a negative rate.
double poisson_log_pmf(double rate, std::int64_t k);

double poisson_pmf(double rate, std::int64_t k);

/// Modified Bessel function of the first kind I_k(z), integer order, z >= 0.
/// Power series, truncated once a term drops below 1e-18 of the partial sum.
double bessel_i(std::int64_t k, double z);

/// log I_k(z); kLogZero when the value is exactly zero (z = 0, k != 0).
double log_bessel_i(std::int64_t k, double z);

double skellam_log_pmf(const SkellamLaw& law, std::int64_t k);

/// P(X - Y = k) = e^{-(a+b)} (a/b)^{k/2} I_k(2 sqrt(ab)).
/// b == 0 or a == 0 dispatch to the (reflected) Poisson pmf.
double skellam_pmf(const SkellamLaw& law, std::int64_t k);

/// E exp(it(X - Y)) = exp(-(a+b) + a e^{it} + b e^{-it}).
std::complex<double> skellam_cf(const SkellamLaw& law, double t);

SkellamMoments skellam_moments(const SkellamLaw& law);

/// Two-sided tail at L >= 1 together with the analytic majorant.
SkellamTail skellam_tail(const SkellamLaw& law, std::int64_t L);

/// Smallest M such that both one-sided tails beyond M hold less than 1e-18
/// of mass; used as the outer summation cutoff for pmf sweeps.
std::int64_t skellam_cutoff(const SkellamLaw& law);

/// sup over the rate grid {0.25, 0.5, ..., A}^2 of P(|X - Y| >= l), for l = 1..max_L
/// (entry l - 1).
std::vector<double> grid_sup_tails(double A, std::int64_t max_L);

/// Smallest L <= max_L with grid_sup_tails(A)[l] <= l^{-8} for every l in [L, max_L];
/// nullopt if even max_L fails.
std::optional<std::int64_t> tail_threshold(double A, std::int64_t max_L = 50);

/// Squared Hellinger distance between Poisson(a) and Poisson(b):
/// 1 - exp(-(sqrt a - sqrt b)^2 / 2).
double hellinger_sq_poisson(double a, double b);

}  // namespace suslab::dist
