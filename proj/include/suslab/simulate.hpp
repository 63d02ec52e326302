#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "suslab/intensity.hpp"
#include "suslab/random.hpp"

/// Monte Carlo engine over configurations omega in Z_+^Z: Radon-Nikodym
/// products, Hopf-sum diagnostics, the weighted-Skellam CLT, the decay of
/// the Skellam tail events, the stopping-time construction and the
/// intensity scan.
namespace suslab::sim {

using intensity::IntensityProfile;
using rng::RngSpec;

/// omega_k for k in [offset, offset + counts.size()).
struct ConfigurationWindow {
    std::int64_t offset = 0;
    std::vector<std::int64_t> counts;

    std::int64_t end() const { return offset + static_cast<std::int64_t>(counts.size()); }
    std::int64_t at(std::int64_t k) const { return counts.at(static_cast<std::size_t>(k - offset)); }
    /// omega'_k = omega_{k+n}: same counts, offset moved down by n.
    ConfigurationWindow shifted(std::int64_t n) const { return {offset - n, counts}; }
};

/// Independent omega_k ~ Poisson(a_k) for k in [lo, hi).
ConfigurationWindow sample_configuration(const IntensityProfile& profile, std::int64_t lo, std::int64_t hi,
                                         rng::Rng& rng);

inline constexpr double kCoverageTol = 1e-6;

/// Half-open index range [lo, hi) outside which every term of the shift-n
/// log RN sum is below tol in expectation (exactly zero for constant tails).
struct Support {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};
Support rn_support(const IntensityProfile& profile, std::int64_t n, double tol = kCoverageTol);

/// log (T*^n)'(omega) = sum_{k in window} [(a_k - a_{k-n}) + omega_k (eps_{k-n} - eps_k)],
/// compensated. Throws CoverageError if the window misses rn_support(profile, n, tol).
double log_rn_derivative(const IntensityProfile& profile, const ConfigurationWindow& omega, std::int64_t n,
                         double tol = kCoverageTol);

/// Worker count: SUSPENSION_LAB_WORKERS if set and positive, else the hardware concurrency.
int default_workers();

struct ExperimentInfo {
    std::string name;
    RngSpec rng;
    std::int64_t samples = 0;
    int workers = 1;
    double runtime_seconds = 0.0;
};

// ---------------------------------------------------------------- Hopf sums

struct HopfOptions {
    std::int64_t N = 256;
    std::int64_t samples = 1000;
    /// Markov events A_n = {RN_n < n^{-beta}}.
    double beta = 1.0;
    /// For power tails the window extends tail_factor * N beyond the shift range.
    std::int64_t tail_factor = 16;
};

struct HopfPoint {
    std::int64_t n = 0;
    double median_partial = 0.0;  ///< median over samples of sum_{m<=n} RN_m
    double q10_partial = 0.0;
    double q90_partial = 0.0;
    double markov_freq = 0.0;     ///< empirical P(RN_n < n^{-beta})
    std::optional<double> markov_bound;  ///< n^{-2 beta} exp(rn_square_integral(n)); chi == 0 only
};

struct HopfSummary {
    ExperimentInfo info;
    HopfOptions options;
    std::int64_t window_lo = 0;
    std::int64_t window_hi = 0;
    std::vector<HopfPoint> series;     ///< n = 1..N
    double growth_exponent = 0.0;      ///< slope of log median partial sum vs log n on [N/16, N]
    std::string indicator;             ///< growing / bounded / indeterminate
    std::int64_t markov_violations = 0;
};

inline constexpr double kGrowingAbove = 0.2;
inline constexpr double kBoundedBelow = 0.05;

std::string growth_label(double exponent);

HopfSummary hopf_diagnostic(const IntensityProfile& profile, const HopfOptions& options, const RngSpec& rng);

// ---------------------------------------------------------------- CLT

struct CltOptions {
    std::int64_t n = 10000;
    std::int64_t samples = 10000;
    std::vector<std::int64_t> checkpoints = {100, 1000, 10000};
    std::vector<double> p_levels = {1.0, 5.0, 10.0};
    double alpha = 0.01;
};

struct CltCheckpoint {
    std::int64_t n = 0;
    double beta_n = 0.0;           ///< (sum_{j<=n} eps_j^2)^{-1/2}
    double drift = 0.0;            ///< beta_n sum E X_j
    double mean = 0.0;             ///< of Y_n
    double variance = 0.0;
    double variance_stderr = 0.0;
    double target_variance = 0.0;  ///< 2a
    double exact_variance = 0.0;   ///< beta_n^2 sum eps_j^2 (a_j + a)
    bool variance_within_3sigma = false;
    double ks = 0.0;               ///< against N(0, 2a)
    double ks_critical = 0.0;
    bool ks_pass = false;
    std::vector<double> freq_above;  ///< P(sum X_j > -p) for each p level
};

struct CltSummary {
    ExperimentInfo info;
    CltOptions options;
    std::vector<CltCheckpoint> checkpoints;
};

CltSummary clt_experiment(const IntensityProfile& profile, const CltOptions& options, const RngSpec& rng);

// ---------------------------------------------------------------- tail decay

struct Claim2Options {
    std::vector<std::int64_t> n_list = {10, 100, 1000, 10000, 100000};
    std::int64_t samples = 100000;
};

struct Claim2Point {
    std::int64_t n = 0;
    double eps = 0.0;
    double threshold = 0.0;   ///< |eps_n|^{-1/2}
    std::int64_t L = 0;       ///< smallest integer exceeding the threshold
    double exact = 0.0;       ///< P(|y_n - x_n| > threshold)
    double bound = 0.0;       ///< corrected analytic majorant at L
    double eps4 = 0.0;
    double mc_freq = 0.0;
    double mc_sigma = 0.0;
    bool mc_within_3sigma = false;
    bool beats_eps4 = false;
    bool past_threshold = false;  ///< L >= L_star
};

struct Claim2Summary {
    ExperimentInfo info;
    Claim2Options options;
    double rate_max = 0.0;
    std::optional<std::int64_t> L_star;  ///< tail at l <= l^{-8} for all l in [L_star, 50]
    std::vector<Claim2Point> points;
};

Claim2Summary claim2_decay(const IntensityProfile& profile, const Claim2Options& options, const RngSpec& rng);

// ---------------------------------------------------------------- stopping time

struct StoppingOptions {
    double r = -2.0;
    double eps = 0.1;
    std::int64_t M = 10000;
    std::int64_t N = 1000000;
    std::int64_t samples = 256;
};

struct StoppingSummary {
    ExperimentInfo info;
    StoppingOptions options;
    std::int64_t successes = 0;           ///< crossing below r by N
    double success_freq = 0.0;
    std::int64_t small_suffix = 0;        ///< max_{M<j<=N} |X_j| < eps
    std::int64_t conditional_successes = 0;
    std::int64_t conditional_overshoot_ok = 0;
    double conditional_fraction = 0.0;    ///< overshoot < eps among conditional successes
    bool overshoot_bounded_by_step = true;
    double bullet_fraction = 0.0;         ///< crossing, small suffix and overshoot < eps together
    double overshoot_median = 0.0;
    double overshoot_max = 0.0;
    double crossing_index_median = 0.0;
};

StoppingSummary stopping_time_experiment(const IntensityProfile& profile, const StoppingOptions& options,
                                         const RngSpec& rng);

// ---------------------------------------------------------------- scan

struct ScanOptions {
    std::vector<double> t_grid = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0};
    HopfOptions hopf;
    double monotone_tol = 0.02;
};

struct ScanPoint {
    double t = 0.0;
    double growth_exponent = 0.0;
    std::string indicator;
    double final_median = 0.0;
};

struct ScanSummary {
    ExperimentInfo info;
    ScanOptions options;
    std::vector<ScanPoint> points;
    bool monotone = true;
    bool anomaly = false;
    std::vector<std::string> anomalies;
};

ScanSummary scan_intensity(const IntensityProfile& profile, const ScanOptions& options, const RngSpec& rng);

}  // namespace suslab::sim
