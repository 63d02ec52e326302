#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "suslab/intensity.hpp"
#include "suslab/numerics.hpp"

/// Analytic classification of the Poisson suspension: nonsingularity,
/// conservativity/dissipativity certificates, log-growth slope fits, the
/// continuous-base dissipativity bound, and bifurcation bracketing in the
/// intensity scale.
namespace suslab::criteria {

using intensity::IntensityProfile;

enum class Verdict { conservative, totally_dissipative, inconclusive, not_nonsingular };
std::string_view to_string(Verdict v);

enum class SlopeKind { rn_square_integral, hellinger_growth };
std::string_view to_string(SlopeKind k);

struct SlopeFit {
    SlopeKind kind = SlopeKind::rn_square_integral;
    double slope = 0.0;
    double intercept = 0.0;
    double correction = 0.0;     ///< coefficient of the n^{-1/2} nuisance column
    double slope_stderr = 0.0;
    double residual = 0.0;       ///< RMS deviation of the fit
    std::int64_t n_min = 0;
    std::int64_t n_max = 0;
    std::vector<std::int64_t> n;
    std::vector<double> y;
};

struct FitOptions {
    std::int64_t n_min = 16;
    std::int64_t n_max = 131072;  // 2^17
    double tol = 1e-10;
    /// Decisions require the decisive inequality to hold with this many
    /// slope standard errors to spare.
    double margin_sigmas = 3.0;
    /// Number of terms of the certificate series reported as partial sums.
    std::int64_t series_terms = 256;
};

/// Geometric grid n_min, 2 n_min, ..., n_max.
std::vector<std::int64_t> doubling_grid(std::int64_t n_min, std::int64_t n_max);

/// sum_{|n|<=N} 2 (1 - exp(-(sqrt a_n - sqrt a_{n+1})^2 / 2)).
double nonsingularity_deficit(const IntensityProfile& profile, std::int64_t N);

/// integral of ((dmu / dmu o T^{-n})^2 - 1) dmu = A sum_k (e^{3 eps_k - 2 eps_{k-n}} - e^{eps_k}).
/// Requires chi == 0 (PreconditionError otherwise).
double rn_square_integral(const IntensityProfile& profile, std::int64_t n, double tol = 1e-10);

/// || sqrt(dmu o T^n / dmu) - 1 ||_2^2 = sum_k (sqrt a_{k+n} - sqrt a_k)^2.
double hellinger_growth(const IntensityProfile& profile, std::int64_t n, double tol = 1e-10);

SlopeFit fit_growth(const IntensityProfile& profile, SlopeKind kind, const FitOptions& options = {});

struct DissipativitySeries {
    double partial = 0.0;         ///< sum_{n=1}^{N} exp(-hellinger_growth(n) / 2)
    Tri convergent = Tri::undetermined;
    SlopeFit fit;
};

DissipativitySeries dissipativity_series(const IntensityProfile& profile, std::int64_t N,
                                         const FitOptions& options = {});

// Certificates attached to a classification.
struct HellingerSeries {
    double partial = 0.0;
    double exponent = 0.0;  ///< s/2 - margin: decay exponent of the series terms
    SlopeFit fit;
};
struct BetaCertificate {
    double beta = 0.0;
    double c = 0.0;              ///< fitted slope of rn_square_integral
    double c_upper = 0.0;        ///< c + margin, the value the certificate is built on
    double series_partial = 0.0; ///< sum_{n<=N} n^{-2 beta} exp(rn_square_integral(n))
    SlopeFit fit;
};
struct LimitSetsDisjoint {
    intensity::LimitSets sets;
};
struct ChiNonzero {
    double chi = 0.0;
};
using Certificate = std::variant<std::monostate, HellingerSeries, BetaCertificate, LimitSetsDisjoint, ChiNonzero>;

struct ClassificationReport {
    Verdict verdict = Verdict::inconclusive;
    Certificate certificate;
    IntensityProfile profile;
    /// Evidence gathered along the way (present once the step was reached).
    std::optional<double> chi;
    std::optional<SlopeFit> dissipativity_fit;
    std::optional<SlopeFit> conservativity_fit;
};

ClassificationReport conservativity_certificate(const IntensityProfile& profile,
                                                const FitOptions& options = {});

ClassificationReport classify(const IntensityProfile& profile, const FitOptions& options = {});

struct BracketOptions {
    FitOptions fit;
    double t_min = 1.0 / 4096.0;
    double t_max = 4096.0;
    int grid_points = 25;
    double rel_tol = 1e-4;
};

struct BifurcationBracket {
    double t_lower = 0.0;  ///< sup of scales with a conservative certificate
    double t_upper = 0.0;  ///< inf of scales with a dissipative certificate
    std::vector<std::pair<double, Verdict>> scan;
    ClassificationReport lower_report;
    ClassificationReport upper_report;
};

/// Throws AnomalyError if verdicts along the scale grid are not ordered
/// conservative <= inconclusive <= totally_dissipative.
BifurcationBracket bifurcation_bracket(const IntensityProfile& profile, const BracketOptions& options = {});

/// Densities over a uniform partition of [0,1]: a finite window of cells
/// plus constant tails to the left (n -> -inf) and right (n -> +inf).
struct DensityProfile {
    std::vector<std::vector<double>> window;
    std::vector<double> left_tail;
    std::vector<double> right_tail;
};

struct ContinuousBaseBound {
    double chi = 0.0;            ///< ||right||_1 - ||left||_1
    double D = 0.0;              ///< sup_k ||a_k||_1
    double series_partial = 0.0; ///< sum_{n<=N} exp(-n chi^2 / (216 D^2))
    double ratio = 1.0;          ///< geometric ratio exp(-chi^2 / (216 D^2))
    Tri dissipative = Tri::undetermined;
};

ContinuousBaseBound continuous_base_bound(const DensityProfile& densities, std::int64_t N);

struct MixingBound {
    double full_product = 0.0;    ///< <U^n 1, 1> = exp(-hellinger_growth(n) / 2)
    double window_product = 0.0;  ///< product over n/3 <= k <= 2n/3 only
    double delta = 0.0;           ///< min Hellinger distance across the window
    double bound = 0.0;           ///< (1 - delta^2)^{n/3}
};

/// Quantities behind the exponential decay of <U^n 1, 1> when the limit
/// sets at -inf and +inf are disjoint.
MixingBound mixing_bound(const IntensityProfile& profile, std::int64_t n);

}  // namespace suslab::criteria
