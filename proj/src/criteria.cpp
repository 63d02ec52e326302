#include "suslab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "suslab/dist.hpp"
#include "suslab/errors.hpp"

namespace suslab::criteria {

using intensity::epsilon_at;
using intensity::TailStructure;

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::conservative: return "conservative";
        case Verdict::totally_dissipative: return "totally_dissipative";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::not_nonsingular: return "not_nonsingular";
    }
    return "inconclusive";
}

std::string_view to_string(SlopeKind k) {
    return k == SlopeKind::rn_square_integral ? "rn_square_integral" : "hellinger_growth";
}

namespace {

// Stable eps(t + shift) - eps(t) on the right tail; shift may be negative.
double tail_eps_diff(const TailStructure& s, double t, double shift) {
    if (!s.right_power) return 0.0;
    const double g = s.right_power->gamma;
    const double head = static_cast<double>(s.right_power->sign) * std::pow(t, -g);
    return head * std::expm1(-g * std::log1p(shift / t));
}

TailStructure require_structure(const IntensityProfile& profile) {
    auto s = intensity::tail_structure(profile.epsilon);
    if (!s) throw PreconditionError("profile has an explicit table without a declared tail family");
    return *s;
}

// Sum of term(k) over k >= first. Terms vanish identically once k >= finite_end
// (when the right tail is constant). With a power tail the sum is taken
// directly up to a cutoff and completed with the Euler-Maclaurin tail of
// tail_term; the cutoff doubles until two successive totals agree to tol.
template <class Term, class TailTerm>
double shift_series(const TailStructure& s, std::int64_t first, std::int64_t finite_end,
                    std::int64_t smooth_from, Term term, TailTerm tail_term, double tol) {
    numerics::CompensatedSum direct;
    if (!s.right_power) {
        for (std::int64_t k = first; k < finite_end; ++k) direct += term(k);
        return direct.value();
    }
    std::int64_t k = first;
    std::int64_t cutoff = std::max(smooth_from, first);
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int round = 0; round < 12; ++round) {
        for (; k < cutoff; ++k) direct += term(k);
        const double tail = numerics::smooth_tail_sum(tail_term, static_cast<double>(cutoff));
        const double total = direct.value() + tail;
        if (std::abs(total - previous) <= tol * std::max(1.0, std::abs(total))) return total;
        previous = total;
        cutoff *= 2;
    }
    return previous;
}

}  // namespace

std::vector<std::int64_t> doubling_grid(std::int64_t n_min, std::int64_t n_max) {
    if (n_min < 1 || n_max < n_min) throw DomainError("doubling_grid: need 1 <= n_min <= n_max");
    std::vector<std::int64_t> grid;
    for (std::int64_t n = n_min; n <= n_max; n *= 2) grid.push_back(n);
    return grid;
}

double nonsingularity_deficit(const IntensityProfile& profile, std::int64_t N) {
    if (N < 1) throw DomainError("nonsingularity_deficit: N must be >= 1");
    intensity::validate(profile);
    numerics::CompensatedSum acc;
    double current = intensity::eval_intensity(profile, -N);
    for (std::int64_t n = -N; n <= N; ++n) {
        const double next = intensity::eval_intensity(profile, n + 1);
        acc += 2.0 * dist::hellinger_sq_poisson(current, next);
        current = next;
    }
    return acc.value();
}

double rn_square_integral(const IntensityProfile& profile, std::int64_t n, double tol) {
    if (n < 1) throw DomainError("rn_square_integral: n must be >= 1");
    const auto chi_value = intensity::chi(profile);
    if (!chi_value || *chi_value != 0.0) {
        throw PreconditionError("rn_square_integral requires chi == 0");
    }
    const TailStructure s = require_structure(profile);
    const double amp = profile.amplitude();
    const auto& family = profile.epsilon;
    const auto term = [&](std::int64_t k) {
        const double ek = epsilon_at(family, k);
        return amp * std::exp(ek) * std::expm1(2.0 * (ek - epsilon_at(family, k - n)));
    };
    const auto nd = static_cast<double>(n);
    const auto tail_term = [&](double t) {
        const double back = tail_eps_diff(s, t, -nd);  // eps(t - n) - eps(t)
        return amp * std::exp(s.right_eps_at(t)) * std::expm1(-2.0 * back);
    };
    // eps_k == eps_{k-n} on the left constant region.
    const std::int64_t first = s.left_end + 1;
    const std::int64_t finite_end = s.right_start + n;
    const std::int64_t smooth_from = s.right_start + n + std::max<std::int64_t>(256, 2 * n);
    return shift_series(s, first, finite_end, smooth_from, term, tail_term, tol);
}

double hellinger_growth(const IntensityProfile& profile, std::int64_t n, double tol) {
    if (n < 1) throw DomainError("hellinger_growth: n must be >= 1");
    intensity::validate(profile);
    const TailStructure s = require_structure(profile);
    const double amp = profile.amplitude();
    const auto& family = profile.epsilon;
    const auto term = [&](std::int64_t k) {
        const double ek = epsilon_at(family, k);
        const double h = std::expm1(0.5 * (epsilon_at(family, k + n) - ek));
        return amp * std::exp(ek) * h * h;
    };
    const auto nd = static_cast<double>(n);
    const auto tail_term = [&](double t) {
        const double h = std::expm1(0.5 * tail_eps_diff(s, t, nd));
        return amp * std::exp(s.right_eps_at(t)) * h * h;
    };
    const std::int64_t first = s.left_end - n + 1;
    const std::int64_t finite_end = s.right_start;
    const std::int64_t smooth_from = s.right_start + std::max<std::int64_t>(256, 2 * n);
    return shift_series(s, first, finite_end, smooth_from, term, tail_term, tol);
}

SlopeFit fit_growth(const IntensityProfile& profile, SlopeKind kind, const FitOptions& options) {
    SlopeFit fit;
    fit.kind = kind;
    fit.n_min = options.n_min;
    fit.n_max = options.n_max;
    fit.n = doubling_grid(options.n_min, options.n_max);
    std::vector<double> nd;
    for (auto n : fit.n) {
        nd.push_back(static_cast<double>(n));
        fit.y.push_back(kind == SlopeKind::rn_square_integral ? rn_square_integral(profile, n, options.tol)
                                                              : hellinger_growth(profile, n, options.tol));
    }
    const auto ls = numerics::fit_log_slope(nd, fit.y);
    fit.slope = ls.slope;
    fit.intercept = ls.intercept;
    fit.correction = ls.correction;
    fit.slope_stderr = ls.slope_stderr;
    fit.residual = ls.residual_rms;
    return fit;
}

DissipativitySeries dissipativity_series(const IntensityProfile& profile, std::int64_t N,
                                         const FitOptions& options) {
    if (N < 1) throw DomainError("dissipativity_series: N must be >= 1");
    DissipativitySeries out;
    numerics::CompensatedSum partial;
    for (std::int64_t n = 1; n <= N; ++n) {
        partial += std::exp(-0.5 * hellinger_growth(profile, n, options.tol));
    }
    out.partial = partial.value();
    out.fit = fit_growth(profile, SlopeKind::hellinger_growth, options);
    // Terms behave like n^{-s/2}; the series converges iff s/2 > 1.
    const double margin = options.margin_sigmas * out.fit.slope_stderr;
    if (out.fit.slope - margin > 2.0) {
        out.convergent = Tri::yes;
    } else if (out.fit.slope + margin < 2.0) {
        out.convergent = Tri::no;
    } else {
        out.convergent = Tri::undetermined;
    }
    return out;
}

ClassificationReport conservativity_certificate(const IntensityProfile& profile, const FitOptions& options) {
    const auto chi_value = intensity::chi(profile);
    if (!chi_value || *chi_value != 0.0) {
        throw PreconditionError("conservativity certificate requires chi == 0");
    }
    if (intensity::check_condition(profile, intensity::ConditionId::eq3_1).holds != Tri::yes) {
        throw PreconditionError("conservativity certificate requires condition eq3_1");
    }
    ClassificationReport report;
    report.profile = profile;
    report.chi = chi_value;
    SlopeFit fit = fit_growth(profile, SlopeKind::rn_square_integral, options);
    report.conservativity_fit = fit;

    const double c = fit.slope;
    const double c_upper = c + options.margin_sigmas * fit.slope_stderr;
    if (!(c_upper < 1.0)) {
        report.verdict = Verdict::inconclusive;
        return report;
    }
    // Admissible beta: c/2 + 1/2 < beta <= 1. Take the midpoint of that interval.
    const double lower = 0.5 * (1.0 + c_upper);
    double beta = lower + 0.25 * (1.0 - c_upper);
    beta = std::clamp(beta, std::nextafter(lower, 2.0), 1.0);

    numerics::CompensatedSum series;
    for (std::int64_t n = 1; n <= options.series_terms; ++n) {
        const double nd = static_cast<double>(n);
        series += std::exp(-2.0 * beta * std::log(nd) + rn_square_integral(profile, n, options.tol));
    }
    BetaCertificate cert;
    cert.beta = beta;
    cert.c = c;
    cert.c_upper = c_upper;
    cert.series_partial = series.value();
    cert.fit = std::move(fit);
    report.verdict = Verdict::conservative;
    report.certificate = std::move(cert);
    return report;
}

ClassificationReport classify(const IntensityProfile& profile, const FitOptions& options) {
    intensity::validate(profile);
    ClassificationReport report;
    report.profile = profile;

    const Tri nonsingular = intensity::check_condition(profile, intensity::ConditionId::eq3_1).holds;
    if (nonsingular == Tri::no) {
        report.verdict = Verdict::not_nonsingular;
        return report;
    }
    if (nonsingular == Tri::undetermined) {
        report.verdict = Verdict::inconclusive;
        return report;
    }

    report.chi = intensity::chi(profile);
    if (report.chi && *report.chi != 0.0) {
        report.verdict = Verdict::totally_dissipative;
        report.certificate = ChiNonzero{*report.chi};
        return report;
    }
    if (const auto sets = intensity::limit_sets(profile); sets && sets->disjoint()) {
        report.verdict = Verdict::totally_dissipative;
        report.certificate = LimitSetsDisjoint{*sets};
        return report;
    }

    const auto series = dissipativity_series(profile, options.series_terms, options);
    report.dissipativity_fit = series.fit;
    if (series.convergent == Tri::yes) {
        const double margin = options.margin_sigmas * series.fit.slope_stderr;
        report.verdict = Verdict::totally_dissipative;
        report.certificate = HellingerSeries{series.partial, 0.5 * (series.fit.slope - margin), series.fit};
        return report;
    }

    if (report.chi && *report.chi == 0.0) {
        auto cons = conservativity_certificate(profile, options);
        report.conservativity_fit = cons.conservativity_fit;
        if (cons.verdict == Verdict::conservative) {
            report.verdict = Verdict::conservative;
            report.certificate = std::move(cons.certificate);
            return report;
        }
    }
    report.verdict = Verdict::inconclusive;
    return report;
}

namespace {

int verdict_rank(Verdict v) {
    switch (v) {
        case Verdict::conservative: return 0;
        case Verdict::inconclusive: return 1;
        case Verdict::totally_dissipative: return 2;
        case Verdict::not_nonsingular: return -1;
    }
    return -1;
}

}  // namespace

BifurcationBracket bifurcation_bracket(const IntensityProfile& profile, const BracketOptions& options) {
    intensity::validate(profile);
    if (!(options.t_min > 0.0) || !(options.t_max > options.t_min) || options.grid_points < 2) {
        throw DomainError("bifurcation_bracket: need 0 < t_min < t_max and >= 2 grid points");
    }
    BifurcationBracket out;
    const auto verdict_at = [&](double t) { return classify(profile.scaled(t), options.fit).verdict; };

    std::vector<double> grid;
    const double ratio = std::pow(options.t_max / options.t_min, 1.0 / (options.grid_points - 1));
    for (int i = 0; i < options.grid_points; ++i) grid.push_back(options.t_min * std::pow(ratio, i));

    int last_rank = 0;
    std::optional<std::size_t> last_conservative;
    std::optional<std::size_t> first_dissipative;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Verdict v = verdict_at(grid[i]);
        out.scan.emplace_back(grid[i], v);
        const int rank = verdict_rank(v);
        if (rank < 0 || rank < last_rank) {
            throw AnomalyError("monotonicity violated: verdict " + std::string(to_string(v)) +
                               " at scale " + std::to_string(grid[i]) + " follows a higher verdict");
        }
        last_rank = rank;
        if (v == Verdict::conservative) last_conservative = i;
        if (v == Verdict::totally_dissipative && !first_dissipative) first_dissipative = i;
    }

    if (!last_conservative) {
        out.t_lower = 0.0;
    } else if (*last_conservative + 1 == grid.size()) {
        out.t_lower = grid.back();
    } else {
        const std::size_t i = *last_conservative;
        out.t_lower = numerics::bisect_log(
                          [&](double t) { return verdict_at(t) == Verdict::conservative; }, grid[i],
                          grid[i + 1], options.rel_tol)
                          .first;
    }
    if (!first_dissipative) {
        out.t_upper = std::numeric_limits<double>::infinity();
    } else if (*first_dissipative == 0) {
        out.t_upper = grid.front();
    } else {
        const std::size_t i = *first_dissipative;
        out.t_upper = numerics::bisect_log(
                          [&](double t) { return verdict_at(t) != Verdict::totally_dissipative; },
                          grid[i - 1], grid[i], options.rel_tol)
                          .second;
    }
    if (out.t_lower > 0.0) out.lower_report = classify(profile.scaled(out.t_lower), options.fit);
    if (std::isfinite(out.t_upper)) out.upper_report = classify(profile.scaled(out.t_upper), options.fit);
    return out;
}

ContinuousBaseBound continuous_base_bound(const DensityProfile& densities, std::int64_t N) {
    if (N < 1) throw DomainError("continuous_base_bound: N must be >= 1");
    const std::size_t cells = densities.left_tail.size();
    if (cells == 0 || densities.right_tail.size() != cells) {
        throw DomainError("continuous_base_bound: tails must be nonempty and of equal length");
    }
    const auto norm1 = [cells](const std::vector<double>& v) {
        if (v.size() != cells) throw DomainError("continuous_base_bound: inconsistent partition size");
        numerics::CompensatedSum acc;
        for (double x : v) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                throw DomainError("continuous_base_bound: density entries must be strictly positive");
            }
            acc += x;
        }
        return acc.value() / static_cast<double>(cells);
    };
    ContinuousBaseBound out;
    const double right = norm1(densities.right_tail);
    const double left = norm1(densities.left_tail);
    out.chi = right - left;
    out.D = std::max(right, left);
    for (const auto& cell : densities.window) out.D = std::max(out.D, norm1(cell));

    const double rate = out.chi * out.chi / (216.0 * out.D * out.D);
    out.ratio = std::exp(-rate);
    numerics::CompensatedSum series;
    for (std::int64_t n = 1; n <= N; ++n) series += std::exp(-rate * static_cast<double>(n));
    out.series_partial = series.value();
    const bool nonzero = std::abs(out.chi) > 64.0 * std::numeric_limits<double>::epsilon() * out.D;
    out.dissipative = nonzero ? Tri::yes : Tri::undetermined;
    return out;
}

MixingBound mixing_bound(const IntensityProfile& profile, std::int64_t n) {
    if (n < 3) throw DomainError("mixing_bound: n must be >= 3");
    MixingBound out;
    out.full_product = std::exp(-0.5 * hellinger_growth(profile, n));
    const std::int64_t lo = (n + 2) / 3;   // ceil(n/3)
    const std::int64_t hi = (2 * n) / 3;   // floor(2n/3)
    double log_product = 0.0;
    double min_h = std::numeric_limits<double>::infinity();
    for (std::int64_t k = lo; k <= hi; ++k) {
        const double h2 = dist::hellinger_sq_poisson(intensity::eval_intensity(profile, k - n),
                                                     intensity::eval_intensity(profile, k));
        log_product += std::log1p(-h2);
        min_h = std::min(min_h, std::sqrt(h2));
    }
    out.window_product = std::exp(log_product);
    out.delta = min_h;
    out.bound = std::pow(1.0 - min_h * min_h, static_cast<double>(n) / 3.0);
    return out;
}

}  // namespace suslab::criteria
