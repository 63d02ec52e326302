// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "suslab/cli.hpp"
#include "suslab/criteria.hpp"
#include "suslab/dist.hpp"
#include "suslab/numerics.hpp"
#include "suslab/simulate.hpp"

using namespace suslab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    /// Time spent in library calls when the criterion also runs slow oracles.
    std::optional<double> library_seconds;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = o.library_seconds.value_or(since(start));
    const bool in_time = limit_seconds <= 0.0 || secs < limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %2d: %s | %s | %.2f s%s%s\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                o.library_seconds ? " in library calls" : "", in_time ? "" : " (over time limit)");
    std::fflush(stdout);
}

const std::vector<double> kRates = {0.1, 0.5, 1.0, 2.0, 5.0};

// P(|X - Y| >= L) by direct double summation over the joint pmf, no cancellation.
std::vector<long double> direct_tails(double a, double b, int max_L) {
    constexpr int kMax = 160;
    std::vector<long double> pa(kMax + 1);
    std::vector<long double> pb(kMax + 1);
    for (int k = 0; k <= kMax; ++k) {
        pa[k] = std::exp(k * std::log(static_cast<long double>(a)) - a - std::lgamma(static_cast<long double>(k) + 1));
        pb[k] = std::exp(k * std::log(static_cast<long double>(b)) - b - std::lgamma(static_cast<long double>(k) + 1));
    }
    std::vector<long double> by_gap(kMax + 1, 0.0L);
    for (int x = 0; x <= kMax; ++x) {
        for (int y = 0; y <= kMax; ++y) by_gap[std::abs(x - y)] += pa[x] * pb[y];
    }
    std::vector<long double> suffix(kMax + 2, 0.0L);
    for (int g = kMax; g >= 0; --g) suffix[g] = suffix[g + 1] + by_gap[g];
    return {suffix.begin(), suffix.begin() + max_L + 1};
}

}  // namespace

int main() {
    criterion(1, "Skellam pmf vs Poisson convolution", 1.0, [] {
        double worst = 0.0;
        double norm_lo = 2.0;
        double norm_hi = 0.0;
        double lib = 0.0;
        for (double a : kRates) {
            for (double b : kRates) {
                for (int k = -30; k <= 30; ++k) {
                    const auto t = Clock::now();
                    const double got = dist::skellam_pmf({a, b}, k);
                    lib += since(t);
                    worst = std::max(worst, std::abs(got - oracle::skellam_convolution(a, b, k, 80)));
                }
                const auto t = Clock::now();
                const dist::SkellamLaw law{a, b};
                const auto cutoff = dist::skellam_cutoff(law);
                numerics::CompensatedSum s;
                for (std::int64_t k = -cutoff; k <= cutoff; ++k) s += dist::skellam_pmf(law, k);
                lib += since(t);
                norm_lo = std::min(norm_lo, s.value());
                norm_hi = std::max(norm_hi, s.value());
            }
        }
        // The upper end allows two ulps of rounding in the final sum.
        const bool ok = worst <= 1e-12 && norm_lo >= 1.0 - 1e-12 && norm_hi <= 1.0 + 0x1.0p-51;
        return Outcome{ok,
                       fmt("max |pmf - oracle| = %.2e, mass in [1 - %.1e, 1 + %.1e]", worst, 1.0 - norm_lo,
                           norm_hi - 1.0),
                       lib};
    });

    criterion(2, "Hellinger closed form vs definitional sum", 1.0, [] {
        double worst = 0.0;
        double lib = 0.0;
        for (double a : kRates) {
            for (double b : kRates) {
                const auto t = Clock::now();
                const double got = dist::hellinger_sq_poisson(a, b);
                lib += since(t);
                worst = std::max(worst, std::abs(got - oracle::hellinger_definitional(a, b)));
            }
        }
        return Outcome{worst <= 1e-10, fmt("max deviation %.2e", worst), lib};
    });

    criterion(3, "Skellam tail threshold and analytic bound", 5.0, [] {
        bool ok = true;
        std::string detail;
        for (double A : {1.0, 2.0, 5.0}) {
            const auto L_lib = dist::tail_threshold(A, 50);
            std::vector<long double> sup(52, 0.0L);
            bool bound_ok = true;
            const int steps = static_cast<int>(std::lround(A / 0.25));
            for (int i = 1; i <= steps; ++i) {
                for (int j = 1; j <= steps; ++j) {
                    const double a = 0.25 * i;
                    const double b = 0.25 * j;
                    const auto t = direct_tails(a, b, 50);
                    for (int L = 1; L <= 50; ++L) sup[L] = std::max(sup[L], t[L]);
                    for (int L = 1; L <= 30; ++L) {
                        const auto lib = dist::skellam_tail({a, b}, L);
                        bound_ok &= lib.exact_tail <= lib.bound;
                        bound_ok &= static_cast<double>(t[L]) <= lib.bound * (1.0 + 1e-12);
                    }
                }
            }
            std::optional<int> L_oracle;
            for (int L = 50; L >= 1 && sup[L] <= std::pow(static_cast<long double>(L), -8.0L); --L) L_oracle = L;
            const bool agree = L_lib.has_value() && L_oracle.has_value() && *L_lib == *L_oracle;
            ok &= agree && bound_ok;
            detail += fmt("A=%g: L*=%s (oracle %s)%s; ", A, L_lib ? std::to_string(*L_lib).c_str() : "none",
                          L_oracle ? std::to_string(*L_oracle).c_str() : "none", bound_ok ? "" : " bound violated");
        }
        return Outcome{ok, detail + "exact <= bound for L <= 30"};
    });

    criterion(4, "rn_square_integral slope equals 6a within 5%", 120.0, [] {
        bool ok = true;
        std::string detail;
        for (double a : {0.1, 0.5, 1.0}) {
            const auto fit = criteria::fit_growth(intensity::example_profile(a), criteria::SlopeKind::rn_square_integral);
            const double ratio = fit.slope / (6.0 * a);
            ok &= std::abs(ratio - 1.0) <= 0.05;
            detail += fmt("a=%g: slope %.4f (ratio %.4f) ", a, fit.slope, ratio);
        }
        return Outcome{ok, detail};
    });

    criterion(5, "hellinger_growth slope equals a/2 within 5%", 120.0, [] {
        bool ok = true;
        std::string detail;
        for (double a : {1.0, 2.0, 5.0}) {
            const auto fit = criteria::fit_growth(intensity::example_profile(a), criteria::SlopeKind::hellinger_growth);
            const double ratio = fit.slope / (0.5 * a);
            ok &= std::abs(ratio - 1.0) <= 0.05;
            detail += fmt("a=%g: slope %.4f (ratio %.4f) ", a, fit.slope, ratio);
        }
        return Outcome{ok, detail};
    });

    criterion(6, "certificates reproduce the regimes", 300.0, [] {
        using criteria::Verdict;
        bool ok = true;
        std::string detail;
        const std::vector<std::pair<double, Verdict>> expect = {{0.05, Verdict::conservative},
                                                               {0.1, Verdict::conservative},
                                                               {5.0, Verdict::totally_dissipative},
                                                               {8.0, Verdict::totally_dissipative},
                                                               {1.0, Verdict::inconclusive}};
        for (const auto& [a, v] : expect) {
            const auto got = criteria::classify(intensity::example_profile(a)).verdict;
            ok &= got == v;
            detail += fmt("a=%g %s; ", a, std::string(criteria::to_string(got)).c_str());
        }
        const auto br = criteria::bifurcation_bracket(intensity::example_profile(1.0));
        ok &= br.t_lower >= 0.15 && br.t_upper <= 4.2 && br.t_lower <= br.t_upper;
        detail += fmt("bracket [%.4f, %.4f]", br.t_lower, br.t_upper);
        return Outcome{ok, detail};
    });

    criterion(7, "weighted Skellam CLT", 300.0, [] {
        const auto s = sim::clt_experiment(intensity::example_profile(1.0), sim::CltOptions{}, {1, 0});
        const auto& cps = s.checkpoints;
        const auto& last = cps.back();
        bool drift_dec = true;
        bool freq_dec = true;
        std::size_t p5 = 0;
        for (std::size_t i = 0; i < s.options.p_levels.size(); ++i) {
            if (s.options.p_levels[i] == 5.0) p5 = i;
        }
        for (std::size_t i = 1; i < cps.size(); ++i) {
            drift_dec &= cps[i].drift < cps[i - 1].drift;
            freq_dec &= cps[i].freq_above[p5] < cps[i - 1].freq_above[p5];
        }
        const bool ks_ok = last.ks < last.ks_critical;
        const bool var_ok = std::abs(last.variance - 2.0) <= 3.0 * last.variance_stderr;
        return Outcome{ks_ok && var_ok && drift_dec && freq_dec,
                       fmt("KS %.4f vs %.4f %s; variance %.4f +- %.4f vs 2 (%.1f sigma, finite-n exact %.4f) %s; "
                           "drift %.3f, %.3f, %.3f %s; freq{>-5} %.4f, %.4f, %.4f %s",
                           last.ks, last.ks_critical, ks_ok ? "ok" : "FAIL", last.variance, last.variance_stderr,
                           std::abs(last.variance - 2.0) / last.variance_stderr, last.exact_variance,
                           var_ok ? "ok" : "FAIL", cps[0].drift, cps[1].drift, cps[2].drift,
                           drift_dec ? "ok" : "FAIL", cps[0].freq_above[p5], cps[1].freq_above[p5],
                           cps[2].freq_above[p5], freq_dec ? "ok" : "FAIL")};
    });

    criterion(8, "tail decay and stopping construction", 300.0, [] {
        sim::Claim2Options o;
        o.n_list = {100, 1000, 10000, 100000};
        const auto c2 = sim::claim2_decay(intensity::example_profile(1.0), o, {1, 0});
        bool tails_ok = true;
        std::string detail;
        for (const auto& p : c2.points) {
            tails_ok &= p.exact < p.eps4;
            detail += fmt("n=%lld exact %.2e vs eps^4 %.2e; ", static_cast<long long>(p.n), p.exact, p.eps4);
        }
        const auto st = sim::stopping_time_experiment(intensity::example_profile(1.0), sim::StoppingOptions{}, {1, 0});
        const bool stop_ok = st.success_freq > 0.5 && st.conditional_successes > 0 &&
                             st.conditional_overshoot_ok == st.conditional_successes;
        detail += fmt("stopping success %.3f, conditional overshoot < eps %lld/%lld", st.success_freq,
                      static_cast<long long>(st.conditional_overshoot_ok),
                      static_cast<long long>(st.conditional_successes));
        return Outcome{tails_ok && stop_ok, detail};
    });

    criterion(9, "growth indicator monotone in the scale", 300.0, [] {
        const auto s = sim::scan_intensity(intensity::example_profile(1.0), sim::ScanOptions{}, {1, 0});
        std::string detail = "exponents";
        for (const auto& p : s.points) detail += fmt(" %.3f", p.growth_exponent);
        detail += s.monotone ? ", monotone" : ", NOT monotone";
        detail += s.anomaly ? ", anomaly" : ", no anomaly";
        return Outcome{s.monotone && !s.anomaly, detail};
    });

    criterion(10, "reproducible bodies and the RN cocycle", 0.0, [] {
        const cli::Json profile{{"base", 1.0}, {"epsilon", {{"kind", "power"}, {"gamma", 0.5}, {"sign", -1}}}};
        const std::vector<std::pair<cli::Command, cli::Json>> runs = {
            {cli::Command::hopf, {{"profile", profile}, {"rng", {{"seed", 7}}}, {"params", {{"N", 64}, {"samples", 200}}}}},
            {cli::Command::claim2, {{"profile", profile}, {"rng", {{"seed", 7}}}, {"params", {{"samples", 20000}}}}},
            {cli::Command::clt,
             {{"profile", profile}, {"rng", {{"seed", 7}}}, {"params", {{"n", 1000}, {"samples", 500}, {"checkpoints", {100, 1000}}}}}},
            {cli::Command::classify, {{"profile", profile}}},
        };
        bool same = true;
        for (const auto& [cmd, doc] : runs) {
            const auto cfg = cli::parse_config(doc, cmd);
            same &= cli::run(cfg).body.dump() == cli::run(cfg).body.dump();
        }
        const auto p = intensity::example_profile(1.0);
        double worst = 0.0;
        for (std::int64_t i = 0; i < 1000; ++i) {
            const std::int64_t n = 1 + i % 10;
            const std::int64_t m = 1 + (i / 10) % 10;
            const auto s = sim::rn_support(p, n + m);
            rng::Rng r({2718, 0}, static_cast<std::uint64_t>(i));
            const auto w = sim::sample_configuration(p, s.lo - 1, s.hi + m + 1, r);
            const double lhs = sim::log_rn_derivative(p, w, n + m);
            const double rhs = sim::log_rn_derivative(p, w, m) + sim::log_rn_derivative(p, w.shifted(m), n);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return Outcome{same && worst <= 1e-9,
                       fmt("bodies %s across 4 commands; max cocycle defect %.2e over 1000 configurations",
                           same ? "identical" : "DIFFER", worst)};
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
