#include "suslab/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "suslab/criteria.hpp"
#include "suslab/dist.hpp"
#include "suslab/errors.hpp"
#include "suslab/numerics.hpp"
#include "suslab/stats.hpp"

namespace suslab::sim {

using intensity::epsilon_at;
using rng::PoissonSampler;
using rng::Rng;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Evaluates fn(i) for i in [0, samples) on a pool of workers. Sample i always
// draws from substream i, so the result vector does not depend on scheduling.
template <class Fn>
auto run_samples(std::int64_t samples, int workers, Fn fn) {
    using Result = decltype(fn(std::int64_t{0}));
    std::vector<Result> out(static_cast<std::size_t>(samples));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        try {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= samples) break;
                out[static_cast<std::size_t>(i)] = fn(i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(samples);
        }
    };
    const int pool = static_cast<int>(std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(samples, 1)));
    std::vector<std::thread> threads;
    for (int w = 1; w < pool; ++w) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

void require_positive(std::int64_t value, const char* what) {
    if (value < 1) throw DomainError(std::string(what) + " must be >= 1");
}

void require_condition(const IntensityProfile& profile, intensity::ConditionId id, const char* who) {
    const Tri holds = intensity::check_condition(profile, id).holds;
    if (holds != Tri::yes) {
        throw PreconditionError(std::string(who) + " requires condition " + std::string(intensity::to_string(id)) +
                                " (verdict: " + std::string(to_string(holds)) + ")");
    }
}

intensity::TailStructure require_structure(const IntensityProfile& profile) {
    auto s = intensity::tail_structure(profile.epsilon);
    if (!s) throw PreconditionError("profile has an explicit table without a declared tail family");
    return *s;
}

ExperimentInfo make_info(std::string name, const RngSpec& rng, std::int64_t samples) {
    return ExperimentInfo{std::move(name), rng, samples, default_workers(), 0.0};
}

// Ordinary least-squares slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y) {
    const auto m = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

int default_workers() {
    if (const char* env = std::getenv("SUSPENSION_LAB_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ConfigurationWindow sample_configuration(const IntensityProfile& profile, std::int64_t lo, std::int64_t hi,
                                         Rng& rng) {
    if (lo >= hi) throw DomainError("sample_configuration: need lo < hi");
    intensity::validate(profile);
    ConfigurationWindow w{lo, {}};
    w.counts.reserve(static_cast<std::size_t>(hi - lo));
    for (std::int64_t k = lo; k < hi; ++k) {
        w.counts.push_back(PoissonSampler(intensity::eval_intensity(profile, k))(rng));
    }
    return w;
}

Support rn_support(const IntensityProfile& profile, std::int64_t n, double tol) {
    if (n < 0) throw DomainError("rn_support: n must be >= 0");
    if (!(tol > 0.0)) throw DomainError("rn_support: tol must be > 0");
    const auto s = require_structure(profile);
    if (n == 0) return {0, 0};
    Support out{s.left_end + 1, s.right_start + n};
    if (s.right_power) {
        // E|term_k| <= 2 A e^{max eps} |eps_{k-n} - eps_k| <= 2 A e^{max eps} n gamma (k - n)^{-gamma-1}.
        const double g = s.right_power->gamma;
        const double peak = profile.amplitude() * std::exp(std::max(0.0, static_cast<double>(s.right_power->sign)));
        const double reach = std::pow(2.0 * peak * static_cast<double>(n) * g / tol, 1.0 / (g + 1.0));
        out.hi = std::max(out.hi, static_cast<std::int64_t>(std::ceil(reach)) + n + 1);
    }
    return out;
}

double log_rn_derivative(const IntensityProfile& profile, const ConfigurationWindow& omega, std::int64_t n,
                         double tol) {
    if (n < 0) throw DomainError("log_rn_derivative: n must be >= 0");
    intensity::validate(profile);
    if (n == 0) return 0.0;
    const Support need = rn_support(profile, n, tol);
    if (omega.offset > need.lo || omega.end() < need.hi) {
        throw CoverageError("window [" + std::to_string(omega.offset) + ", " + std::to_string(omega.end()) +
                            ") does not cover the shift-" + std::to_string(n) + " support [" +
                            std::to_string(need.lo) + ", " + std::to_string(need.hi) + ")");
    }
    const double amp = profile.amplitude();
    numerics::CompensatedSum acc;
    for (std::int64_t k = omega.offset; k < omega.end(); ++k) {
        const double ek = epsilon_at(profile.epsilon, k);
        const double eback = epsilon_at(profile.epsilon, k - n);
        acc += amp * std::exp(ek);
        acc += -amp * std::exp(eback);
        acc += static_cast<double>(omega.at(k)) * (eback - ek);
    }
    return acc.value();
}

std::string growth_label(double exponent) {
    if (exponent > kGrowingAbove) return "growing";
    if (exponent < kBoundedBelow) return "bounded";
    return "indeterminate";
}

HopfSummary hopf_diagnostic(const IntensityProfile& profile, const HopfOptions& options, const RngSpec& rng) {
    const auto start = Clock::now();
    require_positive(options.N, "hopf: N");
    require_positive(options.samples, "hopf: samples");
    if (options.tail_factor < 0) throw DomainError("hopf: tail_factor must be >= 0");
    if (!(options.beta > 0.0)) throw DomainError("hopf: beta must be > 0");
    intensity::validate(profile);
    require_condition(profile, intensity::ConditionId::eq3_1, "hopf diagnostic");
    const auto s = require_structure(profile);

    HopfSummary out;
    out.info = make_info("hopf", rng, options.samples);
    out.options = options;
    const std::int64_t N = options.N;
    const std::int64_t lo = s.left_end + 1;
    const std::int64_t hi = s.right_start + N + (s.right_power ? options.tail_factor * N : 0);
    out.window_lo = lo;
    out.window_hi = hi;

    // eps and a on [lo - N, hi); prefix sums of a give the deterministic part.
    const std::int64_t base = lo - N;
    const auto width = static_cast<std::size_t>(hi - base);
    std::vector<double> eps(width);
    std::vector<double> prefix(width + 1, 0.0);
    numerics::CompensatedSum running;
    for (std::size_t i = 0; i < width; ++i) {
        eps[i] = epsilon_at(profile.epsilon, base + static_cast<std::int64_t>(i));
        running += profile.amplitude() * std::exp(eps[i]);
        prefix[i + 1] = running.value();
    }
    const auto range_sum = [&](std::int64_t a, std::int64_t b) {  // sum a_k, k in [a, b)
        return prefix[static_cast<std::size_t>(b - base)] - prefix[static_cast<std::size_t>(a - base)];
    };
    std::vector<double> deterministic(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::int64_t n = 1; n <= N; ++n) {
        deterministic[static_cast<std::size_t>(n)] = range_sum(lo, hi) - range_sum(lo - n, hi - n);
    }
    std::vector<PoissonSampler> samplers;
    samplers.reserve(static_cast<std::size_t>(hi - lo));
    for (std::int64_t k = lo; k < hi; ++k) {
        samplers.emplace_back(profile.amplitude() * std::exp(eps[static_cast<std::size_t>(k - base)]));
    }

    struct Trace {
        std::vector<double> partial;
        std::vector<std::uint8_t> event;
    };
    const auto trace = run_samples(options.samples, out.info.workers, [&](std::int64_t i) {
        Rng gen(rng, static_cast<std::uint64_t>(i));
        std::vector<std::size_t> where;
        std::vector<double> count;
        double own = 0.0;
        for (std::size_t j = 0; j < samplers.size(); ++j) {
            const auto c = samplers[j](gen);
            if (c == 0) continue;
            const std::size_t idx = j + static_cast<std::size_t>(lo - base);
            where.push_back(idx);
            count.push_back(static_cast<double>(c));
            own += static_cast<double>(c) * eps[idx];
        }
        Trace t{std::vector<double>(static_cast<std::size_t>(N)), std::vector<std::uint8_t>(static_cast<std::size_t>(N))};
        double partial = 0.0;
        for (std::int64_t n = 1; n <= N; ++n) {
            double shifted = 0.0;
            const auto sn = static_cast<std::size_t>(n);
            for (std::size_t q = 0; q < where.size(); ++q) shifted += count[q] * eps[where[q] - sn];
            const double log_rn = deterministic[sn] + shifted - own;
            partial += std::exp(log_rn);
            t.partial[sn - 1] = partial;
            t.event[sn - 1] = log_rn < -options.beta * std::log(static_cast<double>(n)) ? 1 : 0;
        }
        return t;
    });

    const auto chi_value = intensity::chi(profile);
    const bool markov = chi_value && *chi_value == 0.0;
    std::vector<double> column(static_cast<std::size_t>(options.samples));
    for (std::int64_t n = 1; n <= N; ++n) {
        const auto idx = static_cast<std::size_t>(n - 1);
        std::int64_t events = 0;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            column[i] = trace[i].partial[idx];
            events += trace[i].event[idx];
        }
        std::sort(column.begin(), column.end());
        HopfPoint p;
        p.n = n;
        p.median_partial = stats::quantile_sorted(column, 0.5);
        p.q10_partial = stats::quantile_sorted(column, 0.1);
        p.q90_partial = stats::quantile_sorted(column, 0.9);
        p.markov_freq = static_cast<double>(events) / static_cast<double>(options.samples);
        if (markov) {
            const double log_bound = -2.0 * options.beta * std::log(static_cast<double>(n)) +
                                     criteria::rn_square_integral(profile, n);
            p.markov_bound = std::exp(log_bound);
            if (p.markov_freq > *p.markov_bound) ++out.markov_violations;
        }
        out.series.push_back(p);
    }

    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& p : out.series) {
        if (p.n * 16 < N) continue;
        lx.push_back(std::log(static_cast<double>(p.n)));
        ly.push_back(std::log(p.median_partial));
    }
    out.growth_exponent = lx.size() >= 2 ? ols_slope(lx, ly) : 0.0;
    out.indicator = growth_label(out.growth_exponent);
    out.info.runtime_seconds = seconds_since(start);
    return out;
}

CltSummary clt_experiment(const IntensityProfile& profile, const CltOptions& options, const RngSpec& rng) {
    const auto start = Clock::now();
    require_positive(options.n, "clt: n");
    if (options.samples < 2) throw DomainError("clt: samples must be >= 2");
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw DomainError("clt: alpha must lie in (0, 1)");
    require_condition(profile, intensity::ConditionId::eq3_4, "clt experiment");

    CltSummary out;
    out.info = make_info("clt", rng, options.samples);
    out.options = options;
    std::vector<std::int64_t> marks;
    for (auto c : options.checkpoints) {
        if (c >= 1 && c <= options.n) marks.push_back(c);
    }
    marks.push_back(options.n);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    const double amp = profile.amplitude();
    const auto n = static_cast<std::size_t>(options.n);
    std::vector<double> eps(n + 1, 0.0);
    std::vector<double> mean_x(n + 1, 0.0);
    std::vector<PoissonSampler> x_rate;
    x_rate.reserve(n + 1);
    x_rate.emplace_back(amp);
    for (std::size_t j = 1; j <= n; ++j) {
        eps[j] = epsilon_at(profile.epsilon, static_cast<std::int64_t>(j));
        const double aj = amp * std::exp(eps[j]);
        mean_x[j] = eps[j] * (amp - aj);
        x_rate.emplace_back(aj);
    }
    const PoissonSampler y_rate(amp);

    struct Path {
        std::vector<double> sum;       // sum X_j
        std::vector<double> centered;  // sum (X_j - E X_j)
    };
    const auto paths = run_samples(options.samples, out.info.workers, [&](std::int64_t i) {
        Rng gen(rng, static_cast<std::uint64_t>(i));
        Path p;
        numerics::CompensatedSum s;
        numerics::CompensatedSum c;
        std::size_t next = 0;
        for (std::size_t j = 1; j <= n; ++j) {
            const auto x = x_rate[j](gen);
            const auto y = y_rate(gen);
            const double X = static_cast<double>(y - x) * eps[j];
            s += X;
            c += X - mean_x[j];
            if (static_cast<std::int64_t>(j) == marks[next]) {
                p.sum.push_back(s.value());
                p.centered.push_back(c.value());
                ++next;
            }
        }
        return p;
    });

    const double crit = stats::ks_critical(options.alpha, static_cast<std::size_t>(options.samples));
    numerics::CompensatedSum eps2;
    numerics::CompensatedSum drift;
    numerics::CompensatedSum exact_var;
    std::size_t j = 1;
    for (std::size_t m = 0; m < marks.size(); ++m) {
        for (; j <= static_cast<std::size_t>(marks[m]); ++j) {
            eps2 += eps[j] * eps[j];
            drift += mean_x[j];
            exact_var += eps[j] * eps[j] * (amp * std::exp(eps[j]) + amp);
        }
        CltCheckpoint cp;
        cp.n = marks[m];
        cp.beta_n = 1.0 / std::sqrt(eps2.value());
        cp.drift = cp.beta_n * drift.value();
        cp.target_variance = 2.0 * amp;
        cp.exact_variance = cp.beta_n * cp.beta_n * exact_var.value();
        std::vector<double> y(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i) y[i] = cp.beta_n * paths[i].centered[m];
        const auto mom = stats::moments(y);
        cp.mean = mom.mean;
        cp.variance = mom.variance;
        cp.variance_stderr = mom.variance_stderr;
        cp.variance_within_3sigma = std::abs(cp.variance - cp.target_variance) <= 3.0 * cp.variance_stderr;
        cp.ks = stats::ks_statistic(std::move(y), [&](double v) { return stats::normal_cdf(v, 0.0, 2.0 * amp); });
        cp.ks_critical = crit;
        cp.ks_pass = cp.ks < crit;
        for (double p : options.p_levels) {
            std::int64_t above = 0;
            for (const auto& path : paths) above += path.sum[m] > -p ? 1 : 0;
            cp.freq_above.push_back(static_cast<double>(above) / static_cast<double>(paths.size()));
        }
        out.checkpoints.push_back(std::move(cp));
    }
    out.info.runtime_seconds = seconds_since(start);
    return out;
}

Claim2Summary claim2_decay(const IntensityProfile& profile, const Claim2Options& options, const RngSpec& rng) {
    const auto start = Clock::now();
    require_positive(options.samples, "claim2: samples");
    if (options.n_list.empty()) throw DomainError("claim2: n_list must be nonempty");
    require_condition(profile, intensity::ConditionId::eq3_4, "claim2 experiment");

    Claim2Summary out;
    out.info = make_info("claim2", rng, options.samples);
    out.options = options;
    const double amp = profile.amplitude();
    out.rate_max = amp;
    std::vector<PoissonSampler> x_rate;
    for (auto n : options.n_list) {
        Claim2Point p;
        p.n = n;
        p.eps = epsilon_at(profile.epsilon, n);
        if (p.eps == 0.0) throw DomainError("claim2: eps_n vanishes at n=" + std::to_string(n));
        p.threshold = std::pow(std::abs(p.eps), -0.5);
        p.L = static_cast<std::int64_t>(std::floor(p.threshold)) + 1;
        const double an = amp * std::exp(p.eps);
        out.rate_max = std::max(out.rate_max, an);
        const auto tail = dist::skellam_tail({amp, an}, p.L);
        p.exact = tail.exact_tail;
        p.bound = tail.bound;
        p.eps4 = std::pow(p.eps, 4);
        p.beats_eps4 = p.exact < p.eps4;
        x_rate.emplace_back(an);
        out.points.push_back(p);
    }
    out.L_star = dist::tail_threshold(std::max(0.25, out.rate_max));

    const PoissonSampler y_rate(amp);
    const auto hits = run_samples(options.samples, out.info.workers, [&](std::int64_t i) {
        Rng gen(rng, static_cast<std::uint64_t>(i));
        std::vector<std::uint8_t> h(out.points.size());
        for (std::size_t q = 0; q < out.points.size(); ++q) {
            const auto x = x_rate[q](gen);
            const auto y = y_rate(gen);
            h[q] = std::abs(static_cast<double>(y - x)) > out.points[q].threshold ? 1 : 0;
        }
        return h;
    });
    const auto m = static_cast<double>(options.samples);
    for (std::size_t q = 0; q < out.points.size(); ++q) {
        auto& p = out.points[q];
        std::int64_t count = 0;
        for (const auto& h : hits) count += h[q];
        p.mc_freq = static_cast<double>(count) / m;
        p.mc_sigma = std::sqrt(p.exact * (1.0 - p.exact) / m);
        p.mc_within_3sigma = std::abs(p.mc_freq - p.exact) <= 3.0 * p.mc_sigma;
        p.past_threshold = out.L_star && p.L >= *out.L_star;
    }
    out.info.runtime_seconds = seconds_since(start);
    return out;
}

StoppingSummary stopping_time_experiment(const IntensityProfile& profile, const StoppingOptions& options,
                                         const RngSpec& rng) {
    const auto start = Clock::now();
    if (!(options.r < -1.0)) throw DomainError("stopping: r must be < -1");
    if (!(options.eps > 0.0)) throw DomainError("stopping: eps must be > 0");
    if (options.M < 0 || options.M >= options.N) throw DomainError("stopping: need 0 <= M < N");
    require_positive(options.samples, "stopping: samples");
    require_condition(profile, intensity::ConditionId::eq3_4, "stopping-time experiment");

    StoppingSummary out;
    out.info = make_info("stopping", rng, options.samples);
    out.options = options;
    const double amp = profile.amplitude();
    const auto len = static_cast<std::size_t>(options.N - options.M);
    std::vector<double> eps(len);
    std::vector<PoissonSampler> x_rate;
    x_rate.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        eps[i] = epsilon_at(profile.epsilon, options.M + 1 + static_cast<std::int64_t>(i));
        x_rate.emplace_back(amp * std::exp(eps[i]));
    }
    const PoissonSampler y_rate(amp);

    struct Run {
        bool crossed = false;
        std::int64_t index = 0;
        double overshoot = 0.0;
        double step = 0.0;
        double suffix_max = 0.0;
    };
    const auto runs = run_samples(options.samples, out.info.workers, [&](std::int64_t s) {
        Rng gen(rng, static_cast<std::uint64_t>(s));
        Run run;
        numerics::CompensatedSum partial;
        for (std::size_t i = 0; i < len; ++i) {
            const auto x = x_rate[i](gen);
            const auto y = y_rate(gen);
            const double X = static_cast<double>(y - x) * eps[i];
            run.suffix_max = std::max(run.suffix_max, std::abs(X));
            if (run.crossed) continue;
            partial += X;
            if (partial.value() < options.r) {
                run.crossed = true;
                run.index = options.M + 1 + static_cast<std::int64_t>(i);
                run.overshoot = std::abs(partial.value() - options.r);
                run.step = std::abs(X);
            }
        }
        return run;
    });

    std::vector<double> overshoots;
    std::vector<double> indices;
    std::int64_t bullets = 0;
    for (const auto& run : runs) {
        const bool small = run.suffix_max < options.eps;
        if (small) ++out.small_suffix;
        if (!run.crossed) continue;
        ++out.successes;
        overshoots.push_back(run.overshoot);
        indices.push_back(static_cast<double>(run.index));
        if (run.overshoot > run.step) out.overshoot_bounded_by_step = false;
        if (small) {
            ++out.conditional_successes;
            if (run.overshoot < options.eps) {
                ++out.conditional_overshoot_ok;
                ++bullets;
            }
        }
    }
    const auto m = static_cast<double>(options.samples);
    out.success_freq = static_cast<double>(out.successes) / m;
    out.conditional_fraction = out.conditional_successes > 0
                                   ? static_cast<double>(out.conditional_overshoot_ok) /
                                         static_cast<double>(out.conditional_successes)
                                   : 0.0;
    out.bullet_fraction = static_cast<double>(bullets) / m;
    if (!overshoots.empty()) {
        out.overshoot_median = stats::median(overshoots);
        out.overshoot_max = *std::max_element(overshoots.begin(), overshoots.end());
        out.crossing_index_median = stats::median(indices);
    }
    out.info.runtime_seconds = seconds_since(start);
    return out;
}

ScanSummary scan_intensity(const IntensityProfile& profile, const ScanOptions& options, const RngSpec& rng) {
    const auto start = Clock::now();
    if (options.t_grid.empty()) throw DomainError("scan: t_grid must be nonempty");
    for (std::size_t i = 0; i < options.t_grid.size(); ++i) {
        if (!(options.t_grid[i] > 0.0)) throw DomainError("scan: scales must be positive");
        if (i > 0 && !(options.t_grid[i] > options.t_grid[i - 1])) {
            throw DomainError("scan: t_grid must be strictly increasing");
        }
    }
    ScanSummary out;
    out.info = make_info("scan", rng, options.hopf.samples);
    out.options = options;
    bool seen_bounded = false;
    for (double t : options.t_grid) {
        // Same substreams at every scale: inversion sampling then couples the scales.
        const auto hopf = hopf_diagnostic(profile.scaled(t), options.hopf, rng);
        ScanPoint p{t, hopf.growth_exponent, hopf.indicator, hopf.series.back().median_partial};
        if (!out.points.empty() && p.growth_exponent > out.points.back().growth_exponent + options.monotone_tol) {
            out.monotone = false;
            out.anomalies.push_back("growth exponent rises from " + std::to_string(out.points.back().growth_exponent) +
                                    " to " + std::to_string(p.growth_exponent) + " at t=" + std::to_string(t));
        }
        if (seen_bounded && p.indicator == "growing") {
            out.anomalies.push_back("growing partial sums at t=" + std::to_string(t) + " above a bounded scale");
        }
        seen_bounded = seen_bounded || p.indicator == "bounded";
        out.points.push_back(std::move(p));
    }
    out.anomaly = !out.anomalies.empty();
    out.info.runtime_seconds = seconds_since(start);
    return out;
}

}  // namespace suslab::sim
