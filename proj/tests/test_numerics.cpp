#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "approx.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <vector>

#include "suslab/numerics.hpp"

using namespace suslab::numerics;

TEST_CASE("compensated sum keeps small addends") {
    std::vector<double> xs{1.0};
    for (int i = 0; i < 1000000; ++i) xs.push_back(1e-16);
    xs.push_back(-1.0);
    CHECK(compensated_sum(xs) == rel(1e-10, 1e-9));
    CompensatedSum s;
    s += 1e100;
    s += 1.0;
    s += -1e100;
    CHECK(s.value() == 1.0);
}

TEST_CASE("log slope fit recovers exact coefficients") {
    std::vector<double> n;
    std::vector<double> y;
    for (double v = 16; v <= 131072; v *= 2) {
        n.push_back(v);
        y.push_back(0.7 * std::log(v) - 1.3 + 2.5 / std::sqrt(v));
    }
    const auto fit = fit_log_slope(n, y);
    CHECK(fit.slope == rel(0.7, 1e-10));
    CHECK(fit.intercept == rel(-1.3, 1e-10));
    CHECK(fit.correction == rel(2.5, 1e-9));
    CHECK(fit.residual_rms < 1e-12);
    CHECK(fit.slope_stderr < 1e-10);
    CHECK_THROWS(fit_log_slope(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}));
}

TEST_CASE("smooth tail sum against zeta values") {
    for (double s : {1.5, 2.0, 3.0}) {
        const double K = 100.0;
        double head = 0.0;
        for (int k = 1; k < 100; ++k) head += std::pow(k, -s);
        const double expect = boost::math::zeta(s) - head;
        const double got = smooth_tail_sum([s](double t) { return std::pow(t, -s); }, K);
        CHECK(std::abs(got - expect) <= 1e-11 * expect + 1e-15);
    }
    // Shifted differences of the power law, the shape used by the growth sums.
    const auto f = [](double t) { return 1.0 / std::sqrt(t - 10.0) - 1.0 / std::sqrt(t); };
    long double direct = 0.0L;
    for (long k = 2000; k < 200000000L; ++k) direct += f(static_cast<double>(k));
    const double tail = 2.0 * 5.0 / std::sqrt(2e8);  // leading-order remainder beyond 2e8
    CHECK(smooth_tail_sum(f, 2000.0) == rel(static_cast<double>(direct) + tail, 1e-7));
}

TEST_CASE("log bisection brackets the switch point") {
    const auto [lo, hi] = bisect_log([](double x) { return x < 3.0; }, 1.0, 10.0, 1e-6);
    CHECK(lo < 3.0);
    CHECK(hi >= 3.0);
    CHECK(hi / lo <= 1.0 + 1e-6);
}

TEST_CASE("tri-state names") {
    CHECK(suslab::to_string(suslab::Tri::yes) == "yes");
    CHECK(suslab::to_string(suslab::Tri::no) == "no");
    CHECK(suslab::to_string(suslab::Tri::undetermined) == "undetermined");
}
