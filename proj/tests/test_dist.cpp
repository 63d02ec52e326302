#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "suslab/dist.hpp"
#include "suslab/errors.hpp"
#include "suslab/numerics.hpp"

using namespace suslab;
using namespace suslab::dist;

namespace {
const double kGrid[] = {0.1, 0.5, 1.0, 2.0, 5.0};
}

TEST_CASE("poisson log pmf") {
    CHECK(poisson_log_pmf(1.0, 0) == rel(-1.0, 1e-15));
    CHECK(poisson_log_pmf(2.0, 2) == rel(std::log(2.0) - 2.0, 1e-15));
    const double oracle = std::log(static_cast<double>(oracle::poisson_pmf(0.1, 7)));
    CHECK(std::abs(poisson_log_pmf(0.1, 7) - oracle) < 1e-13);
    CHECK(is_log_zero(poisson_log_pmf(0.0, 3)));
    CHECK(poisson_log_pmf(0.0, 0) == 0.0);
    CHECK(poisson_pmf(0.0, 3) == 0.0);
    CHECK_THROWS_AS(poisson_log_pmf(-1.0, 0), DomainError);
}

TEST_CASE("poisson pmf sums to one") {
    for (double r : kGrid) {
        numerics::CompensatedSum s;
        for (int k = 0; k < 200; ++k) s += poisson_pmf(r, k);
        CHECK(s.value() == rel(1.0, 1e-14));
    }
}

TEST_CASE("bessel series") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(3, 0.0) == 0.0);
    CHECK(std::abs(bessel_i(0, 2.0) - static_cast<double>(oracle::bessel_i(0, 2.0))) < 1e-13);
    for (int k = -12; k <= 12; ++k) {
        for (double z : {0.3, 1.0, 4.0, 10.0, 20.0}) {
            const double ref = static_cast<double>(oracle::bessel_i(k, z));
            CHECK(bessel_i(k, z) == rel(ref, 1e-13));
            CHECK(bessel_i(k, z) == bessel_i(-k, z));
        }
    }
    // large order goes through the log route
    const double ref = static_cast<double>(oracle::bessel_i(170, 30.0));
    CHECK(bessel_i(170, 30.0) == rel(ref, 1e-12));
    CHECK(is_log_zero(log_bessel_i(2, 0.0)));
}

TEST_CASE("skellam pmf matches the convolution oracle") {
    for (double a : kGrid) {
        for (double b : kGrid) {
            for (int k = -30; k <= 30; ++k) {
                CHECK(std::abs(skellam_pmf({a, b}, k) - oracle::skellam_convolution(a, b, k)) < 1e-12);
            }
        }
    }
    CHECK(std::abs(skellam_pmf({1, 1}, 0) - oracle::skellam_convolution(1, 1, 0, 60)) < 1e-12);
}

TEST_CASE("skellam degenerate and symmetric cases") {
    for (int m = 0; m < 10; ++m) {
        const double expect = std::exp(-1.0) / std::tgamma(m + 1.0);
        CHECK(skellam_pmf({1.0, 0.0}, m) == rel(expect, 1e-14));
        CHECK(skellam_pmf({0.0, 1.0}, -m) == rel(expect, 1e-14));
    }
    CHECK(skellam_pmf({1.0, 0.0}, -1) == 0.0);
    for (double a : kGrid) {
        for (int k = 0; k <= 20; ++k) CHECK(skellam_pmf({a, a}, k) == doctest::Approx(skellam_pmf({a, a}, -k)));
    }
    CHECK_THROWS_AS(skellam_pmf({-1.0, 1.0}, 0), DomainError);
    CHECK_THROWS_AS(skellam_pmf({1.0, -0.5}, 0), DomainError);
}

TEST_CASE("skellam normalization over the adaptive cutoff") {
    for (double a : kGrid) {
        for (double b : kGrid) {
            const SkellamLaw law{a, b};
            const auto cutoff = skellam_cutoff(law);
            numerics::CompensatedSum s;
            for (std::int64_t k = -cutoff; k <= cutoff; ++k) s += skellam_pmf(law, k);
            CHECK(s.value() >= 1.0 - 1e-12);
            CHECK(s.value() <= 1.0 + 4e-16);
        }
    }
}

TEST_CASE("skellam characteristic function") {
    CHECK(std::abs(skellam_cf({1, 1}, 0.0) - std::complex<double>(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(skellam_cf({1, 1}, std::numbers::pi) - std::complex<double>(std::exp(-4.0), 0.0)) < 1e-15);
    const auto from_pmf = [](const SkellamLaw& law, double t, int kmax) {
        std::complex<double> s = 0.0;
        for (int k = -kmax; k <= kmax; ++k) s += skellam_pmf(law, k) * std::polar(1.0, k * t);
        return s;
    };
    CHECK(std::abs(skellam_cf({0.5, 2}, 1.0) - from_pmf({0.5, 2}, 1.0, 60)) < 1e-10);
    for (double a : kGrid) {
        for (double b : kGrid) {
            for (int j = 0; j <= 31; ++j) {
                const double t = 0.1 * j;
                const auto cf = skellam_cf({a, b}, t);
                CHECK(std::abs(cf - from_pmf({a, b}, t, 80)) < 1e-10);
                CHECK(std::abs(cf) <= 1.0 + 1e-15);
            }
        }
    }
}

TEST_CASE("skellam moments") {
    auto m = skellam_moments({1, 1});
    CHECK(m.mean == 0.0);
    CHECK(m.variance == 2.0);
    m = skellam_moments({3, 0});
    CHECK(m.mean == 3.0);
    CHECK(m.variance == 3.0);
    m = skellam_moments({0.2, 0.7});
    CHECK(m.mean == doctest::Approx(-0.5));
    CHECK(m.variance == doctest::Approx(0.9));
    double mean = 0.0;
    double second = 0.0;
    for (int k = -60; k <= 60; ++k) {
        const double p = oracle::skellam_convolution(0.2, 0.7, k);
        mean += k * p;
        second += static_cast<double>(k) * k * p;
    }
    CHECK(std::abs(mean - m.mean) < 1e-10);
    CHECK(std::abs(second - mean * mean - m.variance) < 1e-10);
}

TEST_CASE("skellam tail") {
    const auto t1 = skellam_tail({1, 1}, 1);
    CHECK(t1.exact_tail == rel(1.0 - skellam_pmf({1, 1}, 0), 1e-14));
    const auto t10 = skellam_tail({0.5, 0.5}, 10);
    CHECK(t10.exact_tail < 1e-8);
    CHECK(t10.exact_tail <= t10.bound);
    for (double a : kGrid) {
        for (double b : kGrid) {
            double previous = 2.0;
            for (int L = 1; L <= 30; ++L) {
                const auto t = skellam_tail({a, b}, L);
                CHECK(t.exact_tail <= previous);
                CHECK(t.exact_tail <= t.bound);
                previous = t.exact_tail;
            }
        }
    }
    CHECK_THROWS_AS(skellam_tail({1, 1}, 0), DomainError);
}

TEST_CASE("tail threshold on the rate grid") {
    for (double A : {1.0, 2.0, 5.0}) {
        const auto L = tail_threshold(A);
        REQUIRE(L.has_value());
        CHECK(*L <= 50);
        const auto sup = grid_sup_tails(A, 50);
        CHECK(sup[static_cast<std::size_t>(*L - 1)] <= std::pow(static_cast<double>(*L), -8.0));
        // Cross-check one grid point against skellam_tail.
        CHECK(sup[4] >= skellam_tail({A, A}, 5).exact_tail * (1 - 1e-12));
    }
}

TEST_CASE("hellinger between poisson laws") {
    CHECK(hellinger_sq_poisson(2.0, 2.0) == 0.0);
    CHECK(hellinger_sq_poisson(1.0, 4.0) == rel(1.0 - std::exp(-0.5), 1e-15));
    CHECK(std::abs(hellinger_sq_poisson(0.3, 2.7) - oracle::hellinger_definitional(0.3, 2.7)) < 1e-10);
    for (double a : kGrid) {
        for (double b : kGrid) {
            const double h = hellinger_sq_poisson(a, b);
            CHECK(std::abs(h - oracle::hellinger_definitional(a, b)) < 1e-10);
            CHECK(h == hellinger_sq_poisson(b, a));
            CHECK((h == 0.0) == (a == b));
            CHECK(h >= 0.0);
            CHECK(h <= 1.0);
        }
    }
}
