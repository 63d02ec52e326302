#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "approx.hpp"

#include <cmath>

#include "suslab/errors.hpp"
#include "suslab/intensity.hpp"

using namespace suslab;
using namespace suslab::intensity;

TEST_CASE("evaluation") {
    CHECK(eval_intensity({1.0, ZeroEps{}, 1.0}, 5) == 1.0);
    CHECK(eval_intensity({2.0, PowerEps{0.5, -1}, 1.0}, 4) == doctest::Approx(2.0 * std::exp(-0.5)));
    CHECK(eval_intensity({1.0, PowerEps{0.5, -1}, 3.0}, 9) == doctest::Approx(3.0 * std::exp(-1.0 / 3.0)));
    const IntensityProfile p = example_profile(1.0);
    CHECK(eval_intensity(p, 1) == 1.0);
    CHECK(eval_intensity(p, -7) == 1.0);
    CHECK(epsilon_at(StepEps{0.2, 0.7}, 0) == 0.2);
    CHECK(epsilon_at(StepEps{0.2, 0.7}, 1) == 0.7);
    ExplicitEps ex{{{3, 0.25}}, PowerEps{}};
    CHECK(epsilon_at(ex, 3) == 0.25);
    CHECK(epsilon_at(ex, 4) == -0.5);
}

TEST_CASE("scaling is multiplicative") {
    for (const EpsilonFamily& e : {EpsilonFamily{PowerEps{}}, EpsilonFamily{StepEps{-0.3, 0.4}}}) {
        const IntensityProfile p{1.7, e, 1.0};
        for (double t : {0.05, 0.5, 1.0, 3.0, 40.0}) {
            for (int n = -20; n <= 20; ++n) {
                CHECK(eval_intensity(p.scaled(t), n) == rel(t * eval_intensity(p, n), 1e-15));
            }
        }
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(validate({-1.0, ZeroEps{}, 1.0}), DomainError);
    CHECK_THROWS_AS(validate({1.0, ZeroEps{}, 0.0}), DomainError);
    CHECK_THROWS_AS(validate({1.0, PowerEps{0.0, -1}, 1.0}), DomainError);
    CHECK_THROWS_AS(validate({1.0, PowerEps{0.5, 2}, 1.0}), DomainError);
    CHECK_THROWS_AS(validate({1.0, ExplicitEps{{{1, NAN}}, std::nullopt}, 1.0}), DomainError);
    CHECK_NOTHROW(validate(example_profile(0.3)));
}

TEST_CASE("condition verdicts") {
    const auto ex38 = example_profile(1.0);
    CHECK(check_condition(ex38, ConditionId::eq3_4).holds == Tri::yes);
    CHECK(check_condition(ex38, ConditionId::eq3_1).holds == Tri::yes);

    const auto zero = check_condition({1.0, ZeroEps{}, 1.0}, ConditionId::eq3_1);
    CHECK(zero.holds == Tri::yes);
    REQUIRE(zero.evidence.size() == 4);
    for (const auto& e : zero.evidence) CHECK(e.partial == 0.0);
    CHECK(zero.evidence[0].n == 100);
    CHECK(zero.evidence[3].n == 100000);

    CHECK(check_condition({1.0, PowerEps{1.0, -1}, 1.0}, ConditionId::eq3_4).holds == Tri::no);
}

TEST_CASE("power family truth table") {
    struct Row {
        double gamma;
        Tri eq3_4;
    };
    for (const Row& row : {Row{0.2, Tri::no}, Row{0.26, Tri::yes}, Row{0.3, Tri::yes}, Row{0.5, Tri::yes},
                           Row{0.6, Tri::no}, Row{1.0, Tri::no}}) {
        const IntensityProfile p{1.0, PowerEps{row.gamma, -1}, 1.0};
        CAPTURE(row.gamma);
        CHECK(check_condition(p, ConditionId::eq3_4).holds == row.eq3_4);
        CHECK(check_condition(p, ConditionId::eq3_1).holds == Tri::yes);
        CHECK(check_condition(p, ConditionId::aut1).holds == Tri::yes);
        CHECK(check_condition(p, ConditionId::chi_zero).holds == Tri::yes);
        // evidence: sum eps^2 grows with N and is reported alongside sum eps^4
        const auto ev = check_condition(p, ConditionId::eq3_4).evidence;
        for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].partial >= ev[i - 1].partial);
        for (const auto& e : ev) CHECK(e.secondary.has_value());
    }
}

TEST_CASE("nonsingularity evidence is monotone and bounded") {
    const auto ev = check_condition(example_profile(1.0), ConditionId::eq3_1).evidence;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        CHECK(ev[i].partial >= ev[i - 1].partial);
        CHECK(ev[i].partial - ev[i - 1].partial < 1e-3);
    }
}

TEST_CASE("explicit tables") {
    const IntensityProfile no_tail{1.0, ExplicitEps{{{2, 0.1}}, std::nullopt}, 1.0};
    for (auto id : {ConditionId::eq3_1, ConditionId::eq3_4, ConditionId::aut1, ConditionId::chi_zero}) {
        CHECK(check_condition(no_tail, id).holds == Tri::undetermined);
    }
    CHECK_FALSE(chi(no_tail).has_value());
    CHECK_FALSE(limit_sets(no_tail).has_value());
    CHECK_FALSE(tail_structure(no_tail.epsilon).has_value());

    const IntensityProfile prefixed{1.0, ExplicitEps{{{5, -0.9}}, PowerEps{0.5, -1}}, 1.0};
    CHECK(check_condition(prefixed, ConditionId::eq3_4).holds == Tri::yes);
    const IntensityProfile left_bump{1.0, ExplicitEps{{{-3, 0.2}}, PowerEps{0.5, -1}}, 1.0};
    CHECK(check_condition(left_bump, ConditionId::eq3_4).holds == Tri::no);

    const auto s = tail_structure(ExplicitEps{{{-4, 0.1}, {9, 0.2}}, StepEps{0.0, 0.5}});
    REQUIRE(s.has_value());
    CHECK(s->left_end == -5);
    CHECK(s->right_start == 10);
    CHECK(s->right_eps == 0.5);
}

TEST_CASE("chi functional and limit sets") {
    CHECK(*chi(example_profile(1.0)) == 0.0);
    CHECK(*chi({1.0, StepEps{0.0, std::log(2.0)}, 1.0}) == rel(1.0, 1e-15));
    for (double t : {0.1, 2.0, 7.0}) {
        const IntensityProfile p{1.0, StepEps{0.0, std::log(2.0)}, t};
        CHECK(*chi(p) == rel(t, 1e-14));
    }
    for (double g : {0.2, 0.5, 1.0}) CHECK(*chi({2.0, PowerEps{g, 1}, 1.0}) == 0.0);

    const auto ls = limit_sets(example_profile(1.0));
    CHECK(ls->minus.lo == 1.0);
    CHECK(ls->plus.hi == 1.0);
    CHECK_FALSE(ls->disjoint());
    const auto step = limit_sets({1.0, StepEps{0.0, std::log(2.0)}, 1.0});
    CHECK(step->minus.lo == 1.0);
    CHECK(step->plus.lo == doctest::Approx(2.0));
    CHECK(step->disjoint());
    const auto z = limit_sets({3.0, ZeroEps{}, 2.0});
    CHECK(z->minus.lo == 6.0);
    CHECK(z->plus.lo == 6.0);

    // For two-constant profiles, disjoint limit sets exactly when chi != 0.
    for (double left : {-0.5, 0.0, 0.3}) {
        for (double right : {-0.5, 0.0, 0.3}) {
            const IntensityProfile p{1.3, StepEps{left, right}, 1.0};
            CHECK(limit_sets(p)->disjoint() == (*chi(p) != 0.0));
        }
    }
}

TEST_CASE("condition names round trip") {
    for (auto id : {ConditionId::eq3_1, ConditionId::eq3_4, ConditionId::aut1, ConditionId::chi_zero}) {
        CHECK(condition_from_string(to_string(id)) == id);
    }
    CHECK_FALSE(condition_from_string("nope").has_value());
}
