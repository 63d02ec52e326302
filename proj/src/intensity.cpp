#include "suslab/intensity.hpp"

#include <cmath>
#include <string>

#include "suslab/errors.hpp"

namespace suslab::intensity {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double tail_epsilon(const TailFamily& tail, std::int64_t n) {
    return std::visit(Overloaded{
                          [](const ZeroEps&) { return 0.0; },
                          [n](const PowerEps& p) {
                              if (n <= 1) return 0.0;
                              return static_cast<double>(p.sign) *
                                     std::pow(static_cast<double>(n), -p.gamma);
                          },
                          [n](const StepEps& s) { return n <= 0 ? s.left : s.right; },
                      },
                      tail);
}

TailFamily as_tail(const EpsilonFamily& family) {
    if (const auto* z = std::get_if<ZeroEps>(&family)) return *z;
    if (const auto* p = std::get_if<PowerEps>(&family)) return *p;
    return std::get<StepEps>(family);
}

// Limits of eps at -inf and +inf for a tail family.
std::pair<double, double> tail_limits(const TailFamily& tail) {
    if (const auto* s = std::get_if<StepEps>(&tail)) return {s->left, s->right};
    return {0.0, 0.0};
}

Tri tail_verdict(const TailFamily& tail, ConditionId id) {
    switch (id) {
        case ConditionId::eq3_1:
        case ConditionId::aut1:
            // Every built-in family has bounded variation: finitely many jumps
            // or a monotone power tail converging to its limit.
            return Tri::yes;
        case ConditionId::chi_zero: {
            const auto [lo, hi] = tail_limits(tail);
            return lo == hi ? Tri::yes : Tri::no;
        }
        case ConditionId::eq3_4: {
            const auto* p = std::get_if<PowerEps>(&tail);
            if (p == nullptr) return Tri::no;  // sum eps^2 is 0 or eps does not vanish
            // sum n^{-2 gamma} = inf iff 2 gamma <= 1; sum n^{-4 gamma} < inf iff 4 gamma > 1.
            return (p->gamma > 0.25 && p->gamma <= 0.5) ? Tri::yes : Tri::no;
        }
    }
    return Tri::undetermined;
}

Tri symbolic_verdict(const EpsilonFamily& family, ConditionId id) {
    if (const auto* ex = std::get_if<ExplicitEps>(&family)) {
        if (!ex->tail) return Tri::undetermined;
        Tri verdict = tail_verdict(*ex->tail, id);
        if (id == ConditionId::eq3_4 && verdict == Tri::yes) {
            for (const auto& [n, value] : ex->table) {
                if (n <= 1 && value != 0.0) return Tri::no;
            }
        }
        return verdict;
    }
    return tail_verdict(as_tail(family), id);
}

std::optional<std::pair<double, double>> epsilon_limits(const EpsilonFamily& family) {
    if (const auto* ex = std::get_if<ExplicitEps>(&family)) {
        if (!ex->tail) return std::nullopt;
        return tail_limits(*ex->tail);
    }
    return tail_limits(as_tail(family));
}

std::vector<EvidencePoint> partial_sum_trace(const IntensityProfile& profile, ConditionId id) {
    std::vector<EvidencePoint> out;
    const std::int64_t n_max = kEvidenceCheckpoints[std::size(kEvidenceCheckpoints) - 1];
    std::size_t next = 0;
    numerics::CompensatedSum primary;
    numerics::CompensatedSum secondary;

    const auto sqrt_gap = [&](std::int64_t n) {
        const double d = std::sqrt(eval_intensity(profile, n - 1)) - std::sqrt(eval_intensity(profile, n));
        return d * d;
    };
    const auto abs_gap = [&](std::int64_t n) {
        return std::abs(eval_intensity(profile, n - 1) - eval_intensity(profile, n));
    };

    if (id == ConditionId::eq3_1) primary += sqrt_gap(0);
    if (id == ConditionId::aut1) primary += abs_gap(0);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        switch (id) {
            case ConditionId::eq3_1:
                primary += sqrt_gap(n);
                primary += sqrt_gap(-n);
                break;
            case ConditionId::aut1:
                primary += abs_gap(n);
                primary += abs_gap(-n);
                break;
            case ConditionId::eq3_4: {
                const double e2 = std::pow(epsilon_at(profile.epsilon, n), 2);
                primary += e2;
                secondary += e2 * e2;
                break;
            }
            case ConditionId::chi_zero:
                break;
        }
        if (n == kEvidenceCheckpoints[next]) {
            EvidencePoint point{n, primary.value(), std::nullopt};
            if (id == ConditionId::chi_zero) {
                point.partial = eval_intensity(profile, n) - eval_intensity(profile, -n);
            }
            if (id == ConditionId::eq3_4) point.secondary = secondary.value();
            out.push_back(point);
            ++next;
        }
    }
    return out;
}

}  // namespace

IntensityProfile IntensityProfile::scaled(double t) const {
    IntensityProfile copy = *this;
    copy.scale *= t;
    return copy;
}

void validate(const IntensityProfile& profile) {
    if (!(profile.base > 0.0) || !std::isfinite(profile.base)) {
        throw DomainError("profile base must be a positive finite real");
    }
    if (!(profile.scale > 0.0) || !std::isfinite(profile.scale)) {
        throw DomainError("profile scale must be a positive finite real");
    }
    const auto check_tail = [](const TailFamily& tail) {
        if (const auto* p = std::get_if<PowerEps>(&tail)) {
            if (!(p->gamma > 0.0) || !std::isfinite(p->gamma)) {
                throw DomainError("power family needs gamma > 0");
            }
            if (p->sign != 1 && p->sign != -1) throw DomainError("power family sign must be +1 or -1");
        }
        if (const auto* s = std::get_if<StepEps>(&tail)) {
            if (!std::isfinite(s->left) || !std::isfinite(s->right)) {
                throw DomainError("step family values must be finite");
            }
        }
    };
    if (const auto* ex = std::get_if<ExplicitEps>(&profile.epsilon)) {
        for (const auto& [n, value] : ex->table) {
            if (!std::isfinite(value)) {
                throw DomainError("explicit table entry at n=" + std::to_string(n) + " is not finite");
            }
        }
        if (ex->tail) check_tail(*ex->tail);
    } else {
        check_tail(as_tail(profile.epsilon));
    }
}

IntensityProfile example_profile(double base) {
    return IntensityProfile{base, PowerEps{0.5, -1}, 1.0};
}

double epsilon_at(const EpsilonFamily& family, std::int64_t n) {
    if (const auto* ex = std::get_if<ExplicitEps>(&family)) {
        if (auto it = ex->table.find(n); it != ex->table.end()) return it->second;
        return ex->tail ? tail_epsilon(*ex->tail, n) : 0.0;
    }
    return tail_epsilon(as_tail(family), n);
}

double eval_intensity(const IntensityProfile& profile, std::int64_t n) {
    return profile.amplitude() * std::exp(epsilon_at(profile.epsilon, n));
}

std::string_view to_string(ConditionId id) {
    switch (id) {
        case ConditionId::eq3_1: return "eq3_1";
        case ConditionId::eq3_4: return "eq3_4";
        case ConditionId::aut1: return "aut1";
        case ConditionId::chi_zero: return "chi_zero";
    }
    return "?";
}

std::optional<ConditionId> condition_from_string(std::string_view name) {
    for (auto id : {ConditionId::eq3_1, ConditionId::eq3_4, ConditionId::aut1, ConditionId::chi_zero}) {
        if (name == to_string(id)) return id;
    }
    return std::nullopt;
}

ConditionVerdict check_condition(const IntensityProfile& profile, ConditionId id) {
    validate(profile);
    return ConditionVerdict{id, symbolic_verdict(profile.epsilon, id), partial_sum_trace(profile, id)};
}

std::optional<double> chi(const IntensityProfile& profile) {
    validate(profile);
    if (symbolic_verdict(profile.epsilon, ConditionId::aut1) != Tri::yes) return std::nullopt;
    const auto limits = epsilon_limits(profile.epsilon);
    if (!limits) return std::nullopt;
    const double amp = profile.amplitude();
    return amp * std::exp(limits->second) - amp * std::exp(limits->first);
}

std::optional<LimitSets> limit_sets(const IntensityProfile& profile) {
    validate(profile);
    const auto limits = epsilon_limits(profile.epsilon);
    if (!limits) return std::nullopt;
    const double amp = profile.amplitude();
    const double minus = amp * std::exp(limits->first);
    const double plus = amp * std::exp(limits->second);
    return LimitSets{{minus, minus}, {plus, plus}};
}

double TailStructure::right_eps_at(double t) const {
    if (right_power) return static_cast<double>(right_power->sign) * std::pow(t, -right_power->gamma);
    return right_eps;
}

std::optional<TailStructure> tail_structure(const EpsilonFamily& family) {
    const auto from_tail = [](const TailFamily& tail) {
        TailStructure s;
        std::visit(Overloaded{
                       [&](const ZeroEps&) {
                           s.left_end = 0;
                           s.right_start = 1;
                       },
                       [&](const PowerEps& p) {
                           s.left_end = 1;
                           s.right_start = 2;
                           s.right_power = p;
                       },
                       [&](const StepEps& st) {
                           s.left_end = 0;
                           s.left_eps = st.left;
                           s.right_start = 1;
                           s.right_eps = st.right;
                       },
                   },
                   tail);
        return s;
    };
    if (const auto* ex = std::get_if<ExplicitEps>(&family)) {
        if (!ex->tail) return std::nullopt;
        TailStructure s = from_tail(*ex->tail);
        if (!ex->table.empty()) {
            s.left_end = std::min(s.left_end, ex->table.begin()->first - 1);
            s.right_start = std::max(s.right_start, ex->table.rbegin()->first + 1);
        }
        return s;
    }
    return from_tail(as_tail(family));
}

}  // namespace suslab::intensity
