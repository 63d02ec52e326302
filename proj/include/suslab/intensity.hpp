#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "suslab/numerics.hpp"

/// Intensity profiles a_n = scale * base * exp(eps_n) on the integers.
namespace suslab::intensity {

/// eps_n = 0 for every n.
struct ZeroEps {};

/// eps_n = sign * n^{-gamma} for n > 1, and 0 for n <= 1.
struct PowerEps {
    double gamma = 0.5;
    int sign = -1;
};

/// eps_n = left for n <= 0 and right for n >= 1.
struct StepEps {
    double left = 0.0;
    double right = 0.0;
};

using TailFamily = std::variant<ZeroEps, PowerEps, StepEps>;

/// Finite table of overrides on top of a declared tail family. Without a
/// declared tail nothing about the infinite sequence is decidable.
struct ExplicitEps {
    std::map<std::int64_t, double> table;
    std::optional<TailFamily> tail;
};

using EpsilonFamily = std::variant<ZeroEps, PowerEps, StepEps, ExplicitEps>;

struct IntensityProfile {
    double base = 1.0;
    EpsilonFamily epsilon = PowerEps{};
    double scale = 1.0;

    /// Same profile with the scale multiplied by t.
    IntensityProfile scaled(double t) const;
    /// scale * base.
    double amplitude() const { return scale * base; }
};

/// Checks the invariants of a profile (positive base/scale, gamma > 0,
/// sign in {-1, +1}, finite table entries); throws DomainError otherwise.
void validate(const IntensityProfile& profile);

/// The default profile: eps_n = -n^{-1/2} for n > 1.
IntensityProfile example_profile(double base);

double epsilon_at(const EpsilonFamily& family, std::int64_t n);

/// scale * base * exp(eps_n).
double eval_intensity(const IntensityProfile& profile, std::int64_t n);

enum class ConditionId {
    eq3_1,     ///< sum (sqrt a_{n-1} - sqrt a_n)^2 < inf  (nonsingularity)
    eq3_4,     ///< eps = 0 on n <= 1, eps -> 0, sum eps^2 = inf, sum eps^4 < inf
    aut1,      ///< sum |a_{n-1} - a_n| < inf
    chi_zero,  ///< a_{+inf} == a_{-inf}
};

std::string_view to_string(ConditionId id);
std::optional<ConditionId> condition_from_string(std::string_view name);

struct EvidencePoint {
    std::int64_t n = 0;
    double partial = 0.0;
    /// eq3_4 only: partial sum of eps^4 next to the eps^2 sum in `partial`.
    std::optional<double> secondary;
};

struct ConditionVerdict {
    ConditionId condition = ConditionId::eq3_1;
    Tri holds = Tri::undetermined;
    std::vector<EvidencePoint> evidence;
};

/// Partial sums are reported at these N regardless of the verdict.
inline constexpr std::int64_t kEvidenceCheckpoints[] = {100, 1000, 10000, 100000};

/// Symbolic verdict for built-in families plus numeric partial-sum evidence.
ConditionVerdict check_condition(const IntensityProfile& profile, ConditionId id);

/// a_{+inf} - a_{-inf}; nullopt when aut1 fails or cannot be decided.
std::optional<double> chi(const IntensityProfile& profile);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool intersects(const Interval& other) const { return lo <= other.hi && other.lo <= hi; }
};

struct LimitSets {
    Interval minus;  ///< limit points of (a_n)_{n<0}
    Interval plus;   ///< limit points of (a_n)_{n>0}
    bool disjoint() const { return !minus.intersects(plus); }
};

std::optional<LimitSets> limit_sets(const IntensityProfile& profile);

/// Shape of eps used by the summation and sampling engines:
/// eps_k == left_eps for k <= left_end, and for k >= right_start eps_k follows
/// either the constant right_eps or the power law sign * k^{-gamma}.
struct TailStructure {
    std::int64_t left_end = 0;
    double left_eps = 0.0;
    std::int64_t right_start = 1;
    std::optional<PowerEps> right_power;
    double right_eps = 0.0;

    /// eps continued to real t >= right_start (power tail or constant).
    double right_eps_at(double t) const;
};

std::optional<TailStructure> tail_structure(const EpsilonFamily& family);

}  // namespace suslab::intensity
