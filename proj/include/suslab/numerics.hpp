#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>

namespace suslab {

/// Three-valued truth used wherever a finite computation may not decide.
enum class Tri { yes, no, undetermined };

std::string_view to_string(Tri value);

namespace numerics {

/// Neumaier's variant of Kahan summation. Exact enough that telescoping
/// identities over ~10^6 terms survive to 1e-12.
class CompensatedSum {
  public:
    CompensatedSum& operator+=(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// Least-squares fit of y(n) = slope * log n + intercept + correction / sqrt(n).
///
/// The last column absorbs the n^{-1/2} approach of the O(1) remainder seen in
/// both log-growth quantities of the power family; without it the fitted
/// slope is biased low by several percent over n in [2^4, 2^17].
struct LogSlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double correction = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
};

LogSlopeFit fit_log_slope(std::span<const double> n, std::span<const double> y);

/// Sum_{k >= first} f(k) for a smooth, integrable f, via Euler-Maclaurin with
/// the integral evaluated on a dyadically graded Gauss-Legendre mesh after the
/// substitution t = first / u^2. f must be smooth on [first - 1, inf) on a
/// scale much larger than one.
double smooth_tail_sum(const std::function<double(double)>& f, double first);

/// Bisection in log-space for the switch point of a monotone predicate that
/// is true at lo and false at hi. Returns the final (true, false) pair once
/// its relative width drops below rel_tol.
std::pair<double, double> bisect_log(const std::function<bool(double)>& pred, double lo, double hi,
                  double rel_tol);

}  // namespace numerics
}  // namespace suslab
