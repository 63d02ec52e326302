#include "suslab/numerics.hpp"

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

namespace suslab {

std::string_view to_string(Tri value) {
    switch (value) {
        case Tri::yes: return "yes";
        case Tri::no: return "no";
        case Tri::undetermined: return "undetermined";
    }
    return "undetermined";
}

namespace numerics {

double compensated_sum(std::span<const double> values) {
    CompensatedSum acc;
    for (double v : values) acc += v;
    return acc.value();
}

LogSlopeFit fit_log_slope(std::span<const double> n, std::span<const double> y) {
    if (n.size() != y.size() || n.size() < 4) {
        throw std::invalid_argument("fit_log_slope: need at least 4 matched points");
    }
    const auto rows = static_cast<Eigen::Index>(n.size());
    Eigen::MatrixXd design(rows, 3);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double ni = n[static_cast<std::size_t>(i)];
        design(i, 0) = std::log(ni);
        design(i, 1) = 1.0;
        design(i, 2) = 1.0 / std::sqrt(ni);
        rhs(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd resid = rhs - design * coef;

    LogSlopeFit fit;
    fit.slope = coef(0);
    fit.intercept = coef(1);
    fit.correction = coef(2);
    const double sse = resid.squaredNorm();
    fit.residual_rms = std::sqrt(sse / static_cast<double>(rows));
    const double dof = static_cast<double>(rows - 3);
    const Eigen::MatrixXd normal_inv = (design.transpose() * design).inverse();
    fit.slope_stderr = std::sqrt(std::max(0.0, sse / dof * normal_inv(0, 0)));
    return fit;
}

namespace {

// 20-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
constexpr std::array<double, 10> kGlNodes = {
    0.0765265211334973337546404, 0.2277858511416450780804962,
    0.3737060887154195606725482, 0.5108670019508270980043641,
    0.6360536807265150254528367, 0.7463319064601507926143051,
    0.8391169718222188233945291, 0.9122344282513259058677524,
    0.9639719272779137912676661, 0.9931285991850949247861224};
constexpr std::array<double, 10> kGlWeights = {
    0.1527533871307258506980843, 0.1491729864726037467878287,
    0.1420961093183820513292983, 0.1316886384491766268984945,
    0.1181945319615184173123774, 0.1019301198172404350367501,
    0.0832767415767047487247581, 0.0626720483341090635695065,
    0.0406014298003869413310400, 0.0176140071391521183118620};

double gauss_legendre(const std::function<double(double)>& g, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    CompensatedSum acc;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
        const double dx = half * kGlNodes[i];
        acc += kGlWeights[i] * (g(mid - dx) + g(mid + dx));
    }
    return half * acc.value();
}

}  // namespace

double smooth_tail_sum(const std::function<double(double)>& f, double first) {
    // Integral over [first, inf) with t = first / u^2, dt = 2 first u^-3 du.
    const auto integrand = [&](double u) {
        const double t = first / (u * u);
        return f(t) * 2.0 * first / (u * u * u);
    };
    CompensatedSum integral;
    double hi = 1.0;
    for (int level = 0; level < 400; ++level) {
        const double lo = 0.5 * hi;
        const double piece = gauss_legendre(integrand, lo, hi);
        integral += piece;
        if (level > 8 && std::abs(piece) < 1e-19 * (std::abs(integral.value()) + 1e-300)) {
            break;
        }
        hi = lo;
    }
    // Euler-Maclaurin: sum_{k>=K} f(k) = int_K^inf f + f(K)/2 - f'(K)/12 + f'''(K)/720 - ...
    constexpr double h = 0.5;
    const double d1 =
        (-f(first + 2 * h) + 8 * f(first + h) - 8 * f(first - h) + f(first - 2 * h)) / (12.0 * h);
    const double d3 = (f(first + 2 * h) - 2 * f(first + h) + 2 * f(first - h) - f(first - 2 * h)) /
                      (2.0 * h * h * h);
    return integral.value() + 0.5 * f(first) - d1 / 12.0 + d3 / 720.0;
}

std::pair<double, double> bisect_log(const std::function<bool(double)>& pred, double lo, double hi,
                  double rel_tol) {
    while (hi / lo > 1.0 + rel_tol) {
        const double mid = std::sqrt(lo * hi);
        if (pred(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

}  // namespace numerics
}  // namespace suslab
