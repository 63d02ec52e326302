#include "suslab/random.hpp"

#include <cmath>
#include <string>

#include "suslab/errors.hpp"

namespace suslab::rng {

Rng::Rng(const RngSpec& spec, std::uint64_t substream) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(spec.stream), static_cast<std::uint32_t>(spec.stream >> 32),
                      static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
    engine_.seed(seq);
}

PoissonSampler::PoissonSampler(double rate) : rate_(rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw DomainError("poisson sampler: rate must be finite and >= 0, got " + std::to_string(rate));
    }
    if (rate < kInversionLimit) {
        exp_neg_rate_ = std::exp(-rate);
        return;
    }
    log_rate_ = std::log(rate);
    b_ = 0.931 + 2.53 * std::sqrt(rate);
    a_ = -0.059 + 0.02483 * b_;
    inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
    v_r_ = 0.9277 - 3.6224 / (b_ - 2.0);
}

std::int64_t PoissonSampler::operator()(Rng& rng) const {
    if (rate_ < kInversionLimit) return inversion(rng.uniform());
    return ptrs(rng);
}

std::int64_t PoissonSampler::inversion(double u) const {
    std::int64_t k = 0;
    double p = exp_neg_rate_;
    double cdf = p;
    // The cap only matters when rounding leaves cdf a hair below u.
    while (u > cdf && k < 1000) {
        ++k;
        p *= rate_ / static_cast<double>(k);
        cdf += p;
        if (p == 0.0) break;
    }
    return k;
}

std::int64_t PoissonSampler::ptrs(Rng& rng) const {
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const auto k = static_cast<std::int64_t>(std::floor((2.0 * a_ / us + b_) * u + rate_ + 0.43));
        if (us >= 0.07 && v <= v_r_) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        const double kd = static_cast<double>(k);
        if (std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_) <=
            -rate_ + kd * log_rate_ - std::lgamma(kd + 1.0)) {
            return k;
        }
    }
}

}  // namespace suslab::rng
