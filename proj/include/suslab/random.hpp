#pragma once

#include <cstdint>
#include <random>

/// Reproducible random streams and Poisson variates.
namespace suslab::rng {

/// (seed, stream) identifies a family of substreams; each Monte Carlo sample
/// draws from its own substream so results do not depend on the worker count.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

class Rng {
  public:
    Rng(const RngSpec& spec, std::uint64_t substream);

    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// Poisson(rate) sampler with the per-rate constants precomputed.
///
/// Rates below 10 use sequential inversion driven by a single uniform, so a
/// fixed stream yields counts that are monotone in the rate. Larger rates use
/// Hoermann's transformed rejection with squeeze (PTRS).
class PoissonSampler {
  public:
    static constexpr double kInversionLimit = 10.0;

    explicit PoissonSampler(double rate);

    double rate() const { return rate_; }
    std::int64_t operator()(Rng& rng) const;

  private:
    std::int64_t inversion(double u) const;
    std::int64_t ptrs(Rng& rng) const;

    double rate_ = 0.0;
    double exp_neg_rate_ = 1.0;
    // PTRS constants
    double log_rate_ = 0.0;
    double b_ = 0.0;
    double a_ = 0.0;
    double inv_alpha_ = 0.0;
    double v_r_ = 0.0;
};

}  // namespace suslab::rng
