#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace advgame {

/// Seeded generator with a platform-independent mapping to doubles.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream for replica `index` of a run seeded with `base_seed`.
    static Rng stream(std::uint64_t base_seed, std::uint64_t index);

    std::uint64_t next() { return engine_(); }
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double exponential();                   // rate 1
    std::size_t below(std::size_t n);       // uniform in [0, n)

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Inverse-CDF sampler over a finite distribution.
class DiscreteSampler {
public:
    DiscreteSampler() = default;
    explicit DiscreteSampler(std::span<const double> weights);

    std::size_t sample(Rng& rng) const;
    std::size_t size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

}  // namespace advgame
