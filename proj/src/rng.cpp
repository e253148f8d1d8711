#include "advgame/rng.hpp"

#include <algorithm>
#include <cmath>

#include "advgame/error.hpp"

namespace advgame {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t base_seed, std::uint64_t index) {
    return Rng(splitmix64(base_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::exponential() { return -std::log1p(-uniform()); }

std::size_t Rng::below(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights) : cdf_(weights.size()) {
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] >= 0.0)) throw Error(ErrorKind::BadDistribution, "negative sampling weight");
        total += weights[k];
        cdf_[k] = total;
    }
    if (!(total > 0.0)) throw Error(ErrorKind::BadDistribution, "sampling weights sum to zero");
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

std::size_t DiscreteSampler::sample(Rng& rng) const {
    const double u = rng.uniform();
    // first index whose cdf exceeds u; zero-weight entries are never returned
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                             static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

}  // namespace advgame
