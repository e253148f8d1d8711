#pragma once

#include <cstdint>
#include <vector>

#include "advgame/game.hpp"
#include "advgame/rng.hpp"

namespace advgame::testing {

inline RawVector raw_vector(int id, double p0, double c_fa, std::vector<double> uu, std::vector<double> ud) {
    RawVector v;
    v.id = id;
    v.p0 = p0;
    v.false_alarm_cost = c_fa;
    v.u_undetected = std::move(uu);
    v.u_detected = std::move(ud);
    return v;
}

inline void normalize(RawGame& raw) {
    double s = 0.0;
    for (double p : raw.type_priors) s += p;
    for (double& p : raw.type_priors) p /= s;
    s = 0.0;
    for (const auto& v : raw.vectors) s += v.p0;
    for (auto& v : raw.vectors) v.p0 /= s;
}

/// One vector, one type.
inline GameSpec single_vector_game(double uu, double ud, double c_fa, double p_attack) {
    RawGame raw;
    raw.p_attack = p_attack;
    raw.type_priors = {1.0};
    raw.vectors.push_back(raw_vector(0, 1.0, c_fa, {uu}, {ud}));
    return validate_game(raw);
}

/// Random game; payoffs scale down with m so oracle grids stay affordable.
inline GameSpec random_game(std::uint64_t seed, std::size_t m, std::size_t n) {
    Rng rng(seed);
    const double scale = m == 1 ? 50.0 : (m == 2 ? 5.0 : 1.0);
    RawGame raw;
    raw.p_attack = rng.uniform(0.05, 0.6);
    for (std::size_t i = 0; i < m; ++i) raw.type_priors.push_back(rng.uniform(0.2, 1.0));
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> uu(m), ud(m);
        for (std::size_t i = 0; i < m; ++i) {
            uu[i] = rng.uniform(0.0, 1.5) * scale;
            ud[i] = rng.uniform(0.2, 3.0) * scale;
        }
        raw.vectors.push_back(raw_vector(static_cast<int>(v), rng.uniform(0.0, 1.0) + 1e-3,
                                         rng.uniform(0.0, 2.0) * scale, uu, ud));
    }
    normalize(raw);
    return validate_game(raw);
}

inline std::vector<double> random_profile(const Box& box, Rng& rng) {
    std::vector<double> g(box.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = rng.uniform(box.lower(i), box.upper(i));
    return g;
}

}  // namespace advgame::testing
