#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "advgame/game.hpp"
#include "advgame/min_gain.hpp"
#include "advgame/rng.hpp"

namespace advgame {

struct Event {
    enum class Kind { NonAttack, Attack };

    Kind kind = Kind::NonAttack;
    std::size_t type = 0;  // attacks only
    std::size_t vector = 0;

    bool is_attack() const noexcept { return kind == Kind::Attack; }
};

/// Stackelberg environment: non-attacks follow P0, attackers best-respond to the policy.
class Environment {
public:
    explicit Environment(const GameSpec& game);

    const GameSpec& game() const noexcept { return game_; }

    /// `detection(v)` gives the current policy's detection probability at v.
    template <class DetectionFn>
    Event step(DetectionFn&& detection, Rng& rng) const {
        const std::size_t c = kind_.sample(rng);
        if (c == 0) return {Event::Kind::NonAttack, 0, p0_.sample(rng)};
        const BestResponse br = best_response_with(game_, c - 1, detection);
        return {Event::Kind::Attack, c - 1, br.vector};
    }

    Event step(const DetectionPolicy& policy, Rng& rng) const;

private:
    const GameSpec& game_;
    DiscreteSampler kind_;
    DiscreteSampler p0_;
};

Event environment_step(const GameSpec& game, const DetectionPolicy& policy, Rng& rng);

/// Per-step record of one learner run. Profiles are stored flat, step-major.
struct OnlineTrace {
    std::string algo;
    std::size_t num_types = 0;
    std::vector<Event> events;
    std::vector<double> realized_loss;   // expected loss under the policy played at step t
    std::vector<double> surrogate_loss;  // c_t evaluated at the decision of step t
    std::vector<double> sampled_loss;    // Bernoulli draw of the classification coin, when requested
    std::vector<double> profiles;        // G_t, or the induced gains of pi_t for the naive learner

    std::size_t steps() const noexcept { return events.size(); }
    bool has_profiles() const noexcept { return !profiles.empty(); }
    std::span<const double> profile(std::size_t t) const { return {profiles.data() + t * num_types, num_types}; }
};

struct OnlineOptions {
    double step_scale = 1.0;  // eta_t = step_scale / sqrt(t)
    bool sample_losses = false;
    bool record_profiles = true;
    double naive_initial_pi = 0.0;
};

/// Projected subgradient descent on G with step 1/sqrt(t).
OnlineTrace efficient_ogd_run(const GameSpec& game, std::size_t horizon, std::span<const double> g_init, Rng& rng,
                              const OnlineOptions& options = {});

inline constexpr std::size_t kNaiveMaxVectors = 100'000;

/// Projected subgradient descent on pi over [0, 1]^|V|.
OnlineTrace naive_ogd_run(const GameSpec& game, std::size_t horizon, Rng& rng, const OnlineOptions& options = {});

/// Best fixed G in hindsight for the first `steps` events: min_G sum_t c_t(G).
struct Comparator {
    std::vector<double> g;
    double loss = 0.0;
};

MinGainProblem hindsight_problem(const OnlineTrace& trace, const GameSpec& game, std::size_t steps);
Comparator hindsight_comparator(const OnlineTrace& trace, const GameSpec& game, std::size_t steps,
                                const MinGainOptions& options = {});

/// sum_t c_t(G) for a fixed G over the first `steps` events.
double hindsight_loss(const OnlineTrace& trace, const GameSpec& game, std::size_t steps, std::span<const double> g);

struct Regret {
    double realized = 0.0;
    double surrogate = 0.0;
    double comparator = 0.0;
    std::size_t steps = 0;
};

Regret stackelberg_regret(const OnlineTrace& trace, const GameSpec& game, const MinGainOptions& options = {});
Regret stackelberg_regret(const OnlineTrace& trace, const GameSpec& game, std::size_t steps,
                          const MinGainOptions& options = {});

/// Regret at evenly spaced checkpoints (every `stride` steps, plus the last step).
std::vector<Regret> regret_curve(const OnlineTrace& trace, const GameSpec& game, std::size_t stride,
                                 const MinGainOptions& options = {});

struct RegretBound {
    double d = 0.0;
    double l_const = 0.0;
    std::size_t horizon = 0;
};

/// D^2 sqrt(T) / 2 + (sqrt(T) - 1/2) L^2.
double regret_bound(const RegretBound& bound);

/// D = ||G_high - G_low||_2, L = max{1, max c_fa / (U^u + U^d)}.
RegretBound efficient_bound_constants(const GameSpec& game, std::size_t horizon);

/// D^2 = |V|, L = max(max c_fa, max |U^u + U^d|).
RegretBound naive_bound_constants(const GameSpec& game, std::size_t horizon);

std::vector<double> distance_to_equilibrium(const OnlineTrace& trace, std::span<const double> g_max);

}  // namespace advgame
