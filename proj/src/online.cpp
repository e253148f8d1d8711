#include "advgame/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "advgame/error.hpp"

namespace advgame {

namespace {

std::vector<double> kind_weights(const GameSpec& game) {
    std::vector<double> w(game.num_types() + 1);
    w[0] = 1.0 - game.p_attack();
    for (std::size_t i = 0; i < game.num_types(); ++i) w[i + 1] = game.p_attack() * game.type_prior(i);
    return w;
}

// pi_G(v) and the lowest type attaining the inner max (num_types when pi = 0).
double detection_at(const GameSpec& game, std::span<const double> g, std::size_t v, std::size_t* arg) {
    double best = 0.0;
    std::size_t who = game.num_types();
    for (std::size_t i = 0; i < game.num_types(); ++i) {
        if (game.inert(i, v)) continue;
        const double t = (game.u_undetected(i, v) - g[i]) / game.span(i, v);
        if (t > best) {
            best = t;
            who = i;
        }
    }
    if (arg) *arg = who;
    return std::min(best, 1.0);
}

double sampled(const GameSpec& game, const Event& e, double pi, Rng& coin) {
    const bool detected = coin.uniform() < pi;
    if (e.is_attack()) return detected ? -game.u_detected(e.type, e.vector) : game.u_undetected(e.type, e.vector);
    return detected ? game.false_alarm_cost(e.vector) : 0.0;
}

}  // namespace

Environment::Environment(const GameSpec& game) : game_(game), kind_(kind_weights(game)), p0_(game.p0()) {}

Event Environment::step(const DetectionPolicy& policy, Rng& rng) const {
    return step([&](std::size_t v) { return policy[v]; }, rng);
}

Event environment_step(const GameSpec& game, const DetectionPolicy& policy, Rng& rng) {
    return Environment(game).step(policy, rng);
}

OnlineTrace efficient_ogd_run(const GameSpec& game, std::size_t horizon, std::span<const double> g_init, Rng& rng,
                              const OnlineOptions& options) {
    const std::size_t m = game.num_types();
    const Box box = gain_bounds(game);
    if (!box.contains(g_init, 1e-9 * (1.0 + box.diameter()))) {
        throw Error(ErrorKind::ProfileOutOfBox, "initial profile outside the gain box");
    }
    std::vector<double> g = box.project(g_init);
    const Environment env(game);
    Rng coin(rng.next());

    OnlineTrace trace;
    trace.algo = "efficient";
    trace.num_types = m;
    trace.events.reserve(horizon);
    trace.realized_loss.reserve(horizon);
    trace.surrogate_loss.reserve(horizon);
    if (options.record_profiles) trace.profiles.reserve(horizon * m);

    for (std::size_t t = 1; t <= horizon; ++t) {
        if (options.record_profiles) trace.profiles.insert(trace.profiles.end(), g.begin(), g.end());
        const Event e = env.step([&](std::size_t v) { return detection_at(game, g, v, nullptr); }, rng);
        const double eta = options.step_scale / std::sqrt(static_cast<double>(t));
        std::size_t who = m;
        const double pi = detection_at(game, g, e.vector, &who);
        if (e.is_attack()) {
            trace.realized_loss.push_back(attacker_value(game, e.type, e.vector, pi));
            trace.surrogate_loss.push_back(g[e.type]);
            g[e.type] -= eta;
        } else {
            const double loss = pi * game.false_alarm_cost(e.vector);
            trace.realized_loss.push_back(loss);
            trace.surrogate_loss.push_back(loss);
            if (pi > 0.0 && who < m) g[who] += eta * game.false_alarm_cost(e.vector) / game.span(who, e.vector);
        }
        if (options.sample_losses) trace.sampled_loss.push_back(sampled(game, e, pi, coin));
        for (std::size_t i = 0; i < m; ++i) g[i] = std::clamp(g[i], box.lower(i), box.upper(i));
        trace.events.push_back(e);
    }
    return trace;
}

OnlineTrace naive_ogd_run(const GameSpec& game, std::size_t horizon, Rng& rng, const OnlineOptions& options) {
    const std::size_t n = game.num_vectors();
    const std::size_t m = game.num_types();
    if (n > kNaiveMaxVectors) {
        throw Error(ErrorKind::VectorSetTooLarge, "naive learner stores pi over " + std::to_string(n) +
                                                      " vectors, limit " + std::to_string(kNaiveMaxVectors));
    }
    if (!(options.naive_initial_pi >= 0.0 && options.naive_initial_pi <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "initial detection probability outside [0, 1]");
    }
    std::vector<double> pi(n, options.naive_initial_pi);
    const Environment env(game);
    Rng coin(rng.next());
    auto detection = [&](std::size_t v) { return pi[v]; };

    OnlineTrace trace;
    trace.algo = "naive";
    trace.num_types = m;
    trace.events.reserve(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
        if (options.record_profiles) {
            for (std::size_t i = 0; i < m; ++i) trace.profiles.push_back(best_response_with(game, i, detection).value);
        }
        const Event e = env.step(detection, rng);
        const double eta = options.step_scale / std::sqrt(static_cast<double>(t));
        const double p = pi[e.vector];
        if (e.is_attack()) {
            const double value = attacker_value(game, e.type, e.vector, p);
            trace.realized_loss.push_back(value);
            trace.surrogate_loss.push_back(value);
            pi[e.vector] = std::clamp(p + eta * game.span(e.type, e.vector), 0.0, 1.0);
        } else {
            const double loss = p * game.false_alarm_cost(e.vector);
            trace.realized_loss.push_back(loss);
            trace.surrogate_loss.push_back(loss);
            pi[e.vector] = std::clamp(p - eta * game.false_alarm_cost(e.vector), 0.0, 1.0);
        }
        if (options.sample_losses) trace.sampled_loss.push_back(sampled(game, e, p, coin));
        trace.events.push_back(e);
    }
    return trace;
}

MinGainProblem hindsight_problem(const OnlineTrace& trace, const GameSpec& game, std::size_t steps) {
    const std::size_t m = game.num_types();
    steps = std::min(steps, trace.steps());
    std::vector<double> q(m, 0.0);
    std::map<std::size_t, double> counts;
    for (std::size_t t = 0; t < steps; ++t) {
        const Event& e = trace.events[t];
        if (e.is_attack()) {
            q[e.type] += 1.0;
        } else {
            counts[e.vector] += 1.0;
        }
    }
    MinGainProblem problem(std::move(q), gain_bounds(game));
    std::vector<double> gains(m), spans(m);
    for (const auto& [v, count] : counts) {
        for (std::size_t i = 0; i < m; ++i) {
            gains[i] = game.u_undetected(i, v);
            spans[i] = game.span(i, v);
        }
        problem.add_item(game.false_alarm_cost(v) * count, gains, spans);
    }
    return problem;
}

Comparator hindsight_comparator(const OnlineTrace& trace, const GameSpec& game, std::size_t steps,
                                const MinGainOptions& options) {
    const MinGainProblem problem = hindsight_problem(trace, game, steps);
    const MinGainResult result = maximize_min_gain(problem, options);
    return {result.g, -result.value};
}

double hindsight_loss(const OnlineTrace& trace, const GameSpec& game, std::size_t steps, std::span<const double> g) {
    steps = std::min(steps, trace.steps());
    double total = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const Event& e = trace.events[t];
        if (e.is_attack()) {
            total += g[e.type];
        } else {
            total += game.false_alarm_cost(e.vector) * detection_at(game, g, e.vector, nullptr);
        }
    }
    return total;
}

Regret stackelberg_regret(const OnlineTrace& trace, const GameSpec& game, std::size_t steps,
                          const MinGainOptions& options) {
    steps = std::min(steps, trace.steps());
    Regret r;
    r.steps = steps;
    r.comparator = hindsight_comparator(trace, game, steps, options).loss;
    double realized = 0.0, surrogate = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        realized += trace.realized_loss[t];
        surrogate += trace.surrogate_loss[t];
    }
    r.realized = realized - r.comparator;
    r.surrogate = surrogate - r.comparator;
    return r;
}

Regret stackelberg_regret(const OnlineTrace& trace, const GameSpec& game, const MinGainOptions& options) {
    return stackelberg_regret(trace, game, trace.steps(), options);
}

std::vector<Regret> regret_curve(const OnlineTrace& trace, const GameSpec& game, std::size_t stride,
                                 const MinGainOptions& options) {
    if (stride == 0) throw Error(ErrorKind::InvalidArgument, "checkpoint stride must be positive");
    std::vector<Regret> out;
    for (std::size_t t = stride; t < trace.steps(); t += stride) out.push_back(stackelberg_regret(trace, game, t, options));
    if (trace.steps() > 0) out.push_back(stackelberg_regret(trace, game, trace.steps(), options));
    return out;
}

double regret_bound(const RegretBound& bound) {
    const double root = std::sqrt(static_cast<double>(bound.horizon));
    return bound.d * bound.d * root / 2.0 + (root - 0.5) * bound.l_const * bound.l_const;
}

RegretBound efficient_bound_constants(const GameSpec& game, std::size_t horizon) {
    RegretBound b;
    b.d = gain_bounds(game).diameter();
    b.l_const = 1.0;
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        for (std::size_t i = 0; i < game.num_types(); ++i) {
            if (game.inert(i, v)) continue;
            b.l_const = std::max(b.l_const, game.false_alarm_cost(v) / game.span(i, v));
        }
    }
    b.horizon = horizon;
    return b;
}

RegretBound naive_bound_constants(const GameSpec& game, std::size_t horizon) {
    RegretBound b;
    b.d = std::sqrt(static_cast<double>(game.num_vectors()));
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        b.l_const = std::max(b.l_const, game.false_alarm_cost(v));
        for (std::size_t i = 0; i < game.num_types(); ++i) b.l_const = std::max(b.l_const, std::abs(game.span(i, v)));
    }
    b.horizon = horizon;
    return b;
}

std::vector<double> distance_to_equilibrium(const OnlineTrace& trace, std::span<const double> g_max) {
    if (!trace.has_profiles()) throw Error(ErrorKind::InvalidArgument, "trace has no recorded profiles");
    if (g_max.size() != trace.num_types) throw Error(ErrorKind::InvalidArgument, "profile dimension mismatch");
    std::vector<double> out(trace.steps());
    for (std::size_t t = 0; t < trace.steps(); ++t) {
        const auto g = trace.profile(t);
        double sq = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) sq += (g[i] - g_max[i]) * (g[i] - g_max[i]);
        out[t] = std::sqrt(sq);
    }
    return out;
}

}  // namespace advgame
