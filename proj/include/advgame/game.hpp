#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "advgame/error.hpp"

namespace advgame {

inline constexpr double kDefaultDenominatorEpsilon = 1e-9;
inline constexpr double kProbabilityTolerance = 1e-9;

struct VectorRecord {
    int id = 0;
    std::vector<std::int64_t> features;  // metadata only, never enters payoffs
};

/// Unvalidated game description, as read from a game file or built by a generator.
struct RawVector {
    int id = 0;
    std::vector<std::int64_t> features;
    double p0 = 0.0;
    double false_alarm_cost = 0.0;
    std::vector<double> u_undetected;  // one per attacker type
    std::vector<double> u_detected;    // one per attacker type
};

struct RawGame {
    double p_attack = 0.0;
    std::vector<double> type_priors;
    std::vector<RawVector> vectors;
    double denominator_epsilon = kDefaultDenominatorEpsilon;
};

/// Axis-aligned box [lower, upper] in utility-profile space.
class Box {
public:
    Box() = default;
    Box(std::vector<double> lower, std::vector<double> upper);

    std::size_t size() const noexcept { return lower_.size(); }
    std::span<const double> lower() const noexcept { return lower_; }
    std::span<const double> upper() const noexcept { return upper_; }
    double lower(std::size_t i) const { return lower_[i]; }
    double upper(std::size_t i) const { return upper_[i]; }
    double width(std::size_t i) const { return upper_[i] - lower_[i]; }

    bool contains(std::span<const double> g, double tol = 0.0) const;
    std::vector<double> project(std::span<const double> g) const;
    std::vector<double> midpoint() const;
    double diameter() const;  // ||upper - lower||_2

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// A point G in the gain box together with the box it lives in.
struct UtilityProfile {
    std::vector<double> g;
    Box box;
};

/// Probability of detection per vector: the defender's randomized classifier.
struct DetectionPolicy {
    std::vector<double> pi;

    DetectionPolicy() = default;
    explicit DetectionPolicy(std::vector<double> values);
    static DetectionPolicy constant(std::size_t num_vectors, double value);

    std::size_t size() const noexcept { return pi.size(); }
    double operator[](std::size_t v) const { return pi[v]; }
};

/// Per-type distribution over vectors. Stored type-major.
class AttackStrategy {
public:
    AttackStrategy() = default;
    AttackStrategy(std::size_t num_types, std::size_t num_vectors);

    /// Every type plays one vector with certainty.
    static AttackStrategy pure(std::size_t num_vectors, std::span<const std::size_t> vector_per_type);

    std::size_t num_types() const noexcept { return num_types_; }
    std::size_t num_vectors() const noexcept { return num_vectors_; }

    double& operator()(std::size_t type, std::size_t v) { return alpha_[type * num_vectors_ + v]; }
    double operator()(std::size_t type, std::size_t v) const { return alpha_[type * num_vectors_ + v]; }
    std::span<const double> row(std::size_t type) const {
        return {alpha_.data() + type * num_vectors_, num_vectors_};
    }

    /// Throws BadDistribution unless every row is a probability vector within tol.
    void check(double tol = kProbabilityTolerance) const;

private:
    std::size_t num_types_ = 0;
    std::size_t num_vectors_ = 0;
    std::vector<double> alpha_;
};

/// Validated, immutable game. Payoffs are dense and vector-major.
class GameSpec {
public:
    std::size_t num_vectors() const noexcept { return vectors_.size(); }
    std::size_t num_types() const noexcept { return type_priors_.size(); }

    double p_attack() const noexcept { return p_attack_; }
    std::span<const double> type_priors() const noexcept { return type_priors_; }
    double type_prior(std::size_t i) const { return type_priors_[i]; }
    const std::vector<VectorRecord>& vectors() const noexcept { return vectors_; }

    double u_undetected(std::size_t type, std::size_t v) const { return u_undetected_[v * num_types() + type]; }
    double u_detected(std::size_t type, std::size_t v) const { return u_detected_[v * num_types() + type]; }
    /// U^u_i(v) + U^d_i(v), the denominator of the optimal detection formula.
    double span(std::size_t type, std::size_t v) const { return span_[v * num_types() + type]; }
    double false_alarm_cost(std::size_t v) const { return false_alarm_cost_[v]; }
    double p0(std::size_t v) const { return p0_[v]; }
    double denominator_epsilon() const noexcept { return denominator_epsilon_; }

    /// Entry with U^u = U^d = 0: the type gains nothing from v whatever the defender does,
    /// so it never constrains the detection probability inside the gain box.
    bool inert(std::size_t type, std::size_t v) const { return span(type, v) <= 0.0; }

    std::span<const double> p0() const noexcept { return p0_; }
    std::span<const double> false_alarm_costs() const noexcept { return false_alarm_cost_; }

    /// Smallest non-inert denominator.
    double min_denominator() const;

    void check_type(std::size_t type) const;

    RawGame to_raw() const;

private:
    friend GameSpec validate_game(RawGame raw);

    double p_attack_ = 0.0;
    double denominator_epsilon_ = kDefaultDenominatorEpsilon;
    std::vector<double> type_priors_;
    std::vector<VectorRecord> vectors_;
    std::vector<double> u_undetected_;
    std::vector<double> u_detected_;
    std::vector<double> span_;
    std::vector<double> false_alarm_cost_;
    std::vector<double> p0_;
};

/// Checks every invariant and renormalizes the probability vectors exactly.
/// Throws ValidationError listing all problems.
GameSpec validate_game(RawGame raw);

/// lower_i = max_v(-U^d_i(v)), upper_i = max_v U^u_i(v).
Box gain_bounds(const GameSpec& game);

/// U^u_i(v) - pi(v) (U^u_i(v) + U^d_i(v)).
inline double attacker_value(const GameSpec& game, std::size_t type, std::size_t v, double detection) {
    return game.u_undetected(type, v) - detection * game.span(type, v);
}

double attacker_payoff(const GameSpec& game, std::size_t type, std::size_t v, const DetectionPolicy& policy);
double attacker_payoff(const GameSpec& game, std::size_t type, const AttackStrategy& strategy,
                       const DetectionPolicy& policy);

/// -p_a sum_i p_i U^A_i - (1 - p_a) sum_v c_fa(v) P0(v) pi(v).
double defender_payoff(const GameSpec& game, const AttackStrategy& strategy, const DetectionPolicy& policy);

/// (1 - p_a) sum_v c_fa(v) P0(v) pi(v).
double false_alarm_term(const GameSpec& game, const DetectionPolicy& policy);

struct BestResponse {
    std::size_t vector = 0;
    double value = 0.0;
};

inline double tie_tolerance(double value) { return 1e-9 * (1.0 + std::abs(value)); }

/// Best response with the detection probability supplied per vector. The value is the exact
/// maximum; the vector is the lowest id whose value is within tie_tolerance of it.
template <class DetectionFn>
BestResponse best_response_with(const GameSpec& game, std::size_t type, DetectionFn&& detection) {
    game.check_type(type);
    const std::size_t n = game.num_vectors();
    thread_local std::vector<double> values;
    values.resize(n);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < n; ++v) {
        values[v] = attacker_value(game, type, v, detection(v));
        best = std::max(best, values[v]);
    }
    const double cutoff = best - tie_tolerance(best);
    for (std::size_t v = 0; v < n; ++v) {
        if (values[v] >= cutoff) return {v, best};
    }
    return {0, best};
}

BestResponse best_response(const GameSpec& game, std::size_t type, const DetectionPolicy& policy);

}  // namespace advgame
