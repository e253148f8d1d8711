#include "advgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace advgame {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) {
        throw Error(ErrorKind::InvalidArgument, "box bounds have different dimensions");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] <= upper_[i])) {
            throw Error(ErrorKind::InvalidArgument, "box lower bound exceeds upper bound");
        }
    }
}

bool Box::contains(std::span<const double> g, double tol) const {
    if (g.size() != size()) return false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] >= lower_[i] - tol && g[i] <= upper_[i] + tol)) return false;
    }
    return true;
}

std::vector<double> Box::project(std::span<const double> g) const {
    std::vector<double> out(g.begin(), g.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower_[i], upper_[i]);
    return out;
}

std::vector<double> Box::midpoint() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = 0.5 * (lower_[i] + upper_[i]);
    return out;
}

double Box::diameter() const {
    double sq = 0.0;
    for (std::size_t i = 0; i < size(); ++i) sq += width(i) * width(i);
    return std::sqrt(sq);
}

DetectionPolicy::DetectionPolicy(std::vector<double> values) : pi(std::move(values)) {
    for (double p : pi) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "detection probability outside [0, 1]");
        }
    }
}

DetectionPolicy DetectionPolicy::constant(std::size_t num_vectors, double value) {
    return DetectionPolicy(std::vector<double>(num_vectors, value));
}

AttackStrategy::AttackStrategy(std::size_t num_types, std::size_t num_vectors)
    : num_types_(num_types), num_vectors_(num_vectors), alpha_(num_types * num_vectors, 0.0) {}

AttackStrategy AttackStrategy::pure(std::size_t num_vectors, std::span<const std::size_t> vector_per_type) {
    AttackStrategy s(vector_per_type.size(), num_vectors);
    for (std::size_t i = 0; i < vector_per_type.size(); ++i) {
        if (vector_per_type[i] >= num_vectors) {
            throw Error(ErrorKind::InvalidArgument, "pure strategy vector out of range");
        }
        s(i, vector_per_type[i]) = 1.0;
    }
    return s;
}

void AttackStrategy::check(double tol) const {
    for (std::size_t i = 0; i < num_types_; ++i) {
        double sum = 0.0;
        for (double a : row(i)) {
            if (!(a >= -tol)) throw Error(ErrorKind::BadDistribution, "negative attack probability");
            sum += a;
        }
        if (std::abs(sum - 1.0) > tol) {
            throw Error(ErrorKind::BadDistribution, "attack strategy of a type does not sum to 1");
        }
    }
}

double GameSpec::min_denominator() const {
    double best = std::numeric_limits<double>::infinity();
    for (double d : span_) {
        if (d > 0.0) best = std::min(best, d);
    }
    return best;
}

void GameSpec::check_type(std::size_t type) const {
    if (type >= num_types()) {
        throw Error(ErrorKind::TypeOutOfRange,
                    "type " + std::to_string(type) + " but game has " + std::to_string(num_types()));
    }
}

RawGame GameSpec::to_raw() const {
    RawGame raw;
    raw.p_attack = p_attack_;
    raw.type_priors = type_priors_;
    raw.denominator_epsilon = denominator_epsilon_;
    const std::size_t m = num_types();
    raw.vectors.reserve(num_vectors());
    for (std::size_t v = 0; v < num_vectors(); ++v) {
        RawVector rv;
        rv.id = vectors_[v].id;
        rv.features = vectors_[v].features;
        rv.p0 = p0_[v];
        rv.false_alarm_cost = false_alarm_cost_[v];
        rv.u_undetected.assign(u_undetected_.begin() + static_cast<std::ptrdiff_t>(v * m),
                               u_undetected_.begin() + static_cast<std::ptrdiff_t>((v + 1) * m));
        rv.u_detected.assign(u_detected_.begin() + static_cast<std::ptrdiff_t>(v * m),
                             u_detected_.begin() + static_cast<std::ptrdiff_t>((v + 1) * m));
        raw.vectors.push_back(std::move(rv));
    }
    return raw;
}

namespace {

// At most this many per-entry complaints of one kind go into the report.
constexpr int kMaxIssuesPerKind = 5;

void check_distribution(std::span<const double> p, const char* name, std::vector<ValidationIssue>& issues) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!std::isfinite(p[k]) || p[k] < 0.0) {
            std::ostringstream os;
            os << name << "[" << k << "] = " << p[k] << " is not a nonnegative number";
            issues.push_back({ErrorKind::BadDistribution, os.str()});
            return;
        }
        sum += p[k];
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << name << " sums to " << sum << ", expected 1";
        issues.push_back({ErrorKind::BadDistribution, os.str()});
    }
}

}  // namespace

GameSpec validate_game(RawGame raw) {
    std::vector<ValidationIssue> issues;

    if (raw.vectors.empty()) issues.push_back({ErrorKind::EmptyVectorSet, "game has no vectors"});
    if (!std::isfinite(raw.p_attack) || raw.p_attack < 0.0 || raw.p_attack > 1.0) {
        std::ostringstream os;
        os << "p_attack = " << raw.p_attack << " is outside [0, 1]";
        issues.push_back({ErrorKind::BadPrior, os.str()});
    }
    if (raw.type_priors.empty()) {
        issues.push_back({ErrorKind::BadDistribution, "type_priors is empty"});
    } else {
        check_distribution(raw.type_priors, "type_priors", issues);
    }
    if (!(raw.denominator_epsilon > 0.0)) {
        issues.push_back({ErrorKind::DegenerateDenominator, "denominator_epsilon must be positive"});
    }

    std::sort(raw.vectors.begin(), raw.vectors.end(),
              [](const RawVector& a, const RawVector& b) { return a.id < b.id; });
    for (std::size_t v = 0; v < raw.vectors.size(); ++v) {
        if (raw.vectors[v].id != static_cast<int>(v)) {
            issues.push_back({ErrorKind::BadGameFile, "vector ids must be contiguous 0..|V|-1"});
            break;
        }
    }

    const std::size_t m = raw.type_priors.size();
    std::vector<double> p0(raw.vectors.size());
    int shape_issues = 0;
    int cost_issues = 0;
    int denominator_issues = 0;
    for (std::size_t v = 0; v < raw.vectors.size(); ++v) {
        const RawVector& rv = raw.vectors[v];
        p0[v] = rv.p0;
        if (rv.u_undetected.size() != m || rv.u_detected.size() != m) {
            if (shape_issues++ < kMaxIssuesPerKind) {
                issues.push_back({ErrorKind::BadGameFile, "vector " + std::to_string(rv.id) + " must carry " +
                                                              std::to_string(m) + " payoffs per outcome"});
            }
            continue;
        }
        if (!std::isfinite(rv.false_alarm_cost) || rv.false_alarm_cost < 0.0) {
            if (cost_issues++ < kMaxIssuesPerKind) {
                issues.push_back({ErrorKind::InvalidArgument,
                                  "vector " + std::to_string(rv.id) + " has a negative false-alarm cost"});
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double uu = rv.u_undetected[i];
            const double ud = rv.u_detected[i];
            if (!std::isfinite(uu) || !std::isfinite(ud)) {
                if (shape_issues++ < kMaxIssuesPerKind) {
                    issues.push_back({ErrorKind::BadGameFile, "vector " + std::to_string(rv.id) + " has a non-finite payoff"});
                }
                continue;
            }
            const bool inert = uu == 0.0 && ud == 0.0;
            if (!inert && uu + ud < raw.denominator_epsilon) {
                if (denominator_issues++ < kMaxIssuesPerKind) {
                    std::ostringstream os;
                    os << "type " << i << ", vector " << rv.id << ": U^u + U^d = " << uu + ud << " < "
                       << raw.denominator_epsilon;
                    issues.push_back({ErrorKind::DegenerateDenominator, os.str()});
                }
            }
        }
    }
    if (!raw.vectors.empty()) check_distribution(p0, "p0", issues);

    if (!issues.empty()) throw ValidationError(std::move(issues));

    GameSpec game;
    game.p_attack_ = raw.p_attack;
    game.denominator_epsilon_ = raw.denominator_epsilon;
    const double prior_sum = std::accumulate(raw.type_priors.begin(), raw.type_priors.end(), 0.0);
    game.type_priors_ = std::move(raw.type_priors);
    for (double& p : game.type_priors_) p /= prior_sum;

    const std::size_t n = raw.vectors.size();
    const double p0_sum = std::accumulate(p0.begin(), p0.end(), 0.0);
    game.p0_ = std::move(p0);
    for (double& p : game.p0_) p /= p0_sum;

    game.vectors_.reserve(n);
    game.u_undetected_.resize(n * m);
    game.u_detected_.resize(n * m);
    game.span_.resize(n * m);
    game.false_alarm_cost_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        RawVector& rv = raw.vectors[v];
        game.vectors_.push_back({rv.id, std::move(rv.features)});
        game.false_alarm_cost_[v] = rv.false_alarm_cost;
        for (std::size_t i = 0; i < m; ++i) {
            game.u_undetected_[v * m + i] = rv.u_undetected[i];
            game.u_detected_[v * m + i] = rv.u_detected[i];
            game.span_[v * m + i] = rv.u_undetected[i] + rv.u_detected[i];
        }
    }
    return game;
}

Box gain_bounds(const GameSpec& game) {
    const std::size_t m = game.num_types();
    std::vector<double> lower(m, -std::numeric_limits<double>::infinity());
    std::vector<double> upper(m, -std::numeric_limits<double>::infinity());
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        for (std::size_t i = 0; i < m; ++i) {
            lower[i] = std::max(lower[i], -game.u_detected(i, v));
            upper[i] = std::max(upper[i], game.u_undetected(i, v));
        }
    }
    return Box(std::move(lower), std::move(upper));
}

double attacker_payoff(const GameSpec& game, std::size_t type, std::size_t v, const DetectionPolicy& policy) {
    game.check_type(type);
    return attacker_value(game, type, v, policy[v]);
}

double attacker_payoff(const GameSpec& game, std::size_t type, const AttackStrategy& strategy,
                       const DetectionPolicy& policy) {
    game.check_type(type);
    double total = 0.0;
    const auto alpha = strategy.row(type);
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        if (alpha[v] != 0.0) total += alpha[v] * attacker_value(game, type, v, policy[v]);
    }
    return total;
}

double false_alarm_term(const GameSpec& game, const DetectionPolicy& policy) {
    double total = 0.0;
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        total += game.false_alarm_cost(v) * game.p0(v) * policy[v];
    }
    return (1.0 - game.p_attack()) * total;
}

double defender_payoff(const GameSpec& game, const AttackStrategy& strategy, const DetectionPolicy& policy) {
    double attack = 0.0;
    for (std::size_t i = 0; i < game.num_types(); ++i) {
        attack += game.type_prior(i) * attacker_payoff(game, i, strategy, policy);
    }
    return -game.p_attack() * attack - false_alarm_term(game, policy);
}

BestResponse best_response(const GameSpec& game, std::size_t type, const DetectionPolicy& policy) {
    return best_response_with(game, type, [&](std::size_t v) { return policy[v]; });
}

}  // namespace advgame
