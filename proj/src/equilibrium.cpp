#include "advgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "advgame/error.hpp"
#include "advgame/simplex.hpp"

namespace advgame {

void check_profile(const GameSpec& game, std::span<const double> g) {
    const Box box = gain_bounds(game);
    if (g.size() != box.size()) {
        throw Error(ErrorKind::ProfileOutOfBox, "profile has " + std::to_string(g.size()) + " entries, game has " +
                                                    std::to_string(box.size()) + " types");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double slack = 1e-9 * (1.0 + std::max(std::abs(box.lower(i)), std::abs(box.upper(i))));
        if (!(g[i] >= box.lower(i) - slack && g[i] <= box.upper(i) + slack)) {
            throw Error(ErrorKind::ProfileOutOfBox, "G_" + std::to_string(i) + " = " + std::to_string(g[i]) +
                                                        " outside [" + std::to_string(box.lower(i)) + ", " +
                                                        std::to_string(box.upper(i)) + "]");
        }
    }
}

DetectionPolicy pi_of_G(const GameSpec& game, std::span<const double> g, std::size_t* clamped) {
    check_profile(game, g);
    const std::size_t m = game.num_types();
    DetectionPolicy policy;
    policy.pi.resize(game.num_vectors());
    std::size_t over = 0;
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        double p = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (game.inert(i, v)) continue;
            p = std::max(p, (game.u_undetected(i, v) - g[i]) / game.span(i, v));
        }
        if (p > 1.0) {
            p = 1.0;
            ++over;
        }
        policy.pi[v] = p;
    }
    if (clamped) *clamped = over;
    return policy;
}

DetectionPolicy pi_of_G(const GameSpec& game, const UtilityProfile& profile, std::size_t* clamped) {
    return pi_of_G(game, profile.g, clamped);
}

double min_gain(const GameSpec& game, std::span<const double> g) {
    const DetectionPolicy policy = pi_of_G(game, g);
    double total = 0.0;
    for (std::size_t i = 0; i < game.num_types(); ++i) total -= game.p_attack() * game.type_prior(i) * g[i];
    return total - false_alarm_term(game, policy);
}

double worst_case_payoff(const GameSpec& game, std::span<const double> g) {
    const DetectionPolicy policy = pi_of_G(game, g);
    double total = 0.0;
    for (std::size_t i = 0; i < game.num_types(); ++i) {
        total -= game.p_attack() * game.type_prior(i) * best_response(game, i, policy).value;
    }
    return total - false_alarm_term(game, policy);
}

MinGainProblem defender_problem(const GameSpec& game) {
    const std::size_t m = game.num_types();
    std::vector<double> q(m);
    for (std::size_t i = 0; i < m; ++i) q[i] = game.p_attack() * game.type_prior(i);
    MinGainProblem problem(std::move(q), gain_bounds(game));
    std::vector<double> gains(m), spans(m);
    for (std::size_t v = 0; v < game.num_vectors(); ++v) {
        for (std::size_t i = 0; i < m; ++i) {
            gains[i] = game.u_undetected(i, v);
            spans[i] = game.span(i, v);
        }
        problem.add_item((1.0 - game.p_attack()) * game.false_alarm_cost(v) * game.p0(v), gains, spans);
    }
    return problem;
}

EquilibriumSolution solve_defender(const GameSpec& game, const MinGainOptions& options) {
    const MinGainProblem problem = defender_problem(game);
    const MinGainResult result = maximize_min_gain(problem, options);

    const DetectionPolicy first = pi_of_G(game, result.g);
    std::vector<double> g(game.num_types());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = best_response(game, i, first).value;

    EquilibriumSolution solution;
    solution.g_max = {problem.box().project(g), problem.box()};
    solution.policy = pi_of_G(game, solution.g_max.g);
    solution.value = min_gain(game, solution.g_max.g);
    solution.method = result.method;
    solution.certified = result.certified;
    return solution;
}

namespace {

DetectionBand classify_band(double pi, double band) {
    if (pi < band) return DetectionBand::Zero;
    if (pi > 1.0 - band) return DetectionBand::One;
    return DetectionBand::Interior;
}

struct BalanceRow {
    std::vector<std::size_t> vars;
    std::vector<double> coefs;
    double rhs = 0.0;
    DetectionBand band = DetectionBand::Interior;
};

}  // namespace

AttackerReport solve_attacker_detailed(const GameSpec& game, const EquilibriumSolution& solution,
                                       const AttackerOptions& options) {
    const std::size_t m = game.num_types();
    const std::size_t n = game.num_vectors();
    const DetectionPolicy& policy = solution.policy;
    if (policy.size() != n) throw Error(ErrorKind::InvalidArgument, "policy does not match the game");

    AttackerReport report;
    report.strategy = AttackStrategy(m, n);

    // Variables exist only on each type's best-response support.
    struct Var {
        std::size_t type;
        std::size_t vector;
    };
    std::vector<Var> vars;
    std::vector<std::vector<std::size_t>> type_vars(m);
    std::vector<std::vector<std::size_t>> vector_vars(n);
    std::vector<char> in_lp(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const BestResponse br = best_response(game, i, policy);
        const double w = game.p_attack() * game.type_prior(i);
        if (w <= 0.0) {
            report.strategy(i, br.vector) = 1.0;
            continue;
        }
        in_lp[i] = 1;
        const double cutoff = br.value - options.tol_support * (1.0 + std::abs(br.value));
        for (std::size_t v = 0; v < n; ++v) {
            if (attacker_value(game, i, v, policy[v]) >= cutoff) {
                type_vars[i].push_back(vars.size());
                vector_vars[v].push_back(vars.size());
                vars.push_back({i, v});
            }
        }
    }
    if (vars.empty()) return report;

    std::vector<BalanceRow> rows;
    for (std::size_t v = 0; v < n; ++v) {
        const DetectionBand band = classify_band(policy[v], options.band);
        const double rhs = (1.0 - game.p_attack()) * game.false_alarm_cost(v) * game.p0(v);
        BalanceRow row;
        row.rhs = rhs;
        row.band = band;
        for (std::size_t k : vector_vars[v]) {
            const double coef = game.p_attack() * game.type_prior(vars[k].type) * game.span(vars[k].type, v);
            if (coef == 0.0) continue;
            row.vars.push_back(k);
            row.coefs.push_back(coef);
        }
        // rows without variables cannot be changed by the LP; verify_bne reports them
        if (row.vars.empty()) continue;
        rows.push_back(std::move(row));
    }

    auto attempt = [&](bool use_band) -> bool {
        std::vector<double> fixed(vars.size(), std::numeric_limits<double>::quiet_NaN());
        std::size_t presolved = 0;
        if (!use_band) {
            // Equality rows with a single variable pin that variable.
            for (const BalanceRow& row : rows) {
                if (row.band != DetectionBand::Interior || row.vars.size() != 1) continue;
                const double x = row.rhs / row.coefs[0];
                if (x < -options.tol_balance) return false;
                fixed[row.vars[0]] = std::max(0.0, x);
                ++presolved;
            }
        }

        std::vector<std::size_t> column(vars.size(), vars.size());
        std::size_t free_count = 0;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            if (std::isnan(fixed[k])) column[k] = free_count++;
        }

        lp::LinearProgram program(free_count);
        std::size_t row_count = 0;
        auto add = [&](const std::vector<std::size_t>& ks, const std::vector<double>& cs, lp::Relation rel,
                       double rhs) -> bool {
            std::vector<lp::Term> terms;
            for (std::size_t j = 0; j < ks.size(); ++j) {
                if (std::isnan(fixed[ks[j]])) {
                    terms.push_back({column[ks[j]], cs[j]});
                } else {
                    rhs -= cs[j] * fixed[ks[j]];
                }
            }
            if (terms.empty()) {
                const double tol = options.tol_balance;
                if (rel == lp::Relation::Equal) return std::abs(rhs) <= tol;
                if (rel == lp::Relation::LessEqual) return rhs >= -tol;
                return rhs <= tol;
            }
            program.add_constraint(std::move(terms), rel, rhs);
            ++row_count;
            return true;
        };

        for (std::size_t i = 0; i < m; ++i) {
            if (!in_lp[i]) continue;
            if (!add(type_vars[i], std::vector<double>(type_vars[i].size(), 1.0), lp::Relation::Equal, 1.0)) {
                return false;
            }
        }
        for (const BalanceRow& row : rows) {
            const double tol = use_band ? options.tol_balance : 0.0;
            bool ok = true;
            switch (row.band) {
                case DetectionBand::Interior:
                    if (use_band) {
                        ok = add(row.vars, row.coefs, lp::Relation::LessEqual, row.rhs + tol) &&
                             add(row.vars, row.coefs, lp::Relation::GreaterEqual, std::max(0.0, row.rhs - tol));
                    } else {
                        ok = add(row.vars, row.coefs, lp::Relation::Equal, row.rhs);
                    }
                    break;
                case DetectionBand::Zero:
                    ok = add(row.vars, row.coefs, lp::Relation::LessEqual, row.rhs + tol);
                    break;
                case DetectionBand::One:
                    ok = add(row.vars, row.coefs, lp::Relation::GreaterEqual, row.rhs - tol);
                    break;
            }
            if (!ok) return false;
        }

        const double cells = static_cast<double>(row_count) * static_cast<double>(free_count + 2 * row_count);
        if (cells > static_cast<double>(options.max_lp_cells)) {
            throw Error(ErrorKind::SolverFailure, "attacker LP too large for the dense simplex (" +
                                                      std::to_string(row_count) + " rows, " +
                                                      std::to_string(free_count) + " variables)");
        }
        std::vector<double> x(free_count, 0.0);
        if (free_count > 0 && row_count > 0) {
            const lp::Result res = lp::maximize(program);
            if (res.status == lp::Status::PivotLimit) {
                throw Error(ErrorKind::SolverFailure, "attacker LP hit the pivot limit");
            }
            if (res.status != lp::Status::Optimal) return false;
            x = res.x;
        }

        AttackStrategy strategy(m, n);
        for (std::size_t k = 0; k < vars.size(); ++k) {
            strategy(vars[k].type, vars[k].vector) = std::isnan(fixed[k]) ? x[column[k]] : fixed[k];
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!in_lp[i]) {
                for (std::size_t v = 0; v < n; ++v) strategy(i, v) = report.strategy(i, v);
            }
        }
        report.strategy = std::move(strategy);
        report.lp_variables = free_count;
        report.lp_rows = row_count;
        report.presolved = presolved;
        return true;
    };

    if (attempt(false)) return report;
    report.used_balance_band = true;
    if (attempt(true)) return report;
    throw Error(ErrorKind::SolverFailure, "attacker LP infeasible even with the balance tolerance");
}

AttackStrategy solve_attacker(const GameSpec& game, const EquilibriumSolution& solution,
                              const AttackerOptions& options) {
    return solve_attacker_detailed(game, solution, options).strategy;
}

BneReport verify_bne(const GameSpec& game, const AttackStrategy& strategy, const DetectionPolicy& policy,
                     double tol, double band) {
    const std::size_t m = game.num_types();
    const std::size_t n = game.num_vectors();
    BneReport report;
    report.tol = tol;
    if (strategy.num_types() != m || strategy.num_vectors() != n || policy.size() != n) {
        report.strategy_valid = false;
        return report;
    }
    try {
        strategy.check(tol);
    } catch (const Error&) {
        report.strategy_valid = false;
    }

    report.best_response_gap.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double best = best_response(game, i, policy).value;
        report.best_response_gap[i] = best - attacker_payoff(game, i, strategy, policy);
        report.max_gap = std::max(report.max_gap, report.best_response_gap[i]);
    }

    report.balance_lhs.assign(n, 0.0);
    report.balance_rhs.resize(n);
    report.band.resize(n);
    report.residual.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            lhs += game.p_attack() * game.type_prior(i) * strategy(i, v) * game.span(i, v);
        }
        const double rhs = (1.0 - game.p_attack()) * game.false_alarm_cost(v) * game.p0(v);
        report.balance_lhs[v] = lhs;
        report.balance_rhs[v] = rhs;
        report.band[v] = classify_band(policy[v], band);
        double r = 0.0;
        switch (report.band[v]) {
            case DetectionBand::Zero: r = std::max(0.0, lhs - rhs); break;
            case DetectionBand::Interior: r = std::abs(lhs - rhs); break;
            case DetectionBand::One: r = std::max(0.0, rhs - lhs); break;
        }
        report.residual[v] = r;
        if (r > report.max_residual) {
            report.max_residual = r;
            report.worst_vector = v;
        }
    }
    report.pass = report.strategy_valid && report.max_gap <= tol && report.max_residual <= tol;
    return report;
}

std::vector<std::size_t> oracle_grid_sizes(const GameSpec& game, double resolution) {
    if (!(resolution > 0.0)) throw Error(ErrorKind::InvalidArgument, "oracle resolution must be positive");
    const Box box = gain_bounds(game);
    std::vector<std::size_t> sizes(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        const double steps = std::floor(box.width(i) / resolution);
        if (steps > 1e12) throw Error(ErrorKind::GridTooLarge, "oracle grid too large");
        std::size_t count = static_cast<std::size_t>(steps) + 1;
        const double last = box.lower(i) + static_cast<double>(count - 1) * resolution;
        if (last < box.upper(i)) ++count;
        sizes[i] = count;
    }
    return sizes;
}

namespace {

std::vector<double> grid_axis(double lo, double hi, double resolution, std::size_t count) {
    std::vector<double> axis(count);
    for (std::size_t k = 0; k < count; ++k) axis[k] = std::min(hi, lo + static_cast<double>(k) * resolution);
    axis.back() = hi;
    return axis;
}

}  // namespace

OracleResult brute_force_oracle(const GameSpec& game, double resolution, std::size_t max_points) {
    const std::size_t m = game.num_types();
    if (m > 3) throw Error(ErrorKind::GridTooLarge, "grid oracle supports at most 3 types");
    const Box box = gain_bounds(game);
    const std::vector<std::size_t> sizes = oracle_grid_sizes(game, resolution);
    double total = 1.0;
    for (std::size_t s : sizes) total *= static_cast<double>(s);
    if (total > static_cast<double>(max_points)) {
        throw Error(ErrorKind::GridTooLarge, "oracle grid has " + std::to_string(static_cast<long long>(total)) +
                                                 " points, limit " + std::to_string(max_points));
    }
    std::vector<std::vector<double>> axes(m);
    for (std::size_t i = 0; i < m; ++i) axes[i] = grid_axis(box.lower(i), box.upper(i), resolution, sizes[i]);

    const std::size_t n = game.num_vectors();
    const std::size_t last = m - 1;
    const std::vector<double>& sweep = axes[last];
    const std::size_t kx = sweep.size();
    const double pa = game.p_attack();

    std::vector<double> weight(n);
    for (std::size_t v = 0; v < n; ++v) weight[v] = (1.0 - pa) * game.false_alarm_cost(v) * game.p0(v);

    OracleResult best;
    best.value = -std::numeric_limits<double>::infinity();
    best.points = static_cast<std::size_t>(total);
    std::vector<double> g(m);
    std::vector<double> d_const(kx + 1), d_lin(kx + 1), d_slope(kx + 1);

    std::vector<std::size_t> idx(last, 0);
    for (;;) {
        double row_const = 0.0;
        for (std::size_t i = 0; i < last; ++i) {
            g[i] = axes[i][idx[i]];
            row_const -= pa * game.type_prior(i) * g[i];
        }
        std::fill(d_const.begin(), d_const.end(), 0.0);
        std::fill(d_lin.begin(), d_lin.end(), 0.0);
        std::fill(d_slope.begin(), d_slope.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            if (weight[v] == 0.0) continue;
            double floor = 0.0;
            for (std::size_t i = 0; i < last; ++i) {
                if (game.inert(i, v)) continue;
                floor = std::max(floor, (game.u_undetected(i, v) - g[i]) / game.span(i, v));
            }
            const double a = game.u_undetected(last, v);
            const double d = game.span(last, v);
            // grid points x with (a - x) / d > floor use the last type's term, the rest use floor
            std::size_t cut = 0;
            if (!game.inert(last, v)) {
                const auto beyond = [&](double x) { return (a - x) / d > floor; };
                std::size_t lo = 0, hi = kx;
                while (lo < hi) {
                    const std::size_t mid = (lo + hi) / 2;
                    if (beyond(sweep[mid])) {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                cut = lo;
            }
            if (cut > 0) {
                d_lin[0] += weight[v] * a / d;
                d_lin[cut] -= weight[v] * a / d;
                d_slope[0] += weight[v] / d;
                d_slope[cut] -= weight[v] / d;
            }
            if (floor > 0.0 && cut < kx) {
                d_const[cut] += weight[v] * floor;
                d_const[kx] -= weight[v] * floor;
            }
        }
        double run_const = 0.0, run_lin = 0.0, run_slope = 0.0;
        for (std::size_t k = 0; k < kx; ++k) {
            run_const += d_const[k];
            run_lin += d_lin[k];
            run_slope += d_slope[k];
            const double x = sweep[k];
            const double cost = run_const + run_lin - run_slope * x;
            const double value = row_const - pa * game.type_prior(last) * x - cost;
            if (value > best.value) {
                best.value = value;
                g[last] = x;
                best.g = g;
            }
        }

        std::size_t pos = 0;
        while (pos < last && ++idx[pos] == axes[pos].size()) {
            idx[pos] = 0;
            ++pos;
        }
        if (pos == last) break;
    }
    return best;
}

double oracle_slack(const GameSpec& game, double resolution) {
    double false_alarm = 0.0;
    for (std::size_t v = 0; v < game.num_vectors(); ++v) false_alarm += game.false_alarm_cost(v) * game.p0(v);
    const double d_min = game.min_denominator();
    double total = 0.0;
    for (std::size_t i = 0; i < game.num_types(); ++i) {
        total += game.p_attack() * game.type_prior(i) + (1.0 - game.p_attack()) * false_alarm / d_min;
    }
    return resolution * total;
}

ThresholdClassifier sample_threshold_classifier(const GameSpec& game, const UtilityProfile& profile, Rng& rng) {
    check_profile(game, profile.g);
    return {profile, rng.uniform()};
}

std::vector<ThresholdComponent> threshold_mixture(const DetectionPolicy& policy) {
    std::vector<double> levels;
    for (double p : policy.pi) {
        if (p > 0.0) levels.push_back(p);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<ThresholdComponent> out;
    double previous = 0.0;
    for (double level : levels) {
        out.push_back({level, level - previous});
        previous = level;
    }
    if (previous < 1.0) out.push_back({std::numeric_limits<double>::infinity(), 1.0 - previous});
    return out;
}

std::vector<double> mixture_detection(const DetectionPolicy& policy, const std::vector<ThresholdComponent>& mixture) {
    // components flagging v form a prefix when sorted by level
    std::vector<double> prefix(mixture.size() + 1, 0.0);
    for (std::size_t k = 0; k < mixture.size(); ++k) prefix[k + 1] = prefix[k] + mixture[k].mass;
    std::vector<double> out(policy.size(), 0.0);
    for (std::size_t v = 0; v < policy.size(); ++v) {
        const auto it = std::upper_bound(mixture.begin(), mixture.end(), policy[v],
                                         [](double p, const ThresholdComponent& c) { return p < c.level; });
        out[v] = prefix[static_cast<std::size_t>(it - mixture.begin())];
    }
    return out;
}

}  // namespace advgame
