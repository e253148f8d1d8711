#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advgame/game.hpp"
#include "advgame/min_gain.hpp"
#include "advgame/rng.hpp"

namespace advgame {

/// Throws ProfileOutOfBox unless g lies in the gain box (relative slack 1e-9).
void check_profile(const GameSpec& game, std::span<const double> g);

/// Optimal detection policy for the profile. Values above 1 (only possible through roundoff at the
/// box edge) are clamped and counted in `clamped`.
DetectionPolicy pi_of_G(const GameSpec& game, std::span<const double> g, std::size_t* clamped = nullptr);
DetectionPolicy pi_of_G(const GameSpec& game, const UtilityProfile& profile, std::size_t* clamped = nullptr);

/// -p_a sum_i p_i G_i - (1 - p_a) sum_v c_fa(v) P0(v) pi_G(v).
double min_gain(const GameSpec& game, std::span<const double> g);

/// Defender worst case when playing pi_G: attackers best-respond instead of being held to G.
double worst_case_payoff(const GameSpec& game, std::span<const double> g);

/// The defender LP as a min-gain problem over the gain box.
MinGainProblem defender_problem(const GameSpec& game);

struct EquilibriumSolution {
    UtilityProfile g_max;
    DetectionPolicy policy;
    double value = 0.0;
    std::optional<AttackStrategy> attacker;
    std::string method;
    bool certified = false;
};

/// Maximizes min_gain exactly; G is then lowered to the attained best-response values, which
/// leaves the policy unchanged and makes every type's best response equal G_i.
EquilibriumSolution solve_defender(const GameSpec& game, const MinGainOptions& options = {});

struct AttackerOptions {
    double tol_support = 1e-7;
    double tol_balance = 1e-6;
    double band = 1e-9;  // pi below band counts as 0, above 1 - band as 1
    std::size_t max_lp_cells = 40'000'000;
};

struct AttackerReport {
    AttackStrategy strategy;
    bool used_balance_band = false;  // exact balance rows were infeasible in floating point
    std::size_t lp_variables = 0;
    std::size_t lp_rows = 0;
    std::size_t presolved = 0;
};

AttackerReport solve_attacker_detailed(const GameSpec& game, const EquilibriumSolution& solution,
                                       const AttackerOptions& options = {});
AttackStrategy solve_attacker(const GameSpec& game, const EquilibriumSolution& solution,
                              const AttackerOptions& options = {});

enum class DetectionBand { Zero, Interior, One };

struct BneReport {
    double tol = 0.0;
    std::vector<double> best_response_gap;  // per type
    std::vector<double> balance_lhs;        // p_a sum_i p_i alpha^i_v (U^u_i + U^d_i)
    std::vector<double> balance_rhs;        // (1 - p_a) c_fa(v) P0(v)
    std::vector<DetectionBand> band;
    std::vector<double> residual;           // violation of the balance condition for the band
    double max_gap = 0.0;
    double max_residual = 0.0;
    std::size_t worst_vector = 0;
    bool strategy_valid = true;
    bool pass = false;
};

BneReport verify_bne(const GameSpec& game, const AttackStrategy& strategy, const DetectionPolicy& policy,
                     double tol, double band = 1e-9);

struct OracleResult {
    std::vector<double> g;
    double value = 0.0;
    std::size_t points = 0;
};

inline constexpr std::size_t kOracleMaxPoints = 200'000'000;

/// Grid search of min_gain over the box: lower + k * resolution for each coordinate, plus the
/// upper bound. Rows of the last coordinate are swept with prefix sums. m <= 3.
OracleResult brute_force_oracle(const GameSpec& game, double resolution, std::size_t max_points = kOracleMaxPoints);

/// Slack between the grid maximum and the true maximum, from the Lipschitz constant of min_gain.
double oracle_slack(const GameSpec& game, double resolution);

std::vector<std::size_t> oracle_grid_sizes(const GameSpec& game, double resolution);

struct ThresholdClassifier {
    UtilityProfile g;
    double threshold = 0.0;

    /// 1 iff pi_G(v) >= threshold; `policy` must be pi_of_G(g).
    int classify(const DetectionPolicy& policy, std::size_t v) const { return policy[v] >= threshold ? 1 : 0; }
};

ThresholdClassifier sample_threshold_classifier(const GameSpec& game, const UtilityProfile& profile, Rng& rng);

/// Deterministic classifiers 1{pi >= level} with their probability under a uniform threshold.
struct ThresholdComponent {
    double level = 0.0;
    double mass = 0.0;
};

std::vector<ThresholdComponent> threshold_mixture(const DetectionPolicy& policy);

/// Probability that the mixture flags each vector, summed component by component.
std::vector<double> mixture_detection(const DetectionPolicy& policy, const std::vector<ThresholdComponent>& mixture);

}  // namespace advgame
