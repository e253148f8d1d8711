#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "advgame/equilibrium.hpp"
#include "advgame/game.hpp"
#include "advgame/io.hpp"
#include "advgame/min_gain.hpp"
#include "advgame/rng.hpp"

namespace advgame {

/// One training draw. Non-attack records keep the payoffs of the sampled vector, not its id.
struct SampleRecord {
    enum class Kind { Attack, NonAttack };

    Kind kind = Kind::NonAttack;
    std::size_t type = 0;  // attacks only
    double false_alarm_cost = 0.0;
    std::vector<double> u_undetected;
    std::vector<double> u_detected;

    static SampleRecord attack(std::size_t type);
    static SampleRecord non_attack(double false_alarm_cost, std::vector<double> u_undetected,
                                   std::vector<double> u_detected);

    bool is_attack() const noexcept { return kind == Kind::Attack; }
};

/// Non-attack record for vector v of the game.
SampleRecord record_for_vector(const GameSpec& game, std::size_t v);

/// i.i.d. draws: attack of type i w.p. p_a p_i, non-attack vector v w.p. (1 - p_a) P0(v).
std::vector<SampleRecord> draw_samples(const GameSpec& game, std::size_t n, Rng& rng);

/// Turns the label-0 columns of a dataset row into payoffs.
class PayoffModel {
public:
    virtual ~PayoffModel() = default;
    virtual std::size_t num_types() const = 0;
    virtual std::vector<std::string> required_columns() const = 0;
    /// `cells` are the row's values for required_columns(), in that order.
    virtual SampleRecord evaluate(const std::vector<std::string>& cells) const = 0;
};

/// Rows carry a `vector_id` column naming a vector of the game.
class GameVectorPayoffs : public PayoffModel {
public:
    explicit GameVectorPayoffs(const GameSpec& game) : game_(game) {}
    std::size_t num_types() const override { return game_.num_types(); }
    std::vector<std::string> required_columns() const override { return {"vector_id"}; }
    SampleRecord evaluate(const std::vector<std::string>& cells) const override;

private:
    const GameSpec& game_;
};

/// Rows carry an `Amount` column: U^u = A, U^d = 0, c_fa = ell * A with A floored to an integer.
class FraudAmountPayoffs : public PayoffModel {
public:
    explicit FraudAmountPayoffs(double ell) : ell_(ell) {}
    std::size_t num_types() const override { return 1; }
    std::vector<std::string> required_columns() const override { return {"Amount"}; }
    SampleRecord evaluate(const std::vector<std::string>& cells) const override;

private:
    double ell_;
};

struct LoadOptions {
    std::string label_column = "Class";
    std::string type_column = "type";  // 1-based attacker type; optional when m = 1
};

/// Label 1 rows become attacks, label 0 rows non-attacks. Throws BadLabel, MissingFeature.
std::vector<SampleRecord> load_samples(const CsvTable& table, const PayoffModel& model,
                                       const LoadOptions& options = {});

/// Samples file written by write_samples_csv: kind, type, c_fa, u_undetected_1.., u_detected_1..
std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(const std::filesystem::path& path, const std::vector<SampleRecord>& samples,
                       std::size_t num_types);

/// Empirical objective -(1/N)[sum_attacks G_type + sum_non_attacks c_fa pi_G] as a min-gain problem.
MinGainProblem saa_problem(const std::vector<SampleRecord>& samples, const Box& box);

/// The empirical objective evaluated directly, record by record.
double empirical_min_gain(const std::vector<SampleRecord>& samples, std::span<const double> g);

struct TrainingReport {
    UtilityProfile g_trained;
    double empirical_value = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string method;
};

TrainingReport saa_solve(const std::vector<SampleRecord>& samples, const Box& box,
                         const MinGainOptions& options = {});

/// 100 * U^D(G_max) / U^D(g). Throws ZeroDenominator when either value is 0.
double approximation_ratio(const GameSpec& game, const EquilibriumSolution& solution, std::span<const double> g);

/// U^D(G_max) - U^D(g), reported when the ratio is undefined.
double value_gap(const GameSpec& game, const EquilibriumSolution& solution, std::span<const double> g);

inline constexpr double kArgmaxValueGap = 1e-7;

struct ReplicaResult {
    std::size_t n = 0;
    std::size_t replica = 0;
    std::vector<double> g;
    double empirical_value = 0.0;
    double true_value = 0.0;
    double ratio = 0.0;  // NaN when undefined
    bool in_argmax = false;
};

/// saa_solve on `replicas` independent sample sets per n, replica r seeded by stream(seed, r).
std::vector<ReplicaResult> saa_sweep(const GameSpec& game, const EquilibriumSolution& solution,
                                     const std::vector<std::size_t>& ns, std::size_t replicas, std::uint64_t seed,
                                     const MinGainOptions& options = {}, std::size_t threads = 0);

/// Fraction of replicas whose trained G is within kArgmaxValueGap of the optimal value.
double estimate_pN(const GameSpec& game, const EquilibriumSolution& solution, std::size_t n, std::size_t replicas,
                   std::uint64_t seed, const MinGainOptions& options = {}, std::size_t threads = 0);

}  // namespace advgame
