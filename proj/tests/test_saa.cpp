#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "advgame/equilibrium.hpp"
#include "advgame/gallery.hpp"
#include "advgame/saa.hpp"
#include "support.hpp"

using namespace advgame;
using namespace advgame::testing;

namespace {

CsvTable table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows) {
    CsvTable t;
    t.header = std::move(header);
    t.rows = std::move(rows);
    return t;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("draw_samples edge cases") {
    Rng rng(1);
    const GameSpec all_attack = single_vector_game(10.0, 5.0, 3.0, 1.0);
    for (const auto& s : draw_samples(all_attack, 500, rng)) CHECK(s.is_attack());

    RawGame raw;
    raw.p_attack = 0.0;
    raw.type_priors = {1.0};
    raw.vectors.push_back(raw_vector(0, 0.0, 1.0, {1.0}, {1.0}));
    raw.vectors.push_back(raw_vector(1, 1.0, 7.0, {4.0}, {2.0}));
    const GameSpec point = validate_game(raw);
    for (const auto& s : draw_samples(point, 500, rng)) {
        REQUIRE_FALSE(s.is_attack());
        CHECK(s.false_alarm_cost == 7.0);
        CHECK(s.u_undetected[0] == 4.0);
    }
    CHECK_THROWS_AS(draw_samples(point, 0, rng), Error);
}

TEST_CASE("draw_samples type frequencies") {
    Game3Params p;
    p.k = 6;
    p.seed = 2;
    const GameSpec g = make_game3(p);
    Rng rng(99);
    const std::size_t n = 100000;
    std::vector<double> counts(g.num_types(), 0.0);
    for (const auto& s : draw_samples(g, n, rng)) {
        if (s.is_attack()) counts[s.type] += 1.0;
    }
    for (std::size_t i = 0; i < g.num_types(); ++i) {
        const double p_i = g.p_attack() * g.type_prior(i);
        const double sigma = std::sqrt(p_i * (1.0 - p_i) / n);
        CHECK(std::abs(counts[i] / n - p_i) <= 4.0 * sigma);
    }
}

TEST_CASE("load_samples from fraud rows") {
    const FraudAmountPayoffs model(0.05);
    const auto samples = load_samples(table({"Time", "Amount", "Class"}, {{"0", "120", "0"}, {"1", "33.7", "1"}}), model);
    REQUIRE(samples.size() == 2);
    CHECK_FALSE(samples[0].is_attack());
    CHECK(samples[0].false_alarm_cost == doctest::Approx(6.0));
    CHECK(samples[0].u_undetected[0] == 120.0);
    CHECK(samples[0].u_detected[0] == 0.0);
    CHECK(samples[1].is_attack());
    CHECK(samples[1].type == 0);

    CHECK(kind_of([&] { load_samples(table({"Amount", "Class"}, {{"5", "2"}}), model); }) == ErrorKind::BadLabel);
    CHECK(kind_of([&] { load_samples(table({"Amount"}, {{"5"}}), model); }) == ErrorKind::MissingFeature);
    CHECK(kind_of([&] { load_samples(table({"Class"}, {{"0"}}), model); }) == ErrorKind::MissingFeature);
}

TEST_CASE("load_samples with several types") {
    const GameSpec g = make_game1();
    const GameVectorPayoffs model(g);
    CHECK(kind_of([&] { load_samples(table({"vector_id", "Class"}, {{"3", "0"}}), model); }) ==
          ErrorKind::MissingFeature);
    const auto samples =
        load_samples(table({"vector_id", "Class", "type"}, {{"37", "0", ""}, {"", "1", "2"}}), model);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].u_undetected[0] == 37.0);
    CHECK(samples[0].u_detected[0] == 210.0);
    CHECK(samples[1].type == 1);
    CHECK(kind_of([&] { load_samples(table({"vector_id", "Class", "type"}, {{"", "1", "3"}}), model); }) ==
          ErrorKind::BadLabel);
    CHECK(kind_of([&] { load_samples(table({"vector_id", "Class", "type"}, {{"500", "0", ""}}), model); }) ==
          ErrorKind::MissingFeature);
}

TEST_CASE("samples file round trip") {
    const GameSpec g = make_game1();
    Rng rng(4);
    const auto samples = draw_samples(g, 300, rng);
    const auto file = std::filesystem::temp_directory_path() / "advgame_samples_rt.csv";
    write_samples_csv(file, samples, g.num_types());
    const auto back = read_samples_csv(file);
    REQUIRE(back.size() == samples.size());
    const std::vector<double> probe{40.0, 20.0};
    CHECK(empirical_min_gain(back, probe) == doctest::Approx(empirical_min_gain(samples, probe)));
}

TEST_CASE("saa_solve trivial optima") {
    const Box box({-3.0}, {8.0});
    std::vector<SampleRecord> normals(10, SampleRecord::non_attack(2.0, {8.0}, {3.0}));
    const TrainingReport a = saa_solve(normals, box);
    CHECK(a.g_trained.g[0] == doctest::Approx(8.0));
    CHECK(a.empirical_value == doctest::Approx(0.0));

    std::vector<SampleRecord> attacks(10, SampleRecord::attack(0));
    const TrainingReport b = saa_solve(attacks, box);
    CHECK(b.g_trained.g[0] == doctest::Approx(-3.0));
    CHECK(b.empirical_value == doctest::Approx(3.0));
}

TEST_CASE("saa_solve matches a grid search on the same samples") {
    const GameSpec g = make_game1();
    Rng rng = Rng::stream(7, 0);
    const auto samples = draw_samples(g, 5000, rng);
    const Box box = gain_bounds(g);
    const TrainingReport report = saa_solve(samples, box);
    CHECK(box.contains(report.g_trained.g));

    const MinGainProblem problem = saa_problem(samples, box);
    CHECK(problem.value(report.g_trained.g) == doctest::Approx(report.empirical_value).epsilon(1e-12));

    const double res = 0.25;
    double best = -1e300;
    std::vector<double> probe(2);
    for (double x = box.lower(0); x <= box.upper(0) + 1e-12; x += res) {
        for (double y = box.lower(1); y <= box.upper(1) + 1e-12; y += res) {
            probe[0] = x;
            probe[1] = y;
            best = std::max(best, problem.value(probe));
        }
    }
    // per-coordinate Lipschitz constants of the empirical objective
    std::vector<double> lip(problem.type_weights().begin(), problem.type_weights().end());
    for (std::size_t k = 0; k < problem.num_items(); ++k) {
        for (std::size_t i = 0; i < 2; ++i) {
            if (problem.span(k, i) > 0.0) lip[i] += problem.item_weight(k) / problem.span(k, i);
        }
    }
    const double slack = 0.5 * res * (lip[0] + lip[1]);
    CHECK(best <= report.empirical_value + 1e-9);
    CHECK(report.empirical_value <= best + slack);
}

TEST_CASE("approximation ratio") {
    const GameSpec g = make_game1();
    const EquilibriumSolution sol = solve_defender(g);
    CHECK(approximation_ratio(g, sol, sol.g_max.g) == doctest::Approx(100.0).epsilon(1e-12));
    Rng rng(8);
    const Box box = gain_bounds(g);
    for (int k = 0; k < 200; ++k) {
        const auto probe = random_profile(box, rng);
        CHECK(approximation_ratio(g, sol, probe) <= 100.0 + 1e-9);
        CHECK(value_gap(g, sol, probe) >= -1e-9);
    }

    RawGame raw;
    raw.p_attack = 0.0;
    raw.type_priors = {1.0};
    raw.vectors.push_back(raw_vector(0, 1.0, 0.0, {1.0}, {1.0}));
    const GameSpec zero = validate_game(raw);
    const EquilibriumSolution zs = solve_defender(zero);
    CHECK(kind_of([&] { approximation_ratio(zero, zs, zs.g_max.g); }) == ErrorKind::ZeroDenominator);
}

TEST_CASE("estimate_pN") {
    // p_a = 1: every sample set is all attacks
    RawGame raw;
    raw.p_attack = 1.0;
    raw.type_priors = {1.0};
    raw.vectors.push_back(raw_vector(0, 0.5, 5.0, {4.0}, {2.0}));
    raw.vectors.push_back(raw_vector(1, 0.5, 5.0, {6.0}, {1.0}));
    const GameSpec g = validate_game(raw);
    const EquilibriumSolution sol = solve_defender(g);
    CHECK(estimate_pN(g, sol, 5, 10, 3) == 1.0);

    const GameSpec r = random_game(77, 1, 10);
    const EquilibriumSolution rs = solve_defender(r);
    const double p = estimate_pN(r, rs, 20, 10, 5);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
}

TEST_CASE("saa_sweep is deterministic and ordered") {
    Game3Params params;
    params.k = 5;
    params.seed = 3;
    const GameSpec g = make_game3(params);
    const EquilibriumSolution sol = solve_defender(g);
    const auto a = saa_sweep(g, sol, {50, 200}, 4, 11);
    const auto b = saa_sweep(g, sol, {50, 200}, 4, 11, {}, 2);
    REQUIRE(a.size() == 8);
    REQUIRE(b.size() == 8);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].n == (k < 4 ? 50u : 200u));
        CHECK(a[k].replica == k % 4);
        CHECK(a[k].g == b[k].g);
        CHECK(a[k].ratio <= 100.0 + 1e-9);
    }
}

TEST_CASE("empirical objective is concave along segments") {
    const GameSpec g = random_game(5, 2, 30);
    Rng rng(6);
    const auto samples = draw_samples(g, 400, rng);
    const Box box = gain_bounds(g);
    for (int k = 0; k < 100; ++k) {
        const auto x = random_profile(box, rng);
        const auto y = random_profile(box, rng);
        const double t = rng.uniform();
        std::vector<double> z(2);
        for (std::size_t i = 0; i < 2; ++i) z[i] = t * x[i] + (1.0 - t) * y[i];
        const double lhs = empirical_min_gain(samples, z);
        const double rhs = t * empirical_min_gain(samples, x) + (1.0 - t) * empirical_min_gain(samples, y);
        CHECK(lhs >= rhs - 1e-9);
    }
}
