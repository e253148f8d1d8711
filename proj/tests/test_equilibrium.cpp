#include <doctest.h>

#include <cmath>

#include "advgame/equilibrium.hpp"
#include "advgame/gallery.hpp"
#include "support.hpp"

using namespace advgame;
using namespace advgame::testing;

namespace {

GameSpec two_type_vector(double uu1, double ud1, double uu2, double ud2) {
    RawGame raw;
    raw.p_attack = 0.5;
    raw.type_priors = {0.5, 0.5};
    raw.vectors.push_back(raw_vector(0, 0.5, 1.0, {uu1, uu2}, {ud1, ud2}));
    raw.vectors.push_back(raw_vector(1, 0.5, 1.0, {20.0, 20.0}, {1.0, 1.0}));
    return validate_game(raw);
}

GameSpec no_false_alarm_game() {
    RawGame raw;
    raw.p_attack = 0.3;
    raw.type_priors = {0.4, 0.6};
    for (int v = 0; v < 6; ++v) {
        raw.vectors.push_back(raw_vector(v, 1.0 / 6.0, 0.0, {1.0 + v, 5.0 - 0.5 * v}, {2.0 + v % 3, 1.0 + v % 2}));
    }
    return validate_game(raw);
}

}  // namespace

TEST_CASE("pi_of_G examples") {
    const GameSpec g = single_vector_game(10.0, 5.0, 3.0, 0.5);
    CHECK(pi_of_G(g, std::vector<double>{4.0})[0] == doctest::Approx(0.4));
    CHECK(pi_of_G(g, std::vector<double>{10.0})[0] == 0.0);
    const GameSpec two = two_type_vector(10.0, 5.0, 8.0, 4.0);
    CHECK(pi_of_G(two, std::vector<double>{4.0, 2.0})[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(pi_of_G(g, std::vector<double>{11.0}), Error);
    CHECK_THROWS_AS(pi_of_G(g, std::vector<double>{4.0, 1.0}), Error);
}

TEST_CASE("min_gain examples") {
    const GameSpec g = single_vector_game(10.0, 5.0, 3.0, 0.5);
    CHECK(min_gain(g, std::vector<double>{4.0}) == doctest::Approx(-2.6));

    const GameSpec g1 = make_game1();
    const Box box = gain_bounds(g1);
    double expected = 0.0;
    for (std::size_t i = 0; i < 2; ++i) expected -= g1.p_attack() * g1.type_prior(i) * box.upper(i);
    CHECK(min_gain(g1, box.upper()) == doctest::Approx(expected));
}

TEST_CASE("min_gain on a grid matches the oracle") {
    const GameSpec g1 = make_game1();
    const EquilibriumSolution sol = solve_defender(g1);
    const OracleResult o = brute_force_oracle(g1, 1.0);
    CHECK(o.value <= sol.value + 1e-12);
    CHECK(min_gain(g1, o.g) == doctest::Approx(o.value).epsilon(1e-12));
    CHECK(sol.value - o.value <= oracle_slack(g1, 1.0));
}

TEST_CASE("solve_defender without false-alarm cost detects everything") {
    const GameSpec g = no_false_alarm_game();
    const EquilibriumSolution sol = solve_defender(g);
    const Box box = gain_bounds(g);
    double expected = 0.0;
    for (std::size_t i = 0; i < 2; ++i) expected -= g.p_attack() * g.type_prior(i) * box.lower(i);
    CHECK(sol.value == doctest::Approx(expected));
    // detecting everything is free, so it attains the same worst case
    const DetectionPolicy all = DetectionPolicy::constant(g.num_vectors(), 1.0);
    double worst = -false_alarm_term(g, all);
    for (std::size_t i = 0; i < 2; ++i) worst -= g.p_attack() * g.type_prior(i) * best_response(g, i, all).value;
    CHECK(worst == doctest::Approx(sol.value));
}

TEST_CASE("game 2 with a tiny false-alarm ratio flags almost everything") {
    Game2Params p;
    p.ell = 0.001;
    p.max_amount = 999;
    const GameSpec g = make_game2(p);
    const EquilibriumSolution sol = solve_defender(g);
    double flagged = 0.0;
    for (std::size_t v = 1; v < g.num_vectors(); ++v) flagged += sol.policy[v] > 0.9 ? 1.0 : 0.0;
    CHECK(flagged / static_cast<double>(g.num_vectors() - 1) >= 0.99);
}

TEST_CASE("solve_defender matches the oracle on a small random game") {
    const GameSpec g = random_game(20, 2, 20);
    const EquilibriumSolution sol = solve_defender(g);
    const OracleResult o = brute_force_oracle(g, 1e-2);
    CHECK(o.value <= sol.value + 1e-12);
    CHECK(sol.value - o.value <= oracle_slack(g, 1e-2));
    CHECK(sol.value - o.value <= 1e-2);
    const OracleResult coarse = brute_force_oracle(g, 0.1);
    CHECK(coarse.value <= sol.value + 1e-12);
    CHECK(sol.value <= coarse.value + oracle_slack(g, 0.1));
}

TEST_CASE("equilibrium solution invariants") {
    const GameSpec g = make_game1();
    const EquilibriumSolution sol = solve_defender(g);
    const DetectionPolicy again = pi_of_G(g, sol.g_max);
    for (std::size_t v = 0; v < g.num_vectors(); ++v) CHECK(again[v] == sol.policy[v]);
    CHECK(sol.value == doctest::Approx(min_gain(g, sol.g_max.g)).epsilon(1e-12));
    CHECK(sol.value == doctest::Approx(-11.2280242033).epsilon(1e-10));
}

TEST_CASE("solve_attacker examples") {
    SUBCASE("single vector") {
        const GameSpec g = single_vector_game(10.0, 5.0, 3.0, 0.5);
        const EquilibriumSolution sol = solve_defender(g);
        const AttackStrategy a = solve_attacker(g, sol);
        CHECK(a(0, 0) == doctest::Approx(1.0));
        CHECK(verify_bne(g, a, sol.policy, 1e-6).pass);
    }
    SUBCASE("huge false-alarm cost keeps detection off") {
        RawGame raw;
        raw.p_attack = 0.1;
        raw.type_priors = {1.0};
        for (int v = 0; v < 4; ++v) raw.vectors.push_back(raw_vector(v, 0.25, 1e6, {1.0 + v}, {1.0}));
        const GameSpec g = validate_game(raw);
        const EquilibriumSolution sol = solve_defender(g);
        for (double p : sol.policy.pi) CHECK(p == 0.0);
        const AttackStrategy a = solve_attacker(g, sol);
        CHECK(a(0, 3) == doctest::Approx(1.0));
        CHECK(verify_bne(g, a, sol.policy, 1e-6).pass);
    }
    SUBCASE("random 20-vector game") {
        const GameSpec g = random_game(77, 2, 20);
        const EquilibriumSolution sol = solve_defender(g);
        const AttackStrategy a = solve_attacker(g, sol);
        CHECK_NOTHROW(a.check(1e-9));
        CHECK(verify_bne(g, a, sol.policy, 1e-6).pass);
    }
}

TEST_CASE("verify_bne catches violations") {
    const GameSpec g = make_game1();
    const EquilibriumSolution sol = solve_defender(g);
    AttackStrategy a = solve_attacker(g, sol);
    REQUIRE(verify_bne(g, a, sol.policy, 1e-6).pass);

    SUBCASE("mass on a suboptimal vector") {
        // vector 0 pays type 1 nothing
        for (std::size_t v = 0; v < g.num_vectors(); ++v) a(0, v) *= 0.9;
        a(0, 0) += 0.1;
        const BneReport r = verify_bne(g, a, sol.policy, 1e-6);
        CHECK_FALSE(r.pass);
        CHECK(r.best_response_gap[0] > 1e-6);
    }
    SUBCASE("always detecting") {
        const BneReport r = verify_bne(g, a, DetectionPolicy::constant(g.num_vectors(), 1.0), 1e-6);
        CHECK_FALSE(r.pass);
        CHECK(r.max_residual > 1e-6);
        CHECK(r.band[r.worst_vector] == DetectionBand::One);
    }
}

TEST_CASE("oracle examples and guards") {
    // no false alarms: U^D = -p_a G, maximized at the lower bound
    const GameSpec g = single_vector_game(10.0, 5.0, 0.0, 0.5);
    const OracleResult o = brute_force_oracle(g, 0.5);
    CHECK(o.g[0] == -5.0);
    CHECK(o.value == doctest::Approx(2.5));

    const GameSpec g1 = make_game1();
    const EquilibriumSolution sol = solve_defender(g1);
    const OracleResult half = brute_force_oracle(g1, 0.5);
    CHECK(half.value <= sol.value + 1e-12);
    CHECK(sol.value <= half.value + oracle_slack(g1, 0.5));

    CHECK_THROWS_AS(brute_force_oracle(g1, 1e-5), Error);
    CHECK_THROWS_AS(brute_force_oracle(random_game(3, 3, 5), 1e-2, 1000), Error);
    Game3Params p;
    p.k = 3;
    CHECK_THROWS_AS(brute_force_oracle(make_game3(p), 1.0), Error);
}

TEST_CASE("oracle row sweep matches direct evaluation") {
    for (int trial = 0; trial < 5; ++trial) {
        const GameSpec g = random_game(900 + trial, 1 + trial % 3, 15);
        const double res = g.num_types() == 1 ? 0.7 : (g.num_types() == 2 ? 0.3 : 0.2);
        const OracleResult o = brute_force_oracle(g, res);
        const Box box = gain_bounds(g);
        // brute enumeration of the same grid
        const auto sizes = oracle_grid_sizes(g, res);
        std::vector<std::size_t> idx(g.num_types(), 0);
        double best = -1e300;
        while (true) {
            std::vector<double> pt(g.num_types());
            for (std::size_t i = 0; i < pt.size(); ++i) {
                pt[i] = idx[i] + 1 == sizes[i] ? box.upper(i) : box.lower(i) + res * static_cast<double>(idx[i]);
            }
            best = std::max(best, min_gain(g, pt));
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == sizes[k]) idx[k++] = 0;
            if (k == idx.size()) break;
        }
        CHECK(o.value == doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("threshold classifiers") {
    const GameSpec g = single_vector_game(10.0, 5.0, 3.0, 0.5);
    const UtilityProfile prof{{4.0}, gain_bounds(g)};
    const DetectionPolicy pol = pi_of_G(g, prof);
    CHECK(ThresholdClassifier{prof, 0.3}.classify(pol, 0) == 1);
    CHECK(ThresholdClassifier{prof, 0.5}.classify(pol, 0) == 0);

    const GameSpec g1 = make_game1();
    const EquilibriumSolution sol = solve_defender(g1);
    const auto mix = threshold_mixture(sol.policy);
    const auto swept = mixture_detection(sol.policy, mix);
    for (std::size_t v = 0; v < g1.num_vectors(); ++v) CHECK(std::abs(swept[v] - sol.policy[v]) <= 1e-12);

    Rng rng(5);
    std::vector<double> hits(g1.num_vectors(), 0.0);
    const int draws = 20000;
    for (int k = 0; k < draws; ++k) {
        const ThresholdClassifier c = sample_threshold_classifier(g1, sol.g_max, rng);
        CHECK(c.threshold >= 0.0);
        CHECK(c.threshold <= 1.0);
        for (std::size_t v = 0; v < g1.num_vectors(); ++v) hits[v] += c.classify(sol.policy, v);
    }
    // 101 vectors checked at once
    for (std::size_t v = 0; v < g1.num_vectors(); ++v) {
        CHECK(std::abs(hits[v] / draws - sol.policy[v]) <= 4.0 * std::sqrt(0.25 / draws));
    }
}

TEST_CASE("structural properties of pi_G and U^D") {
    Rng rng(8);
    for (int trial = 0; trial < 12; ++trial) {
        const GameSpec g = random_game(300 + trial, 1 + trial % 3, 40);
        const Box box = gain_bounds(g);
        for (int k = 0; k < 20; ++k) {
            std::vector<double> a = random_profile(box, rng), b = a;
            for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.uniform(a[i], box.upper(i));
            std::size_t clamped = 0;
            const DetectionPolicy pa = pi_of_G(g, a, &clamped);
            CHECK(clamped == 0);
            const DetectionPolicy pb = pi_of_G(g, b);
            for (std::size_t v = 0; v < g.num_vectors(); ++v) {
                CHECK(pb[v] <= pa[v]);
                CHECK(pa[v] >= 0.0);
                CHECK(pa[v] <= 1.0);
            }

            const std::vector<double> c = random_profile(box, rng);
            const double lambda = rng.uniform();
            std::vector<double> mid(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) mid[i] = lambda * a[i] + (1.0 - lambda) * c[i];
            CHECK(min_gain(g, mid) >= lambda * min_gain(g, a) + (1.0 - lambda) * min_gain(g, c) - 1e-9);

            CHECK(worst_case_payoff(g, a) >= min_gain(g, a) - 1e-9);
        }
    }
}

TEST_CASE("tightness on random games") {
    for (int trial = 0; trial < 10; ++trial) {
        const GameSpec g = random_game(400 + trial, 1 + trial % 3, 30);
        const EquilibriumSolution sol = solve_defender(g);
        for (std::size_t i = 0; i < g.num_types(); ++i) {
            CHECK(std::abs(best_response(g, i, sol.policy).value - sol.g_max.g[i]) <= 1e-6);
        }
    }
}
