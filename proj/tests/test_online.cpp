#include <doctest.h>

#include <cmath>

#include "advgame/equilibrium.hpp"
#include "advgame/gallery.hpp"
#include "advgame/online.hpp"
#include "support.hpp"

using namespace advgame;
using namespace advgame::testing;

namespace {

GameSpec two_vector_game(double p_attack) {
    RawGame raw;
    raw.p_attack = p_attack;
    raw.type_priors = {1.0};
    raw.vectors.push_back(raw_vector(0, 0.4, 2.0, {6.0}, {2.0}));
    raw.vectors.push_back(raw_vector(1, 0.6, 1.0, {3.0}, {5.0}));
    return validate_game(raw);
}

OnlineOptions frozen() {
    OnlineOptions o;
    o.step_scale = 0.0;
    return o;
}

}  // namespace

TEST_CASE("environment_step edge cases") {
    Rng rng(1);
    const GameSpec quiet = two_vector_game(0.0);
    const DetectionPolicy zero = DetectionPolicy::constant(2, 0.0);
    for (int k = 0; k < 200; ++k) CHECK_FALSE(environment_step(quiet, zero, rng).is_attack());

    const GameSpec loud = two_vector_game(1.0);
    for (int k = 0; k < 200; ++k) {
        const Event e = environment_step(loud, zero, rng);
        CHECK(e.is_attack());
        CHECK(e.type == 0);
        CHECK(e.vector == 0);
    }
}

TEST_CASE("attackers facing the equilibrium policy earn G_max") {
    const GameSpec g = make_game1();
    const EquilibriumSolution sol = solve_defender(g);
    Rng rng(12);
    int attacks = 0;
    for (int k = 0; k < 3000; ++k) {
        const Event e = environment_step(g, sol.policy, rng);
        if (!e.is_attack()) continue;
        ++attacks;
        CHECK(std::abs(attacker_payoff(g, e.type, e.vector, sol.policy) - sol.g_max.g[e.type]) <= 1e-6);
    }
    CHECK(attacks > 0);
}

TEST_CASE("efficient learner: zero-loss stream leaves G unchanged") {
    const GameSpec g = two_vector_game(0.0);
    const Box box = gain_bounds(g);
    Rng rng(3);
    const auto upper = std::vector<double>(box.upper().begin(), box.upper().end());
    const OnlineTrace t = efficient_ogd_run(g, 50, upper, rng);
    for (std::size_t s = 0; s < t.steps(); ++s) {
        CHECK(t.profile(s)[0] == upper[0]);
        CHECK(t.realized_loss[s] == 0.0);
    }
    const Regret r = stackelberg_regret(t, g);
    CHECK(r.realized == 0.0);
    CHECK(r.surrogate == 0.0);
}

TEST_CASE("efficient learner: attack step moves G by the step size") {
    const GameSpec g = two_vector_game(1.0);
    Rng rng(3);
    const std::vector<double> start{3.0};
    const OnlineTrace t = efficient_ogd_run(g, 3, start, rng);
    CHECK(t.profile(1)[0] == doctest::Approx(2.0));
    CHECK(t.profile(2)[0] == doctest::Approx(2.0 - 1.0 / std::sqrt(2.0)));
    CHECK(t.surrogate_loss[0] == 3.0);
}

TEST_CASE("efficient learner: non-attack step follows the active type") {
    RawGame raw;
    raw.p_attack = 0.0;
    raw.type_priors = {0.5, 0.5};
    raw.vectors.push_back(raw_vector(0, 1.0, 4.0, {10.0, 6.0}, {5.0, 2.0}));
    const GameSpec g = validate_game(raw);
    Rng rng(2);
    // pi = max(6/15, 5/8): type 2 attains it
    const std::vector<double> start{4.0, 1.0};
    const OnlineTrace t = efficient_ogd_run(g, 2, start, rng);
    CHECK(t.realized_loss[0] == doctest::Approx(4.0 * 5.0 / 8.0));
    CHECK(t.profile(1)[0] == 4.0);
    CHECK(t.profile(1)[1] == doctest::Approx(1.0 + 4.0 / 8.0));
}

TEST_CASE("efficient learner invariants") {
    Game3Params p;
    p.k = 7;
    p.seed = 5;
    const GameSpec g = make_game3(p);
    const Box box = gain_bounds(g);
    Rng rng(21);
    const OnlineTrace t = efficient_ogd_run(g, 3000, box.midpoint(), rng);
    for (std::size_t s = 0; s < t.steps(); ++s) {
        CHECK(box.contains(t.profile(s)));
        CHECK(t.realized_loss[s] <= t.surrogate_loss[s] + 1e-9);
    }
    const Regret r = stackelberg_regret(t, g);
    CHECK(r.realized <= r.surrogate + 1e-9);
    CHECK(r.surrogate <= regret_bound(efficient_bound_constants(g, t.steps())));

    const Comparator c = hindsight_comparator(t, g, t.steps());
    CHECK(c.loss == doctest::Approx(hindsight_loss(t, g, t.steps(), c.g)));
    Rng probe_rng(9);
    for (int k = 0; k < 100; ++k) {
        const auto probe = random_profile(box, probe_rng);
        CHECK(c.loss <= hindsight_loss(t, g, t.steps(), probe) + 1e-9);
    }

    const auto curve = regret_curve(t, g, 1000);
    REQUIRE(curve.size() == 3);
    CHECK(curve.back().steps == 3000);
    CHECK(curve.back().surrogate == doctest::Approx(r.surrogate));
}

TEST_CASE("constant play at the hindsight optimum has zero regret") {
    const GameSpec g = two_vector_game(1.0);
    const Box box = gain_bounds(g);
    Rng rng(4);
    const auto lower = std::vector<double>(box.lower().begin(), box.lower().end());
    const OnlineTrace t = efficient_ogd_run(g, 100, lower, rng, frozen());
    CHECK(stackelberg_regret(t, g).surrogate == doctest::Approx(0.0));
}

TEST_CASE("learner rejects bad starts") {
    const GameSpec g = two_vector_game(0.5);
    Rng rng(1);
    const std::vector<double> outside{100.0};
    CHECK_THROWS_AS(efficient_ogd_run(g, 5, outside, rng), Error);
}

TEST_CASE("naive learner on one vector") {
    const GameSpec g = single_vector_game(1.0, 1.0, 0.2, 0.0);
    Rng rng(1);
    OnlineOptions o;
    o.naive_initial_pi = 0.5;
    const OnlineTrace t = naive_ogd_run(g, 3, rng, o);
    CHECK(t.realized_loss[0] == doctest::Approx(0.5 * 0.2));
    CHECK(t.realized_loss[1] == doctest::Approx(0.3 * 0.2));
    CHECK(t.realized_loss[2] == doctest::Approx((0.3 - 0.2 / std::sqrt(2.0)) * 0.2));
}

TEST_CASE("naive learner stays under its bound on game 1") {
    const GameSpec g = make_game1();
    Rng rng = Rng::stream(5, 0);
    const OnlineTrace t = naive_ogd_run(g, 10000, rng);
    const RegretBound b = naive_bound_constants(g, t.steps());
    CHECK(b.d * b.d == doctest::Approx(101.0));
    CHECK(stackelberg_regret(t, g).surrogate <= regret_bound(b));
}

TEST_CASE("naive learner refuses huge vector sets") {
    Game3Params p;
    p.k = 17;
    p.m = 1;
    const GameSpec g = make_game3(p);
    Rng rng(1);
    try {
        naive_ogd_run(g, 10, rng);
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::VectorSetTooLarge);
    }
}

TEST_CASE("regret_bound") {
    CHECK(regret_bound({0.0, 0.0, 100}) == 0.0);
    CHECK(regret_bound({2.0, 1.0, 4}) == doctest::Approx(5.5));
    CHECK(regret_bound({40.0, 1.0, 50000}) >= 150000.0);
}

TEST_CASE("distance_to_equilibrium") {
    const GameSpec g = make_game1();
    const EquilibriumSolution sol = solve_defender(g);
    Rng rng(2);
    const OnlineTrace still = efficient_ogd_run(g, 20, sol.g_max.g, rng, frozen());
    for (double d : distance_to_equilibrium(still, sol.g_max.g)) CHECK(d == 0.0);

    const Box box = gain_bounds(g);
    const std::vector<double> corner{box.lower(0), box.upper(1)};
    const OnlineTrace t = efficient_ogd_run(g, 5, corner, rng);
    const double expected = std::hypot(corner[0] - sol.g_max.g[0], corner[1] - sol.g_max.g[1]);
    CHECK(distance_to_equilibrium(t, sol.g_max.g)[0] == doctest::Approx(expected));
}

TEST_CASE("runs are reproducible") {
    const GameSpec g = make_game1();
    const Box box = gain_bounds(g);
    OnlineOptions o;
    o.sample_losses = true;
    Rng a = Rng::stream(8, 1), b = Rng::stream(8, 1);
    const OnlineTrace x = efficient_ogd_run(g, 500, box.midpoint(), a, o);
    const OnlineTrace y = efficient_ogd_run(g, 500, box.midpoint(), b, o);
    CHECK(x.profiles == y.profiles);
    CHECK(x.sampled_loss == y.sampled_loss);
    REQUIRE(x.sampled_loss.size() == 500);
}
