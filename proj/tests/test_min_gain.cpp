#include <doctest.h>

#include <cmath>

#include "advgame/equilibrium.hpp"
#include "advgame/gallery.hpp"
#include "advgame/min_gain.hpp"
#include "support.hpp"

using namespace advgame;
using namespace advgame::testing;

namespace {

MinGainOptions with(MinGainMethod method) {
    MinGainOptions o;
    o.method = method;
    return o;
}

}  // namespace

TEST_CASE("value and supergradient") {
    MinGainProblem p({1.0, 2.0}, Box({0.0, 0.0}, {10.0, 10.0}));
    const std::vector<double> a{6.0, 4.0}, d{10.0, 8.0};
    p.add_item(3.0, a, d);
    const std::vector<double> g{1.0, 1.0};
    // pi = max(0.5, 0.375)
    CHECK(p.detection(0, g) == doctest::Approx(0.5));
    CHECK(p.value(g) == doctest::Approx(-3.0 - 1.5));
    const auto sg = p.supergradient(g);
    CHECK(sg[0] == doctest::Approx(-1.0 + 3.0 / 10.0));
    CHECK(sg[1] == doctest::Approx(-2.0));
}

TEST_CASE("merge_duplicates sums weights") {
    MinGainProblem p({1.0}, Box({0.0}, {5.0}));
    const std::vector<double> a{3.0}, d{4.0}, b{2.0};
    p.add_item(1.0, a, d);
    p.add_item(2.0, b, d);
    p.add_item(0.5, a, d);
    const std::vector<double> g{1.0};
    const double before = p.value(g);
    p.merge_duplicates();
    CHECK(p.num_items() == 2);
    CHECK(p.value(g) == doctest::Approx(before));
}

TEST_CASE("simplex and interior point agree") {
    for (int trial = 0; trial < 30; ++trial) {
        const GameSpec g = random_game(500 + trial, 1 + trial % 3, 5 + 7 * trial);
        const MinGainProblem p = defender_problem(g);
        const MinGainResult direct = maximize_min_gain(p, with(MinGainMethod::DirectSimplex));
        const MinGainResult ipm = maximize_min_gain(p, with(MinGainMethod::InteriorPoint));
        CHECK(ipm.certified);
        CHECK(std::abs(direct.value - ipm.value) <= 1e-9 * (1.0 + std::abs(direct.value)));
        CHECK(p.box().contains(direct.g));
        CHECK(p.box().contains(ipm.g));
    }
}

TEST_CASE("interior point on game 3") {
    Game3Params params;
    params.k = 9;
    params.seed = 4;
    const GameSpec g = make_game3(params);
    const MinGainProblem p = defender_problem(g);
    const MinGainResult direct = maximize_min_gain(p, with(MinGainMethod::DirectSimplex));
    const MinGainResult ipm = maximize_min_gain(p, with(MinGainMethod::InteriorPoint));
    CHECK(ipm.certified);
    CHECK(ipm.value == doctest::Approx(direct.value).epsilon(1e-10));
}

TEST_CASE("negligible items do not derail the interior point") {
    // binomial tails put weights near 1e-70 next to weights of order 1
    const GameSpec g = make_game1();
    const MinGainResult ipm = maximize_min_gain(defender_problem(g), with(MinGainMethod::InteriorPoint));
    CHECK(std::isfinite(ipm.value));
    CHECK(ipm.g[0] == doctest::Approx(24.0));
    CHECK(ipm.g[1] == doctest::Approx(83.0));
}

TEST_CASE("degenerate shapes") {
    SUBCASE("no items") {
        MinGainProblem p({0.3}, Box({-2.0}, {4.0}));
        const MinGainResult r = maximize_min_gain(p);
        CHECK(r.g[0] == doctest::Approx(-2.0));
    }
    SUBCASE("zero width box") {
        MinGainProblem p({0.3, 0.7}, Box({1.0, -1.0}, {1.0, 3.0}));
        const std::vector<double> a{2.0, 2.0}, d{4.0, 4.0};
        p.add_item(1.0, a, d);
        for (auto m : {MinGainMethod::DirectSimplex, MinGainMethod::InteriorPoint}) {
            const MinGainResult r = maximize_min_gain(p, with(m));
            CHECK(r.g[0] == 1.0);
            CHECK(r.value == doctest::Approx(maximize_min_gain(p, with(MinGainMethod::DirectSimplex)).value));
        }
    }
    SUBCASE("inert spans") {
        MinGainProblem p({0.5, 0.5}, Box({0.0, 0.0}, {3.0, 3.0}));
        const std::vector<double> a{3.0, 0.0}, d{3.0, 0.0};
        p.add_item(10.0, a, d);
        const MinGainResult r = maximize_min_gain(p, with(MinGainMethod::InteriorPoint));
        CHECK(r.g[0] == doctest::Approx(3.0));
        CHECK(r.g[1] == doctest::Approx(0.0));
    }
}
