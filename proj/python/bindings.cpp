#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "advgame/equilibrium.hpp"
#include "advgame/gallery.hpp"
#include "advgame/io.hpp"
#include "advgame/online.hpp"
#include "advgame/saa.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace advgame;

namespace {

std::vector<double> policy_values(const GameSpec& game, const std::vector<double>& g) { return pi_of_G(game, g).pi; }

py::dict solve(const GameSpec& game, const std::string& method, double tol) {
    MinGainOptions o;
    if (method == "simplex") o.method = MinGainMethod::DirectSimplex;
    if (method == "ipm") o.method = MinGainMethod::InteriorPoint;
    const EquilibriumSolution sol = solve_defender(game, o);
    const AttackStrategy att = solve_attacker(game, sol);
    const BneReport bne = verify_bne(game, att, sol.policy, tol);
    std::vector<std::vector<double>> alpha(game.num_types());
    for (std::size_t i = 0; i < game.num_types(); ++i) alpha[i].assign(att.row(i).begin(), att.row(i).end());
    return py::dict("g_max"_a = sol.g_max.g, "value"_a = sol.value, "policy"_a = sol.policy.pi, "attacker"_a = alpha,
                    "method"_a = sol.method, "certified"_a = sol.certified, "verified"_a = bne.pass,
                    "max_gap"_a = bne.max_gap, "max_residual"_a = bne.max_residual);
}

py::dict train(const GameSpec& game, std::size_t n, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, 0);
    const auto samples = draw_samples(game, n, rng);
    const TrainingReport rep = saa_solve(samples, gain_bounds(game));
    return py::dict("g_trained"_a = rep.g_trained.g, "empirical_value"_a = rep.empirical_value,
                    "true_value"_a = min_gain(game, rep.g_trained.g), "n_samples"_a = rep.n_samples,
                    "method"_a = rep.method);
}

py::dict online(const GameSpec& game, std::size_t steps, std::uint64_t seed, const std::string& algo,
                std::optional<std::vector<double>> g_init) {
    if (steps == 0) throw Error(ErrorKind::InvalidArgument, "steps must be at least 1");
    Rng rng = Rng::stream(seed, 0);
    OnlineTrace trace;
    if (algo == "naive") {
        trace = naive_ogd_run(game, steps, rng);
    } else if (algo == "efficient") {
        const Box box = gain_bounds(game);
        const std::vector<double> g0 = g_init ? *g_init : box.midpoint();
        trace = efficient_ogd_run(game, steps, g0, rng);
    } else {
        throw Error(ErrorKind::InvalidArgument, "algo must be efficient or naive");
    }
    const Regret r = stackelberg_regret(trace, game);
    const RegretBound b = algo == "naive" ? naive_bound_constants(game, steps) : efficient_bound_constants(game, steps);
    std::vector<double> last(trace.profile(trace.steps() - 1).begin(), trace.profile(trace.steps() - 1).end());
    return py::dict("realized_regret"_a = r.realized, "surrogate_regret"_a = r.surrogate,
                    "comparator_loss"_a = r.comparator, "bound"_a = regret_bound(b), "realized_loss"_a = trace.realized_loss,
                    "surrogate_loss"_a = trace.surrogate_loss, "last_profile"_a = last);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian adversarial-classification games";

    py::register_exception<Error>(m, "AdvgameError", PyExc_ValueError);

    py::class_<GameSpec>(m, "Game")
        .def_property_readonly("num_vectors", &GameSpec::num_vectors)
        .def_property_readonly("num_types", &GameSpec::num_types)
        .def_property_readonly("p_attack", &GameSpec::p_attack)
        .def_property_readonly("type_priors",
                               [](const GameSpec& g) { return std::vector<double>(g.type_priors().begin(), g.type_priors().end()); })
        .def_property_readonly("p0", [](const GameSpec& g) { return std::vector<double>(g.p0().begin(), g.p0().end()); })
        .def("u_undetected", &GameSpec::u_undetected, "type"_a, "v"_a)
        .def("u_detected", &GameSpec::u_detected, "type"_a, "v"_a)
        .def("false_alarm_cost", &GameSpec::false_alarm_cost, "v"_a)
        .def("gain_bounds", [](const GameSpec& g) {
            const Box b = gain_bounds(g);
            return py::make_tuple(std::vector<double>(b.lower().begin(), b.lower().end()),
                                  std::vector<double>(b.upper().begin(), b.upper().end()));
        })
        .def("to_json", [](const GameSpec& g) { return game_to_json(g).dump(); })
        .def("__repr__", [](const GameSpec& g) {
            return "<Game " + std::to_string(g.num_vectors()) + " vectors, " + std::to_string(g.num_types()) + " types>";
        });

    m.def("load_game", &load_game, "path"_a);
    m.def("parse_game", [](const std::string& text) { return validate_game(parse_game_json(text)); }, "text"_a);
    m.def("write_game", &write_game_file, "path"_a, "game"_a);

    m.def(
        "game1",
        [](double theta0, double p_attack) {
            Game1Params p;
            p.theta0 = theta0;
            p.p_attack = p_attack;
            return make_game1(p);
        },
        "theta0"_a = 0.2, "p_attack"_a = 0.2);
    m.def(
        "game2",
        [](double ell, int max_amount, double mean_amount, double p_attack) {
            Game2Params p;
            p.ell = ell;
            p.max_amount = max_amount;
            p.mean_amount = mean_amount;
            p.p_attack = p_attack;
            return make_game2(p);
        },
        "ell"_a = 0.05, "max_amount"_a = 25691, "mean_amount"_a = 88.0, "p_attack"_a = 0.00172);
    m.def(
        "game3",
        [](int k, int types, double p_attack, std::uint64_t seed) {
            Game3Params p;
            p.k = k;
            p.m = types;
            p.p_attack = p_attack;
            p.seed = seed;
            return make_game3(p);
        },
        "k"_a = 10, "m"_a = 4, "p_attack"_a = 0.1, "seed"_a = 0);

    m.def("pi_of_G", &policy_values, "game"_a, "g"_a);
    m.def("min_gain", [](const GameSpec& game, const std::vector<double>& g) { return min_gain(game, g); }, "game"_a,
          "g"_a);
    m.def("worst_case_payoff",
          [](const GameSpec& game, const std::vector<double>& g) { return worst_case_payoff(game, g); }, "game"_a, "g"_a);
    m.def("solve", &solve, "game"_a, "method"_a = "auto", "tol"_a = 1e-6);
    m.def(
        "oracle",
        [](const GameSpec& game, double resolution) {
            const OracleResult r = brute_force_oracle(game, resolution);
            return py::make_tuple(r.value, r.g, oracle_slack(game, resolution));
        },
        "game"_a, "resolution"_a);
    m.def("train", &train, "game"_a, "n"_a, "seed"_a = 0);
    m.def(
        "estimate_pN",
        [](const GameSpec& game, std::size_t n, std::size_t replicas, std::uint64_t seed) {
            return estimate_pN(game, solve_defender(game), n, replicas, seed);
        },
        "game"_a, "n"_a, "replicas"_a, "seed"_a = 0);
    m.def("online", &online, "game"_a, "steps"_a, "seed"_a = 0, "algo"_a = "efficient", "g_init"_a = py::none());
}
