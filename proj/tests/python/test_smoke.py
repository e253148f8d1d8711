import json
import math

import pytest

import advgame


def test_game1_equilibrium():
    g = advgame.game1()
    assert g.num_vectors == 101
    assert g.num_types == 2
    assert g.u_undetected(0, 37) == 37.0
    assert g.u_detected(0, 37) == 210.0
    res = advgame.solve(g)
    assert res["verified"]
    assert res["value"] == pytest.approx(-11.2280242033, abs=1e-9)
    assert res["g_max"] == pytest.approx([24.0, 83.0])
    assert len(res["policy"]) == 101
    for row in res["attacker"]:
        assert sum(row) == pytest.approx(1.0)


def test_pi_of_g_example():
    g = advgame.parse_game(json.dumps({
        "p_attack": 0.5,
        "type_priors": [1],
        "vectors": [{"id": 0, "p0": 1, "c_fa": 3, "u_undetected": [10], "u_detected": [5]}],
    }))
    assert advgame.pi_of_G(g, [4.0]) == pytest.approx([0.4])
    assert advgame.min_gain(g, [4.0]) == pytest.approx(-2.6)
    assert g.gain_bounds() == ([-5.0], [10.0])


def test_bad_game_raises():
    with pytest.raises(advgame.AdvgameError):
        advgame.parse_game('{"p_attack": 2, "type_priors": [1], "vectors": []}')
    with pytest.raises(ValueError):
        advgame.parse_game("{")


def test_round_trip(tmp_path):
    g = advgame.game3(k=4, seed=2)
    path = tmp_path / "g.json"
    advgame.write_game(str(path), g)
    back = advgame.load_game(str(path))
    assert back.num_vectors == 16
    assert back.u_detected(2, 7) == g.u_detected(2, 7)
    # p0 is renormalized on load
    assert back.p0 == pytest.approx(g.p0, rel=1e-15)
    assert math.isclose(sum(back.p0), 1.0, rel_tol=1e-12)


def test_oracle_and_worst_case():
    g = advgame.game1()
    value, profile, slack = advgame.oracle(g, 1.0)
    sol = advgame.solve(g)
    assert value <= sol["value"] + 1e-9
    assert sol["value"] <= value + slack
    assert advgame.worst_case_payoff(g, profile) >= advgame.min_gain(g, profile) - 1e-9


def test_train_and_online():
    g = advgame.game3(k=5, seed=1)
    sol = advgame.solve(g)
    rep = advgame.train(g, 2000, seed=4)
    assert rep["n_samples"] == 2000
    assert rep["true_value"] <= sol["value"] + 1e-9
    assert 0.0 <= advgame.estimate_pN(g, 100, 4, seed=1) <= 1.0
    run = advgame.online(g, 2000, seed=3)
    assert run["surrogate_regret"] <= run["bound"]
    assert run["realized_regret"] <= run["surrogate_regret"] + 1e-9
    assert len(run["surrogate_loss"]) == 2000
    with pytest.raises(advgame.AdvgameError):
        advgame.online(g, 0)
