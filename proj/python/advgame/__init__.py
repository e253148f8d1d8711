from ._core import (
    AdvgameError,
    Game,
    estimate_pN,
    game1,
    game2,
    game3,
    load_game,
    min_gain,
    online,
    oracle,
    parse_game,
    pi_of_G,
    solve,
    train,
    worst_case_payoff,
    write_game,
)

__all__ = [
    "AdvgameError",
    "Game",
    "estimate_pN",
    "game1",
    "game2",
    "game3",
    "load_game",
    "min_gain",
    "online",
    "oracle",
    "parse_game",
    "pi_of_G",
    "solve",
    "train",
    "worst_case_payoff",
    "write_game",
]
