import random
from fractions import Fraction

import numpy as np
import pytest

from bpqs.catalog import Context, Scenario, builtin
from bpqs.correlations import correlation
from bpqs.games import (
    Game,
    GuardExceeded,
    classical_value,
    game_from_zeros,
    is_bpqs,
    quantum_value,
)
from bpqs.linalg import Matrix, PureState

from oracles import best_response_value, brute_classical_value

COMP3 = Context.from_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1)], "z")

# Regression constants, cross-checked below against an independent loop.
OMEGA_C_MAGIC = Fraction(8, 9)
OMEGA_C_QUTRIT = Fraction(62, 63)


def _random_game(rng):
    sa = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 3)))
    sb = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 3)))
    win = np.zeros((len(sa), len(sb), max(sa), max(sb)), dtype=np.uint8)
    for x, na in enumerate(sa):
        for y, nb in enumerate(sb):
            win[x, y, :na, :nb] = np.array([[rng.random() < 0.5 for _ in range(nb)] for _ in range(na)])
    raw = {(x, y): rng.randint(0, 4) for x in range(len(sa)) for y in range(len(sb))}
    if not any(raw.values()):
        raw[0, 0] = 1
    tot = sum(raw.values())
    return Game(sa, sb, {k: Fraction(v, tot) for k, v in raw.items()}, win)


def test_delta_game():
    t = correlation(Scenario(PureState(Matrix.identity(3)), [COMP3], [COMP3]))
    g = game_from_zeros(t)
    assert (g.win[0, 0] == np.eye(3, dtype=np.uint8)).all()
    assert classical_value(g).value == 1
    assert not is_bpqs(t).bpqs


def test_against_full_enumeration():
    rng = random.Random(41)
    for _ in range(200):
        g = _random_game(rng)
        cv = classical_value(g)
        assert cv.value == brute_classical_value(g.alice_sizes, g.bob_sizes, g.input_dist, g.win)
        achieved = sum((g.input_dist[x, y] for x in range(g.n_x) for y in range(g.n_y)
                        if cv.strategy.wins(g, x, y)), Fraction(0))
        assert achieved == cv.value
        assert cv.value <= 1


def test_value_one_iff_perfect_strategy():
    rng = random.Random(43)
    for _ in range(100):
        g = _random_game(rng)
        cv = classical_value(g)
        perfect = all(
            cv.strategy.wins(g, x, y) or g.input_dist[x, y] == 0
            for x in range(g.n_x) for y in range(g.n_y)
        )
        assert (cv.value == 1) == perfect


def test_relabel_invariance():
    rng = random.Random(47)
    for _ in range(60):
        g = _random_game(rng)
        px = list(range(g.n_x))
        py = list(range(g.n_y))
        rng.shuffle(px)
        rng.shuffle(py)
        sa = tuple(g.alice_sizes[i] for i in px)
        sb = tuple(g.bob_sizes[j] for j in py)
        out_a = [rng.sample(range(s), s) for s in sa]
        out_b = [rng.sample(range(s), s) for s in sb]
        win = np.zeros_like(g.win)
        for x, ox in enumerate(px):
            for y, oy in enumerate(py):
                for a in range(sa[x]):
                    for b in range(sb[y]):
                        win[x, y, a, b] = g.win[ox, oy, out_a[x][a], out_b[y][b]]
        pi = {(x, y): g.input_dist[px[x], py[y]] for x in range(g.n_x) for y in range(g.n_y)}
        assert classical_value(Game(sa, sb, pi, win)).value == classical_value(g).value


def test_magic_square_value():
    t = correlation(builtin("magic-square-scenario"))
    g = game_from_zeros(t)
    cv = classical_value(g)
    assert cv.candidates == 64
    assert cv.value == OMEGA_C_MAGIC
    assert cv.value == brute_classical_value(g.alice_sizes, g.bob_sizes, g.input_dist, g.win)
    assert quantum_value(t, g) == 1
    rep = is_bpqs(t)
    assert rep.bpqs and rep.omega_c == OMEGA_C_MAGIC and rep.omega_q == 1
    assert len(rep.losing_inputs) == 1


def test_qutrit_value():
    t = correlation(builtin("qutrit-scenario"))
    g = game_from_zeros(t)
    cv = classical_value(g)
    assert cv.candidates == 19683
    assert cv.value == OMEGA_C_QUTRIT
    assert cv.value == best_response_value(g.alice_sizes, g.bob_sizes, g.input_dist, g.win)
    assert quantum_value(t, g) == 1
    assert is_bpqs(t).bpqs


def test_trivial_win_tables():
    t = correlation(builtin("magic-square-scenario"))
    g = game_from_zeros(t)
    ones = Game(g.alice_sizes, g.bob_sizes, g.input_dist, np.ones_like(g.win))
    nil = Game(g.alice_sizes, g.bob_sizes, g.input_dist, np.zeros_like(g.win))
    assert quantum_value(t, ones) == 1
    assert quantum_value(t, nil) == 0
    assert classical_value(ones).value == 1
    assert classical_value(nil).value == 0


def test_non_uniform_inputs():
    t = correlation(builtin("magic-square-scenario"))
    g = game_from_zeros(t)
    pi = {k: Fraction(1, 2) if k == (0, 0) else Fraction(1, 16) for k in g.input_dist}
    g2 = g.with_input_dist(pi)
    assert classical_value(g2).value == brute_classical_value(g2.alice_sizes, g2.bob_sizes, pi, g2.win)
    assert quantum_value(t, g2) == 1


def test_guard():
    g = game_from_zeros(correlation(builtin("qutrit-scenario")))
    with pytest.raises(GuardExceeded):
        classical_value(g, guard=1000)


def test_bad_games_rejected():
    with pytest.raises(ValueError):
        Game((2,), (2,), {(0, 0): Fraction(1, 2)}, np.ones((1, 1, 2, 2)))
    with pytest.raises(ValueError):
        Game((2,), (2,), {(0, 0): Fraction(1)}, np.full((1, 1, 2, 2), 2))
    with pytest.raises(ValueError):
        Game((2,), (2,), {(0, 0): Fraction(1)}, np.ones((1, 1, 3, 2)))
