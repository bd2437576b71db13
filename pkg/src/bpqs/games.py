"""Nonlocal games derived from correlation zeros, with exact classical and quantum values."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, prod
from typing import Mapping

import numpy as np

from .correlations import CorrelationTable
from .exactnum import QuadExt

__all__ = [
    "GuardExceeded",
    "Game",
    "DeterministicStrategy",
    "ClassicalValue",
    "BPQSReport",
    "game_from_zeros",
    "classical_value",
    "quantum_value",
    "is_bpqs",
    "DEFAULT_GUARD",
]

DEFAULT_GUARD = 10**8
_CHUNK = 1 << 15


class GuardExceeded(RuntimeError):
    """The number of deterministic strategies to enumerate exceeds the guard."""


@dataclass(frozen=True)
class DeterministicStrategy:
    alice: tuple[int, ...]
    bob: tuple[int, ...]

    def wins(self, game: Game, x: int, y: int) -> bool:
        return bool(game.win[x, y, self.alice[x], self.bob[y]])


@dataclass(frozen=True, eq=False)
class Game:
    """Input distribution ``pi[x, y]`` and 0/1 win table ``win[x, y, a, b]``.

    Outcome ``a`` is legal for input ``x`` only when ``a < alice_sizes[x]``;
    the win table is zero-padded beyond that.
    """

    alice_sizes: tuple[int, ...]
    bob_sizes: tuple[int, ...]
    input_dist: Mapping[tuple[int, int], Fraction]
    win: np.ndarray

    def __post_init__(self) -> None:
        shape = (len(self.alice_sizes), len(self.bob_sizes), max(self.alice_sizes), max(self.bob_sizes))
        win = np.asarray(self.win, dtype=np.uint8)
        if win.shape != shape:
            raise ValueError(f"win table has shape {win.shape}, expected {shape}")
        if not np.isin(win, (0, 1)).all():
            raise ValueError("win table must be 0/1")
        win.setflags(write=False)
        object.__setattr__(self, "win", win)
        pi = {k: Fraction(v) for k, v in self.input_dist.items()}
        if set(pi) != {(x, y) for x in range(shape[0]) for y in range(shape[1])}:
            raise ValueError("input distribution must cover every (x, y)")
        if any(v < 0 for v in pi.values()) or sum(pi.values()) != 1:
            raise ValueError("input distribution must be nonnegative and sum to 1")
        object.__setattr__(self, "input_dist", pi)

    @property
    def n_x(self) -> int:
        return len(self.alice_sizes)

    @property
    def n_y(self) -> int:
        return len(self.bob_sizes)

    @staticmethod
    def uniform(n_x: int, n_y: int) -> dict[tuple[int, int], Fraction]:
        w = Fraction(1, n_x * n_y)
        return {(x, y): w for x in range(n_x) for y in range(n_y)}

    def with_input_dist(self, pi: Mapping[tuple[int, int], Fraction]) -> Game:
        return Game(self.alice_sizes, self.bob_sizes, pi, self.win)


def game_from_zeros(t: CorrelationTable) -> Game:
    """W = 0 exactly where the correlation vanishes; uniform inputs."""
    win = np.zeros((t.n_x, t.n_y, t.n_a, t.n_b), dtype=np.uint8)
    for k in t.positions():
        if not t.values[k].is_zero():
            win[k] = 1
    return Game(t.alice_sizes, t.bob_sizes, Game.uniform(t.n_x, t.n_y), win)


@dataclass(frozen=True)
class ClassicalValue:
    value: Fraction
    strategy: DeterministicStrategy
    candidates: int


def _integer_weights(game: Game) -> tuple[np.ndarray, int]:
    den = lcm(*(v.denominator for v in game.input_dist.values()))
    w = np.zeros((game.n_x, game.n_y), dtype=np.int64)
    for (x, y), v in game.input_dist.items():
        w[x, y] = v.numerator * (den // v.denominator)
    return w, den


def classical_value(game: Game, guard: int = DEFAULT_GUARD) -> ClassicalValue:
    """Best deterministic strategy value, exact.

    Enumerates Alice's response functions in lexicographic order; for each one
    Bob's best reply is chosen independently per ``y``.  Ties keep the first
    optimum found.
    """
    sizes = game.alice_sizes
    total = prod(sizes)
    if total > guard:
        raise GuardExceeded(f"{total} Alice strategies exceed the guard of {guard}")
    weights, den = _integer_weights(game)
    # scored[x] : (Y, A, B) integer payoff of (a, b) on inputs (x, y)
    scored = game.win.astype(np.int64) * weights[:, :, None, None]
    nx = game.n_x
    strides = [prod(sizes[k + 1:]) for k in range(nx)]
    best_score = -1
    best_alice: tuple[int, ...] = ()
    best_bob: tuple[int, ...] = ()
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        digits = [(idx // strides[x]) % sizes[x] for x in range(nx)]
        acc = np.zeros((idx.size, game.n_y, scored.shape[3]), dtype=np.int64)
        for x in range(nx):
            acc += scored[x][:, digits[x], :].transpose(1, 0, 2)
        per_y = acc.max(axis=2)
        score = per_y.sum(axis=1)
        k = int(score.argmax())
        if score[k] > best_score:
            best_score = int(score[k])
            best_alice = tuple(int(d[k]) for d in digits)
            best_bob = tuple(int(b) for b in acc[k].argmax(axis=1))
    return ClassicalValue(Fraction(best_score, den), DeterministicStrategy(best_alice, best_bob), total)


def quantum_value(t: CorrelationTable, game: Game) -> QuadExt:
    if t.alice_sizes != game.alice_sizes or t.bob_sizes != game.bob_sizes:
        raise ValueError("correlation and game sizes differ")
    total = QuadExt(0)
    for k in t.positions():
        x, y, a, b = k
        if game.win[k]:
            total = total + t.values[k] * game.input_dist[x, y]
    return total


@dataclass
class BPQSReport:
    bpqs: bool
    omega_c: Fraction
    omega_q: QuadExt
    strategy: DeterministicStrategy
    # inputs on which the optimal classical strategy lands on a zero of p
    losing_inputs: list[tuple[int, int]] = field(default_factory=list)


def is_bpqs(t: CorrelationTable, guard: int = DEFAULT_GUARD) -> BPQSReport:
    """Perfect quantum strategy test: omega_C of the zeros game is below 1.

    When it is not, the returned strategy is a deterministic local model of
    the zeros (it never outputs a vanishing ``(a, b)`` pair).
    """
    game = game_from_zeros(t)
    cv = classical_value(game, guard)
    losing = [
        (x, y)
        for x in range(game.n_x)
        for y in range(game.n_y)
        if not cv.strategy.wins(game, x, y)
    ]
    return BPQSReport(cv.value < 1, cv.value, quantum_value(t, game), cv.strategy, losing)
