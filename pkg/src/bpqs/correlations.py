"""Exact Born-rule correlations and the correlation-to-B-KS construction.

For a state ``|psi> = sum_ij C[i,j] |i>|j>`` and real projectors,

    p(a,b|x,y) = tr(C^T P_a C P_b) / ||C||^2

The construction replaces each of Alice's outcomes by the support of her
reduced post-measurement operator ``P_a C C^T P_a``, and each of Bob's outcomes
by the support of Alice's reduced operator conditioned on it, ``C P_b C^T``.
Both families live on Alice's space, where the B-KS check then applies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .catalog import Context, InvalidContext, Scenario, validate_context
from .exactnum import QuadExt
from .linalg import (
    Matrix,
    reduced_alice_post,
    reduced_alice_pre,
    support_projector,
)

__all__ = [
    "ConstructionError",
    "CorrelationTable",
    "correlation",
    "zeros",
    "theorem1_construct",
    "check_nosignaling",
    "check_normalization",
]

ZERO = QuadExt(0)


class ConstructionError(ValueError):
    """A constructed context is not a complete orthogonal set."""

    def __init__(self, message: str, side: str, index: int):
        self.side = side
        self.index = index
        super().__init__(message)


@dataclass(frozen=True)
class CorrelationTable:
    """``values[x, y, a, b]`` for every outcome ``a < alice_sizes[x]``, ``b < bob_sizes[y]``."""

    values: Mapping[tuple[int, int, int, int], QuadExt]
    alice_sizes: tuple[int, ...]
    bob_sizes: tuple[int, ...]

    @property
    def n_x(self) -> int:
        return len(self.alice_sizes)

    @property
    def n_y(self) -> int:
        return len(self.bob_sizes)

    @property
    def n_a(self) -> int:
        return max(self.alice_sizes, default=0)

    @property
    def n_b(self) -> int:
        return max(self.bob_sizes, default=0)

    def __getitem__(self, key: tuple[int, int, int, int]) -> QuadExt:
        x, y, a, b = key
        if a >= self.alice_sizes[x] or b >= self.bob_sizes[y]:
            return ZERO
        return self.values[key]

    def positions(self) -> Iterator[tuple[int, int, int, int]]:
        for x, na in enumerate(self.alice_sizes):
            for y, nb in enumerate(self.bob_sizes):
                for a in range(na):
                    for b in range(nb):
                        yield x, y, a, b


def _frobenius(m: Matrix, n: Matrix) -> QuadExt:
    total = ZERO
    for r, s in zip(m.rows, n.rows):
        for u, v in zip(r, s):
            if u.is_zero() or v.is_zero():
                continue
            total = total + u * v
    return total


def correlation(sc: Scenario) -> CorrelationTable:
    c = sc.state.coeff
    scale = sc.state.norm2.inv()
    # C^T P_a C lives on Bob's space; p is its Frobenius product with P_b
    lifted = [[c.T @ p.matrix @ c for p in ctx.projectors] for ctx in sc.alice_contexts]
    values: dict[tuple[int, int, int, int], QuadExt] = {}
    for x, row in enumerate(lifted):
        for y, ctx in enumerate(sc.bob_contexts):
            for a, m in enumerate(row):
                for b, q in enumerate(ctx.projectors):
                    values[x, y, a, b] = _frobenius(m, q.matrix) * scale
    return CorrelationTable(
        values,
        tuple(len(ctx) for ctx in sc.alice_contexts),
        tuple(len(ctx) for ctx in sc.bob_contexts),
    )


def zeros(t: CorrelationTable) -> set[tuple[int, int, int, int]]:
    return {k for k in t.positions() if t.values[k].is_zero()}


def check_normalization(t: CorrelationTable) -> bool:
    for x, na in enumerate(t.alice_sizes):
        for y, nb in enumerate(t.bob_sizes):
            total = ZERO
            for a in range(na):
                for b in range(nb):
                    v = t.values[x, y, a, b]
                    if v.sign() < 0:
                        return False
                    total = total + v
            if total != 1:
                return False
    return True


def check_nosignaling(t: CorrelationTable) -> bool:
    """Alice's marginals ignore ``y`` and Bob's ignore ``x``, exactly."""
    for x, na in enumerate(t.alice_sizes):
        ref = None
        for y, nb in enumerate(t.bob_sizes):
            marg = tuple(sum((t.values[x, y, a, b] for b in range(nb)), ZERO) for a in range(na))
            if ref is None:
                ref = marg
            elif marg != ref:
                return False
    for y, nb in enumerate(t.bob_sizes):
        ref = None
        for x, na in enumerate(t.alice_sizes):
            marg = tuple(sum((t.values[x, y, a, b] for a in range(na)), ZERO) for b in range(nb))
            if ref is None:
                ref = marg
            elif marg != ref:
                return False
    return True


def _supports(ops: list[Matrix], side: str, index: int, label: str) -> Context:
    projs = []
    for op in ops:
        # a zero-probability outcome has no post-measurement state; it drops out
        if op.is_zero():
            continue
        projs.append(support_projector(op))
    try:
        validate_context(projs, label)
    except InvalidContext as e:
        raise ConstructionError(f"side {side}, input {index}: {e}", side, index) from None
    return Context(tuple(projs), label)


def theorem1_construct(sc: Scenario) -> tuple[tuple[Context, ...], tuple[Context, ...]]:
    """Return ``(S_A, S_B)``, both as contexts on Alice's space.

    Raises :class:`ConstructionError` naming the offending input when a
    constructed family is not a complete orthogonal set, which happens for
    instance when the state is not maximally entangled.
    """
    if sc.d_a > sc.d_b:
        raise ValueError("the construction needs dim(H_A) <= dim(H_B)")
    s_a = []
    for x, ctx in enumerate(sc.alice_contexts):
        ops = [reduced_alice_post(sc.state, p) for p in ctx.projectors]
        s_a.append(_supports(ops, "A", x, ctx.label or f"x{x}"))
    s_b = []
    for y, ctx in enumerate(sc.bob_contexts):
        ops = [reduced_alice_pre(sc.state, p) for p in ctx.projectors]
        s_b.append(_supports(ops, "B", y, ctx.label or f"y{y}"))
    return tuple(s_a), tuple(s_b)
