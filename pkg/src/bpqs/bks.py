"""Bipartite KS check: can each context pick one element with no orthogonal cross pair?

Alice picks one element in each of her contexts and Bob one in each of his.
The picks are context dependent, so only Alice-Bob pairs are constrained:
a chosen Alice element and a chosen Bob element must not be orthogonal.  If no
such strategy exists, ``(S_A, S_B)`` is a bipartite KS set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .catalog import Context, Scenario
from .linalg import Projector

__all__ = [
    "EmptyParty",
    "LocalStrategy",
    "BKSResult",
    "BKSInstance",
    "bks_instance",
    "bks_admissible",
    "verify_local_strategy",
]


class EmptyParty(ValueError):
    """One side has no contexts, so every condition is vacuous."""


@dataclass(frozen=True)
class LocalStrategy:
    alice_choice: tuple[int, ...]
    bob_choice: tuple[int, ...]


@dataclass
class BKSResult:
    admissible: bool
    strategy: LocalStrategy | None = None
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def is_bks_set(self) -> bool:
        return not self.admissible


@dataclass(frozen=True)
class BKSInstance:
    """``allowed[i][a][j]`` is the bitmask of Bob elements in context ``j`` compatible
    with Alice picking element ``a`` of her context ``i``."""

    alice_sizes: tuple[int, ...]
    bob_sizes: tuple[int, ...]
    allowed: tuple[tuple[tuple[int, ...], ...], ...]

    def allowed_rev(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Same table seen from Bob: ``rev[j][b][i]`` masks Alice's elements."""
        rev = []
        for j, nb in enumerate(self.bob_sizes):
            per_b = []
            for b in range(nb):
                row = []
                for i, na in enumerate(self.alice_sizes):
                    row.append(sum(1 << a for a in range(na) if self.allowed[i][a][j] >> b & 1))
                per_b.append(tuple(row))
            rev.append(tuple(per_b))
        return tuple(rev)


def _contexts_of(sc) -> tuple[Sequence[Context], Sequence[Context]]:
    if isinstance(sc, Scenario):
        if sc.d_a != sc.d_b:
            raise ValueError("cross-party orthogonality needs both sides on one space")
        return sc.alice_contexts, sc.bob_contexts
    alice, bob = sc
    return alice, bob


def bks_instance(sc) -> BKSInstance:
    """Build the compatibility table from a Scenario or an ``(S_A, S_B)`` pair."""
    alice, bob = _contexts_of(sc)
    if not alice or not bob:
        raise EmptyParty("both parties need at least one context")
    orth_cache: dict[tuple[Projector, Projector], bool] = {}

    def orth(p: Projector, q: Projector) -> bool:
        key = (p, q)
        if key not in orth_cache:
            orth_cache[key] = p.orthogonal_to(q)
        return orth_cache[key]

    table = []
    for ci in alice:
        per_a = []
        for p in ci.projectors:
            row = []
            for cj in bob:
                row.append(sum(1 << b for b, q in enumerate(cj.projectors) if not orth(p, q)))
            per_a.append(tuple(row))
        table.append(tuple(per_a))
    return BKSInstance(
        tuple(len(c) for c in alice),
        tuple(len(c) for c in bob),
        tuple(table),
    )


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _solve(inst: BKSInstance, stats: dict[str, int]) -> LocalStrategy | None:
    nx, ny = len(inst.alice_sizes), len(inst.bob_sizes)
    allowed = inst.allowed
    rev = inst.allowed_rev()
    # variables 0..nx-1 are Alice's contexts, nx..nx+ny-1 are Bob's
    domains = [(1 << s) - 1 for s in inst.alice_sizes] + [(1 << s) - 1 for s in inst.bob_sizes]
    choice: list[int | None] = [None] * (nx + ny)

    def restrict(var: int, val: int, dom: list[int]) -> list[int] | None:
        new = dom[:]
        new[var] = 1 << val
        if var < nx:
            row = allowed[var][val]
            for j in range(ny):
                if choice[nx + j] is None:
                    new[nx + j] &= row[j]
                    if not new[nx + j]:
                        return None
        else:
            row = rev[var - nx][val]
            for i in range(nx):
                if choice[i] is None:
                    new[i] &= row[i]
                    if not new[i]:
                        return None
        return new

    def search(dom: list[int]) -> bool:
        stats["nodes"] += 1
        free = [v for v in range(nx + ny) if choice[v] is None]
        if not free:
            return True
        # fail first; ties go to Alice, then lower index
        var = min(free, key=lambda v: (_popcount(dom[v]), v >= nx, v))
        d = dom[var]
        while d:
            low = d & -d
            val = low.bit_length() - 1
            d ^= low
            new = restrict(var, val, dom)
            if new is None:
                stats["wipeouts"] += 1
                continue
            choice[var] = val
            if search(new):
                return True
            choice[var] = None
        stats["backtracks"] += 1
        return False

    if not search(domains):
        return None
    return LocalStrategy(tuple(choice[:nx]), tuple(choice[nx:]))


def _check(inst: BKSInstance, s: LocalStrategy) -> bool:
    if len(s.alice_choice) != len(inst.alice_sizes) or len(s.bob_choice) != len(inst.bob_sizes):
        raise ValueError("strategy must pick in every context")
    for k, n in zip(s.alice_choice, inst.alice_sizes):
        if not 0 <= k < n:
            raise ValueError(f"pick {k} outside a context of size {n}")
    for k, n in zip(s.bob_choice, inst.bob_sizes):
        if not 0 <= k < n:
            raise ValueError(f"pick {k} outside a context of size {n}")
    for i, a in enumerate(s.alice_choice):
        row = inst.allowed[i][a]
        for j, b in enumerate(s.bob_choice):
            if not row[j] >> b & 1:
                return False
    return True


def bks_admissible(sc) -> BKSResult:
    """Search for a local strategy; ``admissible=False`` means a bipartite KS set.

    ``sc`` is a :class:`Scenario` (its measurement contexts are compared on
    one common space), an ``(S_A, S_B)`` pair of context lists, or a prebuilt
    :class:`BKSInstance`.
    """
    inst = sc if isinstance(sc, BKSInstance) else bks_instance(sc)
    stats = {"alice_contexts": len(inst.alice_sizes), "bob_contexts": len(inst.bob_sizes),
             "nodes": 0, "backtracks": 0, "wipeouts": 0}
    strategy = _solve(inst, stats)
    if strategy is None:
        return BKSResult(False, None, stats)
    if not _check(inst, strategy):
        raise AssertionError("solver produced an invalid strategy")
    return BKSResult(True, strategy, stats)


def verify_local_strategy(sc, s: LocalStrategy) -> bool:
    inst = sc if isinstance(sc, BKSInstance) else bks_instance(sc)
    return _check(inst, s)
