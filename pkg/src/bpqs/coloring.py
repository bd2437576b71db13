"""Noncontextual {0,1} assignments on projector sets (KS colorability).

An assignment gives every projector 0 or 1 so that orthogonal projectors are
never both 1 and every complete orthogonal subset contains exactly one 1.  A
set admitting no such assignment is a (generalized) KS set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .catalog import RaySet
from .linalg import Matrix, Projector
from .orthograph import build_graph, enumerate_bases

__all__ = [
    "VacuousInstance",
    "KSInstance",
    "KSResult",
    "ks_instance",
    "ks_colorable",
    "verify_ks_assignment",
]


class VacuousInstance(ValueError):
    """No complete basis exists, so the exactly-one condition is empty."""


@dataclass(frozen=True)
class KSInstance:
    """Vertices, orthogonality bitmasks and complete-subset bitmasks."""

    n: int
    adj: tuple[int, ...]
    bases: tuple[int, ...]


@dataclass
class KSResult:
    colorable: bool
    assignment: dict[int, int] | None = None
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def is_ks_set(self) -> bool:
        return not self.colorable


def _projector_instance(projs: Sequence[Projector]) -> KSInstance:
    n = len(projs)
    if n == 0:
        return KSInstance(0, (), ())
    d = projs[0].dim
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if projs[i].orthogonal_to(projs[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    bases: list[int] = []
    ident = Matrix.identity(d)

    def grow(members: list[int], cand: int, rank: int) -> None:
        if rank == d:
            total = Matrix.zeros(d)
            for k in members:
                total = total + projs[k].matrix
            if total == ident:
                bases.append(sum(1 << k for k in members))
            return
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            if rank + projs[v].rank <= d:
                members.append(v)
                grow(members, cand & adj[v], rank + projs[v].rank)
                members.pop()

    grow([], (1 << n) - 1, 0)
    return KSInstance(n, tuple(adj), tuple(sorted(bases)))


def ks_instance(obj: RaySet | Sequence[Projector]) -> KSInstance:
    if isinstance(obj, RaySet):
        g = build_graph(obj)
        bases = tuple(sum(1 << i for i in obj.context_indices(c)) for c in enumerate_bases(g))
        return KSInstance(g.n, g.adj, bases)
    return _projector_instance(list(obj))


def _solve(inst: KSInstance, stats: dict[str, int]) -> list[int] | None:
    n, adj, bases = inst.n, inst.adj, inst.bases
    in_basis = 0
    for b in bases:
        in_basis |= b
    deg = [bin(a).count("1") for a in adj]
    order = [v for v in sorted(range(n), key=lambda v: (-deg[v], v)) if in_basis >> v & 1]

    def propagate(ones: int, zeros: int, queue: list[int]) -> tuple[int, int] | None:
        while True:
            # a 1 silences every orthogonal vertex
            while queue:
                v = queue.pop()
                if adj[v] & ones:
                    return None
                zeros |= adj[v]
            if ones & zeros:
                return None
            changed = False
            for b in bases:
                if b & ones:
                    continue
                open_ = b & ~zeros
                if not open_:
                    return None
                if open_ & (open_ - 1) == 0:
                    ones |= open_
                    queue.append(open_.bit_length() - 1)
                    changed = True
            if not changed:
                return ones, zeros

    def search(ones: int, zeros: int) -> tuple[int, int] | None:
        stats["nodes"] += 1
        free = next((v for v in order if not ((ones | zeros) >> v & 1)), None)
        if free is None:
            return ones, zeros
        for value in (1, 0):
            if value:
                res = propagate(ones | 1 << free, zeros, [free])
            else:
                res = propagate(ones, zeros | 1 << free, [])
            if res is not None:
                found = search(*res)
                if found is not None:
                    return found
            stats["backtracks"] += 1
        return None

    start = propagate(0, 0, [])
    if start is None:
        return None
    found = search(*start)
    if found is None:
        return None
    ones, _ = found
    return [ones >> v & 1 for v in range(n)]


def ks_colorable(obj: RaySet | Sequence[Projector]) -> KSResult:
    """Decide colorability; ``colorable=False`` means ``obj`` is a KS set.

    Accepts a rank-one :class:`RaySet` or an arbitrary list of projectors on
    one space.  Raises :class:`VacuousInstance` if no complete basis exists.
    """
    inst = obj if isinstance(obj, KSInstance) else ks_instance(obj)
    if not inst.bases:
        raise VacuousInstance("no complete orthogonal subset; the exactly-one condition is vacuous")
    stats = {"vertices": inst.n, "bases": len(inst.bases), "nodes": 0, "backtracks": 0}
    bits = _solve(inst, stats)
    if bits is None:
        return KSResult(False, None, stats)
    assignment = dict(enumerate(bits))
    if not _check(inst, assignment):
        raise AssertionError("solver produced an invalid witness")
    return KSResult(True, assignment, stats)


def _check(inst: KSInstance, assignment: Mapping[int, int]) -> bool:
    if set(assignment) != set(range(inst.n)):
        raise ValueError("assignment must cover every vertex")
    if any(b not in (0, 1) for b in assignment.values()):
        raise ValueError("assignment values must be 0 or 1")
    ones = sum(1 << v for v, b in assignment.items() if b)
    for v in range(inst.n):
        if ones >> v & 1 and inst.adj[v] & ones:
            return False
    return all(bin(b & ones).count("1") == 1 for b in inst.bases)


def verify_ks_assignment(obj: RaySet | Sequence[Projector] | KSInstance, assignment: Mapping[int, int]) -> bool:
    """Check both conditions over all orthogonal pairs and all enumerated bases."""
    inst = obj if isinstance(obj, KSInstance) else ks_instance(obj)
    return _check(inst, assignment)

