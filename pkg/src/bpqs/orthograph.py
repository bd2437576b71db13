"""Orthogonality graphs of ray sets, basis enumeration, DOT/JSON export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .catalog import Context, RaySet, Scenario
from .exactnum import format_scalar
from .linalg import inner, ray_projector

__all__ = [
    "OrthGraph",
    "build_graph",
    "maximal_cliques",
    "enumerate_bases",
    "incomplete_cliques",
    "party_membership",
    "party_counts",
    "export_dot",
    "export_json",
    "scenario_rayset",
]


@dataclass(frozen=True)
class OrthGraph:
    """Vertices ``0..n-1`` follow the ray set's canonical order; ``adj[i]`` is a bitmask."""

    rayset: RaySet
    adj: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def dimension(self) -> int:
        return self.rayset.dimension

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.adj[i] >> j & 1]

    def degree(self, v: int) -> int:
        return bin(self.adj[v]).count("1")

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)


def build_graph(rs: RaySet) -> OrthGraph:
    n = len(rs.rays)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if inner(rs.rays[i], rs.rays[j]).is_zero():
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return OrthGraph(rs, tuple(adj))


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def maximal_cliques(g: OrthGraph) -> list[tuple[int, ...]]:
    """All maximal cliques, Bron-Kerbosch with Tomita pivoting, sorted."""
    out: list[tuple[int, ...]] = []
    adj = g.adj

    def expand(r: list[int], p: int, x: int) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(_bits(p | x), key=lambda u: bin(p & adj[u]).count("1"))
        for v in list(_bits(p & ~adj[pivot])):
            r.append(v)
            expand(r, p & adj[v], x & adj[v])
            r.pop()
            p &= ~(1 << v)
            x |= 1 << v

    if g.n:
        expand([], (1 << g.n) - 1, 0)
    out.sort()
    return out


def enumerate_bases(g: OrthGraph) -> list[Context]:
    """Every set of ``d`` mutually orthogonal rays, as contexts in lexicographic order.

    In dimension ``d`` such a set is automatically complete, so each one is a
    context.  Labels are ``b<k>`` in output order.
    """
    rs = g.rayset
    cliques = [c for c in maximal_cliques(g) if len(c) == g.dimension]
    return [
        Context(tuple(ray_projector(rs.rays[i]) for i in c), f"b{k}")
        for k, c in enumerate(cliques)
    ]


def incomplete_cliques(g: OrthGraph) -> list[tuple[int, ...]]:
    """Maximal cliques with fewer than ``d`` rays; these never count as contexts."""
    return [c for c in maximal_cliques(g) if len(c) < g.dimension]


def party_membership(rs: RaySet, alice: Sequence[Context], bob: Sequence[Context]) -> dict[int, str]:
    """Map each ray index to ``"A"``, ``"B"`` or ``"AB"`` by which side's contexts use it."""
    sides: dict[int, str] = {}
    for tag, ctxs in (("A", alice), ("B", bob)):
        for ctx in ctxs:
            for i in rs.context_indices(ctx):
                if tag not in sides.get(i, ""):
                    sides[i] = sides.get(i, "") + tag
    return sides


def party_counts(membership: Mapping[int, str]) -> dict[str, int]:
    """Counts of Alice-only (red), Bob-only (blue) and shared (violet) rays."""
    vals = list(membership.values())
    return {"red": vals.count("A"), "blue": vals.count("B"), "violet": vals.count("AB")}


_COLORS = {"A": "red", "B": "blue", "AB": "violet"}


def _label(rs: RaySet, i: int) -> str:
    return "(" + ",".join(format_scalar(e) for e in rs.rays[i]) + ")"


def export_dot(g: OrthGraph, coloring: Mapping[int, str] | None = None, name: str = "orthogonality") -> str:
    rs = g.rayset
    lines = [f"graph {json.dumps(name)} {{", "  node [shape=circle, style=filled, fillcolor=white];"]
    for i in range(g.n):
        attrs = [f"label={json.dumps(_label(rs, i))}"]
        if coloring and i in coloring:
            attrs.append(f"fillcolor={_COLORS[coloring[i]]}")
        lines.append(f"  v{i} [{', '.join(attrs)}];")
    for i, j in g.edges():
        lines.append(f"  v{i} -- v{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(g: OrthGraph) -> str:
    rs = g.rayset
    doc = {
        "dimension": g.dimension,
        "vertices": [{"id": i, "name": rs.names[i], "ray": [format_scalar(e) for e in rs.rays[i]]} for i in range(g.n)],
        "edges": [list(e) for e in g.edges()],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def scenario_rayset(sc: Scenario) -> RaySet:
    """Pool the rank-one rays of both sides (``d_A == d_B`` only) into one ray set."""
    if sc.d_a != sc.d_b:
        raise ValueError("pooling needs equal local dimensions")
    rays = []
    for ctx in sc.alice_contexts + sc.bob_contexts:
        for p in ctx.projectors:
            if p.ray is None:
                raise ValueError("pooling needs rank-one contexts")
            rays.append(p.ray)
    return RaySet.from_rays(rays, sc.alice_contexts + sc.bob_contexts, sc.radical)
