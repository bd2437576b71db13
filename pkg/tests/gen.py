"""Random instance generators shared by the solver tests and the acceptance suite."""

from __future__ import annotations

import random

import numpy as np

from bpqs.bks import BKSInstance
from bpqs.catalog import RaySet, builtin
from bpqs.coloring import KSInstance
from bpqs.orthograph import build_graph, enumerate_bases

from oracles import float_vec


def rayset_subset(rng: random.Random, rs: RaySet, k: int) -> RaySet:
    idx = sorted(rng.sample(range(len(rs)), k))
    return RaySet.from_rays([rs.rays[i] for i in idx], radical=rs.radical)


def float_adjacency(rs: RaySet) -> tuple[int, ...]:
    """Orthogonality bitmasks from floating dot products (independent of the exact code)."""
    vecs = [float_vec(r) for r in rs.rays]
    adj = [0] * len(vecs)
    for i, u in enumerate(vecs):
        for j, v in enumerate(vecs):
            if i != j and abs(u.dot(v)) < 1e-9:
                adj[i] |= 1 << j
    return tuple(adj)


def abstract_ks(rng: random.Random) -> KSInstance:
    """A random hypergraph instance: bases are cliques, plus stray orthogonal pairs."""
    n = rng.randint(3, 16)
    k = rng.choice([2, 3, 3, 4])
    k = min(k, n)
    adj = [0] * n
    bases = set()
    for _ in range(rng.randint(1, 9)):
        members = rng.sample(range(n), k)
        bases.add(sum(1 << v for v in members))
        for a in members:
            for b in members:
                if a != b:
                    adj[a] |= 1 << b
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return KSInstance(n, tuple(adj), tuple(sorted(bases)))


def geometric_ks(rng: random.Random) -> tuple[RaySet, KSInstance]:
    """A random subset of at most 16 rays of a builtin KS set, with float-derived bases."""
    rs = builtin(rng.choice(["peres24", "peres33", "cabello18"]))
    sub = rayset_subset(rng, rs, rng.randint(4, 16))
    adj = float_adjacency(sub)
    d = sub.dimension
    bases = tuple(sorted(sum(1 << v for v in c) for c in _cliques(len(sub), adj, d)))
    return sub, KSInstance(len(sub), adj, bases)


def _cliques(n, adj, k):
    out = []

    def grow(members, cand):
        if len(members) == k:
            out.append(tuple(members))
            return
        for v in range(n):
            if cand >> v & 1 and (not members or v > members[-1]):
                grow(members + [v], cand & adj[v])

    grow([], (1 << n) - 1)
    return out


def abstract_bks(rng: random.Random) -> BKSInstance:
    nx = rng.randint(1, 3)
    ny = rng.randint(1, 6 - nx)
    sa = tuple(rng.randint(2, 4) for _ in range(nx))
    sb = tuple(rng.randint(2, 4) for _ in range(ny))
    density = rng.choice([0.3, 0.5, 0.7])
    allowed = tuple(
        tuple(
            tuple(sum(1 << b for b in range(sb[j]) if rng.random() < density) for j in range(ny))
            for _ in range(sa[i])
        )
        for i in range(nx)
    )
    return BKSInstance(sa, sb, allowed)


_BASES_CACHE: dict[str, list] = {}


def pool_bases(name: str):
    if name not in _BASES_CACHE:
        _BASES_CACHE[name] = enumerate_bases(build_graph(builtin(name)))
    return _BASES_CACHE[name]


def geometric_bks(rng: random.Random):
    """A pair of context lists drawn from the complete bases of a builtin set, at most 6 in total."""
    bases = pool_bases(rng.choice(["peres24", "peres24", "peres33", "cabello18"]))
    nx = rng.randint(1, 3)
    ny = rng.randint(1, 6 - nx)
    return [rng.choice(bases) for _ in range(nx)], [rng.choice(bases) for _ in range(ny)]


def float_orth_table(alice, bob):
    """orth(i, a, j, b) computed from float vectors."""
    fa = [[float_vec(p.ray) for p in c.projectors] for c in alice]
    fb = [[float_vec(p.ray) for p in c.projectors] for c in bob]

    def orth(i, a, j, b):
        return abs(float(np.dot(fa[i][a], fb[j][b]))) < 1e-9

    return orth


def table_orth(inst: BKSInstance):
    def orth(i, a, j, b):
        return not inst.allowed[i][a][j] >> b & 1

    return orth
