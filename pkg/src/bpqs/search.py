"""Search for bipartite KS distributions of a ray set's bases with few inputs.

Candidate pairs ``(S_A, S_B)`` of basis subsets are visited in ascending
``|S_A|*|S_B|``, then ``|S_A|+|S_B|``, then lexicographically.  The two sides
may share bases.

Most pairs are admissible, and each is dismissed by a certificate rather than
a solver call.  For a fixed subset ``S`` on one side, every choice of one ray
per basis leaves a set of rays non-orthogonal to all of them.  The bases that
meet that set are exactly those the other side can serve, so ``S`` together
with any subset of them is admissible.  The maximal such sets, taken over all
choices, describe every admissible partner of ``S``.  A partner outside all
of them is a bipartite KS pair by exhaustion, and is re-verified by
:func:`bks_admissible` before it is returned.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .bks import bks_admissible
from .catalog import Context, RaySet, Scenario
from .orthograph import build_graph, enumerate_bases

__all__ = [
    "NoBKSFound",
    "SearchResult",
    "CriticalityReport",
    "Pool",
    "make_pool",
    "minimal_bks_search",
    "criticality_check",
    "symmetry_filter",
    "InvalidSymmetry",
]

log = logging.getLogger(__name__)


class NoBKSFound(RuntimeError):
    def __init__(self, message: str, exhaustive_below: int, explored: dict):
        super().__init__(message)
        self.exhaustive_below = exhaustive_below
        self.explored = explored


class InvalidSymmetry(ValueError):
    pass


@dataclass
class SearchResult:
    best: tuple[tuple[int, ...], tuple[int, ...]]
    product: int
    sum: int
    explored: dict[str, int]
    exhaustive_below: int
    bases: list[Context] = field(default_factory=list, repr=False)

    def contexts(self) -> tuple[tuple[Context, ...], tuple[Context, ...]]:
        a, b = self.best
        return tuple(self.bases[i] for i in a), tuple(self.bases[j] for j in b)


@dataclass(frozen=True)
class Pool:
    """Bitmask view of a list of rank-one bases over a ray set."""

    rayset: RaySet
    bases: tuple[Context, ...]
    members: tuple[tuple[int, ...], ...]
    basis_mask: tuple[int, ...]
    nonorth: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.bases)

    def fingerprint(self) -> str:
        h = hashlib.sha256(repr((self.members, self.nonorth)).encode()).hexdigest()
        return h[:16]


def make_pool(rs: RaySet, pool: str | Sequence[Context] = "all") -> Pool:
    if isinstance(pool, str):
        if pool == "all":
            bases = enumerate_bases(build_graph(rs))
        elif pool == "declared":
            bases = list(rs.declared_contexts)
        else:
            raise ValueError(f"unknown pool mode {pool!r}")
    else:
        bases = list(pool)
    if not bases:
        raise ValueError("no complete bases to distribute")
    g = build_graph(rs)
    full = (1 << g.n) - 1
    members = tuple(rs.context_indices(c) for c in bases)
    return Pool(
        rs,
        tuple(bases),
        members,
        tuple(sum(1 << i for i in m) for m in members),
        tuple(full & ~g.adj[i] for i in range(g.n)),
    )


# -- certificates -----------------------------------------------------------


def _partner_family(pool: Pool, subset: Sequence[int]) -> list[int]:
    """Maximal sets of pool bases that can stand opposite ``subset``."""
    full_rays = (1 << len(pool.nonorth)) - 1
    frontier = {full_rays}
    for k in subset:
        nxt = set()
        for r in frontier:
            for u in pool.members[k]:
                r2 = r & pool.nonorth[u]
                if r2:
                    nxt.add(r2)
        frontier = nxt
    masks = set()
    for r in frontier:
        masks.add(sum(1 << j for j, bm in enumerate(pool.basis_mask) if bm & r))
    # keep only maximal sets
    ordered = sorted(masks, key=lambda m: -bin(m).count("1"))
    family: list[int] = []
    for m in ordered:
        if not any(m & ~f == 0 for f in family):
            family.append(m)
    return family


def _first_uncovered(n_pool: int, size: int, family: Sequence[int]) -> tuple[int, ...] | None:
    """Lexicographically first ``size``-subset contained in no family member."""
    full = (1 << n_pool) - 1
    if any(f == full for f in family):
        return None
    chosen: list[int] = []

    def dfs(start: int, alive: tuple[int, ...]) -> bool:
        need = size - len(chosen)
        if not alive:
            if n_pool - start < need:
                return False
            chosen.extend(range(start, start + need))
            return True
        if need == 0:
            return False
        avail = full & ~((1 << start) - 1)
        # every surviving member has to be escaped by some later element
        for f in alive:
            if avail & ~f == 0:
                return False
        for v in range(start, n_pool - need + 1):
            bit = 1 << v
            chosen.append(v)
            if dfs(v + 1, tuple(f for f in alive if f & bit)):
                return True
            chosen.pop()
        return False

    if dfs(0, tuple(family)):
        return tuple(chosen)
    return None


_WORKER_POOL: Pool | None = None


def _init_worker(pool: Pool) -> None:
    global _WORKER_POOL
    _WORKER_POOL = pool


def _scan_chunk(args: tuple[list[tuple[int, ...]], int]) -> list[tuple[tuple[int, ...], tuple[int, ...] | None, int]]:
    subsets, other = args
    pool = _WORKER_POOL
    out = []
    for s in subsets:
        fam = _partner_family(pool, s)
        out.append((s, _first_uncovered(pool.size, other, fam), len(fam)))
    return out


def _chunks(it: Iterable, n: int) -> Iterable[list]:
    buf = []
    for item in it:
        buf.append(item)
        if len(buf) == n:
            yield buf
            buf = []
    if buf:
        yield buf


def _scan(pool: Pool, small: int, other: int, stop_at_first: bool, workers: int, stats: dict):
    """Yield ``(subset, partner)`` hits over ``small``-subsets in lex order."""
    gen = (list(c) for c in _chunks(combinations(range(pool.size), small), 256))
    tasks = ((chunk, other) for chunk in gen)
    if workers > 1:
        ex = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(pool,))
        results = ex.map(_scan_chunk, tasks)
    else:
        _init_worker(pool)
        ex = None
        results = map(_scan_chunk, tasks)
    try:
        for chunk in results:
            for s, partner, fam_size in chunk:
                stats["subsets"] += 1
                stats["certificates"] += fam_size
                if partner is not None:
                    yield s, partner
                    if stop_at_first:
                        return
    finally:
        if ex is not None:
            ex.shutdown(cancel_futures=True)


def _size_pairs(product: int) -> list[tuple[int, int]]:
    pairs = [(m, product // m) for m in range(1, product + 1) if product % m == 0]
    return sorted(pairs, key=lambda mn: (mn[0] + mn[1], mn[0]))


def _best_at(pool: Pool, m: int, n: int, workers: int, stats: dict):
    if m > pool.size or n > pool.size:
        return None
    if m <= n:
        for s_a, s_b in _scan(pool, m, n, True, workers, stats):
            return s_a, s_b
        return None
    best = None
    for s_b, s_a in _scan(pool, n, m, False, workers, stats):
        if best is None or (s_a, s_b) < best:
            best = (s_a, s_b)
    return best


def _load_checkpoint(path: Path | None, fingerprint: str) -> set[int]:
    if path is None or not path.exists():
        return set()
    doc = json.loads(path.read_text())
    if doc.get("pool") != fingerprint:
        log.warning("checkpoint %s belongs to another pool; ignoring it", path)
        return set()
    return set(doc.get("certified_products", []))


def _save_checkpoint(path: Path | None, fingerprint: str, certified: set[int], stats: dict) -> None:
    if path is None:
        return
    doc = {"pool": fingerprint, "certified_products": sorted(certified), "explored": stats}
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(doc, indent=2, sort_keys=True))
    tmp.replace(path)


def minimal_bks_search(
    rs: RaySet,
    max_product: int,
    pool: str | Sequence[Context] = "all",
    checkpoint: str | Path | None = None,
    workers: int = 1,
) -> SearchResult:
    """Smallest ``|S_A|*|S_B|`` bipartite KS pair among the ray set's bases.

    Every product below the returned one is certified admissible.  Raises
    :class:`NoBKSFound` if nothing turns up up to ``max_product``.
    """
    p = pool if isinstance(pool, Pool) else make_pool(rs, pool)
    fp = p.fingerprint()
    ckpt = Path(checkpoint) if checkpoint else None
    certified = _load_checkpoint(ckpt, fp)
    stats = {"levels": 0, "subsets": 0, "certificates": 0, "solver_calls": 0, "resumed_levels": 0}
    for product in range(1, max_product + 1):
        if product in certified:
            stats["resumed_levels"] += 1
            continue
        stats["levels"] += 1
        groups: dict[int, list[tuple[int, int]]] = {}
        for m, n in _size_pairs(product):
            groups.setdefault(m + n, []).append((m, n))
        for total in sorted(groups):
            hits = [h for m, n in groups[total] if (h := _best_at(p, m, n, workers, stats)) is not None]
            if not hits:
                continue
            s_a, s_b = min(hits)
            stats["solver_calls"] += 1
            verdict = bks_admissible(([p.bases[i] for i in s_a], [p.bases[j] for j in s_b]))
            if verdict.admissible:
                raise AssertionError(f"certificate scan flagged {s_a}, {s_b} but the solver found a strategy")
            return SearchResult((s_a, s_b), product, total, stats, product, list(p.bases))
        certified.add(product)
        _save_checkpoint(ckpt, fp, certified, stats)
        log.info("product %d certified admissible", product)
    raise NoBKSFound(f"no bipartite KS pair with |X|*|Y| <= {max_product}", max_product + 1, stats)


# -- local minimality ---------------------------------------------------------


@dataclass
class CriticalityReport:
    critical: bool
    non_critical: list[tuple[str, int]]
    checks: int


def criticality_check(sc) -> CriticalityReport:
    """Delete each context in turn; a critical B-KS pair turns admissible every time."""
    if isinstance(sc, Scenario):
        alice, bob = list(sc.alice_contexts), list(sc.bob_contexts)
    else:
        alice, bob = (list(s) for s in sc)
    if bks_admissible((alice, bob)).admissible:
        raise ValueError("criticality is only defined for bipartite KS pairs")
    bad = []
    checks = 0
    for side, ctxs in (("A", alice), ("B", bob)):
        for k in range(len(ctxs)):
            rest = ctxs[:k] + ctxs[k + 1:]
            checks += 1
            if not rest:
                # an empty side is vacuously admissible
                continue
            pair = (rest, bob) if side == "A" else (alice, rest)
            if not bks_admissible(pair).admissible:
                bad.append((side, k))
    return CriticalityReport(not bad, bad, checks)


# -- symmetry pruning ---------------------------------------------------------

Pair = tuple[tuple[int, ...], tuple[int, ...]]


def _basis_permutation(pool: Pool, perm: Sequence[int]) -> tuple[int, ...]:
    n = len(pool.nonorth)
    if sorted(perm) != list(range(n)):
        raise InvalidSymmetry("not a bijection on the rays")
    for i in range(n):
        for j in range(n):
            if (pool.nonorth[i] >> j & 1) != (pool.nonorth[perm[i]] >> perm[j] & 1):
                raise InvalidSymmetry(f"orthogonality of rays {i},{j} is not preserved")
    where = {frozenset(m): k for k, m in enumerate(pool.members)}
    out = []
    for m in pool.members:
        img = frozenset(perm[i] for i in m)
        if img not in where:
            raise InvalidSymmetry("a pool basis is mapped outside the pool")
        out.append(where[img])
    return tuple(out)


def symmetry_filter(
    pool: Pool,
    pairs: Iterable[Pair],
    ray_permutations: Sequence[Sequence[int]] = (),
    swap_parties: bool = False,
) -> list[Pair]:
    """Keep one representative (the lexicographic minimum) per symmetry orbit.

    ``ray_permutations`` generate the group; each must be an
    orthogonality-preserving bijection of the rays that maps pool bases to
    pool bases.  ``swap_parties`` adds the exchange of Alice and Bob.
    """
    gens = [_basis_permutation(pool, p) for p in ray_permutations]

    def images(pair: Pair) -> Iterable[Pair]:
        a, b = pair
        for g in gens:
            yield tuple(sorted(g[i] for i in a)), tuple(sorted(g[j] for j in b))
        if swap_parties:
            yield b, a

    kept = []
    for pair in pairs:
        pair = (tuple(sorted(pair[0])), tuple(sorted(pair[1])))
        orbit = {pair}
        todo = [pair]
        while todo:
            for img in images(todo.pop()):
                if img not in orbit:
                    orbit.add(img)
                    todo.append(img)
        if pair == min(orbit):
            kept.append(pair)
    return kept
