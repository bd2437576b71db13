"""Independent reference computations used to freeze and cross-check expected values.

None of these reuse the library's solvers: they enumerate everything, or work
in floating point with numpy.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

import numpy as np


def float_vec(ray):
    return np.array([float(e) for e in ray])


def float_projector(ray):
    v = float_vec(ray)
    return np.outer(v, v) / v.dot(v)


def float_correlation(state_coeff, alice_rays, bob_rays):
    """p(a,b|x,y) by explicit tensor products on C^dA x C^dB."""
    c = np.array([[float(x) for x in row] for row in state_coeff.rows])
    psi = c.reshape(-1)
    psi = psi / np.linalg.norm(psi)
    out = {}
    for x, ctx_a in enumerate(alice_rays):
        for y, ctx_b in enumerate(bob_rays):
            for a, u in enumerate(ctx_a):
                for b, v in enumerate(ctx_b):
                    op = np.kron(float_projector(u), float_projector(v))
                    out[x, y, a, b] = float(psi @ op @ psi)
    return out


def brute_colorable(n, adj, bases):
    """Vectorized enumeration of all 2^n {0,1} assignments."""
    if n == 0:
        return True
    ones = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(ones.shape, dtype=bool)
    for v in range(n):
        has_v = (ones >> v) & 1
        ok &= ~((has_v == 1) & ((ones & adj[v]) != 0))
    for b in bases:
        hit = ones & b
        # exactly one bit set
        ok &= (hit != 0) & ((hit & (hit - 1)) == 0)
    return bool(ok.any())


def brute_bks_admissible(alice_sizes, bob_sizes, orth):
    """``orth(i, a, j, b)`` says Alice's element a of context i is orthogonal to Bob's b of j."""
    for picks_a in product(*(range(s) for s in alice_sizes)):
        for picks_b in product(*(range(s) for s in bob_sizes)):
            if all(
                not orth(i, a, j, b)
                for i, a in enumerate(picks_a)
                for j, b in enumerate(picks_b)
            ):
                return True
    return False


def naive_cliques_of_size(n, adj, k):
    return sorted(
        c for c in combinations(range(n), k)
        if all(adj[i] >> j & 1 for i, j in combinations(c, 2))
    )


def naive_maximal_cliques(n, adj):
    cliques = []
    for k in range(1, n + 1):
        cliques += naive_cliques_of_size(n, adj, k)
    sets = [set(c) for c in cliques]
    return sorted(c for c, s in zip(cliques, sets) if not any(s < t for t in sets))


def brute_classical_value(alice_sizes, bob_sizes, pi, win):
    """Max over every pair of deterministic response functions (no best-response shortcut)."""
    best = Fraction(-1)
    for fa in product(*(range(s) for s in alice_sizes)):
        for fb in product(*(range(s) for s in bob_sizes)):
            v = sum(
                (pi[x, y] for x in range(len(alice_sizes)) for y in range(len(bob_sizes))
                 if win[x][y][fa[x]][fb[y]]),
                Fraction(0),
            )
            best = max(best, v)
    return best


def best_response_value(alice_sizes, bob_sizes, pi, win):
    """Pure-python loop over Alice's maps; Bob answers each y independently."""
    nx, ny = len(alice_sizes), len(bob_sizes)
    best = Fraction(-1)
    for fa in product(*(range(s) for s in alice_sizes)):
        v = Fraction(0)
        for y in range(ny):
            v += max(
                sum((pi[x, y] for x in range(nx) if win[x][y][fa[x]][b]), Fraction(0))
                for b in range(bob_sizes[y])
            )
        best = max(best, v)
    return best
