"""Exact real vectors, matrices and projectors over :class:`QuadExt`.

Nothing here is ever normalized by a square root.  Rays keep their integer
entries, projectors are built as ``u u^T / <u,u>``, and pure states carry their
squared norm separately so that ``1/sqrt(d)`` never has to exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Sequence

from .exactnum import Number, QuadExt, as_quad

__all__ = [
    "DimensionMismatch",
    "Ray",
    "Matrix",
    "Projector",
    "PureState",
    "inner",
    "norm2",
    "ray_projector",
    "support_projector",
    "reduced_alice_post",
    "reduced_alice_pre",
    "pivot_columns",
    "solve_inverse",
]

ZERO = QuadExt(0)
ONE = QuadExt(1)


class DimensionMismatch(ValueError):
    pass


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True, eq=False)
class Ray:
    """A one-dimensional subspace, stored as its canonical integer spanning vector.

    Canonical form: the first nonzero entry is scaled to 1, then denominators
    are cleared and the integer content is divided out.  ``Ray((1, 1))`` and
    ``Ray((-2, -2))`` are the same object up to equality.
    """

    entries: tuple[QuadExt, ...]

    def __init__(self, entries: Iterable[Number]) -> None:
        object.__setattr__(self, "entries", _canonical_entries([as_quad(e) for e in entries]))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @cached_property
    def radical(self) -> int:
        return max((e.r for e in self.entries), default=0)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ray) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __lt__(self, other: Ray) -> bool:
        return self.entries < other.entries

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return "Ray(" + ", ".join(str(e) for e in self.entries) + ")"


def _canonical_entries(entries: list[QuadExt]) -> tuple[QuadExt, ...]:
    if len(entries) < 2:
        raise ValueError("a ray needs at least two components")
    lead = next((e for e in entries if not e.is_zero()), None)
    if lead is None:
        raise ValueError("the zero vector does not span a ray")
    scaled = [e / lead for e in entries]
    den = 1
    for e in scaled:
        den = _lcm(den, e.a.denominator)
        den = _lcm(den, e.b.denominator)
    ints = [e * den for e in scaled]
    content = 0
    for e in ints:
        content = gcd(content, e.a.numerator, e.b.numerator)
    return tuple(e / content for e in ints)


def inner(u: Sequence[Number], v: Sequence[Number]) -> QuadExt:
    if len(u) != len(v):
        raise DimensionMismatch(f"inner product of length {len(u)} and {len(v)}")
    total = ZERO
    for x, y in zip(u, v):
        total = total + as_quad(x) * as_quad(y)
    return total


def norm2(u: Sequence[Number]) -> QuadExt:
    return inner(u, u)


@dataclass(frozen=True)
class Matrix:
    rows: tuple[tuple[QuadExt, ...], ...]

    def __init__(self, rows: Iterable[Iterable[Number]]) -> None:
        rows = tuple(tuple(as_quad(x) for x in row) for row in rows)
        if not rows or not rows[0]:
            raise ValueError("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> Matrix:
        return cls([[ZERO] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def diag(cls, values: Sequence[Number]) -> Matrix:
        n = len(values)
        return cls([[values[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def outer(cls, u: Sequence[Number], v: Sequence[Number]) -> Matrix:
        return cls([[as_quad(x) * as_quad(y) for y in v] for x in u])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij: tuple[int, int]) -> QuadExt:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[QuadExt, ...]:
        return tuple(row[j] for row in self.rows)

    @cached_property
    def T(self) -> Matrix:
        return Matrix(zip(*self.rows))

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} - {other.shape}")
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c: Number) -> Matrix:
        c = as_quad(c)
        return Matrix([[c * x for x in r] for r in self.rows])

    def __matmul__(self, other: Matrix) -> Matrix:
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        cols = other.T.rows
        out = []
        for row in self.rows:
            out.append([_dot(row, col) for col in cols])
        return Matrix(out)

    def apply(self, v: Sequence[Number]) -> tuple[QuadExt, ...]:
        if len(v) != self.shape[1]:
            raise DimensionMismatch(f"{self.shape} applied to length {len(v)}")
        return tuple(_dot(row, v) for row in self.rows)

    def trace(self) -> QuadExt:
        n, m = self.shape
        if n != m:
            raise DimensionMismatch("trace of a non-square matrix")
        return reduce(lambda s, i: s + self.rows[i][i], range(n), ZERO)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def is_symmetric(self) -> bool:
        return self == self.T

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix([{body}])"


def _dot(u: Sequence[QuadExt], v: Sequence[QuadExt]) -> QuadExt:
    total = ZERO
    for x, y in zip(u, v):
        if x.is_zero() or y.is_zero():
            continue
        total = total + x * y
    return total


def pivot_columns(m: Matrix) -> list[int]:
    """Pivot columns of the row echelon form (leftmost pivot, first nonzero row)."""
    rows = [list(r) for r in m.rows]
    nrows, ncols = m.shape
    pivots = []
    pr = 0
    for c in range(ncols):
        if pr == nrows:
            break
        sel = next((i for i in range(pr, nrows) if not rows[i][c].is_zero()), None)
        if sel is None:
            continue
        rows[pr], rows[sel] = rows[sel], rows[pr]
        piv = rows[pr][c]
        for i in range(pr + 1, nrows):
            f = rows[i][c]
            if f.is_zero():
                continue
            f = f / piv
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[pr])]
        pivots.append(c)
        pr += 1
    return pivots


def solve_inverse(m: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan elimination."""
    n, k = m.shape
    if n != k:
        raise DimensionMismatch("inverse of a non-square matrix")
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m.rows)]
    for c in range(n):
        sel = next((i for i in range(c, n) if not aug[i][c].is_zero()), None)
        if sel is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[sel] = aug[sel], aug[c]
        inv_p = aug[c][c].inv()
        aug[c] = [x * inv_p for x in aug[c]]
        for i in range(n):
            if i != c and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return Matrix([r[n:] for r in aug])


@dataclass(frozen=True, eq=False)
class Projector:
    """An orthogonal projector; ``ray`` is set for rank-one projectors."""

    matrix: Matrix
    rank: int
    ray: Ray | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise ValueError("projector must be square")
        if not m.is_symmetric():
            raise ValueError("projector must be symmetric")
        if m @ m != m:
            raise ValueError("matrix is not idempotent")
        tr = m.trace()
        if tr != self.rank:
            raise ValueError(f"trace {tr} does not match rank {self.rank}")
        if self.rank == 1 and self.ray is None:
            col = next(j for j in range(m.shape[1]) if any(not x.is_zero() for x in m.column(j)))
            object.__setattr__(self, "ray", Ray(m.column(col)))

    @classmethod
    def from_matrix(cls, m: Matrix) -> Projector:
        tr = m.trace()
        if not tr.is_rational() or tr.a.denominator != 1 or tr.a < 1:
            raise ValueError(f"trace {tr} is not a positive integer")
        return cls(m, int(tr.a))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def orthogonal_to(self, other: Projector) -> bool:
        if self.dim != other.dim:
            raise DimensionMismatch(f"projectors on C^{self.dim} and C^{other.dim}")
        if self.ray is not None and other.ray is not None:
            return inner(self.ray, other.ray).is_zero()
        return (self.matrix @ other.matrix).is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, Projector) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        if self.ray is not None:
            return f"Projector({self.ray!r})"
        return f"Projector(rank={self.rank}, {self.matrix!r})"


def ray_projector(u: Ray | Sequence[Number]) -> Projector:
    if not isinstance(u, Ray):
        u = Ray(u)
    n2 = norm2(u)
    m = Matrix.outer(u, u).scale(n2.inv())
    return Projector(m, 1, u)


def support_projector(m: Matrix) -> Projector:
    """Projector onto the column space of a symmetric PSD matrix."""
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch("support of a non-square matrix")
    cols = pivot_columns(m)
    if not cols:
        raise ValueError("zero matrix has empty support")
    basis = Matrix(zip(*(m.column(j) for j in cols)))
    if len(cols) == 1:
        return ray_projector(basis.column(0))
    gram = basis.T @ basis
    proj = basis @ solve_inverse(gram) @ basis.T
    return Projector(proj, len(cols))


@dataclass(frozen=True)
class PureState:
    """Unnormalized bipartite pure state ``sum_ij coeff[i,j] |i>|j>``."""

    coeff: Matrix
    norm2: QuadExt = field(init=False)

    def __post_init__(self) -> None:
        n = ZERO
        for row in self.coeff.rows:
            for c in row:
                n = n + c * c
        if n.sign() <= 0:
            raise ValueError("state has zero norm")
        object.__setattr__(self, "norm2", n)

    @classmethod
    def maximally_entangled(cls, d: int) -> PureState:
        return cls(Matrix.identity(d))

    @property
    def dims(self) -> tuple[int, int]:
        return self.coeff.shape

    def schmidt_rank(self) -> int:
        return len(pivot_columns(self.coeff))


def reduced_alice_post(state: PureState, pi: Projector) -> Matrix:
    """``tr_B`` of ``(pi x 1)|psi><psi|(pi x 1)``, unnormalized: ``pi C C^T pi``."""
    c = state.coeff
    if pi.dim != c.shape[0]:
        raise DimensionMismatch(f"Alice projector on {pi.dim} dims, state has d_A={c.shape[0]}")
    pc = pi.matrix @ c
    return pc @ pc.T


def reduced_alice_pre(state: PureState, pi: Projector) -> Matrix:
    """``tr_B`` of ``(1 x pi)|psi><psi|(1 x pi)``, unnormalized: ``C pi C^T``."""
    c = state.coeff
    if pi.dim != c.shape[1]:
        raise DimensionMismatch(f"Bob projector on {pi.dim} dims, state has d_B={c.shape[1]}")
    return c @ pi.matrix @ c.T
