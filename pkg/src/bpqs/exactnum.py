"""Exact arithmetic in the real quadratic field Q(sqrt(r)).

A :class:`QuadExt` is the number ``a + b*sqrt(r)`` with rational ``a`` and ``b``
and a square-free integer radical ``r >= 2``.  Pure rationals are the same
type with ``b == 0``; they carry radical 0 and combine freely with any radical.
Mixing two genuinely irrational values with different radicals is an error.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from typing import Union

Number = Union[int, Fraction, "QuadExt"]

__all__ = [
    "QuadExt",
    "RadicalMismatch",
    "as_quad",
    "parse_scalar",
    "format_scalar",
    "is_square_free",
    "sqrt_of",
]


class RadicalMismatch(ValueError):
    """Raised when two irrational scalars live in different quadratic fields."""


def is_square_free(n: int) -> bool:
    if n < 2:
        return n in (0, 1)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


@total_ordering
class QuadExt:
    __slots__ = ("a", "b", "r", "_hash")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0, r: int = 0) -> None:
        a = Fraction(a)
        b = Fraction(b)
        if r < 0 or not is_square_free(r):
            raise ValueError(f"radical must be a non-negative square-free integer, got {r}")
        if r == 1:
            a, b = a + b, Fraction(0)
        if r == 0 or b == 0:
            b = Fraction(0)
            r = 0
        self.a = a
        self.b = b
        self.r = r
        self._hash = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def sqrt(cls, r: int) -> QuadExt:
        return cls(0, 1, r)

    def _coerce(self, other) -> QuadExt | None:
        if isinstance(other, QuadExt):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other)
        return None

    def _radical_with(self, other: QuadExt) -> int:
        if self.r == other.r or other.r == 0:
            return self.r
        if self.r == 0:
            return other.r
        raise RadicalMismatch(f"cannot combine sqrt({self.r}) with sqrt({other.r})")

    # -- field operations ------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = self._radical_with(o)
        return QuadExt(self.a + o.a, self.b + o.b, r)

    __radd__ = __add__

    def __neg__(self) -> QuadExt:
        return QuadExt(-self.a, -self.b, self.r)

    def __pos__(self) -> QuadExt:
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = self._radical_with(o)
        return QuadExt(
            self.a * o.a + self.b * o.b * r,
            self.a * o.b + self.b * o.a,
            r,
        )

    __rmul__ = __mul__

    def conjugate(self) -> QuadExt:
        """Galois conjugate ``a - b*sqrt(r)``."""
        return QuadExt(self.a, -self.b, self.r)

    def field_norm(self) -> Fraction:
        """``a^2 - r*b^2``, the product with the Galois conjugate."""
        return self.a * self.a - self.r * self.b * self.b

    def inv(self) -> QuadExt:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.field_norm()
        return QuadExt(self.a / n, -self.b / n, self.r)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        self._radical_with(o)
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int) -> QuadExt:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result = QuadExt(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(r)`` using only rational comparisons."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 against r*b^2
        lhs = self.a * self.a
        rhs = self.r * self.b * self.b
        if lhs > rhs:
            return sa
        if lhs < rhs:
            return sb
        return 0  # unreachable for square-free r >= 2, kept for safety

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.r == o.r

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self._hash is None:
            if self.b == 0:
                self._hash = hash(self.a)
            else:
                self._hash = hash((self.a, self.b, self.r))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * (self.r ** 0.5)

    def __repr__(self) -> str:
        return f"QuadExt({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)


def as_quad(x: Number) -> QuadExt:
    if isinstance(x, QuadExt):
        return x
    return QuadExt(x)


def sqrt_of(n: int) -> QuadExt:
    """Exact square root of a non-negative integer inside some Q(sqrt(r))."""
    if n < 0:
        raise ValueError("real scalars only")
    s = isqrt(n)
    if s * s == n:
        return QuadExt(s)
    # n = k^2 * r with r square-free
    k, r = 1, n
    p = 2
    while p * p <= r:
        while r % (p * p) == 0:
            r //= p * p
            k *= p
        p += 1
    return QuadExt(0, k, r)


def _fmt_fraction(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def format_scalar(x: Number) -> str:
    """Render in the catalog syntax, e.g. ``1/3+2/3*sqrt(2)``."""
    x = as_quad(x)
    if x.b == 0:
        return _fmt_fraction(x.a)
    rad = f"sqrt({x.r})"
    if x.b == 1:
        bpart = rad
    elif x.b == -1:
        bpart = "-" + rad
    else:
        bpart = f"{_fmt_fraction(x.b)}*{rad}"
    if x.a == 0:
        return bpart
    sep = "" if bpart.startswith("-") else "+"
    return f"{_fmt_fraction(x.a)}{sep}{bpart}"


_RAT = r"\d+(?:/\d+)?"
_TERM = re.compile(
    rf"""\s*(?P<sign>[+-])?\s*
        (?:
            (?P<coef>{_RAT})\s*\*\s*sqrt\(\s*(?P<r1>\d+)\s*\)
          | sqrt\(\s*(?P<r2>\d+)\s*\)(?:\s*/\s*(?P<den>\d+))?
          | (?P<rat>{_RAT})
        )\s*""",
    re.VERBOSE,
)


def parse_scalar(text: str) -> QuadExt:
    """Parse ``p/q``, ``p/q+s/t*sqrt(r)``, ``-sqrt(2)``, ``sqrt(2)/2`` and the like.

    Any number of rational and radical terms may be summed; all radical terms
    must share one radical.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty scalar")
    pos = 0
    total = QuadExt(0)
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"bad scalar {text!r} at offset {pos}")
        if pos > 0 and m.group("sign") is None:
            raise ValueError(f"missing operator in scalar {text!r} at offset {pos}")
        neg = m.group("sign") == "-"
        if m.group("rat") is not None:
            term = QuadExt(Fraction(m.group("rat")))
        elif m.group("r1") is not None:
            term = Fraction(m.group("coef")) * sqrt_of(int(m.group("r1")))
        else:
            term = sqrt_of(int(m.group("r2")))
            if m.group("den"):
                term = term / int(m.group("den"))
        total = total + (-term if neg else term)
        pos = m.end()
    return total
