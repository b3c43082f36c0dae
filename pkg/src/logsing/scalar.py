"""Exact Gaussian-rational scalars.

``QQi`` is a complex number with ``fractions.Fraction`` real and imaginary
parts.  All engine arithmetic bottoms out here, so everything downstream is
exact; there is no floating point anywhere in a computed series.
"""

from __future__ import annotations

import math
from fractions import Fraction

INF = math.inf  # shared "no truncation" / "empty valuation" sentinel


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as an exact rational")


def fraction_sqrt(v: Fraction):
    """Exact square root of a nonnegative rational, or None."""
    if v < 0:
        return None
    p, q = v.numerator, v.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def frac_str(v) -> str:
    """Canonical text for a rational or the +/-infinity sentinels."""
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    f = as_fraction(v)
    return str(f)


def parse_frac(s: str):
    if s == "inf":
        return INF
    if s == "-inf":
        return -INF
    return Fraction(s)


class QQi:
    """Gaussian rational a + b*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_fraction(re)
        self.im = as_fraction(im)

    # -- constructors -------------------------------------------------
    @staticmethod
    def of(v) -> "QQi":
        if isinstance(v, QQi):
            return v
        return QQi(v)

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_rational(self) -> bool:
        return self.im == 0

    # -- ring operations -----------------------------------------------
    def __add__(self, other):
        other = QQi.of(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = QQi.of(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return QQi.of(other) - self

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __mul__(self, other):
        other = QQi.of(other)
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QQi.of(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi((self.re * other.re + self.im * other.im) / n,
                   (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        return QQi.of(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return QQi(1) / self ** (-k)
        out = QQi(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return QQi(self.re, -self.im)

    # -- size surrogates (exact, direction-safe) ------------------------
    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def abs_upper(self) -> Fraction:
        """|re| + |im| >= modulus."""
        return abs(self.re) + abs(self.im)

    def abs_lower(self) -> Fraction:
        """max(|re|, |im|) <= modulus."""
        return max(abs(self.re), abs(self.im))

    def sqrt(self):
        """An exact square root in QQ(i) if one exists, else None."""
        a, b = self.re, self.im
        if b == 0:
            r = fraction_sqrt(a)
            if r is not None:
                return QQi(r)
            r = fraction_sqrt(-a)
            if r is not None:
                return QQi(0, r)
            return None
        s = fraction_sqrt(a * a + b * b)
        if s is None:
            return None
        c = fraction_sqrt((a + s) / 2)
        if c is None or c == 0:
            return None
        return QQi(c, b / (2 * c))

    # -- comparisons / hashing ------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QQi(other)
        if not isinstance(other, QQi):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def sort_key(self):
        """Real part ascending, then imaginary part descending, so the +i
        branch of a conjugate pair comes first."""
        return (self.re, -self.im)

    # -- text -----------------------------------------------------------
    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imtxt = "i" if mag == 1 else f"{mag}i"
        return f"{self.re}{sign}{imtxt}"

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"

    # -- serialization ----------------------------------------------------
    def to_doc(self):
        return {"re": frac_str(self.re), "im": frac_str(self.im)}

    @staticmethod
    def from_doc(doc):
        return QQi(Fraction(doc["re"]), Fraction(doc["im"]))


ZERO = QQi(0)
ONE = QQi(1)
I = QQi(0, 1)
