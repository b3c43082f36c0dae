"""Truncated multivariate Taylor polynomials at x = 0.

An ``XPoly`` is a polynomial in x_1..x_n with Gaussian-rational coefficients,
kept only through total degree ``max_deg``.  Truncation at a total degree is a
quotient by a monomial ideal, so ring axioms hold exactly on the truncated
representation.  ``max_deg`` may be the ``INF`` sentinel for exact polynomial
data that was never truncated (parsed input coefficients).

Differentiation lowers the trusted degree by one; binary operations insist on
identical (n, max_deg) so any realignment is a visible, deliberate
``truncated`` call.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigurationError
from .scalar import INF, QQi, frac_str

MAX_DEG_DEFAULT = 8


def _check_alpha(alpha, n):
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise ConfigurationError(f"bad exponent tuple {alpha} for {n} variables")


class XPoly:
    __slots__ = ("n", "max_deg", "coeffs")

    def __init__(self, n, max_deg, coeffs=None):
        self.n = n
        self.max_deg = max_deg
        clean = {}
        for alpha, c in (coeffs or {}).items():
            alpha = tuple(alpha)
            _check_alpha(alpha, n)
            if sum(alpha) > max_deg:
                continue
            c = QQi.of(c)
            if not c.is_zero():
                clean[alpha] = c
        self.coeffs = clean

    # -- constructors ---------------------------------------------------
    @staticmethod
    def zero(n, max_deg):
        return XPoly(n, max_deg, {})

    @staticmethod
    def constant(c, n, max_deg):
        return XPoly(n, max_deg, {(0,) * n: QQi.of(c)})

    @staticmethod
    def one(n, max_deg):
        return XPoly.constant(1, n, max_deg)

    @staticmethod
    def variable(i, n, max_deg):
        """x_i, 1-based."""
        if not 1 <= i <= n:
            raise ConfigurationError(f"variable index {i} out of range 1..{n}")
        alpha = tuple(1 if j == i - 1 else 0 for j in range(n))
        return XPoly(n, max_deg, {alpha: QQi(1)})

    # -- bookkeeping ------------------------------------------------------
    def same_config(self, other):
        return self.n == other.n and self.max_deg == other.max_deg

    def _require(self, other):
        if not self.same_config(other):
            raise ConfigurationError(
                f"xpoly config mismatch: ({self.n},{self.max_deg}) vs ({other.n},{other.max_deg})")

    def truncated(self, max_deg):
        if max_deg > self.max_deg:
            raise ConfigurationError("cannot raise max_deg of a truncated polynomial")
        return XPoly(self.n, max_deg, self.coeffs)

    def assume_exact(self, max_deg):
        """Recast exact polynomial data at another degree bound.  Only valid
        when the data is known complete (max_deg INF or degree below bound)."""
        if self.max_deg != INF and self.degree() > min(max_deg, self.max_deg):
            raise ConfigurationError("polynomial is not exact through the requested degree")
        return XPoly(self.n, max_deg, self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        return max((sum(a) for a in self.coeffs), default=0)

    def constant_term(self) -> QQi:
        return self.coeffs.get((0,) * self.n, QQi(0))

    def is_constant(self):
        return all(sum(a) == 0 for a in self.coeffs)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        self._require(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, QQi(0)) + c
        return XPoly(self.n, self.max_deg, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return XPoly(self.n, self.max_deg, {a: -c for a, c in self.coeffs.items()})

    def __mul__(self, other):
        self._require(other)
        out = {}
        for a1, c1 in self.coeffs.items():
            d1 = sum(a1)
            for a2, c2 in other.coeffs.items():
                if d1 + sum(a2) > self.max_deg:
                    continue
                a = tuple(x + y for x, y in zip(a1, a2))
                prod = c1 * c2
                if a in out:
                    out[a] = out[a] + prod
                else:
                    out[a] = prod
        return XPoly(self.n, self.max_deg, out)

    def scale(self, c):
        c = QQi.of(c)
        return XPoly(self.n, self.max_deg, {a: v * c for a, v in self.coeffs.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ConfigurationError("negative polynomial power")
        out = XPoly.one(self.n, self.max_deg)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def d_x(self, i):
        """Partial derivative in x_i (1-based); trusted degree drops by one."""
        if not 1 <= i <= self.n:
            raise ConfigurationError(f"variable index {i} out of range 1..{self.n}")
        new_deg = self.max_deg if self.max_deg == INF else max(self.max_deg - 1, 0)
        out = {}
        for a, c in self.coeffs.items():
            e = a[i - 1]
            if e == 0:
                continue
            b = a[:i - 1] + (e - 1,) + a[i:]
            out[b] = out.get(b, QQi(0)) + c * e
        return XPoly(self.n, new_deg, out)

    def d_x_multi(self, alpha):
        out = self
        for i, e in enumerate(alpha, start=1):
            for _ in range(e):
                out = out.d_x(i)
        return out

    def inverse(self):
        """Multiplicative inverse in the truncated ring (Newton iteration).
        Requires a finite max_deg and a nonzero constant term."""
        if self.max_deg == INF:
            raise ConfigurationError("inverse requires a finite truncation degree")
        c0 = self.constant_term()
        if c0.is_zero():
            raise ConfigurationError("inverse requires a nonzero constant term")
        q = XPoly.constant(QQi(1) / c0, self.n, self.max_deg)
        two = XPoly.constant(2, self.n, self.max_deg)
        prec = 1
        while prec <= self.max_deg:
            q = q * (two - self * q)
            prec *= 2
        return q

    # -- comparisons --------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, XPoly):
            return NotImplemented
        return self.n == other.n and self.max_deg == other.max_deg and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self.max_deg, tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))))

    # -- text / serialization -------------------------------------------------
    def sorted_items(self):
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for a, c in self.sorted_items():
            mono = "*".join(f"x{i+1}^{e}" if e > 1 else f"x{i+1}"
                            for i, e in enumerate(a) if e)
            ctxt = str(c)
            if ("+" in ctxt[1:]) or ("-" in ctxt[1:]):
                ctxt = f"({ctxt})"
            parts.append(f"{ctxt}*{mono}" if mono else ctxt)
        return " + ".join(parts)

    def __repr__(self):
        return f"XPoly({self})"

    def to_doc(self):
        return [{"alpha": list(a), "re": frac_str(c.re), "im": frac_str(c.im)}
                for a, c in self.sorted_items()]

    @staticmethod
    def from_doc(doc, n, max_deg):
        coeffs = {tuple(ent["alpha"]): QQi(Fraction(ent["re"]), Fraction(ent["im"]))
                  for ent in doc}
        return XPoly(n, max_deg, coeffs)
