"""Truncated formal log-power series.

A ``LogSeries`` is a finite sum of terms ``c(x) * t^rho * (log t)^q`` with
exact rational exponents rho, natural log powers q, and ``XPoly``
coefficients.  Terms are kept only for rho <= t_order (the truncation
threshold); t_order may be the ``INF`` sentinel for exact data.

Truncation bookkeeping: d_t lowers t_order by one, d_x lowers the
coefficients' max_deg by one, theta / falling_apply / shift_t are exact in
t_order.  add/mul insist on identical (n, max_deg, t_order); realignment is a
visible ``truncated`` call.  mul keeps the common t_order: when a factor has
negative valuation the top of that range is the consumer's responsibility
(the residual oracle computes its own trusted order).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigurationError
from .scalar import INF, QQi, frac_str, parse_frac
from .xpoly import XPoly


def _as_rho(v):
    if v == INF or v == -INF:
        raise ConfigurationError("term exponent must be finite")
    return Fraction(v)


@dataclass(frozen=True)
class SeriesConfig:
    n: int
    max_deg: object  # int or INF
    t_order: object  # Fraction or INF

    def xpoly_zero(self):
        return XPoly.zero(self.n, self.max_deg)


@dataclass(frozen=True)
class LogTerm:
    rho: Fraction
    q: int
    coeff: XPoly


class LogSeries:
    __slots__ = ("n", "max_deg", "t_order", "_terms", "clipped")

    def __init__(self, n, max_deg, t_order, terms=None):
        self.n = n
        self.max_deg = max_deg
        self.t_order = t_order if t_order == INF else Fraction(t_order)
        clean = {}
        clipped = False
        for (rho, q), c in (terms or {}).items():
            rho = _as_rho(rho)
            if q < 0:
                raise ConfigurationError("negative log power")
            if rho > self.t_order:
                clipped = True
                continue
            if c.n != n or c.max_deg != max_deg:
                raise ConfigurationError("coefficient config differs from series config")
            if not c.is_zero():
                clean[(rho, q)] = c
        self._terms = clean
        self.clipped = clipped

    # -- constructors -----------------------------------------------------
    @property
    def config(self):
        return SeriesConfig(self.n, self.max_deg, self.t_order)

    @staticmethod
    def zero(cfg: SeriesConfig):
        return LogSeries(cfg.n, cfg.max_deg, cfg.t_order, {})

    @staticmethod
    def monomial(rho, q, coeff: XPoly, cfg: SeriesConfig):
        if coeff.n != cfg.n or coeff.max_deg != cfg.max_deg:
            coeff = XPoly(cfg.n, cfg.max_deg, coeffs=coeffs_fit(coeff, cfg))
        return LogSeries(cfg.n, cfg.max_deg, cfg.t_order, {(_as_rho(rho), q): coeff})

    @staticmethod
    def const(c, cfg: SeriesConfig):
        return LogSeries.monomial(0, 0, XPoly.constant(c, cfg.n, cfg.max_deg), cfg)

    @staticmethod
    def from_xpoly(p: XPoly, cfg: SeriesConfig):
        return LogSeries.monomial(0, 0, p, cfg)

    # -- structure ---------------------------------------------------------
    def terms(self):
        """Terms in canonical (rho, q) order."""
        return tuple(LogTerm(rho, q, self._terms[(rho, q)])
                     for rho, q in sorted(self._terms))

    def is_zero(self):
        return not self._terms

    def valuation(self):
        """Smallest exponent with a nonzero coefficient; INF when empty."""
        if not self._terms:
            return INF
        return min(rho for rho, _ in self._terms)

    def max_exponent(self):
        if not self._terms:
            return -INF
        return max(rho for rho, _ in self._terms)

    def max_log_power(self):
        return max((q for _, q in self._terms), default=0)

    def exponents(self):
        return sorted({rho for rho, _ in self._terms})

    def coeff_at(self, rho, q) -> XPoly:
        return self._terms.get((_as_rho(rho), q), XPoly.zero(self.n, self.max_deg))

    def part_at(self, rho):
        """All log powers at one exponent, as {q: XPoly}."""
        rho = _as_rho(rho)
        return {q: c for (r, q), c in self._terms.items() if r == rho}

    def slice_at(self, rho) -> "LogSeries":
        rho = _as_rho(rho)
        return LogSeries(self.n, self.max_deg, self.t_order,
                         {k: c for k, c in self._terms.items() if k[0] == rho})

    # -- config plumbing ------------------------------------------------------
    def _require(self, other):
        if (self.n, self.max_deg, self.t_order) != (other.n, other.max_deg, other.t_order):
            raise ConfigurationError(
                f"series config mismatch: ({self.n},{self.max_deg},{self.t_order}) "
                f"vs ({other.n},{other.max_deg},{other.t_order})")

    def truncated(self, t_order=None, max_deg=None) -> "LogSeries":
        """Lower the truncation thresholds (never raise them)."""
        t_order = self.t_order if t_order is None else t_order
        max_deg = self.max_deg if max_deg is None else max_deg
        if t_order > self.t_order or max_deg > self.max_deg:
            raise ConfigurationError("cannot raise truncation thresholds of a truncated series")
        terms = {k: c.truncated(max_deg) for k, c in self._terms.items() if k[0] <= t_order}
        return LogSeries(self.n, max_deg, t_order, terms)

    def with_t_order(self, t_order) -> "LogSeries":
        """Assert a different trusted order (caller has done the bookkeeping).

        Raising t_order is a trust assertion, not a computation; lowering it
        clips terms. Mirrors XPoly.assume_exact.
        """
        return LogSeries(self.n, self.max_deg, t_order, self._terms)

    def restrict(self, cfg: SeriesConfig) -> "LogSeries":
        """Exact data recast at a working config (thresholds may only drop
        unless the series is exact there)."""
        if cfg.n != self.n:
            raise ConfigurationError("dimension mismatch")
        if cfg.t_order > self.t_order and self.max_exponent() > self.t_order:
            raise ConfigurationError("series is not exact beyond its t_order")
        terms = {}
        for (rho, q), c in self._terms.items():
            if rho > cfg.t_order:
                continue
            terms[(rho, q)] = c.assume_exact(cfg.max_deg) if cfg.max_deg > c.max_deg \
                else c.truncated(cfg.max_deg)
        return LogSeries(cfg.n, cfg.max_deg, cfg.t_order, terms)

    # -- linear operations -----------------------------------------------------
    def __add__(self, other):
        self._require(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return LogSeries(self.n, self.max_deg, self.t_order, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LogSeries(self.n, self.max_deg, self.t_order,
                         {k: -c for k, c in self._terms.items()})

    def scale(self, c):
        c = QQi.of(c)
        return LogSeries(self.n, self.max_deg, self.t_order,
                         {k: v.scale(c) for k, v in self._terms.items()})

    def mul_xpoly(self, p: XPoly):
        if p.n != self.n or p.max_deg != self.max_deg:
            raise ConfigurationError("xpoly config differs from series config")
        return LogSeries(self.n, self.max_deg, self.t_order,
                         {k: v * p for k, v in self._terms.items()})

    # -- multiplication -----------------------------------------------------
    def __mul__(self, other):
        self._require(other)
        out = {}
        for (r1, q1), c1 in self._terms.items():
            for (r2, q2), c2 in other._terms.items():
                r = r1 + r2
                if r > self.t_order:
                    continue
                k = (r, q1 + q2)
                prod = c1 * c2
                out[k] = out[k] + prod if k in out else prod
        return LogSeries(self.n, self.max_deg, self.t_order, out)

    def __pow__(self, k: int):
        if k < 0:
            raise ConfigurationError("negative series power")
        out = LogSeries.const(1, self.config)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- differential operations ---------------------------------------------
    def d_t(self) -> "LogSeries":
        """t-derivative; t_order drops by one."""
        out = {}

        def bump(key, c):
            if c.is_zero():
                return
            out[key] = out[key] + c if key in out else c

        for (rho, q), c in self._terms.items():
            if rho != 0:
                bump((rho - 1, q), c.scale(rho))
            if q > 0:
                bump((rho - 1, q - 1), c.scale(q))
        return LogSeries(self.n, self.max_deg,
                         self.t_order if self.t_order == INF else self.t_order - 1, out)

    def theta(self) -> "LogSeries":
        """Euler operator t*d/dt; exact in t_order."""
        out = {}

        def bump(key, c):
            if c.is_zero():
                return
            out[key] = out[key] + c if key in out else c

        for (rho, q), c in self._terms.items():
            if rho != 0:
                bump((rho, q), c.scale(rho))
            if q > 0:
                bump((rho, q - 1), c.scale(q))
        return LogSeries(self.n, self.max_deg, self.t_order, out)

    def theta_pow(self, j: int) -> "LogSeries":
        out = self
        for _ in range(j):
            out = out.theta()
        return out

    def d_x(self, i) -> "LogSeries":
        """x_i-derivative; coefficient max_deg drops by one."""
        new_deg = self.max_deg if self.max_deg == INF else max(self.max_deg - 1, 0)
        out = {}
        for k, c in self._terms.items():
            d = c.d_x(i)
            if not d.is_zero():
                out[k] = d
        return LogSeries(self.n, new_deg, self.t_order, out)

    def d_x_multi(self, alpha) -> "LogSeries":
        out = self
        for i, e in enumerate(alpha, start=1):
            for _ in range(e):
                out = out.d_x(i)
        return out

    def falling_apply(self, l, j) -> "LogSeries":
        """Apply [t*d/dt + l; j] = prod_{i=0}^{j-1} (t*d/dt + l - i)."""
        out = self
        for i in range(j):
            out = out.theta() + out.scale(Fraction(l) - i)
        return out

    def shift_t(self, delta) -> "LogSeries":
        """Multiply by the exact monomial t^delta; t_order shifts with it."""
        delta = Fraction(delta)
        return LogSeries(self.n, self.max_deg,
                         self.t_order if self.t_order == INF else self.t_order + delta,
                         {(rho + delta, q): c for (rho, q), c in self._terms.items()})

    # -- comparisons ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LogSeries):
            return NotImplemented
        return (self.n, self.max_deg, self.t_order) == (other.n, other.max_deg, other.t_order) \
            and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, self.max_deg, self.t_order, tuple(sorted(self._terms))))

    # -- text / serialization ---------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        rows = []
        for t in self.terms():
            ctxt = str(t.coeff)
            if " + " in ctxt:
                ctxt = f"({ctxt})"
            piece = ctxt
            if t.rho != 0:
                piece += f" * t^{t.rho}" if t.rho != 1 else " * t"
            if t.q:
                piece += " * log(t)" if t.q == 1 else f" * log(t)^{t.q}"
            rows.append(piece)
        return " + ".join(rows)

    def __repr__(self):
        return f"LogSeries({self})"

    def to_doc(self):
        return {
            "n": self.n,
            "max_deg": "inf" if self.max_deg == INF else self.max_deg,
            "t_order": frac_str(self.t_order),
            "terms": [{"rho": frac_str(t.rho), "logpow": t.q, "coeff": t.coeff.to_doc()}
                      for t in self.terms()],
        }

    @staticmethod
    def from_doc(doc):
        n = doc["n"]
        max_deg = INF if doc["max_deg"] == "inf" else doc["max_deg"]
        t_order = parse_frac(doc["t_order"])
        terms = {}
        for ent in doc["terms"]:
            key = (Fraction(ent["rho"]), ent["logpow"])
            terms[key] = XPoly.from_doc(ent["coeff"], n, max_deg)
        return LogSeries(n, max_deg, t_order, terms)


def coeffs_fit(p: XPoly, cfg: SeriesConfig):
    """Coefficient dict of p recast for cfg (exactness-checked)."""
    return p.assume_exact(cfg.max_deg).coeffs if cfg.max_deg > p.max_deg \
        else p.truncated(cfg.max_deg).coeffs


def compose_polynomial(terms, assignment, cfg: SeriesConfig = None) -> "LogSeries":
    """Evaluate sum_mu f_mu * prod (assignment[(j, alpha)])^mult.

    ``terms`` is an iterable of (mu, f_mu: LogSeries); ``assignment`` maps
    (j, alpha) slots to LogSeries.  All series must share one configuration.
    """
    series_pool = [s for _, s in terms] + list(assignment.values())
    if cfg is None:
        if not series_pool:
            raise ConfigurationError("cannot infer configuration for an empty composition")
        cfg = series_pool[0].config
    for s in series_pool:
        if (s.n, s.max_deg, s.t_order) != (cfg.n, cfg.max_deg, cfg.t_order):
            raise ConfigurationError("composition operands do not share a configuration")
    total = LogSeries.zero(cfg)
    for mu, f in terms:
        prod = f
        for (j, alpha), mult in mu.entries:
            key = (j, tuple(alpha))
            if key not in assignment:
                raise ConfigurationError(f"missing assignment for derivative slot {key}")
            prod = prod * (assignment[key] ** mult)
        total = total + prod
    return total
