"""Equation data model.

An equation  d_t^m u = f(t, x, (d_t^j d_x^alpha u)_{(j,alpha) in I})  is stored
as a polynomial in the derivative slots: a map from multi-indices mu (how many
times each slot appears in a monomial) to coefficient functions f_mu(t, x).
Coefficients are polynomials in t with XPoly x-parts; each f_mu carries its
t-valuation k_mu and x-degree-zero part for the structural analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigurationError
from .scalar import INF, QQi, frac_str
from .series import LogSeries, SeriesConfig
from .xpoly import XPoly


def slot_key(j, alpha):
    return (int(j), tuple(int(a) for a in alpha))


class MuIndex:
    """Multiplicity vector over derivative slots: mu[(j, alpha)] = count >= 1."""

    __slots__ = ("entries",)

    def __init__(self, items):
        ent = {}
        for (j, alpha), mult in dict(items).items():
            if mult <= 0:
                continue
            ent[slot_key(j, alpha)] = int(mult)
        self.entries = tuple(sorted(ent.items()))

    @property
    def total(self):
        """|mu|: total number of derivative factors, counting multiplicity."""
        return sum(m for _, m in self.entries)

    def weight(self, l):
        """|mu|_l: factors with time order j <= l (log-carrying for exponent l)."""
        return sum(m for (j, _), m in self.entries if j <= l)

    def max_alpha(self):
        return max((sum(a) for (_, a), _ in self.entries), default=0)

    def gamma(self):
        """Total time order sum mult * j (x-orders tracked separately by chi)."""
        return sum(m * j for (j, _), m in self.entries)

    def chi(self):
        """Total x-order sum mult * |alpha|."""
        return sum(m * sum(a) for (_, a), m in self.entries)

    def is_empty(self):
        return not self.entries

    def multiplicity(self, j, alpha):
        key = slot_key(j, alpha)
        for k, m in self.entries:
            if k == key:
                return m
        return 0

    def slots(self):
        return tuple(k for k, _ in self.entries)

    def __eq__(self, other):
        return isinstance(other, MuIndex) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        if not self.entries:
            return "1"
        parts = []
        for (j, alpha), m in self.entries:
            base = f"u[{j};{','.join(map(str, alpha))}]"
            parts.append(base if m == 1 else f"{base}^{m}")
        return "*".join(parts)

    def __repr__(self):
        return f"MuIndex({self})"

    def sort_key(self):
        return (self.total, self.entries)


@dataclass(frozen=True)
class RhsTerm:
    """One monomial f_mu(t,x) * prod slots; coeff is a polynomial in t whose
    t-coefficients are XPoly in x: {t_power (int) -> XPoly}."""
    mu: MuIndex
    coeff_t: tuple  # tuple of (t_power, XPoly), sorted by power

    def k_mu(self):
        """t-valuation of the coefficient (INF if the coefficient is zero)."""
        powers = [p for p, c in self.coeff_t if not c.is_zero()]
        return min(powers) if powers else INF

    def coeff_series(self, cfg: SeriesConfig) -> LogSeries:
        terms = {}
        for p, c in self.coeff_t:
            if Fraction(p) > cfg.t_order:
                continue
            terms[(Fraction(p), 0)] = c.assume_exact(cfg.max_deg) if cfg.max_deg > c.max_deg \
                else c.truncated(cfg.max_deg)
        return LogSeries(cfg.n, cfg.max_deg, cfg.t_order, terms)

    def leading_coeff(self) -> XPoly:
        """Coefficient of t^{k_mu}: the part that feeds the dominant balance."""
        powers = [(p, c) for p, c in self.coeff_t if not c.is_zero()]
        if not powers:
            raise ConfigurationError("empty coefficient")
        return min(powers, key=lambda pc: pc[0])[1]


class PDESpec:
    """d_t^m u = sum_mu f_mu(t, x) * prod_{(j,alpha)} (d_t^j d_x^alpha u)^mu."""

    __slots__ = ("m", "n", "terms", "max_deg_native")

    def __init__(self, m, n, terms):
        self.m = int(m)
        self.n = int(n)
        if self.m < 1:
            raise ConfigurationError("time order m must be >= 1")
        merged = {}
        deg = 0
        for term in terms:
            for (j, alpha), _ in term.mu.entries:
                if len(alpha) != self.n:
                    raise ConfigurationError("slot x-arity differs from equation arity")
                if j >= self.m:
                    raise ConfigurationError(
                        f"right side uses d_t^{j} but only orders < {self.m} are allowed")
                if j + sum(alpha) > self.m:
                    raise ConfigurationError(
                        f"slot (j={j}, |alpha|={sum(alpha)}) exceeds total order {self.m}")
            if term.mu in merged:
                merged[term.mu] = _merge_coeff(merged[term.mu], term.coeff_t)
            else:
                merged[term.mu] = term.coeff_t
            for _, c in term.coeff_t:
                deg = max(deg, c.degree())
        clean = []
        for mu in sorted(merged, key=lambda m_: m_.sort_key()):
            coeff = tuple((p, c) for p, c in merged[mu] if not c.is_zero())
            if coeff:
                clean.append(RhsTerm(mu, coeff))
        self.terms = tuple(clean)
        self.max_deg_native = deg

    def slots(self):
        out = set()
        for term in self.terms:
            out.update(term.mu.slots())
        return sorted(out)

    def uses_x_derivatives(self):
        return any(sum(alpha) > 0 for _, alpha in self.slots())

    def max_slot_alpha(self):
        return max((sum(alpha) for _, alpha in self.slots()), default=0)

    def weights_table(self):
        """Per-monomial structural data: |mu|, gamma, k_mu, chi."""
        rows = []
        for term in self.terms:
            rows.append({
                "mu": str(term.mu),
                "total": term.mu.total,
                "gamma": term.mu.gamma(),
                "k_mu": term.k_mu(),
                "x_order": term.mu.chi(),
            })
        return rows

    # -- printing ---------------------------------------------------------
    def __str__(self):
        lhs = f"D[t,{self.m}](u)"
        if not self.terms:
            return f"{lhs} = 0"
        parts = []
        for term in self.terms:
            parts.append(_print_term(term, self.n))
        rhs = parts[0]
        for p in parts[1:]:
            rhs += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return f"{lhs} = {rhs}"

    def __repr__(self):
        return f"PDESpec({self})"

    def __eq__(self, other):
        return isinstance(other, PDESpec) and \
            (self.m, self.n, self.terms) == (other.m, other.n, other.terms)


def _merge_coeff(a, b):
    acc = {p: c for p, c in a}
    for p, c in b:
        acc[p] = acc[p] + c if p in acc else c
    return tuple(sorted(acc.items()))


def _print_slot(j, alpha, n):
    pieces = [f"D[t,{j}]"]
    for i, e in enumerate(alpha, start=1):
        if e:
            pieces.append(f"D[x{i},{e}]")
    return "".join(pieces) + "(u)"


def _print_xmono(alpha, n):
    pieces = []
    for i, e in enumerate(alpha, start=1):
        if e == 1:
            pieces.append(f"x{i}")
        elif e > 1:
            pieces.append(f"x{i}^{e}")
    return "*".join(pieces)


def _print_scalar(c: QQi):
    """Scalar as a parse-ready factor."""
    if c.im == 0:
        v = c.re
        return frac_str(v)
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{frac_str(c.im)}*i"
    sign = "+" if c.im > 0 else "-"
    mag = abs(c.im)
    itxt = "i" if mag == 1 else f"{frac_str(mag)}*i"
    return f"({frac_str(c.re)} {sign} {itxt})"


def _print_term(term: RhsTerm, n):
    factors = []
    for p, c in term.coeff_t:
        for alpha, val in c.sorted_items():
            factors.append((p, alpha, val))
    slot_txt = "*".join(
        (_print_slot(j, alpha, n) if m == 1 else f"{_print_slot(j, alpha, n)}^{m}")
        for (j, alpha), m in term.mu.entries)
    if len(factors) == 1:
        p, alpha, val = factors[0]
        pieces = []
        if val != 1 or (p == 0 and sum(alpha) == 0 and not slot_txt):
            pieces.append(_print_scalar(val))
        if p == 1:
            pieces.append("t")
        elif p != 0:
            pieces.append(f"t^{p}")
        mono = _print_xmono(alpha, n)
        if mono:
            pieces.append(mono)
        if slot_txt:
            pieces.append(slot_txt)
        if not pieces:
            pieces.append("1")
        txt = "*".join(pieces)
        if txt.startswith("-") and "*" in txt:
            return txt
        return txt
    chunks = []
    for p, alpha, val in factors:
        pieces = [_print_scalar(val)] if val != 1 else []
        if p == 1:
            pieces.append("t")
        elif p != 0:
            pieces.append(f"t^{p}")
        mono = _print_xmono(alpha, n)
        if mono:
            pieces.append(mono)
        if not pieces:
            pieces.append("1")
        chunks.append("*".join(pieces))
    coeff_txt = "(" + " + ".join(chunks) + ")"
    return f"{coeff_txt}*{slot_txt}" if slot_txt else coeff_txt


def spec_from_terms(m, n, raw_terms, max_deg=None):
    """Build a PDESpec from (mu_items, {t_power: xpoly-coeff-dict}) rows.

    ``raw_terms``: iterable of (mu_items, coeff) where coeff maps t-powers to
    either QQi-likes (constant in x) or {alpha: QQi} dicts.
    """
    if max_deg is None:
        max_deg = 0
        for _, coeff in raw_terms:
            for _, val in coeff.items():
                if isinstance(val, dict):
                    max_deg = max(max_deg, max((sum(a) for a in val), default=0))
    rows = []
    for mu_items, coeff in raw_terms:
        ct = []
        for p, val in sorted(coeff.items()):
            if isinstance(val, dict):
                poly = XPoly(n, max_deg, {tuple(a): QQi.of(v) for a, v in val.items()})
            else:
                poly = XPoly.constant(QQi.of(val), n, max_deg)
            ct.append((int(p), poly))
        rows.append(RhsTerm(MuIndex(mu_items), tuple(ct)))
    return PDESpec(m, n, rows)
