"""Structural analysis of the nonlinearity.

The singular behaviour of solutions near t=0 is governed by the
characteristic exponent

    sigma_c = max over monomials with at least two derivative factors of
              (gamma(mu) - m - k_mu) / (|mu| - 1)

For a logarithmic leading term a(x) t^l log t to exist, sigma_c must equal an
integer l in {0, .., m-2} (A0), the maximizing set M0 must be nonempty (A1),
every maximizer may only contain pure time derivatives of order above l (A2),
and the remaining monomials must sit at positive weighted distance delta(mu)
from the critical balance (A3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .equation import MuIndex, PDESpec
from .scalar import INF, frac_str


def delta_weight(mu: MuIndex, l: int, k_mu, m: int) -> Fraction:
    """delta(mu) = m - l + k_mu - gamma(mu) + l*|mu|."""
    return Fraction(m - l) + k_mu - mu.gamma() + l * mu.total


def characteristic_exponent(spec: PDESpec):
    """Exact max of (gamma - m - k)/(|mu| - 1) over |mu| >= 2; -inf if none."""
    best = -INF
    for term in spec.terms:
        if term.mu.total < 2:
            continue
        val = Fraction(term.mu.gamma() - spec.m - term.k_mu(), term.mu.total - 1)
        if best == -INF or val > best:
            best = val
    return best


def classify_m0(spec: PDESpec, l) -> tuple:
    """The monomials with |mu| >= 2 attaining the characteristic exponent l."""
    out = []
    for term in spec.terms:
        if term.mu.total < 2:
            continue
        if Fraction(term.mu.gamma() - spec.m - term.k_mu(), term.mu.total - 1) == l:
            out.append(term.mu)
    return tuple(out)


@dataclass
class AnalysisReport:
    m: int
    n: int
    sigma_c: object  # Fraction or -INF
    l: object  # int or None
    m0: tuple = ()
    a0_holds: bool = False
    a1_holds: bool = False
    a2_holds: bool = False
    a3_holds: bool = False
    a3_constant: object = None  # Fraction, INF (vacuous), or None
    delta_table: dict = field(default_factory=dict)
    mu_l_table: dict = field(default_factory=dict)
    eq_sigma_holds: object = None
    diagnostics: list = field(default_factory=list)

    def all_hold(self):
        return self.a0_holds and self.a1_holds and self.a2_holds and self.a3_holds

    def failed_assumptions(self):
        return [name for name, ok in
                (("A0", self.a0_holds), ("A1", self.a1_holds),
                 ("A2", self.a2_holds), ("A3", self.a3_holds)) if not ok]

    def to_doc(self):
        return {
            "m": self.m,
            "n": self.n,
            "sigma_c": frac_str(self.sigma_c),
            "l": self.l,
            "m0": [str(mu) for mu in self.m0],
            "a0_holds": self.a0_holds,
            "a1_holds": self.a1_holds,
            "a2_holds": self.a2_holds,
            "a3_holds": self.a3_holds,
            "a3_constant": None if self.a3_constant is None else frac_str(self.a3_constant),
            "delta_table": {str(mu): frac_str(d) for mu, d in self.delta_table.items()},
            "mu_l_table": {str(mu): w for mu, w in self.mu_l_table.items()},
            "eq_sigma_holds": self.eq_sigma_holds,
            "diagnostics": list(self.diagnostics),
        }


def check_assumptions(spec: PDESpec) -> AnalysisReport:
    sigma = characteristic_exponent(spec)
    rep = AnalysisReport(m=spec.m, n=spec.n, sigma_c=sigma, l=None)

    if sigma == -INF:
        rep.diagnostics.append(
            "no monomial with two or more derivative factors; "
            "the logarithmic regime does not apply")
        return rep

    integral = isinstance(sigma, Fraction) and sigma.denominator == 1
    in_range = integral and 0 <= sigma <= spec.m - 2
    if not in_range:
        rep.diagnostics.append(
            f"characteristic exponent {frac_str(sigma)} is outside "
            f"{{0,..,{spec.m - 2}}}; fractional-power (non-log) regime")
        return rep

    l = int(sigma)
    rep.l = l
    rep.a0_holds = True

    rep.m0 = classify_m0(spec, l)
    rep.a1_holds = bool(rep.m0)
    if not rep.a1_holds:
        rep.diagnostics.append("no monomial attains the characteristic exponent")

    m0_set = set(rep.m0)
    rep.a2_holds = True
    for mu in rep.m0:
        bad = [(j, alpha) for (j, alpha) in mu.slots()
               if j <= l or sum(alpha) != 0]
        if bad:
            rep.a2_holds = False
            names = ", ".join(
                f"d_t^{j}" + "".join(f" d_x{i+1}^{e}"
                                     for i, e in enumerate(alpha) if e)
                for j, alpha in bad)
            rep.diagnostics.append(
                f"maximizer {mu} contains slot(s) {names} with time order "
                f"<= {l} or x-derivatives; log-free leading balance is not "
                "available")

    # delta / weight tables and the A3 constant over non-maximizers
    a3_c = INF
    for term in spec.terms:
        mu = term.mu
        d = delta_weight(mu, l, term.k_mu(), spec.m)
        w = mu.weight(l)
        rep.delta_table[mu] = d
        rep.mu_l_table[mu] = w
        if mu in m0_set:
            continue
        if w > 0:
            cand = d / w
            if cand < a3_c:
                a3_c = cand
    rep.a3_constant = a3_c
    rep.a3_holds = a3_c == INF or a3_c > 0
    if not rep.a3_holds:
        rep.diagnostics.append(
            f"weighted gap constant {frac_str(a3_c)} is not positive")

    # dichotomy: delta vanishes exactly on M0 among |mu| >= 2 monomials
    for term in spec.terms:
        mu = term.mu
        if mu.total < 2:
            continue
        d = rep.delta_table[mu]
        if mu in m0_set and d != 0:
            rep.diagnostics.append(f"internal: delta({mu}) = {frac_str(d)} on a maximizer")
        if mu not in m0_set and d < 1:
            rep.diagnostics.append(
                f"internal: delta({mu}) = {frac_str(d)} < 1 off the maximizer set")

    # equivalent formulation: max over all mu of gamma - l|mu| - k equals m - l
    if rep.a1_holds:
        vals = [term.mu.gamma() - l * term.mu.total - term.k_mu()
                for term in spec.terms]
        rep.eq_sigma_holds = bool(vals) and max(vals) == spec.m - l
        if not rep.eq_sigma_holds:
            rep.diagnostics.append(
                "internal: equivalent max formulation of the exponent "
                "does not reproduce m - l")
    return rep
