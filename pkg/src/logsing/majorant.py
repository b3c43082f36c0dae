"""Convergence certificates by majorant recurrence.

The depth-graded components u_k of the solution obey bounds

    surrogate((t d_t)^j d_x^alpha u_k) <= beta * Y_k,   beta = (e m)^m,

where Y_1 = A_1 and

    Y_k = M [ sum_B B_{j,alpha} beta Y_{k-1} / (R-r)^m
            + sum_G G_nu / (R-r)^(m(|nu|-1))
                  sum over compositions k_1+..+k_|nu| = k of prod beta Y_{k_i} ].

Everything is exact rational arithmetic; the scaled form C_k = Y_k (R-r)^
(m(k-1)) is independent of the working radius r, which callers can confirm by
recomputation.  Norms are replaced by the coefficient-norm surrogate
N_rad(p) = sum |coeff| rad^degree (an upper bound for the sup on the polydisc)
with |z| measured by |Re| + |Im|, logarithms weighted 1 and the t-radius fixed
at 1; e enters through the rational over-approximation 1457/536 > e.  These
substitutions make the certificate a desk-scale bound on the computed data,
not the sectorial-analytic constant; every report flags this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product

from .equation import MuIndex
from .errors import CertificationError, ConfigurationError, ResonanceError
from .fuchsian import ReducedEquation, _monomials, falling_poly
from .scalar import frac_str
from .series import LogSeries
from .xpoly import XPoly

E_UP = Fraction(1457, 536)  # 2.7182835... > e

SURROGATE_FLAGS = (
    "coefficient-norm surrogate: sum of |Re|+|Im| of coefficients times "
    "radius^degree (upper bound for the polydisc sup-norm)",
    "log factors weighted 1 and t-radius fixed at 1 in all norms",
    "M is a formal surrogate from C(k,0) values with safety factor 2, not a "
    "sector-analytic constant",
)


def nagumo_bound(C, b):
    """One derivative: a bound C/(R-r)^b becomes e(b+1)C/(R-r)^(b+1)."""
    C = Fraction(C)
    b = Fraction(b)
    if C < 0 or b < 0:
        raise ConfigurationError("nagumo_bound needs nonnegative C and b")
    return (E_UP * (b + 1) * C, b + 1)


def xpoly_surrogate(p: XPoly, rad: Fraction) -> Fraction:
    total = Fraction(0)
    for alpha, c in p.coeffs.items():
        total += c.abs_upper() * rad ** sum(alpha)
    return total


def series_surrogate(s: LogSeries, rad: Fraction) -> Fraction:
    total = Fraction(0)
    for term in s.terms():
        total += xpoly_surrogate(term.coeff, rad)
    return total


def theta_slot_value(v: LogSeries, j: int, alpha) -> LogSeries:
    return v.d_x_multi(alpha).theta_pow(j)


def index_set(m: int, n: int):
    """I_m: all (j, alpha) with j < m and j + |alpha| <= m."""
    out = []
    for j in range(m):
        for alpha in _monomials(n, m - j):
            out.append((j, alpha))
    return out


@dataclass
class MajorantParams:
    m: int
    A1: Fraction
    B: dict                 # (j, alpha) -> Fraction, plain Euler-power slots
    G: dict                 # MuIndex over plain slots -> Fraction
    beta: Fraction
    M: Fraction
    R: Fraction
    r: Fraction
    a: Fraction = Fraction(1)

    def to_doc(self):
        return {
            "m": self.m,
            "A1": frac_str(self.A1),
            "B": [{"j": j, "alpha": list(alpha), "bound": frac_str(v)}
                  for (j, alpha), v in sorted(self.B.items())],
            "G": [{"nu": str(nu), "bound": frac_str(v)}
                  for nu, v in sorted(self.G.items(), key=lambda kv: kv[0].sort_key())],
            "beta": frac_str(self.beta),
            "M": frac_str(self.M),
            "R": frac_str(self.R),
            "r": frac_str(self.r),
            "a": frac_str(self.a),
        }


@dataclass
class MajorantSeq:
    Y: list
    C: list
    radius: Fraction = None

    def to_doc(self):
        return {
            "Y": [frac_str(y) for y in self.Y],
            "C": [frac_str(c) for c in self.C],
            "radius": None if self.radius is None else frac_str(self.radius),
        }


def _plain_slot_expansions(l: int, j: int):
    """[lambda+l; j] = sum_r w_r lambda^r as (r, |w_r|) pairs, w_r != 0."""
    return [(r, abs(w)) for r, w in enumerate(falling_poly(l, j)) if w != 0]


def derive_params(red: ReducedEquation, u1: LogSeries, R: Fraction,
                  r: Fraction, K: int) -> MajorantParams:
    """Dominating constants for the reduced equation and first component."""
    R, r = Fraction(R), Fraction(r)
    if not (0 < r < R <= 1):
        raise ConfigurationError("radii must satisfy 0 < r < R <= 1")
    m, l = red.op.m, red.op.l

    # A1: dominate every Euler-power/space-derivative of u1 at radius R
    A1 = Fraction(0)
    for (j, alpha) in index_set(m, red.cfg.n):
        A1 = max(A1, series_surrogate(theta_slot_value(u1, j, alpha), R))

    # linear tails, converted from falling-factorial slots to plain powers
    B = {}
    for (j, alpha), series in red.linear_tail.items():
        bound = series_surrogate(series, R)
        for rr, w in _plain_slot_expansions(l, j):
            key = (rr, alpha)
            B[key] = B.get(key, Fraction(0)) + w * bound

    # nonlinear coefficients: expand each falling-factorial factor
    G = {}
    for nu, series in red.nonlinear.items():
        bound = series_surrogate(series, R)
        positions = []
        for (j, alpha), mult in nu.entries:
            positions.extend([(j, alpha)] * mult)
        choice_sets = [_plain_slot_expansions(l, j) for j, _alpha in positions]
        for pick in iter_product(*choice_sets):
            weight = Fraction(1)
            slots = {}
            for (jj, alpha), (rr, w) in zip(positions, pick):
                weight *= w
                key = (rr, alpha)
                slots[key] = slots.get(key, 0) + 1
            nu_plain = MuIndex(slots)
            G[nu_plain] = G.get(nu_plain, Fraction(0)) + weight * bound

    beta = (E_UP * m) ** m

    M = 2  # asymptotic bound: k^m / |C(k,0)| -> 1 for monic C, doubled
    for k in range(1, K + 1):
        c = red.op.eval_at0(k)
        if c.is_zero():
            raise ResonanceError(
                Fraction(k), f"C({k}, 0) = 0: the linear operator is resonant "
                             "inside the certificate window; no certificate")
        M = max(M, Fraction(k) ** m / c.abs_lower())
    return MajorantParams(m=m, A1=A1, B=B, G=G, beta=beta, M=Fraction(M),
                          R=R, r=r)


def _compositions(total, parts):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def majorant_sequence(params: MajorantParams, K: int) -> MajorantSeq:
    gap = (params.R - params.r) ** params.m
    Y = [params.A1]
    for k in range(2, K + 1):
        total = Fraction(0)
        for bound in params.B.values():
            total += bound * params.beta * Y[k - 2] / gap
        for nu, bound in params.G.items():
            p = nu.total
            acc = Fraction(0)
            for comp in _compositions(k, p):
                prod = Fraction(1)
                for ki in comp:
                    prod *= params.beta * Y[ki - 1]
                acc += prod
            total += bound * acc / gap ** (p - 1)
        Y.append(params.M * total)
    C = [y * gap ** k for k, y in enumerate(Y)]
    return MajorantSeq(Y=Y, C=C)


def radius_estimate(seq: MajorantSeq, params: MajorantParams) -> Fraction:
    """delta with sum beta Y_k delta^(a k) geometrically summable (margin 2)."""
    if len(seq.Y) < 4:
        raise ConfigurationError("radius estimate needs at least 4 terms")
    C = seq.C
    if all(c == 0 for c in C[1:]):
        return params.R
    ratios = []
    for k in range(len(C) - 1):
        if C[k] == 0:
            if C[k + 1] != 0:
                raise CertificationError(
                    "majorant sequence vanishes then restarts; growth ratio "
                    "is unbounded")
            continue
        ratios.append(C[k + 1] / C[k])
    rho_hat = max(ratios) if ratios else Fraction(0)
    if rho_hat <= 0:
        return params.R
    gap = (params.R - params.r) ** params.m
    return min(params.R, gap / (2 * rho_hat))


def verify_majorant(components, seq: MajorantSeq, params: MajorantParams,
                    m: int, n: int):
    """Check surrogate((t d_t)^j d_x^alpha u_k) <= beta Y_k on computed data.

    A violation means the parameters were not dominating (recompute with
    honest params); it is never a solver soundness failure.
    """
    checks = []
    ok = True
    slots = index_set(m, n)
    upto = min(len(components), len(seq.Y))
    for k in range(1, upto + 1):
        u_k = components[k - 1]
        bound = params.beta * seq.Y[k - 1]
        for (j, alpha) in slots:
            value = series_surrogate(theta_slot_value(u_k, j, alpha), params.r)
            holds = value <= bound
            ok = ok and holds
            checks.append({
                "k": k, "j": j, "alpha": list(alpha),
                "value": frac_str(value), "bound": frac_str(bound),
                "holds": holds,
            })
    return {
        "all_bounds_hold": ok,
        "orders_checked": upto,
        "checks": checks,
        "flags": list(SURROGATE_FLAGS),
    }
