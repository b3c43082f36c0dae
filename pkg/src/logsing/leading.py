"""Leading-coefficient equation.

The constants governing time derivatives of t^l log t:

    d_t^j (t^l log t) = t^(l-j) ([l;j] log t + b_{j,l})        for j <= l
    d_t^j (t^l log t) = beta_{j,l} t^(l-j)                     for j >= l+1

with [rho;j] the falling factorial, b_{0,l} = 0, b_{j+1,l} = [l;j] + (l-j)
b_{j,l}, and beta_{j,l} = (-1)^(j-l-1) l! (j-l-1)!.

Balancing the most singular terms of the equation against d_t^m(a t^l log t)
yields a polynomial equation for the leading coefficient:

    sum over maximizers mu of  f_{mu,0}(x) (prod beta_{j,l}^mu_j) A^(|mu|-1)
        = beta_{m,l}

solved here as a truncated series A = a(x): exact root at x=0 (degree <= 2
with square discriminant), or a high-precision rational approximation, then
extended in x by Newton iteration.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .analysis import AnalysisReport
from .equation import PDESpec
from .errors import ConfigurationError, LeadingRootError
from .scalar import QQi
from .xpoly import XPoly

APPROX_EPS = Fraction(1, 10 ** 30)


def beta(j: int, l: int) -> Fraction:
    """beta_{j,l} = (-1)^(j-l-1) l! (j-l-1)! for j >= l+1."""
    if j < l + 1:
        raise ConfigurationError(f"beta_{{{j},{l}}} requires j >= l+1")
    sign = -1 if (j - l - 1) % 2 else 1
    return Fraction(sign * math.factorial(l) * math.factorial(j - l - 1))


def falling(rho, j: int):
    """[rho;j] = rho (rho-1) ... (rho-j+1); empty product for j = 0."""
    if isinstance(rho, QQi):
        out = QQi.of(1)
        for i in range(j):
            out = out * (rho - QQi.of(i))
        return out
    out = Fraction(1)
    rho = Fraction(rho)
    for i in range(j):
        out *= rho - i
    return out


def b_lower(j: int, l: int) -> Fraction:
    """b_{j,l} from b_{0,l} = 0, b_{j+1,l} = [l;j] + (l-j) b_{j,l}."""
    val = Fraction(0)
    for step in range(j):
        val = falling(l, step) + (l - step) * val
    return val


class LeadingEquation:
    """sum_d coeffs[d](x) A^d = 0 with coeffs[0] = -beta_{m,l}."""

    __slots__ = ("m", "l", "coeffs", "m0", "n", "max_deg")

    def __init__(self, m, l, coeffs, m0, n, max_deg):
        self.m = m
        self.l = l
        self.coeffs = dict(coeffs)
        self.m0 = tuple(m0)
        self.n = n
        self.max_deg = max_deg

    @property
    def degree(self):
        return max(d for d, c in self.coeffs.items() if not c.is_zero())

    def evaluate(self, a: XPoly) -> XPoly:
        out = XPoly.zero(a.n, a.max_deg)
        for d, c in self.coeffs.items():
            out = out + c.assume_exact(a.max_deg) * (a ** d)
        return out

    def derivative_at(self, a: XPoly) -> XPoly:
        out = XPoly.zero(a.n, a.max_deg)
        for d, c in self.coeffs.items():
            if d >= 1:
                out = out + c.assume_exact(a.max_deg).scale(QQi.of(d)) * (a ** (d - 1))
        return out

    def eval_scalar(self, A: QQi) -> QQi:
        out = QQi.of(0)
        for d, c in self.coeffs.items():
            out = out + c.constant_term() * A ** d
        return out

    def scalar_coeffs(self):
        """Coefficient list [c_0(0), c_1(0), ...] of the x=0 polynomial."""
        top = max(self.coeffs)
        return [self.coeffs.get(d, XPoly.zero(self.n, self.max_deg)).constant_term()
                for d in range(top + 1)]

    def to_doc(self):
        return {
            "m": self.m,
            "l": self.l,
            "degree": self.degree,
            "coeffs": {str(d): c.to_doc() for d, c in sorted(self.coeffs.items())},
            "m0": [str(mu) for mu in self.m0],
        }


def build_leading_equation(spec: PDESpec, report: AnalysisReport) -> LeadingEquation:
    if not report.all_hold():
        raise ConfigurationError(
            "leading equation requires the full assumption set; failed: "
            + ", ".join(report.failed_assumptions()))
    l = report.l
    m0_set = set(report.m0)
    max_deg = spec.max_deg_native
    coeffs = {0: XPoly.constant(QQi.of(-beta(spec.m, l)), spec.n, max_deg)}
    for term in spec.terms:
        mu = term.mu
        if mu not in m0_set:
            continue
        prod = Fraction(1)
        for (j, alpha), mult in mu.entries:
            prod *= beta(j, l) ** mult
        d = mu.total - 1
        piece = term.leading_coeff().assume_exact(max_deg).scale(QQi.of(prod))
        coeffs[d] = coeffs.get(d, XPoly.zero(spec.n, max_deg)) + piece
    return LeadingEquation(spec.m, l, coeffs, report.m0, spec.n, max_deg)


def _exact_roots(scalar_coeffs):
    """Roots of the x=0 polynomial, exactly if possible.

    Returns (roots, exact) where roots is a list of QQi (with multiplicity
    collapsed) or None when no exact factorization is available.
    """
    cs = list(scalar_coeffs)
    while cs and cs[-1].is_zero():
        cs.pop()
    if len(cs) <= 1:
        return [], True
    if len(cs) == 2:
        return [-cs[0] / cs[1]], True
    if len(cs) == 3:
        c0, c1, c2 = cs
        disc = c1 * c1 - QQi.of(4) * c0 * c2
        root = disc.sqrt()
        if root is None:
            return None, False
        two_a = QQi.of(2) * c2
        r1 = (-c1 + root) / two_a
        r2 = (-c1 - root) / two_a
        return ([r1] if r1 == r2 else [r1, r2]), True
    return None, False


def _numeric_roots(scalar_coeffs):
    import mpmath

    cs = list(scalar_coeffs)
    while cs and cs[-1].is_zero():
        cs.pop()
    deg = len(cs) - 1
    with mpmath.workdps(80):
        poly = [mpmath.mpc(float_from_frac(c.re), float_from_frac(c.im))
                for c in reversed(cs)]
        roots = mpmath.polyroots(poly, maxsteps=200, extraprec=200)
        out = []
        for r in roots:
            out.append(QQi(_frac_of_mpf(r.real), _frac_of_mpf(r.imag)))
        return out, deg


def float_from_frac(fr: Fraction):
    import mpmath

    return mpmath.mpf(fr.numerator) / mpmath.mpf(fr.denominator)


def _frac_of_mpf(v):
    import mpmath

    if mpmath.almosteq(v, 0, abs_eps=mpmath.mpf(10) ** -40):
        return Fraction(0)
    sign, man, exp, _ = mpmath.mpf(v)._mpf_
    fr = Fraction(man) * Fraction(2) ** exp
    fr = -fr if sign else fr
    return fr.limit_denominator(10 ** 32)


def root_sort_key(r: QQi):
    return r.sort_key()


def leading_roots(eq: LeadingEquation):
    """Distinct order-0 roots, deterministically ordered; (roots, exact)."""
    exact = _exact_roots(eq.scalar_coeffs())
    if exact[0] is not None:
        roots = exact[0]
        is_exact = True
    else:
        roots, _ = _numeric_roots(eq.scalar_coeffs())
        # collapse near-duplicates so multiplicity is visible to callers
        merged = []
        for r in roots:
            dup = False
            for s in merged:
                d = r - s
                if d.abs_upper() < Fraction(1, 10 ** 25):
                    dup = True
                    break
            if not dup:
                merged.append(r)
        roots = merged
        is_exact = False
    return sorted(roots, key=root_sort_key), is_exact


def solve_leading(eq: LeadingEquation, root_index: int = 0,
                  max_deg: int = None):
    """Pick the root_index-th order-0 root and extend it to a(x).

    Returns (a: XPoly, info dict). The selected root must be simple; the x
    extension is a Newton iteration on the series equation, quadratically
    convergent in x-degree.
    """
    roots, exact = leading_roots(eq)
    if not roots:
        raise LeadingRootError(
            "the leading-coefficient equation has no roots at x=0")
    if root_index < 0 or root_index >= len(roots):
        raise LeadingRootError(
            f"root_index {root_index} out of range: {len(roots)} root(s) available")
    a0 = roots[root_index]
    deg = eq.max_deg if max_deg is None else max_deg
    a = XPoly.constant(a0, eq.n, deg)

    dP0 = eq.derivative_at(a).constant_term()
    if exact and dP0.is_zero():
        raise LeadingRootError(
            f"selected root {a0} is a multiple root of the leading equation")
    if not exact and dP0.abs_upper() < Fraction(1, 10 ** 20):
        raise LeadingRootError(
            f"selected root {a0} is numerically degenerate "
            "(derivative vanishes to working precision)")

    # Newton extension in x; exact a0 makes every iterate exact.
    has_x = any(not c.is_constant() for c in eq.coeffs.values())
    if has_x and deg >= 1:
        steps = max(1, math.ceil(math.log2(deg + 1)))
        for _ in range(steps):
            val = eq.evaluate(a)
            dval = eq.derivative_at(a)
            a = a - val * dval.inverse()
        resid = eq.evaluate(a)
        if exact and not resid.is_zero():
            raise LeadingRootError(
                "Newton extension failed to annihilate the leading equation")

    defect = eq.evaluate(a)
    info = {
        "roots": roots,
        "root_index": root_index,
        "exact": exact,
        "defect_bound": Fraction(0) if exact
        else max((c.abs_upper() for _, c in defect.sorted_items()), default=Fraction(0)),
    }
    return a, info
