"""Reduction to a regular-singular normal form and order-by-order solving.

Writing u = t^l (a(x) log t + b(x) + v) and multiplying the equation by
t^(m-l) turns it into

    C(t d_t, x) v = F(t,x) + sum over slots s of H_s(t,x) S_s(v)
                          + sum over slot monomials nu of G_nu(t,x) S(v)^nu

where S_{j,alpha}(v) = [t d_t + l; j] d_x^alpha v, the linear operator is the
characteristic polynomial C(lambda, x) = [lambda+l; m] - sum_j L_j(x)
[lambda+l; j], the forcing F and the linear tails H_s have t-valuation >= 1,
and the nonlinear coefficients G_nu have t-valuation >= 0 (their slot factors
supply valuation |nu| >= 2).  Orders are then solved one integer exponent at
a time: on a single exponent rho the operator acts triangularly in the log
power, with top block multiplication by C(rho, x), invertible as a truncated
series iff C(rho, 0) != 0.  A vanishing C(rho, 0) is a resonance: either a
hard error carrying rho, or (policy "frobenius") an exact finite linear solve
with the log degree raised by the root multiplicity and free coefficients
pinned to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product
import math

from .analysis import AnalysisReport
from .equation import MuIndex, PDESpec
from .errors import (AssumptionError, CertificationError, ConfigurationError,
                     ResonanceError)
from .leading import b_lower, beta, falling
from .linalg import InconsistentSystemError, solve_linear_system
from .scalar import INF, QQi, frac_str
from .series import LogSeries, SeriesConfig
from .xpoly import XPoly


def falling_poly(l: int, j: int):
    """[lambda + l; j] as a coefficient list in lambda (exact Fractions)."""
    coeffs = [Fraction(1)]
    for i in range(j):
        shift = Fraction(l - i)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] += c
            nxt[d] += c * shift
        coeffs = nxt
    return coeffs


class CharOperator:
    """C(lambda, x) = [lambda+l; m] - sum_j L_j(x) [lambda+l; j]."""

    def __init__(self, m, l, linear, n, max_deg):
        self.m = m
        self.l = l
        self.linear = dict(linear)  # j -> XPoly L_j
        self.n = n
        self.max_deg = max_deg
        lam = [XPoly.zero(n, max_deg) for _ in range(m + 1)]
        for d, c in enumerate(falling_poly(l, m)):
            lam[d] = lam[d] + XPoly.constant(QQi.of(c), n, max_deg)
        for j, L in self.linear.items():
            L = L.assume_exact(max_deg) if L.max_deg < max_deg else L.truncated(max_deg)
            for d, c in enumerate(falling_poly(l, j)):
                lam[d] = lam[d] - L.scale(QQi.of(c))
        self.lam_coeffs = lam  # C(lambda,x) = sum_d lam[d](x) lambda^d

    def eval_at0(self, rho) -> QQi:
        """C(rho, 0)."""
        rho = rho if isinstance(rho, QQi) else QQi.of(Fraction(rho))
        out = QQi.of(0)
        p = QQi.of(1)
        for c in self.lam_coeffs:
            out = out + c.constant_term() * p
            p = p * rho
        return out

    def eval_xpoly(self, rho) -> XPoly:
        """C(rho, x) as an XPoly."""
        return self.deriv_factor(0, rho)

    def deriv_factor(self, s: int, rho) -> XPoly:
        """C^(s)(rho, x) / s! = sum_{d >= s} binom(d, s) lam[d](x) rho^(d-s)."""
        rho = rho if isinstance(rho, QQi) else QQi.of(Fraction(rho))
        out = XPoly.zero(self.n, self.max_deg)
        for d in range(s, self.m + 1):
            c = QQi.of(math.comb(d, s)) * rho ** (d - s)
            out = out + self.lam_coeffs[d].scale(c)
        return out

    def root_multiplicity(self, rho) -> int:
        """Multiplicity of rho as a root of C(., 0); 0 when not a root."""
        for s in range(self.m + 1):
            if not self.deriv_factor(s, rho).constant_term().is_zero():
                return s
        raise ConfigurationError("characteristic polynomial is identically zero")

    def apply(self, v: LogSeries) -> LogSeries:
        """C(t d_t, x) v via falling-factorial operators (exact)."""
        out = v.falling_apply(self.l, self.m)
        for j, L in self.linear.items():
            piece = v.falling_apply(self.l, j)
            out = out - piece.mul_xpoly(_fit_xpoly(L, v.n, v.max_deg))
        return out

    def resonances_in(self, lo: int, hi: int):
        return [k for k in range(lo, hi + 1) if self.eval_at0(k).is_zero()]

    def to_doc(self):
        return {
            "m": self.m,
            "l": self.l,
            "linear": {str(j): L.to_doc() for j, L in sorted(self.linear.items())},
            "lambda_coeffs": [c.to_doc() for c in self.lam_coeffs],
        }


def _fit_xpoly(p: XPoly, n, max_deg) -> XPoly:
    if p.n != n:
        raise ConfigurationError("dimension mismatch")
    if p.max_deg == max_deg:
        return p
    return p.assume_exact(max_deg) if p.max_deg < max_deg else p.truncated(max_deg)


def _fit_series(s: LogSeries, cfg: SeriesConfig) -> LogSeries:
    return s.restrict(cfg)


@dataclass
class ReducedEquation:
    """Normal form C(t d_t, x) v = forcing + linear tails + nonlinear part."""
    spec: PDESpec
    op: CharOperator
    a: XPoly
    b: XPoly
    forcing: LogSeries
    linear_tail: dict       # slot (j, alpha) -> LogSeries, valuation >= 1
    nonlinear: dict         # MuIndex (|nu| >= 2) -> LogSeries, valuation >= 0
    s_min: object           # Fraction or INF
    cfg: SeriesConfig
    leading_defect: Fraction = Fraction(0)

    def slot_value(self, slot, v: LogSeries) -> LogSeries:
        j, alpha = slot
        return v.d_x_multi(alpha).restrict(self.cfg).falling_apply(self.op.l, j)

    def rhs_for(self, v: LogSeries) -> LogSeries:
        """Full right-hand side at partial solution v (exact through cfg)."""
        slots = set(self.linear_tail)
        for nu in self.nonlinear:
            slots.update(nu.slots())
        vals = {s: self.slot_value(s, v) for s in slots}
        out = self.forcing
        for s, coeff in self.linear_tail.items():
            out = out + coeff * vals[s]
        for nu, coeff in self.nonlinear.items():
            prod = coeff
            for s, mult in nu.entries:
                prod = prod * (vals[s] ** mult)
            out = out + prod
        return out

    def to_doc(self):
        return {
            "op": self.op.to_doc(),
            "forcing": self.forcing.to_doc(),
            "linear_tail": [{"j": j, "alpha": list(alpha), "coeff": c.to_doc()}
                            for (j, alpha), c in sorted(self.linear_tail.items())],
            "nonlinear": [{"nu": str(nu), "coeff": c.to_doc()}
                          for nu, c in sorted(self.nonlinear.items(),
                                              key=lambda kv: kv[0].sort_key())],
            "s_min": frac_str(self.s_min),
            "leading_defect": frac_str(self.leading_defect),
        }


def _enumerate_sub_indices(mu: MuIndex):
    """All nu <= mu with the multinomial factor prod binom(mu_s, nu_s)."""
    slots = mu.entries
    ranges = [range(mult + 1) for _, mult in slots]
    for choice in iter_product(*ranges):
        binom = 1
        nu_items = {}
        for (slot, mult), taken in zip(slots, choice):
            binom *= math.comb(mult, taken)
            if taken:
                nu_items[slot] = taken
        yield MuIndex(nu_items), binom


def reduce(spec: PDESpec, report: AnalysisReport, a: XPoly, b: XPoly,
           cfg: SeriesConfig, defect_tol: Fraction = Fraction(0)) -> ReducedEquation:
    """Substitute u = t^l (a log t + b + v) and organize by powers of the
    slot values S_{j,alpha}(v).

    The v-independent part must cancel at order zero (a solves the leading
    equation); with an approximate root a defect below defect_tol is dropped
    and recorded instead.
    """
    if not report.all_hold():
        raise AssumptionError(
            "reduction requires the full assumption set; failed: "
            + ", ".join(report.failed_assumptions()))
    m, l = spec.m, report.l
    a = _fit_xpoly(a, cfg.n, cfg.max_deg)
    b = _fit_xpoly(b, cfg.n, cfg.max_deg)

    # bases: the v-free part of t^(j-l) d_t^j d_x^alpha u
    def base_for(slot):
        j, alpha = slot
        a_al = _fit_xpoly(a.d_x_multi(alpha), cfg.n, cfg.max_deg)
        if j >= l + 1:
            return LogSeries.monomial(0, 0, a_al.scale(QQi.of(beta(j, l))), cfg)
        b_al = _fit_xpoly(b.d_x_multi(alpha), cfg.n, cfg.max_deg)
        lj = QQi.of(falling(l, j))
        log_part = LogSeries.monomial(0, 1, a_al.scale(lj), cfg)
        const = a_al.scale(QQi.of(b_lower(j, l))) + b_al.scale(lj)
        return log_part + LogSeries.monomial(0, 0, const, cfg)

    bases = {slot: base_for(slot) for slot in spec.slots()}

    forcing = LogSeries.zero(cfg)
    linear = {}
    nonlin = {}
    exact_cfg = SeriesConfig(cfg.n, cfg.max_deg, INF)
    for term in spec.terms:
        mu = term.mu
        k_mu = term.k_mu()
        d_mu = report.delta_table[mu]
        # shift while exact: a down-shift must not lose clipped tail terms
        coeff = term.coeff_series(exact_cfg).shift_t(d_mu - k_mu).restrict(cfg)
        for nu, binom in _enumerate_sub_indices(mu):
            piece = coeff.scale(QQi.of(binom))
            for slot, mult in mu.entries:
                rem = mult - nu.multiplicity(*slot)
                if rem:
                    piece = piece * (bases[slot] ** rem)
            if nu.is_empty():
                forcing = forcing + piece
            elif nu.total == 1:
                slot = nu.entries[0][0]
                linear[slot] = linear.get(slot, LogSeries.zero(cfg)) + piece
            else:
                nonlin[nu] = nonlin.get(nu, LogSeries.zero(cfg)) + piece

    forcing = forcing - LogSeries.monomial(
        0, 0, a.scale(QQi.of(beta(m, l))), cfg)

    # extract the weight-zero linear part into the characteristic operator
    L = {}
    for slot in list(linear):
        j, alpha = slot
        head = linear[slot].coeff_at(0, 0)
        if head.is_zero():
            continue
        if sum(alpha) != 0 or j <= l:
            raise AssumptionError(
                f"order-zero linear coefficient on slot {slot}; the normal "
                "form requires pure time slots above the leading exponent")
        L[j] = head
        linear[slot] = linear[slot] - LogSeries.monomial(0, 0, head, cfg)
        # any residual order-zero log part would break the triangular solve
        if not linear[slot].coeff_at(0, 1).is_zero():
            raise AssumptionError(
                f"order-zero logarithmic linear coefficient on slot {slot}")
    op = CharOperator(m, l, L, cfg.n, cfg.max_deg)

    # leading cancellation: the v-free part must vanish at non-positive orders
    defect = Fraction(0)
    bad = [rho for rho in forcing.exponents() if rho <= 0]
    for rho in bad:
        parts = forcing.part_at(rho)
        worst = max((c.abs_upper() for p in parts.values()
                     for _, c in p.sorted_items()), default=Fraction(0))
        if rho == 0 and worst <= defect_tol:
            defect = max(defect, worst)
            for q in parts:
                forcing = forcing - LogSeries.monomial(0, q, parts[q], cfg)
        else:
            raise AssumptionError(
                "leading cancellation failed: the v-independent part has a "
                f"nonzero contribution at order {frac_str(rho)} "
                "(a does not solve the leading-coefficient equation)")

    # positivity of the reduced data (the formal small-valuation condition)
    s_min = INF
    if not forcing.is_zero():
        s_min = min(s_min, forcing.valuation())
    for slot, series in list(linear.items()):
        if series.is_zero():
            del linear[slot]
            continue
        val = series.valuation()
        if val < 1:
            raise AssumptionError(
                f"linear tail on slot {slot} has valuation {frac_str(val)} < 1")
        s_min = min(s_min, val)
    for nu, series in list(nonlin.items()):
        if series.is_zero():
            del nonlin[nu]
            continue
        val = series.valuation()
        if val < 0:
            raise AssumptionError(
                f"nonlinear coefficient on {nu} has valuation {frac_str(val)} < 0")
        s_min = min(s_min, val + nu.total)

    return ReducedEquation(spec=spec, op=op, a=a, b=b, forcing=forcing,
                           linear_tail=linear, nonlinear=nonlin, s_min=s_min,
                           cfg=cfg, leading_defect=defect)


# -- single-exponent linear solves ------------------------------------------

def solve_linear_order(op: CharOperator, rho, parts: dict,
                       policy: str = "error"):
    """Solve C(t d_t, x) w = t^rho sum_q parts[q] log^q t for w on exponent rho.

    Returns (w_parts: dict q -> XPoly, resonance_record or None).
    """
    rho = Fraction(rho)
    parts = {q: p for q, p in parts.items() if not p.is_zero()}
    if not parts:
        return {}, None
    c0 = op.eval_at0(rho)
    if not c0.is_zero():
        qmax = max(parts)
        n, D = op.n, op.max_deg
        inv = op.eval_xpoly(rho).inverse()
        out = {}
        for q in range(qmax, -1, -1):
            rhs_q = parts.get(q, XPoly.zero(n, D))
            for s in range(1, op.m + 1):
                if q + s in out:
                    fall = QQi.of(falling(Fraction(q + s), s))
                    rhs_q = rhs_q - (op.deriv_factor(s, rho) * out[q + s]).scale(fall)
            sol = inv * rhs_q
            if not sol.is_zero():
                out[q] = sol
        return out, None

    mult = op.root_multiplicity(rho)
    if policy != "frobenius":
        raise ResonanceError(
            rho, f"resonance: C({frac_str(rho)}, 0) = 0 "
                 f"(root multiplicity {mult}); rerun with the log-raising "
                 "policy or supply the arbitrary data externally")
    return _solve_resonant(op, rho, parts, mult)


def _monomials(n, max_deg):
    """All exponent tuples with |alpha| <= max_deg, deterministic order."""
    out = []

    def rec(prefix, remaining, budget):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for e in range(budget + 1):
            rec(prefix + [e], remaining - 1, budget - e)

    rec([], n, max_deg)
    return sorted(out, key=lambda al: (sum(al), al))


def _solve_resonant(op: CharOperator, rho, parts, mult):
    """Exact finite linear solve with the log degree raised by mult."""
    qmax = max(parts)
    qtop = qmax + mult
    n, D = op.n, op.max_deg
    monos = _monomials(n, D)
    mono_pos = {al: i for i, al in enumerate(monos)}
    nm = len(monos)
    nq = qtop + 1
    dim = nq * nm

    def var(q, al):
        return q * nm + mono_pos[al]

    # factors C^(s)(rho, x)/s! as multiplication matrices on monomials
    factors = [op.deriv_factor(s, rho) for s in range(op.m + 1)]

    rows = []
    rhs = []
    for q in range(nq):
        target = parts.get(q, XPoly.zero(n, D))
        for al in monos:
            row = [QQi.of(0)] * dim
            for s in range(op.m + 1):
                if q + s > qtop:
                    break
                fall = QQi.of(falling(Fraction(q + s), s))
                if fall.is_zero():
                    continue
                for be, c in factors[s].coeffs.items():
                    # coefficient of x^al in factor * x^ga is c at ga = al - be
                    ga = tuple(x - y for x, y in zip(al, be))
                    if any(g < 0 for g in ga) or ga not in mono_pos:
                        continue
                    row[var(q + s, ga)] = row[var(q + s, ga)] + c * fall
            rows.append(row)
            rhs.append(target.coeffs.get(al, QQi.of(0)))

    try:
        sol, free = solve_linear_system(rows, rhs)
    except InconsistentSystemError:
        raise ResonanceError(
            rho, f"resonance at exponent {frac_str(rho)}: the log-raised "
                 "system is inconsistent") from None

    out = {}
    for q in range(nq):
        coeffs = {}
        for al in monos:
            c = sol[var(q, al)]
            if not c.is_zero():
                coeffs[al] = c
        poly = XPoly(n, D, coeffs)
        if not poly.is_zero():
            out[q] = poly
    record = {
        "exponent": rho,
        "action": "log-raised",
        "multiplicity": mult,
        "free_coefficients_set_to_zero": len(free),
    }
    return out, record


@dataclass
class SolveResult:
    a: XPoly
    b: XPoly
    l: int
    v: LogSeries
    u: LogSeries
    resonances: list
    achieved_order: Fraction
    s_min: object
    red: ReducedEquation = None
    depth_components: list = None

    def to_doc(self):
        return {
            "l": self.l,
            "a": self.a.to_doc(),
            "b": self.b.to_doc(),
            "v": self.v.to_doc(),
            "u": self.u.to_doc(),
            "resonances": [
                {"exponent": frac_str(r["exponent"]),
                 "action": r["action"],
                 "multiplicity": r.get("multiplicity"),
                 "free_coefficients_set_to_zero":
                     r.get("free_coefficients_set_to_zero")}
                for r in self.resonances],
            "achieved_order": frac_str(self.achieved_order),
            "s_min": frac_str(self.s_min),
        }


def assemble_u(red: ReducedEquation, v: LogSeries) -> LogSeries:
    head = LogSeries.monomial(0, 1, red.a, red.cfg) \
        + LogSeries.monomial(0, 0, red.b, red.cfg)
    return (head + v).shift_t(red.op.l)


def solve_formal(red: ReducedEquation, K: int,
                 resonance_policy: str = "error") -> SolveResult:
    """Solve the reduced equation order-by-order through the configured
    window (which must extend at least to K); certify order K."""
    cfg = red.cfg
    if cfg.t_order == INF or cfg.t_order < K:
        raise ConfigurationError(
            f"working t-order {cfg.t_order} cannot certify order {K}")
    top = int(cfg.t_order)
    v = LogSeries.zero(cfg)
    resonances = []
    for k in range(1, top + 1):
        rhs = red.rhs_for(v)
        parts = rhs.part_at(Fraction(k))
        w_parts, record = solve_linear_order(red.op, Fraction(k), parts,
                                             policy=resonance_policy)
        if record:
            resonances.append(record)
        for q, poly in w_parts.items():
            v = v + LogSeries.monomial(k, q, poly, cfg)
    u = assemble_u(red, v)
    return SolveResult(a=red.a, b=red.b, l=red.op.l, v=v, u=u,
                       resonances=resonances, achieved_order=Fraction(K),
                       s_min=red.s_min, red=red)


def solve_depth(red: ReducedEquation, K: int,
                resonance_policy: str = "error"):
    """Recurrent family graded by nonlinearity depth.

    u_1 solves C u_1 = forcing; for k >= 2,
    C u_k = sum_s H_s S_s(u_{k-1})
          + sum_nu G_nu sum over compositions k_1+..+k_{|nu|} = k of
            prod over factor positions of S(u_{k_i}).
    Each u_k has valuation >= k, and sum_k u_k equals the order-graded
    solution exactly on the shared window.
    """
    cfg = red.cfg
    if cfg.t_order == INF:
        raise ConfigurationError("depth solve needs a finite working order")
    top = int(cfg.t_order)
    K = min(K, top)

    slots = set(red.linear_tail)
    for nu in red.nonlinear:
        slots.update(nu.slots())
    slots = sorted(slots)

    components = []           # u_1 .. u_K
    slot_depth = {s: [] for s in slots}   # per depth, S_s(u_d)
    resonances = []

    def solve_rhs(rhs: LogSeries):
        w = LogSeries.zero(cfg)
        for rho in rhs.exponents():
            parts = rhs.part_at(rho)
            w_parts, record = solve_linear_order(red.op, rho, parts,
                                                 policy=resonance_policy)
            if record:
                resonances.append(record)
            for q, poly in w_parts.items():
                w = w + LogSeries.monomial(rho, q, poly, cfg)
        return w

    for depth in range(1, K + 1):
        if depth == 1:
            rhs = red.forcing
        else:
            rhs = LogSeries.zero(cfg)
            for s, coeff in red.linear_tail.items():
                prev = slot_depth[s][depth - 2]
                rhs = rhs + coeff * prev
            for nu, coeff in red.nonlinear.items():
                positions = []
                for s, mult in nu.entries:
                    positions.extend([s] * mult)
                rhs = rhs + coeff * _depth_product(slot_depth, positions, depth)
        u_k = solve_rhs(rhs)
        if not u_k.is_zero() and u_k.valuation() < depth:
            raise ConfigurationError(
                f"depth component {depth} has valuation "
                f"{frac_str(u_k.valuation())} < {depth}")
        components.append(u_k)
        for s in slots:
            slot_depth[s].append(red.slot_value(s, u_k))
    return components, resonances


def _depth_product(slot_depth, positions, depth):
    """Sum over ordered compositions (d_1..d_p) of `depth`, d_i >= 1, of
    prod_i S_{positions[i]}(u_{d_i}), by convolution in the depth grading."""
    p = len(positions)
    # acc[d] = sum over first i factors with total depth d
    first = slot_depth[positions[0]]
    acc = {d + 1: first[d] for d in range(len(first))}
    for pos in positions[1:]:
        vals = slot_depth[pos]
        nxt = {}
        for d, series in acc.items():
            for d2 in range(len(vals)):
                total = d + d2 + 1
                if total > depth:
                    continue
                prod = series * vals[d2]
                nxt[total] = nxt[total] + prod if total in nxt else prod
        acc = nxt
    if depth not in acc:
        cfg_src = next(iter(slot_depth.values()))[0]
        return LogSeries.zero(cfg_src.config)
    return acc[depth]


# -- residual -----------------------------------------------------------------

@dataclass
class ResidualReport:
    valuation: object        # Fraction or INF
    trusted_t_order: object  # Fraction or INF
    trusted_x_deg: object    # int or INF

    def certifies(self, K) -> bool:
        if self.trusted_t_order != INF and self.trusted_t_order < K:
            return False
        return self.valuation == INF or self.valuation > K

    def to_doc(self):
        return {
            "valuation": frac_str(self.valuation),
            "trusted_t_order": frac_str(self.trusted_t_order),
            "trusted_x_deg": "inf" if self.trusted_x_deg == INF
            else self.trusted_x_deg,
        }


def _trust_mul(s1: LogSeries, s2: LogSeries):
    """Product of two truncated series with honest truncation bookkeeping.

    If s_i is trusted through Theta_i and has valuation w_i, the product is
    trusted through min(Theta_1 + w_2, Theta_2 + w_1): every term of the true
    product at or below that exponent is a sum of stored-term products.
    """
    def val_floor(s):
        if s.is_zero():
            return INF if s.t_order == INF else s.t_order + 1
        return s.valuation()

    w1, w2 = val_floor(s1), val_floor(s2)
    if w1 == INF or w2 == INF:
        tau = INF
    else:
        tau = min(s1.t_order + w2 if s1.t_order != INF else INF,
                  s2.t_order + w1 if s2.t_order != INF else INF)
    D = min(s1.max_deg, s2.max_deg)
    # multiply with every stored term available: a slice at sigma <= tau can
    # pair a term near one window's top with one near the other's valuation,
    # so clipping a factor at tau first would lose real contributions
    top = max(s1.t_order, s2.t_order, tau)
    a = s1.truncated(max_deg=D).with_t_order(top)
    b = s2.truncated(max_deg=D).with_t_order(top)
    prod = a * b
    return prod.truncated(t_order=tau) if tau < top else prod.with_t_order(tau)


def _trust_align(series_list):
    """Common window: lowest trusted order and x-degree across the list."""
    tau = INF
    D = INF
    for s in series_list:
        tau = min(tau, s.t_order)
        D = min(D, s.max_deg)
    return [s.truncated(max_deg=D).with_t_order(tau) for s in series_list], tau, D


def residual(spec: PDESpec, u: LogSeries, K=None) -> ResidualReport:
    """Exact valuation of d_t^m u - f(t,x,(d_t^j d_x^alpha u)) on the trusted
    window of the given truncated u; INF when it vanishes throughout."""
    derivs = {}
    for (j, alpha) in spec.slots():
        s = u
        for _ in range(j):
            s = s.d_t()
        derivs[(j, alpha)] = s.d_x_multi(alpha)

    lhs = u
    for _ in range(spec.m):
        lhs = lhs.d_t()

    pieces = [lhs]
    signs = [1]
    exact_cfg_n = u.n
    for term in spec.terms:
        coeff = LogSeries(exact_cfg_n, u.max_deg, INF,
                          {(Fraction(p), 0): _fit_xpoly(c, exact_cfg_n, u.max_deg)
                           for p, c in term.coeff_t})
        prod = coeff
        for slot, mult in term.mu.entries:
            for _ in range(mult):
                prod = _trust_mul(prod, derivs[slot])
        pieces.append(prod)
        signs.append(-1)

    aligned, tau, D = _trust_align(pieces)
    total = LogSeries.zero(aligned[0].config)
    for sgn, s in zip(signs, aligned):
        total = total + (s if sgn > 0 else -s)

    if K is not None and tau != INF and tau < K:
        raise CertificationError(
            f"truncation budget insufficient: residual trusted only through "
            f"order {frac_str(tau)} < {K}")
    return ResidualReport(valuation=total.valuation(),
                          trusted_t_order=tau, trusted_x_deg=D)
