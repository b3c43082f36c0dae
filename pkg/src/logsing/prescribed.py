"""Expansions around a prescribed leading term.

Given u_lead (for example 2 t^-2 for a pole-type balance), corrections are
found one exponent at a time: at level e the coefficient of t^e is chosen so
that the exact residual slice at exponent e + sigma vanishes, where sigma is
the t-shift of the linearized operator

    DN[w] = d_t^m w - sum over slots s of C_s(t, x) d_t^(j_s) d_x^(alpha_s) w,

C_s the Frechet coefficients at u_lead. Each level is an exact finite linear
solve (the indicial system). A singular system is a resonance: its kernel is
arbitrary data that must be supplied from resonance_data (injected after a
compatibility check), mirroring the arbitrary functions of Painleve-type
expansions. Everything here is exact: no t-truncation enters, and x-degrees
are bounded per call so polynomial products never clip.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .equation import PDESpec
from .errors import (BalanceError, CompatibilityError, ConfigurationError,
                     MissingResonanceDataError)
from .fuchsian import _monomials
from .linalg import InconsistentSystemError, solve_linear_system
from .scalar import INF, QQi, frac_str
from .series import LogSeries, SeriesConfig
from .xpoly import XPoly


def _series_deg(s: LogSeries) -> int:
    return max((c.degree() for t in s.terms() for c in (t.coeff,)), default=0)


def _exact_cfg(n, max_deg):
    return SeriesConfig(n, max_deg, INF)


def _recast(s: LogSeries, cfg: SeriesConfig) -> LogSeries:
    return s.restrict(cfg)


def _slot_deriv(u: LogSeries, slot) -> LogSeries:
    j, alpha = slot
    out = u
    for _ in range(j):
        out = out.d_t()
    return out.d_x_multi(alpha)


def residual_series(spec: PDESpec, u: LogSeries) -> LogSeries:
    """d_t^m u - f(...) for an exact (untruncated) u, computed exactly.

    The ambient x-degree is sized per call so no polynomial product clips.
    """
    if u.t_order != INF:
        raise ConfigurationError("exact residual requires an untruncated series")
    du = _series_deg(u)
    bound = 0
    for term in spec.terms:
        deg_f = max((c.degree() for _, c in term.coeff_t), default=0)
        bound = max(bound, deg_f + term.mu.total * du)
    bound = max(bound, du)
    cfg = _exact_cfg(spec.n, bound)

    uu = _recast(u, cfg)
    derivs = {slot: _recast(_slot_deriv(uu, slot), cfg) for slot in spec.slots()}
    lhs = uu
    for _ in range(spec.m):
        lhs = lhs.d_t()
    total = lhs
    for term in spec.terms:
        coeff = term.coeff_series(cfg)
        prod = coeff
        for slot, mult in term.mu.entries:
            prod = prod * (derivs[slot] ** mult)
        total = total - prod
    return total


def frechet_coefficients(spec: PDESpec, u: LogSeries):
    """Slot coefficients C_s of the linearization DN at u, exactly."""
    du = _series_deg(u)
    bound = 0
    for term in spec.terms:
        deg_f = max((c.degree() for _, c in term.coeff_t), default=0)
        bound = max(bound, deg_f + term.mu.total * du)
    cfg = _exact_cfg(spec.n, max(bound, du))
    uu = _recast(u, cfg)
    derivs = {slot: _recast(_slot_deriv(uu, slot), cfg) for slot in spec.slots()}
    out = {}
    for term in spec.terms:
        coeff = term.coeff_series(cfg)
        for slot, mult in term.mu.entries:
            piece = coeff.scale(QQi.of(mult))
            for s2, m2 in term.mu.entries:
                rem = m2 - (1 if s2 == slot else 0)
                if rem:
                    piece = piece * (derivs[s2] ** rem)
            out[slot] = out.get(slot, LogSeries.zero(cfg)) + piece
    return {s: c for s, c in out.items() if not c.is_zero()}


def linearization_shift(spec: PDESpec, coeffs) -> Fraction:
    """sigma: the lowest t-shift of DN; d_t^m contributes -m."""
    sigma = Fraction(-spec.m)
    for (j, _alpha), c in coeffs.items():
        sigma = min(sigma, c.valuation() - j)
    return sigma


def _apply_linearization(spec: PDESpec, coeffs, w: LogSeries) -> LogSeries:
    du = max(_series_deg(w), max((_series_deg(c) for c in coeffs.values()),
                                 default=0))
    bound = du + _series_deg(w)
    cfg = _exact_cfg(spec.n, max(bound, 1))
    ww = _recast(w, cfg)
    out = ww
    for _ in range(spec.m):
        out = out.d_t()
    for slot, c in coeffs.items():
        out = out - _recast(c, cfg) * _recast(_slot_deriv(ww, slot), cfg)
    return out


@dataclass
class PrescribedResult:
    u: LogSeries
    u_lead: LogSeries
    sigma: Fraction
    base_exponent: Fraction
    levels: list = field(default_factory=list)
    resonances: list = field(default_factory=list)
    residual_valuation: object = None
    diagnostics: list = field(default_factory=list)

    def coefficient(self, rho, q=0) -> XPoly:
        return self.u.coeff_at(rho, q)

    def to_doc(self):
        return {
            "u": self.u.to_doc(),
            "u_lead": self.u_lead.to_doc(),
            "sigma": frac_str(self.sigma),
            "base_exponent": frac_str(self.base_exponent),
            "levels": [
                {"exponent": frac_str(lv["exponent"]),
                 "resonant": lv["resonant"],
                 "kernel_dimension": lv["kernel_dimension"],
                 "injected": lv["injected"]}
                for lv in self.levels],
            "resonances": [frac_str(e) for e in self.resonances],
            "residual_valuation": frac_str(self.residual_valuation),
            "diagnostics": list(self.diagnostics),
        }


def solve_prescribed(spec: PDESpec, u_lead: LogSeries, resonance_data,
                     K: int) -> PrescribedResult:
    """Expand u = u_lead + corrections at exponents val(u_lead)+1 .. +K.

    resonance_data maps absolute resonant exponents to the arbitrary
    coefficient (an XPoly) injected there.
    """
    if u_lead.is_zero():
        raise ConfigurationError("prescribed leading term must be nonzero")
    if K < 1:
        raise ConfigurationError("expansion order must be at least 1")
    data = {Fraction(k): v for k, v in (resonance_data or {}).items()}

    v0 = u_lead.valuation()
    coeffs = frechet_coefficients(spec, u_lead)
    sigma = linearization_shift(spec, coeffs)

    r0 = residual_series(spec, u_lead)
    if not r0.is_zero() and r0.valuation() <= v0 + sigma:
        raise BalanceError(
            "dominant balance fails: the residual of the prescribed leading "
            f"term has valuation {frac_str(r0.valuation())} "
            f"<= {frac_str(v0 + sigma)}")

    result = PrescribedResult(u=u_lead, u_lead=u_lead, sigma=sigma,
                              base_exponent=v0)
    used_data = set()
    u = u_lead
    for k in range(1, K + 1):
        e = v0 + k
        res = residual_series(spec, u)
        slice_parts = res.part_at(e + sigma)
        has_data = e in data
        if not slice_parts and not has_data:
            if not _level_singular(spec, coeffs, e, sigma):
                continue
            # a resonant level with nothing to solve still has free data;
            # record it so callers see the full solution-family structure
            result.resonances.append(e)
            result.levels.append({"exponent": e, "resonant": True,
                                  "kernel_dimension": None, "injected": False})
            continue
        w, info = _solve_level(spec, coeffs, e, sigma, slice_parts,
                               data.get(e), has_data)
        if has_data:
            used_data.add(e)
        if info["resonant"]:
            result.resonances.append(e)
        result.levels.append(info)
        if w is not None and not w.is_zero():
            u = _add_exact(u, w)

    unused = sorted(set(data) - used_data)
    for e in unused:
        result.diagnostics.append(
            f"resonance data at exponent {frac_str(e)} was never used "
            "(outside the expansion window or at a regular level)")

    final = residual_series(spec, u)
    val = final.valuation()
    target = v0 + K + sigma
    if val != INF and val <= target:
        raise ConfigurationError(
            f"internal: final residual valuation {frac_str(val)} does not "
            f"clear the solved window (> {frac_str(target)} expected)")
    result.u = u
    result.residual_valuation = val
    return result


def _add_exact(u: LogSeries, w: LogSeries) -> LogSeries:
    deg = max(u.max_deg, w.max_deg)
    cfg = _exact_cfg(u.n, deg)
    return _recast(u, cfg) + _recast(w, cfg)


def _basis_probe(spec, coeffs, e, sigma, q, mono, n, deg_probe):
    elem = LogSeries(n, max(deg_probe, sum(mono)), INF,
                     {(Fraction(e), q): XPoly(n, max(deg_probe, sum(mono)),
                                              {mono: QQi.of(1)})})
    img = _apply_linearization(spec, coeffs, elem)
    return img.part_at(Fraction(e) + sigma)


def _level_singular(spec, coeffs, e, sigma, probe_deg=0) -> bool:
    """Does the level-e indicial map annihilate some q=0 monomial direction?

    Checked on the constant monomial; x-dependence of the indicial map is
    degree-raising, so singularity of the constant block is decisive for
    the x-independent kernel directions used by injection.
    """
    n = spec.n
    parts = _basis_probe(spec, coeffs, e, sigma, 0, (0,) * n, n, probe_deg)
    head = parts.get(0)
    return head is None or head.constant_term().is_zero()


def _solve_level(spec, coeffs, e, sigma, slice_parts, injected, has_data):
    """Zero the residual slice at e + sigma with a coefficient at t^e."""
    n = spec.n
    qmax_rhs = max(slice_parts) if slice_parts else 0
    deg_rhs = max((p.degree() for p in slice_parts.values()), default=0)
    deg_inj = injected.degree() if injected is not None else 0

    last_exc = None
    for q_extra in range(0, spec.m + 1):
        for d_extra in (0, 2, 4):
            try:
                return _try_level(spec, coeffs, e, sigma, slice_parts,
                                  injected, has_data,
                                  qtop=qmax_rhs + q_extra,
                                  dtop=max(deg_rhs, deg_inj) + d_extra)
            except InconsistentSystemError as exc:
                last_exc = exc
    raise CompatibilityError(
        e, f"resonance at exponent {frac_str(e)}: the level data cannot be "
           "matched by any coefficient (compatibility failure)") from last_exc


def _try_level(spec, coeffs, e, sigma, slice_parts, injected, has_data,
               qtop, dtop):
    n = spec.n
    monos = _monomials(n, dtop)
    mono_pos = {al: i for i, al in enumerate(monos)}
    nm = len(monos)
    dim = (qtop + 1) * nm

    columns = []
    row_index = {}
    rows_out = []

    def row_of(q, al):
        key = (q, al)
        if key not in row_index:
            row_index[key] = len(rows_out)
            rows_out.append(key)
            for col in columns:
                col.append(QQi.of(0))
        return row_index[key]

    # prime rows with the rhs support so the system always covers it
    for q, poly in slice_parts.items():
        for al, _c in poly.sorted_items():
            row_of(q, al)

    for q in range(qtop + 1):
        for al in monos:
            col = [QQi.of(0)] * len(rows_out)
            columns.append(col)
            parts = _basis_probe(spec, coeffs, e, sigma, q, al, n, dtop)
            for q2, poly in parts.items():
                for al2, c in poly.sorted_items():
                    r = row_of(q2, al2)
                    col[r] = col[r] + c

    nrows = len(rows_out)
    mat = [[columns[c][r] for c in range(dim)] for r in range(nrows)]
    rhs = [QQi.of(0)] * nrows
    for q, poly in slice_parts.items():
        for al, c in poly.sorted_items():
            rhs[row_index[(q, al)]] = -c

    sol, free = solve_linear_system(mat, rhs, ncols=dim)

    resonant = bool(free)
    if resonant and not has_data:
        raise MissingResonanceDataError(
            e, f"resonant exponent {frac_str(e)}: supply the arbitrary "
               "coefficient through resonance_data")

    w_parts = {}
    for q in range(qtop + 1):
        coeffs_q = {}
        for al in monos:
            c = sol[q * nm + mono_pos[al]]
            if not c.is_zero():
                coeffs_q[al] = c
        if coeffs_q:
            w_parts[q] = XPoly(n, dtop, coeffs_q)

    if injected is not None:
        if not resonant:
            raise ConfigurationError(
                f"resonance data prescribed at exponent {frac_str(e)}, but "
                "that level is not resonant")
        inj = injected if injected.n == n else None
        if inj is None:
            raise ConfigurationError("resonance data has wrong x-dimension")
        # injected coefficient must be annihilated by the indicial map
        probe = LogSeries(n, max(dtop, inj.degree()), INF,
                          {(Fraction(e), 0): inj.assume_exact(max(dtop, inj.degree()))})
        img = _apply_linearization(spec, coeffs, probe).part_at(Fraction(e) + sigma)
        if any(not p.is_zero() for p in img.values()):
            raise CompatibilityError(
                e, f"resonance data at exponent {frac_str(e)} is not "
                   "annihilated by the indicial operator")
        base = w_parts.get(0, XPoly.zero(n, dtop))
        w_parts[0] = base + inj.assume_exact(dtop) if inj.max_deg <= dtop \
            else base.assume_exact(inj.max_deg) + inj

    w = LogSeries(n, max((p.max_deg for p in w_parts.values()), default=dtop),
                  INF,
                  {(Fraction(e), q): p.assume_exact(
                      max((pp.max_deg for pp in w_parts.values()), default=dtop))
                   for q, p in w_parts.items()})
    info = {
        "exponent": e,
        "resonant": resonant,
        "kernel_dimension": len(free) if resonant else 0,
        "injected": injected is not None,
    }
    return w, info
