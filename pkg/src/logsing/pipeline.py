"""End-to-end runs: parse, analyze, leading root, reduce, solve, certify.

Input text is the equation language of ``grammar``, optionally preceded by a
header of ``name = value`` assignments (order, max_deg, root_index, b,
resonance_policy, n, mode, lead, resonance[rho]).  Every command returns a
plain JSON-ready document; ``to_json`` renders it canonically so identical
runs are byte-identical, and ``render_human`` produces the aligned text view.

Working precision is chosen here.  The time window runs to K + m so the
residual check has m orders of slack (differentiating by t^m costs exactly
that much trust), and when spatial derivatives occur in any slot the working
x-degree is padded by m + max|alpha| * (window - 1), the worst-case number of
degree-lowering steps a coefficient can undergo before it is reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import majorant as mj
from .analysis import AnalysisReport, check_assumptions
from .equation import PDESpec
from .errors import (AssumptionError, CertificationError, ConfigurationError,
                     EquationSyntaxError)
from .examples import BUILTIN, get_example, list_examples
from .fuchsian import (ReducedEquation, assemble_u, reduce, residual,
                       solve_depth, solve_formal)
from .grammar import parse_equation, parse_poly, parse_series
from .leading import build_leading_equation, solve_leading
from .prescribed import solve_prescribed
from .scalar import INF, frac_str
from .series import LogSeries, SeriesConfig
from .xpoly import XPoly

VERSION = "1"

HEADER_KEYS = ("order", "max_deg", "root_index", "b", "resonance_policy",
               "n", "mode", "lead")


@dataclass
class RunOptions:
    order: int = 12
    max_deg: int = 8
    root_index: int = 0
    b_source: str = None
    resonance_policy: str = "error"
    n: int = None
    mode: str = None               # None = from input, "series"/"prescribed"
    lead: str = None
    resonance_data: dict = field(default_factory=dict)  # Fraction -> source

    def validated(self):
        if self.order < 1:
            raise ConfigurationError("order must be at least 1")
        if self.max_deg < 0:
            raise ConfigurationError("max_deg must be nonnegative")
        if self.resonance_policy not in ("error", "frobenius"):
            raise ConfigurationError(
                "resonance_policy must be 'error' or 'frobenius'")
        if self.mode not in (None, "series", "prescribed"):
            raise ConfigurationError("mode must be 'series' or 'prescribed'")
        return self


def split_input(text: str):
    """Separate header assignments from the equation line.

    Lines before the equation have the form ``name = value``; the equation
    is the unique line whose left-hand side is an operator application
    (starts with ``D[``).  ``#`` starts a comment.
    """
    header = {}
    equation = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("D["):
            if equation is not None:
                raise EquationSyntaxError("more than one equation line",
                                          line=lineno, col=1)
            equation = line
            continue
        if "=" not in line:
            raise EquationSyntaxError(
                f"expected 'name = value' or an equation, got {line!r}",
                line=lineno, col=1)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        base = key.split("[", 1)[0]
        if base not in HEADER_KEYS and base != "resonance":
            raise EquationSyntaxError(f"unknown setting {key!r}",
                                      line=lineno, col=1)
        if not value:
            raise EquationSyntaxError(f"empty value for {key!r}",
                                      line=lineno, col=1)
        header[key] = value
    if equation is None:
        raise EquationSyntaxError("no equation line found (expected one "
                                  "line starting with 'D[')", line=1, col=1)
    return header, equation


def options_from_header(header: dict, base: RunOptions = None) -> RunOptions:
    opts = replace(base) if base is not None else RunOptions()
    opts.resonance_data = dict(opts.resonance_data)
    for key, value in header.items():
        if key.startswith("resonance["):
            if not key.endswith("]"):
                raise ConfigurationError(f"malformed setting {key!r}")
            expo = Fraction(key[len("resonance["):-1])
            opts.resonance_data[expo] = value
        elif key in ("order", "max_deg", "root_index", "n"):
            setattr(opts, key if key != "n" else "n", int(value))
        elif key == "b":
            opts.b_source = value
        elif key in ("resonance_policy", "mode", "lead"):
            setattr(opts, key, value)
    return opts.validated()


def apply_overrides(opts: RunOptions, overrides: dict = None) -> RunOptions:
    """Explicit flags win over file-header settings; None means unset."""
    if not overrides:
        return opts
    opts = replace(opts)
    opts.resonance_data = dict(opts.resonance_data)
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "resonance_data":
            for expo, src in value.items():
                opts.resonance_data[Fraction(expo)] = src
        elif hasattr(opts, key):
            setattr(opts, key, value)
        else:
            raise ConfigurationError(f"unknown option {key!r}")
    return opts.validated()


# -- configuration ------------------------------------------------------------

def working_config(spec: PDESpec, opts: RunOptions, extra_degs=()) -> SeriesConfig:
    window = opts.order + spec.m
    amax = spec.max_slot_alpha()
    if amax > 0:
        deg = opts.max_deg + spec.m + amax * (window - 1)
    else:
        deg = max(opts.max_deg, spec.max_deg_native, *extra_degs) \
            if extra_degs else max(opts.max_deg, spec.max_deg_native)
    return SeriesConfig(spec.n, deg, Fraction(window))


def _parse_spec(text_or_equation: str, overrides: dict = None):
    header, eq_src = split_input(text_or_equation)
    opts = options_from_header(header, RunOptions())
    opts = apply_overrides(opts, overrides)
    spec = parse_equation(eq_src, n=opts.n)
    return spec, opts


# -- documents ----------------------------------------------------------------

def _equation_doc(spec: PDESpec):
    return {
        "printed": str(spec),
        "m": spec.m,
        "n": spec.n,
        "weights": [
            {"mu": row["mu"], "order": row["total"],
             "gamma": frac_str(row["gamma"]),
             "k_mu": frac_str(row["k_mu"]), "x_order": row["x_order"]}
            for row in spec.weights_table()],
    }


def _wrap(command: str, body: dict) -> dict:
    doc = {"version": VERSION, "command": command}
    doc.update(body)
    return doc


def cmd_analyze(text: str, overrides: dict = None) -> dict:
    spec, opts = _parse_spec(text, overrides)
    report = check_assumptions(spec)
    return _wrap("analyze", {
        "equation": _equation_doc(spec),
        "analysis": report.to_doc(),
    })


def _series_report_view(u: LogSeries, opts: RunOptions, order=None):
    """Clip a solved series to the user-requested window for reporting."""
    top = Fraction(opts.order if order is None else order)
    view = u.truncated(t_order=min(top, u.t_order) if u.t_order != INF else top)
    if view.max_deg != INF and view.max_deg > opts.max_deg:
        view = view.truncated(max_deg=opts.max_deg)
    return view


@dataclass
class SolveArtifacts:
    spec: PDESpec
    opts: RunOptions
    report: AnalysisReport
    red: ReducedEquation = None
    result: object = None
    u: LogSeries = None
    residual_report: object = None
    leading_info: dict = None
    prescribed: object = None


def _solve_series(spec: PDESpec, opts: RunOptions) -> SolveArtifacts:
    report = check_assumptions(spec)
    if not report.all_hold():
        failed = ", ".join(report.failed_assumptions())
        notes = "; ".join(report.diagnostics)
        raise AssumptionError(
            f"assumptions fail ({failed})" + (f": {notes}" if notes else ""))
    b_deg = 0
    if opts.b_source:
        b_probe = parse_poly(opts.b_source, n=spec.n)
        b_deg = b_probe.degree()
    cfg = working_config(spec, opts, extra_degs=(b_deg,))
    eq = build_leading_equation(spec, report)
    a, info = solve_leading(eq, root_index=opts.root_index, max_deg=cfg.max_deg)
    b = parse_poly(opts.b_source, n=spec.n, max_deg=cfg.max_deg) \
        if opts.b_source else XPoly.zero(spec.n, cfg.max_deg)
    red = reduce(spec, report, a, b, cfg)
    result = solve_formal(red, opts.order, resonance_policy=opts.resonance_policy)
    u = result.u
    if result.v.is_zero():
        # the two-term solution is exact; certify with no truncation at all
        exact_cfg = SeriesConfig(spec.n, cfg.max_deg, INF)
        head = LogSeries.monomial(0, 1, a, exact_cfg) \
            + LogSeries.monomial(0, 0, b, exact_cfg)
        u = head.shift_t(red.op.l)
    res = residual(spec, u, K=opts.order)
    if not res.certifies(opts.order):
        raise CertificationError(
            f"residual valuation {frac_str(res.valuation)} does not clear "
            f"the requested order {opts.order}")
    return SolveArtifacts(spec=spec, opts=opts, report=report, red=red,
                          result=result, u=u, residual_report=res,
                          leading_info=info)


def _solve_prescribed(spec: PDESpec, opts: RunOptions) -> SolveArtifacts:
    if not opts.lead:
        raise ConfigurationError(
            "prescribed mode needs a 'lead' series in the header or options")
    u_lead = parse_series(opts.lead, n=spec.n, max_deg=opts.max_deg)
    data = {}
    for expo, src in opts.resonance_data.items():
        data[Fraction(expo)] = parse_poly(src, n=spec.n, max_deg=opts.max_deg)
    report = check_assumptions(spec)
    pres = solve_prescribed(spec, u_lead, data, K=opts.order)
    return SolveArtifacts(spec=spec, opts=opts, report=report,
                          u=pres.u, prescribed=pres)


def run_solve(text: str, overrides: dict = None) -> SolveArtifacts:
    spec, opts = _parse_spec(text, overrides)
    mode = opts.mode or ("prescribed" if opts.lead else "series")
    if mode == "prescribed":
        return _solve_prescribed(spec, opts)
    return _solve_series(spec, opts)


def _solve_doc(art: SolveArtifacts) -> dict:
    spec, opts = art.spec, art.opts
    if art.prescribed is not None:
        pres = art.prescribed
        body = {
            "mode": "prescribed",
            "equation": _equation_doc(spec),
            "config": {"order": opts.order, "max_deg": opts.max_deg},
            "prescribed": pres.to_doc(),
            "series": pres.u.to_doc(),
            "resonances": [frac_str(e) for e in pres.resonances],
            "residual": {"valuation": frac_str(pres.residual_valuation)},
        }
        return body
    res = art.result
    info = art.leading_info
    body = {
        "mode": "series",
        "equation": _equation_doc(spec),
        "analysis": art.report.to_doc(),
        "config": {
            "order": opts.order,
            "max_deg": opts.max_deg,
            "window_t_order": frac_str(art.red.cfg.t_order),
            "window_max_deg": art.red.cfg.max_deg,
            "root_index": opts.root_index,
            "resonance_policy": opts.resonance_policy,
        },
        "leading": {
            "roots": [str(r) for r in info["roots"]],
            "root_index": info["root_index"],
            "exact": info["exact"],
            "a": art.red.a.to_doc(),
            "defect_bound": frac_str(info["defect_bound"]),
        },
        "series": _series_report_view(art.u, opts).to_doc(),
        "resonances": res.to_doc()["resonances"],
        "residual": {
            "valuation": frac_str(art.residual_report.valuation),
            "trusted_t_order": frac_str(art.residual_report.trusted_t_order),
            "trusted_x_deg": ("inf"
                              if art.residual_report.trusted_x_deg == INF
                              else art.residual_report.trusted_x_deg),
            "certified_order": opts.order,
        },
    }
    return body


def cmd_solve(text: str, overrides: dict = None) -> dict:
    art = run_solve(text, overrides)
    return _wrap("solve", _solve_doc(art))


def cmd_verify(text: str, overrides: dict = None) -> dict:
    art = run_solve(text, overrides)
    body = _solve_doc(art)
    if art.prescribed is not None:
        pres = art.prescribed
        val = pres.residual_valuation
        # levels through v0+K control residual slices through v0+K+sigma
        target = pres.base_exponent + art.opts.order + pres.sigma
        certified = val == INF or val > target
        body["verification"] = {
            "certified": bool(certified),
            "order": frac_str(target),
            "residual_valuation": frac_str(val),
            "exact_arithmetic": True,
        }
    else:
        rep = art.residual_report
        body["verification"] = {
            "certified": rep.certifies(art.opts.order),
            "order": art.opts.order,
            "residual_valuation": frac_str(rep.valuation),
            "trusted_t_order": frac_str(rep.trusted_t_order),
            "exact_arithmetic": True,
        }
    return _wrap("verify", body)


def cmd_majorant(text: str, overrides: dict = None,
                 R=Fraction(1), r=Fraction(1, 2)) -> dict:
    art = run_solve(text, overrides)
    if art.prescribed is not None:
        raise ConfigurationError(
            "majorant certificates apply to the log-series mode only")
    opts = art.opts
    K = opts.order
    components, _ = solve_depth(art.red, K,
                                resonance_policy=opts.resonance_policy)
    params = mj.derive_params(art.red, components[0], R, r, K)
    seq = mj.majorant_sequence(params, K)
    seq.radius = mj.radius_estimate(seq, params)
    verification = mj.verify_majorant(components, seq, params,
                                      art.spec.m, art.spec.n)
    # the scaled sequence must not depend on the inner radius
    alt = replace(params, r=Fraction(R, 3))
    alt_seq = mj.majorant_sequence(alt, K)
    cross = alt_seq.C == seq.C
    body = _solve_doc(art)
    body["majorant"] = {
        "params": params.to_doc(),
        "sequence": seq.to_doc(),
        "radius": frac_str(seq.radius),
        "verification": verification,
        "cross_check": {
            "r_values": [frac_str(params.r), frac_str(alt.r)],
            "scaled_sequence_agrees": cross,
        },
    }
    if not cross:
        raise CertificationError(
            "scaled majorant sequence depends on the working radius")
    return _wrap("majorant", body)


def cmd_examples() -> dict:
    return _wrap("examples", {"examples": list_examples()})


def example_input_text(name: str) -> str:
    """Render a built-in example as a runnable input document."""
    ex = get_example(name)
    lines = [f"# {ex.name}: {ex.title}"]
    lines.append(f"order = {ex.order}")
    lines.append(f"max_deg = {ex.max_deg}")
    if ex.mode == "prescribed":
        lines.append("mode = prescribed")
        lines.append(f"lead = {ex.lead}")
        for expo, value in ex.resonance_data:
            lines.append(f"resonance[{frac_str(expo)}] = {value}")
    else:
        lines.append(f"root_index = {ex.root_index}")
        lines.append(f"resonance_policy = {ex.resonance_policy}")
    lines.append(f"n = {ex.n}")
    lines.append(ex.source)
    return "\n".join(lines) + "\n"


# -- rendering ----------------------------------------------------------------

def to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _poly_text(coeff_doc, n) -> str:
    poly = XPoly.from_doc(coeff_doc, n, INF)
    return str(poly)


def _series_rows(series_doc):
    n = series_doc["n"]
    rows = []
    for term in series_doc["terms"]:
        rho, q = term["rho"], term["logpow"]
        coeff = _poly_text(term["coeff"], n)
        if " + " in coeff:
            coeff = f"({coeff})"
        factors = [coeff]
        if rho != "0":
            factors.append("t" if rho == "1" else f"t^{rho}")
        if q == 1:
            factors.append("log t")
        elif q > 1:
            factors.append(f"log^{q} t")
        rows.append((Fraction(rho), q, " · ".join(factors)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return [r[2] for r in rows]


def render_human(doc: dict) -> str:
    out = []
    push = out.append
    cmd = doc.get("command")
    if cmd == "examples":
        push("built-in examples:")
        for ex in doc["examples"]:
            push(f"  {ex['name']:<16} {ex['title']}")
            push(f"  {'':<16} {ex['source']}")
        return "\n".join(out) + "\n"
    if "equation" in doc:
        push(f"equation: {doc['equation']['printed']}")
    if "analysis" in doc:
        ana = doc["analysis"]
        push(f"characteristic exponent: {ana['sigma_c']}"
             f"   leading power l: {ana['l']}")
        flags = {k: ana[k] for k in
                 ("a0_holds", "a1_holds", "a2_holds", "a3_holds")}
        push("assumptions: " + ("all hold" if all(flags.values())
             else "FAIL (" + ", ".join(k[:2].upper()
                                       for k, v in flags.items() if not v)
             + ")"))
        if ana.get("m0"):
            push("dominant indices: " + "; ".join(ana["m0"]))
        for note in ana.get("diagnostics", []):
            push(f"note: {note}")
    if "leading" in doc:
        lead = doc["leading"]
        roots = ", ".join(lead["roots"])
        push(f"leading roots: [{roots}]   chosen index: {lead['root_index']}"
             + ("" if lead["exact"] else "   (numeric approximation)"))
        push(f"a(x) = {_poly_text(lead['a'], doc['equation']['n'])}")
    if "prescribed" in doc:
        pres = doc["prescribed"]
        push(f"prescribed lead exponent: {pres['base_exponent']}"
             f"   linearization shift: {pres['sigma']}")
    if "series" in doc:
        push("series:")
        rows = _series_rows(doc["series"])
        if not rows:
            push("  0")
        for row in rows:
            push(f"  {row}")
    if doc.get("resonances"):
        for r in doc["resonances"]:
            if isinstance(r, str):
                push(f"resonance at t^{r}")
            else:
                bits = [f"resonance at t^{r['exponent']}"]
                if r.get("action"):
                    bits.append(r["action"])
                push("  ".join(bits))
    if "residual" in doc:
        res = doc["residual"]
        line = f"residual valuation: {res['valuation']}"
        if "certified_order" in res:
            line += f"   (certified through order {res['certified_order']})"
        push(line)
    if "verification" in doc:
        ver = doc["verification"]
        push("verification: " + ("PASS" if ver["certified"] else "FAIL")
             + f"   residual valuation {ver['residual_valuation']}"
             + f" at order {ver['order']}")
    if "majorant" in doc:
        maj = doc["majorant"]
        push(f"majorant radius estimate: {maj['radius']}")
        seq = maj["sequence"]
        push("scaled majorant coefficients: " + ", ".join(seq["C"]))
        ver = maj["verification"]
        push("component bounds: "
             + ("all hold" if ver["all_bounds_hold"] else "VIOLATED")
             + f" through depth {ver['orders_checked']}")
        push("cross-check at two radii: "
             + ("agree" if maj["cross_check"]["scaled_sequence_agrees"]
                else "DISAGREE"))
        for flag in ver["flags"]:
            push(f"caveat: {flag}")
    return "\n".join(out) + "\n"
