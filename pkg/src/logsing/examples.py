"""Built-in example equations.

One concrete instance of each supported equation family at the smallest
interesting parameters, plus the prescribed-expansion KdV pole.  Each entry
records the options a fresh run needs (root choice, resonance data) so the
command line can run them by name, and the regression tests freeze the
resulting reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigurationError
from .scalar import frac_str


@dataclass(frozen=True)
class Example:
    name: str
    title: str
    source: str
    n: int
    mode: str = "series"            # "series" or "prescribed"
    root_index: int = 0
    order: int = 12
    max_deg: int = 8
    resonance_policy: str = "error"
    lead: str = None                # prescribed mode only
    resonance_data: tuple = ()      # ((exponent, value-source), ...)
    notes: str = ""

    def to_doc(self):
        doc = {
            "name": self.name,
            "title": self.title,
            "source": self.source,
            "n": self.n,
            "mode": self.mode,
            "root_index": self.root_index,
            "order": self.order,
            "max_deg": self.max_deg,
            "resonance_policy": self.resonance_policy,
            "notes": self.notes,
        }
        if self.mode == "prescribed":
            doc["lead"] = self.lead
            doc["resonance_data"] = [
                {"exponent": frac_str(e), "value": v}
                for e, v in self.resonance_data]
        return doc


def wave_reduced_source(c: Fraction) -> str:
    """Quadratic wave equation u_ss = u_yy + (u_s)^2 behind the moving
    front s = c*y, rewritten in front-adapted coordinates t = s - c*y,
    x1 = y.  Requires c^2 != 1; the leading coefficient is -(1 - c^2).
    """
    c = Fraction(c)
    g = 1 - c * c
    if g == 0:
        raise ConfigurationError("characteristic speed: 1 - c^2 must not vanish")
    f1 = frac_str(Fraction(1) / g)
    f2 = frac_str(2 * c / g)
    return (f"D[t,2](u) = {f1}*D[t,1](u)^2 - {f2}*D[t,1]D[x1,1](u)"
            f" + {f1}*D[t,0]D[x1,2](u)")


_EXAMPLES = [
    Example(
        name="prototype",
        title="second-order ODE with squared first derivative",
        source="D[t,2](u) = D[t,1](u)^2",
        n=0,
        order=20,
        notes="leading root a = -1; the log term alone already solves the "
              "equation, so all corrections vanish",
    ),
    Example(
        name="prototype-pde",
        title="prototype with a mixed-derivative perturbation",
        source="D[t,2](u) = D[t,1](u)^2 + t*D[t,1]D[x1,1](u)^2",
        n=1,
        notes="the extra term has positive depth weight and does not touch "
              "the leading balance",
    ),
    Example(
        name="m3-l0",
        title="third-order equation, plain log leading term",
        source="D[t,3](u) = D[t,2](u)*D[t,1](u)",
        n=0,
        notes="leading root a = -2",
    ),
    Example(
        name="m3-cubic",
        title="third-order equation with cubed second derivative",
        source="D[t,3](u) = t*D[t,2](u)^3",
        n=0,
        notes="leading equation A^2 + 1 = 0; root 0 is a = i, so the series "
              "is genuinely complex",
    ),
    Example(
        name="m4-l0",
        title="fourth-order equation, plain log leading term",
        source="D[t,4](u) = D[t,3](u)*D[t,1](u)",
        n=0,
        notes="leading root a = -3",
    ),
    Example(
        name="m4-l1",
        title="fourth-order equation with an undifferentiated factor",
        source="D[t,4](u) = D[t,3](u)^2*D[t,0](u)"
               " + D[t,2](u)*D[t,1](u)*D[t,0]D[x1,1](u)",
        n=1,
        notes="the u factor in the dominant term carries no time "
              "derivative, so the construction's hypotheses fail; analyze "
              "reports the violation",
    ),
    Example(
        name="m4-l2",
        title="fourth-order equation with squared third derivative",
        source="D[t,4](u) = D[t,3](u)^2 + D[t,1]D[x1,1](u)^2",
        n=1,
        notes="leading root a = -1/2 with t^2 log t leading term",
    ),
    Example(
        name="wave-quadratic",
        title="quadratic wave equation behind the front s = y/2",
        source=wave_reduced_source(Fraction(1, 2)),
        n=1,
        order=8,
        notes="front-adapted coordinates t = s - y/2, x1 = y; leading "
              "coefficient -(1 - c^2) = -3/4",
    ),
    Example(
        name="kdv-laurent",
        title="KdV pole expansion with prescribed double-pole lead",
        source="D[t,3](u) = 6*D[t,0](u)*D[t,1](u) - D[t,0]D[x1,1](u)",
        n=1,
        mode="prescribed",
        order=8,
        lead="2*t^(-2)",
        resonance_data=((Fraction(2), "x1"), (Fraction(4), "0")),
        notes="free data g = x1 enters at t^2 and h = 0 at t^4; the t^5 "
              "coefficient is then forced to -g_x/24 = -1/24",
    ),
]

BUILTIN = {ex.name: ex for ex in _EXAMPLES}


def get_example(name: str) -> Example:
    try:
        return BUILTIN[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN))
        raise ConfigurationError(f"unknown example '{name}'; known: {known}")


def list_examples():
    return [ex.to_doc() for ex in _EXAMPLES]
