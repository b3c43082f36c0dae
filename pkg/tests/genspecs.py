"""Random equation specs that are solvable by construction.

Each draw fixes a target leading value A0 and an exponent l, builds one
critical monomial mu0 whose coefficient is back-solved so that A0 satisfies
the leading-coefficient equation, then adds noise terms kept strictly off the
critical balance (delta >= 1 by choosing the t-power high enough).
"""

import random
from dataclasses import dataclass
from fractions import Fraction

from logsing.leading import beta
from logsing.scalar import QQi, frac_str


A0_POOL = [QQi.of(1), QQi.of(-1), QQi.of(2), QQi.of(-2),
           QQi.of(Fraction(1, 2)), QQi.of(Fraction(-3, 2)),
           QQi(Fraction(0), Fraction(1)), QQi.of(3)]


@dataclass
class GenSpec:
    text: str
    m: int
    l: int
    n: int
    A0: QQi
    k0: int
    mu0_slots: tuple


def _scalar_text(c: QQi) -> str:
    if c.im == 0:
        return f"({frac_str(c.re)})"
    if c.re == 0:
        return f"({frac_str(c.im)}*i)"
    return f"({frac_str(c.re)} + {frac_str(c.im)}*i)"


def _slot_text(j, alpha):
    out = f"D[t,{j}]"
    for i, e in enumerate(alpha):
        if e:
            out += f"D[x{i + 1},{e}]"
    return out + "(u)"


def _term_text(coeff: QQi, k: int, slots: dict) -> str:
    parts = [_scalar_text(coeff)]
    if k == 1:
        parts.append("t")
    elif k > 1:
        parts.append(f"t^{k}")
    for (j, alpha), mult in sorted(slots.items()):
        s = _slot_text(j, alpha)
        parts.append(s if mult == 1 else f"{s}^{mult}")
    return "*".join(parts)


def _nonzero_scalar(rng) -> QQi:
    while True:
        c = QQi(Fraction(rng.randint(-3, 3)), Fraction(0))
        if rng.random() < 0.2:
            c = QQi(c.re, Fraction(rng.choice([-1, 1])))
        if not c.is_zero():
            return c


def gen_spec(rng: random.Random, m_max=4, allow_x=True) -> GenSpec:
    while True:
        m = rng.randint(2, m_max)
        l = rng.randint(0, m - 2)
        n = rng.randint(0, 1) if allow_x else 0

        # critical monomial: pure time slots of order above l
        p = rng.choice([2, 3])
        choices = list(range(l + 1, m))
        slots = {}
        gamma = 0
        for _ in range(p):
            j = rng.choice(choices)
            key = (j, (0,) * n)
            slots[key] = slots.get(key, 0) + 1
            gamma += j
        k0 = gamma - m - l * (p - 1)
        if k0 < 0:
            continue

        A0 = rng.choice(A0_POOL)
        prod = QQi.of(1)
        for (j, _alpha), mult in slots.items():
            prod = prod * QQi.of(beta(j, l) ** mult)
        # c * prod(beta) * A0^(p-1) = beta(m, l)
        c = QQi.of(beta(m, l)) / (prod * A0 ** (p - 1))

        terms = [_term_text(c, k0, slots)]

        # noise terms at delta >= 1
        for _ in range(rng.randint(0, 3)):
            kind = rng.random()
            if kind < 0.35:
                # pure forcing
                k = rng.randint(0, 3)
                terms.append(_term_text(_nonzero_scalar(rng), k, {}))
                continue
            q = rng.choice([1, 1, 2])
            noise = {}
            gam = 0
            tot = 0
            for _ in range(q):
                j = rng.randint(0, m - 1)
                max_a = m - j
                a = rng.randint(0, min(max_a, 2)) if (allow_x and n) else 0
                alpha = (a,) if n else ()
                key = (j, alpha)
                noise[key] = noise.get(key, 0) + 1
                gam += j
                tot += 1
            # delta = m - l + k - gamma + l*, require >= 1
            k_min = 1 - (m - l) + gam - l * tot
            same = noise == slots
            if same:
                k_min = max(k_min, k0 + 1)
            k = max(0, k_min) + rng.randint(0, 2)
            terms.append(_term_text(_nonzero_scalar(rng), k, noise))

        text = f"D[t,{m}](u) = " + " + ".join(terms)
        return GenSpec(text=text, m=m, l=l, n=n, A0=A0, k0=k0,
                       mu0_slots=tuple(sorted(slots.items())))
