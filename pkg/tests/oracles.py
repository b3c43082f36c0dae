"""Naive reference implementations used to derive and check expected values.

Everything here is written directly on dictionaries with Fraction entries,
independent of the package's ring classes, so tests can compare the two.
Complex rationals are (re, im) Fraction pairs; polynomials in x are
dicts alpha-tuple -> complex pair; log-power series are dicts
(rho: Fraction, q: int) -> polynomial.
"""

from fractions import Fraction

# -- complex rationals as plain pairs -----------------------------------------

CZERO = (Fraction(0), Fraction(0))


def c_of(re, im=0):
    return (Fraction(re), Fraction(im))


def c_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def c_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def c_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def c_div(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    if n == 0:
        raise ZeroDivisionError
    return ((a[0] * b[0] + a[1] * b[1]) / n, (a[1] * b[0] - a[0] * b[1]) / n)


def c_scale(a, f):
    f = Fraction(f)
    return (a[0] * f, a[1] * f)


def c_is_zero(a):
    return a[0] == 0 and a[1] == 0


# -- multivariate polynomials: dict alpha -> pair ------------------------------

def p_zero():
    return {}


def p_const(re, im=0, n=0):
    c = c_of(re, im)
    return {} if c_is_zero(c) else {(0,) * n: c}


def p_clean(p):
    return {a: c for a, c in p.items() if not c_is_zero(c)}


def p_add(p, q):
    out = dict(p)
    for a, c in q.items():
        out[a] = c_add(out.get(a, CZERO), c)
    return p_clean(out)


def p_neg(p):
    return {a: c_sub(CZERO, c) for a, c in p.items()}


def p_mul(p, q):
    out = {}
    for a1, c1 in p.items():
        for a2, c2 in q.items():
            a = tuple(x + y for x, y in zip(a1, a2)) if a1 else a2
            out[a] = c_add(out.get(a, CZERO), c_mul(c1, c2))
    return p_clean(out)


def p_scale(p, f):
    return p_clean({a: c_scale(c, f) for a, c in p.items()})


def p_truncate(p, max_deg):
    return {a: c for a, c in p.items() if sum(a) <= max_deg}


def p_dx(p, i):
    """d/dx_i; i is 1-based."""
    out = {}
    for a, c in p.items():
        e = a[i - 1]
        if e == 0:
            continue
        a2 = a[:i - 1] + (e - 1,) + a[i:]
        out[a2] = c_add(out.get(a2, CZERO), c_scale(c, e))
    return p_clean(out)


# -- log-power series: dict (rho, q) -> polynomial -----------------------------

def s_zero():
    return {}


def s_clean(s):
    return {k: p for k, p in s.items() if p_clean(p)}


def s_term(rho, q, poly):
    return s_clean({(Fraction(rho), q): poly})


def s_add(s1, s2):
    out = dict(s1)
    for k, p in s2.items():
        out[k] = p_add(out.get(k, {}), p)
    return s_clean(out)


def s_neg(s):
    return {k: p_neg(p) for k, p in s.items()}


def s_mul(s1, s2):
    out = {}
    for (r1, q1), p1 in s1.items():
        for (r2, q2), p2 in s2.items():
            k = (r1 + r2, q1 + q2)
            out[k] = p_add(out.get(k, {}), p_mul(p1, p2))
    return s_clean(out)


def s_scale(s, f):
    return s_clean({k: p_scale(p, f) for k, p in s.items()})


def s_dt(s):
    """d/dt on sum a(x) t^rho log^q t."""
    out = {}
    for (rho, q), p in s.items():
        k1 = (rho - 1, q)
        out[k1] = p_add(out.get(k1, {}), p_scale(p, rho))
        if q > 0:
            k2 = (rho - 1, q - 1)
            out[k2] = p_add(out.get(k2, {}), p_scale(p, q))
    return s_clean(out)


def s_theta(s):
    """t d/dt."""
    out = {}
    for (rho, q), p in s.items():
        k1 = (rho, q)
        out[k1] = p_add(out.get(k1, {}), p_scale(p, rho))
        if q > 0:
            k2 = (rho, q - 1)
            out[k2] = p_add(out.get(k2, {}), p_scale(p, q))
    return s_clean(out)


def s_dx(s, i):
    return s_clean({k: p_dx(p, i) for k, p in s.items()})


def s_dt_pow(s, j):
    for _ in range(j):
        s = s_dt(s)
    return s


def s_pow(s, e):
    out = None
    for _ in range(e):
        out = s if out is None else s_mul(out, s)
    return out if out is not None else {}


def s_valuation(s):
    s = s_clean(s)
    return min((k[0] for k in s), default=None)


def s_slice(s, rho):
    """dict q -> polynomial at exponent rho."""
    return {q: p for (r, q), p in s_clean(s).items() if r == rho}


# -- equation residual by direct substitution ----------------------------------

def residual_of(m, n, terms, series):
    """d_t^m u - sum f_mu prod slots, everything naive.

    terms: list of (mu_items, coeff_powers) where mu_items is a list of
    ((j, alpha), mult) and coeff_powers maps t-power -> polynomial.
    """
    res = s_dt_pow(series, m)
    for mu_items, coeff_powers in terms:
        coeff = s_zero()
        for power, poly in coeff_powers.items():
            coeff = s_add(coeff, s_term(Fraction(power), 0, poly))
        prod = coeff
        for (j, alpha), mult in mu_items:
            slot = s_dt_pow(series, j)
            for i, e in enumerate(alpha, start=1):
                for _ in range(e):
                    slot = s_dx(slot, i)
            for _ in range(mult):
                prod = s_mul(prod, slot)
        res = s_add(res, s_neg(prod))
    return s_clean(res)


# -- closed forms for derivative bookkeeping -----------------------------------

def falling_oracle(rho, j):
    out = Fraction(1)
    for i in range(j):
        out *= Fraction(rho) - i
    return out


def beta_oracle(j, l):
    import math
    assert j >= l + 1
    return Fraction((-1) ** (j - l - 1) * math.factorial(l)
                    * math.factorial(j - l - 1))


def b_lower_oracle(j, l):
    b = Fraction(0)
    for i in range(j):
        b = falling_oracle(l, i) + (l - i) * b
    return b
