"""Log-power series ring with truncation bookkeeping."""

import random
from fractions import Fraction

import pytest

from logsing.equation import MuIndex
from logsing.errors import ConfigurationError
from logsing.scalar import INF, QQi
from logsing.series import LogSeries, SeriesConfig, compose_polynomial
from logsing.xpoly import XPoly

import oracles as orc


CFG0 = SeriesConfig(0, 0, Fraction(10))


def rand_series(rng, cfg, nterms=4, span=4):
    s = LogSeries.zero(cfg)
    for _ in range(nterms):
        rho = Fraction(rng.randint(-3, int(cfg.t_order)))
        q = rng.randint(0, 2)
        coeffs = {}
        alpha = tuple(rng.randint(0, 1) for _ in range(cfg.n))
        if sum(alpha) > cfg.max_deg:
            alpha = (0,) * cfg.n
        coeffs[alpha] = QQi(Fraction(rng.randint(-span, span)),
                            Fraction(rng.randint(-span, span)))
        s = s + LogSeries.monomial(rho, q, XPoly(cfg.n, cfg.max_deg, coeffs),
                                   cfg)
    return s


def as_naive(s):
    return {(t.rho, t.q): {a: (c.re, c.im) for a, c in t.coeff.coeffs.items()}
            for t in s.terms()}


def naive_clip(nv, t_order, max_deg):
    out = {}
    for (rho, q), p in nv.items():
        if rho > t_order:
            continue
        p2 = orc.p_truncate(p, max_deg)
        if orc.p_clean(p2):
            out[(rho, q)] = orc.p_clean(p2)
    return out


def test_add_mul_match_naive_reference():
    rng = random.Random(1001)
    for _ in range(80):
        n = rng.randint(0, 2)
        cfg = SeriesConfig(n, rng.randint(0, 3), Fraction(rng.randint(3, 7)))
        s1, s2 = rand_series(rng, cfg), rand_series(rng, cfg)
        assert as_naive(s1 + s2) == naive_clip(
            orc.s_add(as_naive(s1), as_naive(s2)), cfg.t_order, cfg.max_deg)
        assert as_naive(s1 * s2) == naive_clip(
            orc.s_mul(as_naive(s1), as_naive(s2)), cfg.t_order, cfg.max_deg)


def test_mul_is_window_quotient():
    # truncating sharper after a product equals truncating the factors first
    rng = random.Random(77)
    for _ in range(40):
        cfg = SeriesConfig(1, 3, Fraction(8))
        s1, s2 = rand_series(rng, cfg), rand_series(rng, cfg)
        if s1.valuation() < 0 or s2.valuation() < 0:
            continue  # quotient property needs nonnegative valuations
        low = Fraction(4)
        a = (s1 * s2).truncated(t_order=low)
        b = s1.truncated(t_order=low) * s2.truncated(t_order=low)
        assert a == b


def test_config_equality_enforced():
    c1 = SeriesConfig(1, 3, Fraction(5))
    c2 = SeriesConfig(1, 3, Fraction(6))
    s1 = LogSeries.const(QQi.of(1), c1)
    s2 = LogSeries.const(QQi.of(1), c2)
    with pytest.raises(ConfigurationError):
        _ = s1 + s2


def rand_exact(rng, cfg, nterms=4, span=4):
    s = LogSeries.zero(cfg)
    for _ in range(nterms):
        rho = Fraction(rng.randint(-3, 9))
        q = rng.randint(0, 2)
        c = QQi(Fraction(rng.randint(-span, span)),
                Fraction(rng.randint(-span, span)))
        s = s + LogSeries.monomial(rho, q, XPoly.one(cfg.n, cfg.max_deg),
                                   cfg).scale(c)
    return s


def test_dt_product_rule_exact():
    # Leibniz holds on untruncated series; truncated factors can lose cross
    # terms once log-derivatives lower the valuation
    rng = random.Random(3)
    cfg = SeriesConfig(0, 0, INF)
    for _ in range(40):
        s1, s2 = rand_exact(rng, cfg), rand_exact(rng, cfg)
        assert (s1 * s2).d_t() == s1.d_t() * s2 + s1 * s2.d_t()


def test_dt_matches_naive():
    rng = random.Random(12)
    for _ in range(60):
        cfg = SeriesConfig(1, 2, Fraction(7))
        s = rand_series(rng, cfg)
        want = naive_clip(orc.s_dt(as_naive(s)), cfg.t_order - 1, cfg.max_deg)
        assert as_naive(s.d_t()) == want


def test_theta_is_exact_and_matches_naive():
    rng = random.Random(13)
    for _ in range(60):
        cfg = SeriesConfig(0, 0, Fraction(7))
        s = rand_series(rng, cfg)
        th = s.theta()
        assert th.t_order == s.t_order  # theta loses no window
        assert as_naive(th) == orc.s_theta(as_naive(s))


def test_theta_eigenvector_on_powers():
    cfg = SeriesConfig(0, 0, Fraction(10))
    s = LogSeries.monomial(Fraction(5, 2), 0, XPoly.one(0, 0), cfg)
    assert s.theta() == s.scale(Fraction(5, 2))


def test_falling_apply_matches_operator_product():
    # [theta + l; j] as iterated (theta + l - i)
    rng = random.Random(21)
    for _ in range(40):
        cfg = SeriesConfig(0, 0, Fraction(6))
        s = rand_series(rng, cfg)
        l, j = rng.randint(0, 3), rng.randint(0, 4)
        got = s.falling_apply(l, j)
        want = as_naive(s)
        for i in range(j):
            stepped = orc.s_theta(want)
            want = orc.s_add(stepped, orc.s_scale(want, Fraction(l - i)))
        assert as_naive(got) == orc.s_clean(want)


def test_dt_window_bookkeeping():
    cfg = SeriesConfig(0, 0, Fraction(5))
    s = LogSeries.monomial(2, 1, XPoly.one(0, 0), cfg)
    assert s.d_t().t_order == Fraction(4)
    assert s.theta().t_order == Fraction(5)


def test_shift_t_moves_terms_and_window():
    cfg = SeriesConfig(0, 0, Fraction(5))
    s = LogSeries.monomial(2, 0, XPoly.one(0, 0), cfg)
    sh = s.shift_t(Fraction(-3))
    assert sh.t_order == Fraction(2)
    assert [(t.rho, t.q) for t in sh.terms()] == [(Fraction(-1), 0)]


def test_dx_matches_naive_and_drops_degree():
    rng = random.Random(8)
    for _ in range(40):
        cfg = SeriesConfig(2, 3, Fraction(6))
        s = rand_series(rng, cfg)
        i = rng.randint(1, 2)
        got = s.d_x(i)
        assert got.max_deg == 2
        want = naive_clip(orc.s_dx(as_naive(s), i), cfg.t_order, 2)
        assert as_naive(got) == want


def test_valuation_and_slices():
    cfg = SeriesConfig(0, 0, Fraction(9))
    s = LogSeries.monomial(-2, 0, XPoly.one(0, 0), cfg) \
        + LogSeries.monomial(3, 2, XPoly.one(0, 0), cfg)
    assert s.valuation() == Fraction(-2)
    assert s.max_exponent() == Fraction(3)
    assert s.max_log_power() == 2
    assert set(s.part_at(3)) == {2}
    assert LogSeries.zero(cfg).valuation() == INF


def test_terms_above_window_are_clipped():
    cfg = SeriesConfig(0, 0, Fraction(4))
    s = LogSeries.monomial(9, 0, XPoly.one(0, 0), cfg)
    assert s.is_zero()
    assert s.clipped


def test_serialization_bit_exact_round_trip():
    rng = random.Random(2024)
    import json
    for _ in range(40):
        n = rng.randint(0, 2)
        cfg = SeriesConfig(n, rng.randint(0, 3), Fraction(rng.randint(3, 9)))
        s = rand_series(rng, cfg)
        doc = s.to_doc()
        blob1 = json.dumps(doc, sort_keys=True)
        s2 = LogSeries.from_doc(json.loads(blob1))
        assert s2 == s
        assert json.dumps(s2.to_doc(), sort_keys=True) == blob1


def test_exact_series_round_trip_infinite_window():
    cfg = SeriesConfig(1, 2, INF)
    s = LogSeries.monomial(Fraction(-2), 0, XPoly.one(1, 2), cfg)
    doc = s.to_doc()
    assert doc["t_order"] == "inf"
    assert LogSeries.from_doc(doc) == s


def test_compose_polynomial_structural():
    # sum_mu f_mu prod slots^mult against the naive reference
    rng = random.Random(44)
    cfg = SeriesConfig(1, 2, Fraction(6))
    for _ in range(25):
        f = rand_series(rng, cfg, nterms=2)
        sl1 = rand_series(rng, cfg, nterms=2)
        sl2 = rand_series(rng, cfg, nterms=2)
        if min(sl1.valuation(), sl2.valuation(), f.valuation()) < 0:
            continue
        mu = MuIndex({(1, (0,)): 2, (0, (1,)): 1})
        got = compose_polynomial([(mu, f)],
                                 {(1, (0,)): sl1, (0, (1,)): sl2}, cfg)
        want = orc.s_mul(as_naive(f),
                         orc.s_mul(orc.s_pow(as_naive(sl1), 2),
                                   as_naive(sl2)))
        assert as_naive(got) == naive_clip(want, cfg.t_order, cfg.max_deg)


def test_compose_polynomial_missing_slot_rejected():
    cfg = SeriesConfig(0, 0, Fraction(4))
    f = LogSeries.const(QQi.of(1), cfg)
    with pytest.raises(ConfigurationError):
        compose_polynomial([(MuIndex({(1, ()): 1}), f)], {}, cfg)
