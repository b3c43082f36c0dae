"""Gaussian-rational scalar layer."""

import random
from fractions import Fraction

import pytest

from logsing.errors import ConfigurationError
from logsing.scalar import INF, QQi, frac_str, parse_frac

import oracles as orc


def rand_frac(rng, span=8):
    return Fraction(rng.randint(-span, span), rng.randint(1, span))


def rand_qqi(rng):
    return QQi(rand_frac(rng), rand_frac(rng))


def as_pair(z):
    return (z.re, z.im)


def test_ring_ops_match_naive_reference():
    rng = random.Random(20240521)
    for _ in range(300):
        a, b = rand_qqi(rng), rand_qqi(rng)
        assert as_pair(a + b) == orc.c_add(as_pair(a), as_pair(b))
        assert as_pair(a - b) == orc.c_sub(as_pair(a), as_pair(b))
        assert as_pair(a * b) == orc.c_mul(as_pair(a), as_pair(b))
        if not b.is_zero():
            assert as_pair(a / b) == orc.c_div(as_pair(a), as_pair(b))


def test_field_axioms_random():
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (rand_qqi(rng) for _ in range(3))
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        if not a.is_zero():
            assert (b / a) * a == b


def test_division_by_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        QQi.of(1) / QQi.of(0)


def test_conjugate_and_norm():
    z = QQi(Fraction(3), Fraction(-4))
    assert z.conjugate() == QQi(Fraction(3), Fraction(4))
    assert z.norm2() == Fraction(25)
    assert (z * z.conjugate()).re == z.norm2()


def test_abs_bounds_bracket_modulus():
    # |re| + |im| >= |z| >= max(|re|, |im|)
    rng = random.Random(99)
    for _ in range(200):
        z = rand_qqi(rng)
        up, lo = z.abs_upper(), z.abs_lower()
        norm2 = z.norm2()
        assert up * up >= norm2
        assert lo * lo <= norm2
        assert up >= lo >= 0


def test_exact_sqrt_of_gaussian_squares():
    rng = random.Random(5)
    for _ in range(120):
        z = rand_qqi(rng)
        sq = z * z
        r = sq.sqrt()
        assert r is not None
        assert r * r == sq
    # -1 has the exact square root i
    r = QQi.of(-1).sqrt()
    assert r is not None and r * r == QQi.of(-1)


def test_sqrt_none_when_no_gaussian_root():
    assert QQi.of(2).sqrt() is None
    assert QQi.of(3).sqrt() is None
    assert QQi(Fraction(1), Fraction(1)).sqrt() is None  # sqrt(1+i) not in QQi


def test_sort_key_puts_positive_imaginary_first():
    i = QQi(Fraction(0), Fraction(1))
    roots = sorted([-i, i], key=lambda z: z.sort_key())
    assert roots[0] == i and roots[1] == -i
    vals = sorted([QQi.of(2), QQi.of(-1), i], key=lambda z: z.sort_key())
    assert vals == [QQi.of(-1), i, QQi.of(2)]


def test_text_round_trip():
    rng = random.Random(17)
    for _ in range(100):
        z = rand_qqi(rng)
        doc = z.to_doc()
        assert QQi.from_doc(doc) == z


def test_frac_str_and_parse_frac():
    assert frac_str(Fraction(3, 4)) == "3/4"
    assert frac_str(Fraction(-5)) == "-5"
    assert frac_str(INF) == "inf"
    assert parse_frac("inf") == INF
    assert parse_frac("-7/2") == Fraction(-7, 2)
