"""Equation text parser.

One tokenizer and one recursive-descent expression parser serve three entry
points:

* ``parse_equation``: ``D[t,m](u) = <expr>`` where the right side is a
  polynomial in derivative atoms ``D[t,j]D[x1,a1]...(u)`` (or bare ``u``)
  with coefficients polynomial in t, x1..xn over Gaussian rationals.
* ``parse_poly``: polynomial in x1..xn and i only.
* ``parse_series``: finite sum of ``c(x) * t^rho * log(t)^q`` with exact
  rational rho (used for prescribed leading terms).

Division is permitted only by nonzero constants, which is how fractions such
as ``3/4`` enter; dividing by anything containing t, x, log, or a derivative
atom is a syntax error (the right side must stay polynomial).
"""

from __future__ import annotations

from fractions import Fraction

from .equation import MuIndex, PDESpec, RhsTerm
from .errors import EquationSyntaxError
from .scalar import INF, QQi
from .series import LogSeries
from .xpoly import XPoly

_PUNCT = {"+", "-", "*", "/", "^", "(", ")", "[", "]", ",", "="}


class _Tok:
    __slots__ = ("kind", "text", "line", "col", "value")

    def __init__(self, kind, text, line, col, value=None):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.value = value

    def __repr__(self):
        return f"_Tok({self.kind},{self.text!r})"


def _lex(src):
    toks = []
    line, col = 1, 1
    i, N = 0, len(src)
    while i < N:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            toks.append(_Tok(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < N and src[j].isdigit():
                j += 1
            if j < N and src[j] == ".":
                raise EquationSyntaxError(
                    "decimal literals are not supported; use exact fractions",
                    line, col)
            toks.append(_Tok("NAT", src[i:j], line, col, value=int(src[i:j])))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < N and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            start_col = col
            col += j - i
            i = j
            if word == "t":
                toks.append(_Tok("T", word, line, start_col))
            elif word == "i":
                toks.append(_Tok("I", word, line, start_col))
            elif word == "u":
                toks.append(_Tok("U", word, line, start_col))
            elif word == "D":
                toks.append(_Tok("D", word, line, start_col))
            elif word == "log":
                toks.append(_Tok("LOG", word, line, start_col))
            elif word[0] == "x" and word[1:].isdigit():
                idx = int(word[1:])
                if idx < 1:
                    raise EquationSyntaxError("x-variable indices start at 1",
                                              line, start_col)
                toks.append(_Tok("XVAR", word, line, start_col, value=idx))
            else:
                raise EquationSyntaxError(f"unknown name '{word}'", line, start_col)
            continue
        raise EquationSyntaxError(f"unexpected character {ch!r}", line, col)
    toks.append(_Tok("EOF", "", line, col))
    return toks


# -- polynomial values over (t-power, log-power, x-monomial, slot-monomial) --
#
# key = (t_pow: Fraction, q: int, alpha: tuple of (idx, exp), slots: tuple of
#        ((j, slot_alpha), mult)); alpha parts sorted, exponents > 0.

_ONE_KEY = (Fraction(0), 0, (), ())


def _merge_alpha(a, b):
    acc = dict(a)
    for idx, e in b:
        acc[idx] = acc.get(idx, 0) + e
    return tuple(sorted((k, v) for k, v in acc.items() if v))


def _merge_slots(a, b):
    acc = dict(a)
    for key, m in b:
        acc[key] = acc.get(key, 0) + m
    return tuple(sorted(acc.items()))


def _v_scalar(c):
    c = QQi.of(c)
    return {} if c.is_zero() else {_ONE_KEY: c}


def _v_add(a, b):
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, QQi.of(0)) + c
        if s.is_zero():
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _v_neg(a):
    return {k: -c for k, c in a.items()}


def _v_mul(a, b):
    out = {}
    for (t1, q1, al1, sl1), c1 in a.items():
        for (t2, q2, al2, sl2), c2 in b.items():
            k = (t1 + t2, q1 + q2, _merge_alpha(al1, al2), _merge_slots(sl1, sl2))
            p = c1 * c2
            if k in out:
                p = out[k] + p
            if p.is_zero():
                out.pop(k, None)
            else:
                out[k] = p
    return out


def _v_pow(a, e):
    out = _v_scalar(1)
    base = a
    while e:
        if e & 1:
            out = _v_mul(out, base)
        base = _v_mul(base, base)
        e >>= 1
    return out


def _v_is_scalar(a):
    return all(k == _ONE_KEY for k in a)


class _Parser:
    def __init__(self, toks, mode, m=None):
        self.toks = toks
        self.pos = 0
        self.mode = mode  # "equation" | "series" | "poly"
        self.m = m

    # -- token plumbing ------------------------------------------------
    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t.kind != kind:
            raise EquationSyntaxError(
                f"expected '{kind}' but found '{t.text or 'end of input'}'",
                t.line, t.col)
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise EquationSyntaxError(msg, tok.line, tok.col)

    # -- grammar ---------------------------------------------------------
    def parse_expr(self):
        t = self.peek()
        neg = False
        if t.kind in ("+", "-"):
            self.next()
            neg = t.kind == "-"
        val = self.parse_term()
        if neg:
            val = _v_neg(val)
        while self.peek().kind in ("+", "-"):
            op = self.next()
            rhs = self.parse_term()
            val = _v_add(val, _v_neg(rhs) if op.kind == "-" else rhs)
        return val

    def parse_term(self):
        val = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.next()
            rhs = self.parse_factor()
            if op.kind == "*":
                val = _v_mul(val, rhs)
            else:
                val = self._divide(val, rhs, op)
        return val

    def _divide(self, num, den, op):
        if not den:
            self.fail("division by zero", op)
        if not _v_is_scalar(den):
            if any(k[3] for k in den):
                self.fail("division by a derivative of u is not polynomial", op)
            self.fail("division is only allowed by nonzero constants", op)
        inv = QQi.of(1) / den[_ONE_KEY]
        return {k: c * inv for k, c in num.items()}

    def parse_factor(self):
        t = self.peek()
        if t.kind == "-":
            self.next()
            return _v_neg(self.parse_factor())
        if t.kind == "(":
            self.next()
            val = self.parse_expr()
            self.expect(")")
            return self._maybe_pow(val, t)
        val = self.parse_atom()
        return self._maybe_pow(val, t)

    def _maybe_pow(self, val, at):
        if self.peek().kind != "^":
            return val
        caret = self.next()
        sign = 1
        tok = self.peek()
        paren = tok.kind == "("
        if paren:
            self.next()
            tok = self.peek()
        if tok.kind == "-":
            self.next()
            sign = -1
            tok = self.peek()
        num = self.expect("NAT").value
        den = 1
        if self.peek().kind == "/":
            self.next()
            den = self.expect("NAT").value
            if den == 0:
                self.fail("zero denominator in exponent", caret)
        if paren:
            self.expect(")")
        exp = Fraction(sign * num, den)
        if exp.denominator == 1 and exp >= 0:
            return _v_pow(val, int(exp))
        # fractional or negative exponent: only on the bare t atom, series mode
        if self.mode != "series":
            self.fail("exponents must be natural numbers here", caret)
        keys = list(val)
        if len(val) != 1 or keys[0][1:] != (0, (), ()) or val[keys[0]] != 1:
            self.fail("rational exponents are only allowed on t", caret)
        t_pow = keys[0][0] * exp
        return {(t_pow, 0, (), ()): QQi.of(1)}

    def parse_atom(self):
        t = self.next()
        if t.kind == "NAT":
            return _v_scalar(t.value)
        if t.kind == "I":
            return _v_scalar(QQi(0, 1))
        if t.kind == "T":
            if self.mode == "poly":
                self.fail("t is not allowed in a pure polynomial in x", t)
            return {(Fraction(1), 0, (), ()): QQi.of(1)}
        if t.kind == "XVAR":
            return {(Fraction(0), 0, ((t.value, 1),), ()): QQi.of(1)}
        if t.kind == "LOG":
            if self.mode != "series":
                self.fail("log(t) is not allowed here", t)
            self.expect("(")
            self.expect("T")
            self.expect(")")
            return {(Fraction(0), 1, (), ()): QQi.of(1)}
        if t.kind == "U":
            return self._slot_value(0, (), t)
        if t.kind == "D":
            return self.parse_derivative_atom(t)
        self.fail(f"unexpected '{t.text or 'end of input'}'", t)

    def parse_derivative_atom(self, dtok):
        self.expect("[")
        self.expect("T")
        self.expect(",")
        j = self.expect("NAT").value
        self.expect("]")
        alpha = {}
        while self.peek().kind == "D":
            self.next()
            self.expect("[")
            xv = self.next()
            if xv.kind != "XVAR":
                self.fail("expected an x-variable inside D[...]", xv)
            self.expect(",")
            order = self.expect("NAT").value
            self.expect("]")
            alpha[xv.value] = alpha.get(xv.value, 0) + order
        self.expect("(")
        self.expect("U")
        self.expect(")")
        alpha_t = tuple(sorted((k, v) for k, v in alpha.items() if v))
        return self._slot_value(j, alpha_t, dtok)

    def _slot_value(self, j, alpha_t, tok):
        if self.mode != "equation":
            self.fail("derivatives of u are not allowed in this context", tok)
        total_alpha = sum(e for _, e in alpha_t)
        if j >= self.m:
            self.fail(
                f"right side uses D[t,{j}] but the equation has order {self.m}; "
                f"only time orders below {self.m} are allowed", tok)
        if j + total_alpha > self.m:
            self.fail(
                f"derivative D[t,{j}] with {total_alpha} x-derivatives exceeds "
                f"the total order {self.m}", tok)
        return {(Fraction(0), 0, (), (((j, alpha_t), 1),)): QQi.of(1)}


def _infer_n(values, floor=0):
    n = floor
    for val in values:
        for (_, _, alpha, slots) in val:
            for idx, _ in alpha:
                n = max(n, idx)
            for (j, sa), _ in slots:
                for idx, _ in sa:
                    n = max(n, idx)
    return n


def _alpha_tuple(alpha_t, n):
    out = [0] * n
    for idx, e in alpha_t:
        out[idx - 1] = e
    return tuple(out)


def parse_equation(src: str, n: int = None) -> PDESpec:
    """Parse ``D[t,m](u) = <polynomial in t, x, derivative atoms>``."""
    toks = _lex(src)
    p = _Parser(toks, "equation")
    head = p.next()
    if head.kind != "D":
        p.fail("equation must start with D[t,m](u)", head)
    p.expect("[")
    p.expect("T")
    p.expect(",")
    mtok = p.expect("NAT")
    m = mtok.value
    if m < 1:
        p.fail("time order m must be at least 1", mtok)
    p.expect("]")
    p.expect("(")
    p.expect("U")
    p.expect(")")
    p.expect("=")
    p.m = m
    rhs = p.parse_expr()
    tail = p.peek()
    if tail.kind != "EOF":
        p.fail(f"unexpected trailing input '{tail.text}'", tail)

    nn = _infer_n([rhs], floor=n or 0)
    by_mu = {}
    deg = 0
    for (t_pow, q, alpha, slots), c in rhs.items():
        if q:
            raise EquationSyntaxError("log(t) cannot appear in an equation", 1, 1)
        if t_pow.denominator != 1 or t_pow < 0:
            raise EquationSyntaxError(
                "coefficients must be polynomial in t", 1, 1)
        mu_key = slots
        by_mu.setdefault(mu_key, {}).setdefault(int(t_pow), {})[
            _alpha_tuple(alpha, nn)] = c
        deg = max(deg, sum(e for _, e in alpha))

    terms = []
    for slots, tmap in by_mu.items():
        mu = MuIndex({(j, _alpha_tuple(sa, nn)): mult for (j, sa), mult in slots})
        ct = []
        for pw in sorted(tmap):
            poly = XPoly(nn, deg, {a: c for a, c in tmap[pw].items()})
            if not poly.is_zero():
                ct.append((pw, poly))
        if ct:
            terms.append(RhsTerm(mu, tuple(ct)))
    return PDESpec(m, nn, terms)


def parse_poly(src: str, n: int = None, max_deg: int = None) -> XPoly:
    """Parse a polynomial in x1..xn (and i) into an XPoly."""
    toks = _lex(src)
    p = _Parser(toks, "poly")
    val = p.parse_expr()
    tail = p.peek()
    if tail.kind != "EOF":
        p.fail(f"unexpected trailing input '{tail.text}'", tail)
    nn = _infer_n([val], floor=n or 0)
    deg = max((sum(e for _, e in alpha) for (_, _, alpha, _) in val), default=0)
    if max_deg is not None:
        deg = max_deg
    coeffs = {}
    for (t_pow, q, alpha, _), c in val.items():
        coeffs[_alpha_tuple(alpha, nn)] = c
    return XPoly(nn, deg, coeffs)


def parse_series(src: str, n: int = None, max_deg: int = None) -> LogSeries:
    """Parse a finite log-power series such as ``2*t^-2 + x1*t^2*log(t)``.

    The result is exact: its t_order is infinite.
    """
    toks = _lex(src)
    p = _Parser(toks, "series")
    val = p.parse_expr()
    tail = p.peek()
    if tail.kind != "EOF":
        p.fail(f"unexpected trailing input '{tail.text}'", tail)
    nn = _infer_n([val], floor=n or 0)
    deg = max((sum(e for _, e in alpha) for (_, _, alpha, _) in val), default=0)
    if max_deg is not None:
        deg = max_deg
    terms = {}
    for (t_pow, q, alpha, _), c in val.items():
        key = (t_pow, q)
        poly = terms.get(key, XPoly.zero(nn, deg))
        terms[key] = poly + XPoly(nn, deg, {_alpha_tuple(alpha, nn): c})
    return LogSeries(nn, deg, INF, terms)
