"""Exact arithmetic in Q(i)(u), the field of Gaussian-rational functions in u.

u is a formal fourth root of q, so q = u**4 and q**(1/2) = u**2.  Every
coefficient the engine ever touches lives in this field; there is no floating
point anywhere except the optional numeric probe, which itself is exact
Gaussian-rational arithmetic at a fixed rational value of u.
"""

from __future__ import annotations

import os
import re as _re
from dataclasses import dataclass
from fractions import Fraction
from math import comb


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Gaussian rationals a + b*i
# ---------------------------------------------------------------------------

class GaussRat:
    """A Gaussian rational re + im*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if isinstance(re, Fraction) else Fraction(re))
        object.__setattr__(self, "im", im if isinstance(im, Fraction) else Fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussRat is immutable")

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        return GaussRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussRat(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRat(a * c - b * d, a * d + b * c)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * other.inverse()

    def conj(self):
        return GaussRat(self.re, -self.im)

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self):
        return render_gauss(self)


G_ZERO = GaussRat(0)
G_ONE = GaussRat(1)
G_I = GaussRat(0, 1)


def render_gauss(x: GaussRat) -> str:
    if not x.im:
        return str(x.re)
    im = "i" if x.im == 1 else ("-i" if x.im == -1 else f"{x.im}i")
    if not x.re:
        return im
    if x.im > 0:
        return f"{x.re}+{'' if x.im == 1 else x.im}i"
    return f"{x.re}-{'' if x.im == -1 else -x.im}i"


def parse_gauss(s: str) -> GaussRat:
    s = s.strip()
    if "i" not in s:
        return GaussRat(Fraction(s))
    body = s[:-1] if s.endswith("i") else None
    if body is None:
        raise ValueError(f"bad Gaussian rational: {s!r}")
    # split off the real part: last +/- not at position 0 and not inside a '/'
    cut = -1
    for k in range(1, len(body)):
        if body[k] in "+-" and body[k - 1] not in "+-/":
            cut = k
    if cut == -1:
        imtxt = body
        retxt = "0"
    else:
        retxt, imtxt = body[:cut], body[cut:]
    if imtxt in ("", "+"):
        im = Fraction(1)
    elif imtxt == "-":
        im = Fraction(-1)
    else:
        im = Fraction(imtxt)
    return GaussRat(Fraction(retxt), im)


# ---------------------------------------------------------------------------
# Laurent polynomials in u over the Gaussian rationals
# ---------------------------------------------------------------------------

class UPoly:
    """Laurent polynomial in u: a map exponent -> nonzero GaussRat."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None, _clean=False):
        if terms is None:
            terms = {}
        if not _clean:
            terms = {e: c for e, c in terms.items() if c}
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("UPoly is immutable")

    @staticmethod
    def mono(exp: int, coeff: GaussRat = G_ONE) -> "UPoly":
        if not coeff:
            return P_ZERO
        return UPoly({exp: coeff}, _clean=True)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e)
            if s is None:
                t[e] = c
            else:
                s = s + c
                if s:
                    t[e] = s
                else:
                    del t[e]
        return UPoly(t, _clean=True)

    def __neg__(self):
        return UPoly({e: -c for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        a, b = self.terms, other.terms
        if not a or not b:
            return P_ZERO
        if len(a) > len(b):
            a, b = b, a
        t: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                p = c1 * c2
                s = t.get(e)
                if s is None:
                    t[e] = p
                else:
                    s = s + p
                    if s:
                        t[e] = s
                    else:
                        del t[e]
        return UPoly(t, _clean=True)

    def scale(self, c: GaussRat) -> "UPoly":
        if not c:
            return P_ZERO
        return UPoly({e: k * c for e, k in self.terms.items()}, _clean=True)

    def shift(self, d: int) -> "UPoly":
        return UPoly({e + d: c for e, c in self.terms.items()}, _clean=True)

    def valuation(self) -> int:
        return min(self.terms) if self.terms else 0

    def degree(self) -> int:
        return max(self.terms) if self.terms else 0

    def lead(self) -> GaussRat:
        return self.terms[self.degree()] if self.terms else G_ZERO

    def is_mono(self) -> bool:
        return len(self.terms) == 1

    def divmod(self, other: "UPoly"):
        """Exact Euclidean division after shifting both to valuation 0."""
        if not other:
            raise ZeroDivisionError("UPoly division by zero")
        if not self:
            return P_ZERO, P_ZERO
        sv, ov = self.valuation(), other.valuation()
        a = dict(self.shift(-sv).terms)
        b = other.shift(-ov)
        db, lb = b.degree(), b.lead()
        lbinv = lb.inverse()
        quo: dict = {}
        da = max(a) if a else -1
        while a and da >= db:
            c = a[da] * lbinv
            quo[da - db] = c
            for e, k in b.terms.items():
                ee = da - db + e
                s = a.get(ee, G_ZERO) - c * k
                if s:
                    a[ee] = s
                else:
                    a.pop(ee, None)
            da = max(a) if a else -1
        q = UPoly(quo, _clean=True).shift(sv - ov)
        r = UPoly(a, _clean=True).shift(sv)
        return q, r

    def exact_div(self, other: "UPoly") -> "UPoly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact UPoly division")
        return q

    def bar(self) -> "UPoly":
        """The substitution u -> u**-1."""
        return UPoly({-e: c for e, c in self.terms.items()}, _clean=True)

    def eval_at(self, point: Fraction) -> GaussRat:
        re = Fraction(0)
        im = Fraction(0)
        for e, c in self.terms.items():
            p = point ** e
            re += c.re * p
            im += c.im * p
        return GaussRat(re, im)

    def __repr__(self):
        return f"UPoly({self.terms!r})"


P_ZERO = UPoly({}, _clean=True)
P_ONE = UPoly({0: G_ONE}, _clean=True)


def poly_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd of the polynomial parts (unit factors u**k are dropped)."""
    a = a.shift(-a.valuation()) if a else a
    b = b.shift(-b.valuation()) if b else b
    while b:
        # keep the remainder monic so coefficient growth stays tame
        _, r = a.divmod(b)
        if r:
            r = r.scale(r.lead().inverse())
        a, b = b, r
    if not a:
        return P_ZERO
    return a.scale(a.lead().inverse())


# ---------------------------------------------------------------------------
# The field Q(i)(u)
# ---------------------------------------------------------------------------

class Scalar:
    """Element of Q(i)(u) as a canonical fraction num/den of Laurent polynomials.

    Canonical form: gcd(num, den) = 1, den has valuation 0 and leading
    coefficient 1.  Equality and hashing are structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: UPoly, den: UPoly = P_ONE, _canon=False):
        if not _canon:
            num, den = _canonical(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("Scalar is immutable")

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, int):
            return self == from_int(other)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.num, self.den))
            object.__setattr__(self, "_hash", h)
        return h

    def is_poly(self) -> bool:
        return self.den == P_ONE

    def __add__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.den == other.den:
            if self.den == P_ONE:
                return Scalar(self.num + other.num, P_ONE, _canon=True)
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Scalar(-self.num, self.den, _canon=True)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if self.den == P_ONE and other.den == P_ONE:
            return Scalar(self.num * other.num, P_ONE, _canon=True)
        return Scalar(self.num * other.num, self.den * other.den)

    def inverse(self) -> "Scalar":
        if not self.num:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar(self.den, self.num)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k: int):
        if k == 0:
            return ONE
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def bar(self) -> "Scalar":
        """The bar involution u -> u**-1, i -> i."""
        return Scalar(self.num.bar(), self.den.bar())

    def probe(self, point: Fraction) -> GaussRat:
        d = self.den.eval_at(point)
        if not d:
            raise ZeroDivisionError(f"probe point {point} hits a pole")
        return self.num.eval_at(point) / d

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return pretty(self)


def _canonical(num: UPoly, den: UPoly):
    if not den:
        raise ZeroDivisionError("Scalar with zero denominator")
    if not num:
        return P_ZERO, P_ONE
    if den.is_mono():
        e = den.valuation()
        c = den.terms[e].inverse()
        return num.shift(-e).scale(c), P_ONE
    g = poly_gcd(num, den)
    if g.degree() > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    if den.is_mono():
        e = den.valuation()
        c = den.terms[e].inverse()
        return num.shift(-e).scale(c), P_ONE
    v = den.valuation()
    lead = den.lead()
    den = den.shift(-v).scale(lead.inverse())
    num = num.shift(-v).scale(lead.inverse())
    return num, den


ZERO = Scalar(P_ZERO, P_ONE, _canon=True)
ONE = Scalar(P_ONE, P_ONE, _canon=True)
I = Scalar(UPoly.mono(0, G_I), P_ONE, _canon=True)
MINUS_ONE = Scalar(UPoly.mono(0, GaussRat(-1)), P_ONE, _canon=True)


def from_int(k: int) -> Scalar:
    if k == 0:
        return ZERO
    return Scalar(UPoly.mono(0, GaussRat(k)), P_ONE, _canon=True)


def from_frac(f: Fraction) -> Scalar:
    if not f:
        return ZERO
    return Scalar(UPoly.mono(0, GaussRat(f)), P_ONE, _canon=True)


def upow(k: int) -> Scalar:
    """u**k."""
    return Scalar(UPoly.mono(k), P_ONE, _canon=True)


def qpow(a) -> Scalar:
    """q**a for a in (1/4)Z; a may be int, Fraction, or (num, den) pairs are not allowed."""
    e = Fraction(a) * 4
    if e.denominator != 1:
        raise DomainError(f"exponent {a} of q does not land in u-integral powers")
    return upow(int(e))


Q = qpow(1)


def qint(m: int, half: bool = False) -> Scalar:
    """Quantum integer [m] with base q (half off) or q**(1/2) (half on)."""
    if m == 0:
        return ZERO
    step = 2 if half else 4
    sign = G_ONE if m > 0 else GaussRat(-1)
    m = abs(m)
    terms = {step * (m - 1 - 2 * j): sign for j in range(m)}
    return Scalar(UPoly(terms, _clean=True), P_ONE, _canon=True)


def qbinom(m: int, k: int, half: bool = False) -> Scalar:
    """Quantum binomial [m choose k]; always a Laurent polynomial."""
    if k < 0 or k > m:
        raise DomainError(f"qbinom({m}, {k}) needs 0 <= k <= m")
    k = min(k, m - k)
    num = ONE
    den = ONE
    for j in range(1, k + 1):
        num = num * qint(m - k + j, half)
        den = den * qint(j, half)
    return num / den


def _qbinom_ext(m: int, k: int) -> Scalar:
    # zero outside the usual range; m = -1 follows the Pascal extension
    if k == 0:
        return ONE
    if k < 0:
        return ZERO
    if m == -1:
        return ONE if k % 2 == 0 else MINUS_ONE
    if m < 0 or k > m:
        return ZERO
    return qbinom(m, k)


@dataclass(frozen=True)
class Params:
    """The incarnation parameter tuple for a given N."""

    sigmaN: Scalar
    t: Scalar
    kappa: Scalar
    dS: Scalar
    dV: Scalar
    N: int
    n: int


def qparams(N: int) -> Params:
    if N < 0:
        raise DomainError("N must be a natural number")
    n = N // 2
    sigma = from_int((-1) ** (comb(n, 2) + n * N))
    t = qpow(Fraction(N * (1 - N), 8))
    kappa = qpow(Fraction(1 - N, 2))
    if (n * N) % 2 == 1:
        kappa = -kappa
    dS = sigma
    for i in range(1, n + 1):
        dS = dS * (qpow(Fraction(N, 2) - i) + qpow(i - Fraction(N, 2)))
    dV = qint(N - 1) + ONE
    assert kappa * kappa == qpow(1 - N)
    assert (kappa ** (-2) - kappa ** 2) / (Q - qpow(-1)) + ONE == dV
    return Params(sigma, t, kappa, dS, dV, N, n)


def gf_check(m: int) -> bool:
    """Product formula for quantum binomials, checked in a second variable x."""
    lhs = [ONE]  # coefficients of powers of x
    for j in range(1, m + 1):
        c = qpow(2 * j - m - 1)
        nxt = [ZERO] * (len(lhs) + 1)
        for k, a in enumerate(lhs):
            nxt[k] = nxt[k] + a
            nxt[k + 1] = nxt[k + 1] + a * c
        lhs = nxt
    rhs = [qbinom(m, k) for k in range(m + 1)]
    return lhs == rhs


def moment2_check(m: int) -> bool:
    """Second-moment identity for the barbell eigenvalue bookkeeping."""
    if m < 2:
        raise DomainError("moment2_check needs m >= 2")
    total = ZERO
    for k in range(-m, m + 1):
        w = _qbinom_ext(2 * m - 1, m - k - 1) + _qbinom_ext(2 * m - 1, m - k)
        total = total + w * qint(k) * qint(k)
    # the product starts at j = 0, contributing (q^0 + q^0)^2 = 4
    rhs = qint(2 * m - 1) + ONE
    for j in range(0, m - 1):
        f = qpow(j) + qpow(-j)
        rhs = rhs * f * f
    return total == rhs


def bar_map(x: Scalar) -> Scalar:
    return x.bar()


DEFAULT_PROBE_POINT = Fraction(7, 5)


def probe_point_from_env() -> Fraction:
    txt = os.environ.get("QSB_PROBE_POINT")
    if not txt:
        return DEFAULT_PROBE_POINT
    return Fraction(txt.strip())


# ---------------------------------------------------------------------------
# Rendering and parsing
# ---------------------------------------------------------------------------

def render_upoly(p: UPoly) -> str:
    if not p:
        return "0"
    parts = [f"({render_gauss(p.terms[e])})*u^{e}" for e in sorted(p.terms, reverse=True)]
    return " + ".join(parts)


def render_scalar(x: Scalar) -> str:
    return f"({render_upoly(x.num)})/({render_upoly(x.den)})"


def pretty(x: Scalar) -> str:
    def side(p: UPoly) -> str:
        if not p:
            return "0"
        parts = []
        for e in sorted(p.terms, reverse=True):
            c = p.terms[e]
            ctxt = render_gauss(c)
            if e == 0:
                parts.append(ctxt if ("+" not in ctxt[1:] and "-" not in ctxt[1:]) else f"({ctxt})")
            else:
                upart = "u" if e == 1 else f"u^{e}"
                if c == G_ONE:
                    parts.append(upart)
                elif c == GaussRat(-1):
                    parts.append(f"-{upart}")
                elif "+" in ctxt[1:] or "-" in ctxt[1:]:
                    parts.append(f"({ctxt})*{upart}")
                else:
                    parts.append(f"{ctxt}*{upart}")
        out = parts[0]
        for p_ in parts[1:]:
            out += f" - {p_[1:]}" if p_.startswith("-") else f" + {p_}"
        return out

    if x.is_poly():
        return side(x.num)
    return f"({side(x.num)})/({side(x.den)})"


_TOKEN = _re.compile(r"\s*(\(|\)|/|\+|-|\*|u\^-?\d+|u|[0-9]+(?:/[0-9]+)?i?|i)")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.toks: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise ValueError(f"bad scalar text at position {pos}: {text[pos:pos+12]!r}")
                break
            self.toks.append(m.group(1))
            pos = m.end()

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def parse_scalar(self) -> Scalar:
        num = self.parse_group_or_poly()
        if self.peek() == "/":
            self.take()
            den = self.parse_group_or_poly()
            return Scalar(num, den)
        return Scalar(num)

    def parse_group_or_poly(self) -> UPoly:
        if self.peek() == "(":
            save = self.pos
            self.take()
            p = self.parse_poly()
            if self.peek() == ")":
                self.take()
                return p
            self.pos = save
        return self.parse_poly()

    def parse_poly(self) -> UPoly:
        total = P_ZERO
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        total = total + self.parse_mono(sign)
        while self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
            total = total + self.parse_mono(sign)
        return total

    def parse_mono(self, sign: int) -> UPoly:
        coeff = None
        t = self.peek()
        if t == "(":
            self.take()
            coeff = self._gauss_until_close()
        elif t is not None and (t[0].isdigit() or t == "i"):
            txt = self.take()
            coeff = parse_gauss(txt)
        exp = 0
        if self.peek() == "*":
            self.take()
        t = self.peek()
        if t is not None and t.startswith("u"):
            self.take()
            exp = int(t[2:]) if len(t) > 1 else 1
        if coeff is None:
            coeff = G_ONE
        if sign < 0:
            coeff = -coeff
        return UPoly.mono(exp, coeff)

    def _gauss_until_close(self) -> GaussRat:
        parts = []
        while self.peek() not in (")", None):
            parts.append(self.take())
        if self.take() != ")":
            raise ValueError("unbalanced parenthesis in scalar text")
        return parse_gauss("".join(parts))


def parse_scalar(text: str) -> Scalar:
    p = _Parser(text)
    out = p.parse_scalar()
    if p.pos != len(p.toks):
        raise ValueError(f"trailing junk in scalar text: {text!r}")
    return out
