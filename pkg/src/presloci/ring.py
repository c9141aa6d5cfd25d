"""Exact arithmetic in A = Z[L, L^-1, 1/(1 - L^-i) : i >= 1] and its
specialisations at rational ``q > 1``.

An :class:`AElement` is stored as ``num(L) / (L^e * prod_d Phi_d(L)^k_d)``
with ``Phi_d`` the cyclotomic polynomials.  Since ``L^i - 1`` is the product
of the ``Phi_d`` with ``d | i``, this is the same ring as the one generated
by the ``1/(1 - L^-i)``, but the factors are pairwise coprime, so after
cancelling every ``L`` and ``Phi_d`` that divides the numerator the
representation is unique and equality is structural identity.

Numerators may carry rational coefficients (the ring ``A (x) Q``); monomial
merging produces such values as intermediates, e.g. ``y(y+1)/2`` split into
``y^2/2 + y/2``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]
Coeffs = tuple[Scalar, ...]          # low degree first


# ---------------------------------------------------------------------------
# univariate polynomials over Q as coefficient tuples


def _n(c: Fraction) -> Scalar:
    return int(c.numerator) if c.denominator == 1 else c


def _trim(p: Sequence) -> Coeffs:
    p = [_n(Fraction(c)) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def padd(a: Coeffs, b: Coeffs) -> Coeffs:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pneg(a: Coeffs) -> Coeffs:
    return tuple(-c for c in a)


def pmul(a: Coeffs, b: Coeffs) -> Coeffs:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def ppow(a: Coeffs, k: int) -> Coeffs:
    out: Coeffs = (1,)
    for _ in range(k):
        out = pmul(out, a)
    return out


def pdivmod(a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a_ = [Fraction(c) for c in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    for i in range(len(a_) - len(b), -1, -1):
        c = a_[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a_[i + j] -= c * y
    return _trim(q), _trim(a_[:len(b) - 1])


def pgcd(a: Coeffs, b: Coeffs) -> Coeffs:
    while b:
        a, b = b, pdivmod(a, b)[1]
    if not a:
        return ()
    lead = Fraction(a[-1])
    return _trim([Fraction(c) / lead for c in a])


def peval(a: Coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> Coeffs:
    """Coefficients of the d-th cyclotomic polynomial."""
    if d < 1:
        raise ValueError("cyclotomic index must be positive")
    p: Coeffs = (-1,) + (0,) * (d - 1) + (1,)
    for e in range(1, d):
        if d % e == 0:
            p, r = pdivmod(p, cyclotomic(e))
            assert not r
    return p


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AElement:
    """``numerator / (L^shift * prod Phi_d^k)``; build through :meth:`make`."""

    numerator: Coeffs = ()
    shift: int = 0
    cyclotomic: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(numerator: Sequence[Scalar], shift: int = 0,
             cyclo: Iterable[tuple[int, int]] = ()) -> "AElement":
        num = _trim(numerator)
        if not num:
            return ZERO
        den: dict[int, int] = {}
        for d, k in cyclo:
            if k < 0:
                raise ValueError("negative multiplicity in denominator")
            if k:
                den[d] = den.get(d, 0) + k
        lead_zeros = 0
        while num[lead_zeros] == 0:
            lead_zeros += 1
        num = num[lead_zeros:]
        shift -= lead_zeros
        for d in sorted(den):
            phi = cyclotomic(d)
            while den[d] and len(num) >= len(phi):
                q, r = pdivmod(num, phi)
                if r:
                    break
                num = q
                den[d] -= 1
        return AElement(num, shift, tuple((d, k) for d, k in sorted(den.items()) if k))

    # -- constructors ------------------------------------------------------
    @staticmethod
    def const(c: Scalar) -> "AElement":
        return AElement.make((c,))

    @staticmethod
    def L_power(k: int) -> "AElement":
        return AElement.make((1,), -k)

    @staticmethod
    def geometric(i: int) -> "AElement":
        """``1 / (1 - L^-i)`` for ``i >= 1``."""
        if i < 1:
            raise ValueError("index must be >= 1")
        return AElement.make((1,), -i, [(d, 1) for d in divisors(i)])

    @staticmethod
    def pole(g: int) -> "AElement":
        """``1 / (1 - L^g)`` for ``g != 0``."""
        if g == 0:
            raise ZeroDivisionError("1/(1 - L^0)")
        if g < 0:
            return AElement.geometric(-g)
        # 1/(1 - L^g) = -1/(L^g - 1)
        return AElement.make((-1,), 0, [(d, 1) for d in divisors(g)])

    # -- ring structure ----------------------------------------------------
    def _expand_to(self, shift: int, den: dict[int, int]) -> Coeffs:
        num = self.numerator
        num = pmul(num, (0,) * (shift - self.shift) + (1,))
        mine = dict(self.cyclotomic)
        for d, k in den.items():
            extra = k - mine.get(d, 0)
            if extra:
                num = pmul(num, ppow(cyclotomic(d), extra))
        return num

    def __add__(self, other: "AElement | Scalar") -> "AElement":
        o = _lift(other)
        if not o.numerator:
            return self
        if not self.numerator:
            return o
        shift = max(self.shift, o.shift)
        den = dict(self.cyclotomic)
        for d, k in o.cyclotomic:
            den[d] = max(den.get(d, 0), k)
        num = padd(self._expand_to(shift, den), o._expand_to(shift, den))
        return AElement.make(num, shift, den.items())

    __radd__ = __add__

    def __neg__(self) -> "AElement":
        return AElement(pneg(self.numerator), self.shift, self.cyclotomic)

    def __sub__(self, other: "AElement | Scalar") -> "AElement":
        return self + (-_lift(other))

    def __rsub__(self, other: Scalar) -> "AElement":
        return _lift(other) - self

    def __mul__(self, other: "AElement | Scalar") -> "AElement":
        o = _lift(other)
        if not self.numerator or not o.numerator:
            return ZERO
        den = dict(self.cyclotomic)
        for d, k in o.cyclotomic:
            den[d] = den.get(d, 0) + k
        return AElement.make(pmul(self.numerator, o.numerator), self.shift + o.shift, den.items())

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "AElement":
        if k < 0:
            raise ValueError("negative powers are not in A in general")
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.numerator

    def __bool__(self) -> bool:
        return bool(self.numerator)

    # -- evaluation --------------------------------------------------------
    def evaluate(self, q: Scalar | "FixedQ") -> Fraction:
        if isinstance(q, FixedQ):
            q = q.q
        q = Fraction(q)
        if q <= 1:
            raise ValueError("evaluation requires q > 1")
        val = peval(self.numerator, q) / q ** self.shift
        for d, k in self.cyclotomic:
            val /= peval(cyclotomic(d), q) ** k
        return val

    def evaluate_interval(self, q) -> "object":
        """Interval enclosure of the value at a real ``q`` (e.g. ``'sqrt(2)'``).

        Only for inspection: zero tests are never decided on intervals.
        """
        import mpmath
        iv = mpmath.iv
        if isinstance(q, str):
            m = re.fullmatch(r"\s*sqrt\((\d+)\)\s*", q)
            x = iv.sqrt(iv.mpf(int(m.group(1)))) if m else iv.mpf(q)
        else:
            x = q if isinstance(q, type(iv.mpf(0))) else iv.mpf(q)
        acc = iv.mpf(0)
        for c in reversed(self.numerator):
            acc = acc * x + iv.mpf(Fraction(c).numerator) / Fraction(c).denominator
        acc = acc / x ** self.shift
        for d, k in self.cyclotomic:
            v = iv.mpf(0)
            for c in reversed(cyclotomic(d)):
                v = v * x + int(c)
            acc = acc / v ** k
        return acc

    # -- printing / serialisation -----------------------------------------
    def __str__(self) -> str:
        return format_element(self)

    def to_json(self) -> dict:
        return {
            "numerator": [c if isinstance(c, int) else f"{c.numerator}/{c.denominator}"
                          for c in self.numerator],
            "shift": self.shift,
            "cyclotomic": [[d, k] for d, k in self.cyclotomic],
        }

    @staticmethod
    def from_json(obj: dict) -> "AElement":
        num = [Fraction(c) for c in obj.get("numerator", [])]
        return AElement.make(num, int(obj.get("shift", 0)),
                             [(int(d), int(k)) for d, k in obj.get("cyclotomic", [])])


def _lift(x: "AElement | Scalar") -> AElement:
    if isinstance(x, AElement):
        return x
    if isinstance(x, (int, Fraction)):
        return AElement.make((x,))
    raise TypeError(f"cannot coerce {type(x).__name__} into A")


ZERO = AElement()
ONE = AElement((1,), 0, ())
L = AElement((1,), -1, ())


def is_zero_element(a: AElement) -> bool:
    return a.is_zero()


def ring_op(op: str, a: AElement, b: AElement | None = None) -> AElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown ring operation {op!r}")


def evaluate_at_q(a: AElement, q: "Scalar | FixedQ") -> Fraction:
    return a.evaluate(q)


# ---------------------------------------------------------------------------
# modes


@dataclass(frozen=True)
class FixedQ:
    q: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 1:
            raise ValueError(f"base must satisfy q > 1, got {self.q}")

    def __str__(self) -> str:
        return f"q={self.q}"

    # coefficient-ring interface shared with Formal
    def one(self) -> Fraction:
        return Fraction(1)

    def zero(self) -> Fraction:
        return Fraction(0)

    def coerce(self, c: "AElement | Scalar") -> Fraction:
        if isinstance(c, AElement):
            return c.evaluate(self.q)
        return Fraction(c)

    def L_power(self, k: Scalar) -> Fraction:
        k = Fraction(k)
        if k.denominator != 1:
            raise ValueError(f"non-integral exponent {k}")
        return self.q ** int(k)

    def pole(self, g: int) -> Fraction:
        if g == 0:
            raise ZeroDivisionError("1/(1 - q^0)")
        return 1 / (1 - self.q ** g)

    def is_zero(self, c: Fraction) -> bool:
        return c == 0

    def specialize(self, c: "AElement | Scalar", q: "FixedQ | None" = None) -> Fraction:
        return self.coerce(c)


@dataclass(frozen=True)
class Formal:
    def __str__(self) -> str:
        return "formal"

    def one(self) -> AElement:
        return ONE

    def zero(self) -> AElement:
        return ZERO

    def coerce(self, c: "AElement | Scalar") -> AElement:
        return _lift(c)

    def L_power(self, k: Scalar) -> AElement:
        k = Fraction(k)
        if k.denominator != 1:
            raise ValueError(f"non-integral exponent {k}")
        return AElement.L_power(int(k))

    def pole(self, g: int) -> AElement:
        return AElement.pole(g)

    def is_zero(self, c: AElement) -> bool:
        return c.is_zero()


FORMAL = Formal()
Mode = Union[Formal, FixedQ]


def parse_mode(text: str) -> Mode:
    """``formal`` or ``q=<rational>``."""
    t = text.strip()
    if t == "formal":
        return FORMAL
    m = re.fullmatch(r"q\s*=\s*(-?\d+(?:/\d+)?)", t)
    if not m:
        raise ValueError(f"mode must be 'formal' or 'q=<rational>', got {text!r}")
    return FixedQ(Fraction(m.group(1)))


# ---------------------------------------------------------------------------
# text form


def _fmt_poly(p: Coeffs) -> str:
    parts: list[str] = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mag = abs(c)
        cs = f"{mag.numerator}/{mag.denominator}" if isinstance(mag, Fraction) else str(mag)
        mono = "" if i == 0 else ("L" if i == 1 else f"L^{i}")
        if not mono:
            body = cs
        elif mag == 1:
            body = mono
        else:
            body = f"{cs}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def format_element(a: AElement) -> str:
    if not a.numerator:
        return "0"
    num = a.numerator
    shift = a.shift
    if shift < 0:
        num = pmul(num, (0,) * (-shift) + (1,))
        shift = 0
    den: list[str] = []
    if shift:
        den.append("L" if shift == 1 else f"L^{shift}")
    for d, k in a.cyclotomic:
        f = f"({_fmt_poly(cyclotomic(d))})"
        den.append(f if k == 1 else f"{f}^{k}")
    n = _fmt_poly(num)
    if not den:
        return n
    if sum(1 for c in num if c) > 1:
        n = f"({n})"
    d = den[0] if len(den) == 1 else "(" + " * ".join(den) + ")"
    return f"{n}/{d}"


class ElementSyntaxError(ValueError):
    def __init__(self, message: str, col: int):
        super().__init__(f"col {col}: {message}")
        self.col = col


_TOKEN = re.compile(r"\s*(?:(\d+)|(L)|(\*\*|[-+*/^()]))")


def parse_element(text: str) -> AElement:
    """Parse a rational expression in ``L``; the reduced denominator must
    factor into powers of ``L`` and cyclotomic polynomials."""
    toks: list[tuple[str, str, int]] = []
    pos = 0
    text_s = text.rstrip()
    while pos < len(text_s):
        m = _TOKEN.match(text_s, pos)
        if not m:
            raise ElementSyntaxError(f"unexpected character {text_s[pos]!r}", pos + 1)
        kind = "int" if m.group(1) else "L" if m.group(2) else "op"
        toks.append((kind, m.group(m.lastindex), m.start(m.lastindex) + 1))
        pos = m.end()
    toks.append(("end", "", len(text_s) + 1))
    i = 0

    def peek() -> tuple[str, str, int]:
        return toks[i]

    def take() -> tuple[str, str, int]:
        nonlocal i
        t = toks[i]
        i += 1
        return t

    # rational functions as (num, den)
    def add(x, y):
        return padd(pmul(x[0], y[1]), pmul(y[0], x[1])), pmul(x[1], y[1])

    def mul(x, y):
        return pmul(x[0], y[0]), pmul(x[1], y[1])

    def expr():
        sign = 1
        if peek()[1] in "+-" and peek()[0] == "op":
            sign = -1 if take()[1] == "-" else 1
        acc = term()
        if sign < 0:
            acc = (pneg(acc[0]), acc[1])
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            t = term()
            acc = add(acc, t if op == "+" else (pneg(t[0]), t[1]))
        return acc

    def term():
        acc = power()
        while peek()[0] == "op" and peek()[1] in ("*", "/"):
            op = take()
            t = power()
            if op[1] == "*":
                acc = mul(acc, t)
            else:
                if not t[0]:
                    raise ElementSyntaxError("division by zero", op[2])
                acc = mul(acc, (t[1], t[0]))
        return acc

    def power():
        base = atom()
        if peek()[0] == "op" and peek()[1] in ("^", "**"):
            take()
            neg = False
            if peek()[1] == "-":
                take()
                neg = True
            k = take()
            if k[0] != "int":
                raise ElementSyntaxError("expected integer exponent", k[2])
            e = int(k[1])
            base = (ppow(base[0], e), ppow(base[1], e))
            if neg:
                base = (base[1], base[0])
        return base

    def atom():
        t = take()
        if t[0] == "int":
            return (_trim([int(t[1])]), (1,))
        if t[0] == "L":
            return ((0, 1), (1,))
        if t[1] == "(":
            v = expr()
            c = take()
            if c[1] != ")":
                raise ElementSyntaxError("expected ')'", c[2])
            return v
        raise ElementSyntaxError(f"unexpected {t[1] or 'end of input'!r}", t[2])

    val = expr()
    if peek()[0] != "end":
        raise ElementSyntaxError(f"unexpected {peek()[1]!r}", peek()[2])
    return from_rational_function(val[0], val[1])


def from_rational_function(num: Coeffs, den: Coeffs) -> AElement:
    if not den:
        raise ZeroDivisionError("zero denominator")
    g = pgcd(num, den) if num else (1,)
    num, r1 = pdivmod(num, g)
    den, r2 = pdivmod(den, g)
    shift = 0
    while den and den[0] == 0:
        den = den[1:]
        shift += 1
    cyclo: list[tuple[int, int]] = []
    d = 1
    while len(den) > 1:
        if d > 4 * len(den) ** 2 + 8:   # phi(d) >= sqrt(d/2): no index beyond this fits
            raise ValueError("denominator is not a product of L and cyclotomic polynomials")
        phi = cyclotomic(d)
        k = 0
        while len(den) >= len(phi):
            q, r = pdivmod(den, phi)
            if r:
                break
            den = q
            k += 1
        if k:
            cyclo.append((d, k))
        d += 1
    c = Fraction(den[0])
    return AElement.make([Fraction(x) / c for x in num], shift, cyclo)
