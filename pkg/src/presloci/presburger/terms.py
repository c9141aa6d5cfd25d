"""Affine terms over named integer variables."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


@dataclass(frozen=True)
class LinearTerm:
    """``sum(c_v * v) + const`` with integer or rational coefficients.

    Coefficients are stored sorted by variable name with zeros dropped, so
    structurally equal terms compare equal.
    """

    coeffs: tuple[tuple[str, Number], ...] = ()
    const: Number = 0

    @staticmethod
    def make(coeffs: Mapping[str, Number] | Iterable[tuple[str, Number]] = (),
             const: Number = 0) -> "LinearTerm":
        acc: dict[str, Number] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for v, c in items:
            acc[v] = acc.get(v, 0) + c
        return LinearTerm(tuple(sorted((v, _norm(c)) for v, c in acc.items() if c != 0)),
                          _norm(const))

    @staticmethod
    def var(name: str, coeff: Number = 1) -> "LinearTerm":
        return LinearTerm.make({name: coeff})

    @staticmethod
    def constant(c: Number) -> "LinearTerm":
        return LinearTerm((), _norm(c))

    # -- queries ---------------------------------------------------------
    def coeff(self, v: str) -> Number:
        for name, c in self.coeffs:
            if name == v:
                return c
        return 0

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for _, c in self.coeffs) and isinstance(self.const, int)

    def denominator(self) -> int:
        d = 1
        for c in [c for _, c in self.coeffs] + [self.const]:
            if isinstance(c, Fraction):
                d = d * c.denominator // gcd(d, c.denominator)
        return d

    def content(self) -> int:
        """gcd of the variable coefficients (integral terms only)."""
        g = 0
        for _, c in self.coeffs:
            g = gcd(g, int(c))
        return g

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: "LinearTerm | Number") -> "LinearTerm":
        if not isinstance(other, LinearTerm):
            return LinearTerm(self.coeffs, _norm(self.const + other))
        return LinearTerm.make(list(self.coeffs) + list(other.coeffs), self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "LinearTerm":
        return LinearTerm(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other: "LinearTerm | Number") -> "LinearTerm":
        return self + (-other)

    def __rsub__(self, other: Number) -> "LinearTerm":
        return (-self) + other

    def __mul__(self, k: Number) -> "LinearTerm":
        if isinstance(k, LinearTerm):
            raise TypeError("product of linear terms is not linear")
        if k == 0:
            return LinearTerm()
        return LinearTerm(tuple((v, _norm(c * k)) for v, c in self.coeffs), _norm(self.const * k))

    __rmul__ = __mul__

    def __truediv__(self, k: int) -> "LinearTerm":
        return self * Fraction(1, k)

    def drop(self, v: str) -> "LinearTerm":
        return LinearTerm(tuple((n, c) for n, c in self.coeffs if n != v), self.const)

    def substitute(self, mapping: Mapping[str, "LinearTerm | Number"]) -> "LinearTerm":
        out = LinearTerm.constant(self.const)
        for v, c in self.coeffs:
            if v in mapping:
                r = mapping[v]
                out = out + (r * c if isinstance(r, LinearTerm) else LinearTerm.constant(r * c))
            else:
                out = out + LinearTerm.var(v, c)
        return out

    def rename(self, mapping: Mapping[str, str]) -> "LinearTerm":
        return LinearTerm.make([(mapping.get(v, v), c) for v, c in self.coeffs], self.const)

    def evaluate(self, env: Mapping[str, Number]) -> Number:
        total: Number = self.const
        for v, c in self.coeffs:
            total += c * env[v]
        return _norm(total) if isinstance(total, Fraction) else total

    def scaled_integral(self) -> tuple["LinearTerm", int]:
        """Return ``(d * self, d)`` with ``d`` the least positive integer making it integral."""
        d = self.denominator()
        return self * d, d

    # -- printing --------------------------------------------------------
    def __str__(self) -> str:
        return format_linear(self)


def _fmt_coeff(c: Number) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def format_linear(t: LinearTerm, with_const: bool = True) -> str:
    parts: list[str] = []
    for v, c in t.coeffs:
        mag = abs(c)
        body = v if mag == 1 else f"{_fmt_coeff(mag)}*{v}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    if with_const and (t.const != 0 or not parts):
        c = t.const
        if not parts:
            parts.append(_fmt_coeff(c))
        else:
            parts.append(f"+ {_fmt_coeff(c)}" if c > 0 else f"- {_fmt_coeff(-c)}")
    return " ".join(parts) if parts else "0"
