"""Fixture families shared by the acceptance suite and the scripts.

Everything is given as source text so the fixtures also exercise the
parsers; ``load_*`` helpers return parsed objects.
"""
from __future__ import annotations

from dataclasses import replace

from .constructible import ConstructibleFunction
from .dsl import parse_pcf
from .poly import Poly
from .presburger.formula import conj, ge
from .presburger.parser import parse_formula
from .presburger.terms import LinearTerm

# one-parameter families over y in N
LOCI_FAMILIES: dict[str, str] = {
    "exp_sy": "func f(s; y) { term coeff = 1, exp = s*y, when y >= 0; }",
    "y_exp_sy": "func f(s; y) { term coeff = 1, exp = s*y, factors = [y], when y >= 0; }",
    "poly_coeff": "func f(s; y) { term coeff = 1, exp = y, factors = [s^2 - s], when y >= 0; }",
    "indicator": "func f(s; y) { term coeff = 1, when 0 <= y and y <= s; }",
    "y2_exp_sy_s": "func f(s; y) { term coeff = 1, exp = s*y + s, factors = [y^2], when y >= 0; }",
}

# parameter-free summable integrands over N^1 and N^2
SUM_FIXTURES: dict[str, str] = {
    "geo": "func f(; y) { term coeff = 1, exp = -y, when y >= 0; }",
    "y_geo": "func f(; y) { term coeff = 1, exp = -y, factors = [y], when y >= 0; }",
    "y2_geo": "func f(; y) { term coeff = 1, exp = -y, factors = [y^2], when y >= 0; }",
    "y3_geo2": "func f(; y) { term coeff = 1, exp = -2*y, factors = [y^3], when y >= 0; }",
    "mod3": "func f(; y) { term coeff = 1, exp = -y, when y >= 0 and y mod 3 = 1; }",
    "falling": "func f(; y) { term coeff = 1, exp = -y, factors = [y^2 - y], when y >= 0; }",
    "shifted": "func f(; y) { term coeff = 1, exp = -y, when y >= 5; }",
    "affine_exp": "func f(; y) { term coeff = 3, exp = -3*y + 2, when y >= 0; }",
    "finite_const": "func f(; y) { term coeff = 1, when 0 <= y and y <= 10; }",
    "finite_poly": "func f(; y) { term coeff = 1, factors = [y^2], when 0 <= y and y <= 7; }",
    "difference": "func f(; y) { term coeff = 1, exp = -y, when y >= 0; term coeff = -1, exp = -2*y, when y >= 0; }",
    "piecewise": "func f(; y) { term coeff = 1, exp = -y, when 0 <= y and y <= 4; "
                 "term coeff = 1, exp = -2*y, when y >= 5; }",
    "pole_coeff": "func f(; y) { term coeff = 1, exp = -y, poles = [2], when y >= 0; }",
    "quadrant": "func f(; y1, y2) { term coeff = 1, exp = -y1 - y2, when y1 >= 0 and y2 >= 0; }",
    "quadrant_y1": "func f(; y1, y2) { term coeff = 1, exp = -y1 - 2*y2, factors = [y1], "
                   "when y1 >= 0 and y2 >= 0; }",
    "triangle": "func f(; y1, y2) { term coeff = 1, exp = -y1 - y2, when 0 <= y2 and y2 <= y1; }",
    "bounded_inner": "func f(; y1, y2) { term coeff = 1, exp = -y1, when 0 <= y2 and y2 <= y1; }",
    "product_factor": "func f(; y1, y2) { term coeff = 1, exp = -y1 - y2, factors = [y1*y2], "
                      "when y1 >= 0 and y2 >= 0; }",
    "parity": "func f(; y1, y2) { term coeff = 1, exp = -y1 - y2, "
              "when y1 >= 0 and y2 >= 0 and y1 - y2 mod 2 = 0; }",
    "max_exp": "func f(; y1, y2) { term coeff = 1, exp = -max(y1, y2), when y1 >= 0 and y2 >= 0; }",
    "strict_wedge": "func f(; y1, y2) { term coeff = 1, exp = -2*y1 - y2, when y1 >= 0 and y2 >= y1 + 1; }",
    "wedge2": "func f(; y1, y2) { term coeff = 1, exp = -y1 - y2, factors = [y2^2], "
              "when y2 >= 0 and y1 >= 2*y2; }",
    "diag_mod3": "func f(; y1, y2) { term coeff = 1, exp = -y1 - y2, "
                 "when y1 >= 0 and y2 >= 0 and y1 + y2 mod 3 = 0; }",
    "finite_simplex": "func f(; y1, y2) { term coeff = 1, when y1 >= 0 and y2 >= 0 and y1 + y2 <= 6; }",
    "strip": "func f(; y1, y2) { term coeff = 1, exp = -y1, when y1 >= 0 and 0 <= y2 and y2 <= 3; }",
}

# (formula, params, lattice) for rectilinearization
RECT_FIXTURES: dict[str, tuple[str, tuple[str, ...], tuple[str, ...]]] = {
    "ray": ("y >= 0", (), ("y",)),
    "interval_s": ("0 <= y and y <= s", ("s",), ("y",)),
    "ray_mod3": ("y >= 0 and y mod 3 = 1", (), ("y",)),
    "quadrant": ("y1 >= 0 and y2 >= 0", (), ("y1", "y2")),
    "wedge": ("0 <= y2 and y2 <= y1", (), ("y1", "y2")),
    "wedge2": ("y2 >= 0 and y1 >= 2*y2", (), ("y1", "y2")),
    "simplex_s": ("y1 >= 0 and y2 >= 0 and y1 + y2 <= s", ("s",), ("y1", "y2")),
    "upper_ray_s": ("y >= s", ("s",), ("y",)),
    "lower_ray_s": ("y <= s", ("s",), ("y",)),
    "finite": ("-3 <= y and y <= 4", (), ("y",)),
    "two_rays": ("y >= 2 or y <= -2", (), ("y",)),
    "parity": ("y1 >= 0 and y2 >= 0 and y1 - y2 mod 2 = 0", (), ("y1", "y2")),
    "column": ("0 <= y1 and y1 <= 5 and y2 >= y1", (), ("y1", "y2")),
    "diag_mod3": ("y1 >= 0 and y2 >= 0 and y1 + y2 mod 3 = 0", (), ("y1", "y2")),
    "band_s": ("s <= y and y <= 2*s", ("s",), ("y",)),
    "strip_s": ("y1 >= 0 and 0 <= y2 and y2 <= s", ("s",), ("y1", "y2")),
    "half_s": ("y >= 0 and 2*y <= s", ("s",), ("y",)),
    "shifted_wedge": ("y1 >= 0 and y2 >= 0 and y1 <= y2 + 3", (), ("y1", "y2")),
    "union_mod": ("y >= 0 and (y mod 2 = 0 or y mod 3 = 0)", (), ("y",)),
    "chain3": ("y1 >= 0 and y2 >= y1 and y3 >= y2", (), ("y1", "y2", "y3")),
}

# skeleton-factored p-adic families (integrand JSON objects)
_UNIT_BALL = [{"valuation": "r >= 0", "coords": [{"ac": "all"}]}]
PADIC_FIXTURES: dict[str, dict] = {
    "abs_x": {"rvars": ["r"], "cells": _UNIT_BALL,
              "amplitude": "func F(; r) { term coeff = 1, exp = -r; }"},
    "norm_s": {"params": ["s"], "rvars": ["r"], "cells": _UNIT_BALL,
               "amplitude": "func F(s; r) { term coeff = 1, exp = -s*r; }"},
    "ord_eq_s": {"params": ["s"], "rvars": ["r"],
                 "cells": [{"valuation": "r >= 0 and r = s", "coords": [{"ac": "all"}]}],
                 "amplitude": "func F(s; r) { term coeff = 1; }"},
    "norm_st_2d": {"params": ["s", "t"], "rvars": ["r1", "r2"],
                   "cells": [{"valuation": "r1 >= 0 and r2 >= 0", "coords": [{"ac": "all"}, {"ac": "all"}]}],
                   "amplitude": "func F(s, t; r1, r2) { term coeff = 1, exp = -s*r1 - t*r2; }"},
    "psi_ord_eq_s": {"params": ["s"], "rvars": ["r"],
                     "cells": [{"valuation": "r >= 0 and r = s", "coords": [{"ac": "all"}]}],
                     "amplitude": "func F(s; r) { term coeff = 1; }",
                     "phases": [{"monomial": "1 * x1"}]},
    "psi_norm_s": {"params": ["s"], "rvars": ["r"], "cells": _UNIT_BALL,
                   "amplitude": "func F(s; r) { term coeff = 1, exp = -s*r; }",
                   "phases": [{"monomial": "1 * p^-1 * x1"}]},
}


def load_family(name: str) -> ConstructibleFunction:
    return parse_pcf(LOCI_FAMILIES[name])


def load_sum_fixture(name: str) -> ConstructibleFunction:
    return parse_pcf(SUM_FIXTURES[name])


def load_rect_fixture(name: str):
    text, params, lattice = RECT_FIXTURES[name]
    return parse_formula(text), params, lattice


def load_padic_fixture(name: str):
    from .padic import load_integrand
    return load_integrand(PADIC_FIXTURES[name])


def times_lattice_variable(h: ConstructibleFunction, y: str = "y") -> ConstructibleFunction:
    """``h(s) * y`` on ``N``: its three loci all equal ``Z(h)``."""
    yv = LinearTerm.var(y)
    terms = tuple(replace(t, support=conj(t.support, ge(yv)), factor=t.factor * Poly.var(y))
                  for t in h.terms)
    return ConstructibleFunction(h.params, h.lattice + (y,), terms, conj(h.domain, ge(yv)), h.mode)
