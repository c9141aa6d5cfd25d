from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from presloci.dsl import parse_pcf
from presloci.fixtures import SUM_FIXTURES, load_family, load_sum_fixture
from presloci.oracle import (
    at_parameters, grid_evaluate, grid_partial_sum, monomial_verdicts, partial_sum, tail_bound,
)
from presloci.presburger import LinearTerm, evaluate, parse_formula
from presloci.ring import FixedQ

Q2, Q3 = FixedQ(2), FixedQ(3)


def test_at_parameters():
    g = at_parameters(load_family("exp_sy"), (-1,))
    assert g.params == () and g.evaluate((3,), Q2) == Fraction(1, 8)


@pytest.mark.parametrize("name", sorted(SUM_FIXTURES))
def test_grid_partial_sum_matches_loop(name):
    f = load_sum_fixture(name)
    n = 12 if len(f.lattice) == 1 else 7
    assert grid_partial_sum(f, Q3, n) == partial_sum(f, (), Q3, n)


def test_tail_bound_geometric_is_exact():
    f = load_sum_fixture("geo")
    # sum_{y >= 10} 2^-y = 2^-9
    assert tail_bound(f, (), Q2, 10) == Fraction(1, 2 ** 9)


def test_tail_bound_none_when_divergent():
    f = load_family("exp_sy")
    assert tail_bound(f, (0,), Q2, 10) is None
    assert tail_bound(f, (-1,), Q2, 10) is not None


def test_tail_bound_confined_coordinates():
    f = load_sum_fixture("strip")       # y2 in [0, 3], no decay needed there
    t = tail_bound(f, (), Q2, 8)
    assert t is not None and t >= 4 * Fraction(1, 2 ** 7) - Fraction(1, 10 ** 9)


@pytest.mark.parametrize("name", ["triangle", "bounded_inner", "wedge2", "max_exp"])
def test_tail_bound_dominates_true_tail(name):
    f = load_sum_fixture(name)
    t = tail_bound(f, (), Q2, 10)
    assert t is not None
    assert partial_sum(f, (), Q2, 30) - partial_sum(f, (), Q2, 10) <= t


def test_monomial_verdicts():
    f = load_family("y_exp_sy")
    assert monomial_verdicts(f, (-1,)) == {"integrability": True, "boundedness": True, "vanishing": False}
    assert monomial_verdicts(f, (0,)) == {"integrability": False, "boundedness": False, "vanishing": False}
    g = load_family("poly_coeff")
    assert monomial_verdicts(g, (1,))["vanishing"]


def test_monomial_verdicts_fixed_q():
    f = parse_pcf("func f(s; y) { term coeff = 1 - 3*L^-1, exp = s*y, when y >= 0; }")
    assert not monomial_verdicts(f, (1,))["vanishing"]
    assert monomial_verdicts(f, (1,), Q3)["vanishing"]


FORMULAS = [
    "x >= 2*y - 1 and x + y mod 3 = 1",
    "not (x = y) or x mod 2 = 0",
    "exists z. (0 <= z - x and z - x <= 4 and 3*z = y)",
    "forall z. (x <= z and z <= x + 2) -> not (z + y mod 3 = 0)",
]


@pytest.mark.parametrize("text", FORMULAS)
def test_grid_evaluate_matches_pointwise(text):
    f = parse_formula(text)
    xs, ys = np.meshgrid(np.arange(-6, 7), np.arange(-6, 7), indexing="ij")
    # quantifiers are guarded to [x, x + 4], inside both search ranges
    win = {"z": (LinearTerm.var("x"), 6)}
    grid = grid_evaluate(f, {"x": xs, "y": ys}, win)
    for i, x in enumerate(range(-6, 7)):
        for j, y in enumerate(range(-6, 7)):
            assert bool(grid[i, j]) == evaluate(f, {"x": x, "y": y}, box=20), (text, x, y)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 4))
def test_tail_bound_random_geometric(b, a, k):
    f = parse_pcf(f"func f(; y) {{ term coeff = 1, exp = -{b}*y, factors = [y^{a}], when y >= {k}; }}")
    t = tail_bound(f, (), Q2, 15)
    true_tail = partial_sum(f, (), Q2, 80) - partial_sum(f, (), Q2, 15)
    assert true_tail <= t
