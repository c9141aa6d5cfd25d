from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from presloci.dsl import parse_pcf
from presloci.engine import (
    UnsupportedIntegrand, compute_locus, eulerian_numerator, faulhaber, interpolate,
    sum_finite_range, sum_geometric_closed_form, sum_over_lattice,
)
from presloci.fixtures import LOCI_FAMILIES, SUM_FIXTURES, load_family, load_sum_fixture
from presloci.oracle import monomial_verdicts, partial_sum, tail_bound
from presloci.presburger import LinearTerm
from presloci.ring import AElement, FixedQ

Q2, Q3 = FixedQ(2), FixedQ(3)


def test_eulerian_numerators():
    assert eulerian_numerator(0) == (1,)
    assert eulerian_numerator(1) == (0, 1)
    assert eulerian_numerator(2) == (0, 1, 1)
    assert eulerian_numerator(3) == (0, 1, 4, 1)


@pytest.mark.parametrize("a", range(5))
def test_faulhaber(a):
    for w in range(8):
        assert faulhaber(a).evaluate({"W": w}) == sum(t ** a for t in range(w + 1))


def test_geometric_closed_form():
    v = sum_geometric_closed_form(0, -1)
    assert v == AElement.geometric(1)
    assert v.evaluate(2) == 2
    assert sum_geometric_closed_form(1, -1).evaluate(2) == 2
    with pytest.raises(ValueError):
        sum_geometric_closed_form(0, 1)


def test_sum_finite_range():
    g = sum_finite_range(1, -1, LinearTerm.var("s"), params=("s",))
    for s in range(-2, 6):
        want = sum(Fraction(y, 2 ** y) for y in range(s + 1))
        assert g.evaluate((s,), Q2) == want


@pytest.mark.parametrize("name", sorted(SUM_FIXTURES))
@pytest.mark.parametrize("q", [Q2, Q3])
def test_sum_fixtures_match_partial_sums(name, q):
    f = load_sum_fixture(name)
    r = sum_over_lattice(f)
    assert r.validity.is_everywhere() or r.validity.contains((), q)
    n = 40 if len(f.lattice) == 1 else 18
    tail = tail_bound(f, (), q, n)
    assert tail is not None
    assert abs(r.value((), q) - partial_sum(f, (), q, n)) <= tail


@pytest.mark.parametrize("name", sorted(LOCI_FAMILIES))
def test_loci_match_monomial_oracle(name):
    f = load_family(name)
    res = {k: compute_locus(f, k) for k in ("integrability", "boundedness", "vanishing")}
    for s in range(-4, 5):
        want = monomial_verdicts(f, (s,))
        for k, r in res.items():
            assert r.contains((s,)) == want[k], (name, s, k)


def test_exp_sy_loci_explicit():
    f = load_family("exp_sy")
    assert compute_locus(f, "int").zero_set([range(-3, 3)]) == [(-3,), (-2,), (-1,)]
    assert compute_locus(f, "bdd").zero_set([range(-3, 3)]) == [(-3,), (-2,), (-1,), (0,)]
    assert compute_locus(f, "iva").zero_set([range(-3, 3)]) == []


def test_fixed_q_vanishing_differs_from_formal():
    # 1 - 2 L^-1 vanishes at q = 2 only
    f = parse_pcf("func f(; y) { term coeff = 1 - 2*L^-1, exp = -y, when y >= 0; }")
    assert not compute_locus(f, "vanishing").is_everywhere()
    assert compute_locus(f, "vanishing", Q2).contains(())
    assert not compute_locus(f, "vanishing", Q3).contains(())


def test_interpolation_agrees_on_locus():
    f = load_family("y_exp_sy")
    g = interpolate(f)
    assert compute_locus(g, "integrability").is_everywhere()
    for s in (-3, -2, -1):
        for y in range(6):
            assert g.evaluate((s, y), Q2) == f.evaluate((s, y), Q2)


def test_unsupported_exponent():
    f = parse_pcf("func f(s; y) { term coeff = 1, exp = y*y, when y >= 0; }")
    with pytest.raises(UnsupportedIntegrand):
        compute_locus(f, "integrability")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(-3, -1), st.integers(-3, 3), st.integers(0, 4),
       st.sampled_from([2, 3, 4]), st.integers(0, 2))
def test_random_one_dim_sums(a, b, c, k, m, r):
    r %= m
    f = parse_pcf(f"func f(; y) {{ term coeff = {c}, exp = {b}*y, factors = [y^{a}], "
                  f"when y >= {k} and y mod {m} = {r}; }}")
    v = sum_over_lattice(f).value((), Q2)
    tail = tail_bound(f, (), Q2, 60)
    assert abs(v - partial_sum(f, (), Q2, 60)) <= tail


@settings(max_examples=25, deadline=None)
@given(st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 2))
def test_random_two_param_loci(u, v, a):
    f = parse_pcf(f"func f(s; y) {{ term coeff = 1, exp = s*y + {u}*y + {v}, factors = [y^{a}], when y >= 0; }}")
    r = compute_locus(f, "integrability")
    for s in range(-4, 4):
        assert r.contains((s,)) == monomial_verdicts(f, (s,))["integrability"]
