from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from presloci.ring import (
    FORMAL, AElement, ElementSyntaxError, FixedQ, cyclotomic, format_element, parse_element,
    parse_mode,
)

small = st.integers(-4, 4)


@st.composite
def elements(draw):
    num = draw(st.lists(small, min_size=1, max_size=4))
    shift = draw(st.integers(-3, 3))
    cyclo = draw(st.lists(st.tuples(st.integers(1, 6), st.integers(0, 2)), max_size=2))
    return AElement.make(num, shift, cyclo)


def test_cyclotomic_polynomials():
    assert cyclotomic(1) == (-1, 1)
    assert cyclotomic(2) == (1, 1)
    assert cyclotomic(6) == (1, -1, 1)


def test_geometric_and_pole_values():
    g = AElement.geometric(1)
    assert g.evaluate(2) == 2
    assert g.evaluate(3) == Fraction(3, 2)
    assert AElement.pole(2).evaluate(2) == Fraction(-1, 3)
    assert AElement.pole(-2) == AElement.geometric(2)
    with pytest.raises(ZeroDivisionError):
        AElement.pole(0)


def test_canonical_form_cancels_cyclotomic_factors():
    # (1 - L^-2) / (1 - L^-1) = 1 + L^-1
    a = (AElement.const(1) - AElement.L_power(-2)) * AElement.geometric(1)
    assert a == AElement.const(1) + AElement.L_power(-1)
    assert a.cyclotomic == ()


def test_parse_and_format_roundtrip():
    a = parse_element("(1 - L^-1)/(1 - L^-2)")
    assert str(a) == "L/(L + 1)"
    assert parse_element(format_element(a)) == a
    with pytest.raises(ElementSyntaxError):
        parse_element("1 +* L")


def test_json_roundtrip():
    a = parse_element("3/2 * L^2 / (1 - L^-3)")
    assert AElement.from_json(a.to_json()) == a


def test_parse_mode():
    assert parse_mode("formal") is FORMAL
    assert parse_mode("q=5/2") == FixedQ(Fraction(5, 2))
    with pytest.raises(ValueError):
        parse_mode("q=1")


def test_interval_enclosure_at_irrational_q():
    a = AElement.geometric(1)
    iv = a.evaluate_interval("sqrt(2)")
    # 1/(1 - 2^-1/2) = 2 + sqrt(2)
    exact = 2 + 2 ** 0.5
    assert iv.a - 1e-12 <= exact <= iv.b + 1e-12
    assert iv.delta < 1e-12


@settings(max_examples=150, deadline=None)
@given(elements(), elements(), st.sampled_from([2, 3, Fraction(5, 2), 7]))
def test_evaluation_is_a_ring_homomorphism(a, b, q):
    assert (a + b).evaluate(q) == a.evaluate(q) + b.evaluate(q)
    assert (a * b).evaluate(q) == a.evaluate(q) * b.evaluate(q)
    assert (a - a).is_zero()


@settings(max_examples=100, deadline=None)
@given(elements(), elements(), elements())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=100, deadline=None)
@given(elements())
def test_parse_format_property(a):
    assert parse_element(format_element(a)) == a
