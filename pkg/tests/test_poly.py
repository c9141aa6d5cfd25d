from fractions import Fraction

from hypothesis import given, settings, strategies as st

from presloci.poly import Poly, format_poly
from presloci.presburger.terms import LinearTerm

x, y = Poly.var("x"), Poly.var("y")


def test_basic_arithmetic_and_degree():
    p = (x + 1) * (x - 1)
    assert p == x * x - 1
    assert p.degree() == 2 and p.degree_in("y") == 0
    assert (x * y + 3).variables == ("x", "y")


def test_coefficients_and_split():
    p = x * x * y + 2 * x + y
    cs = p.coefficients_in("x")
    assert cs[2] == y and cs[1] == Poly.const(2) and cs[0] == y
    split = p.coefficient_split(["x", "y"])
    assert split[(2, 1)] == Poly.const(1)


def test_affine_conversion():
    t = LinearTerm.make({"x": 2, "y": -1}, 3)
    p = Poly.from_linear(t)
    assert p.is_affine()
    assert p.to_linear() == t


def test_substitute_and_evaluate():
    p = x * x + y
    assert p.substitute({"x": y + 1}) == y * y + 3 * y + 1
    assert p.evaluate({"x": 2, "y": Fraction(1, 2)}) == Fraction(9, 2)


def test_format():
    assert format_poly(x * x - 2 * x + 1) in ("x^2 - 2*x + 1", "x^2 - 2x + 1")


coeffs = st.integers(-5, 5)


@st.composite
def polys(draw):
    terms = draw(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2), coeffs), max_size=4))
    return Poly([(tuple(v for v in (("x", a), ("y", b)) if v[1]), c) for a, b, c in terms])


@settings(max_examples=100, deadline=None)
@given(polys(), polys(), st.integers(-4, 4), st.integers(-4, 4))
def test_evaluation_homomorphism(p, q, a, b):
    env = {"x": a, "y": b}
    assert (p * q).evaluate(env) == p.evaluate(env) * q.evaluate(env)
    assert (p + q).evaluate(env) == p.evaluate(env) + q.evaluate(env)
