from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from presloci.constructible import (
    ConstructibleFunction as CF, DomainError, NonAffineOnPiece, Term, combine_zero_loci,
    function_to_json, merge_monomials,
)
from presloci.dsl import parse_pcf
from presloci.poly import Poly
from presloci.presburger import TRUE, parse_formula
from presloci.rectilinear import rectilinearize
from presloci.ring import FORMAL, AElement, FixedQ

Q2 = FixedQ(2)
s, y = Poly.var("s"), Poly.var("y")


def f_sy():
    return CF.monomial(("s",), ("y",), exponent=s * y, support=parse_formula("y >= 0"))


def test_evaluate_formal_and_fixed():
    f = f_sy()
    assert f.evaluate((-1, 3), Q2) == Fraction(1, 8)
    assert f.evaluate((-1, 3)) == AElement.L_power(-3)
    assert f.evaluate((2, -1), Q2) == 0          # outside the support


def test_domain_error():
    f = f_sy().with_domain(parse_formula("s <= 0"))
    with pytest.raises(DomainError):
        f.evaluate((1, 0))


def test_arithmetic_pointwise():
    f = f_sy()
    g = CF.monomial(("s",), ("y",), coeff=3, factor=y)
    for pt in [(-2, 0), (-1, 4), (1, 2), (0, 5)]:
        assert (f + g).evaluate(pt, Q2) == f.evaluate(pt, Q2) + g.evaluate(pt, Q2)
        assert (f * g).evaluate(pt, Q2) == f.evaluate(pt, Q2) * g.evaluate(pt, Q2)
        assert (f - f).simplify().evaluate(pt, Q2) == 0
        assert f.square().evaluate(pt, Q2) == f.evaluate(pt, Q2) ** 2


def test_simplify_merges_terms():
    f = f_sy() + f_sy()
    g = f.simplify()
    assert len(g.terms) == 1
    assert g.evaluate((-1, 1), Q2) == 1


def test_specialize():
    f = parse_pcf("func f(; y) { term coeff = 1/(1 - L^-1), exp = -y, when y >= 0; }")
    g = f.specialize(Q2)
    assert g.evaluate((2,)) == Fraction(1, 2)


def test_restrict_and_substitute():
    f = f_sy().restrict(parse_formula("y <= 2"))
    assert f.evaluate((1, 3), Q2) == 0 and f.evaluate((1, 2), Q2) == 4
    g = f_sy().substitute({"s": Poly.const(-1)}, params=())
    assert g.params == () and g.evaluate((2,), Q2) == Fraction(1, 4)


def test_combine_zero_loci():
    h1 = CF.monomial(("s",), factor=s)
    h2 = CF.monomial(("s",), factor=s - 1)
    inter = combine_zero_loci("intersection", [h1, h2])
    union = combine_zero_loci("union", [h1, h2])
    assert [v for v in range(-3, 4) if inter.is_zero_at((v,), Q2)] == []
    assert [v for v in range(-3, 4) if union.is_zero_at((v,), Q2)] == [0, 1]
    assert combine_zero_loci("intersection", [], like=h1).terms == ()


def test_merge_monomials_on_piece():
    f = parse_pcf("func f(s; y) { term coeff = 1, exp = s*y, when y >= 0; "
                  "term coeff = 2, exp = s*y, when y >= 0; }")
    g = f.substitute({"s": Poly.const(-1)}, params=())
    union = parse_formula("y >= 0")
    (piece,) = rectilinearize(union, ("y",), (), [t.support for t in g.terms])
    form = merge_monomials(g, piece)
    assert len(form.monomials) == 1
    m = form.monomials[0]
    assert m.a == (0,) and m.b == (-1,)


def test_merge_rejects_parametric_slopes():
    f = f_sy()
    (piece,) = rectilinearize(parse_formula("y >= 0"), ("y",), ("s",))
    with pytest.raises(NonAffineOnPiece):
        merge_monomials(f, piece)


def test_json_and_str():
    js = function_to_json(f_sy())
    assert js["params"] == ["s"] and len(js["terms"]) == 1
    assert "func f(s; y)" in str(f_sy())


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-2, 2), st.integers(0, 2)), min_size=1, max_size=3),
       st.integers(-3, 3), st.integers(0, 6))
def test_simplify_preserves_values(spec, sv, yv):
    terms = tuple(Term(FORMAL.coerce(c), parse_formula(f"y >= {k}"), s * y * 0 + Poly.const(b) * y, Poly.const(1))
                  for c, b, k in spec)
    f = CF(("s",), ("y",), terms, TRUE, FORMAL)
    assert f.simplify().evaluate((sv, yv), Q2) == f.evaluate((sv, yv), Q2)
