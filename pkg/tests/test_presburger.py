import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from presloci.oracle import grid_evaluate
from presloci.presburger import (
    FALSE, TRUE, PresburgerSyntaxError, ResourceLimitExceeded, conj, disj, dvd, eliminate_quantifiers,
    equivalent, evaluate, exists, forall, free_variables, ge, is_quantifier_free, is_satisfiable,
    is_valid, neg, parse_formula,
)
from presloci.presburger.formula import evaluate_formula, format_formula, nnf, substitute
from presloci.presburger.functions import (
    EmptyFiberError, FiberSizeError, NotAFunctionError, PiecewiseAffineFunction,
    definable_choice, extract_piecewise_affine,
)
from presloci.presburger.terms import LinearTerm as T

x, y = T.var("x"), T.var("y")


# -- terms and smart constructors ------------------------------------------

def test_linear_terms_normalize():
    assert T.make({"x": 2, "y": 0}, 1) == 2 * x + 1
    assert (x + y - x).variables == ("y",)
    assert (x / 2).denominator() == 2


def test_dvd_normalization():
    assert dvd(1, x) is TRUE
    assert dvd(3, T.constant(6)) is TRUE
    assert dvd(3, T.constant(7)) is FALSE
    assert dvd(4, 2 * x + 2) == dvd(2, x + 1)
    assert dvd(2, 3 * x) == dvd(2, x)


def test_conj_disj_simplify():
    assert conj(ge(x), TRUE) == ge(x)
    assert conj(ge(x), neg(ge(x))) is FALSE
    assert disj(ge(x), neg(ge(x))) is TRUE


# -- parser -----------------------------------------------------------------

def test_parse_examples():
    f = parse_formula("exists y. x = 2*y and y >= 1")
    assert free_variables(f) == ("x",)
    assert [v for v in range(-3, 8) if evaluate(f, {"x": v}, box=20)] == [2, 4, 6]
    g = parse_formula("x mod 3 = 1 -> x >= 0")
    assert evaluate(g, {"x": -2}) is False and evaluate(g, {"x": -1}) is True


def test_parse_error_location():
    with pytest.raises(PresburgerSyntaxError) as e:
        parse_formula("x >= 0 and\n  y <")
    assert (e.value.line, e.value.col) == (2, 6) or e.value.line == 2


def test_format_roundtrip():
    f = parse_formula("x >= 2 and (y <= x or x mod 4 = 1) and not y = 3")
    assert equivalent(parse_formula(format_formula(f)), f)


# -- quantifier elimination -------------------------------------------------

def test_qe_even_numbers():
    g = eliminate_quantifiers(parse_formula("exists y. x = 2*y"))
    assert is_quantifier_free(g)
    assert all(evaluate(g, {"x": v}) == (v % 2 == 0) for v in range(-10, 11))


def test_qe_forall():
    # every y between x and x + 2 is >= 0  <=>  x >= 0
    g = eliminate_quantifiers(parse_formula("forall y. (x <= y and y <= x + 2) -> y >= 0"))
    assert equivalent(g, ge(x))


def test_qe_nested_and_validity():
    assert is_valid(parse_formula("forall x. exists y. x = 2*y or x = 2*y + 1"))
    assert not is_satisfiable(parse_formula("exists x. 2*x = 1"))
    assert is_satisfiable(parse_formula("exists x. 3*x = y + 1 and y >= 5"))


def test_qe_budget():
    f = parse_formula("exists a. exists b. exists c. x = 3*a + 5*b + 7*c and a >= 0 and b >= 0 and c >= 0")
    with pytest.raises(ResourceLimitExceeded):
        eliminate_quantifiers(f, term_limit=3)


def test_nnf_and_substitution():
    f = parse_formula("not (x >= 1 and y mod 2 = 0)")
    assert equivalent(nnf(f), f)
    g = substitute(parse_formula("x >= y"), {"y": x + 1})
    assert g is FALSE


def test_evaluate_formula_tuple():
    f = parse_formula("x + y <= 3")
    assert evaluate_formula(f, (1, 2)) and not evaluate_formula(f, (2, 2))


@st.composite
def qf_formulas(draw, vs=("x", "y")):
    def atom():
        t = T.make({v: draw(st.integers(-3, 3)) for v in vs}, draw(st.integers(-4, 4)))
        if draw(st.booleans()):
            return dvd(draw(st.integers(2, 4)), t)
        return ge(t)

    def build(d):
        if d == 0 or draw(st.booleans()):
            a = atom()
            return neg(a) if draw(st.booleans()) else a
        parts = [build(d - 1) for _ in range(draw(st.integers(2, 3)))]
        return conj(*parts) if draw(st.booleans()) else disj(*parts)

    return build(2)


@settings(max_examples=60, deadline=None)
@given(qf_formulas(), st.booleans())
def test_qe_matches_windowed_enumeration(body, universal):
    # bounded quantifier over y in [x-5, x+5], checked on x in [-20, 20]
    guard = conj(ge(y - x + 5), ge(x - y + 5))
    f = forall("y", disj(neg(guard), body)) if universal else exists("y", conj(guard, body))
    g = eliminate_quantifiers(f)
    xs = np.arange(-20, 21)
    want = np.broadcast_to(grid_evaluate(f, {"x": xs}, {"y": (x, 5)}), xs.shape)
    got = np.broadcast_to(grid_evaluate(g, {"x": xs}), xs.shape)
    assert np.array_equal(want, got)


@settings(max_examples=60, deadline=None)
@given(qf_formulas())
def test_nnf_preserves_truth(f):
    for a, b in itertools.product(range(-4, 5), repeat=2):
        env = {"x": a, "y": b}
        assert evaluate(nnf(f), env) == evaluate(f, env)


# -- Presburger functions ---------------------------------------------------

def test_extract_absolute_value():
    graph = parse_formula("(x >= 0 and y = x) or (x < 0 and y = -x)")
    h = extract_piecewise_affine(graph, 1, 1, ("x", "y"))
    assert [h(v) for v in range(-3, 4)] == [3, 2, 1, 0, 1, 2, 3]


def test_extract_floor_half():
    graph = parse_formula("2*y <= x and x < 2*y + 2")
    h = extract_piecewise_affine(graph, 1, 1, ("x", "y"))
    assert [h(v) for v in range(-4, 5)] == [v // 2 for v in range(-4, 5)]


def test_not_a_function():
    with pytest.raises(NotAFunctionError):
        extract_piecewise_affine(parse_formula("y >= x"), 1, 1, ("x", "y"))


def test_absolute_constructor_and_graph():
    h = PiecewiseAffineFunction.absolute(("x",), x - 2)
    assert h(0) == 2 and h(5) == 3
    assert evaluate(h.graph(["y"]), {"x": -1, "y": 3})


def test_definable_choice_selectors():
    s = parse_formula("0 <= y and y <= 2 and x - y mod 2 = 0")
    sels = definable_choice(s, ["x"], "y", 2, domain=TRUE)
    for v in range(-3, 4):
        fiber = [w for w in range(0, 3) if (w - v) % 2 == 0]
        picked = sorted({h(v) for h in sels})
        assert picked == fiber


def test_definable_choice_errors():
    with pytest.raises(FiberSizeError):
        definable_choice(parse_formula("0 <= y and y <= 5"), [], "y", 2)
    with pytest.raises(EmptyFiberError):
        definable_choice(parse_formula("0 <= y and y <= x"), ["x"], "y", 100,
                         domain=parse_formula("x >= -3 and x <= 3"))
