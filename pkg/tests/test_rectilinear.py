import itertools

import pytest
from hypothesis import given, settings, strategies as st

from presloci.fixtures import RECT_FIXTURES, load_rect_fixture
from presloci.presburger import conj, evaluate, ge, implies, is_valid, parse_formula
from presloci.presburger.formula import substitute
from presloci.presburger.terms import LinearTerm as T
from presloci.rectilinear import rectilinearize, slice_1d


def _points(x, params, lattice, s, box=12):
    env = dict(zip(params, s))
    return {y for y in itertools.product(range(-box, box + 1), repeat=len(lattice))
            if evaluate(x, dict(env, **dict(zip(lattice, y))))}


def _check_pieces(x, params, lattice, svals, box=12):
    pieces = rectilinearize(x, lattice, params)
    for s in svals:
        env = dict(zip(params, s))
        want = _points(x, params, lattice, s, box)
        seen = set()
        for p in pieces:
            for y in _points(p.source, params, lattice, s, box):
                assert y not in seen
                seen.add(y)
                e = dict(env, **dict(zip(lattice, y)))
                z = [t.evaluate(e) for t in p.forward]
                ze = dict(env, **dict(zip(p.zvars, z)))
                assert evaluate(p.target(), ze)
                assert tuple(t.evaluate(ze) for t in p.inverse) == y
        assert seen == want
    return pieces


def test_slice_interval():
    sl = slice_1d(parse_formula("0 <= y and y <= s"), "y")
    assert len(sl) == 1
    assert sl[0].width == T.var("s") and sl[0].step == 1
    assert evaluate(sl[0].guard, {"s": 0}) and not evaluate(sl[0].guard, {"s": -1})


def test_slice_congruence_uses_steps():
    sl = slice_1d(parse_formula("y >= 0 and y mod 3 = 1"), "y")
    assert [(s.step, str(s.offset), s.width) for s in sl] == [(3, "1", None)]


def test_slice_markers_are_decided():
    x = parse_formula("y >= 0")
    m = parse_formula("y >= 3")
    sls = slice_1d(x, "y", [m])
    assert len(sls) == 2
    assert {str(s.markers[0]) for s in sls} == {"true", "false"}


@pytest.mark.parametrize("name", sorted(RECT_FIXTURES))
def test_fixture_bijections(name):
    x, params, lattice = load_rect_fixture(name)
    svals = list(itertools.product(range(-2, 5), repeat=len(params)))
    box = 12 if len(lattice) < 3 else 5
    _check_pieces(x, params, lattice, svals, box)


def test_piece_json_shape():
    x, params, lattice = load_rect_fixture("simplex_s")
    (p,) = rectilinearize(x, lattice, params)
    js = p.to_json()
    assert js["shape_l"] == 0 and js["params"] == ["s"]
    assert len(js["matrix"]) == 2 and all(len(r) == 2 for r in js["matrix"])


def test_markers_split_pieces():
    x = parse_formula("y1 >= 0 and y2 >= 0")
    m = [parse_formula("y2 <= y1"), parse_formula("y2 >= y1 + 1")]
    pieces = rectilinearize(x, ("y1", "y2"), (), m)
    for p in pieces:
        # each marker is decided on every piece
        assert all(str(k) in ("true", "false") for k in p.markers)
    assert sum(p.shape_l == 2 for p in pieces) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3), st.integers(0, 3),
       st.integers(1, 3))
def test_random_two_dim_cones(a, b, c, d, m):
    # y1 >= a, c*y2 <= y1 + d, y2 >= b, with a congruence on y1
    x = conj(ge(T.var("y1") - a), ge(T.var("y1") + d - T.var("y2") * c), ge(T.var("y2") - b),
             parse_formula(f"y1 mod {m} = 0") if m > 1 else parse_formula("true"))
    _check_pieces(x, (), ("y1", "y2"), [()], box=10)


def test_substituted_targets_are_products():
    x, params, lattice = load_rect_fixture("wedge")
    (p,) = rectilinearize(x, lattice, params)
    fwd = dict(zip(p.zvars, p.forward))
    assert is_valid(implies(p.source, substitute(p.target(), fwd)))
    assert p.shape_l == 2 and not p.bounded
