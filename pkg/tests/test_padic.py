import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from presloci.fixtures import PADIC_FIXTURES, load_padic_fixture
from presloci.padic import (
    EnumerationBudgetError, IntegrandFormatError, LocalFieldBackend, conjugate_oscillation,
    dump_integrand, fourier_finite, integrate_skeleton, inverse_fourier_finite, load_integrand,
    locus_padic, numeric_integrate, parse_phase, reduce_integrand, shell_verdict, transfer_check,
    witness_max_coeff,
)
from presloci.padic.skeleton import CoordinateSpec, UnsupportedIntegrand
from presloci.ring import FixedQ


def ball(amplitude, params=(), phases=(), coords=None, valuation="r >= 0"):
    obj = {"params": list(params), "rvars": ["r"],
           "cells": [{"valuation": valuation, "coords": coords or [{"ac": "all"}]}],
           "amplitude": amplitude}
    if phases:
        obj["phases"] = list(phases)
    return load_integrand(obj)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_volume_of_unit_ball(p):
    f = ball("func F(; r) { term coeff = 1; }")
    assert integrate_skeleton(f).value((), FixedQ(p)) == 1
    assert abs(numeric_integrate(f, LocalFieldBackend("qp", p, 10)).value - 1) < 1e-3


@pytest.mark.parametrize("p", [2, 3, 5])
def test_angular_component_restriction(p):
    # units with first digit 1: volume (1/p) on each shell r >= 0
    f = ball("func F(; r) { term coeff = 1; }", coords=[{"ac": [1]}])
    want = Fraction(1, p) / (1 - Fraction(1, p))
    assert integrate_skeleton(f).value((), FixedQ(p)) == want
    assert abs(numeric_integrate(f, LocalFieldBackend("fpt", p, 14)).value - float(want)) < 1e-3


def test_two_dim_norm_product():
    f = load_padic_fixture("norm_st_2d")
    res = integrate_skeleton(f)
    for p in (2, 3):
        for s, t in [(0, 0), (1, 0), (2, 1)]:
            one = (1 - Fraction(1, p)) / (1 - Fraction(1, p) ** (1 + s))
            two = (1 - Fraction(1, p)) / (1 - Fraction(1, p) ** (1 + t))
            assert res.value((s, t), FixedQ(p)) == one * two
    loc = locus_padic(f, "integrability")
    assert loc.contains((0, 0), FixedQ(2)) and not loc.contains((-1, 0), FixedQ(2))


def test_norm_s_loci():
    f = load_padic_fixture("norm_s")
    box = [range(-3, 4)]
    assert locus_padic(f, "int").zero_set(box) == [(s,) for s in range(0, 4)]
    assert locus_padic(f, "bdd").zero_set(box) == [(s,) for s in range(0, 4)]
    assert locus_padic(f, "iva").zero_set(box) == []


def test_punctured_local_integrability():
    f = load_padic_fixture("norm_s")
    box = [range(-3, 4)]
    assert locus_padic(f, "local-int").zero_set(box) == [(s,) for s in range(0, 4)]
    assert locus_padic(f, "local-int", punctured=True).zero_set(box) == [(s,) for s in range(-3, 4)]


def test_backends_agree_without_oscillation():
    f = load_padic_fixture("abs_x")
    for p in (2, 3):
        a = numeric_integrate(f, LocalFieldBackend("qp", p, 12)).value
        b = numeric_integrate(f, LocalFieldBackend("fpt", p, 12)).value
        assert abs(a - b) < 1e-12
        assert reduce_integrand(f).serialized() == reduce_integrand(load_padic_fixture("abs_x")).serialized()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_psi_conventions(p):
    # psi is trivial on pO and nontrivial on O
    one = "func F(; r) { term coeff = 1; }"
    phase = [{"monomial": "1 * x1"}]
    cases = [("r >= 1", 1 / p), ("r >= 0", 0.0), ("r = 0", -1 / p), ("r = -1", 0.0)]
    for kind in ("qp", "fpt"):
        be = LocalFieldBackend(kind, p, 8, offset=2)
        for val, want in cases:
            f = ball(one, phases=phase, valuation=val)
            assert abs(numeric_integrate(f, be).value - want) < 1e-9, (kind, val)


def test_conjugation():
    f = load_padic_fixture("psi_norm_s")
    g = conjugate_oscillation(f)
    be = LocalFieldBackend("qp", 3, 8)
    a = numeric_integrate(f, be, (1,)).value
    b = numeric_integrate(g, be, (1,)).value
    assert abs(a - b.conjugate()) < 1e-12


def test_oscillatory_has_no_exact_reduction():
    with pytest.raises(UnsupportedIntegrand):
        reduce_integrand(load_padic_fixture("psi_norm_s"))


def test_budget():
    f = load_padic_fixture("norm_st_2d")
    with pytest.raises(EnumerationBudgetError):
        numeric_integrate(f, LocalFieldBackend("qp", 7, 12), (0, 0), budget=10)


def test_backend_validation():
    with pytest.raises(ValueError):
        LocalFieldBackend("reals", 2, 4)
    with pytest.raises(ValueError):
        LocalFieldBackend("qp", 4, 4)
    with pytest.raises(ValueError):
        LocalFieldBackend("qp", 2, 0)


def test_shell_verdict():
    assert shell_verdict([2.0 ** -k for k in range(12)])
    assert not shell_verdict([1.0] * 12)
    assert shell_verdict([0.0] * 12)


@pytest.mark.parametrize("name", sorted(PADIC_FIXTURES))
def test_dump_load_roundtrip(name):
    f = load_padic_fixture(name)
    g = load_integrand(json.dumps(dump_integrand(f)))
    assert dump_integrand(g) == dump_integrand(f)


@pytest.mark.parametrize("obj", [
    {"cells": [], "amplitude": "func F(; r) { term coeff = 1; }"},
    {"rvars": ["r"], "cells": [{"coords": [{"ac": "all"}]}], "amplitude": 5},
    {"rvars": ["r"], "cells": [{"coords": [{"ac": "all"}]}], "amplitude": "func F(; r) { term coeff = 1; }",
     "phases": [{"monomial": "1 * x2"}]},
])
def test_io_errors(obj):
    with pytest.raises(IntegrandFormatError):
        load_integrand(obj)


def test_phase_parser_and_coords():
    ph = parse_phase("3 * p^-2 * x1^2 * x2", 2)
    assert (ph.unit, ph.pexp, ph.exponents) == (3, -2, (2, 1))
    with pytest.raises(IntegrandFormatError):
        parse_phase("3 * 4", 1)
    with pytest.raises(ValueError):
        CoordinateSpec(zero=True, ac=(1,))
    with pytest.raises(ValueError):
        CoordinateSpec(ac=(0,))


def test_transfer_small():
    rep = transfer_check(load_padic_fixture("abs_x"), ["integrability"], [2, 3], [[]], depth=12, offset=2)
    assert rep.ok


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 10_000))
def test_fourier_inverse_and_parseval(p, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=p) + 1j * rng.normal(size=p)
    fh = fourier_finite(f, p)
    assert np.allclose(inverse_fourier_finite(fh, p), f)
    assert np.isclose(np.sum(np.abs(fh) ** 2), p * np.sum(np.abs(f) ** 2))


def test_witness_errors():
    with pytest.raises(ValueError):
        witness_max_coeff([1, 1], [1, 1 + 5], 5)
    with pytest.raises(ValueError):
        witness_max_coeff([1], [0, 1], 3)
    assert witness_max_coeff([1], [2], 3) in range(3)
