"""Loader for ``.pint`` integrand files (JSON).

    {
      "params": ["s"],
      "rvars": ["r"],
      "cells": [{"valuation": "r >= 0", "coords": [{"ac": "all"}]}],
      "amplitude": "func F(s; r) { term coeff = 1, exp = -s*r; }",
      "phases": [{"monomial": "1 * p^0 * x1^1", "weight": "func g(s; r) { term coeff = 1; }"}]
    }

``coords`` entries are ``{"zero": true}``, ``{"ac": "all"}`` or
``{"ac": [1, ...]}``; ``weight`` is optional (default 1).
"""
from __future__ import annotations

import json
import re
from pathlib import Path

from ..constructible import ConstructibleFunction
from ..dsl import parse_pcf
from ..presburger.parser import parse_formula
from .skeleton import CoordinateSpec, Phase, SkeletonCell, SkeletonIntegrand


class IntegrandFormatError(ValueError):
    pass


_FACTOR = re.compile(r"^(?:(-?\d+)|p\^(-?\d+)|x(\d*)(?:\^(\d+))?)$")


def parse_phase(text: str, dim: int) -> Phase:
    unit, pexp = 1, 0
    exps = [0] * dim
    seen_unit = False
    for raw in text.split("*"):
        tok = raw.strip().replace(" ", "")
        m = _FACTOR.match(tok)
        if not m:
            raise IntegrandFormatError(f"bad phase factor {tok!r} in {text!r}")
        if m.group(1) is not None:
            if seen_unit:
                raise IntegrandFormatError(f"two constants in phase {text!r}")
            unit, seen_unit = int(m.group(1)), True
        elif m.group(2) is not None:
            pexp += int(m.group(2))
        else:
            i = int(m.group(3) or "1") - 1
            if not 0 <= i < dim:
                raise IntegrandFormatError(f"variable x{i + 1} out of range in {text!r}")
            exps[i] += int(m.group(4) or "1")
    return Phase(unit, pexp, tuple(exps))


def _coord(obj) -> CoordinateSpec:
    if obj.get("zero"):
        return CoordinateSpec(zero=True)
    ac = obj.get("ac", "all")
    return CoordinateSpec(ac=None if ac == "all" else tuple(int(a) for a in ac))


def load_integrand(obj: dict | str | Path) -> SkeletonIntegrand:
    if isinstance(obj, Path) or (isinstance(obj, str) and not obj.lstrip().startswith("{")):
        obj = json.loads(Path(obj).read_text())
    elif isinstance(obj, str):
        obj = json.loads(obj)
    try:
        params = tuple(obj.get("params", ()))
        rvars = tuple(obj["rvars"])
        amp = parse_pcf(obj["amplitude"])
        amp = ConstructibleFunction(params, rvars, amp.terms, amp.domain, amp.mode) \
            if amp.params != params or amp.lattice != rvars else amp
        cells = tuple(SkeletonCell(parse_formula(c.get("valuation", "true")),
                                   tuple(_coord(x) for x in c["coords"])) for c in obj["cells"])
        osc = []
        for ph in obj.get("phases", ()):
            w = ph.get("weight", 1)
            w = parse_pcf(w) if isinstance(w, str) else ConstructibleFunction.constant(w, params, rvars)
            w = ConstructibleFunction(params, rvars, w.terms, w.domain, w.mode)
            osc.append((parse_phase(ph["monomial"], len(rvars)), w))
        return SkeletonIntegrand(params, rvars, cells, amp, tuple(osc))
    except KeyError as e:
        raise IntegrandFormatError(f"missing field {e.args[0]!r}") from None
    except (TypeError, AttributeError) as e:
        raise IntegrandFormatError(f"malformed integrand: {e}") from None


def dump_integrand(f: SkeletonIntegrand) -> dict:
    from ..dsl import format_pcf
    out = {"params": list(f.params), "rvars": list(f.rvars),
           "cells": [c.to_json() for c in f.cells], "amplitude": format_pcf(f.amplitude, "F")}
    if f.oscillation:
        out["phases"] = [{"monomial": str(ph), "weight": format_pcf(g, "g")} for ph, g in f.oscillation]
    return out
