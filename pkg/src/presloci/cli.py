"""Command-line entry point.

Exit status: 0 on success, 1 on usage or parse errors, 2 when ``verify``
or ``transfer`` finds a counterexample.  JSON output is printed with sorted
keys so identical inputs give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from itertools import product
from pathlib import Path
from typing import Sequence

from . import __version__
from .constructible import ConstructibleFunction
from .dsl import DslSyntaxError, format_pcf, parse_pcf
from .engine import KINDS, compute_locus, interpolate, sum_over_lattice
from .oracle import monomial_verdicts
from .presburger.formula import free_variables
from .presburger.parser import PresburgerSyntaxError, parse_formula
from .presburger.qe import ResourceLimitExceeded, eliminate_quantifiers
from .rectilinear import RectilinearizationError, rectilinearize
from .ring import FixedQ, parse_mode

KIND_NAMES = {"int": "integrability", "bdd": "boundedness", "iva": "vanishing"}
PADIC_KIND_NAMES = dict(KIND_NAMES, **{"local-int": "local-integrability", "local-bdd": "local-boundedness"})


class UsageError(Exception):
    pass


def _default_budget() -> int:
    try:
        return int(os.environ.get("PRESLOCI_BUDGET", "2000000"))
    except ValueError:
        return 2_000_000


def parse_box(text: str | None, arity: int) -> list[range]:
    """``"-5..5"`` (applied to every parameter) or ``"-5..5,0..3"``."""
    if arity == 0:
        return []
    if text is None:
        raise UsageError("--box is required for functions with parameters")
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) == 1:
        parts = parts * arity
    if len(parts) != arity:
        raise UsageError(f"--box needs 1 or {arity} ranges, got {len(parts)}")
    out = []
    for p in parts:
        lo, sep, hi = p.partition("..")
        try:
            a, b = int(lo), int(hi) if sep else int(lo)
        except ValueError:
            raise UsageError(f"bad range {p!r}; expected LO..HI") from None
        if b < a:
            raise UsageError(f"empty range {p!r}")
        out.append(range(a, b + 1))
    return out


def _value_str(v) -> str:
    return str(v)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_pcf(path: str, mode) -> ConstructibleFunction:
    f = parse_pcf(_read(path))
    if isinstance(mode, FixedQ):
        f = f.specialize(mode)
    return f


def _witness_report(loc, box) -> dict:
    out = {"kind": loc.kind, "mode": str(loc.mode), "everywhere": loc.is_everywhere(),
           "witness": format_pcf(loc.witness, "h")}
    if box:
        out["zero_set"] = [list(s) for s in loc.zero_set(box)]
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_qe(args) -> tuple[dict, int]:
    f = parse_formula(_read(args.input))
    g = eliminate_quantifiers(f, term_limit=args.budget)
    return {"input": str(f), "output": str(g), "free_variables": list(free_variables(f))}, 0


def cmd_rectilinearize(args) -> tuple[dict, int]:
    x = parse_formula(_read(args.input))
    if not args.lattice:
        raise UsageError("--lattice is required")
    lattice = [v.strip() for v in args.lattice.split(",") if v.strip()]
    params = [v for v in free_variables(x) if v not in lattice]
    pieces = rectilinearize(eliminate_quantifiers(x), lattice, params)
    return {"params": params, "lattice": lattice, "pieces": [p.to_json() for p in pieces]}, 0


def cmd_sum(args) -> tuple[dict, int]:
    mode = parse_mode(args.mode)
    f = _load_pcf(args.input, mode)
    res = sum_over_lattice(f)
    out: dict = {"mode": str(res.g.mode), "g": format_pcf(res.g, "g")}
    if res.validity.is_everywhere():
        out["validity"] = "all"
    else:
        out["validity"] = _witness_report(res.validity, None)
    if not f.params:
        if res.validity.is_everywhere() or res.validity.contains(()):
            out["value"] = _value_str(res.g.evaluate(()))
        else:
            out["value"] = None
    elif args.box:
        box = parse_box(args.box, len(f.params))
        vals = []
        for s in product(*box):
            ok = res.g.in_domain(s) and res.validity.contains(s)
            vals.append({"s": list(s), "value": _value_str(res.g.evaluate(s)) if ok else None})
        out["values"] = vals
    return out, 0


def cmd_loci(args) -> tuple[dict, int]:
    mode = parse_mode(args.mode)
    f = _load_pcf(args.input, mode)
    box = parse_box(args.box, len(f.params)) if (args.box or not f.params) else None
    kinds = [KIND_NAMES[args.kind]] if args.kind else list(KINDS)
    return {"loci": [_witness_report(compute_locus(f, k), box) for k in kinds]}, 0


def cmd_interpolate(args) -> tuple[dict, int]:
    mode = parse_mode(args.mode)
    f = _load_pcf(args.input, mode)
    g = interpolate(f)
    loc = compute_locus(g, "integrability")
    return {"g": format_pcf(g, "g"), "integrable_everywhere": loc.is_everywhere()}, 0


def cmd_verify(args) -> tuple[dict, int]:
    mode = parse_mode(args.mode)
    f = _load_pcf(args.input, mode)
    box = parse_box(args.box, len(f.params))
    kinds = [KIND_NAMES[args.kind]] if args.kind else list(KINDS)
    q = mode if isinstance(mode, FixedQ) else None
    checks, bad = [], []
    locs = {k: compute_locus(f, k) for k in kinds}
    for s in product(*box):
        if not locs[kinds[0]].witness.in_domain(s):
            continue
        oracle = monomial_verdicts(f, s, q)
        for k in kinds:
            got = locs[k].contains(s)
            row = {"s": list(s), "kind": k, "engine": got, "oracle": oracle[k]}
            checks.append(row)
            if got != oracle[k]:
                bad.append(row)
    return {"checked": len(checks), "counterexamples": bad, "ok": not bad}, (2 if bad else 0)


def _load_pint(path: str):
    from .padic import load_integrand
    try:
        return load_integrand(json.loads(_read(path)))
    except json.JSONDecodeError as e:
        raise DslSyntaxError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from None


def cmd_padic_integrate(args) -> tuple[dict, int]:
    from .padic import LocalFieldBackend, integrate_skeleton, numeric_integrate
    f = _load_pint(args.input)
    mode = parse_mode(args.mode)
    out: dict = {}
    if not f.oscillation:
        res = integrate_skeleton(f, mode)
        out["g"] = format_pcf(res.g, "g")
        out["validity"] = "all" if res.validity.is_everywhere() else _witness_report(res.validity, None)
        if not f.params and (res.validity.is_everywhere() or res.validity.contains(())):
            out["value"] = _value_str(res.g.evaluate(()))
    if args.backend:
        be = LocalFieldBackend(args.backend, args.p, args.depth, args.offset)
        s = [int(v) for v in args.s.split(",")] if args.s else []
        if len(s) != len(f.params):
            raise UsageError(f"--s needs {len(f.params)} values")
        out["numeric"] = numeric_integrate(f, be, s, budget=args.budget).to_json()
    return out, 0


def cmd_padic_locus(args) -> tuple[dict, int]:
    from .padic import locus_padic
    f = _load_pint(args.input)
    mode = parse_mode(args.mode)
    box = parse_box(args.box, len(f.params)) if (args.box or not f.params) else None
    kinds = [PADIC_KIND_NAMES[args.kind]] if args.kind else ["integrability", "boundedness", "vanishing"]
    return {"loci": [_witness_report(locus_padic(f, k, mode, punctured=args.punctured), box)
                     for k in kinds]}, 0


def cmd_transfer(args) -> tuple[dict, int]:
    from .padic import transfer_check
    f = _load_pint(args.input)
    primes = [int(p) for p in args.primes.split(",")]
    kinds = [KIND_NAMES[args.kind]] if args.kind else ["integrability"]
    box = parse_box(args.box or "-3..3", len(f.params))
    rep = transfer_check(f, kinds, primes, box, depth=args.depth, offset=args.offset)
    return rep.to_json(), (0 if rep.ok else 2)


COMMANDS = {
    "qe": cmd_qe, "rectilinearize": cmd_rectilinearize, "sum": cmd_sum, "loci": cmd_loci,
    "interpolate": cmd_interpolate, "padic-integrate": cmd_padic_integrate,
    "padic-locus": cmd_padic_locus, "transfer": cmd_transfer, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="presloci", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, *, mode=False, kind=None, box=False, padic=False, lattice=False):
        p = sub.add_parser(name)
        p.add_argument("--input", required=True)
        p.add_argument("--json", action="store_true", help="machine-readable output (default: human)")
        p.add_argument("--budget", type=int, default=_default_budget(), help="resource budget")
        if mode:
            p.add_argument("--mode", default="formal", help="formal or q=<rational>")
        if kind:
            p.add_argument("--kind", choices=kind)
        if box:
            p.add_argument("--box", help="parameter range, e.g. -5..5 or -5..5,0..3")
        if padic:
            p.add_argument("--backend", choices=["qp", "fpt"])
            p.add_argument("--p", type=int, default=2)
            p.add_argument("--depth", type=int, default=12)
            p.add_argument("--offset", type=int, default=0)
            p.add_argument("--s", help="comma-separated parameter values for numeric runs")
        if lattice:
            p.add_argument("--lattice", help="comma-separated lattice variables")
        return p

    add("qe")
    add("rectilinearize", lattice=True)
    add("sum", mode=True, box=True)
    add("loci", mode=True, kind=list(KIND_NAMES), box=True)
    add("interpolate", mode=True)
    add("verify", mode=True, kind=list(KIND_NAMES), box=True)
    add("padic-integrate", mode=True, padic=True)
    pl = add("padic-locus", mode=True, kind=list(PADIC_KIND_NAMES), box=True)
    pl.add_argument("--punctured", action="store_true",
                    help="local kinds on the complement of the coordinate hyperplanes")
    t = add("transfer", kind=list(KIND_NAMES), box=True)
    t.add_argument("--primes", default="2,3,5,7")
    t.add_argument("--depth", type=int, default=24)
    t.add_argument("--offset", type=int, default=4)
    return ap


def _human(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_human(v, indent + 1))
            elif isinstance(v, str) and "\n" in v:
                lines.append(f"{pad}{k}:")
                lines.extend(pad + "  " + ln for ln in v.splitlines())
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {json.dumps(v, sort_keys=True) if not isinstance(v, str) else v}"
                         for v in obj)
    return pad + str(obj)


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # ranges such as "-5..5" start with a dash; glue them to their flag
    for i in range(len(argv) - 1):
        if argv[i] in ("--box", "--s") and argv[i + 1].startswith("-"):
            argv[i:i + 2] = [f"{argv[i]}={argv[i + 1]}", ""]
    argv = [a for a in argv if a != ""]
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        report, status = COMMANDS[args.command](args)
    except (UsageError, ValueError, ResourceLimitExceeded, RectilinearizationError) as e:
        where = ""
        if isinstance(e, (DslSyntaxError, PresburgerSyntaxError)):
            where = f"{args.input}:{e.line}:{e.col}: "
            msg = e.message
        else:
            msg = str(e)
        print(f"presloci {args.command}: {where}{msg}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(_human(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
