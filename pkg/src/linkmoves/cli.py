"""Command-line front end: validation, invariants, move scripts, fuzzing, and
the equivalence deciders.

Every command reads diagrams from file arguments (``-`` for stdin) in the
text or JSON format and writes JSON to stdout (``--pretty`` renders a human
summary instead).  Exit codes: 0/1/2 report equivalent/distinct/inconclusive
for the deciders, 64 usage, 65 parse or validation, 66 crossing cap, 70
internal error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import catalog
from .classify import self_pass_verdict, self_sharp_verdict, theorem12_check
from .diagram import Diagram, DiagramError, parse
from .invariants import (CapExceeded, arf_knot, conway, invariant_profile,
                         linking_matrix)
from .milnor import mu_bar
from .moves import (BandSpec, MoveError, MoveSite, _apply_band, apply_move,
                    random_move_sequence)

EX_OK, EX_DISTINCT, EX_INCONCLUSIVE = 0, 1, 2
EX_USAGE, EX_DATA, EX_CAP, EX_INTERNAL = 64, 65, 66, 70


def _read_diagram(path: str) -> Diagram:
    text = sys.stdin.read() if path == "-" else open(path).read()
    return parse(text)


def _emit(doc: dict, pretty: bool) -> None:
    if pretty:
        for line in _render(doc):
            print(line)
    else:
        print(json.dumps(doc, sort_keys=True))


def _render(doc, indent=0):
    pad = "  " * indent
    if isinstance(doc, dict):
        for k in sorted(doc):
            v = doc[k]
            if isinstance(v, (dict, list)) and v:
                yield f"{pad}{k}:"
                yield from _render(v, indent + 1)
            else:
                yield f"{pad}{k}: {v}"
    elif isinstance(doc, list):
        for v in doc:
            if isinstance(v, (dict, list)):
                yield from _render(v, indent + 1)
            else:
                yield f"{pad}- {v}"
    else:
        yield f"{pad}{doc}"


# ----- move scripts ---------------------------------------------------------

_MOVE_LINE = re.compile(
    r"^move\s+(\w+)\s+at\s+arcs=([\d,]+)(?:\s+dir=(fwd|bwd))?(?:\s+variant=(\d+))?$")


def _run_script(d: Diagram, text: str):
    applied = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("band"):
            doc = json.loads(line[len("band"):].strip())
            spec = BandSpec.from_json_dict(doc)
            d = _apply_band(d, spec.from_[1], spec.to[1], spec.twists, spec.route)
            applied += 1
            continue
        m = _MOVE_LINE.match(line)
        if not m:
            raise MoveError(f"script line {lineno}: cannot parse {line!r}")
        kind, arcs, direction, variant = m.groups()
        site = MoveSite(kind, tuple(int(a) for a in arcs.split(",")),
                        direction or "fwd", int(variant or 0))
        d = apply_move(d, site)
        applied += 1
    return d, applied


# ----- fuzz checks ----------------------------------------------------------


def _check_property(name, base, moved, cap):
    from .invariants import arf_link, is_proper, all_selectors
    if name == "arf-flip":
        return arf_knot(moved, cap) == 1 - arf_knot(base, cap)
    if name == "conway-preserved":
        return conway(moved, cap).coeffs == conway(base, cap).coeffs
    if name == "lk-preserved":
        return linking_matrix(moved).tolist() == linking_matrix(base).tolist()
    if name == "mu-preserved":
        m1, m2 = mu_bar(base), mu_bar(moved)
        return m1.lk == m2.lk and m1.triples == m2.triples
    if name == "arf-preserved":
        for sel in all_selectors(base.n_components):
            if is_proper(base, sel) != is_proper(moved, sel):
                return False
            if is_proper(base, sel) and arf_link(base, sel, cap) != arf_link(moved, sel, cap):
                return False
        return True
    if name == "theorem12":
        return theorem12_check(base, moved, assume_homotopic=True, cap=cap)
    raise MoveError(f"unknown check {name!r}")


def _cmd_fuzz(args) -> int:
    d = _read_diagram(args.diagram)
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    if args.check:
        applied = 0
        passed = 0
        attempts = 0
        seed = args.seed
        while applied < args.count and attempts < 10 * args.count:
            attempts += 1
            seq = random_move_sequence(d, kinds, args.self_only, 1, seed,
                                       max_crossings=args.cap or 16)
            seed += 1
            if not seq:
                continue
            applied += 1
            if _check_property(args.check, d, seq[0][1], args.cap):
                passed += 1
        doc = {"check": args.check, "iterations": args.count,
               "applied": applied, "passed": passed, "failed": applied - passed}
        _emit(doc, args.pretty)
        return EX_OK if (applied == args.count and passed == applied) else EX_DISTINCT
    seq = random_move_sequence(d, kinds, args.self_only, args.count, args.seed,
                               max_crossings=args.cap or 16)
    doc = {
        "moves": [{"kind": s.kind, "strands": list(s.strands),
                   "direction": s.direction, "variant": s.variant}
                  for s, _d in seq],
        "diagram": (seq[-1][1] if seq else d).to_json_dict(),
    }
    _emit(doc, args.pretty)
    return EX_OK


# ----- command handlers -------------------------------------------------------


def _cmd_validate(args) -> int:
    out = []
    for path in args.diagrams:
        d = _read_diagram(path)
        out.append({"file": path, "ok": True,
                    "components": d.n_components, "crossings": d.n_crossings})
    _emit({"validated": out}, args.pretty)
    return EX_OK


def _cmd_invariants(args) -> int:
    d = _read_diagram(args.diagram)
    profile = invariant_profile(d, cap=args.cap, with_mu=not args.no_mu)
    _emit(profile.to_json_dict(), args.pretty)
    return EX_OK


def _cmd_compare(args) -> int:
    d1 = _read_diagram(args.diagram1)
    d2 = _read_diagram(args.diagram2)
    decide = self_pass_verdict if args.mode == "pass" else self_sharp_verdict
    verdict = decide(d1, d2, assume_homotopic=args.assume_homotopic, cap=args.cap)
    _emit(verdict.to_json_dict(), args.pretty)
    return verdict.exit_code


def _cmd_theorem12(args) -> int:
    d1 = _read_diagram(args.diagram1)
    d2 = _read_diagram(args.diagram2)
    ok = theorem12_check(d1, d2, assume_homotopic=args.assume_homotopic, cap=args.cap)
    _emit({"theorem12": bool(ok)}, args.pretty)
    return EX_OK if ok else EX_DISTINCT


def _cmd_move(args) -> int:
    d = _read_diagram(args.diagram)
    script = sys.stdin.read() if args.script == "-" else open(args.script).read()
    d2, applied = _run_script(d, script)
    _emit({"applied": applied, "diagram": d2.to_json_dict()}, args.pretty)
    return EX_OK


def _cmd_catalog(args) -> int:
    entry = catalog.get(args.name)
    doc = {"name": entry.name,
           "diagram": entry.diagram.to_json_dict(),
           "text": entry.diagram.to_text(),
           "expected": entry.expected}
    _emit(doc, args.pretty)
    return EX_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linkmoves", description=__doc__)
    ap.add_argument("--pretty", action="store_true", help="human-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate diagram files")
    p.add_argument("diagrams", nargs="+")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("invariants", help="full invariant profile of a link")
    p.add_argument("diagram")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--no-mu", action="store_true")
    p.set_defaults(fn=_cmd_invariants)

    p = sub.add_parser("compare", help="decide self pass/sharp equivalence")
    p.add_argument("diagram1")
    p.add_argument("diagram2")
    p.add_argument("--mode", choices=("pass", "sharp"), required=True)
    p.add_argument("--assume-homotopic", action="store_true")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("theorem12", help="check the reduced-Arf congruence")
    p.add_argument("diagram1")
    p.add_argument("diagram2")
    p.add_argument("--assume-homotopic", action="store_true")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(fn=_cmd_theorem12)

    p = sub.add_parser("move", help="apply a move script to a diagram")
    p.add_argument("script", help="move script file ('-' for stdin)")
    p.add_argument("diagram")
    p.set_defaults(fn=_cmd_move)

    p = sub.add_parser("fuzz", help="apply random moves, optionally checking a property")
    p.add_argument("diagram")
    p.add_argument("--kinds", required=True, help="comma-separated move kinds")
    p.add_argument("--self-only", action="store_true")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", default=None,
                   help="arf-flip | arf-preserved | lk-preserved | mu-preserved"
                        " | conway-preserved | theorem12")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(fn=_cmd_fuzz)

    p = sub.add_parser("catalog", help="print a catalog diagram and its goldens")
    p.add_argument("name")
    p.set_defaults(fn=_cmd_catalog)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EX_USAGE if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_CAP
    except (DiagramError, MoveError, FileNotFoundError, KeyError,
            json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_DATA
    except Exception as e:  # pragma: no cover
        print(f"internal error: {e}", file=sys.stderr)
        return EX_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
