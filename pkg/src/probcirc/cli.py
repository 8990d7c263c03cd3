"""Command line front end.

Exit status: 0 success (or "equivalent"), 1 a negative answer (inequivalent,
an unsound rule, a rejected derivation), 2 unreadable, ill-formed or ill-typed
input, 3 evaluation above the size cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from probcirc import axioms, normalform
from probcirc.circuit import Circuit, has_conditioning, is_causal, typecheck
from probcirc.dice import parse_program, translate
from probcirc.errors import CapExceeded, ProbCircError
from probcirc.rewrite import check_derivation, load_derivation, shipped_derivations
from probcirc.semantics import DEFAULT_CAP, canonical_class, distribution, evaluate
from probcirc.syntax import format_rational, looks_like_circuit, parse_circuit, serialize

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def load_circuit(path: str) -> Circuit:
    """A circuit from a file holding either circuit text or a program."""
    text = Path(path).read_text()
    if looks_like_circuit(text):
        return parse_circuit(text)
    return translate(parse_program(text))


def class_json(c: Circuit, cap: int) -> dict:
    cls = canonical_class(evaluate(c, cap))
    if cls.is_bottom:
        return {"class": "bottom"}
    dist = distribution(cls.matrix)
    return {"class": "canonical", "dist": {k: [v.numerator, v.denominator] for k, v in dist.items()}}


def _class_text(cls: dict) -> str:
    if cls["class"] == "bottom":
        return "bottom (the observations are never satisfied)"
    return "  ".join(f"P({k})={format_rational(Fraction(*v))}" for k, v in cls["dist"].items())


def _emit(args, data: dict, text: str) -> None:
    print(json.dumps(data) if args.json else text)


def cmd_compile(args) -> int:
    c = load_circuit(args.file)
    t = typecheck(c)
    _emit(args, {"circuit": serialize(c), "type": str(t)}, f"{serialize(c)}\n: {t}")
    return EXIT_OK


def cmd_infer(args) -> int:
    c = load_circuit(args.file)
    data = class_json(c, args.cap)
    _emit(args, data, _class_text(data))
    return EXIT_OK


def cmd_equiv(args) -> int:
    c, d = load_circuit(args.a), load_circuit(args.b)
    same = normalform.equiv(c, d, args.cap)
    data = {"equivalent": same, "a": class_json(c, args.cap), "b": class_json(d, args.cap)}
    lines = ["equivalent" if same else "not equivalent", f"a: {_class_text(data['a'])}", f"b: {_class_text(data['b'])}"]
    if is_causal(c) and is_causal(d):
        data["nf_a"] = serialize(normalform.normal_form(c, args.cap))
        data["nf_b"] = serialize(normalform.normal_form(d, args.cap))
        lines += [f"nf(a): {data['nf_a']}", f"nf(b): {data['nf_b']}"]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if same else EXIT_NO


def cmd_normalize(args) -> int:
    c = load_circuit(args.file)
    nf = normalform.normal_form(c, args.cap)
    _emit(args, {"normal_form": serialize(nf), "type": str(nf.type)}, serialize(nf))
    return EXIT_OK


def cmd_eliminate(args) -> int:
    c = load_circuit(args.file)
    out = normalform.eliminate_conditioning(c, args.cap)
    failed = canonical_class(evaluate(c, args.cap)).is_bottom
    data = {"circuit": serialize(out), "failure": failed, "conditioning_free": not has_conditioning(out)}
    _emit(args, data, serialize(out))
    return EXIT_OK


def cmd_axioms_check(args) -> int:
    tags = args.axiom or list(axioms.CATALOG)
    reports = [axioms.check_soundness(t, args.trials, args.seed) for t in tags]
    if args.json:
        print(json.dumps([r.to_json() for r in reports]))
    else:
        for r in reports:
            kind = "primitive" if axioms.rule(r.axiom).primitive else "derived"
            status = "ok" if r.ok else f"FAIL {r.counterexample}"
            print(f"{r.axiom:<12} {kind:<9} {r.mode:<4} {r.passed:>4}/{r.trials}  {status}")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_NO


def cmd_derive_check(args) -> int:
    files = shipped_derivations()
    path = files.get(args.file, args.file)
    result = check_derivation(load_derivation(path), args.cap)
    if args.json:
        print(json.dumps(result.to_json()))
    else:
        for entry in result.trace:
            where = "start" if entry["step"] is None else f"{entry['step']:>3} {entry['axiom']} {entry['dir']}"
            print(f"{where}: {entry['term']}")
        print("ok" if result.ok else f"rejected at step {result.failed_step}: {result.error}")
    return EXIT_OK if result.ok else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, metavar="CELLS", help="evaluation size cap")
    p = argparse.ArgumentParser(prog="probcirc", description="Exact reasoning about probabilistic circuits.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("compile", parents=[common], help="translate a program to circuit text")
    s.add_argument("file")
    s.set_defaults(func=cmd_compile)
    s = sub.add_parser("infer", parents=[common], help="exact posterior of a program or circuit")
    s.add_argument("file")
    s.set_defaults(func=cmd_infer)
    s = sub.add_parser("equiv", parents=[common], help="decide equivalence up to scaling")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_equiv)
    s = sub.add_parser("normalize", parents=[common], help="causal normal form")
    s.add_argument("file")
    s.set_defaults(func=cmd_normalize)
    s = sub.add_parser("eliminate", parents=[common], help="conditioning-free representative")
    s.add_argument("file")
    s.set_defaults(func=cmd_eliminate)
    s = sub.add_parser("axioms-check", parents=[common], help="random soundness trials for each rule")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--axiom", action="append", help="restrict to this tag (repeatable)")
    s.set_defaults(func=cmd_axioms_check)
    s = sub.add_parser("derive-check", parents=[common], help="replay a derivation file")
    s.add_argument("file", help="a derivation JSON file or the name of a shipped one")
    s.set_defaults(func=cmd_derive_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ProbCircError, OSError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
