"""Command-line front end: reduce, classify, verify, selftest, rules."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from .arith import rat_str
from .catalog import default_catalog
from .engine import ReduceOptions, reduce
from .errors import RecurintError
from .model import classify_full
from .text import deserialize_result, parse_expr, print_algterm, print_expr, serialize_result
from .verify import selftest_catalog, verify_result

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_OBSTRUCTED = 0, 1, 2, 3


def _window(text: str):
    try:
        lo, hi = (Fraction(p.strip()) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be LO,HI with rational endpoints, got {text!r}")
    if not hi - lo >= 1:
        raise argparse.ArgumentTypeError("window (LO,HI] must have length at least 1")
    return lo, hi


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="recurint", description="Exact recurrence reduction of algebraic integrals.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce an integrand and print the result")
    p.add_argument("expr")
    p.add_argument("--var", default="x")
    p.add_argument("--max-steps", type=int, default=512)
    p.add_argument("--window", type=_window, default=(Fraction(-1), Fraction(0)),
                   help="terminal window LO,HI meaning (LO, HI]; default -1,0")
    p.add_argument("--json", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--strict", action="store_true", help="exit 3 when the result is Obstructed")

    p = sub.add_parser("classify", help="print form, degeneracy case and guard values")
    p.add_argument("expr")
    p.add_argument("--var", default="x")

    p = sub.add_parser("verify", help="check a saved result against an integrand")
    p.add_argument("expr")
    p.add_argument("--var", default="x")
    p.add_argument("--against", required=True, help="JSON file written by 'reduce --json'")

    p = sub.add_parser("selftest", help="fuzz every relation against exact differentiation")
    p.add_argument("--rules", default="all", help="comma-separated rule ids or 'all'")
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("rules", help="list catalog entries")
    p.add_argument("--form")
    p.add_argument("--case")
    p.add_argument("--export", help="write the selected entries as JSON to this path")
    return ap


def _preprocess(argv: List[str]) -> List[str]:
    # let "--window -1,0" through: argparse would read "-1,0" as an option
    out = []
    it = iter(range(len(argv)))
    for k in it:
        if argv[k] == "--window" and k + 1 < len(argv):
            out.append(f"--window={argv[k + 1]}")
            next(it, None)
        else:
            out.append(argv[k])
    return out


def _cmd_reduce(a) -> int:
    i = parse_expr(a.expr, a.var)
    r = reduce(i, ReduceOptions(window=a.window, max_steps=a.max_steps))
    if a.json:
        print(serialize_result(r))
    else:
        print(f"input: {print_expr(r.input, a.var)}")
        print(f"form: {r.form}, case {r.case}")
        print(f"status: {r.status}" + (f" ({r.reason})" if r.reason else ""))
        print("algebraic:" + ("" if r.algebraic else " 0"))
        for g in r.algebraic:
            print(f"  {print_algterm(g, a.var)}")
        print("residuals:")
        for c, res in r.residuals:
            print(f"  {rat_str(c)} * INT({print_expr(res, a.var)}, {a.var})")
        if a.trace:
            print(f"trace ({len(r.trace)} steps):")
            for k, s in enumerate(r.trace, 1):
                nxt = print_expr(s.next, a.var) if s.next is not None else "-"
                print(f"  {k}. {s.rule} solveFor={s.solve_for} scale={rat_str(s.scale)} next={nxt}")
    if a.strict and r.status != "Terminal":
        return EXIT_OBSTRUCTED
    return EXIT_OK


def _cmd_classify(a) -> int:
    form = classify_full(parse_expr(a.expr, a.var))
    print(f"{form.tag}, {form.profile.describe()}")
    return EXIT_OK


def _cmd_verify(a) -> int:
    i = parse_expr(a.expr, a.var)
    with open(a.against) as fh:
        r = deserialize_result(json.load(fh))
    res = verify_result(i, r)
    if res.is_zero():
        print("ok")
        return EXIT_OK
    print(f"not ok: residual numerator {res}")
    return EXIT_ERROR


def _cmd_selftest(a) -> int:
    cat = default_catalog()
    ids = None
    if a.rules != "all":
        ids = [s.strip() for s in a.rules.split(",") if s.strip()]
        unknown = [s for s in ids if s not in cat.by_id]
        if unknown:
            print(f"error:UnknownRule:{','.join(unknown)}", file=sys.stderr)
            return EXIT_USAGE
    reports = selftest_catalog(a.samples, a.seed, cat, ids)
    good = 0
    for rep in reports:
        status = "ok" if rep.ok else "FAIL"
        good += rep.ok
        print(f"{rep.rule_id:8s} {rep.case:6s} {rep.checked:3d} checked  {status}")
        for f in rep.failures[:3]:
            print(f"    {f}")
    print(f"{good}/{len(reports)} ok")
    return EXIT_OK if good == len(reports) else EXIT_ERROR


def _cmd_rules(a) -> int:
    cat = default_catalog()
    chosen = [r for r in cat if (a.form is None or r.form == a.form) and (a.case is None or r.case == a.case)]
    for r in chosen:
        shift = ",".join(f"{s:+d}" for s in r.shift)
        flag = "reversible" if r.reversible else "-"
        print(f"{r.id:8s} {r.form:5s} case {r.case:6s} shift ({shift}) {flag:10s} {r.anchor}")
    print(f"{len(chosen)} rules")
    if a.export:
        with open(a.export, "w") as fh:
            json.dump([r.to_record() for r in chosen], fh, indent=1)
    return EXIT_OK


_COMMANDS = {"reduce": _cmd_reduce, "classify": _cmd_classify, "verify": _cmd_verify,
             "selftest": _cmd_selftest, "rules": _cmd_rules}


def main(argv: Optional[List[str]] = None) -> int:
    argv = _preprocess(list(sys.argv[1:] if argv is None else argv))
    try:
        a = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[a.command](a)
    except RecurintError as exc:
        detail = str(exc).replace("\n", " ")
        print(f"error:{exc.code}:{detail}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error:IOError:{exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
