"""Command-line entry point: ``aec solve|reduce|verify|oracle|eval|shapes``.

Machine-readable results go to stdout; diagnostics go to stderr.

Exit codes:
    0  completed (for solve: a decision was reached, yes or no)
    1  verify or oracle check found a disagreement
    2  input error (malformed JSON, parse error, domain mismatch, unsupported spec)
    3  internal error or instance beyond the search bound
    4  reduce: the source product is not a perfect square
    5  eval: division by zero
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import __version__
from . import values as V
from .errors import AECError, BoundExceeded, DivisionByZero, NonSquareProduct
from .expressions import (
    TreeShape,
    eval_tree,
    opset,
    ordered_shapes,
    parse_expression,
    print_full_paren,
    unordered_shapes,
)
from .jsonio import dumps, instance_to_json, load_instance

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3
EXIT_NONSQUARE = 4
EXIT_DIV_ZERO = 5


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def _default_threads() -> int:
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    from .solver_ep import solve_ep
    from .solver_np import SearchStats, print_flat, solve_np
    from .solver_std import SolveStats, solve_std

    try:
        inst = load_instance(_read(args.instance))
    except (InputError, ValueError, TypeError, AECError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if inst.variant == "np":
            stats = SearchStats()
            w = solve_np(inst, stats)
            witness = None if w is None else print_flat(w, inst.values)
        elif inst.variant == "ep":
            stats = SolveStats()
            w = solve_ep(inst, bound=args.bound, stats=stats, ordered=args.ordered)
            witness = None if w is None else print_full_paren(w, inst.values)
        else:
            stats = SolveStats()
            w = solve_std(inst, bound=args.bound, stats=stats)
            witness = None if w is None else print_full_paren(w, inst.values)
    except BoundExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - surfaced as an internal error code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(
        {
            "solvable": w is not None,
            "witness": witness,
            "stats": {
                "nodes": stats.nodes,
                "memo_entries": stats.memo_entries,
                "millis": None if args.no_timing else round(stats.millis, 3),
            },
        }
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# reduce


def _load_source(args):
    from .reductions import SourceInstance

    if args.values is not None:
        raw = [int(v) for v in args.values.split(",") if v.strip()]
        if args.source_kind is None:
            raise InputError("--values needs --from")
        return SourceInstance(args.source_kind, tuple(raw))
    if args.source is None:
        raise InputError("give a source file or --values")
    obj = json.loads(_read(args.source))
    if isinstance(obj, list):
        if args.source_kind is None:
            raise InputError("a bare value list needs --from")
        return SourceInstance(args.source_kind, tuple(obj))
    src = SourceInstance.from_json(obj)
    if args.source_kind is not None and args.source_kind != src.kind:
        raise InputError(f"--from {args.source_kind} disagrees with the file's kind {src.kind}")
    return src


def cmd_reduce(args) -> int:
    from .reductions import find_spec, reduce, trivial_no_instance

    try:
        src = _load_source(args)
        spec = find_spec(opset(args.ops), args.variant)
    except (InputError, ValueError, AECError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        inst = reduce(src, spec)
    except NonSquareProduct as exc:
        if not args.force_trivial_no:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NONSQUARE
        inst = trivial_no_instance(spec)
    except AECError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(instance_to_json(inst))
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    from .reductions import report_text, specs_for_tag, verify_reduction

    try:
        specs = specs_for_tag(args.spec)
        if args.ops is not None:
            wanted = opset(args.ops)
            specs = [s for s in specs if s.ops == wanted]
            if not specs:
                raise ValueError(f"tag {args.spec} has no reduction for ops {args.ops}")
    except (ValueError, AECError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    reports = []
    for spec in specs:
        rep = verify_reduction(
            spec,
            max_n=args.max_n,
            max_value=args.max_value,
            samples=args.samples,
            seed=args.seed,
            threads=args.threads,
        )
        print(report_text(rep), file=sys.stderr)
        reports.append(rep)
    ok = all(r["ok"] for r in reports)
    _emit({"spec": args.spec, "ok": ok, "reports": reports})
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# oracle


def _values_arg(text: str):
    try:
        return [V.parse_value(t) for t in text.split(",") if t.strip()]
    except AECError as exc:
        raise InputError(str(exc)) from None


def cmd_oracle(args) -> int:
    from . import checks, oracle
    from .solver_np import print_flat

    if args.oracle_cmd == "enumerate":
        try:
            vals = _values_arg(args.values)
            ops = opset(args.ops)
            shape = TreeShape.from_json(json.loads(args.tree)) if args.tree else None
            if any(isinstance(v, V.RationalFunction) for v in vals):
                vals = [V.as_function(v) for v in vals]
            if args.variant == "ep" and shape is None:
                raise InputError("--variant ep needs --tree")
        except (InputError, ValueError, AECError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        try:
            if args.variant == "np":
                stream = ((print_flat(e, vals), v) for e, v in oracle.enumerate_np(vals, ops))
            elif args.variant == "ep":
                stream = ((print_full_paren(t, vals), v) for t, v in oracle.enumerate_ep(vals, ops, shape))
            else:
                stream = ((print_full_paren(t, vals), v) for t, v in oracle.enumerate_std(vals, ops))
            rows = [{"expr": e, "value": V.format_value(v)} for e, v in stream]
        except BoundExceeded as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INTERNAL
        _emit({"count": len(rows), "expressions": rows[: args.limit] if args.limit else rows})
        return EXIT_OK

    threads = args.threads
    if args.oracle_cmd == "check":
        if args.variant == "single":
            rep = checks.single_op_check(count=args.count, seed=args.seed)
        else:
            rep = checks.oracle_grid(args.variant, args.max_n, args.max_value, threads=threads)
        key = "disagreements"
    else:
        rep = checks.plus_count_check(max_value=args.max_value, n=args.n)
        key = "violations"
    print(f"{rep['check']}: {len(rep[key])} {key}", file=sys.stderr)
    _emit(rep)
    return EXIT_OK if rep["ok"] else EXIT_FAIL


# --------------------------------------------------------------------------
# eval


def _assignment(items: Optional[List[str]]):
    point = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep or not name.strip():
            raise InputError(f"bad assignment {item!r}; expected name=value")
        try:
            point[name.strip()] = Fraction(val.strip())
        except ValueError:
            raise InputError(f"bad value in assignment {item!r}") from None
    return point


def cmd_eval(args) -> int:
    try:
        tree, vals = parse_expression(args.expression)
        point = _assignment(args.at)
    except (InputError, ValueError, AECError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if point:
            vals = [V.eval_at(v, point) for v in vals]
        result = eval_tree(tree, vals)
    except DivisionByZero as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIV_ZERO
    except KeyError as exc:
        print(f"error: no value for variable {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(V.format_value(result) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# shapes


def cmd_shapes(args) -> int:
    from .solver_ep import shape_catalog

    if args.combs is not None:
        try:
            sizes = [int(s) for s in args.combs.split(",")]
            shape = shape_catalog(sizes)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        _emit({"combs": sizes, "tree": shape.to_json(), "code": shape.code})
        return EXIT_OK
    if args.n is None or args.n < 1:
        print("error: give --n >= 1 or --combs", file=sys.stderr)
        return EXIT_INPUT
    shapes = ordered_shapes(args.n) if args.ordered else unordered_shapes(args.n)
    _emit({"n": args.n, "ordered": args.ordered, "count": len(shapes),
           "shapes": [s.to_json() for s in shapes]})
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aec", description="Arithmetic expression construction toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="decide an instance file ('-' for stdin)")
    s.add_argument("instance")
    s.add_argument("--bound", type=int, default=12, help="largest instance the exhaustive search accepts")
    s.add_argument("--ordered", action="store_true", help="ep: match the shape with child order")
    s.add_argument("--threads", type=int, default=_default_threads(), help="accepted for symmetry; solving is sequential")
    s.add_argument("--no-timing", action="store_true", help="report millis as null so output is reproducible")
    s.set_defaults(fn=cmd_solve)

    r = sub.add_parser("reduce", help="build a reduced instance from a source instance")
    r.add_argument("source", nargs="?", help="source JSON file ('-' for stdin)")
    r.add_argument("--from", dest="source_kind",
                   choices=["partition", "product-partition", "product-partition-half", "3-partition-3"])
    r.add_argument("--values", help="comma-separated source values instead of a file")
    r.add_argument("--ops", required=True)
    r.add_argument("--variant", choices=["np", "ep"], default="np")
    r.add_argument("--force-trivial-no", action="store_true",
                   help="emit a canonical no-instance instead of failing on a non-square product")
    r.set_defaults(fn=cmd_reduce)

    v = sub.add_parser("verify", help="check a reduction against brute force on a bounded space")
    v.add_argument("--spec", required=True, help="reduction tag, e.g. 2.8 or 3")
    v.add_argument("--ops", help="restrict a multi-spec tag to one op set")
    v.add_argument("--max-n", type=int)
    v.add_argument("--max-value", type=int)
    v.add_argument("--samples", type=int, help="sample this many sources per size from n=6 upward")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threads", type=int, default=_default_threads())
    v.set_defaults(fn=cmd_verify)

    o = sub.add_parser("oracle", help="naive enumerators and oracle audits")
    osub = o.add_subparsers(dest="oracle_cmd", required=True)
    oe = osub.add_parser("enumerate", help="stream every expression over the values")
    oe.add_argument("--variant", choices=["std", "np", "ep"], default="std")
    oe.add_argument("--values", required=True, help="comma-separated value literals")
    oe.add_argument("--ops", required=True)
    oe.add_argument("--tree", help="shape JSON for --variant ep")
    oe.add_argument("--limit", type=int, default=0, help="list at most this many expressions")
    oc = osub.add_parser("check", help="audit a solver against its oracle on a grid")
    oc.add_argument("--variant", choices=["std", "np", "ep", "single"], required=True)
    oc.add_argument("--max-n", type=int, default=4)
    oc.add_argument("--max-value", type=int, default=5)
    oc.add_argument("--count", type=int, default=1000, help="single: number of random instances")
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--threads", type=int, default=_default_threads())
    op_ = osub.add_parser("plus-count", help="at most one '+' in target-attaining {+,*} expressions")
    op_.add_argument("--n", type=int, default=4)
    op_.add_argument("--max-value", type=int, default=6)
    op_.add_argument("--threads", type=int, default=_default_threads())
    o.set_defaults(fn=cmd_oracle)

    e = sub.add_parser("eval", help="evaluate an expression exactly")
    e.add_argument("expression")
    e.add_argument("--at", action="append", metavar="VAR=VALUE", help="substitute a variable (repeatable)")
    e.set_defaults(fn=cmd_eval)

    sh = sub.add_parser("shapes", help="list tree shapes or build a comb shape")
    sh.add_argument("--n", type=int)
    sh.add_argument("--ordered", action="store_true")
    sh.add_argument("--combs", help="comma-separated comb sizes, e.g. 2,2")
    sh.set_defaults(fn=cmd_shapes)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
