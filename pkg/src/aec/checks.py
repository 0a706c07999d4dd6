"""Grid audits of the solvers against the naive oracles.

Each audit returns a JSON-ready report whose content is independent of how
many worker processes produced it.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import reduce as fold
from typing import List

from . import values as V
from .expressions import Instance, all_opsets, make_instance, unordered_shapes
from .oracle import enumerate_ep, enumerate_np, enumerate_std
from .reductions import PRODUCT_PARTITION_HALF, SourceInstance, decide_source, find_spec, reduce
from .errors import NonSquareProduct
from .solver_ep import solve_ep
from .solver_np import solve_np, solve_single_op
from .solver_std import solve_std

SENTINEL_CANDIDATES = [Fraction(v) for v in (0, -1, 1000, -1000, 10**6)] + [
    Fraction(1, 7), Fraction(-3, 11), Fraction(99991), Fraction(123457, 3), Fraction(-77777)
]


def sentinels(reach, k: int = 5) -> List[Fraction]:
    """The first ``k`` fixed candidates the oracle cannot reach."""
    return [c for c in SENTINEL_CANDIDATES if c not in reach][:k]


def grid_multisets(max_n: int, max_value: int):
    for n in range(1, max_n + 1):
        yield from itertools.combinations_with_replacement(range(1, max_value + 1), n)


def _case(args):
    variant, vals, ops = args
    fvals = [Fraction(v) for v in vals]
    disagreements = []
    targets = 0
    shapes = [None] if variant != "ep" else list(unordered_shapes(len(vals)))
    for shape in shapes:
        if variant == "std":
            reach = {v for _, v in enumerate_std(fvals, ops)}
        elif variant == "np":
            reach = {v for _, v in enumerate_np(fvals, ops)}
        else:
            reach = {v for _, v in enumerate_ep(fvals, ops, shape)}
        for t in sorted(reach) + sentinels(reach):
            targets += 1
            inst = make_instance(fvals, t, ops, variant, shape)
            if variant == "std":
                got = solve_std(inst) is not None
            elif variant == "np":
                got = solve_np(inst) is not None
            else:
                got = solve_ep(inst) is not None
            if got != (t in reach):
                disagreements.append(
                    {"values": list(vals), "ops": "".join(ops), "target": V.format_value(t),
                     "shape": None if shape is None else shape.to_json(),
                     "oracle": t in reach, "solver": got}
                )
    return targets, disagreements


def _fan_out(fn, jobs, threads: int):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (8 * threads))))
    return [fn(j) for j in jobs]


def oracle_grid(variant: str, max_n: int = 4, max_value: int = 5, threads: int = 1, timing: bool = False) -> dict:
    """Solver against oracle on every multiset, op set and reachable target."""
    if variant not in ("std", "np", "ep"):
        raise ValueError(f"unknown variant {variant!r}")
    start = time.perf_counter()
    jobs = [(variant, vals, ops) for vals in grid_multisets(max_n, max_value) for ops in all_opsets()]
    results = _fan_out(_case, jobs, threads)
    disagreements = [d for _, ds in results for d in ds]
    report = {
        "check": f"oracle-{variant}",
        "bounds": {"max_n": max_n, "max_value": max_value},
        "cases": len(jobs),
        "targets": sum(t for t, _ in results),
        "disagreements": disagreements,
        "ok": not disagreements,
    }
    if timing:
        report["millis"] = round((time.perf_counter() - start) * 1000, 3)
    return report


def _random_single(rng: random.Random, max_n: int, max_value: int) -> Instance:
    n = rng.randint(1, max_n)
    vals = [rng.randint(1, max_value) for _ in range(n)]
    op = rng.choice("+-*/")
    if rng.random() < 0.5:
        # value of a random flat expression, so roughly half the cases are yes
        order = rng.sample(range(n), n)
        fv = [Fraction(vals[i]) for i in order]
        if op == "+":
            t = sum(fv)
        elif op == "*":
            t = fold(lambda a, b: a * b, fv)
        elif op == "-":
            t = fv[0] - sum(fv[1:])
        else:
            t = fold(lambda a, b: a / b, fv)
    else:
        t = Fraction(rng.randint(-60, 60), rng.choice((1, 1, 1, 2, 3)))
    return make_instance([Fraction(v) for v in vals], t, op, "np")


def single_op_check(count: int = 1000, max_n: int = 6, max_value: int = 20, seed: int = 0) -> dict:
    """Closed-form single-operator deciders against the general search."""
    rng = random.Random(seed)
    disagreements = []
    yes = 0
    for _ in range(count):
        inst = _random_single(rng, max_n, max_value)
        fast = solve_single_op(inst) is not None
        slow = solve_np(inst) is not None
        yes += slow
        if fast != slow:
            disagreements.append(
                {"values": [V.format_value(v) for v in inst.values], "ops": inst.ops[0],
                 "target": V.format_value(inst.target), "single": fast, "search": slow}
            )
    return {
        "check": "single-op",
        "bounds": {"count": count, "max_n": max_n, "max_value": max_value, "seed": seed},
        "cases": count,
        "yes": yes,
        "disagreements": disagreements,
        "ok": not disagreements,
    }


def single_op_timing(n: int = 100, repeats: int = 20, seed: int = 0) -> dict:
    """Mean wall time per closed-form decision on 64-bit sized values."""
    rng = random.Random(seed)
    per_op = {}
    for op in "+-*/":
        insts = []
        for _ in range(repeats):
            vals = [Fraction(rng.randint(1, 2**63 - 1)) for _ in range(n)]
            insts.append(make_instance(vals, Fraction(rng.randint(1, 2**63 - 1)), op, "np"))
        start = time.perf_counter()
        for inst in insts:
            solve_single_op(inst)
        per_op[op] = (time.perf_counter() - start) * 1000 / repeats
    return {"n": n, "repeats": repeats, "millis_per_instance": per_op}


def plus_count_check(max_value: int = 6, n: int = 4) -> dict:
    """Every target-attaining flat expression has at most one ``+``.

    Runs over the yes-instances produced by the ``{+,*}`` reduction from
    square-product sources of size ``n``.
    """
    spec = find_spec("+*", "np")
    instances = 0
    expressions = 0
    violations = []
    for vals in itertools.combinations_with_replacement(range(1, max_value + 1), n):
        s = SourceInstance(PRODUCT_PARTITION_HALF, vals)
        try:
            inst = reduce(s, spec)
        except NonSquareProduct:
            continue
        if decide_source(s) is None:
            continue
        instances += 1
        for expr, value in enumerate_np(inst.values, inst.ops):
            if value != inst.target:
                continue
            expressions += 1
            if expr.op_counts()["+"] > 1:
                violations.append({"source": list(vals), "plus": expr.op_counts()["+"]})
    return {
        "check": "at-most-one-plus",
        "bounds": {"n": n, "max_value": max_value},
        "instances": instances,
        "attaining_expressions": expressions,
        "violations": violations,
        "ok": instances > 0 and not violations,
    }
