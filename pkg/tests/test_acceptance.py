"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or through pytest;
in both cases the per-criterion lines appear on the terminal.
"""

import json
import random
import sys
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import run_cli  # noqa: E402

from aec import values as V  # noqa: E402
from aec.expressions import eval_tree, parse_expression  # noqa: E402
from aec.reductions import (  # noqa: E402
    DEFAULT_BOUNDS,
    LARGE,
    SPECS,
    reduce,
    render_witness,
    solve_reduced,
    source_space,
)
from aec.checks import single_op_timing  # noqa: E402
from aec.errors import NonSquareProduct  # noqa: E402

NINETY_EIGHT = {"values": ["11", "9", "4", "3", "1"], "target": "98", "ops": ["+", "-", "*", "/"], "variant": "std"}
VERIFY_TAGS = ["2.1", "2.2", "2.3", "2.4", "2.5", "2.6", "2.7", "2.8", "2.9", "3"]

# stdout of each criterion's command at --threads 1, reused by criterion 9
_OUTPUTS = {}
_LINES = []


def _say(capsys, line):
    _LINES.append(line)
    if capsys is None:
        print(line)
        return
    with capsys.disabled():
        print("\n" + line)


def _verdict(capsys, number, ok, detail):
    _say(capsys, f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def _ninety_eight_file(tmp_path):
    path = tmp_path / "ninety_eight.json"
    path.write_text(json.dumps(NINETY_EIGHT))
    return path


def _commands(tmp_path):
    path = _ninety_eight_file(tmp_path)
    cmds = {"1": ["solve", path, "--no-timing"]}
    for variant in ("std", "np", "ep"):
        cmds[f"oracle-{variant}"] = ["oracle", "check", "--variant", variant]
    cmds["single"] = ["oracle", "check", "--variant", "single"]
    for tag in VERIFY_TAGS:
        cmds[f"verify-{tag}"] = ["verify", "--spec", tag]
    return cmds


def _run(key, argv, threads=1):
    code, out, _ = run_cli(list(argv) + ["--threads", str(threads)])
    if threads == 1:
        _OUTPUTS[key] = out
    return code, out


def test_criterion_1_ninety_eight(tmp_path, capsys):
    argv = _commands(tmp_path)["1"]
    start = time.perf_counter()
    code, out = _run("1", argv)
    elapsed = time.perf_counter() - start
    res = json.loads(out)
    tree, vals = parse_expression(res["witness"])
    got = eval_tree(tree, vals)
    same_multiset = Counter(vals) == Counter(Fraction(v) for v in NINETY_EIGHT["values"])
    ok = code == 0 and res["solvable"] and got == 98 and same_multiset and elapsed < 1.0
    assert _verdict(capsys, 1, ok, f"witness {res['witness']} = {V.format_value(got)}, {elapsed:.3f}s")


@pytest.mark.parametrize("variant,number", [("std", 2), ("np", 3), ("ep", 3)])
def test_criteria_2_3_oracle_equivalence(variant, number, tmp_path, capsys):
    start = time.perf_counter()
    code, out = _run(f"oracle-{variant}", _commands(tmp_path)[f"oracle-{variant}"])
    elapsed = time.perf_counter() - start
    rep = json.loads(out)
    ok = code == 0 and rep["ok"] and not rep["disagreements"] and rep["cases"] == 125 * 15 and elapsed < 600
    detail = (f"{variant}: {rep['cases']} cases, {rep['targets']} targets, "
              f"{len(rep['disagreements'])} disagreements, {elapsed:.1f}s")
    assert _verdict(capsys, number, ok, detail)


def test_criterion_4_single_op(tmp_path, capsys):
    code, out = _run("single", _commands(tmp_path)["single"])
    rep = json.loads(out)
    timing = single_op_timing(n=100)
    worst = max(timing["millis_per_instance"].values())
    ok = code == 0 and rep["ok"] and rep["cases"] == 1000 and worst < 1.0
    detail = f"{rep['cases']} instances ({rep['yes']} yes), {len(rep['disagreements'])} disagreements, worst {worst:.3f} ms at n=100"
    assert _verdict(capsys, 4, ok, detail)


def test_criterion_5_reduction_verification(tmp_path, capsys):
    cmds = _commands(tmp_path)
    start = time.perf_counter()
    failing = []
    summary = []
    for tag in VERIFY_TAGS:
        code, out = _run(f"verify-{tag}", cmds[f"verify-{tag}"])
        rep = json.loads(out)
        for r in rep["reports"]:
            c = r["counts"]
            summary.append(f"{tag}/{r['ops']}:{c['agree']}/{c['checked']}")
            for ce in r["counterexamples"]:
                failing.append(f"{tag} {{{r['ops']}}} source {ce['source']}: {'; '.join(ce['problems'])}")
        if code != 0:
            failing.append(f"aec verify --spec {tag} exited {code}")
    elapsed = time.perf_counter() - start
    ok = not failing and elapsed < 900
    detail = f"{', '.join(summary)}; {elapsed:.1f}s"
    if failing:
        detail += "; " + " | ".join(failing)
    assert _verdict(capsys, 5, ok, detail)


def test_criterion_6_at_most_one_plus(capsys):
    code, out, _ = run_cli(["oracle", "plus-count", "--n", "4", "--max-value", "6"])
    rep = json.loads(out)
    ok = code == 0 and rep["ok"] and rep["instances"] > 0
    detail = (f"{rep['instances']} yes-instances, {rep['attaining_expressions']} attaining expressions, "
              f"{len(rep['violations'])} with more than one '+'")
    assert _verdict(capsys, 6, ok, detail)


def test_criterion_7_cross_domain(capsys):
    checked = 0
    bad = []
    for spec in SPECS:
        max_n, max_value = DEFAULT_BOUNDS[spec.source]
        for s in source_space(spec.source, max_n, max_value):
            try:
                inst = reduce(s, spec)
            except NonSquareProduct:
                continue
            if inst.domain != "fun":
                break
            w = solve_reduced(inst)
            if w is None:
                continue
            # re-read the printed witness so the check runs on what users see
            tree, leaf_vals = parse_expression(render_witness(w, inst.values))
            if Counter(leaf_vals) != Counter(inst.values):
                bad.append(f"{spec.name} {list(s.values)}: witness leaves differ")
                continue
            point = {name: LARGE for v in leaf_vals + [inst.target] for name in V.variables_of(v)}
            got = eval_tree(tree, [V.eval_at(v, point) for v in leaf_vals])
            checked += 1
            if got != V.eval_at(inst.target, point):
                bad.append(f"{spec.name} {list(s.values)}")
    ok = checked > 0 and not bad
    assert _verdict(capsys, 7, ok, f"{checked} polynomial witnesses re-checked at 10^6, {len(bad)} mismatches")


def _rand_fraction(rng):
    return Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))


def _rand_function(rng):
    names = ("x", "y")

    def poly():
        terms = []
        for _ in range(rng.randint(1, 3)):
            c = rng.randint(-9, 9) or 1
            mono = "*".join(f"{v}^{rng.randint(1, 2)}" for v in names if rng.random() < 0.5)
            terms.append(f"{c}*{mono}" if mono else str(c))
        return V.parse_polynomial("+".join(terms).replace("+-", "-"))

    num, den = poly(), poly()
    while den.is_zero():
        den = poly()
    return V.RationalFunction(num, den)


def _axioms(a, b, c, zero, one):
    checks = [
        a + b == b + a,
        a * b == b * a,
        (a + b) + c == a + (b + c),
        (a * b) * c == a * (b * c),
        a * (b + c) == a * b + a * c,
        a + zero == a,
        a * one == a,
        a + (-a) == zero,
    ]
    if not V.is_zero(a):
        checks.append(a * (one / a) == one)
    return checks


def test_criterion_8_arithmetic_core(capsys):
    rng = random.Random(8)
    done = failed = 0
    while done < 10**5:
        a, b, c = (_rand_fraction(rng) for _ in range(3))
        for ok in _axioms(a, b, c, Fraction(0), Fraction(1)):
            done += 1
            failed += not ok
    frac_checks = done
    zero, one = V.as_function(Fraction(0)), V.as_function(Fraction(1))
    while done < frac_checks + 10**5:
        a, b, c = (_rand_function(rng) for _ in range(3))
        for ok in _axioms(a, b, c, zero, one):
            done += 1
            failed += not ok
    fp_bad = 0
    for _ in range(10**4):
        a, b = _rand_function(rng), _rand_function(rng)
        if V.is_zero(b):
            continue
        twin = (a * b) / b if rng.random() < 0.5 else (a + b) - b
        fp_bad += not (twin == a and V.fingerprint(twin) == V.fingerprint(a) and hash(twin) == hash(a))
    hom_bad = hom_done = 0
    while hom_done < 10**4:
        a, b = _rand_function(rng), _rand_function(rng)
        point = {"x": Fraction(rng.randint(-50, 50)), "y": Fraction(rng.randint(-50, 50))}
        op = rng.choice("+-*/")
        try:
            ea, eb = a.eval_at(point), b.eval_at(point)
            if op == "/" and eb == 0:
                continue
            lhs = {"+": a + b, "-": a - b, "*": a * b, "/": a / b if not V.is_zero(b) else None}[op]
            if lhs is None:
                continue
            got = lhs.eval_at(point)
        except ZeroDivisionError:
            continue
        want = {"+": ea + eb, "-": ea - eb, "*": ea * eb, "/": ea / eb if eb else None}[op]
        hom_done += 1
        hom_bad += got != want
    ok = failed == 0 and fp_bad == 0 and hom_bad == 0
    detail = (f"{done} axiom checks ({failed} failed), 10000 equal pairs ({fp_bad} fingerprint mismatches), "
              f"{hom_done} homomorphism checks ({hom_bad} failed)")
    assert _verdict(capsys, 8, ok, detail)


def test_criterion_9_determinism(tmp_path, capsys):
    diffs = []
    cmds = _commands(tmp_path)
    for key, argv in cmds.items():
        if key not in _OUTPUTS:
            _run(key, argv, threads=1)
        _, out8 = _run(key, argv, threads=8)
        if out8 != _OUTPUTS[key]:
            diffs.append(key)
    ok = not diffs
    detail = f"{len(cmds)} outputs compared at --threads 1 and 8; differing: {diffs or 'none'}"
    assert _verdict(capsys, 9, ok, detail)


if __name__ == "__main__":
    import tempfile

    tmp = Path(tempfile.mkdtemp())
    tests = [
        lambda: test_criterion_1_ninety_eight(tmp, None),
        lambda: test_criteria_2_3_oracle_equivalence("std", 2, tmp, None),
        lambda: test_criteria_2_3_oracle_equivalence("np", 3, tmp, None),
        lambda: test_criteria_2_3_oracle_equivalence("ep", 3, tmp, None),
        lambda: test_criterion_4_single_op(tmp, None),
        lambda: test_criterion_5_reduction_verification(tmp, None),
        lambda: test_criterion_6_at_most_one_plus(None),
        lambda: test_criterion_7_cross_domain(None),
        lambda: test_criterion_8_arithmetic_core(None),
        lambda: test_criterion_9_determinism(tmp, None),
    ]
    failures = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
