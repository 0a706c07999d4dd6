"""Hardness reductions: source problems, instance generators, witness maps.

Reduced instances put the source numbers first (index ``i`` carries
``a_i``) and the auxiliary values after them, in the order the construction
lists them. Source witnesses are tuples of index blocks.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import values as V
from .errors import (
    BoundExceeded,
    InvalidSourceWitness,
    NonSquareProduct,
    UnsupportedSpec,
    WitnessShapeUnexpected,
)
from .expressions import (
    ExprTree,
    Instance,
    Leaf,
    Node,
    TreeShape,
    eval_tree,
    make_instance,
    opset,
    print_full_paren,
)
from .solver_ep import shape_catalog, solve_ep
from .solver_np import FlatExpr, Group, eval_flat, print_flat, solve_np

PARTITION = "partition"
PRODUCT_PARTITION = "product-partition"
PRODUCT_PARTITION_HALF = "product-partition-half"
THREE_PARTITION_3 = "3-partition-3"
SOURCE_KINDS = (PARTITION, PRODUCT_PARTITION, PRODUCT_PARTITION_HALF, THREE_PARTITION_3)

SUBSET_BOUND = 12
THREE_PARTITION_BOUND = 9
# value substituted for every variable in the cross-domain check
LARGE = Fraction(10**6)

Witness = Union[FlatExpr, ExprTree]
Blocks = Tuple[Tuple[int, ...], ...]


# --------------------------------------------------------------------------
# source problems


@dataclass(frozen=True)
class SourceInstance:
    kind: str
    values: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if not self.values:
            raise ValueError("source instance has no values")
        if any(v <= 0 for v in self.values):
            raise ValueError("source values must be positive integers")
        if self.kind == THREE_PARTITION_3 and len(self.values) % 3:
            raise ValueError("3-partition-3 needs a multiple of three values")
        if self.kind == PRODUCT_PARTITION_HALF and len(self.values) % 2:
            raise ValueError("product-partition-half needs an even number of values")

    @property
    def n(self) -> int:
        return len(self.values)

    def to_json(self) -> dict:
        return {"kind": self.kind, "values": list(self.values)}

    @classmethod
    def from_json(cls, obj) -> "SourceInstance":
        if not isinstance(obj, dict) or "kind" not in obj or "values" not in obj:
            raise ValueError("source JSON needs 'kind' and 'values'")
        return cls(obj["kind"], tuple(obj["values"]))


def _block_values(s: SourceInstance, blocks: Blocks):
    return [[s.values[i] for i in b] for b in blocks]


def check_source_witness(s: SourceInstance, blocks: Blocks) -> bool:
    """The predicate each brute-force decider searches for."""
    flat = sorted(i for b in blocks for i in b)
    if flat != list(range(s.n)):
        return False
    vals = _block_values(s, blocks)
    if s.kind == THREE_PARTITION_3:
        if len(blocks) != s.n // 3 or any(len(b) != 3 for b in blocks):
            return False
        return len({sum(b) for b in vals}) == 1
    if len(blocks) != 2:
        return False
    if s.kind == PARTITION:
        return sum(vals[0]) == sum(vals[1])
    if s.kind == PRODUCT_PARTITION_HALF and len(blocks[0]) != len(blocks[1]):
        return False
    return prod(vals[0]) == prod(vals[1])


def decide_source(s: SourceInstance) -> Optional[Blocks]:
    """Brute force; the first block always holds index 0."""
    bound = THREE_PARTITION_BOUND if s.kind == THREE_PARTITION_3 else SUBSET_BOUND
    if s.n > bound:
        raise BoundExceeded(f"{s.n} source values exceed the bound of {bound}")
    if s.kind == THREE_PARTITION_3:
        return _three_partition(s.values)
    full = (1 << s.n) - 1
    for mask in range(1, full + 1, 2):
        first = tuple(i for i in range(s.n) if mask >> i & 1)
        second = tuple(i for i in range(s.n) if not mask >> i & 1)
        if s.kind != PRODUCT_PARTITION and not second:
            continue
        blocks = (first, second)
        if check_source_witness(s, blocks):
            return blocks
    return None


def _three_partition(vals) -> Optional[Blocks]:
    n = len(vals)
    total = sum(vals)
    if total % (n // 3):
        return None
    goal = total // (n // 3)
    used = [False] * n
    blocks: List[Tuple[int, ...]] = []

    def go() -> bool:
        try:
            i = used.index(False)
        except ValueError:
            return True
        used[i] = True
        for j in range(i + 1, n):
            if used[j]:
                continue
            for k in range(j + 1, n):
                if used[k] or vals[i] + vals[j] + vals[k] != goal:
                    continue
                used[j] = used[k] = True
                blocks.append((i, j, k))
                if go():
                    return True
                blocks.pop()
                used[j] = used[k] = False
        used[i] = False
        return False

    return tuple(blocks) if go() else None


def format_blocks(s: SourceInstance, blocks: Blocks) -> str:
    return " | ".join("{" + ",".join(str(v) for v in b) + "}" for b in _block_values(s, blocks))


# --------------------------------------------------------------------------
# reduction specs


@dataclass(frozen=True)
class ReductionSpec:
    ops: Tuple[str, ...]
    variant: str
    source: str
    tag: str

    @property
    def name(self) -> str:
        return f"{self.tag}:{self.variant}:{''.join(self.ops)}"


def _spec(ops, variant, source, tag):
    return ReductionSpec(opset(ops), variant, source, tag)


SPECS: Tuple[ReductionSpec, ...] = (
    _spec("+*/", "np", PRODUCT_PARTITION_HALF, "2.1"),
    _spec("+*", "np", PRODUCT_PARTITION_HALF, "2.2"),
    _spec("-*", "np", PRODUCT_PARTITION_HALF, "2.3"),
    _spec("+-*", "np", THREE_PARTITION_3, "2.4"),
    _spec("+/", "np", PRODUCT_PARTITION_HALF, "2.5"),
    _spec("-/", "np", PRODUCT_PARTITION_HALF, "2.6"),
    _spec("+-/", "np", PRODUCT_PARTITION_HALF, "2.6"),
    _spec("+-*/", "np", PRODUCT_PARTITION_HALF, "2.7"),
    _spec("-*/", "np", PRODUCT_PARTITION_HALF, "2.7"),
    _spec("+-", "np", PARTITION, "2.8"),
    _spec("*/", "np", PRODUCT_PARTITION, "2.9"),
    _spec("+-", "ep", PARTITION, "3"),
    _spec("*/", "ep", PRODUCT_PARTITION, "3"),
    _spec("/", "ep", PRODUCT_PARTITION_HALF, "3"),
)


def find_spec(ops, variant: str) -> ReductionSpec:
    key = opset(ops)
    for spec in SPECS:
        if spec.ops == key and spec.variant == variant:
            return spec
    raise UnsupportedSpec(f"no {variant} reduction for ops {''.join(key)}")


def specs_for_tag(tag: str) -> List[ReductionSpec]:
    found = [s for s in SPECS if s.tag == tag]
    if not found:
        raise UnsupportedSpec(f"unknown reduction tag {tag!r}")
    return found


# --------------------------------------------------------------------------
# instance generators


def _term(coef: int, **exps: int) -> str:
    parts = [str(coef)]
    for var in sorted(exps):
        e = exps[var]
        if e == 1:
            parts.append(var)
        elif e > 1:
            parts.append(f"{var}^{e}")
    return "*".join(parts)


def _root(s: SourceInstance) -> int:
    r = V.int_sqrt(prod(s.values))
    if r is None:
        raise NonSquareProduct(
            f"product {prod(s.values)} of {list(s.values)} is not a perfect square"
        )
    return r


def ep_shape(spec: ReductionSpec, n: int) -> TreeShape:
    """Two left combs; sizes balanced, or exact halves for ``{/}``."""
    if n == 1:
        return shape_catalog((1,))
    if spec.ops == ("/",):
        return shape_catalog((n // 2, n // 2))
    return shape_catalog(((n + 1) // 2, n // 2))


def reduce(s: SourceInstance, spec: ReductionSpec) -> Instance:
    if spec not in SPECS:
        raise UnsupportedSpec(f"unsupported reduction {spec}")
    if s.kind != spec.source:
        raise UnsupportedSpec(f"reduction {spec.name} expects a {spec.source} source, got {s.kind}")
    a = s.values
    n = s.n
    tag = spec.tag
    xs = [_term(v, x=1) for v in a]
    if spec.variant == "ep" or tag in ("2.8", "2.9"):
        vals = [str(v) for v in a]
        target = "0" if spec.source == PARTITION else "1"
    elif tag == "2.1":
        r = _root(s)
        vals = [_term(a[0], x=1)] + [_term(v, x=1, y=1) for v in a[1:]]
        vals += [_term(1, y=n // 2 - 1), _term(1, y=n // 2)]
        target = _term(2 * r, x=n // 2)
    elif tag == "2.2":
        vals, target = xs, _term(2 * _root(s), x=n // 2)
    elif tag == "2.3":
        vals, target = xs + ["y", "y"], "0"
    elif tag == "2.4":
        m = n // 3
        ys = [f"y{j}" for j in range(1, m + 1)]
        vals = xs + [y for y in ys for _ in range(3)]
        coef = Fraction(sum(a), m)
        target = "+".join(f"{coef}*x*{y}" for y in ys)
    elif tag == "2.5":
        r = _root(s)
        vals = [_term(a[0], x=1, y=1)] + xs[1:]
        vals += [_term(r, x=n // 2), _term(r, x=n // 2, y=1)]
        target = "2"
    elif tag == "2.6":
        r = _root(s)
        vals = xs + [_term(r, x=2 * n), _term(r, x=n)]
        target = f"x^{3 * n // 2}-{_term(1, x=n // 2)}"
    elif tag == "2.7":
        r = _root(s)
        vals = xs + [f"x^{2 * n}", f"x^{n}"]
        target = f"{_term(r, x=5 * n // 2)}-{_term(r, x=3 * n // 2)}"
    else:  # pragma: no cover - registry and branches are kept in sync
        raise UnsupportedSpec(spec.name)
    shape = ep_shape(spec, n) if spec.variant == "ep" else None
    provenance = f"{tag} {spec.variant} {''.join(spec.ops)} from {s.kind} {list(a)}"
    return make_instance(vals, target, spec.ops, spec.variant, shape, provenance)


def trivial_no_instance(spec: ReductionSpec) -> Instance:
    """Canonical unsatisfiable instance emitted for non-square products."""
    return make_instance(["1"], "2", "+", "std", None, f"{spec.tag} trivial no-instance")


# --------------------------------------------------------------------------
# witness maps


def solve_reduced(inst: Instance) -> Optional[Witness]:
    if inst.variant == "ep":
        return solve_ep(inst)
    return solve_np(inst)


def evaluate_witness(w: Witness, values) -> V.Value:
    if isinstance(w, FlatExpr):
        return eval_flat(w, values)
    return eval_tree(w, values)


def render_witness(w: Witness, values) -> str:
    if isinstance(w, FlatExpr):
        return print_flat(w, values)
    return print_full_paren(w, values)


def _product_group(lead: int, times=(), divide=()) -> Group:
    return Group(lead, tuple(("*", i) for i in times) + tuple(("/", i) for i in divide))


def _comb(op_for, items: Sequence[int]) -> ExprTree:
    """Left comb over ``items``; ``op_for(i)`` labels the edge joining leaf ``i``."""
    t: ExprTree = Leaf(items[0])
    for i in items[1:]:
        t = Node(op_for(i), t, Leaf(i))
    return t


def witness_forward(s: SourceInstance, spec: ReductionSpec, blocks: Blocks) -> Witness:
    if s.kind != spec.source:
        raise UnsupportedSpec(f"reduction {spec.name} expects a {spec.source} source")
    if not check_source_witness(s, blocks):
        raise InvalidSourceWitness(f"{blocks} is not a valid {s.kind} witness")
    inst = reduce(s, spec)
    n = s.n
    if spec.variant == "ep":
        w: Witness = _forward_ep(s, spec, blocks)
    elif spec.tag == "2.4":
        groups = []
        for j, block in enumerate(blocks):
            for copy, i in enumerate(block):
                groups.append(("+", _product_group(i, [n + 3 * j + copy])))
        w = FlatExpr(tuple(groups))
    elif spec.tag == "2.8":
        plus, minus = blocks
        w = FlatExpr(tuple(("+", Group(i)) for i in plus) + tuple(("-", Group(i)) for i in minus))
    elif spec.tag == "2.9":
        num, den = blocks if blocks[0] else blocks[::-1]
        w = FlatExpr((("+", _product_group(num[0], num[1:], den)),))
    else:
        # the first block holds index 0 in every decider witness, but do not rely on it
        first, second = blocks if 0 in blocks[0] else blocks[::-1]
        w = _forward_two_groups(spec.tag, n, first, second)
    got = evaluate_witness(w, inst.values)
    if not V.equals(got, inst.target):
        raise AssertionError(f"forward witness for {spec.name} evaluates to {V.format_value(got)}")
    return w


def _forward_two_groups(tag: str, n: int, first, second) -> FlatExpr:
    extra1, extra2 = n, n + 1
    if tag == "2.1":
        g1 = _product_group(first[0], first[1:], [extra1])
        g2 = _product_group(second[0], second[1:], [extra2])
        return FlatExpr((("+", g1), ("+", g2)))
    if tag == "2.2":
        return FlatExpr((("+", _product_group(first[0], first[1:])), ("+", _product_group(second[0], second[1:]))))
    if tag == "2.3":
        return FlatExpr(
            (("+", _product_group(first[0], list(first[1:]) + [extra1])),
             ("-", _product_group(second[0], list(second[1:]) + [extra2])))
        )
    if tag == "2.5":
        # the y-bearing extra absorbs the block holding a_1*x*y
        g1 = _product_group(extra2, divide=first)
        g2 = _product_group(extra1, divide=second)
        return FlatExpr((("+", g1), ("+", g2)))
    if tag == "2.6":
        return FlatExpr((("+", _product_group(extra1, divide=first)), ("-", _product_group(extra2, divide=second))))
    if tag == "2.7":
        return FlatExpr((("+", _product_group(extra1, times=first)), ("-", _product_group(extra2, times=second))))
    raise UnsupportedSpec(tag)  # pragma: no cover


def _forward_ep(s: SourceInstance, spec: ReductionSpec, blocks: Blocks) -> ExprTree:
    n = s.n
    if n == 1:
        return Leaf(0)
    shape = ep_shape(spec, n)
    k1 = shape.left.leaf_count
    pos, neg = (list(b) for b in blocks)
    if spec.ops == ("/",):
        # numerator = first leaf on the left plus the tail of the right comb
        left = [pos[0]] + neg[1:]
        right = [neg[0]] + pos[1:]
        return Node("/", _comb(lambda i: "/", left), _comb(lambda i: "/", right))
    add, sub = ("+", "-") if spec.ops == ("+", "-") else ("*", "/")
    if not neg:
        # only reachable for products of ones: any split of ones works
        pos, neg = pos[:-1], pos[-1:]
    # the left comb starts with a positive leaf, the right comb with a negative one
    rest = pos[1:] + neg[1:]
    left = [pos[0]] + rest[: k1 - 1]
    right = [neg[0]] + rest[k1 - 1:]
    positive = set(pos)
    left_tree = _comb(lambda i: add if i in positive else sub, left)
    right_tree = _comb(lambda i: add if i not in positive else sub, right)
    return Node(sub, left_tree, right_tree)


def leaf_polarity(t: ExprTree) -> Dict[int, int]:
    """+1 or -1 per leaf: right operands of ``-`` and ``/`` flip the sign."""
    out: Dict[int, int] = {}

    def go(node, sign):
        if isinstance(node, Leaf):
            out[node.index] = sign
            return
        go(node.left, sign)
        go(node.right, -sign if node.op in "-/" else sign)

    go(t, 1)
    return out


def witness_backward(inst: Instance, spec: ReductionSpec, w: Witness, s: Optional[SourceInstance] = None) -> Blocks:
    """Recover the source partition from an expression attaining the target.

    ``s`` defaults to the source implied by the instance's first values; it
    is only needed to validate the recovered blocks.
    """
    if not V.equals(evaluate_witness(w, inst.values), inst.target):
        raise ValueError("witness does not evaluate to the target")
    n = _source_size(inst, spec)
    if s is None:
        s = SourceInstance(spec.source, tuple(_source_number(inst.values[i]) for i in range(n)))
    if spec.variant == "ep":
        if not isinstance(w, (Leaf, Node)):
            raise WitnessShapeUnexpected("expected an expression tree")
        blocks = _backward_ep(spec, w, n)
    else:
        if not isinstance(w, FlatExpr):
            raise WitnessShapeUnexpected("expected a no-parenthesis expression")
        blocks = _backward_np(spec, w, n)
    if not check_source_witness(s, blocks):
        raise WitnessShapeUnexpected(
            f"recovered blocks {format_blocks(s, blocks)} are not a {s.kind} witness"
        )
    return blocks


def _source_size(inst: Instance, spec: ReductionSpec) -> int:
    if spec.variant == "ep" or spec.tag in ("2.2", "2.8", "2.9"):
        return inst.n
    if spec.tag == "2.4":
        return inst.n // 2
    return inst.n - 2


def _source_number(v: V.Value) -> int:
    form = V.monomial_form(v)
    if form is None or form[0].denominator != 1:
        raise WitnessShapeUnexpected(f"cannot read a source number from {V.format_value(v)}")
    return int(form[0])


def _backward_ep(spec: ReductionSpec, w: ExprTree, n: int) -> Blocks:
    if n == 1:
        return ((0,), ())
    pol = leaf_polarity(w)
    pos = tuple(sorted(i for i, p in pol.items() if p > 0))
    neg = tuple(sorted(i for i, p in pol.items() if p < 0))
    return (pos, neg)


def _backward_np(spec: ReductionSpec, w: FlatExpr, n: int) -> Blocks:
    tag = spec.tag
    if tag == "2.8":
        pos = tuple(sorted(g.lead for sgn, g in w.groups if sgn == "+"))
        neg = tuple(sorted(g.lead for sgn, g in w.groups if sgn == "-"))
        return (pos, neg)
    if tag == "2.9":
        if len(w.groups) != 1:
            raise WitnessShapeUnexpected("expected a single product group")
        g = w.groups[0][1]
        num = sorted([g.lead] + [i for op, i in g.tail if op == "*"])
        den = sorted(i for op, i in g.tail if op == "/")
        return (tuple(num), tuple(den))
    if tag == "2.4":
        return _backward_three(w, n)
    # two-group normal form: each group carries one block of source indices
    if len(w.groups) != 2:
        raise WitnessShapeUnexpected(f"expected two groups, found {len(w.groups)}")
    blocks = []
    for _, g in w.groups:
        blocks.append(tuple(sorted(i for i in g.indices if i < n)))
    if 0 not in blocks[0]:
        blocks.reverse()
    return tuple(blocks)


def _backward_three(w: FlatExpr, n: int) -> Blocks:
    by_copy: Dict[int, List[int]] = {}
    for sign, g in w.groups:
        idx = g.indices
        src = [i for i in idx if i < n]
        aux = [i for i in idx if i >= n]
        if sign != "+" or len(src) != 1 or len(aux) != 1 or any(op != "*" for op, _ in g.tail):
            raise WitnessShapeUnexpected("expected groups of the form a_i*x*y_j added together")
        by_copy.setdefault((aux[0] - n) // 3, []).append(src[0])
    return tuple(tuple(sorted(v)) for _, v in sorted(by_copy.items()))


# --------------------------------------------------------------------------
# verification


def substitute(v: V.Value, point=None) -> Fraction:
    if isinstance(v, Fraction):
        return v
    point = point or {name: LARGE for name in V.variables_of(v)}
    return v.eval_at(point)


def cross_domain_ok(inst: Instance, w: Witness) -> bool:
    """Re-evaluate ``w`` with every variable replaced by a large integer."""
    names = set(V.variables_of(inst.target))
    for v in inst.values:
        names |= V.variables_of(v)
    point = {name: LARGE for name in names}
    vals = [substitute(v, point) for v in inst.values]
    try:
        got = evaluate_witness(w, vals)
    except ZeroDivisionError:
        return False
    return got == substitute(inst.target, point)


def source_space(kind: str, max_n: int, max_value: int, min_n: int = 1,
                 samples: Optional[int] = None, seed: int = 0, sample_from: int = 6) -> List[SourceInstance]:
    """Sorted multisets per admissible size; sampled for sizes >= ``sample_from``."""
    rng = random.Random(seed)
    out = []
    for n in range(max(1, min_n), max_n + 1):
        if kind == PRODUCT_PARTITION_HALF and n % 2:
            continue
        if kind == THREE_PARTITION_3 and n % 3:
            continue
        pool = list(itertools.combinations_with_replacement(range(1, max_value + 1), n))
        if samples is not None and n >= sample_from and len(pool) > samples:
            pool = sorted(rng.sample(pool, samples))
        out.extend(SourceInstance(kind, vals) for vals in pool)
    return out


@dataclass
class SourceResult:
    values: Tuple[int, ...]
    source_yes: bool
    status: str  # "checked" or "nonsquare"
    reduced_yes: Optional[bool] = None
    witness: Optional[str] = None
    problems: List[str] = field(default_factory=list)
    anomaly: Optional[str] = None
    cross_checked: int = 0


def check_source(spec: ReductionSpec, s: SourceInstance) -> SourceResult:
    """All per-source checks; ``problems`` lists counterexample reasons."""
    blocks = decide_source(s)
    res = SourceResult(s.values, blocks is not None, "checked")
    try:
        inst = reduce(s, spec)
    except NonSquareProduct:
        res.status = "nonsquare"
        if blocks is not None:
            res.problems.append("non-square product but the source has a witness")
        return res
    w = solve_reduced(inst)
    res.reduced_yes = w is not None
    if w is not None:
        res.witness = render_witness(w, inst.values)
    if res.reduced_yes != res.source_yes:
        res.problems.append(
            f"source {'yes' if res.source_yes else 'no'} but reduced instance {'yes' if res.reduced_yes else 'no'}"
        )
    if blocks is not None:
        try:
            fw = witness_forward(s, spec, blocks)
        except AssertionError as exc:
            res.problems.append(f"forward witness unsound: {exc}")
            fw = None
        if fw is not None:
            try:
                back = witness_backward(inst, spec, fw, s)
                if not check_source_witness(s, back):
                    res.problems.append("round trip produced an invalid source witness")
            except WitnessShapeUnexpected as exc:
                res.problems.append(f"round trip failed: {exc}")
            if inst.domain == "fun":
                res.cross_checked += 1
                if not cross_domain_ok(inst, fw):
                    res.problems.append("cross-domain check failed on the forward witness")
    if w is not None:
        try:
            witness_backward(inst, spec, w, s)
        except WitnessShapeUnexpected as exc:
            res.anomaly = str(exc)
        if inst.domain == "fun":
            res.cross_checked += 1
            if not cross_domain_ok(inst, w):
                res.problems.append("cross-domain check failed on the solver witness")
    return res


def _check_job(args):
    spec, s = args
    return check_source(spec, s)


DEFAULT_BOUNDS = {
    PARTITION: (5, 8),
    PRODUCT_PARTITION: (5, 8),
    PRODUCT_PARTITION_HALF: (4, 6),
    THREE_PARTITION_3: (6, 6),
}


def verify_reduction(
    spec: ReductionSpec,
    max_n: Optional[int] = None,
    max_value: Optional[int] = None,
    samples: Optional[int] = None,
    seed: int = 0,
    threads: int = 1,
    timing: bool = False,
) -> dict:
    """Compare source decisions with reduced-instance decisions on a bounded space."""
    d_n, d_v = DEFAULT_BOUNDS[spec.source]
    max_n = d_n if max_n is None else max_n
    max_value = d_v if max_value is None else max_value
    start = time.perf_counter()
    sources = source_space(spec.source, max_n, max_value, samples=samples, seed=seed)
    jobs = [(spec, s) for s in sources]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_check_job, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = [_check_job(j) for j in jobs]
    results.sort(key=lambda r: (len(r.values), r.values))
    counterexamples = [
        {"source": list(r.values), "source_yes": r.source_yes, "reduced_yes": r.reduced_yes,
         "witness": r.witness, "problems": r.problems}
        for r in results if r.problems
    ]
    anomalies = [
        {"source": list(r.values), "witness": r.witness, "reason": r.anomaly}
        for r in results if r.anomaly
    ]
    checked = [r for r in results if r.status == "checked"]
    report = {
        "spec": spec.tag,
        "variant": spec.variant,
        "ops": "".join(spec.ops),
        "source_kind": spec.source,
        "bounds": {"max_n": max_n, "max_value": max_value, "samples": samples, "seed": seed},
        "counts": {
            "sources": len(results),
            "checked": len(checked),
            "nonsquare_skipped": len(results) - len(checked),
            "source_yes": sum(r.source_yes for r in results),
            "reduced_yes": sum(bool(r.reduced_yes) for r in checked),
            "agree": sum(r.reduced_yes == r.source_yes for r in checked),
            "cross_domain_checked": sum(r.cross_checked for r in results),
            "counterexamples": len(counterexamples),
            "anomalies": len(anomalies),
        },
        "counterexamples": counterexamples,
        "anomalies": anomalies,
        "ok": not counterexamples,
    }
    if timing:
        report["millis"] = round((time.perf_counter() - start) * 1000, 3)
    return report


def report_text(report: dict) -> str:
    c = report["counts"]
    lines = [
        f"spec {report['spec']} {report['variant']} {{{report['ops']}}} from {report['source_kind']}: "
        f"{c['checked']} checked, {c['nonsquare_skipped']} non-square, "
        f"{c['agree']} agree, {c['counterexamples']} counterexamples, {c['anomalies']} anomalies"
    ]
    for ce in report["counterexamples"][:10]:
        lines.append(f"  counterexample {ce['source']}: {'; '.join(ce['problems'])} witness={ce['witness']}")
    for an in report["anomalies"][:10]:
        lines.append(f"  anomaly {an['source']}: {an['reason']} witness={an['witness']}")
    return "\n".join(lines)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
