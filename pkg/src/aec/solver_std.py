"""Standard variant: memoized achievable-value sets over index bitmasks.

``achievable(S)`` for a singleton is the value itself; otherwise it is the
union over splits ``S = L | R`` (only ``L < R`` is visited) of ``l op r`` and,
for ``-`` and ``/``, also ``r op l``. Every distinct value keeps one
back-pointer, which is enough to rebuild a witness tree.

At the top level the full set is never materialized: for each split and each
left value the solver computes the right value that would hit the target and
looks it up.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple

from . import values as V
from .errors import BoundExceeded, EmptyInstance
from .expressions import COMMUTATIVE, ExprTree, Instance, Leaf, Node, eval_tree, leaves

DEFAULT_BOUND = 12

# value -> back-pointer; None marks a leaf
Table = Dict[V.Value, Optional[tuple]]


@dataclass
class SolveStats:
    nodes: int = 0
    memo_entries: int = 0
    millis: float = 0.0


def submasks(mask: int) -> Iterator[int]:
    """Nonempty proper submasks of ``mask``."""
    sub = (mask - 1) & mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def canonical_splits(mask: int) -> Iterator[Tuple[int, int]]:
    for left in submasks(mask):
        right = mask ^ left
        if left < right:
            yield left, right


def _apply(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if V.is_zero(b):
        return None
    return a / b


def combine_into(out: Table, left: Table, right: Table, ops, lm: int, rm: int, both_ways: bool, stats) -> None:
    """Add every ``l op r`` (and ``r op l`` for non-commutative ops) to ``out``."""
    for a in left:
        for b in right:
            for op in ops:
                stats.nodes += 1
                v = _apply(op, a, b)
                if v is not None and v not in out:
                    out[v] = (op, lm, a, rm, b)
                if both_ways and op not in COMMUTATIVE:
                    v = _apply(op, b, a)
                    if v is not None and v not in out:
                        out[v] = (op, rm, b, lm, a)


def solve_against(target, left: Table, right: Table, ops, both_ways: bool):
    """Find ``a`` in ``left``, ``b`` in ``right`` and an op reaching ``target``.

    Returns ``(op, first_is_left, first, second)`` meaning ``first op second``,
    or None.
    """
    t_zero = V.is_zero(target)
    for a in left:
        a_zero = V.is_zero(a)
        for op in ops:
            orients = (True, False) if (both_ways and op not in COMMUTATIVE) else (True,)
            for a_first in orients:
                b = _needed(op, a, a_first, target, a_zero, t_zero, right)
                if b is not None:
                    return (op, True, a, b) if a_first else (op, False, b, a)
    return None


def _needed(op, a, a_first, t, a_zero, t_zero, right):
    """The right-hand value making ``a op b`` (or ``b op a``) equal ``t``."""
    if op == "+":
        b = t - a
    elif op == "-":
        b = a - t if a_first else t + a
    elif op == "*":
        if a_zero:
            return next(iter(right)) if t_zero else None
        b = t / a
    elif a_first:
        # a / b = t with b != 0
        if t_zero:
            if not a_zero:
                return None
            return next((x for x in right if not V.is_zero(x)), None)
        b = a / t
        if V.is_zero(b):
            return None
    else:
        # b / a = t
        if a_zero:
            return None
        b = t * a
    return b if b in right else None


class StdTables:
    """Achievable-value tables for every proper sub-multiset of one input."""

    def __init__(self, values: Sequence[V.Value], ops: Sequence[str]):
        self.values = tuple(values)
        self.ops = tuple(ops)
        self.n = len(values)
        self.full = (1 << self.n) - 1
        self.stats = SolveStats()
        self._tables: Dict[int, Table] = {}
        for i, v in enumerate(self.values):
            self._tables[1 << i] = {v: None}

    def table(self, mask: int) -> Table:
        t = self._tables.get(mask)
        if t is not None:
            return t
        out: Table = {}
        for lm, rm in canonical_splits(mask):
            combine_into(out, self.table(lm), self.table(rm), self.ops, lm, rm, True, self.stats)
        self._tables[mask] = out
        self.stats.memo_entries += len(out)
        return out

    def find(self, target) -> Optional[ExprTree]:
        if self.n == 1:
            return Leaf(0) if self.values[0] == target else None
        for lm, rm in canonical_splits(self.full):
            hit = solve_against(target, self.table(lm), self.table(rm), self.ops, True)
            if hit is not None:
                op, first_is_left, first, second = hit
                if first_is_left:
                    return Node(op, self.build(lm, first), self.build(rm, second))
                return Node(op, self.build(rm, first), self.build(lm, second))
        return None

    def build(self, mask: int, value) -> ExprTree:
        bp = self.table(mask)[value]
        if bp is None:
            return Leaf(mask.bit_length() - 1)
        op, am, a, bm, b = bp
        return Node(op, self.build(am, a), self.build(bm, b))


_CACHE: "OrderedDict[tuple, StdTables]" = OrderedDict()
_CACHE_SIZE = 32


def tables_for(values, ops) -> StdTables:
    """Shared tables per (values, ops) so repeated targets reuse the memo."""
    key = (tuple(values), tuple(ops))
    hit = _CACHE.get(key)
    if hit is not None:
        _CACHE.move_to_end(key)
        return hit
    tables = StdTables(values, ops)
    _CACHE[key] = tables
    if len(_CACHE) > _CACHE_SIZE:
        _CACHE.popitem(last=False)
    return tables


def solve_std(
    inst: Instance, bound: int = DEFAULT_BOUND, stats: Optional[SolveStats] = None, reuse: bool = True
) -> Optional[ExprTree]:
    """Exact decision for the standard variant; returns a witness tree or None."""
    if not inst.values:
        raise EmptyInstance("instance has no values")
    if inst.n > bound:
        raise BoundExceeded(f"{inst.n} values exceed the bound of {bound}")
    start = time.perf_counter()
    tables = tables_for(inst.values, inst.ops) if reuse else StdTables(inst.values, inst.ops)
    before = tables.stats.nodes
    tree = tables.find(inst.target)
    if tree is not None:
        if sorted(leaves(tree)) != list(range(inst.n)) or not V.equals(
            eval_tree(tree, inst.values), inst.target
        ):
            raise AssertionError("internal error: invalid witness")
    if stats is not None:
        stats.nodes = tables.stats.nodes - before
        stats.memo_entries = tables.stats.memo_entries
        stats.millis = (time.perf_counter() - start) * 1000
    return tree


def achievable_values(inst: Instance, mask: Optional[int] = None, commutative_shortcut: bool = True) -> set:
    """Complete set of values reachable using exactly the elements in ``mask``.

    With ``commutative_shortcut=False`` the mirrored ``r op l`` is also tried
    for ``+`` and ``*``; the result must not change.
    """
    full = (1 << inst.n) - 1
    mask = full if mask is None else mask
    if not mask or mask & ~full:
        raise ValueError("mask must be a nonempty subset of the instance")
    if commutative_shortcut:
        return set(StdTables(inst.values, inst.ops).table(mask))
    memo: Dict[int, set] = {}

    def go(m):
        if m in memo:
            return memo[m]
        if m & (m - 1) == 0:
            res = {inst.values[m.bit_length() - 1]}
        else:
            res = set()
            for lm in submasks(m):
                for a in go(lm):
                    for b in go(m ^ lm):
                        for op in inst.ops:
                            v = _apply(op, a, b)
                            if v is not None:
                                res.add(v)
        memo[m] = res
        return res

    return go(mask)
