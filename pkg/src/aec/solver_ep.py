"""Enforced-parenthesis variant: value sets per (subshape, index mask).

Shapes are compared up to unordered isomorphism unless ``ordered=True``.
"""

from __future__ import annotations

import time
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

from . import values as V
from .errors import BoundExceeded, EmptyInstance, LeafCountMismatch
from .expressions import (
    COMMUTATIVE,
    ExprTree,
    Instance,
    Leaf,
    Node,
    TreeShape,
    eval_tree,
    isomorphic,
    leaves,
    left_comb,
    shape_of,
    two_comb,
)
from .solver_std import DEFAULT_BOUND, SolveStats, Table, _apply, solve_against


def _masks_of_size(mask: int, k: int):
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    for combo in combinations(bits, k):
        yield sum(combo)


class EPTables:
    def __init__(self, values: Sequence[V.Value], ops: Sequence[str], ordered: bool = False):
        self.values = tuple(values)
        self.ops = tuple(ops)
        self.ordered = ordered
        self.stats = SolveStats()
        self._memo: Dict[Tuple[str, int], Table] = {}

    def _key(self, shape: TreeShape) -> str:
        return shape.ordered_code if self.ordered else shape.code

    def splits(self, shape: TreeShape, mask: int):
        """Yield (left_mask, right_mask, both_ways) for one shape node.

        ``left_mask`` feeds ``shape.left``. In unordered mode the mirrored
        operand order is also needed for non-commutative ops; when both
        children are isomorphic, visiting ``L < R`` already covers the swap.
        """
        k = shape.left.leaf_count
        same = not self.ordered and shape.left.code == shape.right.code
        for lm in _masks_of_size(mask, k):
            rm = mask ^ lm
            if same and lm > rm:
                continue
            yield lm, rm, not self.ordered

    def table(self, shape: TreeShape, mask: int) -> Table:
        key = (self._key(shape), mask)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if shape.is_leaf:
            out: Table = {self.values[mask.bit_length() - 1]: None}
        else:
            out = {}
            for lm, rm, both in self.splits(shape, mask):
                left, right = self.table(shape.left, lm), self.table(shape.right, rm)
                for a in left:
                    for b in right:
                        for op in self.ops:
                            self.stats.nodes += 1
                            v = _apply(op, a, b)
                            if v is not None and v not in out:
                                out[v] = (op, True, lm, a, rm, b)
                            if both and op not in COMMUTATIVE:
                                v = _apply(op, b, a)
                                if v is not None and v not in out:
                                    out[v] = (op, False, rm, b, lm, a)
            self.stats.memo_entries += len(out)
        self._memo[key] = out
        return out

    def find(self, shape: TreeShape, target) -> Optional[ExprTree]:
        full = (1 << len(self.values)) - 1
        if shape.is_leaf:
            return Leaf(0) if self.values[0] == target else None
        for lm, rm, both in self.splits(shape, full):
            hit = solve_against(target, self.table(shape.left, lm), self.table(shape.right, rm), self.ops, both)
            if hit is None:
                continue
            op, first_is_left, first, second = hit
            if first_is_left:
                return Node(op, self.build(shape.left, lm, first), self.build(shape.right, rm, second))
            return Node(op, self.build(shape.right, rm, first), self.build(shape.left, lm, second))
        return None

    def build(self, shape: TreeShape, mask: int, value) -> ExprTree:
        bp = self.table(shape, mask)[value]
        if bp is None:
            return Leaf(mask.bit_length() - 1)
        op, straight, am, a, bm, b = bp
        first, second = (shape.left, shape.right) if straight else (shape.right, shape.left)
        return Node(op, self.build(first, am, a), self.build(second, bm, b))


def solve_ep(
    inst: Instance,
    bound: int = DEFAULT_BOUND,
    stats: Optional[SolveStats] = None,
    ordered: bool = False,
) -> Optional[ExprTree]:
    """Exact decision for the enforced-parenthesis variant."""
    if not inst.values:
        raise EmptyInstance("instance has no values")
    shape = inst.shape
    if shape is None:
        raise ValueError("instance has no shape")
    if shape.leaf_count != inst.n:
        raise LeafCountMismatch(f"shape has {shape.leaf_count} leaves, instance has {inst.n} values")
    if inst.n > bound:
        raise BoundExceeded(f"{inst.n} values exceed the bound of {bound}")
    start = time.perf_counter()
    tables = EPTables(inst.values, inst.ops, ordered)
    tree = tables.find(shape, inst.target)
    if tree is not None:
        ok = (
            sorted(leaves(tree)) == list(range(inst.n))
            and isomorphic(shape_of(tree), shape, ordered=ordered)
            and V.equals(eval_tree(tree, inst.values), inst.target)
        )
        if not ok:
            raise AssertionError("internal error: invalid witness")
    if stats is not None:
        stats.nodes = tables.stats.nodes
        stats.memo_entries = tables.stats.memo_entries
        stats.millis = (time.perf_counter() - start) * 1000
    return tree


def shape_catalog(sizes: Sequence[int]) -> TreeShape:
    """Comb shapes used by the enforced-parenthesis reductions.

    One size gives a single left comb; two sizes give a root whose children
    are left combs with those leaf counts.
    """
    sizes = tuple(sizes)
    if len(sizes) == 1:
        return left_comb(sizes[0])
    if len(sizes) == 2:
        return two_comb(*sizes)
    raise ValueError("expected one or two comb sizes")
