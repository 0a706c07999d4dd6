"""Naive enumerators used as ground truth for the solvers.

Nothing here memoizes or deduplicates: every ordered tree shape, every leaf
permutation and every operator labeling is produced, so the streams share no
search logic with the deciders they audit.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence, Tuple

from . import values as V
from .errors import BoundExceeded
from .expressions import (
    ExprTree,
    Leaf,
    Node,
    TreeShape,
    apply_op,
    isomorphic,
    ordered_shapes,
    shape_of,
)
from .solver_np import FlatExpr, Group

MAX_ORACLE_N = 6


def _check(values):
    if len(values) > MAX_ORACLE_N:
        raise BoundExceeded(f"oracle limited to {MAX_ORACLE_N} values")


def _fill(shape: TreeShape, perm, labels):
    """Place leaves left to right and labels in pre-order."""
    perm_it, label_it = iter(perm), iter(labels)

    def go(s):
        if s.is_leaf:
            return Leaf(next(perm_it))
        op = next(label_it)
        return Node(op, go(s.left), go(s.right))

    return go(shape)


def _evaluate(t: ExprTree, values):
    if isinstance(t, Leaf):
        return values[t.index]
    return apply_op(t.op, _evaluate(t.left, values), _evaluate(t.right, values))


def enumerate_std(values: Sequence[V.Value], ops: Sequence[str]) -> Iterator[Tuple[ExprTree, V.Value]]:
    _check(values)
    n = len(values)
    for shape in ordered_shapes(n):
        for perm in itertools.permutations(range(n)):
            for labels in itertools.product(ops, repeat=n - 1):
                tree = _fill(shape, perm, labels)
                try:
                    yield tree, _evaluate(tree, values)
                except ZeroDivisionError:
                    continue


def enumerate_ep(values, ops, shape: TreeShape, ordered: bool = False):
    for tree, v in enumerate_std(values, ops):
        if isomorphic(shape_of(tree), shape, ordered=ordered):
            yield tree, v


def enumerate_np(values: Sequence[V.Value], ops: Sequence[str]) -> Iterator[Tuple[FlatExpr, V.Value]]:
    """Every no-parenthesis string: a leaf order plus one operator per gap."""
    _check(values)
    n = len(values)
    for perm in itertools.permutations(range(n)):
        for labels in itertools.product(ops, repeat=n - 1):
            groups = []
            lead, tail, sign = perm[0], [], "+"
            for op, i in zip(labels, perm[1:]):
                if op in "*/":
                    tail.append((op, i))
                else:
                    groups.append((sign, Group(lead, tuple(tail))))
                    lead, tail, sign = i, [], op
            groups.append((sign, Group(lead, tuple(tail))))
            expr = FlatExpr(tuple(groups))
            try:
                yield expr, _eval_string(perm, labels, values)
            except ZeroDivisionError:
                continue


def _eval_string(perm, labels, values):
    # textbook precedence: fold * and / into the pending term, then add it
    total = None
    term = values[perm[0]]
    pending_sign = "+"
    for op, i in zip(labels, perm[1:]):
        v = values[i]
        if op == "*":
            term = V.mul(term, v)
        elif op == "/":
            term = V.div(term, v)
        else:
            total = term if total is None else (
                V.add(total, term) if pending_sign == "+" else V.sub(total, term)
            )
            term, pending_sign = v, op
    if total is None:
        return term
    return V.add(total, term) if pending_sign == "+" else V.sub(total, term)


def catalan(k: int) -> int:
    from math import comb

    return comb(2 * k, k) // (k + 1)


def std_stream_size(n: int, n_ops: int) -> int:
    """Stream length before zero-division skips."""
    from math import factorial

    return catalan(n - 1) * factorial(n) * n_ops ** (n - 1)
