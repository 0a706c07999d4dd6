"""No-parenthesis expressions: flat forms, group values and an exact decider.

A no-parenthesis expression is a signed sum of *groups*; a group is a lead
value followed by ``*``/``/`` steps, so its value is the product of its
numerator picks over the product of its denominator picks, with the lead
always on top. The first group is always added (no leading unary minus).

The decider runs a depth-first search over the remaining multiset of values
and the remaining target. Each step commits one group and one sign. Two
branching rules are both complete, and the search takes whichever offers
fewer candidates:

* some group contains the first remaining value;
* if every value is a (Laurent) monomial, some group must produce each
  monomial still present in the remaining target.

Failed states are memoized on (remaining multiset, remaining target, whether
a ``+`` group has been used).
"""

from __future__ import annotations

import itertools
import time
from math import prod
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

from . import values as V
from .errors import EmptyInstance, ParseError
from .expressions import Instance, Leaf, Node, format_leaf, parse_expression, ExprTree


@dataclass(frozen=True)
class Group:
    lead: int
    tail: Tuple[Tuple[str, int], ...] = ()

    @property
    def indices(self) -> List[int]:
        return [self.lead] + [i for _, i in self.tail]


@dataclass(frozen=True)
class FlatExpr:
    groups: Tuple[Tuple[str, Group], ...]

    @property
    def indices(self) -> List[int]:
        return [i for _, g in self.groups for i in g.indices]

    def op_counts(self) -> Dict[str, int]:
        counts = {"+": 0, "-": 0, "*": 0, "/": 0}
        for k, (sign, g) in enumerate(self.groups):
            if k:
                counts[sign] += 1
            for op, _ in g.tail:
                counts[op] += 1
        return counts


def group_value(g: Group, values: Sequence[V.Value]) -> V.Value:
    acc = values[g.lead]
    for op, i in g.tail:
        acc = V.mul(acc, values[i]) if op == "*" else V.div(acc, values[i])
    return acc


def eval_flat(e: FlatExpr, values: Sequence[V.Value]) -> V.Value:
    total = None
    for sign, g in e.groups:
        v = group_value(g, values)
        if total is None:
            total = v if sign == "+" else -v
        else:
            total = V.add(total, v) if sign == "+" else V.sub(total, v)
    return total


def print_flat(e: FlatExpr, values: Sequence[V.Value]) -> str:
    parts = []
    for k, (sign, g) in enumerate(e.groups):
        text = format_leaf(values[g.lead]) + "".join(op + format_leaf(values[i]) for op, i in g.tail)
        parts.append(text if k == 0 and sign == "+" else sign + text)
    return "".join(parts)


def flat_to_tree(e: FlatExpr) -> ExprTree:
    tree = None
    for sign, g in e.groups:
        sub: ExprTree = Leaf(g.lead)
        for op, i in g.tail:
            sub = Node(op, sub, Leaf(i))
        tree = sub if tree is None else Node(sign, tree, sub)
    return tree


def flatten_tree(t: ExprTree) -> FlatExpr:
    """Inverse of :func:`flat_to_tree`; raises ValueError for nested shapes."""

    def group_of(node) -> Group:
        tail = []
        while isinstance(node, Node):
            if node.op not in "*/" or not isinstance(node.right, Leaf):
                raise ValueError("not a no-parenthesis expression")
            tail.append((node.op, node.right.index))
            node = node.left
        return Group(node.index, tuple(reversed(tail)))

    groups = []
    node = t
    while isinstance(node, Node) and node.op in "+-":
        groups.append((node.op, group_of(node.right)))
        node = node.left
    groups.append(("+", group_of(node)))
    return FlatExpr(tuple(reversed(groups)))


def parse_flat(text: str) -> Tuple[FlatExpr, List[V.Value]]:
    tree, vals = parse_expression(text)
    try:
        return flatten_tree(tree), vals
    except ValueError as exc:
        raise ParseError(str(exc), 0) from None


# --------------------------------------------------------------------------
# group values


def group_values(
    indices: Sequence[int], values: Sequence[V.Value], ops: Sequence[str]
) -> Dict[V.Value, Group]:
    """Every value one group over ``indices`` can take, with its least witness.

    Division by zero silently drops the candidate.
    """
    idx = sorted(indices)
    if not idx:
        raise ValueError("a group needs at least one value")
    has_mul, has_div = "*" in ops, "/" in ops
    if len(idx) == 1:
        splits = [((idx[0],), ())]
    elif has_mul and has_div:
        splits = []
        for r in range(len(idx), 0, -1):
            for num in itertools.combinations(idx, r):
                splits.append((num, tuple(i for i in idx if i not in num)))
    elif has_mul:
        splits = [(tuple(idx), ())]
    elif has_div:
        splits = [((i,), tuple(j for j in idx if j != i)) for i in idx]
    else:
        splits = []
    out: Dict[V.Value, Group] = {}
    for num, den in splits:
        g = Group(num[0], tuple(("*", i) for i in num[1:]) + tuple(("/", i) for i in den))
        try:
            v = group_value(g, values)
        except ZeroDivisionError:
            continue
        out.setdefault(v, g)
    return out


# --------------------------------------------------------------------------
# single-operation deciders


def _total(vals, op):
    """Sum or product; rationals skip the per-step gcd of Fraction arithmetic."""
    if all(isinstance(v, Fraction) for v in vals):
        if op == "*":
            return Fraction(prod(v.numerator for v in vals), prod(v.denominator for v in vals))
        if all(v.denominator == 1 for v in vals):
            return Fraction(sum(v.numerator for v in vals))
    return reduce(V.add if op == "+" else V.mul, vals)


def _two(like):
    return Fraction(2) if isinstance(like, Fraction) else V.as_function(Fraction(2))


def _first_index(vals, wanted) -> Optional[int]:
    for i, a in enumerate(vals):
        if any(V.equals(a, w) for w in wanted):
            return i
    return None


def _square_roots(v: Fraction):
    if v < 0:
        return []
    num, den = V.int_sqrt(v.numerator), V.int_sqrt(v.denominator)
    if num is None or den is None:
        return []
    r = Fraction(num, den)
    return [r, -r] if r else [r]


def solve_single_op(inst: Instance) -> Optional[FlatExpr]:
    """Closed-form decision for a one-operator op set."""
    if len(inst.ops) != 1:
        raise ValueError("solve_single_op needs a singleton op set")
    op = inst.ops[0]
    vals, t = inst.values, inst.target
    n = len(vals)
    if op == "+":
        if V.equals(_total(vals, "+"), t):
            return FlatExpr(tuple(("+", Group(i)) for i in range(n)))
        return None
    if op == "*":
        if V.equals(_total(vals, "*"), t):
            return FlatExpr((("+", Group(0, tuple(("*", i) for i in range(1, n)))),))
        return None
    if op == "-":
        # a_i - (S - a_i) = t  <=>  a_i = (t + S) / 2
        i = _first_index(vals, [V.div(V.add(t, _total(vals, "+")), _two(t))])
        if i is None:
            return None
        rest = tuple(("-", Group(j)) for j in range(n) if j != i)
        return FlatExpr((("+", Group(i)),) + rest)
    # "/": a_i / (P / a_i) = t  <=>  a_i^2 = t * P when nothing is zero
    zeros = [i for i, a in enumerate(vals) if V.is_zero(a)]
    if len(zeros) > 1:
        return None
    if zeros:
        i = zeros[0] if V.is_zero(t) else None
    else:
        tp = V.mul(t, _total(vals, "*"))
        if isinstance(tp, Fraction):
            i = _first_index(vals, _square_roots(tp))
        else:
            i = next((k for k, a in enumerate(vals) if V.equals(V.mul(a, a), tp)), None)
    if i is None:
        return None
    return FlatExpr((("+", Group(i, tuple(("/", j) for j in range(n) if j != i))),))


# --------------------------------------------------------------------------
# search


class _Laurent:
    """Values as ``(coef, exponent vector)``; targets as dicts of such terms."""

    monomial = True

    def __init__(self, forms, variables):
        self.vars = variables
        self.units = []
        for coef, exps in forms:
            self.units.append((coef, tuple(exps.get(v, 0) for v in variables)))

    def combine(self, num, den):
        coef = Fraction(1)
        exps = [0] * len(self.vars)
        for t, (n, d) in enumerate(zip(num, den)):
            if not (n or d):
                continue
            c, e = self.units[t]
            if d and c == 0:
                return None
            k = n - d
            coef *= c ** k if k >= 0 else Fraction(1) / c ** -k
            if k:
                for j, x in enumerate(e):
                    exps[j] += k * x
        return coef, tuple(exps)

    def residual(self, target):
        if not isinstance(target, V.RationalFunction):
            return {tuple(0 for _ in self.vars): Fraction(target)} if target else {}
        coef_num, den = target.num, target.den
        (dm, dc), = den.terms.items()
        dexp = dict(dm)
        out = {}
        for m, c in coef_num.terms.items():
            ex = dict(m)
            key = tuple(ex.get(v, 0) - dexp.get(v, 0) for v in self.vars)
            out[key] = c / dc
        return out

    @staticmethod
    def is_zero(res) -> bool:
        return not res

    @staticmethod
    def subtract(res, sign, elem):
        coef, exps = elem
        if coef == 0:
            return res
        out = dict(res)
        c = out.get(exps, 0) - (coef if sign == "+" else -coef)
        if c:
            out[exps] = c
        else:
            del out[exps]
        return out

    @staticmethod
    def key(res):
        return frozenset(res.items())

    @staticmethod
    def support(res):
        return sorted(res)

    @staticmethod
    def monomial_of(elem):
        return elem[1] if elem[0] != 0 else None


class _Generic:
    """Plain value arithmetic; used when some value is not a monomial."""

    monomial = False

    def __init__(self, vals):
        self.units = list(vals)

    def combine(self, num, den):
        acc = None
        try:
            for t, (n, d) in enumerate(zip(num, den)):
                for _ in range(n):
                    acc = self.units[t] if acc is None else V.mul(acc, self.units[t])
            for t, d in enumerate(den):
                for _ in range(d):
                    acc = V.div(acc, self.units[t])
        except ZeroDivisionError:
            return None
        return acc

    @staticmethod
    def residual(target):
        return target

    @staticmethod
    def is_zero(res) -> bool:
        return V.is_zero(res)

    @staticmethod
    def subtract(res, sign, elem):
        return V.sub(res, elem) if sign == "+" else V.add(res, elem)

    @staticmethod
    def key(res):
        return res


@dataclass
class SearchStats:
    nodes: int = 0
    memo_entries: int = 0
    millis: float = 0.0


class NPSearch:
    """Exact decider for one no-parenthesis instance."""

    def __init__(self, inst: Instance):
        if not inst.values:
            raise EmptyInstance("instance has no values")
        self.inst = inst
        ops = inst.ops
        self.has_plus, self.has_minus = "+" in ops, "-" in ops
        self.has_mul, self.has_div = "*" in ops, "/" in ops
        # distinct values with their positions, in order of first appearance
        types: Dict[V.Value, List[int]] = {}
        for i, v in enumerate(inst.values):
            types.setdefault(v, []).append(i)
        self.type_values = list(types)
        self.type_indices = [types[v] for v in self.type_values]
        self.full_counts = tuple(len(ix) for ix in self.type_indices)
        self.algebra = self._pick_algebra()
        self.stats = SearchStats()
        self._memo = set()
        self._config_cache = {}

    def _pick_algebra(self):
        forms = [V.monomial_form(v) for v in self.type_values]
        tgt = self.inst.target
        target_ok = not isinstance(tgt, V.RationalFunction) or tgt.den.is_monomial()
        if all(f is not None for f in forms) and target_ok:
            names = set()
            for _, ex in forms:
                names |= set(ex)
            names |= V.variables_of(tgt)
            alg = _Laurent(forms, sorted(names))
            return alg
        return _Generic(self.type_values)

    # ----- block configurations

    def _type_choices(self, c: int):
        """(numerator count, denominator count) options for one value type."""
        if self.has_mul and self.has_div:
            return [(n, d) for n in range(c + 1) for d in range(c + 1 - n)]
        if self.has_mul:
            return [(n, 0) for n in range(c + 1)]
        if self.has_div:
            return [(n, d) for n in range(min(c, 1) + 1) for d in range(c + 1 - n)]
        return [(n, 0) for n in range(min(c, 1) + 1)]

    def _configs(self, counts):
        cached = self._config_cache.get(counts)
        if cached is not None:
            return cached
        out = []
        for choice in itertools.product(*(self._type_choices(c) for c in counts)):
            num = tuple(n for n, _ in choice)
            den = tuple(d for _, d in choice)
            total_n = sum(num)
            if total_n == 0:
                continue
            if not self.has_mul and total_n != 1:
                continue
            if not (self.has_mul or self.has_div) and sum(den):
                continue
            elem = self.algebra.combine(num, den)
            if elem is None:
                continue
            used = tuple(n + d for n, d in choice)
            out.append((used, num, den, elem))
        by_mono = {}
        if self.algebra.monomial:
            for cfg in out:
                m = self.algebra.monomial_of(cfg[3])
                if m is not None:
                    by_mono.setdefault(m, []).append(cfg)
        cached = (out, by_mono)
        self._config_cache[counts] = cached
        return cached

    def _candidates(self, counts, residual):
        configs, by_mono = self._configs(counts)
        if not (self.has_plus or self.has_minus):
            return [c for c in configs if c[0] == counts]
        first = next(t for t, c in enumerate(counts) if c)
        best = [c for c in configs if c[0][first]]
        if self.algebra.monomial and not self.algebra.is_zero(residual):
            for m in self.algebra.support(residual):
                cands = by_mono.get(m, [])
                if len(cands) < len(best):
                    best = cands
                    if not best:
                        break
        return best

    def _signs(self, plus_used):
        if self.has_plus and self.has_minus:
            return "+-"
        if self.has_plus:
            return "+"
        if self.has_minus:
            return "-" if plus_used else "+-"
        return "" if plus_used else "+"

    def _search(self, counts, residual, plus_used):
        self.stats.nodes += 1
        if not any(counts):
            if self.algebra.is_zero(residual) and plus_used:
                return []
            return None
        key = (counts, self.algebra.key(residual), plus_used)
        if key in self._memo:
            return None
        for cfg in self._candidates(counts, residual):
            used = cfg[0]
            rest = tuple(c - u for c, u in zip(counts, used))
            for sign in self._signs(plus_used):
                res = self.algebra.subtract(residual, sign, cfg[3])
                found = self._search(rest, res, plus_used or sign == "+")
                if found is not None:
                    return [(sign, cfg)] + found
        self._memo.add(key)
        self.stats.memo_entries = len(self._memo)
        return None

    def solve(self) -> Optional[FlatExpr]:
        start = time.perf_counter()
        residual = self.algebra.residual(self.inst.target)
        found = self._search(self.full_counts, residual, False)
        self.stats.millis = (time.perf_counter() - start) * 1000
        if found is None:
            return None
        witness = self._witness(found)
        if not V.equals(eval_flat(witness, self.inst.values), self.inst.target):
            raise AssertionError("internal error: witness does not reach the target")
        return witness

    def _witness(self, found) -> FlatExpr:
        pools = [list(ix) for ix in self.type_indices]
        groups = []
        for sign, (used, num, den, _) in found:
            n_idx, d_idx = [], []
            for t, (n, d) in enumerate(zip(num, den)):
                n_idx += pools[t][:n]
                d_idx += pools[t][n : n + d]
                del pools[t][: n + d]
            n_idx.sort()
            d_idx.sort()
            tail = tuple(("*", i) for i in n_idx[1:]) + tuple(("/", i) for i in d_idx)
            groups.append((sign, Group(n_idx[0], tail)))
        first_plus = next(k for k, (s, _) in enumerate(groups) if s == "+")
        groups.insert(0, groups.pop(first_plus))
        return FlatExpr(tuple(groups))


def solve_np(inst: Instance, stats: Optional[SearchStats] = None) -> Optional[FlatExpr]:
    """Exact decision for the no-parenthesis variant; returns a witness or None."""
    search = NPSearch(inst)
    result = search.solve()
    if stats is not None:
        stats.nodes, stats.memo_entries, stats.millis = (
            search.stats.nodes,
            search.stats.memo_entries,
            search.stats.millis,
        )
    return result
