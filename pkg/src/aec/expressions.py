"""Expression trees, unlabeled tree shapes, instances, printing and parsing.

Operators are the one-character strings ``+ - * /``. An op set is a tuple of
them in the canonical order ``+ - * /``. Trees refer to instance values by
position, so a multiset with repeated values needs no special handling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from . import values as V
from .errors import EmptyInstance, LeafCountMismatch, MixedDomainError, ParseError

OPS_ORDER = "+-*/"
COMMUTATIVE = frozenset("+*")
ALL_OPS = tuple(OPS_ORDER)
_OP_ALIASES = {"×": "*", "÷": "/", "−": "-", "–": "-"}


def opset(spec: Union[str, Iterable[str]]) -> Tuple[str, ...]:
    """Normalize ``"+-"``, ``["×", "÷"]`` etc. to a canonical op tuple."""
    chars = set()
    for item in spec:
        for ch in item:
            if ch in ", ":
                continue
            ch = _OP_ALIASES.get(ch, ch)
            if ch not in OPS_ORDER:
                raise ValueError(f"unknown operator {ch!r}")
            chars.add(ch)
    if not chars:
        raise ValueError("op set must be nonempty")
    return tuple(op for op in OPS_ORDER if op in chars)


def all_opsets() -> List[Tuple[str, ...]]:
    """The 15 nonempty subsets of ``+ - * /`` in a fixed order."""
    out = []
    for mask in range(1, 16):
        out.append(tuple(OPS_ORDER[i] for i in range(4) if mask >> i & 1))
    out.sort(key=lambda s: (len(s), [OPS_ORDER.index(o) for o in s]))
    return out


def apply_op(op: str, a: V.Value, b: V.Value) -> V.Value:
    if op == "+":
        return V.add(a, b)
    if op == "-":
        return V.sub(a, b)
    if op == "*":
        return V.mul(a, b)
    if op == "/":
        return V.div(a, b)
    raise ValueError(f"unknown operator {op!r}")


# --------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Node:
    op: str
    left: "ExprTree"
    right: "ExprTree"


ExprTree = Union[Leaf, Node]


def leaves(t: ExprTree) -> List[int]:
    if isinstance(t, Leaf):
        return [t.index]
    return leaves(t.left) + leaves(t.right)


def eval_tree(t: ExprTree, values: Sequence[V.Value]) -> V.Value:
    if isinstance(t, Leaf):
        return values[t.index]
    return apply_op(t.op, eval_tree(t.left, values), eval_tree(t.right, values))


def format_leaf(v: V.Value) -> str:
    """Leaf text: plain for naturals and ``var``/``var^k``, else in brackets."""
    text = V.format_value(v)
    if text.isdigit():
        return text
    head, _, exp = text.partition("^")
    if head.isidentifier() and (not exp or exp.isdigit()):
        return text
    return f"[{text}]"


def print_full_paren(t: ExprTree, values: Sequence[V.Value]) -> str:
    if isinstance(t, Leaf):
        return format_leaf(values[t.index])
    return f"({print_full_paren(t.left, values)}{t.op}{print_full_paren(t.right, values)})"


def print_no_paren(t: ExprTree, values: Sequence[V.Value]) -> str:
    """Infix text with only the parentheses precedence and associativity need."""

    def go(node, parent_prec, right_side):
        if isinstance(node, Leaf):
            return format_leaf(values[node.index])
        prec = 1 if node.op in "+-" else 2
        text = go(node.left, prec, False) + node.op + go(node.right, prec, True)
        if prec < parent_prec or (right_side and prec == parent_prec):
            return f"({text})"
        return text

    return go(t, 0, False)


# --------------------------------------------------------------------------
# parser


def _scan(text: str):
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            out.append(("int", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(("var", text[i:j], i))
            i = j
        elif ch == "[":
            j = text.find("]", i)
            if j < 0:
                raise ParseError("unterminated '['", i)
            out.append(("lit", text[i + 1 : j], i + 1))
            i = j + 1
        else:
            ch = _OP_ALIASES.get(ch, ch)
            if ch not in "+-*/()^":
                raise ParseError(f"unexpected character {text[i]!r}", i)
            out.append(("sym", ch, i))
            i += 1
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _scan(text)
        self.pos = 0
        self.values: List[V.Value] = []

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, sym):
        tok = self.advance()
        if tok[:2] != ("sym", sym):
            raise ParseError(f"expected {sym!r}", tok[2])

    def leaf(self, value) -> Leaf:
        self.values.append(value)
        return Leaf(len(self.values) - 1)

    def expr(self) -> ExprTree:
        node = self.term()
        while self.peek()[0] == "sym" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = Node(op, node, self.term())
        return node

    def term(self) -> ExprTree:
        node = self.atom()
        while self.peek()[0] == "sym" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = Node(op, node, self.atom())
        return node

    def atom(self) -> ExprTree:
        kind, text, at = self.advance()
        if kind == "int":
            return self.leaf(Fraction(int(text)))
        if kind == "var":
            exp = 1
            if self.peek()[:2] == ("sym", "^"):
                self.advance()
                tok = self.advance()
                if tok[0] != "int":
                    raise ParseError("expected an exponent", tok[2])
                exp = int(tok[1])
            return self.leaf(V.RationalFunction(V.Polynomial.variable(text, exp)))
        if kind == "lit":
            try:
                return self.leaf(V.parse_value(text))
            except ParseError as exc:
                raise ParseError(f"bad literal [{text}]", at + exc.position) from None
        if (kind, text) == ("sym", "("):
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError("expected a value or '('", at)


def parse_expression(text: str) -> Tuple[ExprTree, List[V.Value]]:
    """Parse infix text into a tree plus its leaf values in reading order.

    ``*`` and ``/`` bind tighter than ``+`` and ``-``; all four associate to
    the left. Atoms are natural numbers, ``var`` or ``var^k``, a bracketed
    value literal such as ``[2*x*y]`` or ``[7/2]``, or a parenthesized
    subexpression. If any leaf mentions a variable, every leaf is lifted to
    the rational-function domain.
    """
    p = _Parser(text)
    tree = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    vals = p.values
    if any(isinstance(v, V.RationalFunction) for v in vals):
        vals = [V.as_function(v) for v in vals]
    return tree, vals


# --------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class TreeShape:
    """Unlabeled binary tree shape; ``left``/``right`` are both None for a leaf.

    ``code`` is the AHU-style canonical string (children codes sorted), so two
    shapes are isomorphic as unordered trees iff their codes match;
    ``ordered_code`` keeps child order.
    """

    left: Optional["TreeShape"] = None
    right: Optional["TreeShape"] = None
    leaf_count: int = field(init=False, compare=False)
    code: str = field(init=False, compare=False)
    ordered_code: str = field(init=False, compare=False)

    def __post_init__(self):
        if (self.left is None) != (self.right is None):
            raise ValueError("a shape node needs two children")
        if self.left is None:
            object.__setattr__(self, "leaf_count", 1)
            object.__setattr__(self, "code", "L")
            object.__setattr__(self, "ordered_code", "L")
        else:
            a, b = sorted((self.left.code, self.right.code))
            object.__setattr__(self, "leaf_count", self.left.leaf_count + self.right.leaf_count)
            object.__setattr__(self, "code", f"({a}{b})")
            object.__setattr__(
                self, "ordered_code", f"({self.left.ordered_code}{self.right.ordered_code})"
            )

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def canonical(self) -> "TreeShape":
        """Isomorphic copy with children ordered by code."""
        if self.is_leaf:
            return self
        a, b = self.left.canonical(), self.right.canonical()
        if b.code < a.code:
            a, b = b, a
        return TreeShape(a, b)

    def to_json(self):
        if self.is_leaf:
            return None
        return [self.left.to_json(), self.right.to_json()]

    @classmethod
    def from_json(cls, obj) -> "TreeShape":
        if obj is None:
            return LEAF
        if isinstance(obj, list) and len(obj) == 2:
            return cls(cls.from_json(obj[0]), cls.from_json(obj[1]))
        raise ValueError(f"bad shape encoding: {obj!r}")


LEAF = TreeShape()


def shape_of(t: ExprTree) -> TreeShape:
    if isinstance(t, Leaf):
        return LEAF
    return TreeShape(shape_of(t.left), shape_of(t.right))


def isomorphic(a: TreeShape, b: TreeShape, ordered: bool = False) -> bool:
    if ordered:
        return a.ordered_code == b.ordered_code
    return a.code == b.code


@lru_cache(maxsize=None)
def ordered_shapes(n: int) -> Tuple[TreeShape, ...]:
    """All Catalan(n-1) ordered shapes with ``n`` leaves."""
    if n == 1:
        return (LEAF,)
    out = []
    for k in range(1, n):
        for a in ordered_shapes(k):
            for b in ordered_shapes(n - k):
                out.append(TreeShape(a, b))
    return tuple(out)


@lru_cache(maxsize=None)
def unordered_shapes(n: int) -> Tuple[TreeShape, ...]:
    """One canonical representative per isomorphism class, sorted by code."""
    seen = {}
    for s in ordered_shapes(n):
        seen.setdefault(s.code, s.canonical())
    return tuple(seen[c] for c in sorted(seen))


def left_comb(k: int) -> TreeShape:
    if k < 1:
        raise ValueError("a comb needs at least one leaf")
    s = LEAF
    for _ in range(k - 1):
        s = TreeShape(s, LEAF)
    return s


def two_comb(k1: int, k2: int) -> TreeShape:
    """Root whose children are left combs with ``k1`` and ``k2`` leaves."""
    if k1 < 1 or k2 < 1:
        raise ValueError(f"invalid comb sizes ({k1}, {k2})")
    return TreeShape(left_comb(k1), left_comb(k2))


# --------------------------------------------------------------------------
# instances

VARIANTS = ("std", "ep", "np")


@dataclass(frozen=True)
class Instance:
    values: Tuple[V.Value, ...]
    target: V.Value
    ops: Tuple[str, ...]
    variant: str = "std"
    shape: Optional[TreeShape] = None
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "ops", opset(self.ops))
        if not self.values:
            raise EmptyInstance("instance has no values")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        dom = V.domain_of(self.target)
        if any(V.domain_of(v) != dom for v in self.values):
            raise MixedDomainError("instance mixes rational and polynomial values")
        if self.variant == "ep":
            if self.shape is None:
                raise ValueError("enforced-parenthesis instance needs a shape")
            if self.shape.leaf_count != len(self.values):
                raise LeafCountMismatch(
                    f"shape has {self.shape.leaf_count} leaves, instance has {len(self.values)} values"
                )

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def domain(self) -> str:
        return V.domain_of(self.target)


def make_instance(values, target, ops, variant="std", shape=None, provenance="") -> Instance:
    """Build an instance from literals or values, lifting to one domain."""
    vals = [V.parse_value(v) if isinstance(v, str) else _as_value(v) for v in values]
    tgt = V.parse_value(target) if isinstance(target, str) else _as_value(target)
    if any(isinstance(v, V.RationalFunction) for v in vals + [tgt]):
        vals = [V.as_function(v) for v in vals]
        tgt = V.as_function(tgt)
    return Instance(tuple(vals), tgt, opset(ops), variant, shape, provenance)


def _as_value(v) -> V.Value:
    if isinstance(v, V.RationalFunction):
        return v
    return Fraction(v)


def check_tree_witness(t: ExprTree, n: int) -> bool:
    return sorted(leaves(t)) == list(range(n))


def iter_nodes(t: ExprTree) -> Iterator[Node]:
    if isinstance(t, Node):
        yield t
        yield from iter_nodes(t.left)
        yield from iter_nodes(t.right)
