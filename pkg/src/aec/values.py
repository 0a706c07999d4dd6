"""Exact values: big rationals and sparse multivariate rational functions.

A *value* is either a :class:`fractions.Fraction` (the rational domain) or a
:class:`RationalFunction` (the polynomial domain). The two never mix; the
module-level helpers :func:`add`, :func:`sub`, :func:`mul`, :func:`div` and
:func:`equals` enforce that and raise :class:`MixedDomainError` otherwise.

Rational functions are kept in a cheap normal form: integer coefficients with
no common content, no common monomial factor, and a positive leading
coefficient in the denominator. No multivariate GCD is attempted, so two equal
functions may be stored differently; equality is decided by
cross-multiplication and hashing goes through a numeric fingerprint taken at
fixed pseudorandom points modulo a Mersenne prime.

Monomials are tuples of ``(variable, exponent)`` pairs sorted by variable
name, e.g. ``x^2*y`` is ``(("x", 2), ("y", 1))`` and the constant monomial is
``()``.
"""

from __future__ import annotations

import hashlib
import math
import re
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .errors import (
    DivisionByZero,
    MissingVariable,
    MixedDomainError,
    ParseError,
    VanishingDenominator,
)

Monomial = Tuple[Tuple[str, int], ...]
ONE: Monomial = ()

# 2^61 - 1
FINGERPRINT_PRIME = (1 << 61) - 1
_POINT_SALTS = (b"aec-points-0", b"aec-points-1", b"aec-points-2")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for var, e in b:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(exps.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_div(a: Monomial, b: Monomial) -> Monomial:
    # caller guarantees b divides a
    exps = dict(a)
    for var, e in b:
        left = exps[var] - e
        if left:
            exps[var] = left
        else:
            del exps[var]
    return tuple(sorted(exps.items()))


def _order_key(m: Monomial):
    return (mono_degree(m), tuple((v, -e) for v, e in m))


class Polynomial:
    """Sparse multivariate polynomial with rational coefficients.

    ``terms`` maps monomials to nonzero :class:`Fraction` coefficients; the
    zero polynomial has no terms. Instances are immutable by convention.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Fraction]] = None):
        self.terms: Dict[Monomial, Fraction] = {
            m: Fraction(c) for m, c in (terms or {}).items() if c
        }
        self._hash: Optional[int] = None

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({ONE: Fraction(c)})

    @classmethod
    def variable(cls, name: str, exp: int = 1) -> "Polynomial":
        return cls({((name, exp),) if exp else ONE: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def leading(self) -> Tuple[Monomial, Fraction]:
        m = max(self.terms, key=_order_key)
        return m, self.terms[m]

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return _poly_raw(out)

    def __neg__(self) -> "Polynomial":
        return _poly_raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return _poly_raw(out)

    def scale(self, c) -> "Polynomial":
        if not c:
            return _poly_raw({})
        return _poly_raw({m: v * c for m, v in self.terms.items()})

    def mono_scale(self, mono: Monomial) -> "Polynomial":
        return _poly_raw({mono_mul(m, mono): c for m, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def eval_at(self, point: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for var, e in m:
                try:
                    term *= Fraction(point[var]) ** e
                except KeyError:
                    raise MissingVariable(var) from None
            total += term
        return total

    def eval_mod(self, point: Mapping[str, int], p: int) -> Optional[int]:
        """Value modulo ``p``; ``None`` if a coefficient denominator vanishes."""
        total = 0
        for m, c in self.terms.items():
            den = c.denominator % p
            if den == 0:
                return None
            term = c.numerator % p * pow(den, -1, p)
            for var, e in m:
                term = term * pow(point[var], e, p) % p
            total = (total + term) % p
        return total

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"


def _poly_raw(terms: Dict[Monomial, Fraction]) -> Polynomial:
    # terms already free of zero coefficients
    p = Polynomial.__new__(Polynomial)
    p.terms = terms
    p._hash = None
    return p


_ZERO_POLY = _poly_raw({})
_ONE_POLY = _poly_raw({ONE: Fraction(1)})


def _fingerprint_points(names: Iterable[str], salt: bytes) -> Dict[str, int]:
    pts = {}
    for name in names:
        digest = hashlib.blake2b(name.encode(), key=salt, digest_size=16).digest()
        pts[name] = int.from_bytes(digest, "big") % FINGERPRINT_PRIME
    return pts


class RationalFunction:
    """Quotient ``num / den`` of polynomials in reduced-but-not-canonical form."""

    __slots__ = ("num", "den", "_fp")

    def __init__(self, num: Polynomial, den: Polynomial = _ONE_POLY):
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        self.num, self.den = _normalize(num, den)
        self._fp: Optional[int] = None

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(Polynomial.constant(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_monomial(self) -> bool:
        return self.num.is_monomial() and self.den.is_monomial()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def _check(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (Fraction, int)):
            raise MixedDomainError("cannot combine a rational function with a rational")
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return _rf_raw(-self.num, self.den)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZero("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other / self

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            if isinstance(other, (Fraction, int)):
                raise MixedDomainError("cannot compare a rational function with a rational")
            return NotImplemented
        if self.num == other.num and self.den == other.den:
            return True
        if self.fingerprint() != other.fingerprint():
            return False
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        return self.fingerprint()

    def fingerprint(self) -> int:
        if self._fp is None:
            self._fp = _rf_fingerprint(self.num, self.den)
        return self._fp

    def eval_at(self, point: Mapping[str, Fraction]) -> Fraction:
        d = self.den.eval_at(point)
        if d == 0:
            raise VanishingDenominator("denominator vanishes at the given point")
        return self.num.eval_at(point) / d

    def __repr__(self) -> str:
        return f"RationalFunction({format_value(self)!r})"

    def __str__(self) -> str:
        return format_value(self)


def _rf_raw(num: Polynomial, den: Polynomial) -> RationalFunction:
    r = RationalFunction.__new__(RationalFunction)
    r.num, r.den, r._fp = num, den, None
    return r


def _normalize(num: Polynomial, den: Polynomial) -> Tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return _ZERO_POLY, _ONE_POLY
    coefs = list(num.terms.values()) + list(den.terms.values())
    lcm = reduce(lambda a, c: a * c.denominator // math.gcd(a, c.denominator), coefs, 1)
    ints = [c.numerator * (lcm // c.denominator) for c in coefs]
    g = reduce(math.gcd, ints)
    factor = Fraction(lcm, g)
    # common monomial factor
    common: Optional[Dict[str, int]] = None
    for m in list(num.terms) + list(den.terms):
        d = dict(m)
        if common is None:
            common = d
        else:
            common = {v: min(e, d[v]) for v, e in common.items() if v in d}
        if not common:
            break
    cm: Monomial = tuple(sorted(common.items())) if common else ONE
    _, lead = den.leading()
    if lead < 0:
        factor = -factor
    if factor == 1 and not cm:
        return num, den

    def fix(p: Polynomial) -> Polynomial:
        return _poly_raw(
            {(_mono_div(m, cm) if cm else m): c * factor for m, c in p.terms.items()}
        )

    return fix(num), fix(den)


def _rf_fingerprint(num: Polynomial, den: Polynomial) -> int:
    names = sorted(num.variables() | den.variables())
    for salt in _POINT_SALTS:
        pts = _fingerprint_points(names, salt)
        d = den.eval_mod(pts, FINGERPRINT_PRIME)
        if not d:
            continue
        n = num.eval_mod(pts, FINGERPRINT_PRIME)
        if n is None:
            continue
        return n * pow(d, -1, FINGERPRINT_PRIME) % FINGERPRINT_PRIME
    # every point set hit a pole; fall back to a structural hash
    return hash((num, den)) % FINGERPRINT_PRIME


Value = Union[Fraction, RationalFunction]


# --------------------------------------------------------------------------
# domain-checked helpers


def _same_domain(a: Value, b: Value) -> None:
    if isinstance(a, RationalFunction) != isinstance(b, RationalFunction):
        raise MixedDomainError(f"mixed domains: {a!r} and {b!r}")


def add(a: Value, b: Value) -> Value:
    _same_domain(a, b)
    return a + b


def sub(a: Value, b: Value) -> Value:
    _same_domain(a, b)
    return a - b


def mul(a: Value, b: Value) -> Value:
    _same_domain(a, b)
    return a * b


def div(a: Value, b: Value) -> Value:
    _same_domain(a, b)
    if is_zero(b):
        raise DivisionByZero(f"division of {format_value(a)} by zero")
    return a / b


def equals(a: Value, b: Value) -> bool:
    _same_domain(a, b)
    return a == b


def is_zero(a: Value) -> bool:
    if isinstance(a, RationalFunction):
        return a.is_zero()
    return a == 0


def domain_of(a: Value) -> str:
    return "fun" if isinstance(a, RationalFunction) else "rat"


def as_function(a) -> RationalFunction:
    """Lift a rational (or int) to a constant rational function."""
    if isinstance(a, RationalFunction):
        return a
    return RationalFunction.constant(a)


def fingerprint(a: Value) -> int:
    """64-bit fingerprint; equal values always share it, collisions are possible."""
    if isinstance(a, RationalFunction):
        return a.fingerprint()
    a = Fraction(a)
    d = a.denominator % FINGERPRINT_PRIME
    if d:
        return a.numerator * pow(d, -1, FINGERPRINT_PRIME) % FINGERPRINT_PRIME
    return hash((a.numerator, a.denominator)) % FINGERPRINT_PRIME


def int_sqrt(n: int) -> Optional[int]:
    """Exact integer square root, or ``None`` when ``n`` is not a perfect square."""
    if n < 0:
        raise ValueError("int_sqrt of a negative number")
    r = math.isqrt(n)
    return r if r * r == n else None


def eval_at(a: Value, assignment: Mapping[str, Fraction]) -> Fraction:
    if isinstance(a, RationalFunction):
        return a.eval_at(assignment)
    return Fraction(a)


def variables_of(a: Value) -> set:
    return a.variables() if isinstance(a, RationalFunction) else set()


def monomial_form(a: Value) -> Optional[Tuple[Fraction, Dict[str, int]]]:
    """``(c, {var: exp})`` with ``a == c * prod(var**exp)``; ``None`` if not a monomial.

    Exponents may be negative. Rationals are monomials with no variables.
    """
    if not isinstance(a, RationalFunction):
        return Fraction(a), {}
    if a.is_zero():
        return Fraction(0), {}
    if not a.is_monomial():
        return None
    (mn, cn), = a.num.terms.items()
    (md, cd), = a.den.terms.items()
    exps = dict(mn)
    for var, e in md:
        exps[var] = exps.get(var, 0) - e
    return cn / cd, {v: e for v, e in exps.items() if e}


# --------------------------------------------------------------------------
# literal grammar

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.lastindex is None:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            out.append(("var", m.group(2), start))
        else:
            out.append(("sym", m.group(3), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def parse_polynomial(text: str) -> Polynomial:
    """Parse a polynomial literal such as ``"2*x^3*y"``, ``"x^3-x"`` or ``"7/2*x"``.

    Coefficients are integers, optionally written as ``p/q`` at the start of
    a term; factors are integers or ``var`` / ``var^exp``.
    """
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i]

    def take(kind, value=None):
        nonlocal i
        t = toks[i]
        if t[0] != kind or (value is not None and t[1] != value):
            raise ParseError(f"expected {value or kind}", t[2])
        i += 1
        return t

    def factor():
        nonlocal i
        t = peek()
        if t[0] == "int":
            i += 1
            return Polynomial.constant(t[1])
        if t[0] == "var":
            i += 1
            exp = 1
            if peek()[:2] == ("sym", "^"):
                i += 1
                exp = take("int")[1]
            return Polynomial.variable(t[1], exp)
        raise ParseError("expected a number or variable", t[2])

    def term():
        nonlocal i
        t = peek()
        if t[0] == "int":
            i += 1
            c = Fraction(t[1])
            if peek()[:2] == ("sym", "/"):
                i += 1
                q = take("int")
                if q[1] == 0:
                    raise ParseError("zero denominator in coefficient", q[2])
                c /= q[1]
            p = Polynomial.constant(c)
        else:
            p = factor()
        while peek()[:2] == ("sym", "*"):
            i += 1
            p = p * factor()
        return p

    sign = 1
    if peek()[:2] == ("sym", "-"):
        i += 1
        sign = -1
    elif peek()[:2] == ("sym", "+"):
        i += 1
    total = term().scale(sign)
    while peek()[0] == "sym" and peek()[1] in "+-":
        op = peek()[1]
        i += 1
        t = term()
        total = total + t if op == "+" else total - t
    if peek()[0] != "end":
        raise ParseError(f"unexpected {peek()[1]!r}", peek()[2])
    return total


_QUOTIENT = re.compile(r"\s*\(([^()]*)\)\s*/\s*\(([^()]*)\)\s*$")


def parse_value(text: str) -> Value:
    """Parse a value literal; variable-free literals give a :class:`Fraction`.

    Besides polynomials, the quotient form ``(num)/(den)`` printed by
    :func:`format_value` is accepted.
    """
    m = _QUOTIENT.match(text)
    if m:
        num = parse_polynomial(m.group(1))
        try:
            den = parse_polynomial(m.group(2))
        except ParseError as exc:
            raise ParseError("bad denominator", m.start(2) + exc.position) from None
        if den.is_zero():
            raise DivisionByZero("literal has a zero denominator")
        rf = RationalFunction(num, den)
        if rf.variables():
            return rf
        return rf.num.terms.get(ONE, Fraction(0)) / rf.den.terms[ONE]
    p = parse_polynomial(text)
    if p.variables():
        return RationalFunction(p)
    return p.terms.get(ONE, Fraction(0))


def _format_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m in sorted(p.terms, key=_order_key, reverse=True):
        c = p.terms[m]
        neg = c < 0
        c = abs(c)
        if not m:
            body = _format_coef(c)
        elif c == 1:
            body = format_monomial(m)
        else:
            body = f"{_format_coef(c)}*{format_monomial(m)}"
        if parts:
            parts.append(("-" if neg else "+") + body)
        else:
            parts.append(("-" if neg else "") + body)
    return "".join(parts)


def format_value(a: Value) -> str:
    """Render a value; polynomials use the literal grammar, quotients ``(n)/(d)``."""
    if not isinstance(a, RationalFunction):
        return _format_coef(Fraction(a))
    if a.den.is_constant():
        return format_polynomial(a.num.scale(1 / a.den.terms[ONE]))
    return f"({format_polynomial(a.num)})/({format_polynomial(a.den)})"
