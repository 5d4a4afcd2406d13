"""Term trees for the smooth-function calculus.

A term is a finite tree over variables, exact rational constants, ring
operations, the smooth primitives exp/sin/cos/atan/tanh, natural powers,
compactly supported bump factors, and two *guarded* primitives:

* ``PSqrt(t)`` — square root, meaningful only where t > 0;
* ``PInv(t)``  — reciprocal, meaningful only where t > 0.

Every guarded node carries an obligation id into an append-only registry
recording the strict-positivity guard on its argument, the guard's scope
(global / on a region / conditional on a hypothesis), and its status
(pending, assumed, or discharged).  Obligation ids never participate in
structural equality, hashing, or printing: two terms that differ only in
their registry bookkeeping are the same term.

Bump factors are one-variable: ``Bump(v, a, b, k)`` denotes
``h(v)**(-k) * exp(-1/h(v))`` on the open interval (a, b) and 0 outside,
where ``h(v) = ((b-a)/2)**2 - (v - (a+b)/2)**2``.  The order parameter k
exists so that differentiation stays inside the node set:
``d/dv Bump_k = h' * (Bump_{k+2} - k*Bump_{k+1})``.  A bump over a box in
several variables is a product of these factors.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union


class Term:
    """Base class; all concrete nodes are frozen dataclasses."""

    __slots__ = ()

    def __add__(self, other):
        return Add((self, _coerce(other)))

    def __radd__(self, other):
        return Add((_coerce(other), self))

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul((self, _coerce(other)))

    def __rmul__(self, other):
        return Mul((_coerce(other), self))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise TypeError("only natural-number powers")
        return PowNat(self, n)


def _coerce(x) -> Term:
    if isinstance(x, Term):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    raise TypeError(f"cannot use {x!r} as a term")


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Add(Term):
    terms: tuple


@dataclass(frozen=True)
class Sub(Term):
    a: Term
    b: Term


@dataclass(frozen=True)
class Mul(Term):
    terms: tuple


@dataclass(frozen=True)
class Neg(Term):
    arg: Term


@dataclass(frozen=True)
class PowNat(Term):
    base: Term
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("PowNat exponent must be a natural number")


@dataclass(frozen=True)
class Exp(Term):
    arg: Term


@dataclass(frozen=True)
class Sin(Term):
    arg: Term


@dataclass(frozen=True)
class Cos(Term):
    arg: Term


@dataclass(frozen=True)
class Atan(Term):
    arg: Term


@dataclass(frozen=True)
class Tanh(Term):
    arg: Term


@dataclass(frozen=True)
class PSqrt(Term):
    arg: Term
    oid: int = field(compare=False, default=-1)


@dataclass(frozen=True)
class PInv(Term):
    arg: Term
    oid: int = field(compare=False, default=-1)


@dataclass(frozen=True)
class Bump(Term):
    var: str
    lo: Fraction
    hi: Fraction
    order: int = 0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("bump needs an open interval lo < hi")
        if self.order < 0:
            raise ValueError("bump order must be a natural number")

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius_sq(self) -> Fraction:
        return ((self.hi - self.lo) / 2) ** 2


# ---------------------------------------------------------------------------
# obligations


PENDING = "pending"
ASSUMED = "assumed"
DISCHARGED = "discharged"

GLOBAL = "global"
ON_REGION = "on-region"
CONDITIONAL = "conditional"

_TRANSITIONS = {
    (PENDING, ASSUMED),
    (PENDING, DISCHARGED),
    (ASSUMED, DISCHARGED),
}


@dataclass
class Obligation:
    oid: int
    subject: Term
    scope: str = GLOBAL
    scope_detail: Optional[str] = None
    status: str = PENDING
    reason: Optional[str] = None

    def content(self) -> dict:
        d = {
            "predicate": "arg-strictly-positive",
            "scope": self.scope,
            "status": self.status,
        }
        if self.scope_detail is not None:
            d["scope-detail"] = self.scope_detail
        if self.reason is not None:
            d["reason"] = self.reason
        return d


class ObligationRegistry:
    """Append-only store of positivity obligations with atomic transitions."""

    def __init__(self):
        self._items: list[Obligation] = []
        self._lock = threading.Lock()

    def new(self, subject: Term, scope: str = GLOBAL,
            scope_detail: Optional[str] = None, status: str = PENDING,
            reason: Optional[str] = None) -> int:
        with self._lock:
            oid = len(self._items)
            self._items.append(
                Obligation(oid, subject, scope, scope_detail, status, reason))
            return oid

    def get(self, oid: int) -> Obligation:
        return self._items[oid]

    def status(self, oid: int) -> str:
        return self._items[oid].status

    def set_status(self, oid: int, status: str, reason: Optional[str] = None):
        with self._lock:
            ob = self._items[oid]
            if ob.status == status:
                if reason is not None and ob.reason is None:
                    ob.reason = reason
                return
            if (ob.status, status) not in _TRANSITIONS:
                raise ValueError(
                    f"illegal obligation transition {ob.status} -> {status}")
            ob.status = status
            if reason is not None:
                ob.reason = reason

    def discharge(self, oid: int, reason: str):
        self.set_status(oid, DISCHARGED, reason)

    def assume(self, oid: int, reason: Optional[str] = None):
        self.set_status(oid, ASSUMED, reason)

    def __len__(self):
        return len(self._items)


#: default registry used by the convenience constructors below
REGISTRY = ObligationRegistry()


# ---------------------------------------------------------------------------
# constructors

def var(name: str) -> Var:
    return Var(name)


def const(q: Union[int, Fraction]) -> Const:
    return Const(Fraction(q))


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def add(*ts: Term) -> Term:
    ts = tuple(_coerce(t) for t in ts)
    if not ts:
        return ZERO
    if len(ts) == 1:
        return ts[0]
    return Add(ts)


def sub(a, b) -> Term:
    return Sub(_coerce(a), _coerce(b))


def mul(*ts: Term) -> Term:
    ts = tuple(_coerce(t) for t in ts)
    if not ts:
        return ONE
    if len(ts) == 1:
        return ts[0]
    return Mul(ts)


def neg(t) -> Term:
    return Neg(_coerce(t))


def pow_nat(t, n: int) -> Term:
    return PowNat(_coerce(t), n)


def exp(t) -> Term:
    return Exp(_coerce(t))


def sin(t) -> Term:
    return Sin(_coerce(t))


def cos(t) -> Term:
    return Cos(_coerce(t))


def atan(t) -> Term:
    return Atan(_coerce(t))


def tanh(t) -> Term:
    return Tanh(_coerce(t))


def bump(v: str, lo, hi, order: int = 0) -> Bump:
    return Bump(v, Fraction(lo), Fraction(hi), order)


def box_bump(box: Mapping[str, tuple]) -> Term:
    """Bump factor for a rational open box: the product of 1-D bumps."""
    factors = tuple(bump(v, lo, hi) for v, (lo, hi) in sorted(box.items()))
    return mul(*factors)


def psqrt(t, *, registry: ObligationRegistry = REGISTRY, scope: str = GLOBAL,
          scope_detail: Optional[str] = None, assume: bool = False) -> PSqrt:
    """Guarded square root; registers (and tries to discharge) its guard."""
    t = _coerce(t)
    oid = _register_guard(t, registry, scope, scope_detail, assume)
    return PSqrt(t, oid)


def pinv(t, *, registry: ObligationRegistry = REGISTRY, scope: str = GLOBAL,
         scope_detail: Optional[str] = None, assume: bool = False) -> PInv:
    """Guarded reciprocal; registers (and tries to discharge) its guard."""
    t = _coerce(t)
    oid = _register_guard(t, registry, scope, scope_detail, assume)
    return PInv(t, oid)


def _register_guard(t, registry, scope, scope_detail, assume):
    oid = registry.new(t, scope, scope_detail,
                       status=ASSUMED if assume else PENDING,
                       reason="assumed at construction" if assume else None)
    from .positivity import structurally_positive  # deferred: avoids a cycle
    why = structurally_positive(t, registry=registry)
    if why is not None:
        registry.discharge(oid, why)
    return oid


# ---------------------------------------------------------------------------
# traversal and substitution

def walk(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from walk(c)


def children(t: Term) -> tuple:
    if isinstance(t, (Add, Mul)):
        return t.terms
    if isinstance(t, Sub):
        return (t.a, t.b)
    if isinstance(t, (Neg, Exp, Sin, Cos, Atan, Tanh, PSqrt, PInv)):
        return (t.arg,)
    if isinstance(t, PowNat):
        return (t.base,)
    return ()


def support(t: Term) -> frozenset:
    """The finite set of variable names the term actually mentions."""
    names = set()
    for s in walk(t):
        if isinstance(s, Var):
            names.add(s.name)
        elif isinstance(s, Bump):
            names.add(s.var)
    return frozenset(names)


def node_count(t: Term) -> int:
    return sum(1 for _ in walk(t))


def guarded_nodes(t: Term) -> list:
    return [s for s in walk(t) if isinstance(s, (PSqrt, PInv))]


def substitute(t: Term, env: Mapping[str, object]) -> Term:
    """Structurally substitute variables by terms or exact rationals.

    A bump whose variable is substituted by a rational collapses to its
    closed-form value: 0 outside the interval, and
    ``(1/h)**k * exp(-1/h)`` (with h the exact rational gap value) inside.
    """
    env = {k: _coerce(v) if not isinstance(v, Term) else v
           for k, v in env.items()}
    return _subst(t, env)


def _subst(t: Term, env) -> Term:
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, Bump):
        r = env.get(t.var)
        if r is None:
            return t
        if not isinstance(r, Const):
            raise ValueError("bump variables can only be pinned to rationals")
        c = r.value
        if not (t.lo < c < t.hi):
            return ZERO
        h = t.radius_sq - (c - t.mid) ** 2
        factor = Const(Fraction(1, 1) / h ** t.order) if t.order else ONE
        body = Exp(Const(-1 / h))
        return body if t.order == 0 else Mul((factor, body))
    if isinstance(t, Add):
        return Add(tuple(_subst(c, env) for c in t.terms))
    if isinstance(t, Mul):
        return Mul(tuple(_subst(c, env) for c in t.terms))
    if isinstance(t, Sub):
        return Sub(_subst(t.a, env), _subst(t.b, env))
    if isinstance(t, Neg):
        return Neg(_subst(t.arg, env))
    if isinstance(t, PowNat):
        return PowNat(_subst(t.base, env), t.exponent)
    if isinstance(t, Exp):
        return Exp(_subst(t.arg, env))
    if isinstance(t, Sin):
        return Sin(_subst(t.arg, env))
    if isinstance(t, Cos):
        return Cos(_subst(t.arg, env))
    if isinstance(t, Atan):
        return Atan(_subst(t.arg, env))
    if isinstance(t, Tanh):
        return Tanh(_subst(t.arg, env))
    if isinstance(t, PSqrt):
        return PSqrt(_subst(t.arg, env), t.oid)
    if isinstance(t, PInv):
        return PInv(_subst(t.arg, env), t.oid)
    raise TypeError(f"unknown node {t!r}")


# ---------------------------------------------------------------------------
# deterministic structural order

_RANK = {
    Const: 0, Var: 1, PowNat: 2, Mul: 3, Add: 4, Neg: 5, Sub: 6,
    Exp: 7, Sin: 8, Cos: 9, Atan: 10, Tanh: 11, PSqrt: 12, PInv: 13,
    Bump: 14,
}


def sort_key(t: Term):
    """A total, deterministic order on terms (obligation ids ignored)."""
    k = _RANK[type(t)]
    if isinstance(t, Const):
        return (k, t.value.numerator, t.value.denominator)
    if isinstance(t, Var):
        return (k, t.name)
    if isinstance(t, PowNat):
        return (k, sort_key(t.base), t.exponent)
    if isinstance(t, (Add, Mul)):
        return (k, len(t.terms), tuple(sort_key(c) for c in t.terms))
    if isinstance(t, Sub):
        return (k, sort_key(t.a), sort_key(t.b))
    if isinstance(t, Bump):
        return (k, t.var, t.lo.numerator, t.lo.denominator,
                t.hi.numerator, t.hi.denominator, t.order)
    return (k, sort_key(t.arg))
