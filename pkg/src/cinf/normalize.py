"""Light, idempotent canonicalization of terms.

The canonical form is a flattened sum of distinct monomials with rational
coefficients; each monomial is a sorted product of (base, natural exponent)
factors.  Bases are canonical terms themselves: variables, bump factors,
transcendental nodes with canonical arguments, guarded nodes, or *unexpanded*
sums (products are never distributed over sums here — full expansion is the
job of the certificate-residual skeleton in :mod:`cinf.skeleton`).

Folding rules, all value-preserving on the domain of definition:

* rational constant arithmetic, including ``c**n`` and ``pinv(c) = 1/c``
  for positive rational c, and exact rational square roots;
* ``exp(0)=1``, ``cos(0)=1``, ``sin(0)=atan(0)=tanh(0)=0``;
* ``t * pinv(t) -> 1`` (where both are defined, t > 0);
* ``psqrt(t)**2 -> t`` and ``pinv(pinv(t)) -> t``;
* powers of powers and powers of products collapse.

Obligation ids ride along unchanged on the guarded nodes they belong to.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .terms import (
    Add, Atan, Bump, Const, Cos, Exp, Mul, Neg, PInv, PowNat, PSqrt, Sin,
    Sub, Tanh, Term, Var, ZERO, sort_key,
)

_ONE = Fraction(1)


@lru_cache(maxsize=None)
def normalize(t: Term) -> Term:
    return _rebuild(_entries(t))


def is_zero_term(t: Term) -> bool:
    return normalize(t) == ZERO


def _mono_key(mono):
    return tuple((sort_key(b), e) for b, e in mono)


def _freeze(d: dict) -> tuple:
    return tuple(sorted(d.items(), key=lambda be: sort_key(be[0])))


def _merge(target: dict, source: dict, sign: int = 1):
    for mono, c in source.items():
        c = target.get(mono, 0) + sign * c
        if c == 0:
            target.pop(mono, None)
        else:
            target[mono] = c
    return target


def _entries(t: Term) -> dict:
    """t as {monomial: coefficient}; monomials are frozen factor tuples."""
    if isinstance(t, Const):
        return {} if t.value == 0 else {(): t.value}
    if isinstance(t, (Var, Bump)):
        return {((t, 1),): _ONE}
    if isinstance(t, Add):
        out: dict = {}
        for c in t.terms:
            _merge(out, _entries(c))
        return out
    if isinstance(t, Sub):
        return _merge(dict(_entries(t.a)), _entries(t.b), -1)
    if isinstance(t, Neg):
        return {m: -c for m, c in _entries(t.arg).items()}
    if isinstance(t, Mul):
        coeff, factors = _ONE, {}
        for child in t.terms:
            c, mono = _as_factor(child)
            if c == 0:
                return {}
            coeff *= c
            for b, e in mono.items():
                factors[b] = factors.get(b, 0) + e
        coeff, factors = _reduce_mono(coeff, factors)
        if coeff == 0:
            return {}
        return {_freeze(factors): coeff}
    if isinstance(t, PowNat):
        if t.exponent == 0:
            return {(): _ONE}
        c, mono = _as_factor(t.base)
        if c == 0:
            return {}
        coeff = c ** t.exponent
        factors = {b: e * t.exponent for b, e in mono.items()}
        coeff, factors = _reduce_mono(coeff, factors)
        if coeff == 0:
            return {}
        return {_freeze(factors): coeff}
    if isinstance(t, Exp):
        a = normalize(t.arg)
        if a == ZERO:
            return {(): _ONE}
        return {((Exp(a), 1),): _ONE}
    if isinstance(t, Cos):
        a = normalize(t.arg)
        if a == ZERO:
            return {(): _ONE}
        return {((Cos(a), 1),): _ONE}
    if isinstance(t, (Sin, Atan, Tanh)):
        a = normalize(t.arg)
        if a == ZERO:
            return {}
        return {((type(t)(a), 1),): _ONE}
    if isinstance(t, PSqrt):
        a = normalize(t.arg)
        if isinstance(a, Const) and a.value > 0:
            r = _exact_sqrt(a.value)
            if r is not None:
                return {(): r}
        return {((PSqrt(a, t.oid), 1),): _ONE}
    if isinstance(t, PInv):
        a = normalize(t.arg)
        if isinstance(a, Const) and a.value > 0:
            return {(): 1 / a.value}
        if isinstance(a, PInv):
            return _entries(a.arg)
        return {((PInv(a, t.oid), 1),): _ONE}
    raise TypeError(f"unknown node {t!r}")


def _as_factor(t: Term):
    """t as (coefficient, {base: exponent}) — sums become atomic bases."""
    es = _entries(t)
    if not es:
        return Fraction(0), {}
    if len(es) == 1:
        (mono, c), = es.items()
        return c, dict(mono)
    return _ONE, {_rebuild(es): 1}


def _reduce_mono(coeff: Fraction, factors: dict):
    """Apply psqrt**2 -> arg, t*pinv(t) -> 1 and constant folding, to a
    fixed point."""
    changed = True
    while changed:
        changed = False
        for b in list(factors):
            e = factors.get(b)
            if not e:
                factors.pop(b, None)
                continue
            if isinstance(b, Const):
                coeff *= b.value ** e
                del factors[b]
                changed = True
            elif isinstance(b, PSqrt) and e >= 2:
                k, r = divmod(e, 2)
                if r:
                    factors[b] = r
                else:
                    del factors[b]
                c2, mono2 = _as_factor(b.arg)
                coeff *= c2 ** k
                for b2, e2 in mono2.items():
                    factors[b2] = factors.get(b2, 0) + e2 * k
                changed = True
            elif isinstance(b, PInv):
                e2 = factors.get(b.arg, 0)
                if e2 > 0:
                    k = min(e, e2)
                    for key, old in ((b, e), (b.arg, e2)):
                        if old - k:
                            factors[key] = old - k
                        else:
                            del factors[key]
                    changed = True
        if coeff == 0:
            return coeff, {}
    return coeff, factors


def _exact_sqrt(q: Fraction):
    rn, rd = isqrt(q.numerator), isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def _rebuild(entries: dict) -> Term:
    if not entries:
        return ZERO
    parts = []
    for mono, c in sorted(entries.items(), key=lambda mc: _mono_key(mc[0])):
        parts.append(_mono_term(mono, c))
    if len(parts) == 1:
        return parts[0]
    return Add(tuple(parts))


def _mono_term(mono, c: Fraction) -> Term:
    factors = [b if e == 1 else PowNat(b, e) for b, e in mono]
    if not factors:
        return Const(c)
    if c == -1:
        inner = factors[0] if len(factors) == 1 else Mul(tuple(factors))
        return Neg(inner)
    if c != 1:
        factors = [Const(c)] + factors
    if len(factors) == 1:
        return factors[0]
    return Mul(tuple(factors))
