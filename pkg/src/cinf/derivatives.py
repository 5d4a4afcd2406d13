"""Symbolic differentiation, total on the whole node set.

Derivatives of guarded nodes stay guarded by the *same* obligation:
``d/dv psqrt(s) = s' * 1/2 * pinv(psqrt(s))`` reuses the parent id (the
reciprocal is legitimate exactly where the root's guard holds), and
``d/dv pinv(s) = -s' * pinv(s)**2`` squares the original node.  The
derivative of atan introduces ``pinv(1 + s**2)``, whose guard is
discharged structurally at construction.

Bump factors differentiate inside the family:
``d/dv Bump_k = h' * (Bump_{k+2} - k * Bump_{k+1})`` with ``h' = -2(v-mid)``.
"""

from __future__ import annotations

from fractions import Fraction

from .terms import (
    Add, Atan, Bump, Const, Cos, Exp, Mul, Neg, PInv, PowNat, PSqrt, Sin,
    Sub, Tanh, Term, Var, ZERO, ONE, REGISTRY, ObligationRegistry, pinv,
)


def differentiate(t: Term, v: str,
                  registry: ObligationRegistry = REGISTRY) -> Term:
    if isinstance(t, Const):
        return ZERO
    if isinstance(t, Var):
        return ONE if t.name == v else ZERO
    if isinstance(t, Add):
        return Add(tuple(differentiate(c, v, registry) for c in t.terms))
    if isinstance(t, Sub):
        return Sub(differentiate(t.a, v, registry),
                   differentiate(t.b, v, registry))
    if isinstance(t, Neg):
        return Neg(differentiate(t.arg, v, registry))
    if isinstance(t, Mul):
        parts = []
        for i, c in enumerate(t.terms):
            dc = differentiate(c, v, registry)
            rest = t.terms[:i] + (dc,) + t.terms[i + 1:]
            parts.append(Mul(rest))
        return Add(tuple(parts))
    if isinstance(t, PowNat):
        if t.exponent == 0:
            return ZERO
        db = differentiate(t.base, v, registry)
        if t.exponent == 1:
            return db
        return Mul((Const(Fraction(t.exponent)),
                    PowNat(t.base, t.exponent - 1), db))
    if isinstance(t, Exp):
        return Mul((t, differentiate(t.arg, v, registry)))
    if isinstance(t, Sin):
        return Mul((Cos(t.arg), differentiate(t.arg, v, registry)))
    if isinstance(t, Cos):
        return Neg(Mul((Sin(t.arg), differentiate(t.arg, v, registry))))
    if isinstance(t, Atan):
        da = differentiate(t.arg, v, registry)
        denom = pinv(Add((ONE, PowNat(t.arg, 2))), registry=registry)
        return Mul((da, denom))
    if isinstance(t, Tanh):
        da = differentiate(t.arg, v, registry)
        return Mul((da, Sub(ONE, PowNat(Tanh(t.arg), 2))))
    if isinstance(t, PSqrt):
        da = differentiate(t.arg, v, registry)
        return Mul((Const(Fraction(1, 2)), da, PInv(t, t.oid)))
    if isinstance(t, PInv):
        da = differentiate(t.arg, v, registry)
        return Neg(Mul((da, PowNat(t, 2))))
    if isinstance(t, Bump):
        if t.var != v:
            return ZERO
        hprime = Mul((Const(Fraction(-2)), Sub(Var(v), Const(t.mid))))
        higher = Bump(t.var, t.lo, t.hi, t.order + 2)
        if t.order == 0:
            return Mul((hprime, higher))
        lower = Mul((Const(Fraction(t.order)),
                     Bump(t.var, t.lo, t.hi, t.order + 1)))
        return Mul((hprime, Sub(higher, lower)))
    raise TypeError(f"unknown node {t!r}")


def gradient(t: Term, names=None,
             registry: ObligationRegistry = REGISTRY) -> dict:
    from .terms import support
    if names is None:
        names = sorted(support(t))
    return {n: differentiate(t, n, registry) for n in names}
