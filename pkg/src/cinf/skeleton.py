"""Exact zero test for certificate residuals.

Where :func:`cinf.normalize.normalize` deliberately refuses to distribute
products over sums, this module does the opposite: it rewrites a term as a
formal fraction num/den of fully expanded polynomials over *atoms*
(variables, transcendental nodes, bump factors, guarded square roots),
clearing every ``pinv`` into the denominator, and reports whether the
numerator is the literal zero polynomial.

``psqrt`` atoms are square-reduced: whenever an atom ``psqrt(s)`` with a
pinv-free argument reaches an even power, the pair is replaced by the
expanded polynomial of ``s`` itself.  That rule is what makes residuals of
the form ``m - u**2 - phi*q`` with ``u = psqrt((m + psqrt(m**2+phi**4))/2)``
collapse all the way to zero.

The test is sound in one direction: a True answer means the term is
identically zero wherever it is defined.  (A False answer is just "not
recognized".)
"""

from __future__ import annotations

from fractions import Fraction

from .terms import (
    Add, Atan, Bump, Const, Cos, Exp, Mul, Neg, PInv, PowNat, PSqrt, Sin,
    Sub, Tanh, Term, Var, sort_key,
)
from .normalize import normalize

_ONE = Fraction(1)

Poly = dict  # {mono: Fraction}, mono = sorted tuple of (atom, exponent)

P_ZERO: Poly = {}
P_ONE: Poly = {(): _ONE}


def skeleton_is_zero(t: Term) -> bool:
    num, _den = fraction_form(normalize(t))
    return not num


def fraction_form(t: Term):
    """(numerator, denominator) polynomials of a *normalized* term."""
    cache: dict = {}
    return _frac(t, cache)


def _frac(t: Term, cache):
    got = cache.get(t)
    if got is not None:
        return got
    out = _frac_raw(t, cache)
    cache[t] = out
    return out


def _frac_raw(t: Term, cache):
    if isinstance(t, Const):
        return ({} if t.value == 0 else {(): t.value}), P_ONE
    if isinstance(t, (Var, Bump, Exp, Sin, Cos, Atan, Tanh)):
        return {((t, 1),): _ONE}, P_ONE
    if isinstance(t, PSqrt):
        _register_sqrt(t, cache)
        return {((t, 1),): _ONE}, P_ONE
    if isinstance(t, PInv):
        n, d = _frac(t.arg, cache)
        return d, n
    if isinstance(t, Neg):
        n, d = _frac(t.arg, cache)
        return poly_scale(n, Fraction(-1)), d
    if isinstance(t, Add):
        n, d = P_ZERO, P_ONE
        for c in t.terms:
            n2, d2 = _frac(c, cache)
            n = poly_add(poly_mul(n, d2, cache), poly_mul(n2, d, cache))
            d = poly_mul(d, d2, cache)
        return n, d
    if isinstance(t, Sub):
        n1, d1 = _frac(t.a, cache)
        n2, d2 = _frac(t.b, cache)
        n = poly_add(poly_mul(n1, d2, cache),
                     poly_scale(poly_mul(n2, d1, cache), Fraction(-1)))
        return n, poly_mul(d1, d2, cache)
    if isinstance(t, Mul):
        n, d = P_ONE, P_ONE
        for c in t.terms:
            n2, d2 = _frac(c, cache)
            n = poly_mul(n, n2, cache)
            d = poly_mul(d, d2, cache)
        return n, d
    if isinstance(t, PowNat):
        n, d = _frac(t.base, cache)
        return poly_pow(n, t.exponent, cache), poly_pow(d, t.exponent, cache)
    raise TypeError(f"unknown node {t!r}")


_SQRT_ARGS = "__sqrt_args__"


def _register_sqrt(node: PSqrt, cache):
    """Remember the expanded argument polynomial of a psqrt atom when the
    argument is pinv-free (denominator is a constant); else mark opaque."""
    table = cache.setdefault(_SQRT_ARGS, {})
    if node in table:
        return
    table[node] = None  # break self-reference while computing
    n, d = _frac(node.arg, cache)
    if len(d) == 1 and () in d:
        table[node] = poly_scale(n, 1 / d[()])
    else:
        table[node] = None


# -- polynomial arithmetic ---------------------------------------------------

def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        c2 = out.get(m, 0) + c
        if c2 == 0:
            out.pop(m, None)
        else:
            out[m] = c2
    return out


def poly_scale(p: Poly, c: Fraction) -> Poly:
    if c == 0:
        return {}
    return {m: v * c for m, v in p.items()}


def poly_mul(p: Poly, q: Poly, cache) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            piece = _mono_mul(m1, m2, cache)
            out = poly_add(out, poly_scale(piece, c1 * c2))
    return out


def poly_pow(p: Poly, k: int, cache) -> Poly:
    out = P_ONE
    for _ in range(k):
        out = poly_mul(out, p, cache)
    return out


def _mono_mul(m1, m2, cache) -> Poly:
    exps: dict = {}
    for atom, e in (*m1, *m2):
        exps[atom] = exps.get(atom, 0) + e
    extra = None
    table = cache.get(_SQRT_ARGS, {})
    for atom in list(exps):
        e = exps[atom]
        if e >= 2 and isinstance(atom, PSqrt):
            arg_poly = table.get(atom)
            if arg_poly is None:
                continue
            k, r = divmod(e, 2)
            if r:
                exps[atom] = r
            else:
                del exps[atom]
            boost = poly_pow(arg_poly, k, cache)
            extra = boost if extra is None else poly_mul(extra, boost, cache)
    mono = tuple(sorted(exps.items(), key=lambda ae: sort_key(ae[0])))
    base = {mono: _ONE}
    if extra is None:
        return base
    return poly_mul(base, extra, cache)
