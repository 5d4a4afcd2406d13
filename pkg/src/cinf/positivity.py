"""Structural strict-positivity proofs and obligation discharge.

The prover is syntactic and sound: it recognizes positive rational
constants, exponentials, guarded nodes whose guard is already discharged,
square roots / reciprocals of structurally positive arguments, products of
positives, and sums in which every summand is nonnegative (even powers,
bump factors, positives) and at least one summand is positive.

Two conditional patterns are matched against caller-supplied hypotheses:

* ``f**2 + phi**2`` is positive under the hypothesis "f is nonzero on the
  zeroset of phi" (their common zero would have to lie on that zeroset);
* the positive extension ``(m + psqrt(m**2 + psi**4)) / 2`` is positive
  under the hypothesis "m is positive on the zeroset of psi" (off the
  zeroset psi**4 > 0 already forces the sum above |m| + m >= 0).

Hypotheses are descriptor tuples; certificate construction registers them
when the corresponding verdict is proved (or explicitly assumed).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .terms import (
    Add, Bump, Const, Exp, Mul, Neg, PInv, PowNat, PSqrt, Term,
    DISCHARGED, REGISTRY, ObligationRegistry, guarded_nodes, psqrt,
)
from .normalize import normalize

NONZERO_ON = "nonzero-on-zeroset"    # (NONZERO_ON, f, phi):  f != 0 on Z(phi)
POSITIVE_ON = "positive-on-zeroset"  # (POSITIVE_ON, m, psi): m > 0  on Z(psi)


def hyp_nonzero(f: Term, phi: Term):
    return (NONZERO_ON, normalize(f), normalize(phi))


def hyp_positive(m: Term, psi: Term):
    return (POSITIVE_ON, normalize(m), normalize(psi))


def tietze_extension(m: Term, psi: Term,
                     registry: ObligationRegistry = REGISTRY) -> Term:
    """The positive extension (m + psqrt(m**2 + psi**4)) / 2.

    It agrees with m wherever psi vanishes and m > 0, and is positive
    everywhere once m > 0 holds on the zeroset of psi; the inner guard
    (m**2 + psi**4 > 0) is discharged conditionally on that hypothesis.
    """
    s = Add((PowNat(m, 2), PowNat(psi, 4)))
    root = psqrt(s, registry=registry, scope="conditional",
                 scope_detail="positive-on-zeroset hypothesis")
    registry.discharge(
        root.oid,
        "m**2 + psi**4 vanishes only where psi = 0 and m = 0, excluded by "
        "the hypothesis m > 0 on the zeroset of psi")
    return Mul((Const(Fraction(1, 2)), Add((m, root))))


def structurally_positive(t: Term, registry: ObligationRegistry = REGISTRY,
                          hypotheses: frozenset = frozenset()) -> Optional[str]:
    """A reason string if t is provably positive everywhere, else None."""
    return _pos(normalize(t), registry, hypotheses)


def _pos(nf: Term, reg, hyps) -> Optional[str]:
    if isinstance(nf, Const):
        return "positive constant" if nf.value > 0 else None
    if isinstance(nf, Exp):
        return "exponential"
    if isinstance(nf, PSqrt):
        if nf.oid >= 0 and reg.status(nf.oid) == DISCHARGED:
            return "square root with discharged guard"
        if _pos(nf.arg, reg, hyps):
            return "square root of a positive"
        return None
    if isinstance(nf, PInv):
        if nf.oid >= 0 and reg.status(nf.oid) == DISCHARGED:
            return "reciprocal with discharged guard"
        if _pos(nf.arg, reg, hyps):
            return "reciprocal of a positive"
        return None
    hit = _match_hypothesis(nf, reg, hyps)
    if hit:
        return hit
    if isinstance(nf, Add):
        saw_pos = False
        for entry in nf.terms:
            kind = _entry_sign(entry, reg, hyps)
            if kind == "pos":
                saw_pos = True
            elif kind != "nonneg":
                return None
        if saw_pos:
            return "sum of nonnegatives with a positive summand"
        return None
    if isinstance(nf, (Mul, PowNat)):
        if _entry_sign(nf, reg, hyps) == "pos":
            return "product of positives"
    return None


def _entry_sign(entry: Term, reg, hyps) -> Optional[str]:
    """Classify one canonical summand as 'pos', 'nonneg', or None."""
    if isinstance(entry, Neg):
        return None
    if isinstance(entry, Const):
        return "pos" if entry.value > 0 else None
    factors = entry.terms if isinstance(entry, Mul) else (entry,)
    kind = "pos"
    for f in factors:
        if isinstance(f, Const):
            if f.value < 0:
                return None
            continue
        base, e = (f.base, f.exponent) if isinstance(f, PowNat) else (f, 1)
        if _pos(base, reg, hyps):
            continue
        if e % 2 == 0 or isinstance(base, Bump):
            kind = "nonneg"
            continue
        return None
    return kind


def _match_hypothesis(nf: Term, reg, hyps) -> Optional[str]:
    for h in hyps:
        if h[0] == NONZERO_ON:
            _, f, phi = h
            pattern = normalize(Add((PowNat(f, 2), PowNat(phi, 2))))
            if nf == pattern:
                return ("f**2 + phi**2 under the hypothesis that f is "
                        "nonzero on the zeroset of phi")
        elif h[0] == POSITIVE_ON:
            _, m, psi = h
            s = Add((PowNat(m, 2), PowNat(psi, 4)))
            # any positive rational multiple of m + psqrt(m**2 + psi**4)
            core = normalize(Add((m, PSqrt(s, -1))))
            cand = nf
            if isinstance(cand, Mul) and cand.terms and \
                    isinstance(cand.terms[0], Const) and cand.terms[0].value > 0:
                rest = cand.terms[1:]
                cand = rest[0] if len(rest) == 1 else Mul(rest)
            if cand == core:
                return ("positive extension of m under the hypothesis that "
                        "m is positive on the zeroset of psi")
    return None


def discharge_global_positivity(t: Term,
                                registry: ObligationRegistry = REGISTRY,
                                hypotheses: frozenset = frozenset()) -> bool:
    """Try to discharge every pending guard inside t structurally, then
    report whether t itself is provably positive everywhere."""
    for node in guarded_nodes(t):
        if node.oid >= 0 and registry.status(node.oid) != DISCHARGED:
            why = _pos(normalize(node.arg), registry, hypotheses)
            if why:
                registry.discharge(node.oid, why)
    return structurally_positive(t, registry, hypotheses) is not None
