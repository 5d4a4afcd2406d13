r"""Outward-rounded interval arithmetic on MPFR floats.

An interval [lo, hi] encloses every real value a quantity can take; all
operations here return intervals that contain the exact image of their
operands (soundness), rounding the lower endpoint toward -oo and the upper
endpoint toward +oo.  Endpoints are ``gmpy2.mpfr`` values of a fixed working
precision; +/-inf endpoints are legal (NaN never is).  The half-open clamps
used by the guarded primitives follow the convention

    recip_pos([lo, hi])  with hi > 0   ->  [1/hi, +inf)   when lo <= 0
                                            [1/hi, 1/lo]   when lo > 0
    sqrt_pos ([lo, hi])  with hi > 0   ->  [0, sqrt(hi)]  when lo <= 0
                                            [sqrt(lo), sqrt(hi)] otherwise

which is sound whenever the true argument is known (by a discharged or
assumed guard) to be strictly positive: the true value range is then a
subset of (0, hi], whose image the clamped interval contains.

Products use the convention 0 * (+/-inf) = 0 for endpoint candidates: a zero
endpoint annihilates regardless of the other factor's magnitude, which is the
standard sound choice for interval endpoint products.

Ranges of sin/cos are computed from directed endpoint evaluations plus a
conservative test for interior critical points: a critical point c + 2*pi*k
lies in [lo, hi] for some integer k iff the integer lattice meets
([lo, hi] - c) / (2*pi); that test is run on an *enclosure* of the quotient
(with pi itself an interval), so "maybe" counts as "yes" and the extremum is
included.  The result can only widen, never clip.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

PRECISION_LADDER = (53, 113, 256)


def to_fraction(x: mpfr) -> Fraction:
    """Exact conversion of a finite mpfr to a Fraction."""
    q = gmpy2.mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


@dataclass(frozen=True, slots=True)
class Interval:
    lo: mpfr
    hi: mpfr

    def __post_init__(self):
        if gmpy2.is_nan(self.lo) or gmpy2.is_nan(self.hi):
            raise ValueError("NaN endpoint in interval")
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def is_exact_zero(self) -> bool:
        return self.lo == 0 and self.hi == 0

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def contains(self, q) -> bool:
        """Membership test; exact for Fraction/int/mpfr arguments."""
        if isinstance(q, Fraction):
            q = gmpy2.mpq(q.numerator, q.denominator)
        return self.lo <= q <= self.hi

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


class IntervalContext:
    """All interval operations at one working precision.

    Instances are cheap but cached via :func:`interval_context`; every mpfr
    this class produces carries exactly ``prec`` bits, so same-precision
    negation and comparison are exact.
    """

    def __init__(self, prec: int):
        self.prec = prec
        self._dn = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
        self._up = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
        self._zero = self._dn.add(mpfr(0), mpfr(0))
        self._one_dn = self._dn.add(mpfr(1), mpfr(0))
        self._one_up = self._up.add(mpfr(1), mpfr(0))
        self.zero_iv = Interval(self._zero, self._zero)
        self.one_iv = Interval(self._one_dn, self._one_up)
        self._pi = Interval(self._dn.const_pi(), self._up.const_pi())
        self._minus_one = self._dn.minus(self._one_dn)

    # -- constructors ---------------------------------------------------

    def const(self, q: Fraction | int) -> Interval:
        if isinstance(q, int):
            mq = gmpy2.mpq(q)
        else:
            mq = gmpy2.mpq(q.numerator, q.denominator)
        return Interval(self._dn.add(self._zero, mq), self._up.add(self._zero, mq))

    def from_endpoints(self, lo: Fraction, hi: Fraction) -> Interval:
        mlo = gmpy2.mpq(lo.numerator, lo.denominator)
        mhi = gmpy2.mpq(hi.numerator, hi.denominator)
        return Interval(self._dn.add(self._zero, mlo), self._up.add(self._zero, mhi))

    def pi(self) -> Interval:
        return self._pi

    # -- ring operations ------------------------------------------------

    def add(self, a: Interval, b: Interval) -> Interval:
        return Interval(self._dn.add(a.lo, b.lo), self._up.add(a.hi, b.hi))

    def sub(self, a: Interval, b: Interval) -> Interval:
        return Interval(self._dn.sub(a.lo, b.hi), self._up.sub(a.hi, b.lo))

    def neg(self, a: Interval) -> Interval:
        return Interval(self._dn.minus(a.hi), self._up.minus(a.lo))

    def _prod(self, ctx, x, y):
        if x == 0 or y == 0:
            return self._zero
        return ctx.mul(x, y)

    def mul(self, a: Interval, b: Interval) -> Interval:
        pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
        lo = min(self._prod(self._dn, x, y) for x, y in pairs)
        hi = max(self._prod(self._up, x, y) for x, y in pairs)
        return Interval(lo, hi)

    def square(self, a: Interval) -> Interval:
        if a.lo >= 0:
            return Interval(self._dn.square(a.lo), self._up.square(a.hi))
        if a.hi <= 0:
            return Interval(self._dn.square(a.hi), self._up.square(a.lo))
        return Interval(self._zero, max(self._up.square(a.lo), self._up.square(a.hi)))

    def pow_nat(self, a: Interval, n: int) -> Interval:
        if n == 0:
            return self.one_iv
        if n == 1:
            return a
        if n % 2 == 1:
            return Interval(self._dn.pow(a.lo, n), self._up.pow(a.hi, n))
        if a.lo >= 0:
            return Interval(self._dn.pow(a.lo, n), self._up.pow(a.hi, n))
        if a.hi <= 0:
            return Interval(self._dn.pow(a.hi, n), self._up.pow(a.lo, n))
        return Interval(self._zero, max(self._up.pow(a.lo, n), self._up.pow(a.hi, n)))

    # -- guarded operations (argument strictly positive) ----------------

    def recip_pos(self, a: Interval) -> Interval:
        """Reciprocal under a strict-positivity guard; see module docstring."""
        if not a.hi > 0:
            raise ValueError("recip_pos needs hi > 0")
        lo = self._dn.div(self._one_dn, a.hi)
        if a.lo > 0:
            return Interval(lo, self._up.div(self._one_up, a.lo))
        return Interval(lo, mpfr('inf'))

    def sqrt_pos(self, a: Interval) -> Interval:
        if not a.hi > 0:
            raise ValueError("sqrt_pos needs hi > 0")
        hi = self._up.sqrt(a.hi)
        if a.lo > 0:
            return Interval(self._dn.sqrt(a.lo), hi)
        return Interval(self._zero, hi)

    def div_pos(self, a: Interval, b: Interval) -> Interval:
        """Division by an interval with b.lo > 0 (no guard semantics)."""
        if not b.lo > 0:
            raise ValueError("div_pos needs a strictly positive denominator")
        lo = self._dn.div(a.lo, b.lo if a.lo < 0 else b.hi)
        hi = self._up.div(a.hi, b.hi if a.hi < 0 else b.lo)
        return Interval(lo, hi)

    # -- transcendental operations --------------------------------------

    def exp(self, a: Interval) -> Interval:
        return Interval(self._dn.exp(a.lo), self._up.exp(a.hi))

    def atan(self, a: Interval) -> Interval:
        return Interval(self._dn.atan(a.lo), self._up.atan(a.hi))

    def tanh(self, a: Interval) -> Interval:
        return Interval(self._dn.tanh(a.lo), self._up.tanh(a.hi))

    def _has_critical(self, a: Interval, c: Interval) -> bool:
        """Conservatively: may some c + 2*pi*k (k integer) lie in a?"""
        two_pi = self.add(self._pi, self._pi)
        t = self.div_pos(self.sub(a, c), two_pi)
        return gmpy2.floor(t.hi) >= gmpy2.ceil(t.lo)

    def _clamp_unit(self, lo, hi):
        lo = max(lo, self._minus_one)
        hi = min(hi, self._one_up)
        # outward-rounded +/-1 are exact at any precision
        return Interval(lo, hi)

    def sin(self, a: Interval) -> Interval:
        if not (gmpy2.is_finite(a.lo) and gmpy2.is_finite(a.hi)):
            return Interval(self._minus_one, self._one_dn)
        if self._up.sub(a.hi, a.lo) >= 7:  # spans a full period (2*pi < 7)
            return Interval(self._minus_one, self._one_dn)
        half_pi = self.div_pos(self._pi, self.const(2))
        lo_cands = [self._dn.sin(a.lo), self._dn.sin(a.hi)]
        hi_cands = [self._up.sin(a.lo), self._up.sin(a.hi)]
        if self._has_critical(a, self.neg(half_pi)):
            lo_cands.append(self._minus_one)
        if self._has_critical(a, half_pi):
            hi_cands.append(self._one_up)
        return self._clamp_unit(min(lo_cands), max(hi_cands))

    def cos(self, a: Interval) -> Interval:
        if not (gmpy2.is_finite(a.lo) and gmpy2.is_finite(a.hi)):
            return Interval(self._minus_one, self._one_dn)
        if self._up.sub(a.hi, a.lo) >= 7:
            return Interval(self._minus_one, self._one_dn)
        lo_cands = [self._dn.cos(a.lo), self._dn.cos(a.hi)]
        hi_cands = [self._up.cos(a.lo), self._up.cos(a.hi)]
        if self._has_critical(a, self._pi):
            lo_cands.append(self._minus_one)
        if self._has_critical(a, self.zero_iv):
            hi_cands.append(self._one_up)
        return self._clamp_unit(min(lo_cands), max(hi_cands))

    # -- misc ------------------------------------------------------------

    def hull(self, a: Interval, b: Interval) -> Interval:
        return Interval(min(a.lo, b.lo), max(a.hi, b.hi))

    def width(self, a: Interval) -> mpfr:
        return self._up.sub(a.hi, a.lo)

    def midpoint(self, a: Interval) -> Fraction:
        if not (gmpy2.is_finite(a.lo) and gmpy2.is_finite(a.hi)):
            raise ValueError("midpoint of an unbounded interval")
        return (to_fraction(a.lo) + to_fraction(a.hi)) / 2


_CONTEXTS: dict[int, IntervalContext] = {}


def interval_context(prec: int) -> IntervalContext:
    ic = _CONTEXTS.get(prec)
    if ic is None:
        ic = _CONTEXTS[prec] = IntervalContext(prec)
    return ic
