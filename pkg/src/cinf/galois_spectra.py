"""Zeroset filters, the radical adjunction, and pointwise spectra.

The Galois connection pairs ideals of smooth terms with filters of
zerosets: an ideal maps to the filter generated by its common zeroset,
and a filter maps back to the ideal of terms vanishing on all of its
members.  The round trip is the closed radical, so principal data
suffices here: a filter is represented by a single generator term ``b``
and contains exactly the zerosets ``Z(g)`` with ``Z(b)`` inside ``Z(g)``.
All membership questions reduce to certified zeroset inclusions over a
region.  :func:`adjunction_check` tests the two sides of the adjunction
against each other on principal data; a decided disagreement is a
soundness bug and is returned as a violation report.

The spectra are handled pointwise at rational points: a term is in the
point's prime exactly when it vanishes there, and the ordering at the
point is forced by its certified sign.  :func:`ivt_root` localizes a
root of a univariate term by certified-sign bisection, guarded by a
regularity certificate ``f**2 + f'**2 > 0`` on the whole interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .derivatives import differentiate
from .errors import (
    FilterNotPrime, NoSignChange, ObligationViolated, PendingObligation,
    RegularityUnknown, UnknownVerdict,
)
from .evaluate import YES, eval_point, exact_zero_at
from .intervals import PRECISION_LADDER
from .localization import radical_member
from .parser import print_sexpr
from .regions import Box
from .smooth_ring import Ideal
from .terms import ObligationRegistry, REGISTRY, Term, ZERO, _coerce, support
from .verifier import (
    Budget, DEFAULT_BUDGET, PROVED, REFUTED, UNKNOWN, Verdict, ZerosetQuery,
    greater_zero, prove_on_zeroset, zeroset_included,
)

ZERO_SIGN, POSITIVE, NEGATIVE, UNKNOWN_SIGN = "zero", "positive", "negative", "unknown"


# ---------------------------------------------------------------------------
# principal zeroset filters

@dataclass(frozen=True)
class ZerosetFilter:
    """The filter of zerosets containing ``Z(b)``."""

    b: Term


def hat(ideal: Ideal) -> ZerosetFilter:
    """The filter side of the adjunction: zerosets containing the common
    zeroset of the ideal.  The generator is the ideal's sum-of-squares
    combination, so the zero ideal maps to the filter over the full space
    and the whole ring (a unit generator) to the improper filter with
    empty base zeroset."""
    return ZerosetFilter(ideal.sigma)


def check_ideal(filt: ZerosetFilter) -> Ideal:
    """The ideal side of the adjunction, as principal data; its closed
    radical is the set of terms vanishing on ``Z(b)``."""
    return Ideal((filt.b,))


def filter_member(g: Term, filt: ZerosetFilter, region: Box, *,
                  budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                  registry: ObligationRegistry = REGISTRY) -> Verdict:
    """Is ``Z(g)`` a member of the filter — does it contain ``Z(b)``?"""
    return zeroset_included(filt.b, _coerce(g), region, budget=budget,
                            workers=workers, registry=registry)


def filter_meet(a: ZerosetFilter, b: ZerosetFilter) -> ZerosetFilter:
    """The meet: generated by the intersection of the two base zerosets."""
    return ZerosetFilter(a.b ** 2 + b.b ** 2)


@dataclass(frozen=True)
class ViolationReport:
    """A decided disagreement between two routes that must agree."""

    identity: str
    query: Term
    left: str     # outcome via one route
    right: str    # outcome via the other

    def to_json(self) -> dict:
        return {"v": 1, "identity": self.identity,
                "query": print_sexpr(self.query),
                "left": self.left, "right": self.right}


@dataclass(frozen=True)
class AdjunctionResult:
    outcome: str                      # "both-hold" | "both-fail" | "unknown"
    left: Verdict                     # hat(I) contained in the filter
    right: tuple                      # per-generator filter memberships
    violations: tuple = ()

    def to_json(self) -> dict:
        return {"v": 1, "outcome": self.outcome,
                "left": self.left.outcome,
                "right": [v.outcome for v in self.right],
                "violations": [r.to_json() for r in self.violations]}


def adjunction_check(ideal: Ideal, filt: ZerosetFilter, region: Box, *,
                     budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                     registry: ObligationRegistry = REGISTRY) -> AdjunctionResult:
    """Test the adjunction on a principal pair: the filter of the ideal
    is contained in ``filt`` exactly when every generator's zeroset is a
    member of ``filt``.

    The left side is the zeroset inclusion ``Z(b)`` inside ``Z(sigma)``;
    the right side checks each generator individually.  Decided sides
    must agree ("both-hold" or "both-fail"); a decided disagreement is
    reported as a violation and must never occur.
    """
    left = zeroset_included(filt.b, ideal.sigma, region, budget=budget,
                            workers=workers, registry=registry)
    right = tuple(filter_member(g, filt, region, budget=budget,
                                workers=workers, registry=registry)
                  for g in ideal.generators)
    if any(v.outcome == REFUTED for v in right):
        right_outcome = REFUTED
    elif all(v.outcome == PROVED for v in right):
        right_outcome = PROVED        # vacuously proved for the zero ideal
    else:
        right_outcome = UNKNOWN

    violations = ()
    if _decided_mismatch_outcomes(left.outcome, right_outcome):
        violations = (ViolationReport(
            "filter of I below Phi iff I below ideal of Phi",
            ideal.sigma, left.outcome, right_outcome),)
        outcome = "unknown"
    elif left.outcome == PROVED and right_outcome == PROVED:
        outcome = "both-hold"
    elif left.outcome == REFUTED and right_outcome == REFUTED:
        outcome = "both-fail"
    else:
        outcome = "unknown"
    return AdjunctionResult(outcome, left, right, violations)


def _decided_mismatch_outcomes(a: str, b: str) -> bool:
    decided = {PROVED, REFUTED}
    return a in decided and b in decided and a != b


def _decided_mismatch(a: Verdict, b: Verdict) -> bool:
    return _decided_mismatch_outcomes(a.outcome, b.outcome)


def closure_check(filt: ZerosetFilter, region: Box, *,
                  budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                  registry: ObligationRegistry = REGISTRY) -> tuple:
    """Galois closure at principal level: the round trip through the
    ideal side generates a filter with the same base zeroset.  Returns
    the two inclusion verdicts (original inside round-trip and back)."""
    back = hat(check_ideal(filt))
    fwd = zeroset_included(filt.b, back.b, region, budget=budget,
                           workers=workers, registry=registry)
    rev = zeroset_included(back.b, filt.b, region, budget=budget,
                           workers=workers, registry=registry)
    return fwd, rev


def product_ideal(a: Ideal, b: Ideal) -> Ideal:
    return Ideal(tuple(g * h for g in a.generators for h in b.generators))


def radical_product_vs_intersection(a: Ideal, b: Ideal) -> ZerosetFilter:
    """The common filter of the product and the intersection.

    Both closed radicals have the union of the two zerosets as their
    common zeroset, so a single principal generator ``sigma_a * sigma_b``
    serves membership queries for either route through
    :func:`filter_member`.
    """
    return ZerosetFilter(a.sigma * b.sigma)


def product_intersection_mismatches(a: Ideal, b: Ideal, pool, region: Box, *,
                                    budget: Budget = DEFAULT_BUDGET,
                                    workers: int = 1,
                                    registry: ObligationRegistry = REGISTRY) -> list:
    """Cross-check the two radical routes on a pool of query terms:
    membership in the closed radical of the product ideal against
    membership in the common filter.  Returns decided mismatches."""
    out = []
    prod = product_ideal(a, b)
    common = radical_product_vs_intersection(a, b)
    for g in pool:
        g = _coerce(g)
        via_prod = radical_member(g, prod, region, budget=budget,
                                  workers=workers, registry=registry)
        via_filter = filter_member(g, common, region, budget=budget,
                                   workers=workers, registry=registry)
        if _decided_mismatch(via_prod, via_filter):
            out.append(ViolationReport(
                "radical of product = radical of intersection", g,
                via_prod.outcome, via_filter.outcome))
    return out


def prime_filter_split(filt: ZerosetFilter, g1: Term, g2: Term, region: Box, *,
                       budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                       registry: ObligationRegistry = REGISTRY) -> str:
    """Given that ``Z(g1*g2)`` belongs to the filter, locate a factor
    whose zeroset already belongs: returns "left", "right", "both", or
    "unknown"; raises :class:`FilterNotPrime` when both are refuted."""
    left = filter_member(g1, filt, region, budget=budget, workers=workers,
                         registry=registry)
    right = filter_member(g2, filt, region, budget=budget, workers=workers,
                          registry=registry)
    if left.outcome == REFUTED and right.outcome == REFUTED:
        raise FilterNotPrime(
            "neither factor's zeroset belongs to the filter")
    if left.outcome == PROVED and right.outcome == PROVED:
        return "both"
    if left.outcome == PROVED:
        return "left"
    if right.outcome == PROVED:
        return "right"
    return "unknown"


# ---------------------------------------------------------------------------
# pointwise spectra

def certified_sign(t: Term, point, *,
                   registry: ObligationRegistry = REGISTRY,
                   schedule=PRECISION_LADDER) -> str:
    """Sign of ``t`` at a rational point: "zero" symbolically, strict
    signs by directed enclosures, otherwise "unknown"."""
    t = _coerce(t)
    try:
        if exact_zero_at(t, point, registry, schedule) == YES:
            return ZERO_SIGN
        for prec in schedule:
            iv = eval_point(t, point, prec, registry)
            if iv.strictly_positive():
                return POSITIVE
            if iv.strictly_negative():
                return NEGATIVE
    except (PendingObligation, ObligationViolated):
        return UNKNOWN_SIGN
    return UNKNOWN_SIGN


def point_spectra(point, a: Term, *,
                  registry: ObligationRegistry = REGISTRY) -> dict:
    """Membership record of ``a`` at the prime of a rational point.

    The smooth spectrum sees the basic open set of ``a`` (not vanishing
    at the point); the ordered spectrum splits it into the positive
    cones of ``a`` and of ``-a``.  All three memberships are forced by
    the certified sign, so the splitting identity holds by construction
    on every decided record.
    """
    a = _coerce(a)
    missing = support(a) - set(point)
    if missing:
        raise ValueError(f"point does not cover variables {sorted(missing)}")
    sign = certified_sign(a, point, registry=registry)
    if sign == UNKNOWN_SIGN:
        in_d = in_plus = in_minus = UNKNOWN
    else:
        in_d = PROVED if sign != ZERO_SIGN else REFUTED
        in_plus = PROVED if sign == POSITIVE else REFUTED
        in_minus = PROVED if sign == NEGATIVE else REFUTED
    return {
        "v": 1,
        "point": {n: _frac_str(Fraction(v)) for n, v in sorted(point.items())},
        "term": print_sexpr(a),
        "sign": sign,
        "in_D_inf": in_d,
        "in_H_inf_plus": in_plus,
        "in_H_inf_minus": in_minus,
    }


def splitting_identity_holds(record: dict) -> bool:
    """The basic open set splits into the two cone memberships: checked
    on a decided record; undecided records are vacuously fine."""
    outs = (record["in_D_inf"], record["in_H_inf_plus"],
            record["in_H_inf_minus"])
    if UNKNOWN in outs:
        return True
    in_d, plus, minus = (o == PROVED for o in outs)
    return in_d == (plus or minus) and not (plus and minus)


def unique_ordering_at_support(point, trials, *,
                               registry: ObligationRegistry = REGISTRY) -> dict:
    """Classify each trial term at the point into the forced trichotomy:
    in the support prime, in the positive cone, or in the negative cone.
    Undecided terms land in "unknown" and are excluded from the forced
    count."""
    buckets = {"supp": [], "positive": [], "negative": [], "unknown": []}
    for t in trials:
        sign = certified_sign(t, point, registry=registry)
        if sign == ZERO_SIGN:
            buckets["supp"].append(t)
        elif sign == POSITIVE:
            buckets["positive"].append(t)
        elif sign == NEGATIVE:
            buckets["negative"].append(t)
        else:
            buckets["unknown"].append(t)
    return buckets


# ---------------------------------------------------------------------------
# root localization

@dataclass(frozen=True)
class RootEnclosure:
    variable: str
    lo: Fraction
    hi: Fraction
    iterations: int
    regularity: Verdict

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_json(self) -> dict:
        return {"v": 1, "variable": self.variable,
                "enclosure": [_frac_str(self.lo), _frac_str(self.hi)],
                "width": _frac_str(self.width),
                "iterations": self.iterations,
                "regularity": self.regularity.to_json()}


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def ivt_root(f: Term, lo, hi, *, tol: Fraction = Fraction(1, 10 ** 10),
             budget: Budget = DEFAULT_BUDGET, workers: int = 1,
             registry: ObligationRegistry = REGISTRY) -> RootEnclosure:
    """Certified bisection enclosure of a root of a univariate term.

    Requires certified opposite signs at the endpoints and a regularity
    certificate ``f**2 + f'**2 > 0`` over the interval (so the enclosed
    root is simple and the sign test never stalls on a flat zero).
    """
    f = _coerce(f)
    names = sorted(support(f))
    if len(names) != 1:
        raise ValueError(f"root localization needs a univariate term, "
                         f"got variables {names}")
    v = names[0]
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError("empty interval")

    s_lo = certified_sign(f, {v: lo}, registry=registry)
    s_hi = certified_sign(f, {v: hi}, registry=registry)
    regularity = _regularity(f, v, lo, hi, budget, workers, registry)
    for s, end in ((s_lo, lo), (s_hi, hi)):
        if s == ZERO_SIGN:
            return RootEnclosure(v, end, end, 0, regularity)
    if {s_lo, s_hi} != {POSITIVE, NEGATIVE}:
        raise NoSignChange(
            f"certified signs at the endpoints are {s_lo}/{s_hi}")

    steps = 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        s_mid = certified_sign(f, {v: mid}, registry=registry)
        if s_mid == ZERO_SIGN:
            return RootEnclosure(v, mid, mid, steps + 1, regularity)
        if s_mid == UNKNOWN_SIGN:
            # dodge a potentially exact zero with an off-center cut
            mid = lo + (hi - lo) * Fraction(5, 11)
            s_mid = certified_sign(f, {v: mid}, registry=registry)
            if s_mid in (ZERO_SIGN, UNKNOWN_SIGN):
                raise UnknownVerdict(
                    f"sign of the midpoint {mid} could not be certified")
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
        steps += 1
    return RootEnclosure(v, lo, hi, steps, regularity)


def _regularity(f, v, lo, hi, budget, workers, registry) -> Verdict:
    df = differentiate(f, v, registry)
    q = ZerosetQuery(ZERO, greater_zero(f * f + df * df),
                     Box.make({v: (lo, hi)}))
    verdict = prove_on_zeroset(q, budget=budget, workers=workers,
                               registry=registry)
    if verdict.outcome != PROVED:
        raise RegularityUnknown(
            f"could not certify f^2 + f'^2 > 0 on [{lo}, {hi}]")
    return verdict
