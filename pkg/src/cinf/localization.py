"""Localization of smooth rings, radical membership, and saturation.

Inverting a family S in a presented ring adjoins one fresh variable per
denominator together with the relation ``y_s * s - 1``; the result is
again a finitely presented smooth ring.  The localization is *trivial*
(the zero ring) exactly when the extended zeroset is empty, e.g. when
some denominator already vanishes on the zeroset of the ideal.

Triviality detection is layered, cheapest first: a generator that folds
to a nonzero constant (inverting 0 does this), a denominator provably in
the radical of the ideal, an exact witness point of the extended zeroset
(non-triviality), and finally a region-wise emptiness proof over a box
for the fresh variables derived from reciprocal enclosures of the
denominators.  Every answer reports its route; undecided cases stay
undecided rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import gmpy2

from .errors import ObligationViolated, PendingObligation
from .evaluate import YES, eval_interval, exact_zero_at
from .intervals import to_fraction
from .normalize import normalize
from .parser import print_sexpr
from .regions import Box
from .smooth_ring import Ideal, SmoothRing
from .terms import Const, ObligationRegistry, REGISTRY, Term, Var, ZERO, _coerce, substitute
from .verifier import (
    Budget, DEFAULT_BUDGET, PROVED, REFUTED, Verdict, ZerosetQuery,
    greater_zero, non_zero, prove_on_zeroset, zeroset_included,
)


# ---------------------------------------------------------------------------
# radical membership and saturation (thin, certified wrappers)

def radical_member(a: Term, ideal: Ideal, region: Box, *,
                   budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                   registry: ObligationRegistry = REGISTRY) -> Verdict:
    """Membership of ``a`` in the closed radical of the ideal over the
    region: does ``a`` vanish on the common zeroset of the generators?"""
    return zeroset_included(ideal.sigma, _coerce(a), region, budget=budget,
                            workers=workers, registry=registry)


def saturation_contains(phi: Term, psi: Term, region: Box, *,
                        budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                        registry: ObligationRegistry = REGISTRY) -> Verdict:
    """Is ``psi`` in the saturation of ``phi`` over the region — that is,
    is ``Z(psi)`` contained in ``Z(phi)``?"""
    return zeroset_included(_coerce(psi), _coerce(phi), region, budget=budget,
                            workers=workers, registry=registry)


def nowhere_zero(s: Term, region: Box, *, budget: Budget = DEFAULT_BUDGET,
                 workers: int = 1,
                 registry: ObligationRegistry = REGISTRY) -> Verdict:
    """Certify that ``s`` has no zero anywhere in the region."""
    return prove_on_zeroset(ZerosetQuery(ZERO, non_zero(_coerce(s)), region),
                            budget=budget, workers=workers, registry=registry)


# ---------------------------------------------------------------------------
# localization

@dataclass(frozen=True)
class Localization:
    source: SmoothRing
    ring: SmoothRing
    inverses: tuple  # ((denominator, fresh variable name), ...)

    def inverse_of(self, s: Term) -> Var:
        s_nf = normalize(_coerce(s))
        for d, name in self.inverses:
            if normalize(d) == s_nf:
                return Var(name)
        raise KeyError(f"{print_sexpr(_coerce(s))} was not inverted here")

    @property
    def fresh_names(self) -> tuple:
        return tuple(name for _, name in self.inverses)


def _fresh_prefix(existing) -> str:
    prefix = "y"
    while any(v.startswith(prefix) for v in existing):
        prefix += "y"
    return prefix


def localize(ring: SmoothRing, denominators, *,
             registry: ObligationRegistry = REGISTRY) -> Localization:
    """Adjoin inverses of the denominators: one fresh variable and one
    relation ``y*s - 1`` per denominator.  Purely symbolic; whether the
    result is the zero ring is a separate, certified question."""
    dens = tuple(_coerce(s) for s in denominators)
    prefix = _fresh_prefix(ring.variables)
    inverses = tuple((s, f"{prefix}{i + 1}") for i, s in enumerate(dens))
    relations = tuple(Var(name) * s - 1 for s, name in inverses)
    extended = SmoothRing(ring.variables + tuple(n for _, n in inverses),
                          Ideal(ring.ideal.generators + relations))
    return Localization(source=ring, ring=extended, inverses=inverses)


@dataclass(frozen=True)
class TrivialityReport:
    trivial: Optional[bool]   # True, False, or None when undecided
    route: str
    detail: str
    witness: Optional[tuple] = None  # ((name, Fraction), ...) for non-trivial

    def witness_point(self) -> Optional[dict]:
        return dict(self.witness) if self.witness is not None else None

    def to_json(self) -> dict:
        return {
            "v": 1,
            "trivial": self.trivial,
            "route": self.route,
            "detail": self.detail,
            "witness": None if self.witness is None else
                       {n: str(v) for n, v in self.witness},
        }


def detect_trivial(loc: Localization, *, region: Optional[Box] = None,
                   budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                   registry: ObligationRegistry = REGISTRY) -> TrivialityReport:
    """Decide whether the localized ring collapses to the zero ring.

    The region bounds the *source* variables; the fresh variables range
    over reciprocal enclosures of their denominators.
    """
    source = loc.source
    if region is None:
        region = source.default_region() if source.variables else Box.make({})

    # 1. a relation that folds to a nonzero constant exhibits a unit in
    #    the ideal (inverting zero lands here: y*0 - 1 = -1)
    for g in loc.ring.ideal.generators:
        nf = normalize(g)
        if isinstance(nf, Const) and nf.value != 0:
            return TrivialityReport(
                True, "unit-generator",
                f"ideal generator {print_sexpr(g)} normalizes to the "
                f"nonzero constant {nf.value}")

    # 2. a denominator in the closed radical of the source ideal forces
    #    1 = y*s - (y*s - 1) into the extended ideal
    for s, name in loc.inverses:
        v = radical_member(s, source.ideal, region, budget=budget,
                           workers=workers, registry=registry)
        if v.outcome == PROVED:
            return TrivialityReport(
                True, "denominator-in-ideal",
                f"denominator {print_sexpr(s)} vanishes on the zeroset of "
                f"the ideal over the region")

    # 3. an exact point of the extended zeroset certifies non-triviality
    witness = _witness_point(loc, region, registry)
    if witness is not None:
        return TrivialityReport(
            False, "witness-point",
            "exact common zero of the extended relations",
            witness=tuple(sorted(witness.items())))

    # 4. region-wise emptiness of the extended zeroset
    ext_region = _extended_region(loc, region, registry)
    if ext_region is not None:
        sigma = loc.ring.ideal.sigma
        v = prove_on_zeroset(
            ZerosetQuery(sigma, greater_zero(Const(-1)), ext_region),
            budget=budget, workers=workers, registry=registry)
        if v.outcome == PROVED:
            return TrivialityReport(
                True, "empty-zeroset",
                "the extended zeroset is empty over the region (fresh "
                "variables bounded by reciprocal enclosures)")
        if v.outcome == REFUTED:
            return TrivialityReport(
                False, "witness-point",
                "certified point of the extended zeroset",
                witness=v.witness)

    return TrivialityReport(None, "undecided",
                            "no route settled triviality over the region")


def _witness_point(loc: Localization, region: Box, registry):
    """Try exact points: the region center and a few dyadic samples; a
    candidate works when the source generators vanish there exactly and
    every denominator folds to a nonzero rational."""
    from .certificates import sample_points

    candidates = []
    if region.bounds:
        candidates.append(region.center())
        candidates.extend(sample_points(region, 8, seed=9))
    else:
        candidates.append({})
    for pt in candidates:
        if not all(_vanishes(g, pt, registry)
                   for g in loc.source.ideal.generators):
            continue
        ext = dict(pt)
        ok = True
        for s, name in loc.inverses:
            c = normalize(substitute(s, pt))
            if not isinstance(c, Const) or c.value == 0:
                ok = False
                break
            ext[name] = Fraction(1) / c.value
        if ok:
            return ext
    return None


def _vanishes(g, pt, registry) -> bool:
    try:
        return exact_zero_at(g, pt, registry) == YES
    except (PendingObligation, ObligationViolated):
        return False


def _extended_region(loc: Localization, region: Box, registry):
    """Bound each fresh variable by the reciprocal of its denominator's
    enclosure; impossible when an enclosure straddles zero."""
    bounds = dict(region.as_dict())
    for s, name in loc.inverses:
        try:
            iv = eval_interval(s, region, 113, registry)
        except (PendingObligation, ObligationViolated):
            return None
        if not iv.excludes_zero():
            return None
        if not (gmpy2.is_finite(iv.lo) and gmpy2.is_finite(iv.hi)):
            return None
        lo, hi = to_fraction(iv.lo), to_fraction(iv.hi)
        a, b = 1 / hi, 1 / lo
        bounds[name] = (min(a, b), max(a, b))
    return Box.make(bounds)
