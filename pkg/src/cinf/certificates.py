"""Certified ring operations and the certificates they emit.

Every positive answer is backed by a certificate that can be re-checked
without trusting the solver run that produced it:

* an **inverse certificate** for ``f`` modulo an ideal with zeroset
  witness ``phi`` carries a two-sided inverse ``g`` and cofactors with
  ``f*g - 1 = sum q_i * phi_i`` as a global identity;
* an **order certificate** for ``f < g`` carries a unit ``u`` and
  cofactors with ``g - f - u**2 = sum q_i * phi_i``; the unit is the
  square root of a positive extension of ``g - f``, so its guard is
  discharged conditionally on the verified hypothesis rather than
  assumed;
* an **equality certificate** either carries cofactors against the
  ideal's generators (an exact membership identity) or records a
  verifier verdict that the difference vanishes on the zeroset.

The identities are closed under the order calculus: certificates compose
transitively, shift by arbitrary elements, and scale by certified
positives, with the cofactor lists transformed accordingly.
:func:`verify_certificate` re-checks a certificate from scratch —
structural zero test of the residual, high-precision sampling, a fresh
verifier run, and an audit of every referenced guard.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import gmpy2

from .errors import (
    NotEqual, NotInvertibleOnZeroset, ObligationViolated, OrderRefuted,
    PatternMismatch, PendingObligation, UnknownVerdict,
)
from .evaluate import eval_reference
from .normalize import normalize
from .parser import print_sexpr
from .positivity import (
    discharge_global_positivity, hyp_nonzero, hyp_positive, structurally_positive,
    tietze_extension,
)
from .regions import Box
from .skeleton import skeleton_is_zero
from .smooth_ring import Ideal
from .terms import (
    ASSUMED, ON_REGION, ObligationRegistry, ONE, PENDING, REGISTRY,
    Term, ZERO, _coerce, pinv, psqrt, support,
)
from .verifier import (
    Budget, DEFAULT_BUDGET, PROVED, REFUTED, Verdict, ZerosetQuery,
    equals_zero, greater_zero, non_zero, prove_on_zeroset,
)

SAMPLE_TOLERANCE = Fraction(1, 10 ** 10)


def _fmt(point) -> str:
    return ", ".join(f"{n}={v}" for n, v in sorted(point.items()))


def _hyp_json(h) -> dict:
    kind, a, b = h
    return {"kind": kind, "subject": print_sexpr(a), "zeroset": print_sexpr(b)}


@dataclass(frozen=True)
class _CertBase:
    witness: Term            # zeroset witness phi of the underlying ideal
    parts: tuple             # ((phi_i, q_i), ...) cofactor decomposition
    region: Box
    verdict: Verdict
    obligations: tuple       # obligation ids referenced by the terms
    hypotheses: tuple        # semantic side conditions for conditional guards

    def _parts_sum(self) -> Term:
        acc = ZERO
        for w, q in self.parts:
            acc = acc + q * w
        return acc

    def _base_json(self, kind: str, registry: ObligationRegistry) -> dict:
        rec = {
            "v": 1,
            "kind": kind,
            "witness": print_sexpr(self.witness),
            "parts": [[print_sexpr(w), print_sexpr(q)] for w, q in self.parts],
            "region": {n: [_s(lo), _s(hi)] for n, lo, hi in self.region.bounds},
            "verdict": self.verdict.to_json(),
            "obligations": [registry.get(o).content() for o in self.obligations],
            "hypotheses": [_hyp_json(h) for h in self.hypotheses],
            "residual": print_sexpr(self.residual()),
        }
        if len(self.parts) <= 1:
            # single-witness decompositions also report the lone cofactor
            rec["cofactor"] = print_sexpr(self.parts[0][1] if self.parts
                                          else ZERO)
        return rec


def _s(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class InverseCertificate(_CertBase):
    element: Term
    inverse: Term
    kind: str = "inverse"

    def residual(self) -> Term:
        return self.element * self.inverse - 1 - self._parts_sum()

    def to_json(self, registry: ObligationRegistry = REGISTRY) -> dict:
        rec = self._base_json(self.kind, registry)
        rec["element"] = print_sexpr(self.element)
        rec["inverse"] = print_sexpr(self.inverse)
        return rec


@dataclass(frozen=True)
class OrderCertificate(_CertBase):
    lower: Term
    upper: Term
    unit: Term
    kind: str = "order"

    def residual(self) -> Term:
        return (self.upper - self.lower) - self.unit ** 2 - self._parts_sum()

    def to_json(self, registry: ObligationRegistry = REGISTRY) -> dict:
        rec = self._base_json(self.kind, registry)
        rec["lower"] = print_sexpr(self.lower)
        rec["upper"] = print_sexpr(self.upper)
        rec["unit"] = print_sexpr(self.unit)
        return rec


@dataclass(frozen=True)
class EqualityCertificate(_CertBase):
    left: Term
    right: Term
    route: str               # "cofactors" | "radical"
    kind: str = "equality"

    def residual(self) -> Term:
        if self.route == "cofactors":
            return self.left - self.right - self._parts_sum()
        return ZERO  # the radical route is re-checked by a fresh verdict

    def to_json(self, registry: ObligationRegistry = REGISTRY) -> dict:
        rec = self._base_json(self.kind, registry)
        rec["left"] = print_sexpr(self.left)
        rec["right"] = print_sexpr(self.right)
        rec["route"] = self.route
        return rec


# ---------------------------------------------------------------------------
# invertibility

def cert_invertible(f: Term, ideal: Ideal, region: Box, *,
                    budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                    registry: ObligationRegistry = REGISTRY) -> InverseCertificate:
    """Certify that ``f`` is invertible in the quotient: nonzero on the
    zeroset of the ideal inside the region."""
    phi = ideal.sigma
    verdict = prove_on_zeroset(ZerosetQuery(phi, non_zero(f), region),
                               budget=budget, workers=workers, registry=registry)
    if verdict.outcome == REFUTED:
        raise NotInvertibleOnZeroset(
            f"refuted at {_fmt(verdict.witness_point())}",
            witness=verdict.witness_point())
    if verdict.outcome != PROVED:
        raise UnknownVerdict(f"invertibility undecided: {verdict.reason}")

    if structurally_positive(f, registry):
        inv = pinv(f, registry=registry)
        return InverseCertificate(
            witness=phi, parts=(), region=region, verdict=verdict,
            obligations=(inv.oid,), hypotheses=(), element=f, inverse=inv)

    hyp = hyp_nonzero(f, phi)
    denom = f * f + phi * phi
    d_inv = pinv(denom, registry=registry, scope="conditional",
                 scope_detail="nonzero-on-zeroset hypothesis")
    discharge_global_positivity(d_inv, registry, frozenset({hyp}))
    inverse = f * d_inv
    parts = ((phi, -(phi * d_inv)),)
    return InverseCertificate(
        witness=phi, parts=parts, region=region, verdict=verdict,
        obligations=(d_inv.oid,), hypotheses=(hyp,), element=f,
        inverse=inverse)


def sos_unit(fs, region: Optional[Box] = None, *,
             registry: ObligationRegistry = REGISTRY) -> InverseCertificate:
    """The element ``1 + sum f_i**2`` is a unit in any smooth ring; its
    certificate needs no zeroset analysis at all."""
    u = ONE
    names = set()
    for f in fs:
        u = u + f * f
        names |= support(f)
    if region is None:
        region = Box.uniform(sorted(names) or ("x",), -1, 1)
    return cert_invertible(u, Ideal(()), region, registry=registry)


def sign_of_unit(f: Term, ideal: Ideal, region: Box, *,
                 budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                 registry: ObligationRegistry = REGISTRY) -> int:
    """The sign (+1 or -1) of a unit on the zeroset; a unit whose sign
    cannot be certified raises :class:`UnknownVerdict`."""
    phi = ideal.sigma
    pos = prove_on_zeroset(ZerosetQuery(phi, greater_zero(f), region),
                           budget=budget, workers=workers, registry=registry)
    if pos.outcome == PROVED:
        return 1
    neg = prove_on_zeroset(ZerosetQuery(phi, greater_zero(ZERO - f), region),
                           budget=budget, workers=workers, registry=registry)
    if neg.outcome == PROVED:
        return -1
    raise UnknownVerdict("sign of the unit is not certified either way")


# ---------------------------------------------------------------------------
# strict order

def cert_order(f: Term, g: Term, ideal: Ideal, region: Box, *,
               budget: Budget = DEFAULT_BUDGET, workers: int = 1,
               registry: ObligationRegistry = REGISTRY) -> OrderCertificate:
    """Certify ``f < g`` on the zeroset of the ideal inside the region.

    The emitted unit is ``psqrt`` of a positive extension of ``g - f``
    that agrees with it on the zeroset, so ``g - f = u**2 + sum q*phi``
    holds as a global identity.
    """
    m = g - f
    phi = ideal.sigma
    verdict = prove_on_zeroset(ZerosetQuery(phi, greater_zero(m), region),
                               budget=budget, workers=workers, registry=registry)
    if verdict.outcome == REFUTED:
        raise OrderRefuted(f"refuted at {_fmt(verdict.witness_point())}",
                           witness=verdict.witness_point())
    if verdict.outcome != PROVED:
        raise UnknownVerdict(f"order undecided: {verdict.reason}")

    if structurally_positive(m, registry):
        u = psqrt(m, registry=registry)
        return OrderCertificate(
            witness=phi, parts=(), region=region, verdict=verdict,
            obligations=(u.oid,), hypotheses=(), lower=f, upper=g, unit=u)

    if normalize(phi) == ZERO:
        # the zeroset is the whole space: g - f is positive on the region
        # itself, and the guard of psqrt(g - f) is scoped to it
        u = psqrt(m, registry=registry, scope=ON_REGION,
                  scope_detail=_region_detail(region))
        registry.discharge(
            u.oid, "positive on the region by the order verdict")
        return OrderCertificate(
            witness=phi, parts=(), region=region, verdict=verdict,
            obligations=(u.oid,), hypotheses=(), lower=f, upper=g, unit=u)

    hyp = hyp_positive(m, phi)
    mt = tietze_extension(m, phi, registry)
    u = psqrt(mt, registry=registry, scope="conditional",
              scope_detail="positive-on-zeroset hypothesis")
    q_inv = pinv(4 * mt, registry=registry, scope="conditional",
                 scope_detail="positive-on-zeroset hypothesis")
    q = -(phi ** 3 * q_inv)
    discharge_global_positivity(u, registry, frozenset({hyp}))
    discharge_global_positivity(q_inv, registry, frozenset({hyp}))
    return OrderCertificate(
        witness=phi, parts=((phi, q),), region=region, verdict=verdict,
        obligations=(u.oid, q_inv.oid), hypotheses=(hyp,), lower=f, upper=g,
        unit=u)


def _region_detail(region: Box) -> str:
    return "; ".join(f"{n} in [{_s(lo)}, {_s(hi)}]"
                     for n, lo, hi in region.bounds)


def cert_square(f: Term, ideal: Ideal, region: Box, *,
                budget: Budget = DEFAULT_BUDGET, workers: int = 1,
                registry: ObligationRegistry = REGISTRY) -> OrderCertificate:
    """Certify that ``f`` is a square of a unit (strictly positive on the
    zeroset): an order certificate for ``0 < f``."""
    from .errors import NotASquare
    try:
        cert = cert_order(ZERO, f, ideal, region, budget=budget,
                          workers=workers, registry=registry)
    except OrderRefuted as e:
        raise NotASquare(str(e), witness=e.witness) from None
    return replace(cert, kind="square")


def cert_order_witnessed(f: Term, g: Term, unit: Term, ideal: Ideal,
                         region: Box, *, budget: Budget = DEFAULT_BUDGET,
                         workers: int = 1,
                         registry: ObligationRegistry = REGISTRY) -> OrderCertificate:
    """Order certificate from a caller-supplied unit witness.

    Accepts ``f < g`` when ``g - f - unit**2`` is the literal zero as a
    global identity and the unit is certified invertible in the quotient;
    the square of a unit is strictly positive on the zeroset, so no
    extension search is needed.
    """
    f, g, unit = _coerce(f), _coerce(g), _coerce(unit)
    if not skeleton_is_zero((g - f) - unit ** 2):
        raise PatternMismatch(
            "the witness does not satisfy upper - lower = witness**2 "
            "as a global identity")
    inv = cert_invertible(unit, ideal, region, budget=budget,
                          workers=workers, registry=registry)
    verdict = Verdict(PROVED, None,
                      "witnessed: the difference is the square of a "
                      "certified unit", inv.verdict.cells,
                      inv.verdict.max_depth, inv.verdict.max_precision)
    return OrderCertificate(
        witness=ideal.sigma, parts=(), region=region, verdict=verdict,
        obligations=inv.obligations, hypotheses=inv.hypotheses,
        lower=f, upper=g, unit=unit)


# ---------------------------------------------------------------------------
# order calculus

def order_transitive_compose(c1: OrderCertificate, c2: OrderCertificate, *,
                             registry: ObligationRegistry = REGISTRY) -> OrderCertificate:
    """From ``f < g`` and ``g < h`` derive ``f < h``.

    The combined witness is ``phi1**2 + phi2**2`` (its zeroset is the
    intersection), the new unit is ``psqrt(u1**2 + u2**2)``, and the
    cofactor lists concatenate.
    """
    if normalize(c1.upper - c2.lower) != ZERO:
        raise PatternMismatch(
            "certificates do not chain: upper of the first differs from "
            "lower of the second")
    if c1.region != c2.region:
        raise PatternMismatch("certificates cover different regions")
    gamma = normalize(c1.witness ** 2 + c2.witness ** 2)
    u = psqrt(c1.unit ** 2 + c2.unit ** 2, registry=registry,
              scope="derived",
              scope_detail="sum of squares of the composed units")
    if registry.status(u.oid) == PENDING and \
            structurally_positive(c1.unit, registry) and \
            structurally_positive(c2.unit, registry):
        # each unit is positive wherever its own guards hold, and those
        # guards (with their hypotheses) travel with the composition
        registry.discharge(
            u.oid, "sum of squares of units with discharged guards")
    parts = c1.parts + c2.parts
    verdict = Verdict(PROVED, None, "composed by order transitivity",
                      c1.verdict.cells + c2.verdict.cells,
                      max(c1.verdict.max_depth, c2.verdict.max_depth),
                      max(c1.verdict.max_precision, c2.verdict.max_precision))
    return OrderCertificate(
        witness=gamma, parts=parts, region=c1.region, verdict=verdict,
        obligations=tuple(dict.fromkeys(
            c1.obligations + c2.obligations + (u.oid,))),
        hypotheses=tuple(dict.fromkeys(c1.hypotheses + c2.hypotheses)),
        lower=c1.lower, upper=c2.upper, unit=u)


def order_shift(cert: OrderCertificate, t: Term, *,
                registry: ObligationRegistry = REGISTRY) -> OrderCertificate:
    """From ``f < g`` derive ``f + t < g + t``; the identity is untouched."""
    return OrderCertificate(
        witness=cert.witness, parts=cert.parts, region=cert.region,
        verdict=Verdict(PROVED, None, "shifted order certificate",
                        cert.verdict.cells, cert.verdict.max_depth,
                        cert.verdict.max_precision),
        obligations=cert.obligations, hypotheses=cert.hypotheses,
        lower=cert.lower + t, upper=cert.upper + t, unit=cert.unit)


def order_scale(cert: OrderCertificate, pos: OrderCertificate, *,
                registry: ObligationRegistry = REGISTRY) -> OrderCertificate:
    """From ``f < g`` and ``0 < d`` derive ``f*d < g*d``.

    With ``g - f = u**2 + sum q_i phi_i`` and ``d = w**2 + sum r_j psi_j``:
    ``(g - f) d = (u w)**2 + sum (q_i d) phi_i + sum (u**2 r_j) psi_j``.
    """
    if normalize(pos.lower) != ZERO:
        raise PatternMismatch("scaling certificate must bound 0 < d")
    if cert.region != pos.region:
        raise PatternMismatch("certificates cover different regions")
    d = pos.upper
    gamma = normalize(cert.witness ** 2 + pos.witness ** 2)
    unit = cert.unit * pos.unit
    parts = tuple((w, q * d) for w, q in cert.parts) + \
        tuple((w, cert.unit ** 2 * r) for w, r in pos.parts)
    verdict = Verdict(PROVED, None, "scaled by a certified positive",
                      cert.verdict.cells + pos.verdict.cells,
                      max(cert.verdict.max_depth, pos.verdict.max_depth),
                      max(cert.verdict.max_precision, pos.verdict.max_precision))
    return OrderCertificate(
        witness=gamma, parts=parts, region=cert.region, verdict=verdict,
        obligations=tuple(dict.fromkeys(cert.obligations + pos.obligations)),
        hypotheses=tuple(dict.fromkeys(cert.hypotheses + pos.hypotheses)),
        lower=cert.lower * d, upper=cert.upper * d, unit=unit)


# ---------------------------------------------------------------------------
# equality

def cert_equal(f: Term, g: Term, ideal: Ideal, region: Box, *,
               cofactors=None, budget: Budget = DEFAULT_BUDGET,
               workers: int = 1,
               registry: ObligationRegistry = REGISTRY) -> EqualityCertificate:
    """Certify ``f = g`` in the quotient.

    With explicit ``cofactors`` (one per ideal generator) the membership
    identity ``f - g = sum h_i g_i`` is checked structurally; otherwise
    the difference is verified to vanish on the zeroset.
    """
    phi = ideal.sigma
    if cofactors is not None:
        gens = ideal.generators
        if len(cofactors) != len(gens):
            raise PatternMismatch(
                f"expected {len(gens)} cofactors, got {len(cofactors)}")
        parts = tuple(zip(gens, tuple(cofactors)))
        acc = f - g
        for gen, h in parts:
            acc = acc - h * gen
        if not skeleton_is_zero(acc):
            raise PatternMismatch(
                "cofactors do not reproduce the difference")
        verdict = Verdict(PROVED, None, "explicit ideal-membership identity",
                          0, 0, 0)
        return EqualityCertificate(
            witness=phi, parts=tuple((gen, h) for gen, h in parts),
            region=region, verdict=verdict, obligations=(), hypotheses=(),
            left=f, right=g, route="cofactors")

    query = ZerosetQuery(phi, equals_zero(f - g), region,
                         generators=ideal.generators)
    verdict = prove_on_zeroset(query, budget=budget, workers=workers,
                               registry=registry)
    if verdict.outcome == REFUTED:
        raise NotEqual(f"refuted at {_fmt(verdict.witness_point())}",
                       witness=verdict.witness_point())
    if verdict.outcome != PROVED:
        raise UnknownVerdict(f"equality undecided: {verdict.reason}")
    return EqualityCertificate(
        witness=phi, parts=(), region=region, verdict=verdict,
        obligations=(), hypotheses=(), left=f, right=g, route="radical")


# ---------------------------------------------------------------------------
# independent re-checking

def sample_points(region: Box, count: int, seed: int = 20260823):
    """Deterministic rational sample points in the region (denominator
    2**16 keeps reference evaluation exact and fast)."""
    rng = random.Random(seed)
    den = 2 ** 16
    pts = []
    for _ in range(count):
        pt = {}
        for n, lo, hi in region.bounds:
            k = rng.randrange(den + 1)
            pt[n] = lo + (hi - lo) * Fraction(k, den)
        pts.append(pt)
    return pts


def verify_certificate(cert, *, samples: int = 1000,
                       tolerance: Fraction = SAMPLE_TOLERANCE,
                       prec: int = 256, budget: Budget = DEFAULT_BUDGET,
                       workers: int = 1, allow_assumed: bool = False,
                       registry: ObligationRegistry = REGISTRY) -> bool:
    """Re-check a certificate from scratch.

    1. the residual identity collapses under the structural zero test;
    2. the residual stays below ``tolerance`` in 256-bit arithmetic at
       deterministic sample points of the region;
    3. a fresh verifier run reproduces a proved verdict;
    4. every referenced obligation is discharged (or assumed, if
       explicitly allowed).
    """
    residual = cert.residual()
    if not skeleton_is_zero(residual):
        return False

    for oid in cert.obligations:
        status = registry.status(oid)
        if status == PENDING:
            return False
        if status == ASSUMED and not allow_assumed:
            return False

    if cert.parts or not isinstance(cert, EqualityCertificate):
        for pt in sample_points(cert.region, samples):
            try:
                val = eval_reference(residual, pt, prec)
            except (PendingObligation, ObligationViolated):
                continue  # a guard subject degenerates exactly at the point
            if not abs(val) <= gmpy2.mpq(tolerance):
                return False

    return _fresh_verdict(cert, budget, workers, registry)


def _fresh_verdict(cert, budget, workers, registry) -> bool:
    if isinstance(cert, InverseCertificate):
        pred = non_zero(cert.element)
    elif isinstance(cert, OrderCertificate):
        pred = greater_zero(cert.upper - cert.lower)
    elif isinstance(cert, EqualityCertificate):
        if cert.route == "cofactors":
            return True  # the identity itself is the proof
        pred = equals_zero(cert.left - cert.right)
    else:
        raise TypeError(f"not a certificate: {cert!r}")
    v = prove_on_zeroset(ZerosetQuery(cert.witness, pred, cert.region),
                         budget=budget, workers=workers, registry=registry)
    return v.outcome == PROVED
