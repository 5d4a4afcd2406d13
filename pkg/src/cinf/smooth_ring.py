"""Finitely presented smooth rings and their cosets.

A ring is presented by a finite variable set E and an ideal of smooth
terms over E; elements are cosets of terms.  The ideal's generators are
folded into a single *zeroset witness* ``sigma = g_1^2 + ... + g_k^2``
whose zeroset is exactly the common zeroset of the generators — every
region-wise question about the quotient ("equal on the zeroset",
"invertible on the zeroset", ...) is a predicate on ``Z(sigma)`` and is
delegated to the verifier through the certificate layer.

Coset arithmetic never normalizes representatives; deciding whether two
cosets coincide is a certified operation, not a syntactic one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import IdealMismatch, UnknownName
from .normalize import normalize
from .parser import parse, print_sexpr
from .regions import Box
from .terms import Term, ZERO, _coerce, substitute, support


@dataclass(frozen=True)
class Ideal:
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators",
                           tuple(_coerce(g) for g in self.generators))

    @property
    def sigma(self) -> Term:
        """Single term with Z(sigma) = common zeroset of the generators.

        The zero ideal yields the literal zero term, whose zeroset is the
        whole space.
        """
        return _sigma(self.generators)

    def support(self) -> set:
        out = set()
        for g in self.generators:
            out |= support(g)
        return out

    def is_zero(self) -> bool:
        return all(normalize(g) == ZERO for g in self.generators)


@lru_cache(maxsize=None)
def _sigma(generators: tuple) -> Term:
    acc = ZERO
    for g in generators:
        acc = acc + g * g
    return normalize(acc)


ZERO_IDEAL = Ideal(())


@dataclass(frozen=True)
class SmoothRing:
    """C^inf(R^E) / I for a finite, sorted variable tuple E."""

    variables: tuple
    ideal: Ideal

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(sorted(self.variables)))
        extra = self.ideal.support() - set(self.variables)
        if extra:
            raise UnknownName(
                f"ideal generators use undeclared variables {sorted(extra)}")

    @staticmethod
    def free(names) -> "SmoothRing":
        return SmoothRing(tuple(names), ZERO_IDEAL)

    @staticmethod
    def presented(names, generators) -> "SmoothRing":
        return SmoothRing(tuple(names), Ideal(tuple(generators)))

    def coset(self, t) -> "Coset":
        t = _coerce(t)
        extra = support(t) - set(self.variables)
        if extra:
            raise UnknownName(
                f"term uses undeclared variables {sorted(extra)}")
        return Coset(self, t)

    def default_region(self, lo=-2, hi=2) -> Box:
        return Box.uniform(self.variables, lo, hi)

    # -- presentation records ------------------------------------------

    def to_json(self) -> dict:
        return {"v": 1,
                "variables": list(self.variables),
                "generators": [print_sexpr(g) for g in self.ideal.generators]}

    @staticmethod
    def from_json(rec: dict) -> "SmoothRing":
        if rec.get("v") != 1:
            raise ValueError("unsupported presentation version")
        return SmoothRing.presented(tuple(rec["variables"]),
                                    tuple(parse(g) for g in rec["generators"]))

    # -- certified operations (delegating to the certificate layer) ----

    def equal(self, f, g, region=None, **kw):
        from .certificates import cert_equal
        return cert_equal(_coerce(f), _coerce(g), self.ideal,
                          region or self.default_region(), **kw)

    def invertible(self, f, region=None, **kw):
        from .certificates import cert_invertible
        return cert_invertible(_coerce(f), self.ideal,
                               region or self.default_region(), **kw)

    def order(self, f, g, region=None, **kw):
        from .certificates import cert_order
        return cert_order(_coerce(f), _coerce(g), self.ideal,
                          region or self.default_region(), **kw)

    def square(self, f, region=None, **kw):
        from .certificates import cert_square
        return cert_square(_coerce(f), self.ideal,
                           region or self.default_region(), **kw)


def pullback_ideal(mapping: dict, ideal: Ideal) -> Ideal:
    """Pull an ideal back along the smooth map given coordinate-wise by
    ``mapping`` (target variable -> term in the source variables)."""
    return Ideal(tuple(substitute(g, mapping) for g in ideal.generators))


@dataclass(frozen=True)
class Coset:
    ring: SmoothRing
    rep: Term

    def _peer(self, other) -> Term:
        if isinstance(other, Coset):
            if other.ring != self.ring:
                raise IdealMismatch("cosets live in different rings")
            return other.rep
        return _coerce(other)

    def __add__(self, other):
        return Coset(self.ring, self.rep + self._peer(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Coset(self.ring, self.rep - self._peer(other))

    def __rsub__(self, other):
        return Coset(self.ring, self._peer(other) - self.rep)

    def __mul__(self, other):
        return Coset(self.ring, self.rep * self._peer(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Coset(self.ring, -self.rep)

    def __pow__(self, n):
        return Coset(self.ring, self.rep ** n)
