"""Rational boxes and points.

A box maps variable names to closed rational intervals; a point maps
variable names to exact rationals.  Splitting bisects the widest
coordinate (ties broken by variable name) at the exact midpoint, so the
whole branch-and-prune cell tree is reproducible from the initial box.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping


@dataclass(frozen=True)
class Box:
    bounds: tuple  # tuple of (name, lo, hi), sorted by name

    @staticmethod
    def make(bounds: Mapping[str, tuple]) -> "Box":
        items = []
        for name in sorted(bounds):
            lo, hi = bounds[name]
            lo, hi = Fraction(lo), Fraction(hi)
            if lo > hi:
                raise ValueError(f"inverted bounds for {name}")
            items.append((name, lo, hi))
        return Box(tuple(items))

    @staticmethod
    def uniform(names, lo, hi) -> "Box":
        return Box.make({n: (lo, hi) for n in names})

    def as_dict(self) -> dict:
        return {n: (lo, hi) for n, lo, hi in self.bounds}

    @property
    def names(self) -> tuple:
        return tuple(n for n, _, _ in self.bounds)

    def center(self) -> dict:
        return {n: (lo + hi) / 2 for n, lo, hi in self.bounds}

    def corners(self):
        pts = [{}]
        for n, lo, hi in self.bounds:
            pts = [dict(p, **{n: v}) for p in pts for v in ((lo,) if lo == hi else (lo, hi))]
        return pts

    def contains(self, point: Mapping[str, Fraction]) -> bool:
        return all(lo <= point[n] <= hi for n, lo, hi in self.bounds)

    def widest(self) -> str:
        best, best_w = None, None
        for n, lo, hi in self.bounds:
            w = hi - lo
            if best_w is None or w > best_w:
                best, best_w = n, w
        return best

    def split(self):
        """Bisect the widest coordinate; returns (low half, high half)."""
        v = self.widest()
        lows, highs = [], []
        for n, lo, hi in self.bounds:
            if n == v:
                m = (lo + hi) / 2
                lows.append((n, lo, m))
                highs.append((n, m, hi))
            else:
                lows.append((n, lo, hi))
                highs.append((n, lo, hi))
        return Box(tuple(lows)), Box(tuple(highs))

    def collapse(self, pins: Mapping[str, Fraction]) -> "Box":
        """Pin coordinates to points (must lie inside); drop nothing."""
        out = []
        for n, lo, hi in self.bounds:
            if n in pins:
                p = pins[n]
                if not lo <= p <= hi:
                    raise ValueError(f"pin {n}={p} outside box")
                out.append((n, p, p))
            else:
                out.append((n, lo, hi))
        return Box(tuple(out))

    def restrict(self, names) -> "Box":
        keep = set(names)
        return Box(tuple(b for b in self.bounds if b[0] in keep))

    def is_point(self) -> bool:
        return all(lo == hi for _, lo, hi in self.bounds)

    def max_width(self) -> Fraction:
        return max((hi - lo for _, lo, hi in self.bounds), default=Fraction(0))

    def sort_key(self):
        return tuple((n, lo, hi) for n, lo, hi in self.bounds)


def point_key(point: Mapping[str, Fraction]):
    """Deterministic (lexicographic in sorted variable order) point key."""
    return tuple(point[n] for n in sorted(point))
