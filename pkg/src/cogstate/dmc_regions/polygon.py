"""Exact rational rate polygons.

Bound values are rounded to a 1e-12 grid and held as Fractions; vertices of
{R1, R2 >= 0} intersected with the bound half-planes are then enumerated
exactly, so containment never depends on floating-point ties.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

QUANTUM = 10 ** 12


def rational(x: float) -> Fraction:
    """Round ``x`` to the nearest multiple of 1e-12."""
    return Fraction(round(float(x) * QUANTUM), QUANTUM)


@dataclass(frozen=True)
class HalfPlane:
    a1: Fraction
    a2: Fraction
    b: Fraction
    label: str = ""

    def slack(self, x: Fraction, y: Fraction) -> Fraction:
        return self.b - self.a1 * x - self.a2 * y


@dataclass(frozen=True)
class RatePolygon:
    """{(R1, R2) : R1 >= 0, R2 >= 0, a1 R1 + a2 R2 <= b for each half-plane}."""

    planes: tuple[HalfPlane, ...]

    def all_planes(self) -> tuple[HalfPlane, ...]:
        neg = (HalfPlane(Fraction(-1), Fraction(0), Fraction(0), "R1>=0"),
               HalfPlane(Fraction(0), Fraction(-1), Fraction(0), "R2>=0"))
        return self.planes + neg

    def contains(self, x, y) -> bool:
        return all(h.slack(x, y) >= 0 for h in self.all_planes())

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        """Vertices in counter-clockwise order starting at the origin side; [] if empty."""
        hp = self.all_planes()
        pts = set()
        for h, g in combinations(hp, 2):
            det = h.a1 * g.a2 - h.a2 * g.a1
            if det == 0:
                continue
            x = (h.b * g.a2 - h.a2 * g.b) / det
            y = (h.a1 * g.b - h.b * g.a1) / det
            if self.contains(x, y):
                pts.add((x, y))
        return sorted(pts)

    def is_empty(self) -> bool:
        return not self.vertices()

    def min_slack(self, points: Sequence[tuple[Fraction, Fraction]]) -> Fraction | None:
        """Smallest constraint slack of ``points`` with respect to this polygon."""
        if not points:
            return None
        hp = self.all_planes()
        return min(h.slack(x, y) for x, y in points for h in hp)

    def contains_polygon(self, other: "RatePolygon") -> tuple[bool, float]:
        """(other within self, worst slack in bits); an empty ``other`` has slack +inf."""
        s = self.min_slack(other.vertices())
        if s is None:
            return True, float("inf")
        return s >= 0, float(s)

    def max_weighted(self, w1: float, w2: float) -> float:
        vs = self.vertices()
        if not vs:
            return float("-inf")
        return max(float(w1 * x + w2 * y) for x, y in vs)


def polygon_from_rows(rows: dict[str, tuple[tuple[int, int], float]]) -> RatePolygon:
    planes = tuple(HalfPlane(Fraction(c[0]), Fraction(c[1]), rational(v), k)
                   for k, (c, v) in rows.items())
    return RatePolygon(planes)
