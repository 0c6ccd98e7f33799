"""Exact Minkowski causal order, future-cone regions and 1+1 boosts.

Units have c = 1. Every coordinate is a :class:`fractions.Fraction`, so
causal tests are exact, including points on the light-cone boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, str]

SPATIAL_DIMENSIONS = (1, 3)


class DimensionError(ValueError):
    """Raised when points of different spatial dimension are compared."""


def _as_fraction(value: Number) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floating point coordinates are not allowed; use Fraction or str")
    return Fraction(value)


@dataclass(frozen=True, order=True)
class SpacetimePoint:
    """An event location ``(t, x...)`` with 1 or 3 spatial components."""

    t: Fraction
    x: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", _as_fraction(self.t))
        xs = self.x
        if isinstance(xs, (int, Fraction, str)):
            xs = (xs,)
        xs = tuple(_as_fraction(c) for c in xs)
        if len(xs) not in SPATIAL_DIMENSIONS:
            raise DimensionError(f"spatial dimension must be 1 or 3, got {len(xs)}")
        object.__setattr__(self, "x", xs)

    @classmethod
    def of(cls, t: Number, *x: Number) -> "SpacetimePoint":
        return cls(Fraction(t), tuple(Fraction(c) for c in x))

    @property
    def dim(self) -> int:
        return len(self.x)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return (self.t, *self.x)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def _check_dims(r: SpacetimePoint, s: SpacetimePoint) -> None:
    if r.dim != s.dim:
        raise DimensionError(f"cannot compare {r.dim}-d point with {s.dim}-d point")


def interval(r: SpacetimePoint, s: SpacetimePoint) -> Fraction:
    """Squared interval ``dt**2 - |dx|**2`` (positive for time-like pairs)."""
    _check_dims(r, s)
    dt = s.t - r.t
    return dt * dt - sum((b - a) * (b - a) for a, b in zip(r.x, s.x))


def causally_precedes(r: SpacetimePoint, s: SpacetimePoint) -> bool:
    """True iff ``s`` lies on or within the forward light cone of ``r``.

    Reflexive: every point precedes itself.
    """
    _check_dims(r, s)
    return s.t >= r.t and interval(r, s) >= 0


def spacelike(r: SpacetimePoint, s: SpacetimePoint) -> bool:
    return not causally_precedes(r, s) and not causally_precedes(s, r)


@dataclass(frozen=True)
class ConeRegion:
    """Finite union of forward cones, stored as its minimal apex antichain.

    Build regions with :func:`future_closure`; the constructor only accepts
    apex sets that are already canonical (sorted, duplicate free, antichain).
    """

    apices: tuple[SpacetimePoint, ...] = ()

    def __post_init__(self) -> None:
        apices = tuple(self.apices)
        if list(apices) != sorted(set(apices)):
            raise ValueError("apices must be sorted and distinct; use future_closure()")
        for a, b in combinations(apices, 2):
            if causally_precedes(a, b) or causally_precedes(b, a):
                raise ValueError(f"apices {a} and {b} are causally related; use future_closure()")
        object.__setattr__(self, "apices", apices)

    @property
    def is_empty(self) -> bool:
        return not self.apices

    def __contains__(self, s: SpacetimePoint) -> bool:
        return region_contains_point(self, s)

    def __le__(self, other: "ConeRegion") -> bool:
        return region_subset(self, other)

    def __lt__(self, other: "ConeRegion") -> bool:
        return region_proper_subset(self, other)

    def __str__(self) -> str:
        if not self.apices:
            return "{}"
        return " u ".join(f"F{p}" for p in self.apices)


EMPTY_REGION = ConeRegion()


def minimal_points(points: Iterable[SpacetimePoint]) -> list[SpacetimePoint]:
    """Causally minimal elements of ``points``, sorted."""
    pts = sorted(set(points))
    return [
        p for p in pts
        if not any(q != p and causally_precedes(q, p) for q in pts)
    ]


def future_closure(points: Iterable[SpacetimePoint]) -> ConeRegion:
    """Union of ``F(r)`` over ``points`` in canonical form."""
    pts = list(points)
    if pts:
        d = pts[0].dim
        for p in pts[1:]:
            if p.dim != d:
                raise DimensionError("mixed spatial dimensions in point set")
    return ConeRegion(tuple(minimal_points(pts)))


def region_contains_point(region: ConeRegion, s: SpacetimePoint) -> bool:
    return any(causally_precedes(a, s) for a in region.apices)


def region_subset(r1: ConeRegion, r2: ConeRegion) -> bool:
    """Non-strict containment. ``F(r)`` lies in a region iff ``r`` does."""
    return all(region_contains_point(r2, a) for a in r1.apices)


def region_proper_subset(r1: ConeRegion, r2: ConeRegion) -> bool:
    return region_subset(r1, r2) and not region_subset(r2, r1)


def region_union(*regions: ConeRegion) -> ConeRegion:
    return future_closure(a for r in regions for a in r.apices)


@dataclass(frozen=True)
class Boost:
    """Lorentz boost along the single spatial axis with velocity ``v``."""

    v: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        v = _as_fraction(self.v)
        if not -1 < v < 1:
            raise ValueError(f"boost velocity must satisfy |v| < 1, got {v}")
        object.__setattr__(self, "v", v)

    @property
    def gamma_squared(self) -> Fraction:
        return 1 / (1 - self.v * self.v)

    def time_key(self, r: SpacetimePoint) -> Fraction:
        """Boosted time divided by gamma; orders events exactly in this frame."""
        if r.dim != 1:
            raise DimensionError("boosts are only defined for 1+1 points")
        return r.t - self.v * r.x[0]


def apply_boost(b: Boost, r: SpacetimePoint) -> SpacetimePoint:
    """Boost ``r``, returning the rational prefactor of the new coordinates.

    The true coordinates are ``gamma * (t - v x, x - v t)``. ``gamma`` is
    common to every point in a frame and positive, so the returned point
    carries the same time order and causal order as the true image; use
    ``b.gamma_squared`` to recover magnitudes.
    """
    if r.dim != 1:
        raise DimensionError("boosts are only defined for 1+1 points")
    x = r.x[0]
    return SpacetimePoint(r.t - b.v * x, (x - b.v * r.t,))


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational in the open interval ``(lo, hi)`` with the smallest denominator."""
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -_simplest_between(-hi, -lo)
    q = 1
    while True:
        # smallest integer numerator strictly above lo*q
        n = (lo.numerator * q) // lo.denominator + 1
        if Fraction(n, q) < hi:
            return Fraction(n, q)
        q += 1


def critical_velocities(points: Sequence[SpacetimePoint]) -> list[Fraction]:
    """Sorted distinct velocities at which some space-like pair is simultaneous."""
    crit = set()
    for p, q in combinations(points, 2):
        dt, dx = q.t - p.t, q.x[0] - p.x[0]
        if dx != 0 and abs(dt) < abs(dx):
            crit.add(dt / dx)
    return sorted(crit)


def enumerate_orderings(
    points: Sequence[SpacetimePoint],
) -> list[tuple[tuple[int, ...], Fraction]]:
    """All strict time orderings of ``points`` realised by some boost.

    Returns ``(ordering, v)`` pairs where ``ordering`` lists indices into
    ``points`` from earliest to latest in the frame with velocity ``v``.
    """
    points = list(points)
    for p in points:
        if p.dim != 1:
            raise DimensionError("frame orderings require 1+1 points")
    if len(set(points)) != len(points):
        raise ValueError("points must be pairwise distinct")
    cuts = [Fraction(-1), *critical_velocities(points), Fraction(1)]
    out: list[tuple[tuple[int, ...], Fraction]] = []
    seen = set()
    for lo, hi in zip(cuts, cuts[1:]):
        v = _simplest_between(lo, hi)
        b = Boost(v)
        order = tuple(sorted(range(len(points)), key=lambda i: (b.time_key(points[i]), i)))
        if order not in seen:
            seen.add(order)
            out.append((order, v))
    return out
