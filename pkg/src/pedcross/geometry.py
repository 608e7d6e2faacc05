"""
Geometric kernel for circle agents moving on a forward semicircle.

Angles are measured relative to the mover's forward direction, positive
counter-clockwise (to the mover's left). A candidate destination at angle
``theta`` lies at ``old + move_dist * R(forward) @ (cos theta, sin theta)``.
Exclusion intervals are open: a candidate exactly tangent to an obstacle's
clearance circle is admissible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi

#: Absolute tolerance (meters) for distance comparisons.
DIST_TOL = 1e-9
#: Tolerance (radians) when comparing angles for ties.
ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def distance(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"circle radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class AngleInterval:
    """Open arc ``(lo, hi)`` of forbidden directions, clipped to the forward semicircle."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (-HALF_PI - ANGLE_TOL <= self.lo <= self.hi <= HALF_PI + ANGLE_TOL):
            raise ValueError(f"invalid interval ({self.lo}, {self.hi})")

    @property
    def measure(self) -> float:
        return self.hi - self.lo


FULL_SEMICIRCLE = AngleInterval(-HALF_PI, HALF_PI)


@dataclass(frozen=True)
class ExclusionSet:
    """Sorted, pairwise-disjoint union of exclusion intervals."""

    intervals: Tuple[AngleInterval, ...] = ()

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @property
    def measure(self) -> float:
        return sum(iv.measure for iv in self.intervals)

    def contains(self, theta: float) -> bool:
        """True if ``theta`` is strictly inside an interval (or on a clipped semicircle edge)."""
        for iv in self.intervals:
            if iv.lo < theta < iv.hi:
                return True
            if theta == iv.lo == -HALF_PI or theta == iv.hi == HALF_PI:
                return True
        return False


class CoincidentCircles(Exception):
    """Raised by :func:`circle_intersections` when both circles are identical."""


def circle_intersections(a: Circle, b: Circle, tol: float = DIST_TOL) -> List[Point]:
    """Intersection points of two circles (0, 1 or 2 points).

    Raises:
        CoincidentCircles: if the circles coincide (infinitely many solutions).
    """
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    d = math.hypot(dx, dy)
    if d <= tol:
        if abs(a.radius - b.radius) <= tol:
            raise CoincidentCircles(f"circles coincide: {a} / {b}")
        return []
    if d > a.radius + b.radius + tol or d < abs(a.radius - b.radius) - tol:
        return []
    # distance from a's center to the chord midpoint along the center line
    along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d)
    h2 = a.radius * a.radius - along * along
    mx = a.center.x + along * dx / d
    my = a.center.y + along * dy / d
    if h2 <= (tol * max(1.0, a.radius)) ** 2 or h2 <= 0.0:
        return [Point(mx, my)]
    h = math.sqrt(h2)
    ox, oy = -dy / d * h, dx / d * h
    return [Point(mx + ox, my + oy), Point(mx - ox, my - oy)]


def _to_local(old: Point, forward: Tuple[float, float], p: Point) -> Tuple[float, float]:
    fx, fy = forward
    rx, ry = p.x - old.x, p.y - old.y
    return rx * fx + ry * fy, -rx * fy + ry * fx


def candidate_position(old: Point, move_dist: float, forward: Tuple[float, float], theta: float) -> Point:
    """World position reached by moving ``move_dist`` at relative angle ``theta``."""
    fx, fy = forward
    c, s = math.cos(theta), math.sin(theta)
    return Point(old.x + move_dist * (c * fx - s * fy), old.y + move_dist * (c * fy + s * fx))


def _clip_arc(lo: float, hi: float, out: list) -> None:
    """Append the pieces of the open arc (lo, hi) (hi - lo < 2pi) that fall on the semicircle."""
    for shift in (-TWO_PI, 0.0, TWO_PI):
        a = lo + shift
        b = hi + shift
        if a < -HALF_PI:
            a = -HALF_PI
        if b > HALF_PI:
            b = HALF_PI
        if a < b:
            out.append((a, b))


def obstacle_arcs(ox, oy, fx, fy, move_dist, cx, cy, clearance, out: list) -> None:
    """Float-level core of :func:`exclusion_interval`; appends ``(lo, hi)`` tuples to ``out``."""
    rx = cx - ox
    ry = cy - oy
    a = rx * fx + ry * fy
    b = -rx * fy + ry * fx
    dist = math.hypot(a, b)
    if dist <= DIST_TOL:
        # candidate circle concentric with the clearance circle
        if move_dist <= clearance + DIST_TOL:
            out.append((-HALF_PI, HALF_PI))
        return
    # |P - C|^2 = d^2 + D^2 - 2 d D cos(theta - phi) < c^2
    k = (move_dist * move_dist + dist * dist - clearance * clearance) / (2.0 * move_dist * dist)
    if k >= 1.0:
        return
    if k <= -1.0:
        out.append((-HALF_PI, HALF_PI))
        return
    phi = math.atan2(b, a)
    half = math.acos(k)
    _clip_arc(phi - half, phi + half, out)


def wall_arcs(ox, oy, fx, fy, move_dist, nx, ny, offset, out: list) -> None:
    """Float-level core of :func:`halfplane_exclusion`."""
    u = nx * fx + ny * fy
    v = -nx * fy + ny * fx
    scale = math.hypot(u, v)
    slack = offset - (nx * ox + ny * oy)
    if scale == 0.0:
        if slack < 0:
            out.append((-HALF_PI, HALF_PI))
        return
    k = slack / (move_dist * scale)
    if k >= 1.0:
        return
    if k <= -1.0:
        out.append((-HALF_PI, HALF_PI))
        return
    psi = math.atan2(v, u)
    half = math.acos(k)
    _clip_arc(psi - half, psi + half, out)


def merge_arcs(arcs: list) -> list:
    """Sorted, disjoint ``[lo, hi]`` pairs covering ``arcs``; touching arcs merge."""
    arcs = sorted(arcs)
    merged: list = []
    for lo, hi in arcs:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return merged


def exclusion_interval(
    old: Point,
    move_dist: float,
    forward: Tuple[float, float],
    obstacle_center: Point,
    clearance: float,
) -> List[AngleInterval]:
    """Directions on the forward semicircle whose destination would intrude on an obstacle.

    A destination conflicts when it lies strictly closer than ``clearance``
    to ``obstacle_center``. The return value is empty when nothing conflicts,
    ``[FULL_SEMICIRCLE]`` when everything does, and otherwise one interval
    (two only when the obstacle sits behind the mover and the conflicting arc
    wraps round the back).
    """
    if move_dist <= 0:
        raise ValueError("move_dist must be > 0")
    out: list = []
    obstacle_arcs(old.x, old.y, forward[0], forward[1], move_dist, obstacle_center.x, obstacle_center.y, clearance, out)
    return [AngleInterval(lo, hi) for lo, hi in out]


def union(intervals: Iterable[AngleInterval]) -> ExclusionSet:
    """Merge intervals into a minimal sorted disjoint cover (touching intervals merge)."""
    merged = merge_arcs([(iv.lo, iv.hi) for iv in intervals])
    return ExclusionSet(tuple(AngleInterval(lo, hi) for lo, hi in merged))


def free_gaps(merged: Sequence[Sequence[float]]) -> List[Tuple[float, float]]:
    """Closed sub-arcs of the semicircle left uncovered by merged ``(lo, hi)`` pairs.

    Interval ends lying on the semicircle edge count as closed there, so a
    blocker clipped at +-90 degrees also removes that edge direction.
    """
    if not merged:
        return [(-HALF_PI, HALF_PI)]
    gaps = []
    if merged[0][0] > -HALF_PI:
        gaps.append((-HALF_PI, merged[0][0]))
    for left, right in zip(merged, merged[1:]):
        gaps.append((left[1], right[0]))
    if merged[-1][1] < HALF_PI:
        gaps.append((merged[-1][1], HALF_PI))
    return gaps


def free_arcs(excluded: ExclusionSet) -> List[Tuple[float, float]]:
    return free_gaps([(iv.lo, iv.hi) for iv in excluded])


def _nearest_in_arcs(arcs: Sequence[Tuple[float, float]], target: float) -> Optional[float]:
    best = None
    best_cost = math.inf
    for a, b in arcs:
        theta = min(max(target, a), b)
        cost = abs(theta - target)
        if cost < best_cost - ANGLE_TOL:
            best, best_cost = theta, cost
        elif abs(cost - best_cost) <= ANGLE_TOL and best is not None and theta < best:
            # equal progress: take the mover's right (negative angle)
            best = theta
    return best


def forward_gap_angle(gaps: Sequence[Tuple[float, float]]) -> Optional[float]:
    return _nearest_in_arcs(gaps, 0.0)


def right_gap_angle(gaps: Sequence[Tuple[float, float]]) -> Optional[float]:
    return _nearest_in_arcs([(a, min(b, 0.0)) for a, b in gaps if a < 0.0], -HALF_PI)


def best_angle(excluded: ExclusionSet) -> Optional[float]:
    """Free direction with the greatest forward progress (max ``cos theta``).

    Ties between ``+theta`` and ``-theta`` go to the mover's right. Returns
    ``None`` when the whole semicircle is blocked.
    """
    return forward_gap_angle(free_arcs(excluded))


def rightmost_angle(excluded: ExclusionSet) -> Optional[float]:
    """Free direction in the right quarter ``[-90deg, 0)`` closest to ``-90deg``."""
    return right_gap_angle(free_arcs(excluded))


def clearance_ok(p: Point, obstacles: Iterable[Tuple[Point, float]], tol: float = DIST_TOL) -> bool:
    """True if ``p`` keeps at least each obstacle's clearance (within ``tol``)."""
    return all(p.distance(c) >= r - tol for c, r in obstacles)


def halfplane_exclusion(
    old: Point,
    move_dist: float,
    forward: Tuple[float, float],
    normal: Tuple[float, float],
    offset: float,
) -> List[AngleInterval]:
    """Directions whose destination ``p`` would violate ``normal . p <= offset``.

    Keeps centers inside a straight wall; landing exactly on the wall is allowed.
    """
    if move_dist <= 0:
        raise ValueError("move_dist must be > 0")
    out: list = []
    wall_arcs(old.x, old.y, forward[0], forward[1], move_dist, normal[0], normal[1], offset, out)
    return [AngleInterval(lo, hi) for lo, hi in out]
