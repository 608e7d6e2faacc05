"""
Crosswalk frame, waiting areas and initial placement.

The crosswalk occupies ``[beta, beta + L] x [0, W]``; buffer strips of
width ``buffer`` run along both long edges, and pedestrians may only walk
inside ``[beta, beta + L] x [-buffer, W + buffer]``. Waiting areas are the
``beta``-deep rectangles on either curb.

Placement
---------
Lateral positions follow ``N(W/2, W/4)`` (the crosswalk width spans 4 sigma).
The depth behind the curb is ``|offset|`` with ``offset ~ N(0, beta / k)``.
With y fixed like that, the joint probability of standing inside the waiting
area can never exceed ``P(|z| < 2) = 0.9545``; ``k = 3`` (the default,
:data:`OFFSET_SIGMAS`) gives ``0.9545 * 0.9973 = 0.9519``, the 95.5% target
to within 0.004. ``Poisson`` and ``T`` placement reuse the same means and
standard deviations with a standardized Poisson count (``lam = 4``) or a
Student-t variate (``nu = 5``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from .geometry import DIST_TOL, Point

#: Waiting-area depth expressed in offset standard deviations.
OFFSET_SIGMAS = 3.0
POISSON_LAMBDA = 4.0
T_DOF = 5.0

MAX_RESAMPLES = 100
MAX_TOTAL_FAILURES = 1000
MAX_SPIRAL_PROBES = 20000
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class LayoutError(ValueError):
    """Invalid crosswalk dimensions."""


class CapacityError(RuntimeError):
    """Waiting area could not hold the requested pedestrians without overlap."""


class Side(enum.Enum):
    LEFT = "left"  # west curb, walks +x
    RIGHT = "right"  # east curb, walks -x

    @property
    def forward(self):
        return (1.0, 0.0) if self is Side.LEFT else (-1.0, 0.0)

    @property
    def label(self) -> str:
        return "W2E" if self is Side.LEFT else "E2W"


class PlacementDistribution(enum.Enum):
    NORMAL = "normal"
    POISSON = "poisson"
    T = "t"


@dataclass(frozen=True)
class CrosswalkLayout:
    beta: float
    width: float
    length: float
    buffer: float

    @property
    def y_min(self) -> float:
        return -self.buffer

    @property
    def y_max(self) -> float:
        return self.width + self.buffer

    @property
    def near_curb(self) -> float:
        return self.beta

    @property
    def far_curb(self) -> float:
        return self.beta + self.length

    @property
    def center_x(self) -> float:
        return self.beta + 0.5 * self.length

    def crosswalk_rect(self):
        return (self.beta, 0.0, self.beta + self.length, self.width)

    def motion_rect(self):
        return (self.beta, self.y_min, self.beta + self.length, self.y_max)

    def curb_x(self, side: Side) -> float:
        """x of the curb a pedestrian from ``side`` starts at."""
        return self.near_curb if side is Side.LEFT else self.far_curb

    def goal_x(self, side: Side) -> float:
        return self.far_curb if side is Side.LEFT else self.near_curb


def make_layout(beta: float, width: float, length: float, buffer: float) -> CrosswalkLayout:
    """Validated :class:`CrosswalkLayout`; every dimension must be finite and > 0."""
    for name, value in (("beta", beta), ("width", width), ("length", length), ("buffer", buffer)):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise LayoutError(f"{name} must be a positive number of meters, got {value!r}")
    return CrosswalkLayout(float(beta), float(width), float(length), float(buffer))


def _standard_draws(dist: PlacementDistribution, rng: np.random.Generator, size):
    """Zero-mean, unit-variance draws of the requested family."""
    if dist is PlacementDistribution.NORMAL:
        return rng.standard_normal(size)
    if dist is PlacementDistribution.POISSON:
        return (rng.poisson(POISSON_LAMBDA, size) - POISSON_LAMBDA) / math.sqrt(POISSON_LAMBDA)
    if dist is PlacementDistribution.T:
        return rng.standard_t(T_DOF, size) * math.sqrt((T_DOF - 2.0) / T_DOF)
    raise ValueError(f"unknown placement distribution {dist!r}")


def draw_raw_positions(
    layout: CrosswalkLayout,
    side: Side,
    n: int,
    dist: PlacementDistribution,
    rng: np.random.Generator,
) -> np.ndarray:
    """``(n, 2)`` array of standing positions before overlap resolution."""
    z = _standard_draws(dist, rng, (n, 2))
    y = 0.5 * layout.width + 0.25 * layout.width * z[:, 0]
    depth = np.abs(z[:, 1]) * (layout.beta / OFFSET_SIGMAS)
    if side is Side.LEFT:
        x = layout.near_curb - depth
    else:
        x = layout.far_curb + depth
    return np.column_stack([x, y])


def _clamp_to_curb(layout: CrosswalkLayout, side: Side, x: float) -> float:
    # nobody starts on the roadway
    if side is Side.LEFT:
        return min(x, layout.near_curb)
    return max(x, layout.far_curb)


def sample_initial_positions(
    layout: CrosswalkLayout,
    side: Side,
    n: int,
    dist: PlacementDistribution,
    rng: np.random.Generator,
    radii: Union[float, Sequence[float]] = 0.2,
    occupied: Sequence[tuple] = (),
    explicit: Optional[Sequence[Sequence[float]]] = None,
) -> List[Point]:
    """Non-overlapping standing positions for ``n`` pedestrians on ``side``.

    ``radii`` are the standing radii (scalar or one per pedestrian).
    ``occupied`` holds ``(Point, radius)`` pairs already placed, e.g. by an
    earlier cohort. Explicit positions bypass sampling entirely.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if explicit is not None:
        if len(explicit) != n:
            raise ValueError(f"expected {n} explicit positions, got {len(explicit)}")
        return [Point(float(x), float(y)) for x, y in explicit]
    if n == 0:
        return []
    rs = [float(radii)] * n if np.isscalar(radii) else [float(r) for r in radii]
    placed: List[tuple] = list(occupied)
    out: List[Point] = []
    failures = 0

    def fits(p: Point, r: float) -> bool:
        return all(p.distance(q) >= r + rq - DIST_TOL for q, rq in placed)

    for k in range(n):
        r = rs[k]
        p = None
        cand = None
        tries = MAX_RESAMPLES if failures < MAX_TOTAL_FAILURES else 1
        for _ in range(tries):
            x, y = draw_raw_positions(layout, side, 1, dist, rng)[0]
            cand = Point(_clamp_to_curb(layout, side, x), float(y))
            if fits(cand, r):
                p = cand
                break
            failures += 1
        if p is None:
            # deterministic spiral out from the last rejected draw
            origin = cand
            for probe in range(1, MAX_SPIRAL_PROBES + 1):
                rho = 0.5 * r * math.sqrt(probe)
                ang = probe * _GOLDEN_ANGLE
                cand = Point(
                    _clamp_to_curb(layout, side, origin.x + rho * math.cos(ang)),
                    origin.y + rho * math.sin(ang),
                )
                if fits(cand, r):
                    p = cand
                    break
            else:
                raise CapacityError(
                    f"could not place {n} pedestrians on the {side.value} side "
                    f"(placed {k}, {failures} rejected draws)"
                )
        placed.append((p, r))
        out.append(p)
    return out


def in_motion_area(layout: CrosswalkLayout, p: Point) -> bool:
    return (
        layout.near_curb <= p.x <= layout.far_curb
        and layout.y_min <= p.y <= layout.y_max
    )


def in_lateral_band(layout: CrosswalkLayout, p: Point) -> bool:
    """Whether ``p.y`` is within the crosswalk plus buffers (x unrestricted)."""
    return layout.y_min <= p.y <= layout.y_max


def has_crossed(layout: CrosswalkLayout, p: Point, side: Side) -> bool:
    if side is Side.LEFT:
        return p.x >= layout.far_curb
    return p.x <= layout.near_curb


def progress(layout: CrosswalkLayout, p: Point, side: Side) -> float:
    """Distance travelled toward the far curb, measured from the near curb."""
    if side is Side.LEFT:
        return p.x - layout.near_curb
    return layout.far_curb - p.x


def reentry_step(layout: CrosswalkLayout, p: Point, speed: float, step_len: float) -> Point:
    """Move straight back toward the walkable band (pure y motion)."""
    if in_lateral_band(layout, p):
        raise ValueError(f"reentry_step called for {p}, which is already inside the band")
    reach = speed * step_len
    if p.y > layout.y_max:
        return Point(p.x, max(layout.y_max, p.y - reach))
    return Point(p.x, min(layout.y_min, p.y + reach))
