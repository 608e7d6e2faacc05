"""Pedestrian types, speed sampling and the coupled speed/radius reduction."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .geometry import Point
from .world import Side


class PedestrianKind(enum.Enum):
    HEALTHY_ADULT = "healthy_adult"
    ELDER = "elder"
    CHILD = "child"
    CRUTCHES_USER = "crutches_user"
    WHEELCHAIR_USER = "wheelchair_user"


class State(enum.Enum):
    WAITING = "waiting"
    CROSSING = "crossing"
    REENTERING = "reentering"
    STUCK_TILTING = "stuck_tilting"
    DONE = "done"


def speed_params_from_bounds(max_speed: float, min_speed: float):
    """Solve ``max = mu + 3 sigma`` and ``min = mu - 3 sigma`` for ``(mu, sigma)``."""
    if not max_speed > min_speed:
        raise ValueError(f"max_speed ({max_speed}) must exceed min_speed ({min_speed})")
    return 0.5 * (max_speed + min_speed), (max_speed - min_speed) / 6.0


@dataclass(frozen=True)
class PedestrianType:
    """Speed distribution and occupied-circle radii for one class of pedestrian.

    ``min_speed``/``max_speed`` are the 3-sigma bounds around ``mu_speed``.
    ``max_radius`` is the walking radius at full speed and ``min_radius`` the
    standing radius.
    """

    kind: PedestrianKind
    mu_speed: float
    sigma_speed: float
    max_radius: float
    min_radius: float

    def __post_init__(self):
        if self.sigma_speed < 0 or self.mu_speed <= 0:
            raise ValueError(f"invalid speed parameters for {self.kind.value}")
        if self.min_speed < 0:
            raise ValueError(f"{self.kind.value}: mu - 3 sigma must be >= 0")
        if not (self.max_radius >= self.min_radius > 0):
            raise ValueError(f"{self.kind.value}: need max_radius >= min_radius > 0")

    @classmethod
    def from_bounds(cls, kind, max_speed, min_speed, max_radius, min_radius):
        mu, sigma = speed_params_from_bounds(max_speed, min_speed)
        return cls(kind, mu, sigma, max_radius, min_radius)

    @property
    def max_speed(self) -> float:
        return self.mu_speed + 3.0 * self.sigma_speed

    @property
    def min_speed(self) -> float:
        return self.mu_speed - 3.0 * self.sigma_speed


#: Observed adult speed distribution, in m/s.
FIELD_SPEED_MU = 1.2676
FIELD_SPEED_SIGMA = 0.09167

# Engineering defaults, not field measurements; only the adult speed
# distribution above was observed.
GENERIC_ADULT = PedestrianType(PedestrianKind.HEALTHY_ADULT, FIELD_SPEED_MU, FIELD_SPEED_SIGMA, 0.30, 0.20)

#: Field adult preset. The radii are fitted so that replicated crowd
#: crossings match observed cohort times: a tight standing footprint and a
#: wide walking one (personal space grows with pace).
FIELD_ADULT = PedestrianType(PedestrianKind.HEALTHY_ADULT, FIELD_SPEED_MU, FIELD_SPEED_SIGMA, 0.75, 0.12)

DEFAULT_TYPES: Dict[PedestrianKind, PedestrianType] = {
    PedestrianKind.HEALTHY_ADULT: GENERIC_ADULT,
    PedestrianKind.ELDER: PedestrianType.from_bounds(PedestrianKind.ELDER, 1.30, 0.70, 0.30, 0.20),
    PedestrianKind.CHILD: PedestrianType.from_bounds(PedestrianKind.CHILD, 1.40, 0.80, 0.25, 0.15),
    PedestrianKind.CRUTCHES_USER: PedestrianType.from_bounds(
        PedestrianKind.CRUTCHES_USER, 0.90, 0.45, 0.40, 0.40
    ),
    PedestrianKind.WHEELCHAIR_USER: PedestrianType.from_bounds(
        PedestrianKind.WHEELCHAIR_USER, 0.80, 0.30, 0.45, 0.45
    ),
}


def sample_base_speed(ptype: PedestrianType, rng: np.random.Generator) -> float:
    # exactly one normal draw per pedestrian, tails clamped rather than resampled
    v = ptype.mu_speed + ptype.sigma_speed * rng.standard_normal()
    return float(min(max(v, ptype.min_speed), ptype.max_speed))


def reduce_linear(top: float, bottom: float, i: float) -> float:
    """``top - (top - bottom) * i%``, shared by the speed and radius schedules."""
    if not 0 <= i <= 100:
        raise ValueError(f"reduction index must be in [0, 100], got {i}")
    return top - (top - bottom) * (i / 100.0)


@dataclass
class Pedestrian:
    id: int
    ptype: PedestrianType
    side: Side
    position: Point
    base_speed: float
    reduction_i: float = 0.0
    stuck_count: int = 0
    state: State = State.WAITING
    radius: Optional[float] = None
    crossing_start_step: Optional[int] = 0
    crossing_end_step: Optional[int] = None
    own_speed_ceiling: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.radius is None:
            self.radius = self.ptype.min_radius

    @property
    def forward(self):
        return self.side.forward

    @property
    def speed_ceiling(self) -> float:
        """Top of the reduction schedule: own base speed, or the type-wide maximum."""
        return self.base_speed if self.own_speed_ceiling else self.ptype.max_speed

    def speed_at(self, i: float) -> float:
        return reduce_linear(self.speed_ceiling, self.ptype.min_speed, i)

    def radius_at(self, i: float) -> float:
        return reduce_linear(self.ptype.max_radius, self.ptype.min_radius, i)

    @property
    def done(self) -> bool:
        return self.state is State.DONE


def effective_speed(ped: Pedestrian) -> float:
    return ped.speed_at(ped.reduction_i)


def effective_radius(ped: Pedestrian) -> float:
    """Walking radius at the pedestrian's reduction index; standing pedestrians use the minimum."""
    if ped.state is State.WAITING:
        return ped.ptype.min_radius
    return ped.radius_at(ped.reduction_i)


def field_types() -> Dict[PedestrianKind, PedestrianType]:
    """Default type table with the adult entry swapped for :data:`FIELD_ADULT`."""
    types = dict(DEFAULT_TYPES)
    types[PedestrianKind.HEALTHY_ADULT] = FIELD_ADULT
    return types
