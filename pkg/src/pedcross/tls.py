"""
Signalized-intersection harness: fixed-time versus queue-adaptive signal
control, with and without crossing-time estimates for the walk phases.

Intersection model
------------------
Four approaches (N, S, E, W), each with separate point-queue lanes for the
through, left and right movements. Vehicles arrive by a seeded Poisson
process and leave FIFO at the saturation headway while their movement is
green, after a startup lost time at the start of each green.

Four crosswalks sit on the four legs. The West and East crosswalks walk
together with the north-south green, the North and South crosswalks with the
east-west green. Each crosswalk spans the inbound half of its leg (lanes
entering the intersection) and the outbound half. A vehicle movement drives
over its entry-leg crosswalk in an inbound lane and over its exit-leg
crosswalk in an outbound lane: right turns use the lane by the curb, left
turns the lane by the median, through traffic the lanes in between. A
movement cannot discharge during any second in which a pedestrian is inside
one of the lane bands it uses. During its own green that only holds up
turning vehicles, but pedestrians still on the road when the phase changes
hold up the crossing traffic too.

Pedestrians accumulate on the curbs of each crosswalk. At the start of each
green the controller snapshots the waiting cohort (standing positions and
speeds), fixes the phase length, and releases the cohort into a crossing
simulation. Anyone arriving after that decision waits for the next cycle.
"""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .engine import Cohort, Scenario, estimate_crossing_time, run
from .pedestrians import PedestrianKind, PedestrianType, field_types, sample_base_speed
from .world import CrosswalkLayout, PlacementDistribution, Side, make_layout, sample_initial_positions

log = logging.getLogger(__name__)

APPROACHES = ("N", "S", "E", "W")
TURNS = ("through", "left", "right")
CROSSWALKS = ("N", "S", "E", "W")

# exit leg for each (approach, turn); approach = the leg vehicles arrive from
_EXIT_LEG = {
    ("N", "through"): "S", ("N", "left"): "E", ("N", "right"): "W",
    ("S", "through"): "N", ("S", "left"): "W", ("S", "right"): "E",
    ("E", "through"): "W", ("E", "left"): "S", ("E", "right"): "N",
    ("W", "through"): "E", ("W", "left"): "N", ("W", "right"): "S",
}

Movement = Tuple[str, str]


def crossed_crosswalks(movement: Movement) -> FrozenSet[str]:
    """Crosswalks a vehicle movement drives over (entry and exit legs)."""
    return frozenset({movement[0], _EXIT_LEG[movement]})


# whether the inbound lanes of each leg lie at the low-x end of its crosswalk
_INBOUND_AT_LOW_X = {"W": False, "E": True, "N": True, "S": False}


def conflict_band(movement: Movement, crosswalk: str, layout: CrosswalkLayout, lane_width: float = 3.5):
    """Stretch ``(lo, hi)`` of crosswalk x that ``movement`` drives through."""
    if crosswalk not in crossed_crosswalks(movement):
        raise ValueError(f"{movement} does not cross the {crosswalk} crosswalk")
    entering = movement[0] == crosswalk
    low_half = _INBOUND_AT_LOW_X[crosswalk] == entering
    lane = min(lane_width, layout.length / 6.0)
    mid = layout.center_x
    curb, inward = (layout.near_curb, 1.0) if low_half else (layout.far_curb, -1.0)
    if movement[1] == "right":
        a, b = curb, curb + inward * lane
    elif movement[1] == "left":
        a, b = mid - inward * lane, mid
    else:
        a, b = curb + inward * lane, mid - inward * lane
    return (min(a, b), max(a, b))


class Mode(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    DYNAMIC_WITH_PCS = "dynamic_pcs"


@dataclass(frozen=True)
class Phase:
    duration: float
    vehicle_movements: FrozenSet[Movement] = frozenset()
    pedestrian_crossings: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"phase duration must be > 0, got {self.duration}")

    @property
    def is_clearance(self) -> bool:
        return not self.vehicle_movements

    def conflicts(self) -> List[Tuple[Movement, str]]:
        """(movement, crosswalk) pairs where a green through movement meets a walk signal."""
        return [
            (m, c)
            for m in self.vehicle_movements
            if m[1] == "through"
            for c in self.pedestrian_crossings
            if c in crossed_crosswalks(m)
        ]


def _movements(approaches: Sequence[str]) -> FrozenSet[Movement]:
    return frozenset((a, t) for a in approaches for t in TURNS)


NS_MOVES = _movements(("N", "S"))
EW_MOVES = _movements(("E", "W"))
NS_WALK = frozenset({"W", "E"})
EW_WALK = frozenset({"N", "S"})

#: (vehicle movements, walking crosswalks) of the two green phases, in cycle order
GREEN_PHASES = ((NS_MOVES, NS_WALK), (EW_MOVES, EW_WALK))

STATIC_DURATIONS = (84.0, 3.0, 50.0, 3.0)
YELLOW = 3.0


@dataclass(frozen=True)
class SignalSchedule:
    phases: Tuple[Phase, ...]
    mode: Mode = Mode.STATIC

    @property
    def cycle_length(self) -> float:
        return sum(p.duration for p in self.phases)

    def served_approaches(self) -> FrozenSet[str]:
        return frozenset(m[0] for p in self.phases for m in p.vehicle_movements)

    def validate(self) -> None:
        missing = set(APPROACHES) - self.served_approaches()
        if missing:
            raise ValueError(f"schedule never serves approaches {sorted(missing)}")
        for k, p in enumerate(self.phases):
            if p.is_clearance and p.pedestrian_crossings:
                raise ValueError(f"clearance phase {k} shows a walk signal")
            if p.conflicts():
                raise ValueError(f"phase {k} walks against green traffic: {p.conflicts()}")

    def phase_at(self, t: float) -> Phase:
        """Phase active at time ``t`` when the cycle repeats unchanged from ``t = 0``."""
        t = t % self.cycle_length
        for p in self.phases:
            if t < p.duration:
                return p
            t -= p.duration
        return self.phases[-1]


def static_schedule() -> SignalSchedule:
    """The fixed four-phase, 140 s cycle."""
    g1, y1, g2, y2 = STATIC_DURATIONS
    sched = SignalSchedule(
        (
            Phase(g1, NS_MOVES, NS_WALK),
            Phase(y1),
            Phase(g2, EW_MOVES, EW_WALK),
            Phase(y2),
        ),
        Mode.STATIC,
    )
    sched.validate()
    return sched


@dataclass(frozen=True)
class ControllerParams:
    """Signal-controller and queue-model settings (seconds, s/veh)."""

    discharge_headway: float = 2.0
    startup_lost_time: float = 2.0
    min_green: float = 5.0
    max_green: float = 90.0
    min_walk: float = 7.0
    max_walk: float = 90.0
    fixed_walk: Optional[float] = None
    design_walk_speed: float = 1.07
    safety_margin: float = 3.0
    estimate_runs: int = 10
    lane_width: float = 3.5

    def __post_init__(self):
        if not (0 < self.min_green <= self.max_green):
            raise ValueError("need 0 < min_green <= max_green")
        if not (0 < self.min_walk <= self.max_walk):
            raise ValueError("need 0 < min_walk <= max_walk")
        if self.discharge_headway <= 0 or self.startup_lost_time < 0:
            raise ValueError("discharge_headway must be > 0 and startup_lost_time >= 0")
        if self.fixed_walk is not None and self.fixed_walk <= 0:
            raise ValueError("fixed_walk must be > 0")
        if self.design_walk_speed <= 0 or self.safety_margin < 0 or self.estimate_runs < 1:
            raise ValueError("design_walk_speed > 0, safety_margin >= 0 and estimate_runs >= 1 required")

    def fixed_walk_for(self, layout: CrosswalkLayout) -> float:
        """Walk time of the fixed-time modes.

        ``fixed_walk`` when set; otherwise a ``min_walk`` start interval plus
        curb-to-curb clearance at ``design_walk_speed``.
        """
        if self.fixed_walk is not None:
            return self.fixed_walk
        return self.min_walk + float(math.ceil(layout.length / self.design_walk_speed))


def dynamic_green(
    queue_length: float,
    discharge_headway: float = 2.0,
    startup_lost_time: float = 2.0,
    min_green: float = 5.0,
    max_green: float = 90.0,
) -> float:
    """Green long enough to clear ``queue_length`` vehicles, clamped to the bounds."""
    if queue_length < 0:
        raise ValueError("queue_length must be >= 0")
    need = queue_length * discharge_headway + startup_lost_time
    return float(min(max(need, min_green), max_green))


# -- crosswalk geometry and pedestrian cohorts ---------------------------------

WEST_EAST_LAYOUT = make_layout(3.0, 3.6, 43.62, 0.5)
NORTH_SOUTH_LAYOUT = make_layout(3.0, 6.4, 47.69, 0.5)


def default_crosswalk_layouts() -> Dict[str, CrosswalkLayout]:
    return {"W": WEST_EAST_LAYOUT, "E": WEST_EAST_LAYOUT, "N": NORTH_SOUTH_LAYOUT, "S": NORTH_SOUTH_LAYOUT}


@dataclass
class WaitingPedestrian:
    id: int
    crosswalk: str
    side: Side
    kind: PedestrianKind
    arrival: float
    speed: float


@dataclass(frozen=True)
class CohortSnapshot:
    """Pedestrians standing at one crosswalk when a phase decision is made."""

    layout: CrosswalkLayout
    # per side: ((x, y), ...), (speed, ...), (kind, ...)
    left: Tuple[Tuple[Tuple[float, float], ...], Tuple[float, ...], Tuple[PedestrianKind, ...]] = ((), (), ())
    right: Tuple[Tuple[Tuple[float, float], ...], Tuple[float, ...], Tuple[PedestrianKind, ...]] = ((), (), ())

    @property
    def size(self) -> int:
        return len(self.left[1]) + len(self.right[1])

    def scenario(self, types: Dict[PedestrianKind, PedestrianType], max_steps: int = 600) -> Scenario:
        cohorts = []
        for side, (pos, spd, kinds) in ((Side.RIGHT, self.right), (Side.LEFT, self.left)):
            if not spd:
                continue
            mix = tuple((k, 1) for k in kinds)
            cohorts.append(Cohort(side, len(spd), mix=mix, positions=pos, speeds=spd))
        return Scenario(self.layout, tuple(cohorts), types=types, max_steps=max_steps)


def pedestrian_phase_duration(
    cohort: Optional[CohortSnapshot],
    mode: Mode,
    layout: CrosswalkLayout,
    params: ControllerParams = ControllerParams(),
    types: Optional[Dict[PedestrianKind, PedestrianType]] = None,
) -> float:
    """Walk time to allocate to ``cohort`` waiting at a crosswalk of shape ``layout``.

    The fixed-time modes ignore the cohort. With crossing-time estimates the
    allocation is the estimated cohort time plus the safety margin, clamped
    to ``[min_walk, max_walk]`` but never below the estimate itself.
    """
    if mode is not Mode.DYNAMIC_WITH_PCS:
        return params.fixed_walk_for(layout)
    if cohort is None or cohort.size == 0:
        return params.min_walk
    est = _cohort_outcome(cohort, params.estimate_runs, _types_key(types))[0]
    if est is None:
        log.warning("crossing-time estimate did not complete; allocating max_walk")
        return params.max_walk
    walk = min(max(est + params.safety_margin, params.min_walk), params.max_walk)
    if walk < est:
        # never cut a cohort off mid-road: max_walk only trims the margin
        log.info("cohort needs %.0f s, above max_walk %.0f s", est, params.max_walk)
        walk = est
    return float(walk)


def _types_key(types):
    types = field_types() if types is None else types
    return tuple(sorted(types.items(), key=lambda kv: kv[0].value))


@lru_cache(maxsize=4096)
def _cohort_outcome(cohort: CohortSnapshot, runs: int, types_key):
    """Estimate, finish times and x tracks for a snapshot cohort.

    A snapshot fixes every position and speed, so the estimate's replications
    and the crossing that actually happens are the same run.
    """
    est = estimate_crossing_time(cohort.scenario(dict(types_key)), runs=runs, keep_traces=True)
    summary, trace = est.summaries[0], est.traces[0]
    # unfinished walkers are charged the full run
    finish = tuple(summary.crossing_times.get(i, float(summary.steps)) for i in range(cohort.size))
    tracks: Dict[int, List[Tuple[int, float]]] = {}
    for step, pid, x, *_ in trace.rows:
        tracks.setdefault(pid, []).append((step, x))
    mean = est.mean if est.completed else None
    return mean, finish, tuple(tuple(tracks.get(i, ())) for i in range(cohort.size))


def _band_seconds(tracks, lo: float, hi: float) -> set:
    """Steps during which some walker's path overlaps ``[lo, hi]``."""
    out = set()
    for track in tracks:
        for (k, x0), (_, x1) in zip(track, track[1:]):
            if min(x0, x1) <= hi and max(x0, x1) >= lo:
                out.add(k)
    return out


# -- demand ----------------------------------------------------------------------

FIELD_VEHICLES = 990
FIELD_PEDESTRIANS = 522
FIELD_HORIZON = 3600.0
# trips run between two of the four legs picked at random, so approaches share
# demand equally and each of the other three legs is an equally likely exit
NS_SHARE = 0.5
LEFT_SHARE = 1.0 / 3.0
RIGHT_SHARE = 1.0 / 3.0


@dataclass(frozen=True)
class DemandProfile:
    """Arrival rates over ``horizon`` seconds.

    ``vehicle_rates`` maps approach to veh/s; ``turn_fractions`` maps
    approach to (left, right) shares, the rest goes through.
    ``pedestrian_rates`` maps crosswalk to ped/s, split evenly between the
    two curbs; ``pedestrian_mix`` gives type weights.
    """

    vehicle_rates: Dict[str, float]
    turn_fractions: Dict[str, Tuple[float, float]]
    pedestrian_rates: Dict[str, float]
    horizon: float = FIELD_HORIZON
    pedestrian_mix: Tuple[Tuple[PedestrianKind, float], ...] = ((PedestrianKind.HEALTHY_ADULT, 1.0),)

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be > 0")
        for name, rates in (("vehicle", self.vehicle_rates), ("pedestrian", self.pedestrian_rates)):
            for k, v in rates.items():
                if not (math.isfinite(v) and v >= 0):
                    raise ValueError(f"{name} rate for {k} must be >= 0, got {v}")
        for k, (lf, rf) in self.turn_fractions.items():
            if lf < 0 or rf < 0 or lf + rf > 1:
                raise ValueError(f"turn fractions for {k} must be >= 0 and sum to <= 1")

    def scaled(self, vehicle_factor: float, pedestrian_factor: float) -> "DemandProfile":
        return DemandProfile(
            {k: v * vehicle_factor for k, v in self.vehicle_rates.items()},
            dict(self.turn_fractions),
            {k: v * pedestrian_factor for k, v in self.pedestrian_rates.items()},
            self.horizon,
            self.pedestrian_mix,
        )


def field_demand(
    vehicles: float = FIELD_VEHICLES,
    pedestrians: float = FIELD_PEDESTRIANS,
    horizon: float = FIELD_HORIZON,
) -> DemandProfile:
    """Observed totals spread over the four approaches and crosswalks."""
    ns = vehicles * NS_SHARE / 2.0 / horizon
    ew = vehicles * (1.0 - NS_SHARE) / 2.0 / horizon
    ped = pedestrians / 4.0 / horizon
    return DemandProfile(
        {"N": ns, "S": ns, "E": ew, "W": ew},
        {a: (LEFT_SHARE, RIGHT_SHARE) for a in APPROACHES},
        {c: ped for c in CROSSWALKS},
        horizon,
    )


def zero_demand(horizon: float = FIELD_HORIZON) -> DemandProfile:
    return DemandProfile({a: 0.0 for a in APPROACHES}, {a: (0.0, 0.0) for a in APPROACHES}, {c: 0.0 for c in CROSSWALKS}, horizon)


#: (vehicle factor, pedestrian factor) of the six synthetic demand levels
SYNTHETIC_LEVELS: Dict[str, Tuple[float, float]] = {
    "a": (1.0, 1.0),
    "b": (1.0, 2.0),
    "c": (1.5, 2.5),
    "d": (2.0, 3.0),
    "e": (2.5, 2.0),
    "f": (2.5, 4.0),
}


# -- metrics ---------------------------------------------------------------------


@dataclass
class IntersectionMetrics:
    vehicle_awt: float = 0.0
    pedestrian_awt: float = 0.0
    vehicle_max_wait: float = 0.0
    pedestrian_max_wait: float = 0.0
    vehicle_waits: List[float] = field(default_factory=list, repr=False)
    vehicle_wait_movements: List[Movement] = field(default_factory=list, repr=False)
    pedestrian_waits: List[float] = field(default_factory=list, repr=False)
    vehicles_arrived: int = 0
    vehicles_discharged: int = 0
    vehicles_queued: int = 0
    pedestrians_arrived: int = 0
    pedestrians_released: int = 0
    pedestrians_waiting: int = 0
    stranded_pedestrian_count: int = 0
    mode: str = ""
    seed: int = 0
    phase_log: List[Tuple[float, float, str]] = field(default_factory=list, repr=False)

    def finalize(self) -> "IntersectionMetrics":
        vw, pw = self.vehicle_waits, self.pedestrian_waits
        self.vehicle_awt = float(np.mean(vw)) if vw else 0.0
        self.vehicle_max_wait = float(max(vw)) if vw else 0.0
        self.pedestrian_awt = float(np.mean(pw)) if pw else 0.0
        self.pedestrian_max_wait = float(max(pw)) if pw else 0.0
        return self


def _poisson_arrivals(rate: float, horizon: float, rng: np.random.Generator) -> np.ndarray:
    if rate <= 0:
        return np.empty(0)
    n = rng.poisson(rate * horizon)
    return np.sort(rng.uniform(0.0, horizon, n))


def _pick(weights: Sequence[Tuple[object, float]], rng: np.random.Generator):
    items = [k for k, _ in weights]
    w = np.array([v for _, v in weights], dtype=float)
    return items[int(rng.choice(len(items), p=w / w.sum()))]


def simulate_intersection(
    demand: DemandProfile,
    mode: Mode,
    seed: int = 0,
    params: ControllerParams = ControllerParams(),
    types: Optional[Dict[PedestrianKind, PedestrianType]] = None,
    layouts: Optional[Dict[str, CrosswalkLayout]] = None,
    drain_limit: Optional[float] = None,
) -> IntersectionMetrics:
    """Run the intersection for ``demand.horizon`` seconds of arrivals, then drain.

    Time advances in 1 s ticks. After the arrival horizon the controller
    keeps cycling until every queue is empty and every pedestrian is across,
    or ``drain_limit`` more seconds have passed (default: one more horizon).
    """
    types = field_types() if types is None else types
    tkey = _types_key(types)
    layouts = default_crosswalk_layouts() if layouts is None else layouts
    rng = np.random.default_rng(seed)
    horizon = demand.horizon
    end_limit = horizon + (horizon if drain_limit is None else drain_limit)
    metrics = IntersectionMetrics(mode=mode.value, seed=seed)

    # vehicles: arrival times per movement lane
    lanes: Dict[Movement, List[float]] = {}
    for a in APPROACHES:
        times = _poisson_arrivals(demand.vehicle_rates.get(a, 0.0), horizon, rng)
        lf, rf = demand.turn_fractions.get(a, (0.0, 0.0))
        u = rng.uniform(size=len(times))
        turn = np.where(u < lf, 1, np.where(u < lf + rf, 2, 0))
        for k, t in enumerate(TURNS):
            lanes[(a, t)] = list(times[turn == k])
    metrics.vehicles_arrived = sum(len(v) for v in lanes.values())
    heads = {m: 0 for m in lanes}
    next_free = {m: 0.0 for m in lanes}

    # pedestrians
    peds: List[WaitingPedestrian] = []
    for c in CROSSWALKS:
        for t in _poisson_arrivals(demand.pedestrian_rates.get(c, 0.0), horizon, rng):
            side = Side.LEFT if rng.uniform() < 0.5 else Side.RIGHT
            kind = _pick(demand.pedestrian_mix, rng)
            peds.append(WaitingPedestrian(len(peds), c, side, kind, float(t), sample_base_speed(types[kind], rng)))
    peds.sort(key=lambda p: p.arrival)
    metrics.pedestrians_arrived = len(peds)
    next_ped = 0
    waiting: Dict[str, List[WaitingPedestrian]] = {c: [] for c in CROSSWALKS}
    # seconds in which each movement is held up by walkers in its lane band
    blocked: Dict[Movement, set] = {m: set() for m in lanes}
    last_finish = 0.0

    def work_left(t: float) -> bool:
        if t < horizon:
            return True
        if any(heads[m] < len(lanes[m]) for m in lanes):
            return True
        if next_ped < len(peds) or any(waiting.values()):
            return True
        return last_finish > t

    t = 0.0
    while work_left(t) and t < end_limit:
        for movements, walks in GREEN_PHASES:
            # admit pedestrians who arrived before the decision
            while next_ped < len(peds) and peds[next_ped].arrival <= t:
                p = peds[next_ped]
                waiting[p.crosswalk].append(p)
                next_ped += 1
            snaps = {c: _snapshot(waiting[c], layouts[c], types, rng) for c in sorted(walks)}
            if mode is Mode.STATIC:
                duration = STATIC_DURATIONS[0] if movements is NS_MOVES else STATIC_DURATIONS[2]
            else:
                duration = _adaptive_duration(lanes, heads, movements, walks, snaps, layouts, t, mode, params, types)
            duration = float(math.ceil(duration))
            metrics.phase_log.append((t, duration, "NS" if movements is NS_MOVES else "EW"))

            # release the snapshot cohorts
            for c in sorted(walks):
                cohort = waiting[c]
                if not cohort:
                    continue
                _, finish, tracks = _cohort_outcome(snaps[c], params.estimate_runs, tkey)
                ordered = [p for p in cohort if p.side is Side.RIGHT] + [p for p in cohort if p.side is Side.LEFT]
                for p, ft in zip(ordered, finish):
                    metrics.pedestrian_waits.append(t - p.arrival)
                    metrics.pedestrians_released += 1
                    last_finish = max(last_finish, t + ft)
                    if ft > duration:
                        metrics.stranded_pedestrian_count += 1
                for m in lanes:
                    if c in crossed_crosswalks(m):
                        lo, hi = conflict_band(m, c, layouts[c], params.lane_width)
                        blocked[m].update(int(t) + k for k in _band_seconds(tracks, lo, hi))
                waiting[c] = []

            _discharge(lanes, heads, next_free, movements, blocked, t, t + duration, params, metrics)
            t += duration
            t += YELLOW

    metrics.vehicles_queued = sum(len(lanes[m]) - heads[m] for m in lanes)
    metrics.vehicles_discharged = len(metrics.vehicle_waits)
    metrics.pedestrians_waiting = len(peds) - metrics.pedestrians_released
    return metrics.finalize()


def _queued(lane: List[float], head: int, t: float) -> int:
    return sum(1 for x in lane[head:] if x <= t)


def _adaptive_duration(lanes, heads, movements, walks, snaps, layouts, t, mode, params, types) -> float:
    """Longer of the green that clears the longest queue and the walk allocation."""
    queue = max((_queued(lanes[m], heads[m], t) for m in movements), default=0)
    green = dynamic_green(queue, params.discharge_headway, params.startup_lost_time, params.min_green, params.max_green)
    walk = max(pedestrian_phase_duration(snaps[c], mode, layouts[c], params, types) for c in sorted(walks))
    return max(green, walk)


def _snapshot(cohort: List[WaitingPedestrian], layout: CrosswalkLayout, types, rng) -> CohortSnapshot:
    if not cohort:
        return CohortSnapshot(layout)
    sides = {}
    occupied: list = []
    for side in (Side.RIGHT, Side.LEFT):
        members = [p for p in cohort if p.side is side]
        if not members:
            sides[side] = ((), (), ())
            continue
        radii = [types[p.kind].min_radius for p in members]
        pos = sample_initial_positions(
            layout, side, len(members), PlacementDistribution.NORMAL, rng, radii=radii, occupied=occupied
        )
        occupied.extend(zip(pos, radii))
        sides[side] = (
            tuple((p.x, p.y) for p in pos),
            tuple(p.speed for p in members),
            tuple(p.kind for p in members),
        )
    return CohortSnapshot(layout, left=sides[Side.LEFT], right=sides[Side.RIGHT])


def _discharge(lanes, heads, next_free, green, blocked, t0, t1, params, metrics) -> None:
    """Serve the green lanes over ``[t0, t1)``: FIFO, at most one vehicle per headway."""
    start = t0 + params.startup_lost_time
    for m in sorted(green):
        lane, h = lanes[m], heads[m]
        free = max(next_free[m], start)
        while h < len(lane):
            depart = max(free, lane[h])
            while int(depart) in blocked[m] and depart < t1:
                depart = math.floor(depart) + 1.0
            if depart >= t1:
                break
            metrics.vehicle_waits.append(depart - lane[h])
            metrics.vehicle_wait_movements.append(m)
            h += 1
            free = depart + params.discharge_headway
        heads[m] = h
        next_free[m] = free


# -- comparison ------------------------------------------------------------------


@dataclass
class ModeComparison:
    mode: str
    seeds: List[int]
    vehicle_awt: float
    vehicle_awt_sd: float
    pedestrian_awt: float
    pedestrian_awt_sd: float
    vehicle_max_wait: float
    pedestrian_max_wait: float
    stranded_pedestrians: int
    per_seed: List[IntersectionMetrics] = field(repr=False, default_factory=list)


def compare_modes(
    demand: DemandProfile,
    seeds: Sequence[int],
    modes: Sequence[Mode] = tuple(Mode),
    params: ControllerParams = ControllerParams(),
) -> List[ModeComparison]:
    """Per-mode means and across-seed standard deviations."""
    if not seeds:
        raise ValueError("need at least one seed")
    rows = []
    for mode in modes:
        ms = [simulate_intersection(demand, mode, s, params) for s in seeds]
        va = np.array([m.vehicle_awt for m in ms])
        pa = np.array([m.pedestrian_awt for m in ms])
        rows.append(
            ModeComparison(
                mode.value,
                list(seeds),
                float(va.mean()),
                float(va.std()),
                float(pa.mean()),
                float(pa.std()),
                float(max(m.vehicle_max_wait for m in ms)),
                float(max(m.pedestrian_max_wait for m in ms)),
                int(sum(m.stranded_pedestrian_count for m in ms)),
                ms,
            )
        )
    return rows


def demand_level_grid(
    base: DemandProfile,
    seeds: Sequence[int],
    levels: Optional[Dict[str, Tuple[float, float]]] = None,
    modes: Sequence[Mode] = tuple(Mode),
    params: ControllerParams = ControllerParams(),
) -> Dict[str, List[ModeComparison]]:
    """:func:`compare_modes` at each scaled demand level."""
    levels = SYNTHETIC_LEVELS if levels is None else levels
    return {name: compare_modes(base.scaled(vf, pf), seeds, modes, params) for name, (vf, pf) in levels.items()}


def write_waiting_times(metrics: Sequence[IntersectionMetrics], path) -> None:
    """Per-agent waiting times as CSV (``mode,seed,population,wait_s``)."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mode", "seed", "population", "wait_s"])
            for m in metrics:
                for x in m.vehicle_waits:
                    w.writerow([m.mode, m.seed, "vehicle", f"{x:.6f}"])
                for x in m.pedestrian_waits:
                    w.writerow([m.mode, m.seed, "pedestrian", f"{x:.6f}"])
    except OSError as exc:
        raise OSError(f"could not write waiting times to {path}: {exc}") from exc
