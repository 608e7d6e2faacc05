"""
Discrete-step crossing simulation.

Each step, every direction is processed in turn (the leading direction
alternates between steps) and, within a direction, pedestrians move in order
of descending progress. A mover first tries its full speed and walking
radius; if every direction on its forward semicircle is blocked it retries
with the reduction index raised by ``i_increment`` until ``i = 100``, then
gives up for this step. Three consecutive failures trigger a rightward tilt.
"""

from __future__ import annotations

import logging
import math
from math import acos, atan2, hypot
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernel
from . import geometry as geo
from .geometry import DIST_TOL, HALF_PI, Point
from .pedestrians import (
    DEFAULT_TYPES,
    Pedestrian,
    PedestrianKind,
    PedestrianType,
    State,
    sample_base_speed,
)
from .world import (
    CrosswalkLayout,
    PlacementDistribution,
    Side,
    has_crossed,
    in_lateral_band,
    progress,
    sample_initial_positions,
)

log = logging.getLogger(__name__)

STUCK_LIMIT = 3

_FULL = (-geo.HALF_PI, geo.HALF_PI)
_WRAP = 1.5 * math.pi


class OverlapError(RuntimeError):
    """Two occupied circles overlap after a step; indicates an engine bug."""


@dataclass(frozen=True)
class Cohort:
    """Pedestrians waiting on one curb.

    ``mix`` maps pedestrian kinds to counts; if omitted, everyone is a
    healthy adult. ``positions`` overrides sampled standing positions.
    """

    side: Side
    count: int
    mix: Optional[Tuple[Tuple[PedestrianKind, int], ...]] = None
    positions: Optional[Tuple[Tuple[float, float], ...]] = None
    speeds: Optional[Tuple[float, ...]] = None

    def kinds(self) -> List[PedestrianKind]:
        if self.mix is None:
            return [PedestrianKind.HEALTHY_ADULT] * self.count
        out = [k for k, c in self.mix for _ in range(c)]
        if len(out) != self.count:
            raise ValueError(f"type mix sums to {len(out)}, cohort count is {self.count}")
        return out


@dataclass(frozen=True)
class Scenario:
    layout: CrosswalkLayout
    cohorts: Tuple[Cohort, ...]
    placement: PlacementDistribution = PlacementDistribution.NORMAL
    types: Dict[PedestrianKind, PedestrianType] = field(default_factory=lambda: dict(DEFAULT_TYPES))
    step_len: float = 1.0
    seed: int = 0
    max_steps: int = 600
    i_increment: float = 10.0
    own_speed_ceiling: bool = True
    alternate_directions: bool = True

    def __post_init__(self):
        if not self.step_len > 0:
            raise ValueError("step_len must be > 0")
        if not self.max_steps > 0:
            raise ValueError("max_steps must be > 0")
        if not 0 < self.i_increment <= 100:
            raise ValueError("i_increment must be in (0, 100]")

    @property
    def n_pedestrians(self) -> int:
        return sum(c.count for c in self.cohorts)

    @property
    def is_deterministic(self) -> bool:
        """True when every standing position and base speed is given explicitly."""
        return all(c.positions is not None and c.speeds is not None for c in self.cohorts)

    def reduction_schedule(self) -> List[float]:
        sched = []
        i = 0.0
        while i < 100.0 - 1e-9:
            sched.append(i)
            i += self.i_increment
        sched.append(100.0)
        return sched


# (step, ped_id, x, y, speed, radius, state)
TraceRow = Tuple[int, int, float, float, float, float, str]


@dataclass
class SimulationTrace:
    rows: List[TraceRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self) -> Iterator[TraceRow]:
        return iter(self.rows)


@dataclass
class RunSummary:
    cohort_crossing_time: float
    crossing_times: Dict[int, float]
    no_move_fraction: float
    stuck_tilt_events: int
    completed: bool
    steps: int
    seed: int
    agent_steps: int = 0
    no_move_steps: int = 0


def try_move(
    ped: Pedestrian,
    neighbors: Sequence[Pedestrian],
    layout: CrosswalkLayout,
    step_len: float,
    schedule: Sequence[float],
    tilt_right: bool = False,
) -> Optional[Tuple[Point, float]]:
    """Best reachable position and the reduction index used, or ``None`` if blocked at every index.

    Normally picks the free direction with the most forward progress; with
    ``tilt_right`` it picks the free direction nearest the mover's right.
    """
    dists = np.array([ped.speed_at(i) * step_len for i in schedule])
    radii = np.array([ped.radius_at(i) for i in schedule])
    n = len(neighbors)
    qx = np.empty(n)
    qy = np.empty(n)
    qr = np.empty(n)
    for j, nb in enumerate(neighbors):
        qx[j] = nb.position.x
        qy[j] = nb.position.y
        qr[j] = nb.radius
    fx, fy = ped.forward
    mode = _kernel.MODE_RIGHT if tilt_right else _kernel.MODE_FORWARD
    lev, x, y = _kernel.search(
        ped.position.x, ped.position.y, fx, fy, dists, radii, qx, qy, qr, np.ones(n, dtype=np.bool_),
        layout.y_min, layout.y_max, mode,
    )
    if lev < 0:
        return None
    return Point(x, y), schedule[lev]


def try_move_reference(
    ped: Pedestrian,
    neighbors: Sequence[Pedestrian],
    layout: CrosswalkLayout,
    step_len: float,
    schedule: Sequence[float],
    tilt_right: bool = False,
) -> Optional[Tuple[Point, float]]:
    """Uncompiled twin of :func:`try_move`, kept as the readable reference."""
    chooser = geo.right_gap_angle if tilt_right else geo.forward_gap_angle
    ox, oy = ped.position.x, ped.position.y
    fx, fy = ped.forward
    y_lo, y_hi = layout.y_min, layout.y_max
    others = [(nb.position.x, nb.position.y, nb.radius) for nb in neighbors]
    straight_first = chooser is geo.forward_gap_angle
    for i in schedule:
        dist = ped.speed_at(i) * step_len
        if dist <= 0:
            continue
        r = ped.radius_at(i)
        blockers = []
        for qx, qy, qr in others:
            c = r + qr
            if hypot(qx - ox, qy - oy) <= dist + c + DIST_TOL:
                blockers.append((qx, qy, c))
        if straight_first:
            # straight ahead is optimal whenever it is admissible
            sx, sy = ox + dist * fx, oy + dist * fy
            if y_lo <= sy <= y_hi and all(math.hypot(sx - qx, sy - qy) >= c for qx, qy, c in blockers):
                return Point(sx, sy), i
        arcs: list = []
        geo.wall_arcs(ox, oy, fx, fy, dist, 0.0, 1.0, y_hi, arcs)
        geo.wall_arcs(ox, oy, fx, fy, dist, 0.0, -1.0, -y_lo, arcs)
        # inlined geo.obstacle_arcs: this loop dominates the run time
        d2 = dist * dist
        for qx, qy, c in blockers:
            rx = qx - ox
            ry = qy - oy
            a = rx * fx + ry * fy
            b = ry * fx - rx * fy
            dd = hypot(a, b)
            if dd <= DIST_TOL:
                if dist <= c + DIST_TOL:
                    arcs.append(_FULL)
                continue
            k = (d2 + dd * dd - c * c) / (2.0 * dist * dd)
            if k >= 1.0:
                continue
            if k <= -1.0:
                arcs.append(_FULL)
                continue
            phi = atan2(b, a)
            half = acos(k)
            lo = phi - half
            hi = phi + half
            if lo < -_WRAP:
                geo._clip_arc(lo, hi, arcs)
            elif hi > _WRAP:
                geo._clip_arc(lo, hi, arcs)
            else:
                if lo < -HALF_PI:
                    lo = -HALF_PI
                if hi > HALF_PI:
                    hi = HALF_PI
                if lo < hi:
                    arcs.append((lo, hi))
        theta = chooser(geo.free_gaps(geo.merge_arcs(arcs)))
        if theta is None:
            continue
        cs, sn = math.cos(theta), math.sin(theta)
        nx = ox + dist * (cs * fx - sn * fy)
        ny = oy + dist * (cs * fy + sn * fx)
        if not all(math.hypot(nx - qx, ny - qy) >= c - DIST_TOL for qx, qy, c in blockers):
            # arccos round-off at a tangency; treat this index as blocked
            log.debug("rejected near-tangent candidate for ped %s at i=%s", ped.id, i)
            continue
        return Point(nx, ny), i
    return None


def resolve_stuck(
    ped: Pedestrian,
    neighbors: Sequence[Pedestrian],
    layout: CrosswalkLayout,
    step_len: float,
    schedule: Sequence[float],
) -> Optional[Tuple[Point, float]]:
    """Tilt-right attempt for a pedestrian blocked for several steps."""
    return try_move(ped, neighbors, layout, step_len, schedule, tilt_right=True)


def _reentry(
    ped: Pedestrian,
    neighbors: Sequence[Pedestrian],
    layout: CrosswalkLayout,
    step_len: float,
    schedule: Sequence[float],
) -> Optional[Tuple[Point, float]]:
    p = ped.position
    target = layout.y_max if p.y > layout.y_max else layout.y_min
    gap = abs(p.y - target)
    sign = 1.0 if target > p.y else -1.0
    for i in schedule:
        dist = min(ped.speed_at(i) * step_len, gap)
        r = ped.radius_at(i)
        cand = Point(p.x, p.y + sign * dist) if dist < gap else Point(p.x, target)
        if geo.clearance_ok(cand, [(nb.position, r + nb.radius) for nb in neighbors]):
            return cand, i
    return None


class Simulation:
    """Mutable world state for one run of a :class:`Scenario`."""

    def __init__(self, scenario: Scenario, peds: List[Pedestrian], seed: int = 0):
        self.scenario = scenario
        self.layout = scenario.layout
        self.seed = seed
        self.peds = peds
        self.live: Dict[int, Pedestrian] = {p.id: p for p in peds}
        self.step_index = 0
        self.schedule = scenario.reduction_schedule()
        self.trace = SimulationTrace()
        self.agent_steps = 0
        self.no_move_steps = 0
        self.stuck_tilt_events = 0
        n = len(peds)
        # flat state indexed by pedestrian id, fed straight to the compiled search
        self.px = np.array([p.position.x for p in peds], dtype=float)
        self.py = np.array([p.position.y for p in peds], dtype=float)
        self.pr = np.array([p.radius for p in peds], dtype=float)
        self.alive = np.ones(n, dtype=np.bool_)
        self._levels = [
            (
                np.array([p.speed_at(i) * scenario.step_len for i in self.schedule]),
                np.array([p.radius_at(i) for i in self.schedule]),
            )
            for p in peds
        ]
        self._record(speeds={})

    @classmethod
    def from_scenario(cls, scenario: Scenario, seed: Optional[int] = None) -> "Simulation":
        seed = scenario.seed if seed is None else seed
        rng = np.random.default_rng(seed)
        peds: List[Pedestrian] = []
        occupied: List[Tuple[Point, float]] = []
        for cohort in scenario.cohorts:
            kinds = cohort.kinds()
            ptypes = [scenario.types[k] for k in kinds]
            if cohort.speeds is not None:
                speeds = [float(v) for v in cohort.speeds]
            else:
                speeds = [sample_base_speed(t, rng) for t in ptypes]
            positions = sample_initial_positions(
                scenario.layout,
                cohort.side,
                cohort.count,
                scenario.placement,
                rng,
                radii=[t.min_radius for t in ptypes],
                occupied=occupied,
                explicit=cohort.positions,
            )
            for t, v, pos in zip(ptypes, speeds, positions):
                ped = Pedestrian(
                    id=len(peds),
                    ptype=t,
                    side=cohort.side,
                    position=pos,
                    base_speed=v,
                    own_speed_ceiling=scenario.own_speed_ceiling,
                )
                peds.append(ped)
                occupied.append((pos, t.min_radius))
        return cls(scenario, peds, seed)

    # -- stepping -----------------------------------------------------------

    def _neighbors(self, ped: Pedestrian) -> List[Pedestrian]:
        return [self.live[j] for j in np.flatnonzero(self.alive) if j != ped.id]

    def _search(self, ped: Pedestrian, mode: int) -> Optional[Tuple[Point, float]]:
        dists, radii = self._levels[ped.id]
        active = self.alive.copy()
        active[ped.id] = False
        fx, fy = ped.forward
        lev, x, y = _kernel.search(
            ped.position.x, ped.position.y, fx, fy, dists, radii,
            self.px, self.py, self.pr, active, self.layout.y_min, self.layout.y_max, mode,
        )
        if lev < 0:
            return None
        return Point(x, y), self.schedule[lev]

    def _direction_order(self) -> List[Side]:
        if self.scenario.alternate_directions and self.step_index % 2 == 1:
            return [Side.RIGHT, Side.LEFT]
        return [Side.LEFT, Side.RIGHT]

    def step(self) -> None:
        """Advance every live pedestrian by one step."""
        self.step_index += 1
        k = self.step_index
        sc = self.scenario
        speeds: Dict[int, float] = {}
        for side in self._direction_order():
            movers = [p for p in self.live.values() if p.side is side]
            movers.sort(key=lambda p: (-progress(self.layout, p.position, side), p.id))
            for ped in movers:
                self.agent_steps += 1
                if not in_lateral_band(self.layout, ped.position):
                    result = _reentry(ped, self._neighbors(ped), self.layout, sc.step_len, self.schedule)
                    new_state = State.REENTERING
                elif ped.stuck_count >= STUCK_LIMIT:
                    result = self._search(ped, _kernel.MODE_RIGHT)
                    new_state = State.STUCK_TILTING
                    if result is None:
                        # right flank walled off: fall back to the ordinary search
                        result = self._search(ped, _kernel.MODE_FORWARD)
                        new_state = State.CROSSING
                else:
                    result = self._search(ped, _kernel.MODE_FORWARD)
                    new_state = State.CROSSING

                if result is None:
                    self.no_move_steps += 1
                    ped.stuck_count += 1
                    ped.radius = ped.ptype.min_radius
                    self.pr[ped.id] = ped.radius
                    ped.reduction_i = 100.0
                    speeds[ped.id] = 0.0
                    continue

                pos, i = result
                ped.position = pos
                ped.reduction_i = i
                ped.radius = ped.radius_at(i)
                self.px[ped.id] = pos.x
                self.py[ped.id] = pos.y
                self.pr[ped.id] = ped.radius
                speeds[ped.id] = ped.speed_at(i)
                if new_state is State.STUCK_TILTING:
                    self.stuck_tilt_events += 1
                if new_state is not State.REENTERING:
                    ped.stuck_count = 0
                ped.state = new_state
                if has_crossed(self.layout, pos, ped.side):
                    ped.state = State.DONE
                    ped.crossing_end_step = k
        self._record(speeds)
        for ped in [p for p in self.live.values() if p.done]:
            self.alive[ped.id] = False
            del self.live[ped.id]
        self.check_overlaps()

    def _record(self, speeds: Dict[int, float]) -> None:
        for pid in sorted(self.live):
            p = self.live[pid]
            self.trace.rows.append(
                (self.step_index, pid, p.position.x, p.position.y, speeds.get(pid, 0.0), p.radius, p.state.value)
            )

    def check_overlaps(self) -> None:
        """Raise :class:`OverlapError` if any two live occupied circles overlap."""
        if len(self.live) < 2:
            return
        ps = list(self.live.values())
        xy = np.array([(p.position.x, p.position.y) for p in ps])
        r = np.array([p.radius for p in ps])
        d = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(-1))
        need = r[:, None] + r[None, :]
        np.fill_diagonal(d, np.inf)
        bad = np.argwhere(d < need - DIST_TOL)
        if len(bad):
            a, b = bad[0]
            raise OverlapError(
                f"step {self.step_index}: pedestrians {ps[a].id} and {ps[b].id} overlap "
                f"(distance {d[a, b]:.9f} < {need[a, b]:.9f}); "
                f"positions {ps[a].position}, {ps[b].position}"
            )

    def run(self) -> Tuple[SimulationTrace, RunSummary]:
        while self.live and self.step_index < self.scenario.max_steps:
            self.step()
        return self.trace, self.summary()

    def summary(self) -> RunSummary:
        dt = self.scenario.step_len
        times = {p.id: p.crossing_end_step * dt for p in self.peds if p.crossing_end_step is not None}
        return RunSummary(
            cohort_crossing_time=max(times.values(), default=0.0),
            crossing_times=times,
            no_move_fraction=self.no_move_steps / self.agent_steps if self.agent_steps else 0.0,
            stuck_tilt_events=self.stuck_tilt_events,
            completed=not self.live,
            steps=self.step_index,
            seed=self.seed,
            agent_steps=self.agent_steps,
            no_move_steps=self.no_move_steps,
        )


def step(sim: Simulation) -> Simulation:
    """Advance ``sim`` one step in place and return it."""
    sim.step()
    return sim


def run(scenario: Scenario, seed: Optional[int] = None) -> Tuple[SimulationTrace, RunSummary]:
    """Simulate ``scenario`` until everyone has crossed or ``max_steps`` is reached."""
    return Simulation.from_scenario(scenario, seed).run()


def run_seed(seed: int, run_index: int) -> int:
    """Seed of replication ``run_index``: replications use consecutive seeds."""
    return seed + run_index


@dataclass
class CrossingEstimate:
    mean: float
    per_run: List[float]
    completed: bool
    summaries: List[RunSummary] = field(repr=False, default_factory=list)
    traces: List[SimulationTrace] = field(repr=False, default_factory=list)


def estimate_crossing_time(scenario: Scenario, runs: int = 10, keep_traces: bool = False) -> CrossingEstimate:
    """Mean cohort crossing time over ``runs`` independently seeded replications."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if scenario.is_deterministic:
        # nothing left to sample, so every replication would be identical
        results = [run(scenario, scenario.seed)] * runs
    else:
        results = [run(scenario, run_seed(scenario.seed, k)) for k in range(runs)]
    summaries = [r[1] for r in results]
    per_run = [s.cohort_crossing_time for s in summaries]
    completed = all(s.completed for s in summaries)
    if not completed:
        log.warning("estimate_crossing_time: %d of %d runs hit max_steps", sum(not s.completed for s in summaries), runs)
    traces = [r[0] for r in results] if keep_traces else []
    return CrossingEstimate(float(np.mean(per_run)), per_run, completed, summaries, traces)
