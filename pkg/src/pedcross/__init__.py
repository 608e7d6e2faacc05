"""Seedable crowd-crossing simulator for signalized crosswalks, plus a signal-timing harness."""

from .engine import (
    Cohort,
    CrossingEstimate,
    OverlapError,
    RunSummary,
    Scenario,
    Simulation,
    SimulationTrace,
    estimate_crossing_time,
    run,
    run_seed,
    try_move,
)
from .geometry import AngleInterval, Circle, ExclusionSet, Point, best_angle, circle_intersections, exclusion_interval, union
from .pedestrians import DEFAULT_TYPES, FIELD_ADULT, Pedestrian, PedestrianKind, PedestrianType, State, field_types
from .scenario import builtin_validation_scenarios, parse_scenario, read_trace, write_outputs
from .tls import Mode, compare_modes, field_demand, simulate_intersection, static_schedule
from .world import CrosswalkLayout, PlacementDistribution, Side, make_layout

__version__ = "0.1.0"
