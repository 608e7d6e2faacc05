"""End-to-end acceptance checks, one test (or a few sub-tests) per criterion.

Each test records a verdict line; the terminal summary prints them as
``criterion N: PASS|FAIL``.
"""

import math
import time
from collections import defaultdict

import numpy as np
import pytest

from pedcross.engine import Cohort, Scenario, estimate_crossing_time, run
from pedcross.geometry import Circle, Point, circle_intersections, exclusion_interval
from pedcross.pedestrians import PedestrianKind, PedestrianType, effective_radius, effective_speed, speed_params_from_bounds
from pedcross.scenario import builtin_validation_scenarios, load_scenario, summary_document, write_outputs
from pedcross.tls import compare_modes, demand_level_grid, field_demand
from pedcross.world import Side, make_layout

from test_geometry import best_angle_oracle_violations
from test_pedestrians import ped

TLS_SEEDS = list(range(10))


def test_validation_records_within_ten_percent(verdict):
    t0 = time.perf_counter()
    rows = []
    for rec in builtin_validation_scenarios():
        est = estimate_crossing_time(rec.scenario, runs=10)
        rows.append((rec.name, est.mean, rec.actual_time, abs(est.mean - rec.actual_time) / rec.actual_time))
    elapsed = time.perf_counter() - t0
    within5 = sum(r[3] <= 0.05 for r in rows)
    detail = ", ".join(f"{n} {m:.1f}/{a}" for n, m, a, _ in rows)
    detail += f"; {within5}/5 within 5%; {elapsed:.1f} s"
    ok = all(r[3] <= 0.10 for r in rows) and elapsed < 5
    verdict(1, ok, detail)
    assert ok


def test_best_angle_agrees_with_brute_force(verdict):
    t0 = time.perf_counter()
    bad = best_angle_oracle_violations(1000, seed=2024)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    verdict(2, ok, f"{len(bad)} violations in 1000 configs; {elapsed:.1f} s")
    assert ok, bad[:5]


def test_worked_tangency_case(verdict):
    (iv,) = exclusion_interval(Point(0, 0), 2.0, (1.0, 0.0), Point(2, 0), 2.0)
    pts = sorted(circle_intersections(Circle(Point(0, 0), 2.0), Circle(Point(2, 0), 2.0)), key=lambda p: p.y)
    r3 = math.sqrt(3)
    errors = [
        abs(iv.lo + math.pi / 3),
        abs(iv.hi - math.pi / 3),
        abs(pts[0].x - 1), abs(pts[0].y + r3),
        abs(pts[1].x - 1), abs(pts[1].y - r3),
    ]
    ok = max(errors) <= 1e-9
    verdict(3, ok, f"max error {max(errors):.1e}")
    assert ok


def _containment_and_overlap(trace, layout):
    """Count overlap and containment violations straight from a trace."""
    by_step = defaultdict(list)
    for row in trace:
        by_step[row[0]].append(row)
    overlaps = containment = 0
    last_gap = {}
    for step in sorted(by_step):
        live = [r for r in by_step[step] if r[6] != "done"]
        if len(live) > 1:
            xy = np.array([(r[2], r[3]) for r in live])
            rad = np.array([r[5] for r in live])
            d = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
            need = rad[:, None] + rad[None, :] - 1e-9
            overlaps += int(np.triu(d < need, 1).sum())
        for _, pid, x, y, _, _, state in by_step[step]:
            gap = max(layout.y_min - y, y - layout.y_max, 0.0)
            if state in ("crossing", "stuck_tilting"):
                containment += gap > 1e-9
            elif state == "reentering":
                # must strictly approach the motion area
                containment += pid in last_gap and last_gap[pid] > 0 and gap >= last_gap[pid]
            last_gap[pid] = gap
    return overlaps, containment


def test_invariants_on_the_densest_record(verdict):
    base = builtin_validation_scenarios()[2].scenario
    base = Scenario(base.layout, base.cohorts, base.placement, base.types, base.step_len, base.seed, 300)
    assert base.n_pedestrians == 60
    overlaps = containment = incomplete = 0
    worst_no_move = 0.0
    for seed in range(50):
        trace, summary = run(base, seed)
        o, c = _containment_and_overlap(trace, base.layout)
        overlaps += o
        containment += c
        incomplete += not summary.completed
        worst_no_move = max(worst_no_move, summary.no_move_fraction)
    ok = overlaps == 0 and containment == 0 and incomplete == 0 and worst_no_move < 0.04
    verdict(4, ok, f"overlaps {overlaps}, containment {containment}, incomplete {incomplete}, "
                   f"worst no_move {worst_no_move:.3f}")
    assert ok


@pytest.mark.parametrize("name", ["record1", "record3", "record5"])
def test_same_seed_same_bytes(name, tmp_path, verdict):
    cfg = load_scenario(name)
    outputs = []
    for k in range(2):
        trace, summary = run(cfg.scenario)
        doc = summary_document(cfg.scenario.seed, cfg.echo, run_summary=summary)
        paths = tmp_path / f"trace{k}.csv", tmp_path / f"summary{k}.json"
        write_outputs(trace, doc, *paths)
        outputs.append(tuple(p.read_bytes() for p in paths))
    ok = outputs[0] == outputs[1]
    verdict(f"5/{name}", ok, f"{name} identical" if ok else f"{name} differs")
    assert ok


@pytest.mark.parametrize("beta, length, v", [(3.0, 43.62, 1.2676), (3.0, 45.045, 1.2676), (2.0, 20.0, 1.0)])
def test_lone_walker_closed_form(beta, length, v, verdict):
    layout = make_layout(beta, 3.6, length, 0.5)
    types = {PedestrianKind.HEALTHY_ADULT: PedestrianType(PedestrianKind.HEALTHY_ADULT, v, 0.0, 0.30, 0.20)}
    sc = Scenario(layout, (Cohort(Side.LEFT, 1, positions=((0.0, 1.8),)),), types=types)
    got = run(sc)[1].cohort_crossing_time
    want = math.ceil((beta + length) / v)
    verdict(f"6/{length}", got == want, f"L={length}: {got:g} vs {want}")
    assert got == want


@pytest.fixture(scope="module")
def field_comparison():
    t0 = time.perf_counter()
    rows = {r.mode: r for r in compare_modes(field_demand(), TLS_SEEDS)}
    return rows, time.perf_counter() - t0


@pytest.mark.slow
def test_adaptive_modes_cut_vehicle_waits_by_30_percent(field_comparison, verdict):
    rows, _ = field_comparison
    static = rows["static"].vehicle_awt
    cuts = {m: 1 - rows[m].vehicle_awt / static for m in ("dynamic", "dynamic_pcs")}
    ok = all(c >= 0.30 for c in cuts.values())
    verdict("7a", ok, ", ".join(f"{m} -{100 * c:.1f}%" for m, c in cuts.items()) + " (need -30%)")
    assert ok


@pytest.mark.slow
def test_pedestrian_wait_ordering(field_comparison, verdict):
    rows, _ = field_comparison
    s, d, p = (rows[m].pedestrian_awt for m in ("static", "dynamic", "dynamic_pcs"))
    ok = p <= d < s
    verdict("7b", ok, f"pcs {p:.1f} <= dyn {d:.1f} < static {s:.1f}")
    assert ok


@pytest.mark.slow
def test_estimated_walk_strands_nobody(field_comparison, verdict):
    rows, _ = field_comparison
    stranded = [m.stranded_pedestrian_count for m in rows["dynamic_pcs"].per_seed]
    ok = len(stranded) >= 10 and not any(stranded)
    verdict("7c", ok, f"stranded {sum(stranded)} over {len(stranded)} seeds")
    assert ok


@pytest.mark.slow
def test_longest_pedestrian_wait_drops(field_comparison, verdict):
    rows, elapsed = field_comparison
    p, s = rows["dynamic_pcs"].pedestrian_max_wait, rows["static"].pedestrian_max_wait
    ok = p < s and elapsed < 120
    verdict("7d", ok, f"max wait {p:.0f} < {s:.0f} s; comparison took {elapsed:.0f} s")
    assert ok


@pytest.fixture(scope="module")
def demand_grid():
    return demand_level_grid(field_demand(), list(range(5)))


@pytest.mark.slow
@pytest.mark.parametrize("low, high", [("a", "b"), ("e", "f")])
def test_more_walkers_slow_vehicles(demand_grid, low, high, verdict):
    lo = {r.mode: r.vehicle_awt for r in demand_grid[low]}
    hi = {r.mode: r.vehicle_awt for r in demand_grid[high]}
    ok = all(hi[m] > lo[m] for m in lo)
    verdict(f"8{low}{high}", ok, ", ".join(f"{m} {lo[m]:.1f}->{hi[m]:.1f}" for m in lo))
    assert ok


@pytest.mark.slow
def test_estimated_walk_never_worse_for_walkers(demand_grid, verdict):
    worse = []
    for level, rows in demand_grid.items():
        r = {x.mode: x.pedestrian_awt for x in rows}
        if r["dynamic_pcs"] > r["dynamic"]:
            worse.append(f"{level} {r['dynamic_pcs']:.1f}>{r['dynamic']:.1f}")
    verdict("8pcs", not worse, "pcs <= dynamic at every level" if not worse else "; ".join(worse))
    assert not worse


def test_speed_and_radius_formulas(verdict):
    errs = []
    for top, bottom in [(1.8, 0.6), (1.5513, 0.9839), (0.9, 0.5)]:
        mu, sigma = speed_params_from_bounds(top, bottom)
        errs += [abs(mu + 3 * sigma - top) / top, abs(mu - 3 * sigma - bottom) / bottom]
    t = PedestrianType(PedestrianKind.HEALTHY_ADULT, 0.9, 0.2, 0.30, 0.20)
    for i, speed, radius in [(0, 1.2, 0.30), (50, 0.75, 0.25), (100, 0.3, 0.20)]:
        p = ped(t, 1.2)
        p.reduction_i = i
        errs += [abs(effective_speed(p) - speed) / speed, abs(effective_radius(p) - radius) / radius]
    ok = max(errs) <= 1e-12
    verdict(9, ok, f"max relative error {max(errs):.1e}")
    assert ok
