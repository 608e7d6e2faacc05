"""
Scenario files, built-in validation records and output serialization.

Scenario files are TOML::

    [layout]            # meters
    beta = 3.0
    width = 3.6
    length = 43.62
    buffer = 0.5

    [[cohorts]]
    side = "right"      # "left"/"W2E" walks +x, "right"/"E2W" walks -x
    count = 29

    [speeds]            # one of: preset | mu + sigma | max + min (m/s)
    preset = "field"

    [engine]
    seed = 1            # step_len (s), max_steps, i_increment, runs, ...

    [tls]               # optional, see TLS_KEYS
    mode = "dynamic_pcs"

Numbers may also be written as strings carrying their unit, e.g.
``length = "43.62 m"`` or ``step_len = "1 s"``; a wrong unit is rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import Cohort, RunSummary, Scenario, SimulationTrace
from .pedestrians import (
    DEFAULT_TYPES,
    FIELD_ADULT,
    PedestrianKind,
    PedestrianType,
    field_types,
    speed_params_from_bounds,
)
from .tls import (
    APPROACHES,
    CROSSWALKS,
    SYNTHETIC_LEVELS,
    ControllerParams,
    DemandProfile,
    IntersectionMetrics,
    WEST_EAST_LAYOUT,
    Mode,
    field_demand,
)
from .world import LayoutError, PlacementDistribution, Side, make_layout

TRACE_HEADER = ("step", "ped_id", "x", "y", "speed", "radius", "state")


class ScenarioError(ValueError):
    """Invalid scenario file; ``line`` is 1-based when known."""

    def __init__(self, message: str, source: str = "<string>", line: Optional[int] = None, category: str = "config"):
        self.source = source
        self.line = line
        self.category = category
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


# -- key tables ----------------------------------------------------------------

LAYOUT_KEYS = {"beta": "m", "width": "m", "length": "m", "buffer": "m"}
COHORT_KEYS = {"side", "count", "type", "mix", "placement", "positions", "speeds"}
SPEED_KEYS = {"preset", "mu", "sigma", "max", "min"}
ENGINE_KEYS = {
    "step_len": "s",
    "seed": None,
    "max_steps": None,
    "i_increment": None,
    "runs": None,
    "own_speed_ceiling": None,
    "alternate_directions": None,
}
TLS_KEYS = {
    "mode": None,
    "demand": None,
    "level": None,
    "vehicles": None,
    "pedestrians": None,
    "horizon": "s",
    "vehicle_rates": None,
    "pedestrian_rates": None,
    "turn_left": None,
    "turn_right": None,
    "seeds": None,
    "discharge_headway": "s",
    "startup_lost_time": "s",
    "min_green": "s",
    "max_green": "s",
    "min_walk": "s",
    "max_walk": "s",
    "fixed_walk": "s",
    "design_walk_speed": "m/s",
    "safety_margin": "s",
    "estimate_runs": None,
    "lane_width": "m",
}
SECTIONS = {"name", "layout", "cohorts", "speeds", "engine", "tls"}

_SIDE_NAMES = {"left": Side.LEFT, "w2e": Side.LEFT, "right": Side.RIGHT, "e2w": Side.RIGHT}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]+)\s*$")


@dataclass
class TlsConfig:
    mode: Mode
    demand: DemandProfile
    params: ControllerParams
    seeds: int = 1


@dataclass
class ScenarioConfig:
    """Parsed scenario plus the normalized echo of every input."""

    scenario: Scenario
    echo: Dict[str, Any]
    runs: int = 10
    tls: Optional[TlsConfig] = None
    name: str = "scenario"


class _Reader:
    """Validation helpers that know where each key sits in the source text."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self.lines = text.splitlines()

    def line_of(self, section: Optional[str], key: Optional[str], index: int = 0) -> Optional[int]:
        """Line of ``key`` inside ``[section]`` (the ``index``-th one for arrays of tables)."""
        current: Tuple[Optional[str], int] = (None, 0)
        seen: Dict[str, int] = {}
        for n, raw in enumerate(self.lines, 1):
            line = raw.strip()
            header = re.match(r"^(\[\[?)\s*([A-Za-z_][\w.]*)\s*\]", line)
            if header:
                name = header.group(2)
                occurrence = 0
                if header.group(1) == "[[":
                    occurrence = seen[name] = seen.get(name, -1) + 1
                current = (name, occurrence)
                if key is None and current == (section, index):
                    return n
                continue
            if key is not None and current == (section, index) and re.match(rf"^{re.escape(key)}\s*=", line):
                return n
        return None

    def fail(self, msg: str, section: Optional[str] = None, key: Optional[str] = None, index: int = 0):
        raise ScenarioError(msg, self.source, self.line_of(section, key, index))

    def check_keys(self, table: Dict[str, Any], allowed, section: str, index: int = 0, label: Optional[str] = None):
        for k in table:
            if k not in allowed:
                self.fail(f"unknown key '{k}' in [{label or section}]", section, k, index)

    def number(self, table, key, unit, section, index=0, default=None, positive=False, nonneg=False, integer=False):
        where = f"cohorts[{index}].{key}" if section == "cohorts" else f"{section}.{key}"
        if key not in table:
            if default is None:
                self.fail(f"missing required key '{where}'", section, None, index)
            return default
        raw = table[key]
        if isinstance(raw, bool):
            self.fail(f"'{where}' must be a number, got a boolean", section, key, index)
        if isinstance(raw, str):
            m = _QUANTITY.match(raw)
            if not m:
                self.fail(f"'{where}' must be a number{f' in {unit}' if unit else ''}, got {raw!r}", section, key, index)
            if unit is None or m.group(2) != unit:
                self.fail(
                    f"'{where}' has unit '{m.group(2)}', expected {unit if unit else 'a plain number'}",
                    section, key, index,
                )
            raw = float(m.group(1))
        if not isinstance(raw, (int, float)) or not math.isfinite(raw):
            self.fail(f"'{where}' must be a finite number, got {raw!r}", section, key, index)
        if integer:
            if isinstance(raw, float) and not raw.is_integer():
                self.fail(f"'{where}' must be a whole number, got {raw!r}", section, key, index)
            raw = int(raw)
        if positive and not raw > 0:
            self.fail(f"'{where}' must be > 0, got {raw!r}", section, key, index)
        if nonneg and raw < 0:
            self.fail(f"'{where}' must be >= 0, got {raw!r}", section, key, index)
        return raw

    def boolean(self, table, key, section, default):
        if key not in table:
            return default
        if not isinstance(table[key], bool):
            self.fail(f"'{section}.{key}' must be true or false", section, key)
        return table[key]

    def table(self, doc, key) -> Dict[str, Any]:
        value = doc.get(key, {})
        if not isinstance(value, dict):
            self.fail(f"'{key}' must be a table", None, key)
        return value


def parse_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc.strerror or exc}", str(path), category="io") from exc
    return parse_scenario_text(text, str(path), default_name=path.stem.replace(".scenario", ""))


def parse_scenario_text(text: str, source: str = "<string>", default_name: str = "scenario") -> ScenarioConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ScenarioError(f"malformed syntax: {exc}", source, int(m.group(1)) if m else None) from exc
    r = _Reader(text, source)
    for k in doc:
        if k not in SECTIONS:
            r.fail(f"unknown key '{k}' at top level", None, k)
    name = doc.get("name", default_name)
    if not isinstance(name, str):
        r.fail("'name' must be a string", None, "name")

    # a signal-timing file may omit the crossing part; the West/East crosswalk stands in
    tls_only = "tls" in doc and "layout" not in doc and "cohorts" not in doc
    layout_t = r.table(doc, "layout")
    if "layout" not in doc and not tls_only:
        raise ScenarioError("missing required section [layout]", source)
    r.check_keys(layout_t, LAYOUT_KEYS, "layout")
    fallback = {"beta": 3.0, "buffer": 0.5}
    if tls_only:
        fallback.update(width=WEST_EAST_LAYOUT.width, length=WEST_EAST_LAYOUT.length)
    dims = {k: r.number(layout_t, k, "m", "layout", default=fallback.get(k), positive=True) for k in LAYOUT_KEYS}
    try:
        layout = make_layout(**dims)
    except LayoutError as exc:
        raise ScenarioError(str(exc), source) from exc

    types, speed_echo = _parse_speeds(r, r.table(doc, "speeds"))

    cohorts_raw = doc.get("cohorts", [] if tls_only else None)
    if not isinstance(cohorts_raw, list) or not (cohorts_raw or tls_only):
        r.fail("need at least one [[cohorts]] entry", None, "cohorts")
    cohorts, placements, cohort_echo = [], set(), []
    for idx, c in enumerate(cohorts_raw):
        cohort, placement, echo = _parse_cohort(r, c, idx)
        cohorts.append(cohort)
        placements.add(placement)
        cohort_echo.append(echo)
    if len(placements) > 1:
        r.fail("all cohorts must use the same placement distribution", "cohorts", "placement", 1)
    placement = placements.pop() if placements else PlacementDistribution.NORMAL

    eng = r.table(doc, "engine")
    r.check_keys(eng, ENGINE_KEYS, "engine")
    engine = {
        "step_len": float(r.number(eng, "step_len", "s", "engine", default=1.0, positive=True)),
        "seed": r.number(eng, "seed", None, "engine", default=0, integer=True, nonneg=True),
        "max_steps": r.number(eng, "max_steps", None, "engine", default=600, integer=True, positive=True),
        "i_increment": float(r.number(eng, "i_increment", None, "engine", default=10.0, positive=True)),
        "runs": r.number(eng, "runs", None, "engine", default=10, integer=True, positive=True),
        "own_speed_ceiling": r.boolean(eng, "own_speed_ceiling", "engine", True),
        "alternate_directions": r.boolean(eng, "alternate_directions", "engine", True),
    }
    if engine["i_increment"] > 100:
        r.fail("'engine.i_increment' must be <= 100", "engine", "i_increment")
    scenario = Scenario(
        layout,
        tuple(cohorts),
        placement=placement,
        types=types,
        step_len=engine["step_len"],
        seed=engine["seed"],
        max_steps=engine["max_steps"],
        i_increment=engine["i_increment"],
        own_speed_ceiling=engine["own_speed_ceiling"],
        alternate_directions=engine["alternate_directions"],
    )
    echo: Dict[str, Any] = {
        "name": name,
        "layout": dims,
        "cohorts": cohort_echo,
        "speeds": speed_echo,
        "engine": engine,
    }
    tls = None
    if "tls" in doc:
        tls, echo["tls"] = _parse_tls(r, r.table(doc, "tls"))
    return ScenarioConfig(scenario, echo, engine["runs"], tls, name)


def _parse_speeds(r: _Reader, sp: Dict[str, Any]):
    r.check_keys(sp, SPEED_KEYS, "speeds")
    groups = [g for g, keys in (("preset", {"preset"}), ("mu_sigma", {"mu", "sigma"}), ("bounds", {"max", "min"})) if keys & set(sp)]
    if len(groups) > 1:
        r.fail("[speeds] takes exactly one of: preset, mu + sigma, max + min", "speeds", None)
    group = groups[0] if groups else "preset"
    base = field_types()
    if group == "preset":
        preset = sp.get("preset", "field")
        if preset == "field":
            types = base
        elif preset == "default":
            types = dict(DEFAULT_TYPES)
        else:
            r.fail(f"unknown speed preset {preset!r} (expected 'field' or 'default')", "speeds", "preset")
        adult = types[PedestrianKind.HEALTHY_ADULT]
        return types, {"preset": preset, "mu": adult.mu_speed, "sigma": adult.sigma_speed}
    if group == "mu_sigma":
        mu = r.number(sp, "mu", "m/s", "speeds", positive=True)
        sigma = r.number(sp, "sigma", "m/s", "speeds", nonneg=True)
    else:
        hi = r.number(sp, "max", "m/s", "speeds", positive=True)
        lo = r.number(sp, "min", "m/s", "speeds", nonneg=True)
        if not hi > lo:
            r.fail(f"'speeds.max' ({hi}) must exceed 'speeds.min' ({lo})", "speeds", "max")
        mu, sigma = speed_params_from_bounds(hi, lo)
    try:
        adult = PedestrianType(PedestrianKind.HEALTHY_ADULT, float(mu), float(sigma), FIELD_ADULT.max_radius, FIELD_ADULT.min_radius)
    except ValueError as exc:
        r.fail(str(exc), "speeds", "mu" if group == "mu_sigma" else "min")
    base[PedestrianKind.HEALTHY_ADULT] = adult
    return base, {"preset": None, "mu": adult.mu_speed, "sigma": adult.sigma_speed}


def _kind(r: _Reader, value, idx: int, key: str) -> PedestrianKind:
    try:
        return PedestrianKind(value)
    except ValueError:
        kinds = ", ".join(k.value for k in PedestrianKind)
        r.fail(f"unknown pedestrian type {value!r} (expected one of {kinds})", "cohorts", key, idx)


def _parse_cohort(r: _Reader, c, idx: int):
    if not isinstance(c, dict):
        r.fail(f"cohorts[{idx}] must be a table", "cohorts", None, idx)
    r.check_keys(c, COHORT_KEYS, "cohorts", idx, label=f"cohorts[{idx}]")
    side_raw = c.get("side")
    if not isinstance(side_raw, str) or side_raw.lower() not in _SIDE_NAMES:
        r.fail(f"cohorts[{idx}].side must be one of left, right, W2E, E2W; got {side_raw!r}", "cohorts", "side" if "side" in c else None, idx)
    side = _SIDE_NAMES[side_raw.lower()]
    count = r.number(c, "count", None, "cohorts", idx, integer=True, nonneg=True)
    if "type" in c and "mix" in c:
        r.fail(f"cohorts[{idx}] takes 'type' or 'mix', not both", "cohorts", "mix", idx)
    mix = None
    if "mix" in c:
        if not isinstance(c["mix"], dict):
            r.fail(f"cohorts[{idx}].mix must be a table of type = count", "cohorts", "mix", idx)
        mix = []
        for k, v in c["mix"].items():
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                r.fail(f"cohorts[{idx}].mix.{k} must be a whole number >= 0", "cohorts", "mix", idx)
            mix.append((_kind(r, k, idx, "mix"), v))
        if sum(v for _, v in mix) != count:
            r.fail(f"cohorts[{idx}].mix sums to {sum(v for _, v in mix)}, count is {count}", "cohorts", "mix", idx)
        mix = tuple(mix)
    elif "type" in c:
        mix = ((_kind(r, c["type"], idx, "type"), count),)
    placement_raw = c.get("placement", "normal")
    try:
        placement = PlacementDistribution(str(placement_raw).lower())
    except ValueError:
        r.fail(f"unknown placement {placement_raw!r} (expected normal, poisson or t)", "cohorts", "placement", idx)
    positions = None
    if "positions" in c:
        pts = c["positions"]
        ok = isinstance(pts, list) and all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)
            for p in pts
        )
        if not ok or len(pts) != count:
            r.fail(f"cohorts[{idx}].positions must be {count} [x, y] pairs in meters", "cohorts", "positions", idx)
        positions = tuple((float(x), float(y)) for x, y in pts)
    speeds = None
    if "speeds" in c:
        vs = c["speeds"]
        if not isinstance(vs, list) or len(vs) != count or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in vs
        ):
            r.fail(f"cohorts[{idx}].speeds must be {count} positive speeds in m/s", "cohorts", "speeds", idx)
        speeds = tuple(float(v) for v in vs)
    cohort = Cohort(side, count, mix=mix, positions=positions, speeds=speeds)
    echo = {
        "side": side.value,
        "count": count,
        "mix": {k.value: v for k, v in (mix or ((PedestrianKind.HEALTHY_ADULT, count),))},
        "placement": placement.value,
        "positions": [list(p) for p in positions] if positions else None,
        "speeds": list(speeds) if speeds else None,
    }
    return cohort, placement, echo


def _parse_tls(r: _Reader, t: Dict[str, Any]):
    r.check_keys(t, TLS_KEYS, "tls")
    mode_raw = t.get("mode", Mode.DYNAMIC_WITH_PCS.value)
    try:
        mode = Mode(mode_raw)
    except ValueError:
        r.fail(f"unknown tls mode {mode_raw!r} (expected {', '.join(m.value for m in Mode)})", "tls", "mode")
    kind = t.get("demand", "field")
    if kind not in ("field", "custom"):
        r.fail(f"tls.demand must be 'field' or 'custom', got {kind!r}", "tls", "demand")
    horizon = float(r.number(t, "horizon", "s", "tls", default=3600.0, positive=True))
    left = float(r.number(t, "turn_left", None, "tls", default=1.0 / 3.0, nonneg=True))
    right = float(r.number(t, "turn_right", None, "tls", default=1.0 / 3.0, nonneg=True))
    if left + right > 1:
        r.fail("tls.turn_left + tls.turn_right must be <= 1", "tls", "turn_right" if "turn_right" in t else "turn_left")
    if kind == "field":
        for k in ("vehicle_rates", "pedestrian_rates"):
            if k in t:
                r.fail(f"tls.{k} needs demand = 'custom'", "tls", k)
        vehicles = r.number(t, "vehicles", None, "tls", default=990, nonneg=True)
        peds = r.number(t, "pedestrians", None, "tls", default=522, nonneg=True)
        base = field_demand(vehicles, peds, horizon)
        demand = DemandProfile(base.vehicle_rates, {a: (left, right) for a in APPROACHES}, base.pedestrian_rates, horizon)
    else:
        for k in ("vehicles", "pedestrians"):
            if k in t:
                r.fail(f"tls.{k} needs demand = 'field'", "tls", k)
        rates = {}
        for k, names in (("vehicle_rates", APPROACHES), ("pedestrian_rates", CROSSWALKS)):
            table = t.get(k, {})
            if not isinstance(table, dict):
                r.fail(f"tls.{k} must be a table keyed by {', '.join(names)}", "tls", k)
            for leg in table:
                if leg not in names:
                    r.fail(f"unknown key '{leg}' in tls.{k}", "tls", k)
            rates[k] = {leg: float(r.number(table, leg, None, "tls", default=0.0, nonneg=True)) for leg in names}
        demand = DemandProfile(rates["vehicle_rates"], {a: (left, right) for a in APPROACHES}, rates["pedestrian_rates"], horizon)
    level = t.get("level")
    if level is not None:
        if level not in SYNTHETIC_LEVELS:
            r.fail(f"tls.level must be one of {', '.join(SYNTHETIC_LEVELS)}, got {level!r}", "tls", "level")
        demand = demand.scaled(*SYNTHETIC_LEVELS[level])
    pkw = {}
    for k, unit in TLS_KEYS.items():
        if k in t and k in ControllerParams.__dataclass_fields__:
            pkw[k] = r.number(t, k, unit, "tls", integer=(k == "estimate_runs"), positive=(k != "safety_margin" and k != "startup_lost_time"), nonneg=True)
    try:
        params = ControllerParams(**pkw)
    except ValueError as exc:
        r.fail(str(exc), "tls", None)
    seeds = r.number(t, "seeds", None, "tls", default=1, integer=True, positive=True)
    echo = {
        "mode": mode.value,
        "level": level,
        "horizon": horizon,
        "vehicle_rates": demand.vehicle_rates,
        "pedestrian_rates": demand.pedestrian_rates,
        "turn_fractions": {a: list(v) for a, v in demand.turn_fractions.items()},
        "controller": {k: getattr(params, k) for k in ControllerParams.__dataclass_fields__},
        "seeds": seeds,
    }
    return TlsConfig(mode, demand, params, seeds), echo


def dump_echo(echo: Dict[str, Any]) -> str:
    """Canonical JSON for a normalized config (sorted keys, stable floats)."""
    return json.dumps(echo, sort_keys=True, indent=2)


# -- built-in validation records -----------------------------------------------


@dataclass(frozen=True)
class ValidationRecord:
    name: str
    config: ScenarioConfig = field(compare=False)
    actual_time: float
    reference_estimates: Dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def scenario(self) -> Scenario:
        return self.config.scenario


# name, crosswalk length (m), first direction count, second direction count,
# observed cohort time (s), reference estimates by placement
_RECORDS = (
    ("record1", 43.62, ("E2W", 29), ("W2E", 21), 57.0, {"normal": 57.2, "poisson": 56.0, "t": 56.0}),
    ("record2", 43.62, ("E2W", 25), ("W2E", 19), 53.0, {"normal": 51.4, "poisson": 55.0, "t": 54.0}),
    ("record3", 43.62, ("E2W", 23), ("W2E", 37), 60.0, {"normal": 60.2, "poisson": 61.0, "t": 66.0}),
    ("record4", 45.045, ("S2N", 3), ("N2S", 4), 39.0, {"normal": 40.5, "poisson": 40.0, "t": 38.0}),
    ("record5", 45.045, ("S2N", 3), ("N2S", 3), 40.0, {"normal": 40.7, "poisson": 38.0, "t": 39.0}),
)

VALIDATION_WIDTH = 3.6
VALIDATION_BETA = 3.0
VALIDATION_BUFFER = 0.5
VALIDATION_SEED = 1


def record_text(index: int, placement: str = "normal", seed: int = VALIDATION_SEED) -> str:
    """Scenario-file text of validation record ``index`` (0-based)."""
    name, length, (lab1, n1), (lab2, n2), _, _ = _RECORDS[index]
    return (
        f'name = "{name}"\n\n'
        f"[layout]\nbeta = {VALIDATION_BETA}\nwidth = {VALIDATION_WIDTH}\nlength = {length}\nbuffer = {VALIDATION_BUFFER}\n\n"
        f'# {lab1}: walks from the high-x curb\n[[cohorts]]\nside = "right"\ncount = {n1}\nplacement = "{placement}"\n\n'
        f'# {lab2}\n[[cohorts]]\nside = "left"\ncount = {n2}\nplacement = "{placement}"\n\n'
        f'[speeds]\npreset = "field"\n\n[engine]\nseed = {seed}\nruns = 10\n'
    )


def builtin_validation_scenarios(placement: str = "normal", seed: int = VALIDATION_SEED) -> List[ValidationRecord]:
    """The five field records with their observed times and reference estimates attached."""
    out = []
    for k, (name, _, _, _, actual, refs) in enumerate(_RECORDS):
        cfg = parse_scenario_text(record_text(k, placement, seed), f"<builtin {name}>", name)
        out.append(ValidationRecord(name, cfg, actual, dict(refs)))
    return out


def builtin_names() -> Tuple[str, ...]:
    return tuple(r[0] for r in _RECORDS)


def load_scenario(name_or_path: str) -> ScenarioConfig:
    """A built-in record by name, else a scenario file path."""
    names = builtin_names()
    if name_or_path in names:
        idx = names.index(name_or_path)
        return parse_scenario_text(record_text(idx), f"<builtin {name_or_path}>", name_or_path)
    return parse_scenario(name_or_path)


def accuracy(estimated: float, actual: float) -> float:
    """Percent accuracy ``100 * (1 - |estimated - actual| / actual)``."""
    if actual <= 0:
        raise ValueError("actual time must be > 0")
    return 100.0 * (1.0 - abs(estimated - actual) / actual)


# -- trace and summary files -----------------------------------------------------


def format_trace(trace: SimulationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for step, pid, x, y, speed, radius, state in sorted(trace.rows, key=lambda r: (r[0], r[1])):
        w.writerow([step, pid, f"{x:.6f}", f"{y:.6f}", f"{speed:.6f}", f"{radius:.6f}", state])
    return buf.getvalue()


def parse_trace(text: str) -> SimulationTrace:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != TRACE_HEADER:
        raise ValueError(f"trace header must be {','.join(TRACE_HEADER)}")
    out = SimulationTrace()
    for n, row in enumerate(rows[1:], 2):
        if len(row) != len(TRACE_HEADER):
            raise ValueError(f"trace line {n}: expected {len(TRACE_HEADER)} fields, got {len(row)}")
        out.rows.append((int(row[0]), int(row[1]), float(row[2]), float(row[3]), float(row[4]), float(row[5]), row[6]))
    return out


def quantize_trace(trace: SimulationTrace) -> SimulationTrace:
    """``trace`` at the precision the CSV stores (6 decimals)."""
    return parse_trace(format_trace(trace))


def read_trace(path: Union[str, Path]) -> SimulationTrace:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read trace {path}: {exc.strerror or exc}") from exc
    return parse_trace(text)


def summary_document(
    seed: int,
    config_echo: Dict[str, Any],
    run_summary: Optional[RunSummary] = None,
    metrics: Optional[IntersectionMetrics] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Summary with stable key names; fields that do not apply are ``null``."""
    doc: Dict[str, Any] = {
        "cohort_crossing_time_s": None,
        "completed": None,
        "no_move_fraction": None,
        "stuck_tilt_events": None,
        "vehicle_awt_s": None,
        "pedestrian_awt_s": None,
        "vehicle_max_wait_s": None,
        "pedestrian_max_wait_s": None,
        "stranded_pedestrians": None,
        "seed": seed,
        "config_echo": config_echo,
    }
    if run_summary is not None:
        doc.update(
            cohort_crossing_time_s=run_summary.cohort_crossing_time,
            completed=run_summary.completed,
            no_move_fraction=run_summary.no_move_fraction,
            stuck_tilt_events=run_summary.stuck_tilt_events,
            steps=run_summary.steps,
            crossing_times_s={str(k): v for k, v in sorted(run_summary.crossing_times.items())},
        )
    if metrics is not None:
        doc.update(
            vehicle_awt_s=metrics.vehicle_awt,
            pedestrian_awt_s=metrics.pedestrian_awt,
            vehicle_max_wait_s=metrics.vehicle_max_wait,
            pedestrian_max_wait_s=metrics.pedestrian_max_wait,
            stranded_pedestrians=metrics.stranded_pedestrian_count,
            vehicles_arrived=metrics.vehicles_arrived,
            vehicles_discharged=metrics.vehicles_discharged,
            vehicles_queued=metrics.vehicles_queued,
            pedestrians_arrived=metrics.pedestrians_arrived,
            pedestrians_released=metrics.pedestrians_released,
            pedestrians_waiting=metrics.pedestrians_waiting,
        )
    if extra:
        doc.update(extra)
    return doc


def _write(path: Union[str, Path], text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_summary(doc: Dict[str, Any], path: Union[str, Path]) -> None:
    _write(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


def write_outputs(
    trace: Optional[SimulationTrace],
    summary: Dict[str, Any],
    trace_path: Optional[Union[str, Path]] = None,
    summary_path: Optional[Union[str, Path]] = None,
) -> None:
    """Write the trace CSV and the summary document to whichever paths are given."""
    if trace_path is not None:
        _write(trace_path, format_trace(trace if trace is not None else SimulationTrace()))
    if summary_path is not None:
        write_summary(summary, summary_path)
