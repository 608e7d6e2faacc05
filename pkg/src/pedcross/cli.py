"""Command-line entry point: ``pedcross <command> [flags]``.

Exit status: 0 success, 2 usage error, 3 invalid configuration, 4 file I/O
failure, 5 a simulation that hit ``max_steps`` before everyone crossed.
Errors go to stderr as ``pedcross: error[<category>]: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import engine
from .scenario import (
    ScenarioConfig,
    ScenarioError,
    TlsConfig,
    accuracy,
    builtin_names,
    builtin_validation_scenarios,
    dump_echo,
    load_scenario,
    summary_document,
    write_outputs,
    write_summary,
)
from .tls import (
    SYNTHETIC_LEVELS,
    ControllerParams,
    Mode,
    compare_modes,
    field_demand,
    simulate_intersection,
    write_waiting_times,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_INCOMPLETE = 5

log = logging.getLogger("pedcross")


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int):
        super().__init__(message)
        self.category = category
        self.code = code


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pedcross", description="Crosswalk crossing-time simulator and signal-timing harness.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress and the normalized config")
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True
    scen_help = f"built-in record ({', '.join(builtin_names())}) or scenario file path"

    s = sub.add_parser("simulate", help="one run, writing a trace CSV and a summary")
    s.add_argument("--scenario", default="record1", help=scen_help)
    s.add_argument("--seed", type=int, help="override the scenario seed")
    s.add_argument("--trace", default="trace.csv", help="trace CSV path (default: trace.csv)")
    s.add_argument("--summary", default="summary.json", help="summary path (default: summary.json)")

    e = sub.add_parser("estimate", help="mean cohort crossing time over replications")
    e.add_argument("--scenario", default="record1", help=scen_help)
    e.add_argument("--runs", type=int, help="replications (default: the scenario's, usually 10)")
    e.add_argument("--seed", type=int, help="override the scenario seed")
    e.add_argument("--summary", help="also write a summary document")

    t = sub.add_parser("tls", help="one intersection run in one signal mode")
    t.add_argument("--scenario", help="scenario file with a [tls] table (default: field demand)")
    t.add_argument("--mode", choices=[m.value for m in Mode], help="signal mode (overrides the file)")
    t.add_argument("--level", choices=sorted(SYNTHETIC_LEVELS), help="scale demand to a synthetic level")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--summary", help="summary path")
    t.add_argument("--waits", help="per-agent waiting-time CSV path")

    c = sub.add_parser("tls-compare", help="all three signal modes over several seeds")
    c.add_argument("--scenario", help="scenario file with a [tls] table (default: field demand)")
    c.add_argument("--seeds", type=int, help="number of seeds, 0..N-1 (default: the file's, else 10)")
    group = c.add_mutually_exclusive_group()
    group.add_argument("--level", choices=sorted(SYNTHETIC_LEVELS), help="scale demand to one synthetic level")
    group.add_argument("--grid", action="store_true", help="run all six synthetic demand levels")
    c.add_argument("--summary", help="summary path")
    c.add_argument("--waits", help="per-agent waiting-time CSV path")

    v = sub.add_parser("validate", help="estimated versus observed times for the five field records")
    v.add_argument("--runs", type=int, default=10)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--placement", choices=["normal", "poisson", "t"], default="normal")
    return p


def _load(name: str) -> ScenarioConfig:
    try:
        cfg = load_scenario(name)
    except ScenarioError as exc:
        raise CliError(exc.category, str(exc), EXIT_IO if exc.category == "io" else EXIT_CONFIG) from exc
    log.info("config %s", dump_echo(cfg.echo))
    return cfg


def _with_seed(cfg: ScenarioConfig, seed: Optional[int]) -> ScenarioConfig:
    if seed is None:
        return cfg
    echo = dict(cfg.echo)
    echo["engine"] = dict(echo["engine"], seed=seed)
    return replace(cfg, scenario=replace(cfg.scenario, seed=seed), echo=echo)


def _tls_config(path: Optional[str]) -> tuple:
    if path is None:
        cfg = TlsConfig(Mode.DYNAMIC_WITH_PCS, field_demand(), ControllerParams(), seeds=10)
        echo = {"tls": {"demand": "field", "mode": cfg.mode.value}}
        return cfg, echo
    sc = _load(path)
    if sc.tls is None:
        raise CliError("config", f"{path}: no [tls] table", EXIT_CONFIG)
    return sc.tls, sc.echo


def _io(fn, *args):
    try:
        fn(*args)
    except OSError as exc:
        raise CliError("io", str(exc), EXIT_IO) from exc


def cmd_simulate(args) -> int:
    cfg = _with_seed(_load(args.scenario), args.seed)
    trace, summary = engine.run(cfg.scenario)
    doc = summary_document(cfg.scenario.seed, cfg.echo, run_summary=summary)
    _io(write_outputs, trace, doc, args.trace, args.summary)
    print(f"cohort_crossing_time_s {summary.cohort_crossing_time:.1f}  steps {summary.steps}  "
          f"no_move_fraction {summary.no_move_fraction:.4f}  trace {args.trace}  summary {args.summary}")
    return EXIT_OK if summary.completed else EXIT_INCOMPLETE


def cmd_estimate(args) -> int:
    cfg = _with_seed(_load(args.scenario), args.seed)
    runs = cfg.runs if args.runs is None else args.runs
    if runs < 1:
        raise CliError("usage", "--runs must be >= 1", EXIT_USAGE)
    est = engine.estimate_crossing_time(cfg.scenario, runs)
    print(f"{cfg.name}: mean cohort crossing time {est.mean:.2f} s over {runs} runs (seeds {cfg.scenario.seed}..{cfg.scenario.seed + runs - 1})")
    print("per run: " + " ".join(f"{t:g}" for t in est.per_run))
    if args.summary:
        doc = summary_document(
            cfg.scenario.seed,
            cfg.echo,
            extra={"cohort_crossing_time_s": est.mean, "completed": est.completed, "runs": runs, "per_run_s": est.per_run,
                   "no_move_fraction": max(s.no_move_fraction for s in est.summaries)},
        )
        _io(write_summary, doc, args.summary)
    return EXIT_OK if est.completed else EXIT_INCOMPLETE


def cmd_tls(args) -> int:
    tcfg, echo = _tls_config(args.scenario)
    mode = Mode(args.mode) if args.mode else tcfg.mode
    demand = tcfg.demand.scaled(*SYNTHETIC_LEVELS[args.level]) if args.level else tcfg.demand
    m = simulate_intersection(demand, mode, args.seed, tcfg.params)
    print(f"{mode.value}: vehicle AWT {m.vehicle_awt:.2f} s (max {m.vehicle_max_wait:.0f}), "
          f"pedestrian AWT {m.pedestrian_awt:.2f} s (max {m.pedestrian_max_wait:.0f}), stranded {m.stranded_pedestrian_count}")
    if args.summary:
        _io(write_summary, summary_document(args.seed, echo, metrics=m, extra={"mode": mode.value, "level": args.level}), args.summary)
    if args.waits:
        _io(write_waiting_times, [m], args.waits)
    return EXIT_OK


def cmd_tls_compare(args) -> int:
    tcfg, echo = _tls_config(args.scenario)
    n = args.seeds if args.seeds is not None else (tcfg.seeds if args.scenario else 10)
    if n < 1:
        raise CliError("usage", "--seeds must be >= 1", EXIT_USAGE)
    seeds = list(range(n))
    levels = SYNTHETIC_LEVELS if args.grid else ({args.level: SYNTHETIC_LEVELS[args.level]} if args.level else {"field": (1.0, 1.0)})
    table = {}
    print(f"{'level':<6} {'mode':<12} {'veh_awt_s':>10} {'sd':>6} {'ped_awt_s':>10} {'sd':>6} {'veh_max':>8} {'ped_max':>8} {'stranded':>8}")
    all_metrics = []
    for name, (vf, pf) in levels.items():
        rows = compare_modes(tcfg.demand.scaled(vf, pf), seeds, params=tcfg.params)
        table[name] = rows
        for r in rows:
            all_metrics.extend(r.per_seed)
            print(f"{name:<6} {r.mode:<12} {r.vehicle_awt:>10.2f} {r.vehicle_awt_sd:>6.2f} {r.pedestrian_awt:>10.2f} "
                  f"{r.pedestrian_awt_sd:>6.2f} {r.vehicle_max_wait:>8.0f} {r.pedestrian_max_wait:>8.0f} {r.stranded_pedestrians:>8d}")
    if args.summary:
        doc = summary_document(
            seeds[0],
            echo,
            extra={
                "seeds": seeds,
                "comparison": {
                    name: {r.mode: {"vehicle_awt_s": r.vehicle_awt, "vehicle_awt_sd": r.vehicle_awt_sd,
                                    "pedestrian_awt_s": r.pedestrian_awt, "pedestrian_awt_sd": r.pedestrian_awt_sd,
                                    "vehicle_max_wait_s": r.vehicle_max_wait, "pedestrian_max_wait_s": r.pedestrian_max_wait,
                                    "stranded_pedestrians": r.stranded_pedestrians} for r in rows}
                    for name, rows in table.items()
                },
            },
        )
        _io(write_summary, doc, args.summary)
    if args.waits:
        _io(write_waiting_times, all_metrics, args.waits)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.runs < 1:
        raise CliError("usage", "--runs must be >= 1", EXIT_USAGE)
    records = builtin_validation_scenarios(args.placement, args.seed)
    print(f"{'record':<8} {'pedestrians':<18} {'actual_s':>8} {'estimated_s':>11} {'accuracy_%':>10} {'reference_s':>11}")
    accs = []
    ok = True
    for rec in records:
        est = engine.estimate_crossing_time(rec.scenario, args.runs)
        ok &= est.completed
        acc = accuracy(est.mean, rec.actual_time)
        accs.append(acc)
        cohorts = " / ".join(f"{c['side']} {c['count']}" for c in rec.config.echo["cohorts"])
        print(f"{rec.name:<8} {cohorts:<18} {rec.actual_time:>8.0f} {est.mean:>11.1f} {acc:>10.2f} "
              f"{rec.reference_estimates.get(args.placement, float('nan')):>11.1f}")
    print(f"mean accuracy {sum(accs) / len(accs):.2f}%")
    return EXIT_OK if ok else EXIT_INCOMPLETE


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "tls": cmd_tls,
    "tls-compare": cmd_tls_compare,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"pedcross: error[{exc.category}]: {exc}", file=sys.stderr)
        if exc.code == EXIT_USAGE:
            parser.print_usage(sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
