import json
import re
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pedcross.cli import main
from pedcross.engine import run
from pedcross.pedestrians import FIELD_ADULT, PedestrianKind
from pedcross.scenario import (
    TRACE_HEADER,
    ScenarioError,
    accuracy,
    builtin_validation_scenarios,
    format_trace,
    load_scenario,
    parse_scenario,
    parse_scenario_text,
    parse_trace,
    quantize_trace,
    read_trace,
    summary_document,
    write_outputs,
)
from pedcross.engine import SimulationTrace
from pedcross.tls import Mode
from pedcross.world import Side

FIXTURES = Path(__file__).parent / "fixtures"
RECORD1 = FIXTURES / "record1.scenario"

MINIMAL = """\
[layout]
width = 3.6
length = 20

[[cohorts]]
side = "left"
count = 2
"""


def error_of(text):
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text(text, "t.scenario")
    return info.value


# -- parsing ------------------------------------------------------------------------


def test_minimal_file_gets_defaults():
    cfg = parse_scenario_text(MINIMAL)
    sc = cfg.scenario
    assert sc.step_len == 1.0
    assert sc.layout.beta == 3.0 and sc.layout.buffer == 0.5
    assert sc.max_steps == 600 and cfg.runs == 10
    assert sc.types[PedestrianKind.HEALTHY_ADULT] is FIELD_ADULT
    assert cfg.echo["engine"]["step_len"] == 1.0


def test_fixture_matches_record_1():
    cfg = parse_scenario(RECORD1)
    counts = {c.side: c.count for c in cfg.scenario.cohorts}
    assert counts == {Side.RIGHT: 29, Side.LEFT: 21}
    assert (cfg.scenario.layout.length, cfg.scenario.layout.width) == (43.62, 3.6)
    assert cfg.scenario == builtin_validation_scenarios()[0].scenario


def test_builtin_records():
    recs = builtin_validation_scenarios()
    assert [r.actual_time for r in recs] == [57, 53, 60, 39, 40]
    r3 = recs[2].scenario
    assert {c.side: c.count for c in r3.cohorts} == {Side.RIGHT: 23, Side.LEFT: 37}
    r5 = recs[4].scenario
    assert sum(c.count for c in r5.cohorts) == 6 and r5.layout.length == 45.045
    assert recs[1].reference_estimates["normal"] == 51.4


def test_beta_must_be_positive():
    err = error_of(MINIMAL.replace("[layout]\n", "[layout]\nbeta = -1\n"))
    assert "layout.beta" in str(err) and err.line == 2 and err.category == "config"


def test_unknown_key_is_reported_with_its_line():
    err = error_of(MINIMAL + "colour = \"red\"\n")
    assert "colour" in str(err) and err.line == 8


def test_unknown_section():
    assert "unknown key 'weather'" in str(error_of(MINIMAL + "[weather]\nrain = 1\n"))


def test_malformed_syntax_has_a_line():
    err = error_of("[layout\nwidth = 3\n")
    assert "malformed" in str(err) and err.line == 1


def test_unit_strings():
    cfg = parse_scenario_text(MINIMAL.replace("length = 20", 'length = "20 m"'))
    assert cfg.scenario.layout.length == 20.0
    err = error_of(MINIMAL.replace("length = 20", 'length = "20 s"'))
    assert "unit 's'" in str(err) and err.line == 3


def test_cohort_errors_name_the_entry():
    err = error_of(MINIMAL + '\n[[cohorts]]\nside = "up"\ncount = 1\n')
    assert "cohorts[1]" in str(err) or "side" in str(err)
    assert err.line == 10


def test_missing_file_is_an_io_error(tmp_path):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(tmp_path / "nope.scenario")
    assert info.value.category == "io"


def test_tls_table():
    cfg = parse_scenario(FIXTURES / "field_tls.scenario")
    assert cfg.tls.mode is Mode.DYNAMIC_WITH_PCS
    assert cfg.tls.seeds == 3
    assert sum(cfg.tls.demand.vehicle_rates.values()) * 3600 == pytest.approx(990)
    assert cfg.echo["tls"]["controller"]["min_walk"] == 7.0


@pytest.mark.parametrize(
    "line",
    ['mode = "sometimes"', "min_green = -5", 'horizon = "1 h"', "turn_left = 0.8", 'level = "z"', "seeds = 0"],
)
def test_bad_tls_values(line):
    err = error_of(MINIMAL + "\n[tls]\n" + line + "\n")
    assert err.line == 10 and err.category == "config"


FIELDS = [
    ("beta", "3.0", "m"),
    ("width", "3.6", "m"),
    ("length", "43.62", "m"),
    ("buffer", "0.5", "m"),
    ("step_len", "1", "s"),
]


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from(FIELDS),
    st.sampled_from(["neg", "zero", "unit", "word", "bool", "inf"]),
    st.sampled_from(["s", "kg", "m/s", "ft", "m"]),
)
def test_fuzzed_units_and_signs_are_rejected(field, mutation, other_unit):
    key, value, unit = field
    if mutation == "unit" and other_unit == unit:
        other_unit = "kg"
    bad = {
        "neg": f"-{value}",
        "zero": "0",
        "unit": f'"{value} {other_unit}"',
        "word": '"lots"',
        "bool": "true",
        "inf": "inf",
    }[mutation]
    text = RECORD1.read_text()
    text = re.sub(rf"^{key} = .*$", f"{key} = {bad}", text, count=1, flags=re.M)
    err = error_of(text)
    assert key in str(err)
    assert err.line == next(n for n, l in enumerate(text.splitlines(), 1) if l.startswith(f"{key} ="))


# -- output files ---------------------------------------------------------------------


def test_trace_round_trip():
    trace, _ = run(load_scenario("record4").scenario)
    text = format_trace(trace)
    assert text.splitlines()[0] == ",".join(TRACE_HEADER)
    back = parse_trace(text)
    assert back == quantize_trace(trace)
    assert format_trace(back) == text


def test_empty_trace_is_header_only(tmp_path):
    path = tmp_path / "t.csv"
    write_outputs(SimulationTrace(), summary_document(0, {}), path, tmp_path / "s.json")
    assert path.read_text() == ",".join(TRACE_HEADER) + "\n"
    assert read_trace(path) == SimulationTrace()


def test_summary_keys():
    cfg = load_scenario("record5")
    _, summary = run(cfg.scenario)
    doc = summary_document(cfg.scenario.seed, cfg.echo, run_summary=summary)
    for key in ("cohort_crossing_time_s", "vehicle_awt_s", "pedestrian_awt_s", "stranded_pedestrians",
                "no_move_fraction", "seed", "config_echo"):
        assert key in doc
    assert doc["seed"] == 1 and doc["config_echo"]["cohorts"][0]["count"] == 3


def test_write_failure_names_the_path(tmp_path):
    with pytest.raises(OSError, match="missing"):
        write_outputs(SimulationTrace(), {}, tmp_path / "missing" / "t.csv")


def test_accuracy_definition():
    assert accuracy(57.2, 57) == pytest.approx(99.6491, abs=1e-4)
    assert accuracy(40.5, 39) == pytest.approx(96.1538, abs=1e-4)
    assert accuracy(40.7, 40) == pytest.approx(98.25)
    with pytest.raises(ValueError):
        accuracy(1, 0)


# -- command line ---------------------------------------------------------------------


def test_simulate_is_byte_identical(tmp_path):
    paths = []
    for k in range(2):
        t, s = tmp_path / f"t{k}.csv", tmp_path / f"s{k}.json"
        assert main(["simulate", "--seed", "7", "--trace", str(t), "--summary", str(s)]) == 0
        paths.append((t.read_bytes(), s.read_bytes()))
    assert paths[0] == paths[1]
    doc = json.loads(paths[0][1])
    assert doc["seed"] == 7 and doc["config_echo"]["engine"]["seed"] == 7


def test_summary_echo_reproduces_the_run(tmp_path):
    t, s = tmp_path / "t.csv", tmp_path / "s.json"
    main(["simulate", "--scenario", str(RECORD1), "--seed", "3", "--trace", str(t), "--summary", str(s)])
    echo = json.loads(s.read_text())["config_echo"]
    # rebuild a scenario file from the echo alone
    lines = [f'name = "{echo["name"]}"', "[layout]"] + [f"{k} = {v}" for k, v in echo["layout"].items()]
    for c in echo["cohorts"]:
        lines += ["[[cohorts]]", f'side = "{c["side"]}"', f"count = {c['count']}", f'placement = "{c["placement"]}"']
    lines += ["[speeds]", f'mu = {echo["speeds"]["mu"]}', f'sigma = {echo["speeds"]["sigma"]}']
    lines += ["[engine]"] + [f"{k} = {str(v).lower() if isinstance(v, bool) else v}" for k, v in echo["engine"].items()]
    rebuilt = parse_scenario_text("\n".join(lines) + "\n")
    assert format_trace(run(rebuilt.scenario)[0]) == t.read_text()


def test_estimate_command(capsys, tmp_path):
    s = tmp_path / "e.json"
    assert main(["estimate", "--scenario", "record1", "--runs", "10", "--seed", "42", "--summary", str(s)]) == 0
    out = capsys.readouterr().out
    mean = float(re.search(r"mean cohort crossing time ([\d.]+)", out).group(1))
    assert 57 * 0.9 <= mean <= 57 * 1.1
    assert json.loads(s.read_text())["runs"] == 10


def test_validate_prints_five_rows(capsys):
    assert main(["validate", "--runs", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    rows = [l for l in out if l.startswith("record")][1:]
    assert len(rows) == 5
    assert "accuracy_%" in out[0]
    assert out[-1].startswith("mean accuracy")


def test_tls_commands(tmp_path, capsys):
    waits = tmp_path / "w.csv"
    summary = tmp_path / "s.json"
    assert main(["tls", "--scenario", str(FIXTURES / "field_tls.scenario"), "--mode", "static",
                 "--waits", str(waits), "--summary", str(summary)]) == 0
    doc = json.loads(summary.read_text())
    assert doc["vehicle_awt_s"] > 0 and doc["mode"] == "static"
    assert waits.read_text().startswith("mode,seed,population,wait_s")
    assert main(["tls-compare", "--seeds", "1", "--level", "a"]) == 0
    out = capsys.readouterr().out
    assert all(m.value in out for m in Mode)


def test_usage_errors_exit_2(capsys):
    assert main(["simulate", "--bogus"]) == 2
    assert main(["fly"]) == 2
    assert main([]) == 2
    assert main(["estimate", "--runs", "0"]) == 2
    assert "error[usage]" in capsys.readouterr().err


def test_config_and_io_errors(tmp_path, capsys):
    bad = tmp_path / "bad.scenario"
    bad.write_text(MINIMAL.replace("width = 3.6", "width = -3.6"))
    assert main(["simulate", "--scenario", str(bad), "--trace", str(tmp_path / "t.csv"), "--summary", str(tmp_path / "s.json")]) == 3
    err = capsys.readouterr().err
    assert "error[config]" in err and "bad.scenario:2:" in err and "layout.width" in err
    assert main(["simulate", "--scenario", str(tmp_path / "absent.scenario")]) == 4
    assert main(["simulate", "--trace", str(tmp_path / "no" / "t.csv")]) == 4
    assert main(["tls", "--scenario", str(RECORD1)]) == 3


def test_incomplete_runs_exit_5(tmp_path):
    short = tmp_path / "short.scenario"
    short.write_text(RECORD1.read_text().replace("runs = 10", "runs = 10\nmax_steps = 5"))
    code = main(["simulate", "--scenario", str(short), "--trace", str(tmp_path / "t.csv"), "--summary", str(tmp_path / "s.json")])
    assert code == 5
    assert json.loads((tmp_path / "s.json").read_text())["completed"] is False
