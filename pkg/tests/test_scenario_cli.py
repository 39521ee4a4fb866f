"""Scenario parsing, trace serialization, and the CLI verbs."""

import json
import math
from pathlib import Path

import pytest

from gtpsim import GameKind, replay_verify, run_game
from gtpsim.cli import cmd_verify, load_manifest, main
from gtpsim.engine import Protocol
from gtpsim.hedges import HedgeValidationError
from gtpsim.randomized import KolmogorovReality
from gtpsim.scenario import (
    STOCK_POOLS,
    ScenarioError,
    check_scenario,
    parse_scenario,
    parse_scenario_file,
    run_scenario,
    scenario_passes,
)
from gtpsim.skeptic import BangBangSkeptic
from gtpsim.traceio import (
    CSV_HEADER,
    summary_dict,
    trace_from_csv_text,
    trace_to_csv_text,
)
from gtpsim.analysis import strong_compliance_verdict

from _support import mv_forecaster

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"

MINIMAL = """\
name: mini
protocol:
  kind: coin_tossing
horizon: 50
forecaster: {name: harmonic}
skeptic: {name: bc_fictional}
reality: {name: bc_comply}
"""


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def test_parse_minimal_scenario_defaults():
    scenario = parse_scenario(MINIMAL)
    assert scenario.name == "mini"
    assert scenario.protocol.initial_capital == 1.0
    assert scenario.seed is None
    assert scenario.expected_event == "none"


def test_parse_rejects_unknown_strategy():
    text = MINIMAL.replace("bc_fictional", "foo")
    with pytest.raises(ScenarioError, match="foo"):
        parse_scenario(text)


def test_parse_rejects_unknown_keys():
    with pytest.raises(ScenarioError, match="bogus"):
        parse_scenario(MINIMAL + "bogus: 1\n")


def test_parse_rejects_unknown_label():
    text = MINIMAL + "labels: {expected_event: nonsense}\n"
    with pytest.raises(ScenarioError):
        parse_scenario(text)


def test_parse_general_hedge_scenario_carries_validated_hedge():
    text = """\
name: hedged
protocol:
  kind: general_hedge
  hedge: power:r=1.5
  growth: identity
horizon: 10
forecaster: {name: mv}
skeptic: {name: zero}
reality: {name: ufgh_comply}
"""
    scenario = parse_scenario(text)
    assert scenario.protocol.kind is GameKind.GENERAL_HEDGE
    assert scenario.protocol.hedge.name == "power:r=1.5"
    assert scenario.growth.name == "identity"


def test_parse_rejects_invalid_hedge_power():
    text = """\
name: bad
protocol:
  kind: general_hedge
  hedge: power:r=3
horizon: 10
forecaster: {name: mv}
skeptic: {name: zero}
reality: {name: ufgh_comply}
"""
    with pytest.raises(HedgeValidationError):
        parse_scenario(text)


def test_shipped_example_scenarios_parse():
    for stem in ("coin_harmonic_fictional", "coin_broken_reality",
                 "first_round", "avoid_match"):
        scenario = parse_scenario_file(SCENARIOS / f"{stem}.yaml")
        trace = run_scenario(scenario, horizon=200)
        verdict = check_scenario(scenario, trace)
        assert scenario_passes(scenario, verdict), scenario.name


def test_example_manifest_lists_four_scenarios():
    scenarios = load_manifest(SCENARIOS / "examples_manifest.yaml")
    assert len(scenarios) == 4


def test_pool_manifest_horizon_handling():
    pool_file = SCENARIOS / "coin_comply_pool.yaml"
    from_file = load_manifest(pool_file)
    assert from_file and all(s.horizon == 10_000 for s in from_file)
    overridden = load_manifest(pool_file, horizon=50)
    assert all(s.horizon == 50 for s in overridden)
    assert len(from_file) == len(STOCK_POOLS["coin_comply"]())


# ---------------------------------------------------------------------------
# Trace serialization
# ---------------------------------------------------------------------------

def test_csv_round_trip_coin():
    scenario = parse_scenario(MINIMAL)
    trace = run_scenario(scenario, horizon=100)
    text = trace_to_csv_text(trace)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    back = trace_from_csv_text(text, scenario.protocol)
    assert replay_verify(back) is None
    assert back.capitals == trace.capitals


def test_csv_round_trip_mean_variance():
    protocol = Protocol(kind=GameKind.UNBOUNDED_FORECASTING)
    trace = run_game(
        protocol,
        mv_forecaster([0.5, -1.0], [1.0, 2.0]),
        BangBangSkeptic(amplitude=0.1, v_amplitude=0.05),
        KolmogorovReality(seed=3),
        50,
    )
    back = trace_from_csv_text(trace_to_csv_text(trace), protocol)
    assert replay_verify(back) is None
    assert [r.forecast.m for r in back.rounds] == [r.forecast.m for r in trace.rounds]


def test_summary_dict_fields():
    scenario = parse_scenario(MINIMAL)
    trace = run_scenario(scenario, horizon=64, seed=9)
    summary = summary_dict(scenario.name, trace, strong_compliance_verdict(trace))
    assert set(summary) == {
        "scenario", "seed", "sup_capital", "skeptic_duty_ok", "strong_bound_ok",
        "event_proxy_ok", "heads", "final_mean",
    }
    assert summary["seed"] == 9
    assert summary["heads"] == sum(r.outcome.x for r in trace.rounds)


# ---------------------------------------------------------------------------
# CLI verbs
# ---------------------------------------------------------------------------

def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def test_cli_run_writes_deterministic_outputs(tmp_path, capsys):
    scenario_file = _write(tmp_path / "mini.yaml", MINIMAL + "seed: 5\n")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(scenario_file), "--horizon", "200",
                 "--out", str(out_a)]) == 0
    assert main(["run", str(scenario_file), "--horizon", "200",
                 "--out", str(out_b)]) == 0
    capsys.readouterr()
    csv_a = (out_a / "mini.csv").read_bytes()
    csv_b = (out_b / "mini.csv").read_bytes()
    assert csv_a == csv_b
    summary = json.loads((out_a / "mini.json").read_text())
    assert summary["scenario"] == "mini" and summary["seed"] == 5


def test_cli_verify_passing_manifest(tmp_path, capsys):
    _write(tmp_path / "one.yaml", MINIMAL + "labels: {expected_event: strong_comply}\n")
    assert main(["verify", str(tmp_path), "--horizon", "300"]) == 0
    out = capsys.readouterr().out
    assert "1/1 scenarios passed" in out


def test_cli_verify_failing_manifest(tmp_path, capsys):
    broken = MINIMAL.replace("{name: bc_comply}", "{name: constant, x: 1.0}")
    _write(tmp_path / "broken.yaml",
           broken + "labels: {expected_event: strong_comply}\n")
    assert main(["verify", str(tmp_path), "--horizon", "300"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_verify_empty_manifest(tmp_path, capsys):
    manifest = _write(tmp_path / "empty.yaml", "scenarios: []\n")
    assert main(["verify", str(manifest)]) == 0
    assert "0/0 scenarios passed" in capsys.readouterr().out


def test_cli_error_exit_code(tmp_path, capsys):
    bad = _write(tmp_path / "bad.yaml", MINIMAL.replace("bc_fictional", "foo"))
    assert main(["run", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_price_coordinate_event(tmp_path, capsys):
    pricing = _write(tmp_path / "price.yaml", """\
p_script: [0.3]
event:
  type: coordinate
  index: 1
""")
    assert main(["price", str(pricing)]) == 0
    out = capsys.readouterr().out
    assert "upper: 0.300000000000" in out
    assert "lower: 0.300000000000" in out


def test_cli_price_threshold_and_all_events(tmp_path, capsys):
    pricing = _write(tmp_path / "maj.yaml", """\
p_script: [0.5, 0.5, 0.5]
event:
  type: threshold
  op: ge
  value: 2
""")
    assert main(["price", str(pricing)]) == 0
    out = capsys.readouterr().out
    assert "upper: 0.500000000000" in out
    everything = _write(tmp_path / "all.yaml", """\
p_script: [0.2, 0.9]
event: {type: all}
""")
    assert main(["price", str(everything)]) == 0
    out = capsys.readouterr().out
    assert "upper: 1.000000000000" in out and "lower: 1.000000000000" in out


def test_cmd_verify_report_shape():
    scenarios = [parse_scenario(MINIMAL + "labels: {expected_event: strong_comply}\n")]
    failures, lines = cmd_verify(scenarios, horizon=100)
    assert failures == 0
    assert len(lines) == 2 and lines[0].startswith("pass")
