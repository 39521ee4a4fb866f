"""Command-line front end: run a scenario, verify a pool against its labels,
or price a finite-horizon coin event.

    gtpsim run scenario.yaml [--horizon N] [--seed S] [--out DIR]
    gtpsim verify manifest.yaml [--horizon N] [--seed S] [--out DIR]
    gtpsim price pricing.yaml

`verify` exits nonzero iff any scenario's verdict contradicts its labels.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import yaml

from .analysis import (
    lower_probability_coin,
    strong_compliance_verdict,
    upper_probability_coin,
)
from .scenario import (
    STOCK_POOLS,
    Scenario,
    ScenarioError,
    check_scenario,
    parse_scenario_file,
    run_scenario,
    scenario_passes,
    event_proxy_for,
)
from .traceio import summary_dict, write_summary_json, write_trace_csv


def _safe_name(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def cmd_run(scenario: Scenario, horizon: Optional[int] = None,
            seed: Optional[int] = None, out_dir: Optional[Path] = None) -> dict:
    trace = run_scenario(scenario, horizon=horizon, seed=seed)
    verdict = strong_compliance_verdict(trace, event_proxy_for(scenario))
    summary = summary_dict(scenario.name, trace, verdict)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = _safe_name(scenario.name)
        write_trace_csv(trace, out_dir / f"{stem}.csv")
        write_summary_json(summary, out_dir / f"{stem}.json")
    return summary


def load_manifest(path: Path, horizon: Optional[int] = None,
                  seed: Optional[int] = None) -> List[Scenario]:
    """A manifest is either a directory of scenario YAMLs, a YAML file with a
    `scenarios:` path list, or a YAML file naming a built-in `pool:`."""
    if path.is_dir():
        return [parse_scenario_file(p) for p in sorted(path.glob("*.yaml"))]
    doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(doc, dict):
        raise ScenarioError("manifest must be a mapping or a directory")
    if "pool" in doc:
        pool = doc["pool"]
        if pool not in STOCK_POOLS:
            raise ScenarioError(f"unknown pool {pool!r}")
        kwargs = {}
        if horizon is not None:
            kwargs["horizon"] = horizon
        elif "horizon" in doc:
            kwargs["horizon"] = int(doc["horizon"])
        if seed is not None:
            kwargs["seed"] = seed
        elif "seed" in doc:
            kwargs["seed"] = int(doc["seed"])
        return STOCK_POOLS[pool](**kwargs)
    paths = doc.get("scenarios", [])
    return [parse_scenario_file(path.parent / p) for p in paths]


def cmd_verify(scenarios: List[Scenario], horizon: Optional[int] = None,
               seed: Optional[int] = None,
               out_dir: Optional[Path] = None) -> Tuple[int, List[str]]:
    """Run every scenario and cross-check its verdict against its labels.
    Returns (number of failures, report lines)."""
    lines = []
    failures = 0
    for scenario in scenarios:
        trace = run_scenario(scenario, horizon=horizon, seed=seed)
        verdict = check_scenario(scenario, trace)
        ok = scenario_passes(scenario, verdict)
        if not ok:
            failures += 1
        status = "pass" if ok else "FAIL"
        duty = "" if verdict.skeptic_duty_ok else " [skeptic fault]"
        lines.append(
            f"{status}  {scenario.name}  sup={verdict.sup_capital:.6g}"
            f" bound={'ok' if verdict.strong_bound_ok else 'VIOLATED'}"
            f" proxy={verdict.event_proxy_ok}{duty}"
        )
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            stem = _safe_name(scenario.name)
            write_trace_csv(trace, out_dir / f"{stem}.csv")
            write_summary_json(
                summary_dict(scenario.name, trace, verdict),
                out_dir / f"{stem}.json",
            )
    lines.append(f"{len(scenarios) - failures}/{len(scenarios)} scenarios passed")
    return failures, lines


# ---------------------------------------------------------------------------
# Pricing
# ---------------------------------------------------------------------------

def _event_from_spec(spec: dict, n: int):
    kind = spec.get("type")
    if kind == "threshold":
        op = spec.get("op", "ge")
        value = float(spec["value"])
        if op == "ge":
            return lambda bits: sum(bits) >= value
        if op == "le":
            return lambda bits: sum(bits) <= value
        if op == "eq":
            return lambda bits: sum(bits) == value
        raise ScenarioError(f"unknown threshold op {op!r}")
    if kind == "coordinate":
        index = int(spec["index"])
        value = int(spec.get("value", 1))
        if not 1 <= index <= n:
            raise ScenarioError(f"coordinate index {index} outside 1..{n}")
        return lambda bits: bits[index - 1] == value
    if kind == "leaves":
        masks = {int(m) for m in spec["bitmasks"]}
        def event(bits):
            mask = 0
            for b in bits:
                mask = (mask << 1) | b
            return mask in masks
        return event
    if kind == "all":
        return lambda bits: True
    if kind == "empty":
        return lambda bits: False
    raise ScenarioError(f"unknown event type {kind!r}")


def cmd_price(path: Path) -> Tuple[float, float]:
    doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if "p_script" not in doc or "event" not in doc:
        raise ScenarioError("pricing file needs p_script and event")
    p_script = [float(p) for p in doc["p_script"]]
    event = _event_from_spec(doc["event"], len(p_script))
    return (
        upper_probability_coin(p_script, event),
        lower_probability_coin(p_script, event),
    )


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtpsim",
        description="Betting-game strategy runner and verifier",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("file", type=Path)
    p_verify = sub.add_parser("verify", help="verify a manifest of scenarios")
    p_verify.add_argument("file", type=Path)
    for p in (p_run, p_verify):
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=Path, default=None)

    p_price = sub.add_parser("price", help="price a finite-horizon coin event")
    p_price.add_argument("file", type=Path)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            scenario = parse_scenario_file(args.file)
            summary = cmd_run(scenario, horizon=args.horizon, seed=args.seed,
                              out_dir=args.out)
            for key, value in summary.items():
                print(f"{key}: {value}")
            return 0
        if args.command == "verify":
            scenarios = load_manifest(args.file, horizon=args.horizon,
                                      seed=args.seed)
            failures, lines = cmd_verify(scenarios, horizon=args.horizon,
                                         seed=args.seed, out_dir=args.out)
            print("\n".join(lines))
            return 1 if failures else 0
        if args.command == "price":
            upper, lower = cmd_price(args.file)
            print(f"upper: {upper:.12f}")
            print(f"lower: {lower:.12f}")
            return 0
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
