"""Scenario runner and validation front door.

Scenario files are INI-style text with one section per subsystem::

    [route]
    source = builtin:survey        ; or a CSV path, relative to this file
    bad_threshold_dbm = -80

    [sim]
    tick_s = 0.5
    speed_mps = 4.0
    start_m = 0
    ;stop_m =                      ; route end when omitted
    initial_provider = SP1
    comm_importance = 1.0
    sor = 1.0
    vtp = 1.0
    prospect = true
    desirability = -1.0
    ;seed =                        ; random start position when set

    [fear]
    fear_threshold = 0.0
    combiner = mean
    distance_horizon_m = 75
    signal_floor_dbm = -100
    signal_ceiling_dbm = -30

    [pdfa]
    th_low = 0.4
    th_mid = 0.6
    th_high = 0.8

    [timing]
    preset = worst                 ; worst|average|best, or crst_s/megaot_s/hot_s

    [output]
    dir = out

Optional ``[fuzzy:likelihood]``, ``[fuzzy:undesirability]`` and
``[fuzzy:ig]`` sections replace a subsystem's membership functions and
rule base; see ``parse_fuzzy_section``.

Subcommands: ``run``, ``validate``, ``replay-tables``.  The env var
``FEAROVER_LOG`` sets log verbosity (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import datasets
from .automaton import BandThresholds, UnmappedProvider
from .crsite import TIMING_PRESETS, TimingModel
from .fear import FearModel, FearParams
from .fuzzy import FuzzySystem, LinguisticVariable, MembershipFunction, RuleBase
from .route import RouteDb
from .sim import (
    SimConfig,
    check_all_invariants,
    replay_attempts,
    run,
    runlog_to_csv,
)

log = logging.getLogger("fearover")


class ScenarioError(Exception):
    """A scenario file failed to load; the message is anchored to its source."""


@dataclass
class Scenario:
    db: RouteDb
    config: SimConfig
    fear_model: FearModel
    out_dir: Path


def _get(parser: configparser.ConfigParser, section: str, key: str, cast, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ScenarioError(f"[{section}] {key} = {raw!r}: {exc}") from None


def _bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_membership(raw: str) -> MembershipFunction:
    """``a,b,c,d`` breakpoints; three values make a triangle."""
    parts = [float(p) for p in raw.split(",")]
    if len(parts) == 3:
        a, b, c = parts
        return MembershipFunction(a, b, b, c)
    if len(parts) == 4:
        return MembershipFunction(*parts)
    raise ValueError(f"expected 3 or 4 breakpoints, got {len(parts)}")


def _parse_terms(raw: str) -> tuple[tuple[str, MembershipFunction], ...]:
    terms = []
    for item in raw.split(";"):
        item = item.strip()
        if not item:
            continue
        label, _, quad = item.partition(":")
        if not quad:
            raise ValueError(f"term {item!r} must look like LABEL:a,b,c,d")
        terms.append((label.strip(), parse_membership(quad)))
    return tuple(terms)


def _parse_rules(raw: str) -> RuleBase:
    rules = []
    for item in raw.split(";"):
        item = item.strip()
        if not item:
            continue
        antecedent, _, consequent = item.partition("->")
        if not consequent:
            raise ValueError(f"rule {item!r} must look like i,j->k")
        ant = tuple(int(p) for p in antecedent.split(","))
        rules.append((ant, int(consequent)))
    return RuleBase(tuple(rules))


def parse_fuzzy_section(parser: configparser.ConfigParser, section: str,
                        template: FuzzySystem) -> FuzzySystem:
    """Build a subsystem from ``input1_terms``/``input2_terms``/
    ``output_terms``/``rules``/``grid_resolution``/``monotone`` keys,
    defaulting each to the template's.  ``monotone = off`` drops the
    rectified surface and exposes the raw Mamdani pipeline."""
    def variable(key: str, base: LinguisticVariable) -> LinguisticVariable:
        raw = parser.get(section, key, fallback=None)
        if raw is None:
            return base
        try:
            return LinguisticVariable(base.name, base.lo, base.hi, _parse_terms(raw))
        except ValueError as exc:
            raise ScenarioError(f"[{section}] {key}: {exc}") from None

    inputs = (variable("input1_terms", template.inputs[0]),
              variable("input2_terms", template.inputs[1]))
    output = variable("output_terms", template.output)
    raw_rules = parser.get(section, "rules", fallback=None)
    try:
        rule_base = _parse_rules(raw_rules) if raw_rules is not None else template.rule_base
    except ValueError as exc:
        raise ScenarioError(f"[{section}] rules: {exc}") from None
    resolution = _get(parser, section, "grid_resolution", int, template.grid_resolution)
    monotone = template.monotone
    if not _get(parser, section, "monotone", _bool, True):
        monotone = None
    try:
        return FuzzySystem(
            inputs=inputs,
            output=output,
            rule_base=rule_base,
            grid_resolution=resolution,
            monotone=monotone,
            monotone_nodes=template.monotone_nodes,
        )
    except ValueError as exc:
        raise ScenarioError(f"[{section}]: {exc}") from None


_SECTIONS = ("route", "sim", "fear", "pdfa", "timing", "output",
             "fuzzy:likelihood", "fuzzy:undesirability", "fuzzy:ig")


def load_scenario(path: str | Path, preset_override: str | None = None,
                  seed_override: int | None = None,
                  out_override: str | None = None) -> Scenario:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ScenarioError(f"{path}: unknown section [{section}]")

    threshold = _get(parser, "route", "bad_threshold_dbm", float, -80.0)
    source = parser.get("route", "source", fallback="builtin:survey")
    if source.startswith("builtin:"):
        name = source.removeprefix("builtin:")
        try:
            db = datasets.load_builtin(name, threshold)
        except KeyError as exc:
            raise ScenarioError(f"{path}: [route] source: {exc.args[0]}") from None
    else:
        csv_path = Path(source)
        if not csv_path.is_absolute():
            csv_path = path.parent / csv_path
        if not csv_path.exists():
            raise ScenarioError(f"{path}: [route] source: no such file {csv_path}")
        try:
            db = RouteDb.load(csv_path, threshold)
        except ValueError as exc:
            raise ScenarioError(f"{csv_path}: {exc}") from None

    try:
        fear = FearParams(
            fear_threshold=_get(parser, "fear", "fear_threshold", float, 0.0),
            combiner=parser.get("fear", "combiner", fallback="mean"),
            distance_horizon_m=_get(parser, "fear", "distance_horizon_m", float, 75.0),
            signal_floor_dbm=_get(parser, "fear", "signal_floor_dbm", float, -100.0),
            signal_ceiling_dbm=_get(parser, "fear", "signal_ceiling_dbm", float, -30.0),
        )
        bands = BandThresholds(
            th_low=_get(parser, "pdfa", "th_low", float, 0.4),
            th_mid=_get(parser, "pdfa", "th_mid", float, 0.6),
            th_high=_get(parser, "pdfa", "th_high", float, 0.8),
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from None

    preset = preset_override or parser.get("timing", "preset", fallback=None)
    if preset is not None and preset != "custom":
        if preset not in TIMING_PRESETS:
            raise ScenarioError(
                f"{path}: [timing] preset {preset!r} not one of {sorted(TIMING_PRESETS)}")
        timing = TIMING_PRESETS[preset]
    else:
        try:
            timing = TimingModel(
                crst_s=_get(parser, "timing", "crst_s", float, 0.2),
                megaot_s=_get(parser, "timing", "megaot_s", float, 0.527e-6),
                hot_s=_get(parser, "timing", "hot_s", float, 5.0),
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}: [timing] {exc}") from None

    seed = seed_override if seed_override is not None else _get(parser, "sim", "seed", int, None)
    try:
        config = SimConfig(
            tick_s=_get(parser, "sim", "tick_s", float, 0.5),
            speed_mps=_get(parser, "sim", "speed_mps", float, 4.0),
            start_m=_get(parser, "sim", "start_m", float, 0.0),
            stop_m=_get(parser, "sim", "stop_m", float, None),
            initial_provider=parser.get("sim", "initial_provider", fallback=None),
            fear=fear,
            bands=bands,
            timing=timing,
            comm_importance=_get(parser, "sim", "comm_importance", float, 1.0),
            sor=_get(parser, "sim", "sor", float, 1.0),
            vtp=_get(parser, "sim", "vtp", float, 1.0),
            prospect=_get(parser, "sim", "prospect", _bool, True),
            desirability=_get(parser, "sim", "desirability", float, -1.0),
            start_seed=seed,
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}: [sim] {exc}") from None

    model = FearModel(fear)
    overrides = {
        "fuzzy:likelihood": "likelihood_system",
        "fuzzy:undesirability": "undesirability_system",
        "fuzzy:ig": "global_intensity_system",
    }
    for section, attr in overrides.items():
        if parser.has_section(section):
            setattr(model, attr, parse_fuzzy_section(parser, section, getattr(model, attr)))

    out_dir = Path(out_override or parser.get("output", "dir", fallback="out"))
    if not out_dir.is_absolute():
        out_dir = Path.cwd() / out_dir
    log.info("scenario %s: %d route points over %.0f m, providers %s",
             path, len(db.points), db.route_length_m, ", ".join(db.providers))
    return Scenario(db=db, config=config, fear_model=model, out_dir=out_dir)


def _write_outputs(scenario: Scenario, log_) -> list:
    scenario.out_dir.mkdir(parents=True, exist_ok=True)
    (scenario.out_dir / "runlog.csv").write_text(runlog_to_csv(log_), encoding="utf-8")
    (scenario.out_dir / "summary.txt").write_text(log_.summary_text(), encoding="utf-8")
    reports = check_all_invariants(log_)
    lines = []
    for report in reports:
        lines.extend(report.lines())
    (scenario.out_dir / "invariants.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return reports


def _load_and_run(args: argparse.Namespace):
    """Scenario + run log, or an exit code on configuration errors."""
    try:
        scenario = load_scenario(args.scenario, args.preset, args.seed, args.out)
        log_ = run(scenario.config, scenario.db, scenario.fear_model)
    except (ScenarioError, ValueError, UnmappedProvider) as exc:
        detail = exc.args[0] if exc.args else exc
        print(f"error: {args.scenario}: {detail}", file=sys.stderr)
        return None, None, 2
    log.info("run finished: %d ticks, %d attempts, %d stays, %d losses",
             len(log_.events), len(log_.attempts), len(log_.stays), len(log_.losses))
    return scenario, log_, 0


def cmd_run(args: argparse.Namespace) -> int:
    scenario, log_, code = _load_and_run(args)
    if code:
        return code
    reports = _write_outputs(scenario, log_)
    failed = [r.name for r in reports if not r.passed]
    print(f"wrote {scenario.out_dir}/runlog.csv, summary.txt, invariants.txt")
    if failed:
        print(f"invariant failures: {', '.join(failed)}")
        if args.strict:
            return 1
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    _, log_, code = _load_and_run(args)
    if code:
        return code
    ok = True
    for report in check_all_invariants(log_):
        print("\n".join(report.lines()))
        ok = ok and report.passed
    return 0 if ok else 1


def cmd_replay_tables(_args: argparse.Namespace) -> int:
    expected_totals = {"worst": 4, "average": 9, "best": 10}
    all_good = True
    for name, timing in TIMING_PRESETS.items():
        attempts = replay_attempts(timing)
        successes = sum(1 for a in attempts if a.success)
        print(f"{name} case (sensing {timing.crst_s}s, optimisation {timing.megaot_s}s, "
              f"setup {timing.hot_s}s):")
        print("  distance_patches  time_left_s  required_s  outcome")
        for distance, attempt in zip((1, 9, 13, 3, 2, 5, 3, 2, 10, 4), attempts):
            outcome = "success" if attempt.success else "failure"
            print(f"  {distance:>16}  {attempt.time_left_s:>11.2f}  "
                  f"{attempt.required_s:>10.6f}  {outcome}")
        print(f"  total: {successes}/{len(attempts)} successful")
        all_good = all_good and successes == expected_totals[name]
    return 0 if all_good else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fearover",
        description="Fear-controlled spectrum-handover simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", required=True, help="scenario INI file")
        p.add_argument("--out", help="output directory (overrides [output] dir)")
        p.add_argument("--preset", choices=sorted(TIMING_PRESETS),
                       help="timing preset (overrides [timing])")
        p.add_argument("--seed", type=int, help="random start-position seed")

    p_run = sub.add_parser("run", help="run a scenario and write artifacts")
    scenario_args(p_run)
    p_run.add_argument("--strict", action="store_true",
                       help="exit 1 when an invariant fails")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="run a scenario and check invariants")
    scenario_args(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_tab = sub.add_parser("replay-tables",
                           help="replay the timing-outcome tables for all presets")
    p_tab.set_defaults(func=cmd_replay_tables)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("FEAROVER_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    raise SystemExit(main())
