"""Deterministic tick-driven vehicle simulation.

Each tick advances the vehicle, appraises fear against the next bad-signal
point of the in-use provider, steps the automaton, dispatches the CSM
action and performs at most one handover decision per threat episode.
The run log records every tick and is exportable to CSV byte-stably.

Fear wiring: the appraised signal is the in-use provider's reading at the
targeted bad-signal point, so within one approach episode fear responds to
distance alone and rises monotonically.  The log still records the current
and next-point readings of the in-use white space at every tick.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field

from .automaton import (
    BandThresholds,
    FearBand,
    MobilitySymbol,
    SlotMap,
    classify,
    complete_handover,
    initial_state,
    step,
)
from .crsite import (
    CsmAction,
    HandoverAttempt,
    TimingModel,
    csm_dispatch,
    execute_handover,
    select_whitespace,
    sense,
)
from .fear import FearInputs, FearModel, FearParams

PATCH_M = 5.0


class RouteExhausted(Exception):
    """tick() called after the vehicle reached its stop position."""


def time_left(distance_m: float, speed_mps: float) -> float:
    """Seconds until the vehicle covers ``distance_m`` at constant speed."""
    if distance_m < 0.0:
        raise ValueError("distance_m must be non-negative")
    if speed_mps <= 0.0:
        raise ValueError("speed_mps must be positive")
    return distance_m / speed_mps


@dataclass(frozen=True)
class SimConfig:
    tick_s: float = 0.5
    speed_mps: float = 4.0
    start_m: float = 0.0
    stop_m: float | None = None
    initial_provider: str | None = None
    fear: FearParams = field(default_factory=FearParams)
    bands: BandThresholds = field(default_factory=BandThresholds)
    timing: TimingModel = field(default_factory=TimingModel)
    comm_importance: float = 1.0
    sor: float = 1.0
    vtp: float = 1.0
    prospect: bool = True
    desirability: float = -1.0
    start_seed: int | None = None

    def __post_init__(self) -> None:
        if self.tick_s <= 0.0:
            raise ValueError("tick_s must be positive")
        if self.speed_mps <= 0.0:
            raise ValueError("speed_mps must be positive")
        if self.start_m < 0.0:
            raise ValueError("start_m must be non-negative")


@dataclass(frozen=True)
class StayEpisode:
    """A deliberate keep-using decision at a threat: no better white space."""

    provider: str
    current_dbm: float
    future_dbm: float


@dataclass(frozen=True)
class TickEvent:
    tick: int
    position_m: float
    provider: str
    state: str
    fear: float
    band: FearBand
    symbol: MobilitySymbol
    action: CsmAction
    distance_to_bssp_m: float | None
    threat_dbm: float | None
    signal_now_dbm: float
    signal_future_dbm: float
    attempt: HandoverAttempt | None = None
    stay: StayEpisode | None = None
    loss: bool = False
    slot_remapped: bool = False


@dataclass(frozen=True)
class AttemptRecord:
    tick: int
    position_m: float
    attempt: HandoverAttempt
    pool: dict[str, tuple[float, float]]


@dataclass(frozen=True)
class StayRecord:
    tick: int
    position_m: float
    stay: StayEpisode
    pool: dict[str, tuple[float, float]]


@dataclass(frozen=True)
class LossRecord:
    tick: int
    position_m: float
    provider: str
    point_label: str


@dataclass
class RunLog:
    config: dict
    events: list[TickEvent] = field(default_factory=list)
    attempts: list[AttemptRecord] = field(default_factory=list)
    stays: list[StayRecord] = field(default_factory=list)
    losses: list[LossRecord] = field(default_factory=list)
    time_spent_s: dict[str, float] = field(default_factory=dict)

    def episodes(self) -> list[AttemptRecord | StayRecord]:
        """Handover decisions (attempts and stays) in tick order."""
        merged: list[AttemptRecord | StayRecord] = [*self.attempts, *self.stays]
        merged.sort(key=lambda record: record.tick)
        return merged

    def summary_text(self) -> str:
        successes = sum(1 for r in self.attempts if r.attempt.success)
        lines = [
            f"ticks: {len(self.events)}",
            f"handover attempts: {len(self.attempts)}"
            f" (successful: {successes}, failed: {len(self.attempts) - successes})",
            f"stay episodes: {len(self.stays)}",
            f"communication losses: {len(self.losses)}",
        ]
        for record in self.attempts:
            a = record.attempt
            verdict = "success" if a.success else "failure"
            lines.append(
                f"  tick {record.tick}: {a.from_provider} -> {a.to_provider} "
                f"required {a.required_s:.6f}s, left {a.time_left_s:.6f}s: {verdict}"
            )
        for record in self.stays:
            s = record.stay
            lines.append(
                f"  tick {record.tick}: stayed on {s.provider} "
                f"({s.current_dbm:g} -> {s.future_dbm:g} dBm)"
            )
        for key, value in sorted(self.time_spent_s.items()):
            lines.append(f"time spent on {key}: {value:.6f}s")
        return "\n".join(lines) + "\n"


class Simulation:
    """One vehicle run; owns its mutable state, shares the read-only db."""

    def __init__(self, config: SimConfig, db, fear_model: FearModel | None = None) -> None:
        self.config = config
        self.db = db
        self.fear_model = fear_model or FearModel(config.fear)
        self.stop_m = config.stop_m if config.stop_m is not None else db.route_length_m
        start = config.start_m
        if config.start_seed is not None:
            span = self.stop_m - config.speed_mps * config.tick_s
            start = random.Random(config.start_seed).uniform(config.start_m, max(span, config.start_m))
        if not 0.0 <= start < self.stop_m <= db.route_length_m:
            raise ValueError(
                f"need 0 <= start ({start}) < stop ({self.stop_m}) <= route length "
                f"({db.route_length_m})")
        self.position_m = start
        self.provider = config.initial_provider or db.providers[0]
        if self.provider not in db.providers:
            raise ValueError(f"initial provider {self.provider!r} not in database")
        self.slots = SlotMap.from_providers(db.providers)
        self.state = initial_state(self.provider, self.slots)
        self.tick_index = 0
        self.finished = False
        # (provider, point index) -> "stay" | "failed"; one decision per episode
        self._resolutions: dict[tuple[str, int], str] = {}
        self._prev_target: tuple[str, int] | None = None
        self.log = RunLog(config=_config_snapshot(config, start, self.stop_m))

    # -- helpers -----------------------------------------------------------

    def _spend(self, key: str, seconds: float) -> None:
        self.log.time_spent_s[key] = self.log.time_spent_s.get(key, 0.0) + seconds

    def _note_passed_threat(self) -> bool:
        """Crossing the targeted bad point closes its episode; a crossing
        without a successful handover or a deliberate stay is a loss."""
        if self._prev_target is None:
            return False
        provider, index = self._prev_target
        if provider != self.provider:
            self._prev_target = None
            return False
        if self.position_m < self.db.cumulative_m[index]:
            return False
        resolution = self._resolutions.pop((provider, index), None)
        self._prev_target = None
        if resolution == "stay":
            return False
        self.log.losses.append(LossRecord(
            tick=self.tick_index,
            position_m=self.position_m,
            provider=provider,
            point_label=self.db.points[index].label,
        ))
        return True

    # -- the tick pipeline --------------------------------------------------

    def tick(self) -> TickEvent:
        if self.finished:
            raise RouteExhausted(f"vehicle already at stop position {self.stop_m}")
        cfg = self.config
        self.position_m = min(self.position_m + cfg.speed_mps * cfg.tick_s, self.stop_m)
        loss = self._note_passed_threat()

        provider = self.provider
        target_index = self.db.next_bad_index(self.position_m, provider)
        if target_index is None:
            distance = None
            threat_dbm = None
            fear = 0.0
        else:
            distance = self.db.cumulative_m[target_index] - self.position_m
            threat_dbm = self.db.signal_at(target_index, provider)
            fear = self.fear_model.intensity(FearInputs(
                distance_m=distance,
                signal_dbm=threat_dbm,
                comm_importance=cfg.comm_importance,
                sor=cfg.sor,
                vtp=cfg.vtp,
                prospect=cfg.prospect,
                desirability=cfg.desirability,
            ))

        band = classify(fear, cfg.bands)
        action = csm_dispatch(band)
        stepped, symbol = step(self.state, fear, cfg.bands)
        self.state = stepped

        attempt = None
        stay = None
        remapped = False
        if symbol is MobilitySymbol.HANDOVER:
            assert target_index is not None and distance is not None
            episode = (provider, target_index)
            if episode not in self._resolutions:
                attempt, stay, remapped = self._decide_handover(episode, distance)
        elif action is CsmAction.INITIATE_SENSING:
            self._spend("sensing", cfg.timing.crst_s)
        elif action is CsmAction.INITIATE_OPTIMIZER:
            self._spend("sensing", cfg.timing.crst_s)
            self._spend("optimization", cfg.timing.megaot_s)

        event = TickEvent(
            tick=self.tick_index,
            position_m=self.position_m,
            provider=provider,
            state=stepped.label,
            fear=fear,
            band=band,
            symbol=symbol,
            action=action,
            distance_to_bssp_m=distance,
            threat_dbm=threat_dbm,
            signal_now_dbm=self.db.current_signal(self.position_m, provider),
            signal_future_dbm=self.db.future_signal(self.position_m, provider),
            attempt=attempt,
            stay=stay,
            loss=loss,
            slot_remapped=remapped,
        )
        self.log.events.append(event)

        if self.provider == provider and target_index is not None:
            self._prev_target = (provider, target_index)
        elif self.provider != provider:
            self._prev_target = None
            self._resolutions.clear()

        self.tick_index += 1
        if self.position_m >= self.stop_m:
            self.finished = True
        return event

    def _decide_handover(self, episode: tuple[str, int],
                         distance: float) -> tuple[HandoverAttempt | None, StayEpisode | None, bool]:
        cfg = self.config
        provider, _ = episode
        pool = sense(self.db, self.position_m)
        self._spend("sensing", cfg.timing.crst_s)
        self._spend("optimization", cfg.timing.megaot_s)
        choice = select_whitespace(pool, provider)
        snapshot = {p: (e.current_dbm, e.future_dbm) for p, e in pool.entries.items()}
        if choice == provider:
            entry = pool.entries[provider]
            stay = StayEpisode(provider, entry.current_dbm, entry.future_dbm)
            self.log.stays.append(StayRecord(self.tick_index, self.position_m, stay, snapshot))
            self._resolutions[episode] = "stay"
            return None, stay, False
        attempt = execute_handover(
            provider, choice, time_left(distance, cfg.speed_mps), cfg.timing)
        self.log.attempts.append(
            AttemptRecord(self.tick_index, self.position_m, attempt, snapshot))
        if attempt.success:
            self._spend("handover", cfg.timing.hot_s)
            self.slots, slot, remapped = self.slots.adopt(provider, choice)
            self.state = complete_handover(self.state, slot)
            self.provider = choice
            return attempt, None, remapped
        self._resolutions[episode] = "failed"
        return attempt, None, False

    def run(self) -> RunLog:
        while not self.finished:
            self.tick()
        return self.log


def run(config: SimConfig, db, fear_model: FearModel | None = None) -> RunLog:
    """Run a complete simulation; identical inputs give identical logs."""
    return Simulation(config, db, fear_model).run()


def _config_snapshot(config: SimConfig, start_m: float, stop_m: float) -> dict:
    return {
        "tick_s": config.tick_s,
        "speed_mps": config.speed_mps,
        "start_m": start_m,
        "stop_m": stop_m,
        "initial_provider": config.initial_provider,
        "fear_threshold": config.fear.fear_threshold,
        "combiner": config.fear.combiner,
        "distance_horizon_m": config.fear.distance_horizon_m,
        "signal_floor_dbm": config.fear.signal_floor_dbm,
        "signal_ceiling_dbm": config.fear.signal_ceiling_dbm,
        "th_low": config.bands.th_low,
        "th_mid": config.bands.th_mid,
        "th_high": config.bands.th_high,
        "crst_s": config.timing.crst_s,
        "megaot_s": config.timing.megaot_s,
        "hot_s": config.timing.hot_s,
        "comm_importance": config.comm_importance,
        "sor": config.sor,
        "vtp": config.vtp,
        "prospect": config.prospect,
        "desirability": config.desirability,
        "start_seed": config.start_seed,
    }


# -- invariants --------------------------------------------------------------

# Guard against floating-point representation noise, not model tolerance.
_FP_EPS = 1e-12


@dataclass(frozen=True)
class InvariantReport:
    name: str
    passed: bool
    violations: tuple[str, ...]
    stats: dict

    def lines(self) -> list[str]:
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'}"
        extras = [f"  {key}={value}" for key, value in sorted(self.stats.items())]
        problems = [f"  violation: {v}" for v in self.violations]
        return [head, *extras, *problems]


def check_invariant1(log: RunLog) -> InvariantReport:
    """While the distance to the threat strictly shrinks and no handover
    happens, fear must not drop."""
    violations = []
    pairs = 0
    for prev, cur in zip(log.events, log.events[1:]):
        if prev.distance_to_bssp_m is None or cur.distance_to_bssp_m is None:
            continue
        if prev.provider != cur.provider:
            continue
        if prev.attempt is not None or cur.attempt is not None:
            continue
        if not cur.distance_to_bssp_m < prev.distance_to_bssp_m:
            continue
        pairs += 1
        if cur.fear < prev.fear - _FP_EPS:
            violations.append(
                f"tick {cur.tick}: fear fell {prev.fear!r} -> {cur.fear!r} "
                f"while distance fell {prev.distance_to_bssp_m!r} -> {cur.distance_to_bssp_m!r}")
    return InvariantReport(
        name="Invariant1",
        passed=not violations,
        violations=tuple(violations),
        stats={"approaching_pairs": pairs},
    )


def check_invariant2(log: RunLog) -> InvariantReport:
    """Completed handovers must adopt the pool's best future signal and
    strictly improve on the in-use one; stays must have had no strictly
    better option."""
    violations = []
    for record in log.attempts:
        a = record.attempt
        if not a.success:
            continue
        futures = {p: f for p, (_, f) in record.pool.items()}
        best = max(futures.values())
        if futures[a.to_provider] < best:
            violations.append(
                f"tick {record.tick}: adopted {a.to_provider} at {futures[a.to_provider]} dBm "
                f"but the pool held {best} dBm")
        if futures[a.to_provider] <= futures[a.from_provider]:
            violations.append(
                f"tick {record.tick}: adopted {a.to_provider} at {futures[a.to_provider]} dBm, "
                f"no better than in-use {a.from_provider} at {futures[a.from_provider]} dBm")
    for record in log.stays:
        futures = {p: f for p, (_, f) in record.pool.items()}
        in_use = record.stay.provider
        better = {p: f for p, f in futures.items() if f > futures[in_use]}
        if better:
            violations.append(
                f"tick {record.tick}: stayed on {in_use} at {futures[in_use]} dBm "
                f"despite better option(s) {better}")
    return InvariantReport(
        name="Invariant2",
        passed=not violations,
        violations=tuple(violations),
        stats={"handovers": sum(1 for r in log.attempts if r.attempt.success),
               "stays": len(log.stays)},
    )


def check_invariant3(log: RunLog) -> InvariantReport:
    """Every attempt's verdict must equal the timing inequality; reports
    aggregate success/failure counts."""
    violations = []
    successes = failures = 0
    for record in log.attempts:
        a = record.attempt
        expected = a.time_left_s > a.required_s
        if a.success != expected:
            violations.append(
                f"tick {record.tick}: success={a.success} but time_left {a.time_left_s!r} "
                f"vs required {a.required_s!r} implies {expected}")
        if a.success:
            successes += 1
        else:
            failures += 1
    return InvariantReport(
        name="Invariant3",
        passed=not violations,
        violations=tuple(violations),
        stats={"successes": successes, "failures": failures},
    )


def check_all_invariants(log: RunLog) -> list[InvariantReport]:
    return [check_invariant1(log), check_invariant2(log), check_invariant3(log)]


# -- table replays ------------------------------------------------------------

REPLAY_DISTANCES_PATCHES = (1, 9, 13, 3, 2, 5, 3, 2, 10, 4)


def replay_attempts(timing: TimingModel, speed_mps: float = 4.0,
                    distances_patches: tuple[int, ...] = REPLAY_DISTANCES_PATCHES
                    ) -> list[HandoverAttempt]:
    """The fixed set of handover attempts behind the timing-outcome tables."""
    return [
        execute_handover("in_use", "candidate", time_left(d * PATCH_M, speed_mps), timing)
        for d in distances_patches
    ]


# -- CSV export ---------------------------------------------------------------

RUNLOG_COLUMNS = (
    "tick", "position_m", "provider", "state", "fear", "band", "symbol", "action",
    "distance_to_bssp_m", "threat_dbm", "signal_now_dbm", "signal_future_dbm",
    "ho_from", "ho_to", "ho_required_s", "ho_time_left_s", "ho_success",
    "stay_provider", "stay_current_dbm", "stay_future_dbm", "loss", "slot_remapped",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def runlog_to_csv(log: RunLog) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RUNLOG_COLUMNS)
    for e in log.events:
        a = e.attempt
        s = e.stay
        writer.writerow([
            e.tick, _fmt(e.position_m), e.provider, e.state, _fmt(e.fear),
            e.band.name, e.symbol.value, e.action.value,
            _fmt(e.distance_to_bssp_m), _fmt(e.threat_dbm),
            _fmt(e.signal_now_dbm), _fmt(e.signal_future_dbm),
            a.from_provider if a else "", a.to_provider if a else "",
            _fmt(a.required_s) if a else "", _fmt(a.time_left_s) if a else "",
            _fmt(a.success) if a else "",
            s.provider if s else "", _fmt(s.current_dbm) if s else "",
            _fmt(s.future_dbm) if s else "",
            _fmt(e.loss), _fmt(e.slot_remapped),
        ])
    return out.getvalue()


def _parse_optional_float(text: str) -> float | None:
    return float(text) if text else None


def parse_runlog_csv(text: str) -> list[TickEvent]:
    """Rebuild tick events from an exported run log (lossless round trip)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != RUNLOG_COLUMNS:
        raise ValueError("unexpected run-log header")
    events = []
    for row in reader:
        record = dict(zip(RUNLOG_COLUMNS, row))
        attempt = None
        if record["ho_from"]:
            attempt = HandoverAttempt(
                from_provider=record["ho_from"],
                to_provider=record["ho_to"],
                required_s=float(record["ho_required_s"]),
                time_left_s=float(record["ho_time_left_s"]),
                success=record["ho_success"] == "true",
            )
        stay = None
        if record["stay_provider"]:
            stay = StayEpisode(
                provider=record["stay_provider"],
                current_dbm=float(record["stay_current_dbm"]),
                future_dbm=float(record["stay_future_dbm"]),
            )
        events.append(TickEvent(
            tick=int(record["tick"]),
            position_m=float(record["position_m"]),
            provider=record["provider"],
            state=record["state"],
            fear=float(record["fear"]),
            band=FearBand[record["band"]],
            symbol=MobilitySymbol(record["symbol"]),
            action=CsmAction(record["action"]),
            distance_to_bssp_m=_parse_optional_float(record["distance_to_bssp_m"]),
            threat_dbm=_parse_optional_float(record["threat_dbm"]),
            signal_now_dbm=float(record["signal_now_dbm"]),
            signal_future_dbm=float(record["signal_future_dbm"]),
            attempt=attempt,
            stay=stay,
            loss=record["loss"] == "true",
            slot_remapped=record["slot_remapped"] == "true",
        ))
    return events
