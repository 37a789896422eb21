"""CR-Site facade: timing model, CSM rule dispatch, sensing and handover.

Spectrum sensing is a database lookup (the survey is the world model) and
white-space optimisation is max-future-signal selection; both retain only
their latency constants from the real subsystems they stand in for.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .automaton import FearBand
from .route import RouteDb


class EmptyPool(ValueError):
    """select_whitespace called with no sensed white spaces."""


@dataclass(frozen=True)
class TimingModel:
    """Latency budget of one spectrum-mobility task, in seconds."""

    crst_s: float = 0.2        # spectrum sensing
    megaot_s: float = 0.527e-6  # white-space optimisation
    hot_s: float = 5.0         # connection setup

    def __post_init__(self) -> None:
        if min(self.crst_s, self.megaot_s, self.hot_s) < 0.0:
            raise ValueError("latencies must be non-negative")


TIMING_PRESETS: dict[str, TimingModel] = {
    "worst": TimingModel(0.2, 0.527e-6, 5.0),
    "average": TimingModel(0.1, 0.527e-6, 2.0),
    "best": TimingModel(0.05, 0.527e-6, 1.0),
}


def required_mobility_time(timing: TimingModel) -> float:
    """Sensing + optimisation + connection setup as one budget."""
    return timing.crst_s + timing.megaot_s + timing.hot_s


class CsmAction(Enum):
    KEEP_CURRENT = "keep_current"
    INITIATE_SENSING = "initiate_sensing"
    INITIATE_OPTIMIZER = "initiate_optimizer"
    INITIATE_HANDOVER = "initiate_handover"


_DISPATCH = {
    FearBand.B0: CsmAction.KEEP_CURRENT,
    FearBand.B1: CsmAction.INITIATE_SENSING,
    FearBand.B2: CsmAction.INITIATE_OPTIMIZER,
    FearBand.B3: CsmAction.INITIATE_HANDOVER,
}


def csm_dispatch(band: FearBand) -> CsmAction:
    """The four fear-band control rules, total over bands."""
    return _DISPATCH[band]


@dataclass(frozen=True)
class PoolEntry:
    current_dbm: float
    future_dbm: float


@dataclass(frozen=True)
class WhiteSpacePool:
    """Per-provider (current, future) readings; insertion order is the
    provider order of the database and breaks selection ties."""

    entries: dict[str, PoolEntry]


def sense(db: RouteDb, position_m: float,
          providers: list[str] | None = None) -> WhiteSpacePool:
    """Sample every provider's current and next-point signal."""
    chosen = providers if providers is not None else db.providers
    entries = {
        p: PoolEntry(db.current_signal(position_m, p), db.future_signal(position_m, p))
        for p in chosen
    }
    return WhiteSpacePool(entries)


def select_whitespace(pool: WhiteSpacePool, in_use: str) -> str:
    """Provider with the best future signal; ties and no-improvement keep
    the in-use white space."""
    if not pool.entries:
        raise EmptyPool("no white spaces sensed")
    if in_use not in pool.entries:
        raise EmptyPool(f"in-use provider {in_use!r} missing from pool")
    best_future = max(entry.future_dbm for entry in pool.entries.values())
    if pool.entries[in_use].future_dbm >= best_future:
        return in_use
    for provider, entry in pool.entries.items():
        if entry.future_dbm == best_future:
            return provider
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class HandoverAttempt:
    """One spectrum-mobility attempt and its timing verdict."""

    from_provider: str
    to_provider: str
    required_s: float
    time_left_s: float
    success: bool


def execute_handover(from_provider: str, to_provider: str, time_left_s: float,
                     timing: TimingModel) -> HandoverAttempt:
    """Attempt a handover; it succeeds iff it finishes strictly before the
    vehicle reaches the bad-signal point."""
    required = required_mobility_time(timing)
    return HandoverAttempt(
        from_provider=from_provider,
        to_provider=to_provider,
        required_s=required,
        time_left_s=time_left_s,
        success=time_left_s > required,
    )
