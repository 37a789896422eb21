"""Nine-state handover automaton driven by fear bands.

States pair a provider slot (1..3) with an alert level (base, a, b); the
input alphabet is the fear band of the current tick and the output symbol
is one of S (stay in state), M (move one alert level), I (arm the
optimizer level) or C (request a handover).  Alert moves at most one level
per tick, so a handover request can only arise from an armed state.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum


class UnmappedProvider(KeyError):
    """Provider has no automaton slot assigned."""


class FearBand(IntEnum):
    B0 = 0
    B1 = 1
    B2 = 2
    B3 = 3


class Alert(IntEnum):
    BASE = 0
    A = 1
    B = 2

    @property
    def suffix(self) -> str:
        return ("", "a", "b")[self]


class MobilitySymbol(Enum):
    SELF = "S"
    MOVE = "M"
    OPTIMIZE = "I"
    HANDOVER = "C"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BandThresholds:
    """Fear-band boundaries.

    Bands partition [0, 1]: B0 = [0, low), B1 = [low, mid), B2 = [mid, high]
    and B3 = (high, 1].  The upper boundary of B2 is inclusive; all other
    internal boundaries belong to the band above.
    """

    th_low: float = 0.4
    th_mid: float = 0.6
    th_high: float = 0.8

    def __post_init__(self) -> None:
        if not 0.0 < self.th_low < self.th_mid < self.th_high < 1.0:
            raise ValueError("thresholds must satisfy 0 < low < mid < high < 1")


def classify(fear: float, thresholds: BandThresholds) -> FearBand:
    """Total band classification of a fear intensity."""
    if fear < thresholds.th_low:
        return FearBand.B0
    if fear < thresholds.th_mid:
        return FearBand.B1
    if fear <= thresholds.th_high:
        return FearBand.B2
    return FearBand.B3


@dataclass(frozen=True)
class AutomatonState:
    slot: int
    alert: Alert = Alert.BASE

    def __post_init__(self) -> None:
        if self.slot not in (1, 2, 3):
            raise ValueError(f"slot must be 1..3, got {self.slot}")

    @property
    def label(self) -> str:
        return f"{self.slot}{self.alert.suffix}"


ALL_STATES = tuple(
    AutomatonState(slot, alert) for slot in (1, 2, 3) for alert in Alert
)


def step(state: AutomatonState, fear: float,
         thresholds: BandThresholds) -> tuple[AutomatonState, MobilitySymbol]:
    """One transition.  Total over every (state, fear in [0, 1]) pair.

    The band names a target alert level (B0 -> base, B1 -> a, B2 -> b);
    alert converges toward it one level per tick.  B3 from the armed level
    requests a handover (C) and leaves the state unchanged pending the
    handover's execution; from lower levels it escalates like B2.
    """
    band = classify(fear, thresholds)
    alert = state.alert
    if band is FearBand.B3:
        if alert is Alert.B:
            return state, MobilitySymbol.HANDOVER
        target = Alert.B
    else:
        target = Alert(min(int(band), int(Alert.B)))
    if target == alert:
        return state, MobilitySymbol.SELF
    nxt = Alert(alert + (1 if target > alert else -1))
    symbol = MobilitySymbol.OPTIMIZE if nxt is Alert.B else MobilitySymbol.MOVE
    return AutomatonState(state.slot, nxt), symbol


class SlotMap:
    """Provider-to-slot assignment with handover-time remapping.

    The automaton has three slots; databases may carry more providers.
    Initially the first three providers hold slots 1..3.  When a handover
    adopts an unmapped provider it takes over the slot being vacated, and
    the remap is reported so the run log can flag it.
    """

    def __init__(self, assignments: dict[str, int]) -> None:
        if len(set(assignments.values())) != len(assignments):
            raise ValueError("slots must be unique")
        if any(slot not in (1, 2, 3) for slot in assignments.values()):
            raise ValueError("slots must be 1..3")
        self._assignments = dict(assignments)

    @classmethod
    def from_providers(cls, providers: list[str]) -> "SlotMap":
        if not providers:
            raise ValueError("at least one provider required")
        return cls({p: i + 1 for i, p in enumerate(providers[:3])})

    def slot_of(self, provider: str) -> int:
        try:
            return self._assignments[provider]
        except KeyError:
            raise UnmappedProvider(provider) from None

    def mapped(self, provider: str) -> bool:
        return provider in self._assignments

    def adopt(self, vacated: str, adopted: str) -> tuple["SlotMap", int, bool]:
        """Slot assignment after handing over ``vacated`` -> ``adopted``.

        Returns (new map, adopted provider's slot, whether a remap occurred).
        """
        if adopted in self._assignments:
            return self, self._assignments[adopted], False
        slot = self.slot_of(vacated)
        assignments = dict(self._assignments)
        del assignments[vacated]
        assignments[adopted] = slot
        return SlotMap(assignments), slot, True

    def as_dict(self) -> dict[str, int]:
        return dict(self._assignments)


def initial_state(provider: str, slots: SlotMap) -> AutomatonState:
    """Base state of the provider's slot; entry point of a run."""
    return AutomatonState(slots.slot_of(provider))


def complete_handover(state: AutomatonState, new_slot: int) -> AutomatonState:
    """Base state of the adopted provider's slot (same slot on a stay)."""
    return AutomatonState(new_slot)
