"""Surveyed route database: ordered GPS points with per-provider signals.

The database is a single road survey: rows appear in drive order, and
distance along the route accumulates great-circle hop lengths between
consecutive points.  A point is a bad-signal point (BSSP) for a provider
when that provider's reading is at or below the database's bad threshold.

CSV schema: ``label,lat,lon,<provider>,...`` with dBm values, a required
header, UTF-8 text and ``#`` comment lines.
"""

from __future__ import annotations

import csv
import io
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

EARTH_RADIUS_M = 6371008.8

DEFAULT_BAD_THRESHOLD_DBM = -80.0


class MalformedRow(ValueError):
    """A CSV row failed to parse or violated a field constraint."""


class EmptyDatabase(ValueError):
    """Fewer than two usable rows: no route to drive."""


class DuplicateLabel(ValueError):
    """Two rows share a point label."""


class UnknownProvider(KeyError):
    """The named provider is not a column of this database."""


class IndexOutOfRange(IndexError):
    """Point index outside the database."""


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")


def haversine_m(p1: GeoPoint, p2: GeoPoint) -> float:
    """Great-circle distance in metres on a sphere of Earth mean radius."""
    phi1 = math.radians(p1.latitude)
    phi2 = math.radians(p2.latitude)
    dphi = phi2 - phi1
    dlam = math.radians(p2.longitude - p1.longitude)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


@dataclass(frozen=True)
class SurveyPoint:
    """One surveyed location and its per-provider readings."""

    label: str
    point: GeoPoint
    signals: dict[str, float]

    def signal(self, provider: str) -> float:
        try:
            return self.signals[provider]
        except KeyError:
            raise UnknownProvider(provider) from None


class RouteDb:
    """Immutable-after-load route survey with distance and signal queries."""

    def __init__(self, providers: list[str], points: list[SurveyPoint],
                 bad_threshold_dbm: float = DEFAULT_BAD_THRESHOLD_DBM) -> None:
        if len(points) < 2:
            raise EmptyDatabase(f"need at least 2 points, got {len(points)}")
        self.providers = list(providers)
        self.points = list(points)
        self.bad_threshold_dbm = float(bad_threshold_dbm)
        cumulative = [0.0]
        for prev, cur in zip(self.points, self.points[1:]):
            hop = haversine_m(prev.point, cur.point)
            cumulative.append(cumulative[-1] + hop)
        for a, b in zip(cumulative, cumulative[1:]):
            if b <= a:
                raise MalformedRow("consecutive points coincide; route order broken")
        self.cumulative_m = cumulative
        self._bad_index: dict[str, list[int]] = {
            p: [i for i, pt in enumerate(self.points) if pt.signal(p) <= self.bad_threshold_dbm]
            for p in self.providers
        }

    # -- construction ------------------------------------------------------

    @classmethod
    def from_csv(cls, text: str,
                 bad_threshold_dbm: float = DEFAULT_BAD_THRESHOLD_DBM) -> "RouteDb":
        lines = []
        for number, raw in enumerate(text.splitlines(), start=1):
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            lines.append((number, raw))
        if not lines:
            raise EmptyDatabase("no rows at all")
        header_no, header = lines[0]
        columns = [c.strip() for c in next(csv.reader([header]))]
        if len(columns) < 4 or [c.lower() for c in columns[:3]] != ["label", "lat", "lon"]:
            raise MalformedRow(f"line {header_no}: header must be label,lat,lon,<providers>")
        providers = columns[3:]
        if len(set(providers)) != len(providers):
            raise MalformedRow(f"line {header_no}: duplicate provider column")

        points: list[SurveyPoint] = []
        seen: set[str] = set()
        for number, raw in lines[1:]:
            fields = [f.strip() for f in next(csv.reader([raw]))]
            if len(fields) != len(columns):
                raise MalformedRow(f"line {number}: expected {len(columns)} fields, got {len(fields)}")
            label = fields[0]
            if label in seen:
                raise DuplicateLabel(f"line {number}: duplicate label {label!r}")
            seen.add(label)
            try:
                lat, lon = float(fields[1]), float(fields[2])
                dbms = [float(f) for f in fields[3:]]
            except ValueError as exc:
                raise MalformedRow(f"line {number}: {exc}") from None
            for provider, dbm in zip(providers, dbms):
                if not -120.0 <= dbm <= 0.0:
                    raise MalformedRow(f"line {number}: {provider}={dbm} outside [-120, 0] dBm")
            try:
                geo = GeoPoint(lat, lon)
            except ValueError as exc:
                raise MalformedRow(f"line {number}: {exc}") from None
            points.append(SurveyPoint(label, geo, dict(zip(providers, dbms))))
        if len(points) < 2:
            raise EmptyDatabase(f"need at least 2 data rows, got {len(points)}")
        return cls(providers, points, bad_threshold_dbm)

    @classmethod
    def load(cls, path: str | Path,
             bad_threshold_dbm: float = DEFAULT_BAD_THRESHOLD_DBM) -> "RouteDb":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"), bad_threshold_dbm)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["label", "lat", "lon", *self.providers])
        for pt in self.points:
            row = [pt.label, repr(pt.point.latitude), repr(pt.point.longitude)]
            for provider in self.providers:
                dbm = pt.signal(provider)
                row.append(str(int(dbm)) if dbm.is_integer() else repr(dbm))
            writer.writerow(row)
        return out.getvalue()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RouteDb):
            return NotImplemented
        return (self.providers == other.providers
                and self.points == other.points
                and self.bad_threshold_dbm == other.bad_threshold_dbm)

    # -- queries -----------------------------------------------------------

    @property
    def route_length_m(self) -> float:
        return self.cumulative_m[-1]

    def _check_provider(self, provider: str) -> None:
        if provider not in self._bad_index:
            raise UnknownProvider(provider)

    def is_bad(self, index: int, provider: str) -> bool:
        return self.signal_at(index, provider) <= self.bad_threshold_dbm

    def next_bad_index(self, position_m: float, provider: str) -> int | None:
        """Index of the first bad point strictly ahead of ``position_m``."""
        self._check_provider(provider)
        for index in self._bad_index[provider]:
            if self.cumulative_m[index] > position_m:
                return index
        return None

    def next_bssp(self, position_m: float, provider: str) -> tuple[SurveyPoint, float] | None:
        """First bad-signal point strictly ahead, with its distance."""
        index = self.next_bad_index(position_m, provider)
        if index is None:
            return None
        return self.points[index], self.cumulative_m[index] - position_m

    def signal_at(self, index: int, provider: str) -> float:
        self._check_provider(provider)
        if not 0 <= index < len(self.points):
            raise IndexOutOfRange(index)
        return self.points[index].signal(provider)

    def index_at(self, position_m: float) -> int:
        """Index of the nearest point at or behind ``position_m``."""
        return max(bisect_right(self.cumulative_m, position_m) - 1, 0)

    def current_signal(self, position_m: float, provider: str) -> float:
        """Reading at the nearest passed point."""
        return self.signal_at(self.index_at(position_m), provider)

    def future_signal(self, position_m: float, provider: str) -> float:
        """Reading at the next point strictly ahead; last point's past the end."""
        self._check_provider(provider)
        index = bisect_right(self.cumulative_m, position_m)
        if index >= len(self.points):
            index = len(self.points) - 1
        return self.points[index].signal(provider)
