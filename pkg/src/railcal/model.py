"""Domain types for schedule-based transit network loading."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

DEFAULT_ACCESS_WALK_S = 60
DEFAULT_EGRESS_WALK_S = 60
DEFAULT_TRANSFER_WALK_S = 120

ARRIVAL = 0
DEPARTURE = 1


class RailcalError(Exception):
    """Base class for all package errors."""


class FileFormatError(RailcalError):
    """A data file could not be parsed; carries file name and line number."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class IntegrityError(RailcalError):
    """Cross-reference violation, e.g. a path naming an unknown station."""


class ScheduleError(RailcalError):
    """Timetable inconsistency, e.g. departure before arrival."""


class BoundsError(RailcalError):
    """Parameter vector outside the feasible box."""


class ConfigError(RailcalError):
    """Invalid run configuration."""


class DatasetError(RailcalError):
    """Missing or corrupt calibration dataset."""


@dataclass(frozen=True)
class Station:
    """A station with its congestion flag and walk-time constants."""

    id: str
    name: str
    congested: bool
    access_walk_s: int = DEFAULT_ACCESS_WALK_S
    egress_walk_s: int = DEFAULT_EGRESS_WALK_S


class Platform(NamedTuple):
    """Boarding location: one station served by one line in one direction."""

    station: str
    line: str
    direction: int


class Leg(NamedTuple):
    """One ride: board `board` on (line, direction), alight at `alight`."""

    line: str
    direction: int
    board: str
    alight: str

    @property
    def board_platform(self) -> Platform:
        return Platform(self.board, self.line, self.direction)


@dataclass(frozen=True)
class Path:
    """A candidate route for one OD pair.

    `attrs` is the (in-vehicle time [min], relative walking time,
    number of transfers) vector entering the systematic utility; the
    overlap term is computed separately from the station sequence.
    """

    origin: str
    dest: str
    path_id: int
    stations: Tuple[str, ...]
    attrs: Tuple[float, ...]
    legs: Tuple[Leg, ...] = ()

    def __post_init__(self):
        if len(self.stations) < 2:
            raise IntegrityError(
                f"path {self.origin}->{self.dest}#{self.path_id} has fewer than 2 stations"
            )
        if self.stations[0] != self.origin or self.stations[-1] != self.dest:
            raise IntegrityError(
                f"path {self.origin}->{self.dest}#{self.path_id} endpoints "
                f"{self.stations[0]}..{self.stations[-1]} do not match its OD pair"
            )
        if len(self.attrs) != 3:
            raise IntegrityError(
                f"path {self.origin}->{self.dest}#{self.path_id} carries "
                f"{len(self.attrs)} attributes, expected 3"
            )

    @property
    def n_stations(self) -> int:
        return len(self.stations)


@dataclass(frozen=True)
class TrainEvent:
    """Arrival or departure of one train at one station."""

    time: int
    kind: int  # ARRIVAL or DEPARTURE
    train_id: str
    line: str
    direction: int
    station: str
    n_cars: int

    def sort_key(self) -> Tuple[int, int, str]:
        # Ties: arrivals before departures, then train id.
        return (self.time, self.kind, self.train_id)


@dataclass
class Passenger:
    """One smart-card record; tap_out is None for pure demand input."""

    pax_id: str
    origin: str
    tap_in_s: int
    dest: str
    tap_out_s: Optional[int] = None


@dataclass(frozen=True)
class TimeGrid:
    """Uniform interval grid over the study period.

    The horizon is padded up to a whole number of intervals so every
    in-period timestamp maps to an index in 1..n_intervals; timestamps
    past the horizon map to larger indices (late exits stay countable).
    """

    period_start_s: int
    interval_s: int
    horizon_s: int

    def __post_init__(self):
        if self.interval_s <= 0 or self.horizon_s <= 0:
            raise ConfigError("interval and horizon must be positive")

    @property
    def n_intervals(self) -> int:
        return math.ceil(self.horizon_s / self.interval_s)

    @property
    def padded_horizon_s(self) -> int:
        return self.n_intervals * self.interval_s

    def interval_of(self, t: int) -> int:
        """1-based interval index of timestamp t (t may exceed the horizon)."""
        return (t - self.period_start_s) // self.interval_s + 1

    def contains(self, t: int) -> bool:
        return self.period_start_s <= t < self.period_start_s + self.padded_horizon_s


@dataclass
class NetworkModel:
    """Static network: stations, line runs, transfer walks, OD path sets."""

    stations: Dict[str, Station]
    line_runs: Dict[Tuple[str, int], Tuple[str, ...]]
    transfer_walk_s: Dict[Tuple[str, str], int]
    paths: Dict[Tuple[str, str], List[Path]] = field(default_factory=dict)

    def validate(self) -> None:
        """Check every cross reference; raise IntegrityError on the first failure."""
        for (line, direction), run in self.line_runs.items():
            if len(run) < 2:
                raise IntegrityError(f"line {line} direction {direction} has fewer than 2 stations")
            if len(set(run)) != len(run):
                raise IntegrityError(f"line {line} direction {direction} visits a station twice")
            for sid in run:
                if sid not in self.stations:
                    raise IntegrityError(f"line {line} references unknown station {sid!r}")
        for (a, b) in self.transfer_walk_s:
            for sid in (a, b):
                if sid not in self.stations:
                    raise IntegrityError(f"transfer link references unknown station {sid!r}")
        for (o, d), path_list in self.paths.items():
            seen_ids = set()
            for p in path_list:
                if (p.origin, p.dest) != (o, d):
                    raise IntegrityError(f"path filed under {(o, d)} belongs to {(p.origin, p.dest)}")
                if p.path_id in seen_ids:
                    raise IntegrityError(f"duplicate path id {p.path_id} for OD {o}->{d}")
                seen_ids.add(p.path_id)
                for sid in p.stations:
                    if sid not in self.stations:
                        raise IntegrityError(
                            f"path {o}->{d}#{p.path_id} references unknown station {sid!r}"
                        )

    def walk_times(self, station: str) -> Tuple[int, int]:
        st = self.stations[station]
        return st.access_walk_s, st.egress_walk_s

    def transfer_walk(self, from_station: str, to_station: str) -> int:
        return self.transfer_walk_s.get((from_station, to_station), DEFAULT_TRANSFER_WALK_S)

    def derive_legs(self, stations: Tuple[str, ...]) -> Tuple[Leg, ...]:
        """Segment a station sequence into rides along line runs.

        Greedy longest-run matching: from the current boarding station,
        ride whichever (line, direction) covers the most upcoming
        stations; ties break on the smaller (line, direction) key.
        Adjacent stations covered by no run must be joined by an explicit
        transfer link (a walk step, which produces no leg).
        """
        index: Dict[str, List[Tuple[str, int]]] = {}
        for key, run in sorted(self.line_runs.items()):
            for sid in run:
                index.setdefault(sid, []).append(key)

        legs: List[Leg] = []
        i = 0
        while i < len(stations) - 1:
            best_key = None
            best_advance = 1
            for key in index.get(stations[i], ()):
                run = self.line_runs[key]
                pos = run.index(stations[i])
                advance = 1
                while (
                    pos + advance < len(run)
                    and i + advance < len(stations)
                    and run[pos + advance] == stations[i + advance]
                ):
                    advance += 1
                if advance > best_advance:
                    best_advance = advance
                    best_key = key
            if best_key is None:
                if (stations[i], stations[i + 1]) in self.transfer_walk_s:
                    i += 1  # walk between distinct stations
                    continue
                raise IntegrityError(
                    f"no line run covers {stations[i]}->{stations[i + 1]} "
                    f"and no transfer link joins them"
                )
            line, direction = best_key
            legs.append(Leg(line, direction, stations[i], stations[i + best_advance - 1]))
            i += best_advance - 1
        if not legs:
            raise IntegrityError(f"station sequence {stations} contains no ride")
        return tuple(legs)
