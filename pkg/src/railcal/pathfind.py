"""Small-k path enumeration over line runs, for building fixture path sets.

The loader treats OD path sets as input data; this enumerator exists so
fixture and example networks can generate plausible candidate sets (up
to k routes per OD, ranked by ride plus transfer time). It is not part
of the loading or calibration pipeline.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .model import IntegrityError, Leg, NetworkModel


@dataclass(frozen=True)
class CandidatePath:
    """Enumerated route with the timings used to rank it."""

    stations: Tuple[str, ...]
    legs: Tuple[Leg, ...]
    ride_s: int
    transfer_walk_s: int
    n_transfers: int

    def generalized_s(self, transfer_penalty_s: int) -> int:
        return self.ride_s + self.transfer_walk_s + self.n_transfers * transfer_penalty_s


def enumerate_paths(
    network: NetworkModel,
    origin: str,
    dest: str,
    link_times: Dict[Tuple[str, int], Sequence[int]],
    dwell_s: int = 30,
    k: int = 3,
    max_transfers: int = 2,
    transfer_penalty_s: int = 300,
) -> List[CandidatePath]:
    """Enumerate up to k simple routes from origin to dest.

    `link_times` gives per-run link ride seconds (len(run) - 1 entries).
    Routes never revisit a station; ties on station sequence keep the
    faster variant. Result is sorted by generalized time.
    """
    for key, run in network.line_runs.items():
        if key in link_times and len(link_times[key]) != len(run) - 1:
            raise IntegrityError(f"link_times for {key} must have {len(run) - 1} entries")

    found: Dict[Tuple[str, ...], CandidatePath] = {}

    def emit(stations: List[str], legs: List[Leg], ride: int, walk: int) -> None:
        cand = CandidatePath(tuple(stations), tuple(legs), ride, walk, len(legs) - 1)
        key = cand.stations
        old = found.get(key)
        if old is None or cand.generalized_s(transfer_penalty_s) < old.generalized_s(transfer_penalty_s):
            found[key] = cand

    def ride_options(run_key: Tuple[str, int], start_idx: int, visited: set) -> List[int]:
        # All strictly-forward alighting positions reachable without revisits.
        run = network.line_runs[run_key]
        out = []
        for idx in range(start_idx + 1, len(run)):
            if run[idx] in visited:
                break
            out.append(idx)
        return out

    def extend(
        station: str,
        stations: List[str],
        legs: List[Leg],
        visited: set,
        ride: int,
        walk: int,
        last_run: Optional[Tuple[str, int]],
    ) -> None:
        if station == dest:
            if legs:
                emit(stations, legs, ride, walk)
            return
        if len(legs) - 1 >= max_transfers and legs:
            boardable = []
        else:
            boardable = [key for key, run in network.line_runs.items() if station in run]
        for run_key in sorted(boardable):
            if run_key == last_run:
                continue  # reboarding the run just left is never useful
            if legs:  # transferring: a walk link must exist at this station
                if (station, station) not in network.transfer_walk_s:
                    continue
                step_walk = network.transfer_walk_s[(station, station)]
            else:
                step_walk = 0
            run = network.line_runs[run_key]
            start_idx = run.index(station)
            times = link_times.get(run_key)
            for alight_idx in ride_options(run_key, start_idx, visited):
                seg = run[start_idx + 1 : alight_idx + 1]
                seg_ride = (
                    sum(times[start_idx:alight_idx]) if times is not None
                    else 120 * (alight_idx - start_idx)
                )
                seg_ride += dwell_s * (alight_idx - start_idx - 1)
                new_visited = visited | set(seg)
                extend(
                    run[alight_idx],
                    stations + list(seg),
                    legs + [Leg(run_key[0], run_key[1], station, run[alight_idx])],
                    new_visited,
                    ride + seg_ride,
                    walk + step_walk,
                    run_key,
                )

    if origin not in network.stations or dest not in network.stations:
        raise IntegrityError(f"unknown OD endpoint in {origin}->{dest}")
    extend(origin, [origin], [], {origin}, 0, 0, None)
    ranked = sorted(
        found.values(),
        key=lambda c: (c.generalized_s(transfer_penalty_s), c.stations),
    )
    return ranked[:k]
