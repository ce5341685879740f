"""Event-driven, schedule-based network loading with finite train capacity.

Train arrivals and departures are replayed in chronological order. Each
platform holds a first-come-first-board queue ordered by platform join
time (tap-in plus access walk for fresh entries, alight time plus
transfer walk for connections), with ties broken by tap-in time and
then passenger id. At every departure the train grants a boarding
allowance out of its effective capacity; whoever does not fit waits for
the next train. Path assignment is the only stochastic element, so one
seed fixes the entire loading outcome.
"""
from __future__ import annotations

import csv
import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .capacity import CapacityParams
from .choice import ChoiceParams, ChoiceTable, sample_path_indices
from .events import build_event_list
from .model import (
    ARRIVAL,
    DEPARTURE,
    IntegrityError,
    NetworkModel,
    Passenger,
    Platform,
    TimeGrid,
    TrainEvent,
)


@dataclass(frozen=True)
class _PathPlan:
    """One path compiled to integer indices for the event loop."""

    board_platforms: Tuple[int, ...]
    alight_stations: Tuple[int, ...]
    first_join_offset: int
    transfer_walks: Tuple[int, ...]  # walk after leg j into queue of leg j+1


@dataclass(frozen=True)
class TrainCall:
    """Departure-side snapshot of one train at one station."""

    train_id: str
    station: str
    time: int
    capacity: int
    load_after: int
    boarded: int
    left_behind: int
    queue_len: int


@dataclass(frozen=True)
class SimCounts:
    total: int
    exited: int
    onboard_at_end: int
    waiting_at_end: int
    uninjected: int

    @property
    def unserved(self) -> int:
        return self.onboard_at_end + self.waiting_at_end + self.uninjected


class SimCase:
    """Immutable loading problem: network, event list, sorted demand, grid.

    Built once per dataset and reused across objective evaluations; only
    the parameter vectors and the seed vary between runs.
    """

    def __init__(
        self,
        network: NetworkModel,
        events: Sequence[TrainEvent],
        passengers: Sequence[Passenger],
        grid: TimeGrid,
    ):
        self.network = network
        self.grid = grid
        self.events = build_event_list(list(events))

        self.station_ids = list(network.stations)
        self.station_idx = {sid: i for i, sid in enumerate(self.station_ids)}
        self.congested = [network.stations[s].congested for s in self.station_ids]
        self.egress_walk = [network.stations[s].egress_walk_s for s in self.station_ids]

        self.platform_keys: List[Platform] = []
        self.platform_idx: Dict[Platform, int] = {}
        for (line, direction), run in network.line_runs.items():
            for sid in run:
                key = Platform(sid, line, direction)
                if key not in self.platform_idx:
                    self.platform_idx[key] = len(self.platform_keys)
                    self.platform_keys.append(key)

        # Demand in canonical order: tap-in time, then passenger id.
        self._passengers = sorted(passengers, key=lambda p: (p.tap_in_s, p.pax_id))
        self.n_passengers = len(self._passengers)
        self.pax_ids = [p.pax_id for p in self._passengers]
        self.tap_in = np.array([p.tap_in_s for p in self._passengers], dtype=np.int64)
        self.origin = [p.origin for p in self._passengers]
        self.dest = [p.dest for p in self._passengers]

        self.od_list: List[Tuple[str, str]] = sorted({(p.origin, p.dest) for p in self._passengers})
        od_pos = {od: i for i, od in enumerate(self.od_list)}
        self.pax_od = np.array(
            [od_pos[(p.origin, p.dest)] for p in self._passengers], dtype=np.int64
        )
        missing = [od for od in self.od_list if od not in network.paths or not network.paths[od]]
        if missing:
            raise IntegrityError(f"demand on OD pairs without any path: {missing[:5]}")

        self.od_plans: List[List[_PathPlan]] = [
            [self._compile_plan(network.paths[od][k]) for k in range(len(network.paths[od]))]
            for od in self.od_list
        ]

        self._compiled_events: List[Tuple[int, int, int, int, int, int]] = []
        self.train_ids: List[str] = []
        train_pos: Dict[str, int] = {}
        for ev in self.events:
            if ev.train_id not in train_pos:
                train_pos[ev.train_id] = len(self.train_ids)
                self.train_ids.append(ev.train_id)
            self._compiled_events.append((
                ev.time,
                ev.kind,
                train_pos[ev.train_id],
                self.station_idx[ev.station],
                self.platform_idx[Platform(ev.station, ev.line, ev.direction)],
                ev.n_cars,
            ))
        self._overlap_cache: Dict[float, Dict[Tuple[str, str], np.ndarray]] = {}

    def _compile_plan(self, path) -> _PathPlan:
        legs = path.legs
        first_board = legs[0].board
        access = self.network.stations[path.origin].access_walk_s
        offset = access
        if first_board != path.origin:
            offset += self.network.transfer_walk(path.origin, first_board)
        walks = tuple(
            self.network.transfer_walk(legs[j].alight, legs[j + 1].board)
            for j in range(len(legs) - 1)
        )
        return _PathPlan(
            board_platforms=tuple(self.platform_idx[l.board_platform] for l in legs),
            alight_stations=tuple(self.station_idx[l.alight] for l in legs),
            first_join_offset=offset,
            transfer_walks=walks,
        )

    def overlaps(self, decay: float) -> Dict[Tuple[str, str], np.ndarray]:
        if decay not in self._overlap_cache:
            from .choice import overlap_factors

            self._overlap_cache[decay] = {
                od: overlap_factors(plist, decay) for od, plist in self.network.paths.items()
            }
        return self._overlap_cache[decay]

    def passengers(self) -> List[Passenger]:
        return list(self._passengers)


@dataclass
class SimResult:
    """Loading outcome for one parameter vector and seed."""

    case: SimCase
    tap_out: np.ndarray  # -1 while still in system at the horizon
    path_choice: np.ndarray  # position of the taken path in the OD's path list
    train_calls: List[TrainCall]
    platform_boardings: Dict[int, List[Tuple[int, int, int, int]]]
    counts: SimCounts

    def journey_seconds(self, pax: int) -> int:
        return int(self.tap_out[pax] - self.case.tap_in[pax])


def assign_paths(
    case: SimCase,
    choice_params: ChoiceParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw one path per passenger by inverse CDF, in canonical order."""
    table = ChoiceTable(case.network, choice_params)
    draws = rng.random(case.n_passengers)
    out = np.zeros(case.n_passengers, dtype=np.int64)
    for od_i, od in enumerate(case.od_list):
        mask = case.pax_od == od_i
        if mask.any():
            out[mask] = sample_path_indices(table.cdf(od), draws[mask])
    return out


def run_simulation(
    case: SimCase,
    choice_params: ChoiceParams,
    capacity_params: CapacityParams,
    seed: int,
    forced_paths: Optional[np.ndarray] = None,
) -> SimResult:
    """Replay the event list once and return the loading outcome."""
    if forced_paths is not None:
        path_choice = np.asarray(forced_paths, dtype=np.int64).copy()
        if path_choice.shape != (case.n_passengers,):
            raise IntegrityError("forced_paths must give one path position per passenger")
    else:
        rng = np.random.default_rng(seed)
        path_choice = assign_paths(case, choice_params, rng)

    n_platforms = len(case.platform_keys)
    pending: List[List[Tuple[int, int, int]]] = [[] for _ in range(n_platforms)]
    ready: List[deque] = [deque() for _ in range(n_platforms)]
    # train state: [load, {alight_station: [pax...]}]
    trains: Dict[int, list] = {}

    tap_in = case.tap_in
    od_plans = case.od_plans
    pax_od = case.pax_od
    plans: List[_PathPlan] = [od_plans[pax_od[i]][path_choice[i]] for i in range(case.n_passengers)]
    leg_of = np.zeros(case.n_passengers, dtype=np.int64)
    tap_out = np.full(case.n_passengers, -1, dtype=np.int64)

    per_car = capacity_params.per_car
    load_resp = capacity_params.load_response
    queue_resp = capacity_params.queue_response
    congested = case.congested
    egress_walk = case.egress_walk

    train_calls: List[TrainCall] = []
    platform_boardings: Dict[int, List[Tuple[int, int, int, int]]] = {}
    call_seq = [0] * n_platforms

    ptr = 0
    n = case.n_passengers
    heappush = heapq.heappush
    heappop = heapq.heappop

    for time, kind, train_i, station_i, platform_i, n_cars in case._compiled_events:
        while ptr < n and tap_in[ptr] <= time:
            plan = plans[ptr]
            heappush(
                pending[plan.board_platforms[0]],
                (int(tap_in[ptr]) + plan.first_join_offset, int(tap_in[ptr]), ptr),
            )
            ptr += 1

        if kind == ARRIVAL:
            state = trains.get(train_i)
            if state is None:
                trains[train_i] = [0, {}]
                continue
            dropping = state[1].pop(station_i, None)
            if dropping:
                state[0] -= len(dropping)
                for pax in dropping:
                    j = leg_of[pax] = leg_of[pax] + 1
                    plan = plans[pax]
                    if j >= len(plan.board_platforms):
                        tap_out[pax] = time + egress_walk[station_i]
                    else:
                        join = time + plan.transfer_walks[j - 1]
                        heappush(pending[plan.board_platforms[j]], (join, int(tap_in[pax]), pax))
        else:
            state = trains.get(train_i)
            if state is None:
                state = trains[train_i] = [0, {}]
            pend = pending[platform_i]
            que = ready[platform_i]
            while pend and pend[0][0] <= time:
                que.append(heappop(pend))
            q_len = len(que)
            load = state[0]
            raw = per_car * n_cars
            if congested[station_i]:
                raw += load_resp * load + queue_resp * q_len
            cap = math.floor(raw)
            allowance = cap - load
            boarded = min(allowance, q_len) if allowance > 0 else 0
            if boarded:
                onboard = state[1]
                seq = call_seq[platform_i]
                log = platform_boardings.setdefault(platform_i, [])
                for _ in range(boarded):
                    join, tin, pax = que.popleft()
                    alight = plans[pax].alight_stations[leg_of[pax]]
                    bucket = onboard.get(alight)
                    if bucket is None:
                        bucket = onboard[alight] = []
                    bucket.append(pax)
                    log.append((join, tin, pax, seq))
                state[0] = load + boarded
            call_seq[platform_i] += 1
            train_calls.append(TrainCall(
                train_id=case.train_ids[train_i],
                station=case.station_ids[station_i],
                time=time,
                capacity=cap,
                load_after=state[0],
                boarded=boarded,
                left_behind=q_len - boarded,
                queue_len=q_len,
            ))

    exited = int((tap_out >= 0).sum())
    onboard_at_end = sum(state[0] for state in trains.values())
    waiting_at_end = sum(len(q) for q in ready) + sum(len(p) for p in pending)
    counts = SimCounts(
        total=n,
        exited=exited,
        onboard_at_end=onboard_at_end,
        waiting_at_end=waiting_at_end,
        uninjected=n - ptr,
    )
    return SimResult(case, tap_out, path_choice, train_calls, platform_boardings, counts)


def write_passenger_outcomes(result: SimResult, path: str) -> None:
    """CSV of per-passenger outcomes for inspection."""
    case = result.case
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["pax_id", "origin", "dest", "tap_in_s", "tap_out_s", "path_id", "status"])
        injected = case.n_passengers - result.counts.uninjected
        for i in range(case.n_passengers):
            od = case.od_list[case.pax_od[i]]
            path_id = case.network.paths[od][result.path_choice[i]].path_id
            if result.tap_out[i] >= 0:
                status, out = "exited", int(result.tap_out[i])
            else:
                status, out = ("in_system", "") if i < injected else ("uninjected", "")
            writer.writerow([case.pax_ids[i], od[0], od[1], int(case.tap_in[i]), out, path_id, status])


def write_train_calls(result: SimResult, path: str) -> None:
    """CSV of per-call loads, capacities, and denied boardings."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([
            "train_id", "station", "time_s", "capacity", "load_after",
            "boarded", "left_behind", "queue_len",
        ])
        for c in result.train_calls:
            writer.writerow([
                c.train_id, c.station, c.time, c.capacity, c.load_after,
                c.boarded, c.left_behind, c.queue_len,
            ])
