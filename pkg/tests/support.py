"""Hand-built micro cases and randomized case generation shared by the tests."""
from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from railcal.model import (
    ARRIVAL,
    DEPARTURE,
    NetworkModel,
    Passenger,
    Path,
    Station,
    TimeGrid,
    TrainEvent,
)
from railcal.pathfind import enumerate_paths
from railcal.sim import SimCase, SimResult


def make_network(
    runs: Dict[Tuple[str, int], Sequence[str]],
    congested: Sequence[str] = (),
    transfers: Dict[Tuple[str, str], int] = None,
    access_s: int = 60,
    egress_s: int = 60,
) -> NetworkModel:
    ids = sorted({s for run in runs.values() for s in run})
    stations = {
        sid: Station(sid, sid.lower(), sid in set(congested), access_s, egress_s)
        for sid in ids
    }
    network = NetworkModel(
        stations, {k: tuple(v) for k, v in runs.items()}, dict(transfers or {})
    )
    network.validate()
    return network


def train_events(
    train_id: str,
    line: str,
    direction: int,
    stops: Sequence[Tuple[str, int, int]],
    n_cars: int = 1,
) -> List[TrainEvent]:
    """Arrival plus departure events from (station, arr_s, dep_s) stops."""
    out: List[TrainEvent] = []
    for station, arr, dep in stops:
        out.append(TrainEvent(arr, ARRIVAL, train_id, line, direction, station, n_cars))
        out.append(TrainEvent(dep, DEPARTURE, train_id, line, direction, station, n_cars))
    return out


def path_on(network: NetworkModel, stations: Sequence[str], path_id: int = 1,
            attrs: Tuple[float, float, float] = (5.0, 0.2, 0.0)) -> Path:
    seq = tuple(stations)
    return Path(seq[0], seq[-1], path_id, seq, attrs, legs=network.derive_legs(seq))


WIDE_GRID = TimeGrid(0, 900, 7200)


def abc_network(congested: Sequence[str] = ()) -> NetworkModel:
    return make_network({("L", 0): ("A", "B", "C")}, congested=congested)


def abc_events(n_trains: int = 3, n_cars: int = 1, first_dep: int = 1000,
               headway: int = 300) -> List[TrainEvent]:
    """Trains over A->B->C: 30 s dwell, 120 s links, a fixed headway apart."""
    events: List[TrainEvent] = []
    for k in range(n_trains):
        dep_a = first_dep + k * headway
        stops = [
            ("A", dep_a - 30, dep_a),
            ("B", dep_a + 120, dep_a + 150),
            ("C", dep_a + 270, dep_a + 300),
        ]
        events += train_events(f"T{k + 1}", "L", 0, stops, n_cars=n_cars)
    return events


def abc_case(passengers: Sequence[Passenger], n_trains: int = 3, n_cars: int = 1,
             congested: Sequence[str] = (), grid: TimeGrid = WIDE_GRID) -> SimCase:
    network = abc_network(congested)
    network.paths = {("A", "C"): [path_on(network, ("A", "B", "C"))]}
    extra = sorted({(p.origin, p.dest) for p in passengers} - {("A", "C")})
    for od in extra:
        run = ("A", "B", "C")
        i, j = run.index(od[0]), run.index(od[1])
        network.paths[od] = [path_on(network, run[i:j + 1])]
    return SimCase(network, abc_events(n_trains, n_cars), list(passengers), grid)


# ---------------------------------------------------- randomized cases

def random_desk_case(rng: np.random.Generator) -> SimCase:
    """A small random network, schedule, and demand for property checks.

    One bidirectional trunk line of 3 to 6 stations, sometimes with a
    short branch joined by a transfer link; tight capacities so denied
    boardings actually occur.
    """
    n = int(rng.integers(3, 7))
    trunk = tuple(f"S{i}" for i in range(n))
    runs: Dict[Tuple[str, int], Tuple[str, ...]] = {
        ("A", 0): trunk,
        ("A", 1): tuple(reversed(trunk)),
    }
    transfers: Dict[Tuple[str, str], int] = {}
    if n >= 4 and rng.random() < 0.5:
        hub = trunk[int(rng.integers(1, n - 1))]
        branch = (hub,) + tuple(f"T{i}" for i in range(int(rng.integers(2, 4))))
        runs[("B", 0)] = branch
        runs[("B", 1)] = tuple(reversed(branch))
        transfers[(hub, hub)] = int(rng.integers(0, 180))
    congested = [s for run in runs.values() for s in run if rng.random() < 0.4]
    network = make_network(runs, congested=congested, transfers=transfers)

    link_times = {
        key: [int(rng.integers(60, 240))] * (len(run) - 1)
        for key, run in runs.items()
    }
    events: List[TrainEvent] = []
    for (line, direction), run in runs.items():
        start = int(rng.integers(60, 400))
        headway = int(rng.integers(200, 500))
        for k in range(int(rng.integers(2, 5))):
            arr = start + k * headway
            stops = []
            for i, sid in enumerate(run):
                stops.append((sid, arr, arr + 20))
                arr += 20 + (link_times[(line, direction)][i] if i + 1 < len(run) else 0)
            events += train_events(
                f"{line}{direction}n{k}", line, direction, stops,
                n_cars=int(rng.integers(1, 4)),
            )

    paths: Dict[Tuple[str, str], List[Path]] = {}
    ids = list(network.stations)
    for origin in ids:
        for dest in ids:
            if origin == dest:
                continue
            cands = enumerate_paths(
                network, origin, dest, link_times, dwell_s=20, k=2, max_transfers=1
            )
            if cands:
                paths[(origin, dest)] = [
                    Path(origin, dest, pid, c.stations,
                         (c.ride_s / 60.0, 0.2, float(c.n_transfers)), legs=c.legs)
                    for pid, c in enumerate(cands, start=1)
                ]
    network.paths = paths

    od_pool = sorted(paths)
    riders: List[Passenger] = []
    for i in range(int(rng.integers(10, 60))):
        origin, dest = od_pool[int(rng.integers(0, len(od_pool)))]
        riders.append(Passenger(f"p{i:03d}", origin, int(rng.integers(0, 2200)), dest))
    return SimCase(network, events, riders, TimeGrid(0, 600, 3600))


# ------------------------------------------------------ sim invariants

def check_accounting(result: SimResult) -> None:
    """Passenger conservation plus per-call boarding arithmetic."""
    c = result.counts
    assert c.total == c.exited + c.onboard_at_end + c.waiting_at_end + c.uninjected
    assert c.exited == int((result.tap_out >= 0).sum())
    tap_in = result.case.tap_in
    done = np.flatnonzero(result.tap_out >= 0)
    assert np.all(result.tap_out[done] > tap_in[done])
    for call in result.train_calls:
        load_before = call.load_after - call.boarded
        assert load_before >= 0
        allowance = max(0, call.capacity - load_before)
        assert call.boarded == min(allowance, call.queue_len)
        assert call.left_behind == call.queue_len - call.boarded


def check_fifb(result: SimResult) -> None:
    """Boarding order follows (platform join time, tap-in, id) at every call."""
    case = result.case
    departure_platforms = [
        (platform_i, time)
        for (time, kind, _train, _station, platform_i, _cars) in case._compiled_events
        if kind == DEPARTURE
    ]
    assert len(departure_platforms) == len(result.train_calls)
    call_times: Dict[int, List[int]] = defaultdict(list)
    for platform_i, time in departure_platforms:
        call_times[platform_i].append(time)

    for platform_i, log in result.platform_boardings.items():
        by_call: Dict[int, List[Tuple[int, int, int]]] = defaultdict(list)
        for join, tin, pax, seq in log:
            by_call[seq].append((join, tin, pax))
        last_boarded: Dict[int, Tuple[int, int, int]] = {}
        for seq, entries in by_call.items():
            assert entries == sorted(entries)
            assert all(join <= call_times[platform_i][seq] for join, _, _ in entries)
            last_boarded[seq] = entries[-1]
        # whoever was ready at an earlier call but boarded later must rank
        # behind everyone that earlier call took
        for seq, entries in by_call.items():
            for earlier, cutoff in last_boarded.items():
                if earlier >= seq:
                    continue
                earlier_time = call_times[platform_i][earlier]
                for key in entries:
                    if key[0] <= earlier_time:
                        assert key > cutoff
