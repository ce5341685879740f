"""Bundled example case: a 12-station, two-line network with a peak surge.

The two lines share their western terminus and the central interchange,
so cross-line OD pairs have two competing routes. Demand concentrates an
eastbound surge through the interchange for two headways, sized so the
eastbound platform there denies boardings under the built-in scenarios
while nearly every passenger is still served before the schedule runs
out.
"""
from __future__ import annotations

from pathlib import Path as _FsPath
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import fileio
from .config import CONFIG_FILE, RunSettings, write_config_file
from .model import NetworkModel, Passenger, Path, Station, TrainEvent
from .pathfind import enumerate_paths

DEMAND_SEED = 7

DWELL_S = 30
HEADWAY_S = 180
FIRST_DEP_S = 63900  # 17:45, forty-five minutes before the study period
LAST_DEP_S = 69300  # 19:15, keeps trains running until the last riders exit
N_CARS = 8

LINE_1 = ("WST", "CPK", "MUS", "CTR", "RIV", "HBR", "EST")
LINE_2 = ("WST", "GDN", "ZOO", "CTR", "UNI", "PRT", "AIR")
LINK_S = {"L1": 120, "L2": 165}

_STATION_NAMES = {
    "WST": "West Terminal",
    "CPK": "Cypress Park",
    "MUS": "Museum",
    "CTR": "Central",
    "RIV": "Riverside",
    "HBR": "Harbour",
    "EST": "East Terminal",
    "GDN": "Gardens",
    "ZOO": "Zoo",
    "UNI": "University",
    "PRT": "Port",
    "AIR": "Airport",
}
_CONGESTED = ("MUS", "CTR")

_RAMP = (65340, 65520)  # one headway leading into the peak
_BURST = (65520, 65880)  # two headways at the height of the peak
_ECHO = (66780, 67140)  # milder aftershock two headways wide
_BRANCH = (65700, 65880)  # surge onto the university branch
_BRANCH_TAIL = (65880, 66060)  # branch surge ebbing over the next headway
_HOUR = (64800, 68400)

# origin, dest, trip count, tap-in window
_DEMAND_BLOCKS: Tuple[Tuple[str, str, int, Tuple[int, int]], ...] = (
    # ramp into the eastbound surge
    ("CPK", "HBR", 300, _RAMP),
    ("WST", "RIV", 300, _RAMP),
    ("CTR", "RIV", 700, _RAMP),
    ("MUS", "RIV", 400, _RAMP),
    # eastbound surge riding through the interchange
    ("CPK", "HBR", 800, _BURST),
    ("CPK", "EST", 700, _BURST),
    ("MUS", "RIV", 1000, _BURST),
    ("MUS", "EST", 650, _BURST),
    ("WST", "RIV", 750, _BURST),
    ("WST", "HBR", 750, _BURST),
    # surge joining at the interchange itself
    ("CTR", "RIV", 1700, _BURST),
    ("CTR", "HBR", 900, _BURST),
    ("CTR", "EST", 550, _BURST),
    # aftershock on the same platform
    ("CTR", "RIV", 700, _ECHO),
    ("CTR", "HBR", 400, _ECHO),
    ("MUS", "RIV", 400, _ECHO),
    # branch surge boarding nearly empty trains at the interchange
    ("CTR", "UNI", 1600, _BRANCH),
    ("CTR", "PRT", 800, _BRANCH),
    ("CTR", "AIR", 700, _BRANCH),
    ("CTR", "UNI", 800, _BRANCH_TAIL),
    ("CTR", "PRT", 400, _BRANCH_TAIL),
    ("CTR", "AIR", 300, _BRANCH_TAIL),
    # all-hour flows on OD pairs with competing routes
    ("WST", "CTR", 1600, _HOUR),
    ("CTR", "WST", 1200, _HOUR),
    ("WST", "UNI", 1200, _HOUR),
    ("UNI", "WST", 900, _HOUR),
    ("CPK", "ZOO", 900, _HOUR),
    ("ZOO", "CPK", 500, _HOUR),
    ("GDN", "MUS", 900, _HOUR),
    ("MUS", "GDN", 450, _HOUR),
    ("ZOO", "RIV", 150, _HOUR),
    ("CPK", "UNI", 150, _HOUR),
    ("AIR", "MUS", 150, _HOUR),
    # all-hour single-route flows
    ("PRT", "CTR", 250, _HOUR),
    ("HBR", "CPK", 350, _HOUR),
    ("EST", "MUS", 200, _HOUR),
    ("RIV", "WST", 900, _HOUR),
    ("UNI", "AIR", 150, _HOUR),
    ("GDN", "AIR", 150, _HOUR),
    ("CTR", "UNI", 250, _HOUR),
    ("CTR", "ZOO", 200, _HOUR),
    ("MUS", "CTR", 150, _HOUR),
    # off-surge trickle on the surge OD pairs
    ("CTR", "RIV", 250, _HOUR),
    ("WST", "RIV", 900, _HOUR),
    ("CPK", "HBR", 100, _HOUR),
    ("MUS", "EST", 100, _HOUR),
)


def fixture_network() -> NetworkModel:
    stations = {}
    for sid in dict.fromkeys(LINE_1 + LINE_2):
        if sid == "CTR":
            st = Station(sid, _STATION_NAMES[sid], True, 90, 75)
        else:
            st = Station(sid, _STATION_NAMES[sid], sid in _CONGESTED)
        stations[sid] = st
    line_runs = {
        ("L1", 0): LINE_1,
        ("L1", 1): tuple(reversed(LINE_1)),
        ("L2", 0): LINE_2,
        ("L2", 1): tuple(reversed(LINE_2)),
    }
    # cross-platform hop at Central, long connector at the west terminus
    transfer_walk_s = {("CTR", "CTR"): 15, ("WST", "WST"): 300}
    network = NetworkModel(stations, line_runs, transfer_walk_s)
    network.validate()
    return network


def _link_times(network: NetworkModel) -> Dict[Tuple[str, int], List[int]]:
    return {
        key: [LINK_S[key[0]]] * (len(run) - 1)
        for key, run in network.line_runs.items()
    }


def fixture_paths(network: NetworkModel, od_pairs: Sequence[Tuple[str, str]]):
    """Enumerate candidate routes per OD and attach the three attributes."""
    link_times = _link_times(network)
    paths: Dict[Tuple[str, str], List[Path]] = {}
    for origin, dest in sorted(set(od_pairs)):
        cands = enumerate_paths(
            network, origin, dest, link_times,
            dwell_s=DWELL_S, k=3, max_transfers=1,
        )
        plist = []
        for pid, cand in enumerate(cands, start=1):
            walk = (
                network.stations[origin].access_walk_s
                + cand.transfer_walk_s
                + network.stations[dest].egress_walk_s
            )
            plist.append(
                Path(
                    origin=origin,
                    dest=dest,
                    path_id=pid,
                    stations=cand.stations,
                    attrs=(cand.ride_s / 60.0, walk / 600.0, float(cand.n_transfers)),
                    legs=cand.legs,
                )
            )
        paths[(origin, dest)] = plist
    return paths


def fixture_timetable() -> List[TrainEvent]:
    events: List[TrainEvent] = []
    for line, direction in (("L1", 0), ("L1", 1), ("L2", 0), ("L2", 1)):
        run = LINE_1 if line == "L1" else LINE_2
        if direction == 1:
            run = tuple(reversed(run))
        link = LINK_S[line]
        for k, dep0 in enumerate(range(FIRST_DEP_S, LAST_DEP_S + 1, HEADWAY_S)):
            train_id = f"{line}-{direction}-{k:02d}"
            arr = dep0 - DWELL_S
            for i, station in enumerate(run):
                dep = arr + DWELL_S
                events.append(TrainEvent(arr, 0, train_id, line, direction, station, N_CARS))
                events.append(TrainEvent(dep, 1, train_id, line, direction, station, N_CARS))
                arr = dep + link if i + 1 < len(run) else dep
    return events


def fixture_demand(seed: int = DEMAND_SEED) -> List[Passenger]:
    """Individual tap-ins drawn uniformly inside each block's window."""
    rng = np.random.default_rng(seed)
    riders: List[Passenger] = []
    serial = 0
    for origin, dest, count, (start, end) in _DEMAND_BLOCKS:
        times = rng.integers(start, end, size=count)
        for t in np.sort(times):
            serial += 1
            riders.append(Passenger(f"P{serial:05d}", origin, int(t), dest, None))
    riders.sort(key=lambda p: (p.tap_in_s, p.pax_id))
    return riders


def fixture_settings() -> RunSettings:
    return RunSettings(period_start_s=64800, interval_s=900, horizon_s=3600)


def build_fixture(out_dir: str, demand_seed: int = DEMAND_SEED) -> Dict[str, object]:
    """Write the complete example case into a directory and summarize it."""
    out = _FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    network = fixture_network()
    demand = fixture_demand(demand_seed)
    od_pairs = sorted({(p.origin, p.dest) for p in demand})
    paths = fixture_paths(network, od_pairs)
    events = fixture_timetable()

    files = fileio.dataset_paths(str(out))
    fileio.write_network(network, files["network"])
    fileio.write_paths(paths, files["paths"])
    fileio.write_timetable(sorted(events, key=lambda e: (e.train_id, e.time)), files["timetable"])
    fileio.write_afc(demand, files["demand"])
    write_config_file(fixture_settings(), str(out / CONFIG_FILE))

    multi = sum(1 for plist in paths.values() if len(plist) > 1)
    return {
        "directory": str(out),
        "stations": len(network.stations),
        "trains": len({e.train_id for e in events}),
        "passengers": len(demand),
        "od_pairs": len(od_pairs),
        "od_pairs_with_route_choice": multi,
        "demand_seed": demand_seed,
    }
