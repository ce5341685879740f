"""Readers and writers for network, path, timetable, and smart-card files.

All writers emit a canonical form; loading a canonical file and writing
it back reproduces the bytes exactly, which the dataset manifests rely on.
"""
from __future__ import annotations

import csv
import hashlib
import io
import os
from typing import Dict, Iterable, List, Optional, Tuple

from .model import (
    DEFAULT_ACCESS_WALK_S,
    DEFAULT_EGRESS_WALK_S,
    FileFormatError,
    NetworkModel,
    Passenger,
    Path,
    ScheduleError,
    Station,
    TrainEvent,
)
from .model import ARRIVAL, DEPARTURE

NETWORK_FILE = "network.txt"
PATHS_FILE = "paths.csv"
TIMETABLE_FILE = "timetable.csv"
DEMAND_FILE = "demand.csv"
AFC_FILE = "afc.csv"

_SEQ_SEP = "|"


def _fmt_float(x: float) -> str:
    # Shortest round-trip decimal; keeps files byte-stable across runs.
    return repr(float(x))


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------- network

def read_network(path: str) -> NetworkModel:
    """Parse the sectioned network file ([stations]/[lines]/[transfers])."""
    stations: Dict[str, Station] = {}
    line_runs: Dict[Tuple[str, int], Tuple[str, ...]] = {}
    transfer_walk_s: Dict[Tuple[str, str], int] = {}
    section = None
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            if text.startswith("[") and text.endswith("]"):
                section = text[1:-1].lower()
                if section not in ("stations", "lines", "transfers"):
                    raise FileFormatError(path, line_no, f"unknown section {text}")
                continue
            fields = [c.strip() for c in text.split(",")]
            try:
                if section == "stations":
                    if not 3 <= len(fields) <= 5:
                        raise ValueError("expected id,name,congested[,access_s[,egress_s]]")
                    sid, name, congested = fields[0], fields[1], fields[2]
                    access = int(fields[3]) if len(fields) > 3 else DEFAULT_ACCESS_WALK_S
                    egress = int(fields[4]) if len(fields) > 4 else DEFAULT_EGRESS_WALK_S
                    if congested not in ("0", "1"):
                        raise ValueError(f"congested flag must be 0 or 1, got {congested!r}")
                    if sid in stations:
                        raise ValueError(f"duplicate station id {sid!r}")
                    stations[sid] = Station(sid, name, congested == "1", access, egress)
                elif section == "lines":
                    if len(fields) != 3:
                        raise ValueError("expected line_id,direction,station_seq")
                    key = (fields[0], int(fields[1]))
                    if key in line_runs:
                        raise ValueError(f"duplicate line run {key}")
                    line_runs[key] = tuple(fields[2].split(_SEQ_SEP))
                elif section == "transfers":
                    if len(fields) != 3:
                        raise ValueError("expected from,to,walk_s")
                    transfer_walk_s[(fields[0], fields[1])] = int(fields[2])
                else:
                    raise ValueError("data row before any section header")
            except ValueError as exc:
                raise FileFormatError(path, line_no, str(exc)) from exc
    network = NetworkModel(stations, line_runs, transfer_walk_s)
    network.validate()
    return network


def write_network(network: NetworkModel, path: str) -> None:
    buf = io.StringIO()
    buf.write("[stations]\n")
    for st in network.stations.values():
        row = [st.id, st.name, "1" if st.congested else "0"]
        if (st.access_walk_s, st.egress_walk_s) != (DEFAULT_ACCESS_WALK_S, DEFAULT_EGRESS_WALK_S):
            row += [str(st.access_walk_s), str(st.egress_walk_s)]
        buf.write(",".join(row) + "\n")
    buf.write("[lines]\n")
    for (line, direction), run in network.line_runs.items():
        buf.write(f"{line},{direction},{_SEQ_SEP.join(run)}\n")
    buf.write("[transfers]\n")
    for (a, b), walk in network.transfer_walk_s.items():
        buf.write(f"{a},{b},{walk}\n")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())


# ------------------------------------------------------------------ paths

PATH_COLUMNS = ["od_origin", "od_dest", "path_id", "station_seq", "ivt_min", "rel_walk", "n_transfers"]


def read_paths(path: str, network: NetworkModel) -> Dict[Tuple[str, str], List[Path]]:
    """Load OD path sets and attach boarding legs derived from the network."""
    out: Dict[Tuple[str, str], List[Path]] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != PATH_COLUMNS:
            raise FileFormatError(path, 1, f"expected header {','.join(PATH_COLUMNS)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(PATH_COLUMNS):
                raise FileFormatError(path, line_no, f"expected {len(PATH_COLUMNS)} columns")
            try:
                stations = tuple(row[3].split(_SEQ_SEP))
                p = Path(
                    origin=row[0],
                    dest=row[1],
                    path_id=int(row[2]),
                    stations=stations,
                    attrs=(float(row[4]), float(row[5]), float(row[6])),
                )
            except ValueError as exc:
                raise FileFormatError(path, line_no, str(exc)) from exc
            out.setdefault((p.origin, p.dest), []).append(p)
    # Ascending path id fixes the sampling order; legs validate ridability.
    for od, plist in out.items():
        plist.sort(key=lambda p: p.path_id)
        out[od] = [
            Path(p.origin, p.dest, p.path_id, p.stations, p.attrs,
                 legs=network.derive_legs(p.stations))
            for p in plist
        ]
    return out


def write_paths(paths: Dict[Tuple[str, str], List[Path]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(PATH_COLUMNS)
        for od in sorted(paths):
            for p in paths[od]:
                writer.writerow([
                    p.origin, p.dest, p.path_id, _SEQ_SEP.join(p.stations),
                    _fmt_float(p.attrs[0]), _fmt_float(p.attrs[1]), str(int(p.attrs[2])),
                ])


def load_network(network_path: str, paths_path: Optional[str] = None) -> NetworkModel:
    """Load the network file, plus the OD path sets when given."""
    network = read_network(network_path)
    if paths_path is not None:
        network.paths = read_paths(paths_path, network)
        network.validate()
    return network


# -------------------------------------------------------------- timetable

TIMETABLE_COLUMNS = ["train_id", "line", "direction", "station", "arr_s", "dep_s", "n_cars"]


def read_timetable(path: str, network: Optional[NetworkModel] = None) -> List[TrainEvent]:
    """Load one arrival and one departure event per timetable row."""
    events: List[TrainEvent] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != TIMETABLE_COLUMNS:
            raise FileFormatError(path, 1, f"expected header {','.join(TIMETABLE_COLUMNS)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TIMETABLE_COLUMNS):
                raise FileFormatError(path, line_no, f"expected {len(TIMETABLE_COLUMNS)} columns")
            try:
                train_id, line, station = row[0], row[1], row[3]
                direction, arr_s, dep_s, n_cars = int(row[2]), int(row[4]), int(row[5]), int(row[6])
            except ValueError as exc:
                raise FileFormatError(path, line_no, str(exc)) from exc
            if dep_s < arr_s:
                raise ScheduleError(
                    f"{path}:{line_no}: train {train_id} departs {station} at {dep_s} "
                    f"before arriving at {arr_s}"
                )
            if n_cars <= 0:
                raise FileFormatError(path, line_no, f"n_cars must be positive, got {n_cars}")
            if network is not None:
                if station not in network.stations:
                    raise FileFormatError(path, line_no, f"unknown station {station!r}")
                if (line, direction) not in network.line_runs:
                    raise FileFormatError(path, line_no, f"unknown line run ({line!r}, {direction})")
            events.append(TrainEvent(arr_s, ARRIVAL, train_id, line, direction, station, n_cars))
            events.append(TrainEvent(dep_s, DEPARTURE, train_id, line, direction, station, n_cars))
    return events


def write_timetable(events: Iterable[TrainEvent], path: str) -> None:
    """Write paired arrival/departure events back to timetable rows."""
    rows: Dict[Tuple[str, str], List[Optional[int]]] = {}
    meta: Dict[Tuple[str, str], TrainEvent] = {}
    order: List[Tuple[str, str]] = []
    for ev in events:
        key = (ev.train_id, ev.station)
        if key not in rows:
            rows[key] = [None, None]
            meta[key] = ev
            order.append(key)
        rows[key][ev.kind] = ev.time
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TIMETABLE_COLUMNS)
        for key in order:
            ev = meta[key]
            arr, dep = rows[key]
            if arr is None or dep is None:
                raise ScheduleError(f"train {key[0]} at {key[1]} lacks an arrival/departure pair")
            writer.writerow([ev.train_id, ev.line, ev.direction, ev.station, arr, dep, ev.n_cars])


# ------------------------------------------------------------- smart card

AFC_COLUMNS = ["pax_id", "origin", "tap_in_s", "dest", "tap_out_s"]


def read_afc(path: str) -> List[Passenger]:
    """Load smart-card records; an empty tap_out_s marks pure demand input."""
    out: List[Passenger] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != AFC_COLUMNS:
            raise FileFormatError(path, 1, f"expected header {','.join(AFC_COLUMNS)}")
        seen = set()
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(AFC_COLUMNS):
                raise FileFormatError(path, line_no, f"expected {len(AFC_COLUMNS)} columns")
            try:
                tap_out = int(row[4]) if row[4] != "" else None
                p = Passenger(row[0], row[1], int(row[2]), row[3], tap_out)
            except ValueError as exc:
                raise FileFormatError(path, line_no, str(exc)) from exc
            if p.pax_id in seen:
                raise FileFormatError(path, line_no, f"duplicate passenger id {p.pax_id!r}")
            seen.add(p.pax_id)
            if p.origin == p.dest:
                raise FileFormatError(path, line_no, f"passenger {p.pax_id} has origin == dest")
            out.append(p)
    return out


def write_afc(passengers: Iterable[Passenger], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(AFC_COLUMNS)
        for p in passengers:
            writer.writerow([
                p.pax_id, p.origin, p.tap_in_s, p.dest,
                "" if p.tap_out_s is None else p.tap_out_s,
            ])


def dataset_paths(dir_path: str) -> Dict[str, str]:
    """Conventional file locations inside a dataset or input directory."""
    return {
        "network": os.path.join(dir_path, NETWORK_FILE),
        "paths": os.path.join(dir_path, PATHS_FILE),
        "timetable": os.path.join(dir_path, TIMETABLE_FILE),
        "demand": os.path.join(dir_path, DEMAND_FILE),
        "afc": os.path.join(dir_path, AFC_FILE),
    }
