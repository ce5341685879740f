"""Chronological event list construction for the network loader."""
from __future__ import annotations

from typing import Dict, List, Tuple

from .model import ARRIVAL, DEPARTURE, ScheduleError, TrainEvent


def build_event_list(events: List[TrainEvent]) -> List[TrainEvent]:
    """Sort events chronologically and validate per-train consistency.

    Ordering: time, then arrivals before departures, then train id.
    Each train's own sequence must alternate arrival/departure in
    nondecreasing time, starting with an arrival.
    """
    ordered = sorted(events, key=TrainEvent.sort_key)
    per_train: Dict[str, List[TrainEvent]] = {}
    for ev in ordered:
        per_train.setdefault(ev.train_id, []).append(ev)
    for train_id, seq in per_train.items():
        expected = ARRIVAL
        last_time = None
        for ev in seq:
            if ev.kind != expected:
                kind = "departure" if ev.kind == DEPARTURE else "arrival"
                raise ScheduleError(
                    f"train {train_id}: unexpected {kind} at {ev.station} t={ev.time}; "
                    f"events must alternate arrival/departure"
                )
            if last_time is not None and ev.time < last_time:
                raise ScheduleError(f"train {train_id}: time moves backwards at {ev.station}")
            last_time = ev.time
            expected = DEPARTURE if expected == ARRIVAL else ARRIVAL
    return ordered
