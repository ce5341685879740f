"""Event-list ordering and per-train consistency checks."""
from __future__ import annotations

import pytest

from railcal.events import build_event_list
from railcal.model import ARRIVAL, DEPARTURE, ScheduleError, TrainEvent
from support import train_events


def _ev(time, kind, train="T1", station="A"):
    return TrainEvent(time, kind, train, "L", 0, station, 4)


def test_sorts_chronologically_with_arrivals_first():
    events = [
        _ev(200, DEPARTURE, station="B"),
        _ev(100, DEPARTURE),
        _ev(100, ARRIVAL, train="T2"),
        _ev(90, ARRIVAL),
        _ev(110, DEPARTURE, train="T2"),
        _ev(140, ARRIVAL, train="T2", station="B"),
        _ev(200, ARRIVAL, station="B"),
        _ev(150, DEPARTURE, train="T2", station="B"),
    ]
    ordered = build_event_list(events)
    keys = [e.sort_key() for e in ordered]
    assert keys == sorted(keys)
    at_100 = [e for e in ordered if e.time == 100]
    assert [e.kind for e in at_100] == [ARRIVAL, DEPARTURE]


def test_train_id_breaks_remaining_ties():
    events = [
        _ev(100, ARRIVAL, train="T2"),
        _ev(100, ARRIVAL, train="T1"),
        _ev(110, DEPARTURE, train="T1"),
        _ev(110, DEPARTURE, train="T2"),
    ]
    ordered = build_event_list(events)
    assert [e.train_id for e in ordered[:2]] == ["T1", "T2"]


def test_round_trip_through_helper():
    ordered = build_event_list(
        train_events("T1", "L", 0, [("A", 0, 30), ("B", 150, 180)])
    )
    assert [e.kind for e in ordered] == [ARRIVAL, DEPARTURE, ARRIVAL, DEPARTURE]


def test_rejects_departure_first():
    with pytest.raises(ScheduleError):
        build_event_list([_ev(100, DEPARTURE), _ev(150, ARRIVAL)])


def test_rejects_double_arrival():
    events = [_ev(100, ARRIVAL), _ev(120, ARRIVAL, station="B")]
    with pytest.raises(ScheduleError):
        build_event_list(events)


def test_rejects_missing_departure_between_stations():
    events = [
        _ev(100, ARRIVAL),
        _ev(110, DEPARTURE),
        _ev(200, ARRIVAL, station="B"),
        _ev(230, ARRIVAL, station="C"),
    ]
    with pytest.raises(ScheduleError):
        build_event_list(events)


def test_empty_list_is_fine():
    assert build_event_list([]) == []
