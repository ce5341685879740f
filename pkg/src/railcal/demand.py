"""Entry-flow aggregation of smart-card demand onto the interval grid."""
from __future__ import annotations

from typing import Dict, List, Tuple

from .model import Passenger, TimeGrid


def aggregate_entry_flows(
    passengers: List[Passenger], grid: TimeGrid
) -> Tuple[Dict[Tuple[str, str, int], int], List[Passenger]]:
    """Count tap-ins per (origin, dest, entry interval).

    Returns the counts plus the records rejected for tapping in outside
    the study period; counts always sum to len(passengers) - len(rejected).
    """
    flows: Dict[Tuple[str, str, int], int] = {}
    rejected: List[Passenger] = []
    for p in passengers:
        if not grid.contains(p.tap_in_s):
            rejected.append(p)
            continue
        key = (p.origin, p.dest, grid.interval_of(p.tap_in_s))
        flows[key] = flows.get(key, 0) + 1
    return flows, rejected
