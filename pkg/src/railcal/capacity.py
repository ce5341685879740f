"""Effective train capacity under crowding."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import BoundsError


@dataclass(frozen=True)
class CapacityParams:
    """Capacity coefficients: per-car base plus congestion responses.

    per_car scales with train length everywhere; load_response and
    queue_response add slack only at stations flagged congested, where
    staff action and denser standing raise the practical ceiling.
    """

    per_car: float
    load_response: float
    queue_response: float

    def __post_init__(self):
        if self.per_car <= 0 or self.load_response < 0 or self.queue_response < 0:
            raise BoundsError(f"capacity coefficients must be nonnegative with per_car > 0: {self}")


def effective_capacity(
    params: CapacityParams, n_cars: int, onboard: int, waiting: int, congested: bool
) -> int:
    """Integer capacity of one train call.

    The returned value may fall below the current onboard load (a train
    loaded at a permissive station keeps its passengers); boarding uses
    allowance = max(0, capacity - onboard).
    """
    if n_cars < 1:
        raise BoundsError(f"n_cars must be >= 1, got {n_cars}")
    if onboard < 0 or waiting < 0:
        raise BoundsError("onboard and waiting counts must be nonnegative")
    raw = params.per_car * n_cars
    if congested:
        raw += params.load_response * onboard + params.queue_response * waiting
    return math.floor(raw)


def boarding_allowance(
    params: CapacityParams, n_cars: int, onboard: int, waiting: int, congested: bool
) -> int:
    return max(0, effective_capacity(params, n_cars, onboard, waiting, congested) - onboard)
