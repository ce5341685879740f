"""Route choice: overlap-penalized multinomial logit over OD path sets.

Utilities are evaluated in log space with max subtraction, so widely
separated utilities stay finite. Sampling inverts the CDF over paths in
ascending path-id order, which makes assignment reproducible per seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import IntegrityError, NetworkModel, Path


@dataclass(frozen=True)
class ChoiceParams:
    """Coefficients of the systematic utility.

    attr_coefs applies to (in-vehicle time [min], relative walking
    time, number of transfers); overlap_coef applies to the log-overlap
    factor. scale is the logit scale (fixed 1.0 unless studied);
    overlap_decay is the exponent inside the overlap sum.
    """

    attr_coefs: Tuple[float, float, float]
    overlap_coef: float
    scale: float = 1.0
    overlap_decay: float = 1.0


def shared_station_count(a: Path, b: Path) -> int:
    return len(set(a.stations) & set(b.stations))


def overlap_factor(path: Path, path_set: Sequence[Path], decay: float = 1.0) -> float:
    """Log of the summed normalized station overlap with every path in the set.

    A path alone in its set gets ln(1 / n_stations); heavily overlapped
    paths get values closer to 0, so a negative coefficient penalizes
    redundant routes.
    """
    if not path_set:
        raise IntegrityError("overlap factor needs a non-empty path set")
    if not any(p is path or (p.path_id == path.path_id and p.stations == path.stations)
               for p in path_set):
        raise IntegrityError("path must belong to the set it is scored against")
    total = 0.0
    for other in path_set:
        shared = shared_station_count(path, other)
        total += (shared / (path.n_stations * other.n_stations)) ** decay
    return float(np.log(total))


def overlap_factors(path_set: Sequence[Path], decay: float = 1.0) -> np.ndarray:
    return np.array([overlap_factor(p, path_set, decay) for p in path_set])


def utilities(path_set: Sequence[Path], params: ChoiceParams,
              overlaps: Optional[np.ndarray] = None) -> np.ndarray:
    if overlaps is None:
        overlaps = overlap_factors(path_set, params.overlap_decay)
    attrs = np.array([p.attrs for p in path_set])
    coefs = np.asarray(params.attr_coefs, dtype=float)
    return params.scale * (attrs @ coefs + params.overlap_coef * overlaps)


def choice_probabilities(path_set: Sequence[Path], params: ChoiceParams,
                         overlaps: Optional[np.ndarray] = None) -> np.ndarray:
    """Multinomial logit shares; strictly positive, summing to 1."""
    if not path_set:
        raise IntegrityError("choice needs a non-empty path set")
    v = utilities(path_set, params, overlaps)
    v -= v.max()
    w = np.exp(v)
    return w / w.sum()


def sample_path_indices(cdf: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Inverse-CDF lookup of uniform draws; paths indexed in ascending id order."""
    idx = np.searchsorted(cdf, draws, side="right")
    return np.minimum(idx, len(cdf) - 1)


class ChoiceTable:
    """Per-OD probabilities and CDFs, precomputed once per parameter vector."""

    def __init__(self, network: NetworkModel, params: ChoiceParams):
        self.params = params
        self._probs: Dict[Tuple[str, str], np.ndarray] = {}
        self._cdfs: Dict[Tuple[str, str], np.ndarray] = {}
        for od, path_set in network.paths.items():
            ov = overlap_factors(path_set, params.overlap_decay)
            p = choice_probabilities(path_set, params, ov)
            self._probs[od] = p
            self._cdfs[od] = np.cumsum(p)

    def probabilities(self, od: Tuple[str, str]) -> np.ndarray:
        return self._probs[od]

    def cdf(self, od: Tuple[str, str]) -> np.ndarray:
        return self._cdfs[od]
