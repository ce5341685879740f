"""Run settings: defaults, config-file parsing, and override resolution.

Config files are flat `key = value` text; `#` starts a comment. CLI
flags override file values, which override the built-in defaults.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from .metrics import ObjectiveWeights
from .model import ConfigError, TimeGrid

CONFIG_FILE = "case.cfg"


@dataclass(frozen=True)
class RunSettings:
    """Study-period grid and fit-measure settings shared by a dataset."""

    period_start_s: int = 64800
    interval_s: int = 900
    horizon_s: int = 3600
    bin_s: int = 60
    flow_weight: float = 1.0
    dist_weight: float = 1000.0
    min_samples: int = 10
    choice_scale: float = 1.0
    overlap_decay: float = 1.0

    def grid(self) -> TimeGrid:
        return TimeGrid(self.period_start_s, self.interval_s, self.horizon_s)

    def weights(self) -> ObjectiveWeights:
        return ObjectiveWeights(
            flow_weight=self.flow_weight,
            dist_weight=self.dist_weight,
            min_samples=self.min_samples,
            bin_s=self.bin_s,
        )

    def as_dict(self) -> Dict[str, object]:
        return dataclasses.asdict(self)


_INT_KEYS = {"period_start_s", "interval_s", "horizon_s", "bin_s", "min_samples"}
_FLOAT_KEYS = {"flow_weight", "dist_weight", "choice_scale", "overlap_decay"}


def parse_config_file(path: str) -> Dict[str, str]:
    """Read `key = value` lines; unknown keys are kept for the caller to judge."""
    out: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{line_no}: expected `key = value`, got {raw.strip()!r}")
            key, value = text.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def resolve_settings(*sources: Optional[Mapping[str, object]]) -> RunSettings:
    """Merge setting sources, later ones winning, and type-check the values."""
    merged: Dict[str, object] = {}
    for source in sources:
        if source:
            merged.update({k: v for k, v in source.items() if v is not None})
    known = _INT_KEYS | _FLOAT_KEYS
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown settings: {sorted(unknown)}; expected {sorted(known)}")
    kwargs: Dict[str, object] = {}
    for key, value in merged.items():
        try:
            kwargs[key] = int(value) if key in _INT_KEYS else float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"setting {key}={value!r} is not numeric") from exc
    return RunSettings(**kwargs)


def write_config_file(settings: RunSettings, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in settings.as_dict().items():
            f.write(f"{key} = {value}\n")
