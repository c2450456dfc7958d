from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..errors import InputError, InvalidParameterError

BAND_NAMES = ("Delta", "Theta", "Alpha", "Beta")


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class EegSignal:
    """Single-channel EEG trace in microvolts.

    ``timestamps_ms`` and ``metadata`` are carried along only so that a
    parsed log can be written back unchanged.
    """

    samples: np.ndarray
    sampling_rate_hz: float = 256.0
    channel_label: str = "AF3"
    timestamps_ms: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = _frozen_array(self.samples)
        if not np.all(np.isfinite(samples)):
            raise InputError("EEG samples must be finite (no NaN/Inf)")
        if not self.sampling_rate_hz > 0:
            raise InvalidParameterError(
                f"sampling_rate_hz must be positive, got {self.sampling_rate_hz}"
            )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sampling_rate_hz", float(self.sampling_rate_hz))
        if self.timestamps_ms is not None:
            ts = np.array(self.timestamps_ms, dtype=np.int64, copy=True).reshape(-1)
            if ts.shape != samples.shape:
                raise InputError("timestamps_ms must have one entry per sample")
            ts.flags.writeable = False
            object.__setattr__(self, "timestamps_ms", ts)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sampling_rate_hz

    def with_samples(self, samples) -> "EegSignal":
        return replace(self, samples=samples)

    def require_nonempty(self) -> None:
        if len(self) == 0:
            raise InputError("EEG signal is empty")


@dataclass(frozen=True)
class BandDefinition:
    name: str
    low_hz: float
    high_hz: float

    def __post_init__(self):
        if self.name not in BAND_NAMES:
            raise InvalidParameterError(
                f"unknown band {self.name!r}; expected one of {BAND_NAMES}"
            )
        if not 0 < self.low_hz < self.high_hz:
            raise InvalidParameterError(
                f"{self.name}: need 0 < low_hz < high_hz, got {self.low_hz}-{self.high_hz}"
            )

    @property
    def center_hz(self) -> float:
        return 0.5 * (self.low_hz + self.high_hz)


DELTA = BandDefinition("Delta", 0.5, 4.0)
THETA = BandDefinition("Theta", 4.0, 8.0)
ALPHA = BandDefinition("Alpha", 8.0, 13.0)
BETA = BandDefinition("Beta", 13.0, 30.0)
CANONICAL_BANDS = (DELTA, THETA, ALPHA, BETA)


def band_by_name(name: str) -> BandDefinition:
    for band in CANONICAL_BANDS:
        if band.name.lower() == name.lower():
            return band
    raise InvalidParameterError(f"unknown band {name!r}")


@dataclass(frozen=True, eq=False)
class Envelope:
    values: np.ndarray
    window_len: int = 256

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))

    def __len__(self) -> int:
        return self.values.shape[0]


class Trend(str, Enum):
    INCREASING = "Increasing"
    DECREASING = "Decreasing"


@dataclass(frozen=True)
class TrendResult:
    trend: Trend
    median_first_half: float
    median_second_half: float

    def __iter__(self):
        return iter((self.trend, self.median_first_half, self.median_second_half))


@dataclass(frozen=True)
class BandFeatures:
    band: str
    trend: Trend
    dominant_freq_hz: float
    median_first_half: float
    median_second_half: float

    def to_dict(self) -> dict:
        return {
            "name": self.band,
            "trend": self.trend.value,
            "dominant_freq_hz": self.dominant_freq_hz,
            "median_first_half": self.median_first_half,
            "median_second_half": self.median_second_half,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BandFeatures":
        return cls(
            band=data["name"],
            trend=Trend(data["trend"]),
            dominant_freq_hz=float(data["dominant_freq_hz"]),
            median_first_half=float(data["median_first_half"]),
            median_second_half=float(data["median_second_half"]),
        )


@dataclass(frozen=True)
class EegFeatureSet:
    per_band: tuple[BandFeatures, ...]
    source_path: str = ""
    sample_count: int = 0
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        names = tuple(b.band for b in self.per_band)
        if names != BAND_NAMES:
            raise InputError(f"feature set must list bands {BAND_NAMES}, got {names}")

    def __getitem__(self, name: str) -> BandFeatures:
        for b in self.per_band:
            if b.band.lower() == name.lower():
                return b
        raise KeyError(name)

    def to_dict(self) -> dict:
        out = {"bands": [b.to_dict() for b in self.per_band]}
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, source_path: str = "", sample_count: int = 0):
        return cls(
            per_band=tuple(BandFeatures.from_dict(b) for b in data["bands"]),
            source_path=source_path,
            sample_count=sample_count,
            warnings=tuple(data.get("warnings", ())),
        )
