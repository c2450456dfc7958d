"""Pulse-oximeter summaries: session-average heart rate and SpO2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

HR_RANGE = (20.0, 250.0)  # exclusive on both ends
SPO2_RANGE = (50.0, 100.0)  # exclusive low, inclusive high


@dataclass(frozen=True, eq=False)
class CardioSeries:
    """Heart rate and SpO2 at a fixed rate; ``spo2_pct`` may be empty.

    Missing SpO2 readings inside a partially populated stream are NaN.
    """

    hr_bpm: np.ndarray
    spo2_pct: np.ndarray
    sample_rate_hz: float = 1.0
    timestamps_ms: np.ndarray | None = None
    metadata: dict | None = None

    def __post_init__(self):
        hr = np.array(self.hr_bpm, dtype=np.float64, copy=True).reshape(-1)
        spo2 = np.array(self.spo2_pct, dtype=np.float64, copy=True).reshape(-1)
        if spo2.size and spo2.shape != hr.shape:
            raise InputError("SpO2 series must be empty or time-aligned with heart rate")
        if not self.sample_rate_hz > 0:
            raise InputError("sample_rate_hz must be positive")
        hr.flags.writeable = False
        spo2.flags.writeable = False
        object.__setattr__(self, "hr_bpm", hr)
        object.__setattr__(self, "spo2_pct", spo2)
        object.__setattr__(self, "metadata", dict(self.metadata or {}))
        if self.timestamps_ms is not None:
            ts = np.array(self.timestamps_ms, dtype=np.int64, copy=True).reshape(-1)
            if ts.shape != hr.shape:
                raise InputError("timestamps_ms must have one entry per sample")
            ts.flags.writeable = False
            object.__setattr__(self, "timestamps_ms", ts)

    def __len__(self) -> int:
        return self.hr_bpm.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz


@dataclass(frozen=True)
class CardioSummary:
    avg_hr_bpm: float
    avg_spo2_pct: float | None
    valid_sample_count: int
    rejected_sample_count: int

    def to_dict(self) -> dict:
        return {
            "avg_hr_bpm": self.avg_hr_bpm,
            "avg_spo2_pct": self.avg_spo2_pct,
            "valid_sample_count": self.valid_sample_count,
            "rejected_sample_count": self.rejected_sample_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CardioSummary":
        return cls(
            avg_hr_bpm=float(data["avg_hr_bpm"]),
            avg_spo2_pct=None if data.get("avg_spo2_pct") is None else float(data["avg_spo2_pct"]),
            valid_sample_count=int(data["valid_sample_count"]),
            rejected_sample_count=int(data["rejected_sample_count"]),
        )


def _bounded_mean(values: np.ndarray) -> float:
    # fsum keeps the mean order-independent; clamp guards the last-ulp overshoot
    mean = math.fsum(values.tolist()) / values.size
    return min(max(mean, float(values.min())), float(values.max()))


def summarize_cardio(series: CardioSeries) -> CardioSummary:
    """Average heart rate over physiologically plausible samples only."""
    hr = series.hr_bpm
    lo, hi = HR_RANGE
    valid = np.isfinite(hr) & (hr > lo) & (hr < hi)
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise InputError(
            f"no valid heart-rate samples in {len(series)} readings "
            f"(accepted range {lo:g}-{hi:g} bpm exclusive)"
        )
    avg_spo2 = None
    spo2 = series.spo2_pct
    if spo2.size:
        s_lo, s_hi = SPO2_RANGE
        ok = np.isfinite(spo2) & (spo2 > s_lo) & (spo2 <= s_hi)
        if ok.any():
            avg_spo2 = _bounded_mean(spo2[ok])
    return CardioSummary(
        avg_hr_bpm=_bounded_mean(hr[valid]),
        avg_spo2_pct=avg_spo2,
        valid_sample_count=n_valid,
        rejected_sample_count=len(series) - n_valid,
    )
