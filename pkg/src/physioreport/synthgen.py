"""Seeded synthetic recordings with analytically known band features."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .cardio import HR_RANGE, CardioSeries
from .errors import InputError
from .ingest import write_eeg_log, write_oximeter_log
from .signal_core.types import CANONICAL_BANDS, BandDefinition, EegSignal, Trend


@dataclass(frozen=True)
class ToneSpec:
    freq_hz: float
    amplitude_start: float = 1.0
    amplitude_end: float = 1.0
    phase_rad: float = 0.0

    def __post_init__(self):
        if not self.freq_hz > 0:
            raise InputError(f"tone frequency must be positive, got {self.freq_hz}")
        if self.amplitude_start < 0 or self.amplitude_end < 0:
            raise InputError("tone amplitudes must be non-negative")

    @property
    def mean_power(self) -> float:
        # mean of a(t)^2 over a linear ramp from a0 to a1
        a0, a1 = self.amplitude_start, self.amplitude_end
        return (a0 * a0 + a0 * a1 + a1 * a1) / 3.0


def synth_eeg(
    tones: list[ToneSpec],
    noise_amplitude: float = 0.0,
    fs: float = 256.0,
    duration_s: float = 8.0,
    seed: int = 0,
    channel_label: str = "AF3",
) -> EegSignal:
    """Sum of linearly ramped sinusoids plus uniform noise in ``[-noise, noise]``."""
    if not duration_s > 0:
        raise InputError(f"duration must be positive, got {duration_s}")
    if not fs > 0:
        raise InputError(f"sampling rate must be positive, got {fs}")
    for tone in tones:
        if tone.freq_hz >= fs / 2:
            raise InputError(f"tone at {tone.freq_hz} Hz is at or above Nyquist ({fs / 2} Hz)")
    n = int(round(duration_s * fs))
    if n < 1:
        raise InputError("duration is shorter than one sample")
    t = np.arange(n) / fs
    frac = t / duration_s
    x = np.zeros(n)
    for tone in tones:
        amp = tone.amplitude_start + (tone.amplitude_end - tone.amplitude_start) * frac
        x += amp * np.sin(2 * np.pi * tone.freq_hz * t + tone.phase_rad)
    if noise_amplitude > 0:
        rng = np.random.default_rng(seed)
        x += rng.uniform(-noise_amplitude, noise_amplitude, n)
    timestamps = np.rint(t * 1000.0).astype(np.int64)
    return EegSignal(x, fs, channel_label, timestamps_ms=timestamps)


def synth_cardio(
    base_bpm: float,
    jitter_bpm: float = 0.0,
    duration_s: float = 360.0,
    seed: int = 0,
    spo2_base: float | None = 98.0,
    spo2_jitter: float = 0.5,
) -> CardioSeries:
    """1 Hz heart rate ``base_bpm + U(-jitter, jitter)`` and an optional SpO2 stream."""
    lo, hi = HR_RANGE
    if not lo < base_bpm < hi:
        raise InputError(f"base_bpm must lie in ({lo:g}, {hi:g}), got {base_bpm}")
    n = int(round(duration_s))
    if n < 1:
        raise InputError("cardio duration must be at least one second")
    rng = np.random.default_rng(seed)
    hr = np.full(n, float(base_bpm))
    if jitter_bpm > 0:
        hr = hr + rng.uniform(-jitter_bpm, jitter_bpm, n)
    hr = np.round(hr, 2)
    if spo2_base is None:
        spo2 = np.array([])
    else:
        spo2 = np.full(n, float(spo2_base))
        if spo2_jitter > 0:
            spo2 = spo2 + rng.uniform(-spo2_jitter, spo2_jitter, n)
        spo2 = np.clip(np.round(spo2, 1), 50.1, 100.0)
    return CardioSeries(hr, spo2, 1.0, timestamps_ms=np.arange(n, dtype=np.int64) * 1000)


@dataclass(frozen=True)
class ExpectedBand:
    band: str
    trend: Trend | None
    dominant_freq_hz: float
    tone: ToneSpec


def expected_band_features(
    tones: list[ToneSpec], bands: tuple[BandDefinition, ...] = CANONICAL_BANDS
) -> dict[str, ExpectedBand]:
    """Ground truth per band that contains at least one tone.

    The strongest in-band tone (by mean squared amplitude) sets the dominant
    frequency; its ramp direction sets the trend. A flat ramp has no expected
    trend (None): leakage and noise decide the tie. Bands without a tone are
    omitted.
    """
    out = {}
    for band in bands:
        inside = [t for t in tones if band.low_hz <= t.freq_hz <= band.high_hz]
        if not inside:
            continue
        strongest = max(inside, key=lambda t: t.mean_power)
        if strongest.amplitude_end > strongest.amplitude_start:
            trend = Trend.INCREASING
        elif strongest.amplitude_end < strongest.amplitude_start:
            trend = Trend.DECREASING
        else:
            trend = None
        out[band.name] = ExpectedBand(band.name, trend, strongest.freq_hz, strongest)
    return out


def _tones_from_spec(items) -> list[ToneSpec]:
    tones = []
    for item in items or []:
        if not isinstance(item, dict) or "freq_hz" not in item:
            raise InputError(f"tone entry needs at least 'freq_hz': {item!r}")
        tones.append(ToneSpec(
            freq_hz=float(item["freq_hz"]),
            amplitude_start=float(item.get("amplitude_start", item.get("amplitude", 1.0))),
            amplitude_end=float(item.get("amplitude_end", item.get("amplitude", 1.0))),
            phase_rad=float(item.get("phase_rad", 0.0)),
        ))
    return tones


def write_fixture(spec: dict, out_dir) -> dict[str, Path]:
    """Write ``eeg.csv``, ``oximeter.csv`` (if a cardio section exists) and ``expected.json``.

    ``spec`` layout::

        {"eeg": {"tones": [...], "noise_amplitude": 0, "fs": 256,
                 "duration_s": 8, "seed": 0},
         "cardio": {"base_bpm": 72, "jitter_bpm": 0, "seed": 0}}
    """
    if not isinstance(spec, dict) or "eeg" not in spec:
        raise InputError("fixture spec must be an object with an 'eeg' section")
    eeg_spec = spec["eeg"]
    tones = _tones_from_spec(eeg_spec.get("tones"))
    fs = float(eeg_spec.get("fs", 256.0))
    duration = float(eeg_spec.get("duration_s", 8.0))
    signal = synth_eeg(
        tones,
        noise_amplitude=float(eeg_spec.get("noise_amplitude", 0.0)),
        fs=fs,
        duration_s=duration,
        seed=int(eeg_spec.get("seed", 0)),
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"eeg": write_eeg_log(signal, out / "eeg.csv")}
    cardio_spec = spec.get("cardio")
    if cardio_spec is not None:
        series = synth_cardio(
            float(cardio_spec.get("base_bpm", 72.0)),
            float(cardio_spec.get("jitter_bpm", 0.0)),
            float(cardio_spec.get("duration_s", duration)),
            int(cardio_spec.get("seed", 0)),
        )
        paths["oximeter"] = write_oximeter_log(series, out / "oximeter.csv")
    expected = {
        name: {"trend": e.trend.value if e.trend else None, "dominant_freq_hz": e.dominant_freq_hz, "tone": asdict(e.tone)}
        for name, e in expected_band_features(tones).items()
    }
    paths["expected"] = out / "expected.json"
    paths["expected"].write_text(json.dumps({"bands": expected}, indent=2) + "\n", encoding="utf-8")
    return paths
