"""Per-band trend and dominant-frequency features."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import FlatSpectrumError, InputError
from .envelope import hilbert_envelope
from .filters import apply_filter, design_bandpass
from .types import (
    CANONICAL_BANDS,
    BandDefinition,
    BandFeatures,
    EegFeatureSet,
    EegSignal,
    Envelope,
    Trend,
    TrendResult,
)

log = logging.getLogger(__name__)

DEFAULT_WINDOW = 256


def remove_dc(signal: EegSignal) -> EegSignal:
    """Subtract the temporal mean from every sample."""
    signal.require_nonempty()
    x = signal.samples
    return signal.with_samples(x - np.mean(x))


def median(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    return float(np.median(v))


def classify_trend(envelope: Envelope | np.ndarray) -> TrendResult:
    """Compare the medians of the first and second halves of an envelope.

    The first half holds ``floor(N/2)`` samples. Equal medians count as
    Decreasing.
    """
    values = envelope.values if isinstance(envelope, Envelope) else np.asarray(envelope, dtype=np.float64)
    n = values.shape[0]
    if n < 2:
        raise InputError(f"envelope needs at least 2 samples, got {n}")
    half = n // 2
    m1 = median(values[:half])
    m2 = median(values[half:])
    trend = Trend.INCREASING if m2 > m1 else Trend.DECREASING
    return TrendResult(trend, m1, m2)


def power_spectrum(x, sampling_rate_hz: float) -> tuple[np.ndarray, np.ndarray]:
    """One-sided ``|X(f)|^2`` and bin frequencies, no windowing or padding."""
    x = np.asarray(x, dtype=np.float64)
    spectrum = np.fft.rfft(x)
    freqs = np.fft.rfftfreq(x.shape[0], d=1.0 / sampling_rate_hz)
    return freqs, spectrum.real**2 + spectrum.imag**2


def dominant_frequency(signal: EegSignal, band: BandDefinition) -> float:
    """Frequency of the strongest FFT bin inside ``[band.low_hz, band.high_hz]``.

    Raises :class:`FlatSpectrumError` (carrying the lowest in-band bin) when
    the band holds no power at all.
    """
    signal.require_nonempty()
    freqs, power = power_spectrum(signal.samples, signal.sampling_rate_hz)
    mask = (freqs >= band.low_hz) & (freqs <= band.high_hz)
    if not np.any(mask):
        raise InputError(
            f"no FFT bin falls inside {band.name} ({band.low_hz}-{band.high_hz} Hz) "
            f"for a {len(signal)}-sample signal"
        )
    in_freqs = freqs[mask]
    in_power = power[mask]
    if not np.max(in_power) > 0.0:
        raise FlatSpectrumError(
            f"{band.name}: no spectral power in band", fallback_hz=float(in_freqs[0])
        )
    return float(in_freqs[int(np.argmax(in_power))])


def band_features(
    centered: EegSignal, band: BandDefinition, window_len: int = DEFAULT_WINDOW
) -> tuple[BandFeatures, str | None]:
    coeffs = design_bandpass(band, centered.sampling_rate_hz)
    filtered = apply_filter(coeffs, centered)
    trend = classify_trend(hilbert_envelope(filtered, window_len))
    warning = None
    try:
        freq = dominant_frequency(centered, band)
    except FlatSpectrumError as exc:
        freq = exc.fallback_hz
        warning = f"{band.name}: flat spectrum, reporting lowest in-band bin {freq:g} Hz"
        log.warning(warning)
    features = BandFeatures(
        band=band.name,
        trend=trend.trend,
        dominant_freq_hz=freq,
        median_first_half=trend.median_first_half,
        median_second_half=trend.median_second_half,
    )
    return features, warning


def features_from_signal(
    signal: EegSignal, source_path: str = "", window_len: int = DEFAULT_WINDOW
) -> EegFeatureSet:
    centered = remove_dc(signal)
    per_band = []
    warnings = []
    for band in CANONICAL_BANDS:
        features, warning = band_features(centered, band, window_len)
        per_band.append(features)
        if warning:
            warnings.append(warning)
    return EegFeatureSet(
        per_band=tuple(per_band),
        source_path=str(source_path),
        sample_count=len(signal),
        warnings=tuple(warnings),
    )


def process_eeg(path, window_len: int = DEFAULT_WINDOW) -> EegFeatureSet:
    """Trend and dominant frequency of each canonical band for an EEG log file."""
    from ..ingest import parse_eeg_log

    signal = parse_eeg_log(path)
    return features_from_signal(signal, source_path=str(path), window_len=window_len)
