"""EEG feature extraction: DC removal, band filtering, envelopes, trends, dominant frequencies."""

from .envelope import analytic_signal, hilbert_envelope
from .features import (
    classify_trend,
    dominant_frequency,
    features_from_signal,
    power_spectrum,
    process_eeg,
    remove_dc,
)
from .filters import FilterCoefficients, apply_filter, design_bandpass
from .kernels import BACKEND as KERNEL_BACKEND
from .types import (
    ALPHA,
    BAND_NAMES,
    BETA,
    CANONICAL_BANDS,
    DELTA,
    THETA,
    BandDefinition,
    BandFeatures,
    EegFeatureSet,
    EegSignal,
    Envelope,
    Trend,
    TrendResult,
    band_by_name,
)

__all__ = [
    "ALPHA",
    "BAND_NAMES",
    "BETA",
    "CANONICAL_BANDS",
    "DELTA",
    "KERNEL_BACKEND",
    "THETA",
    "BandDefinition",
    "BandFeatures",
    "EegFeatureSet",
    "EegSignal",
    "Envelope",
    "FilterCoefficients",
    "Trend",
    "TrendResult",
    "analytic_signal",
    "apply_filter",
    "band_by_name",
    "classify_trend",
    "design_bandpass",
    "dominant_frequency",
    "features_from_signal",
    "hilbert_envelope",
    "power_spectrum",
    "process_eeg",
    "remove_dc",
]
