"""Analytic-signal amplitude envelopes."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError
from .types import EegSignal, Envelope


def _analytic_gain(n: int) -> np.ndarray:
    # one-sided spectrum weights: keep DC (and Nyquist for even n), double positives
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1 : n // 2] = 2.0
    else:
        h[1 : (n + 1) // 2] = 2.0
    return h


def analytic_signal(x) -> np.ndarray:
    """``x + j*H{x}`` computed through the FFT along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    if n == 0:
        return x.astype(np.complex128)
    spectrum = np.fft.fft(x, axis=-1)
    return np.fft.ifft(spectrum * _analytic_gain(n), axis=-1)


def hilbert_envelope(signal: EegSignal, window_len: int = 256) -> Envelope:
    """Modulus of the analytic signal, computed over non-overlapping windows.

    A trailing partial window is transformed at its own length.
    """
    if int(window_len) != window_len or window_len < 2:
        raise InvalidParameterError(f"window_len must be an integer >= 2, got {window_len}")
    window_len = int(window_len)
    signal.require_nonempty()
    x = signal.samples
    n = x.shape[0]
    n_full = n // window_len
    out = np.empty(n, dtype=np.float64)
    split = n_full * window_len
    if n_full:
        blocks = x[:split].reshape(n_full, window_len)
        out[:split] = np.abs(analytic_signal(blocks)).reshape(-1)
    if split < n:
        out[split:] = np.abs(analytic_signal(x[split:]))
    return Envelope(out, window_len)
