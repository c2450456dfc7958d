"""Butterworth bandpass design and causal filtering."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import FilterDesignError, InputError, UnstableFilterError
from .kernels import lfilter_forward
from .types import BandDefinition, EegSignal

FILTER_ORDER = 4


@dataclass(frozen=True, eq=False)
class FilterCoefficients:
    """Transfer function ``B(z)/A(z)`` with ``A`` normalized so a[0] == 1.

    ``order`` is the order of the lowpass prototype; a bandpass built from
    it has ``2 * order`` poles, hence ``2 * order + 1`` coefficients.
    Designed filters also carry ``sections``, the same response as a cascade
    of biquads (rows ``b0 b1 b2 1 a1 a2``). Filtering and stability checks
    use the sections when present: the expanded polynomial of a narrow
    low-frequency band loses its poles to rounding.
    """

    numerator: np.ndarray
    denominator: np.ndarray
    order: int = FILTER_ORDER
    sections: np.ndarray | None = None

    def __post_init__(self):
        b = np.array(self.numerator, dtype=np.float64).reshape(-1)
        a = np.array(self.denominator, dtype=np.float64).reshape(-1)
        if a.size == 0 or a[0] == 0:
            raise InputError("denominator leading coefficient must be non-zero")
        b, a = b / a[0], a / a[0]
        b.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "numerator", b)
        object.__setattr__(self, "denominator", a)
        if self.sections is not None:
            sos = np.array(self.sections, dtype=np.float64).reshape(-1, 6)
            if np.any(sos[:, 3] != 1.0):
                raise InputError("each section must have a[0] == 1")
            sos.flags.writeable = False
            object.__setattr__(self, "sections", sos)

    def poles(self) -> np.ndarray:
        if self.sections is None:
            return np.roots(self.denominator)
        return np.concatenate([np.roots(row[3:]) for row in self.sections])

    def is_stable(self) -> bool:
        p = self.poles()
        return bool(p.size == 0 or np.max(np.abs(p)) < 1.0)

    def frequency_response(self, freqs_hz, sampling_rate_hz: float) -> np.ndarray:
        """Complex response ``H(exp(j*2*pi*f/fs))`` at the given frequencies."""
        w = 2.0 * np.pi * np.asarray(freqs_hz, dtype=np.float64) / sampling_rate_hz
        zinv = np.exp(-1j * w)
        # polyval wants highest power first; coefficients are in powers of z^-1
        if self.sections is None:
            return np.polyval(self.numerator[::-1], zinv) / np.polyval(self.denominator[::-1], zinv)
        h = np.ones_like(zinv)
        for row in self.sections:
            h = h * np.polyval(row[2::-1], zinv) / np.polyval(row[:2:-1], zinv)
        return h


def _butter_prototype_poles(order: int) -> np.ndarray:
    k = np.arange(1, order + 1)
    return np.exp(1j * np.pi * (2 * k + order - 1) / (2 * order))


@lru_cache(maxsize=64)
def _design(low_hz: float, high_hz: float, fs: float, order: int):
    fs2 = 2.0 * fs
    # pre-warp the edges so the digital -3 dB points land exactly on them
    w_low = fs2 * np.tan(np.pi * low_hz / fs)
    w_high = fs2 * np.tan(np.pi * high_hz / fs)
    bw = w_high - w_low
    w0_sq = w_low * w_high

    proto = _butter_prototype_poles(order)
    # lowpass -> bandpass: each prototype pole p solves s^2 - p*bw*s + w0^2 = 0
    pb = proto * bw / 2.0
    disc = np.sqrt(pb * pb - w0_sq + 0j)
    poles_s = np.concatenate([pb + disc, pb - disc])
    gain_s = bw**order  # `order` zeros at s=0, `order` at infinity

    poles_z = (fs2 + poles_s) / (fs2 - poles_s)
    zeros_z = np.concatenate([np.ones(order), -np.ones(order)])
    gain_z = gain_s * np.real(fs2**order / np.prod(fs2 - poles_s))

    b = gain_z * np.real(np.poly(zeros_z))
    a = np.real(np.poly(poles_z))

    # one conjugate pole pair per biquad, each with a zero at z=1 and z=-1
    upper = poles_z[poles_z.imag > 0]
    if upper.size != order:
        raise FilterDesignError("band too wide for a biquad cascade (real poles)")
    gain_each = abs(gain_z) ** (1.0 / order)
    sos = np.zeros((order, 6))
    for row, p in zip(sos, upper[np.argsort(np.abs(upper))]):
        row[:3] = gain_each * np.array([1.0, 0.0, -1.0])
        row[3:] = [1.0, -2.0 * p.real, abs(p) ** 2]
    sos[0, :3] *= np.sign(gain_z)
    return b, a, sos


def design_bandpass(
    band: BandDefinition, sampling_rate_hz: float, order: int = FILTER_ORDER
) -> FilterCoefficients:
    """Design a Butterworth bandpass for ``band`` via the bilinear transform."""
    nyquist = sampling_rate_hz / 2.0
    if not sampling_rate_hz > 0:
        raise FilterDesignError(f"sampling rate must be positive, got {sampling_rate_hz}")
    if band.high_hz >= nyquist or band.low_hz >= nyquist:
        raise FilterDesignError(
            f"{band.name} band edge {band.high_hz} Hz is at or above the "
            f"Nyquist frequency {nyquist} Hz"
        )
    if band.low_hz <= 0:
        raise FilterDesignError(f"{band.name} low edge must be positive")
    b, a, sos = _design(float(band.low_hz), float(band.high_hz), float(sampling_rate_hz), order)
    coeffs = FilterCoefficients(b, a, order, sos)
    if not coeffs.is_stable():
        raise FilterDesignError(f"{band.name} design is numerically unstable at fs={sampling_rate_hz}")
    return coeffs


def apply_filter(coeffs: FilterCoefficients, signal: EegSignal) -> EegSignal:
    """Forward (causal) filtering in unit scale, then restored to the input scale."""
    signal.require_nonempty()
    if not coeffs.is_stable():
        raise UnstableFilterError("filter has poles on or outside the unit circle")
    x = signal.samples
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        return signal
    y = x / scale
    if coeffs.sections is None:
        y = lfilter_forward(coeffs.numerator, coeffs.denominator, y)
    else:
        for row in coeffs.sections:
            y = lfilter_forward(row[:3], row[3:], y)
    return signal.with_samples(y * scale)
