import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import signal as sps

from physioreport.errors import (
    FilterDesignError,
    FlatSpectrumError,
    InputError,
    InvalidParameterError,
    UnstableFilterError,
)
from physioreport.ingest import write_eeg_log
from physioreport.signal_core import (
    ALPHA,
    BETA,
    CANONICAL_BANDS,
    DELTA,
    THETA,
    BandDefinition,
    EegFeatureSet,
    EegSignal,
    Envelope,
    FilterCoefficients,
    Trend,
    analytic_signal,
    apply_filter,
    band_by_name,
    classify_trend,
    design_bandpass,
    dominant_frequency,
    features_from_signal,
    hilbert_envelope,
    power_spectrum,
    process_eeg,
    remove_dc,
)
from physioreport.synthgen import ToneSpec, synth_eeg

FS = 256.0


def sig(x, fs=FS):
    return EegSignal(np.asarray(x, dtype=float), fs)


def tone(freq, n=2048, amp=1.0, phase=0.0, fs=FS):
    t = np.arange(n) / fs
    return amp * np.sin(2 * np.pi * freq * t + phase)


def response_grid(b, a, freqs, fs):
    # explicit sum over taps; independent of polyval and freqz
    w = 2 * np.pi * np.asarray(freqs) / fs
    k_b = np.arange(len(b))
    k_a = np.arange(len(a))
    num = np.exp(-1j * np.outer(w, k_b)) @ np.asarray(b)
    den = np.exp(-1j * np.outer(w, k_a)) @ np.asarray(a)
    return num / den


def analytic_magnitude(band, freqs, fs, order=4):
    # closed-form |H| of a bilinear-transformed Butterworth bandpass
    warp = lambda f: 2 * fs * np.tan(np.pi * np.asarray(f, dtype=float) / fs)
    w_lo, w_hi, w = warp(band.low_hz), warp(band.high_hz), warp(freqs)
    nu = (w * w - w_lo * w_hi) / (w * (w_hi - w_lo))
    return 1.0 / np.sqrt(1.0 + nu ** (2 * order))


# ---- types -----------------------------------------------------------------

def test_band_definitions_are_canonical():
    assert [(b.name, b.low_hz, b.high_hz) for b in CANONICAL_BANDS] == [
        ("Delta", 0.5, 4.0), ("Theta", 4.0, 8.0), ("Alpha", 8.0, 13.0), ("Beta", 13.0, 30.0),
    ]
    assert band_by_name("alpha") is ALPHA
    with pytest.raises(InputError):
        band_by_name("Gamma")


@pytest.mark.parametrize("low,high", [(0, 4), (4, 4), (8, 4), (-1, 2)])
def test_band_definition_rejects_bad_edges(low, high):
    with pytest.raises(InputError):
        BandDefinition("Alpha", low, high)


def test_signal_rejects_non_finite_and_bad_rate():
    with pytest.raises(InputError):
        sig([0.0, math.nan])
    with pytest.raises(InputError):
        sig([0.0, math.inf])
    with pytest.raises(InputError):
        EegSignal(np.zeros(4), 0.0)


def test_signal_samples_are_read_only():
    s = sig([1.0, 2.0])
    with pytest.raises(ValueError):
        s.samples[0] = 5.0


def test_empty_signal_is_rejected_by_every_stage():
    empty = sig([])
    for fn in (remove_dc, lambda s: hilbert_envelope(s), lambda s: dominant_frequency(s, ALPHA)):
        with pytest.raises(InputError):
            fn(empty)


# ---- DC removal ------------------------------------------------------------

@given(arrays(np.float64, st.integers(1, 400), elements=st.floats(-1e6, 1e6)))
def test_remove_dc_matches_fsum_oracle(x):
    out = remove_dc(sig(x)).samples
    mean = math.fsum(x.tolist()) / x.size
    np.testing.assert_allclose(out, x - mean, rtol=0, atol=1e-9 * max(1.0, np.max(np.abs(x))))


def test_remove_dc_on_constant_signal_gives_zeros():
    assert np.all(remove_dc(sig(np.full(100, 7.25))).samples == 0.0)


# ---- filter design ---------------------------------------------------------

@pytest.mark.parametrize("band", CANONICAL_BANDS, ids=lambda b: b.name)
@pytest.mark.parametrize("fs", [128.0, 256.0, 512.0])
def test_design_matches_scipy_butter(band, fs):
    coeffs = design_bandpass(band, fs)
    b, a = sps.butter(4, [band.low_hz, band.high_hz], btype="bandpass", fs=fs)
    assert len(coeffs.numerator) == len(coeffs.denominator) == 9
    np.testing.assert_allclose(coeffs.numerator, b, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(coeffs.denominator, a, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("band", CANONICAL_BANDS, ids=lambda b: b.name)
def test_design_response_on_grid_oracle(band):
    coeffs = design_bandpass(band, FS)
    lo, hi = band.low_hz, band.high_hz
    edges = np.abs(coeffs.frequency_response([lo, hi], FS))
    np.testing.assert_allclose(edges, 1 / math.sqrt(2), rtol=1e-9)
    grid = np.linspace(0.01, FS / 2 - 0.01, 2000)
    mag = np.abs(coeffs.frequency_response(grid, FS))
    assert mag.max() <= 1.0 + 1e-9
    np.testing.assert_allclose(mag, analytic_magnitude(band, grid, FS), rtol=1e-7, atol=1e-12)
    # one octave outside each edge is at least 20 dB down
    assert np.all(np.abs(coeffs.frequency_response([lo / 2, hi * 2], FS)) <= 0.1)


def test_design_is_stable_and_normalized():
    for band in CANONICAL_BANDS:
        c = design_bandpass(band, FS)
        assert c.denominator[0] == 1.0
        assert c.is_stable()
        assert np.all(np.abs(c.poles()) < 1)


def test_design_rejects_band_above_nyquist():
    with pytest.raises(FilterDesignError):
        design_bandpass(BETA, 50.0)


def test_unstable_coefficients_are_refused():
    bad = FilterCoefficients(np.array([1.0]), np.array([1.0, -2.0]))
    assert not bad.is_stable()
    with pytest.raises(UnstableFilterError):
        apply_filter(bad, sig(np.ones(8)))


# ---- filtering --------------------------------------------------------------

@pytest.mark.parametrize("band", CANONICAL_BANDS, ids=lambda b: b.name)
@pytest.mark.parametrize("fs", [256.0, 512.0])
def test_apply_filter_matches_scipy_sosfilt(band, fs):
    rng = np.random.default_rng(11)
    x = rng.normal(size=20000) * 40
    coeffs = design_bandpass(band, fs)
    sos = sps.butter(4, [band.low_hz, band.high_hz], btype="bandpass", fs=fs, output="sos")
    y = apply_filter(coeffs, EegSignal(x, fs)).samples
    ref = sps.sosfilt(sos, x)
    assert np.max(np.abs(y - ref)) <= 1e-10 * np.max(np.abs(ref))


def test_sections_expand_to_transfer_function():
    c = design_bandpass(ALPHA, FS)
    b, a = np.array([1.0]), np.array([1.0])
    for row in c.sections:
        b, a = np.convolve(b, row[:3]), np.convolve(a, row[3:])
    np.testing.assert_allclose(b, c.numerator, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(a, c.denominator, rtol=1e-9, atol=1e-12)


def test_narrow_low_band_at_high_rate_stays_bounded():
    # the expanded 9-tap polynomial has a root outside the unit circle here
    c = design_bandpass(DELTA, 512.0)
    assert np.max(np.abs(np.roots(c.denominator))) > 1.0
    assert c.is_stable()
    x = np.random.default_rng(0).normal(size=100_000)
    y = apply_filter(c, EegSignal(x, 512.0)).samples
    assert np.max(np.abs(y)) < 5.0


def test_transfer_function_only_coefficients_still_filter():
    b, a = sps.butter(2, [8, 13], btype="bandpass", fs=FS)
    x = np.random.default_rng(2).normal(size=1000)
    y = apply_filter(FilterCoefficients(b, a, 2), sig(x)).samples
    np.testing.assert_allclose(y, sps.lfilter(b, a, x), rtol=1e-9, atol=1e-12)


def test_filter_steady_state_gain_matches_response():
    coeffs = design_bandpass(THETA, FS)
    f = 9.0
    y = apply_filter(coeffs, sig(tone(f, n=int(FS) * 20))).samples
    steady = y[-int(FS) * 4:]
    gain = abs(response_grid(coeffs.numerator, coeffs.denominator, [f], FS)[0])
    assert np.max(np.abs(steady)) == pytest.approx(gain, rel=0.01)


def test_filter_of_zero_signal_is_zero():
    out = apply_filter(design_bandpass(ALPHA, FS), sig(np.zeros(64)))
    assert np.all(out.samples == 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1e4), st.integers(0, 2**32 - 1))
def test_filter_is_linear_in_scale(c, seed):
    x = np.random.default_rng(seed).normal(size=700)
    coeffs = design_bandpass(ALPHA, FS)
    y1 = apply_filter(coeffs, sig(x)).samples
    yc = apply_filter(coeffs, sig(c * x)).samples
    np.testing.assert_allclose(yc, c * y1, rtol=1e-9, atol=1e-12 * c)


# ---- envelope ---------------------------------------------------------------

@given(arrays(np.float64, st.integers(1, 300), elements=st.floats(-1e3, 1e3)))
def test_analytic_signal_matches_scipy_hilbert(x):
    z = analytic_signal(x)
    np.testing.assert_allclose(z, sps.hilbert(x), rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(z.real, x, atol=1e-9)


@pytest.mark.parametrize("n", [256, 1000, 256 * 5 + 1, 3])
def test_windowed_envelope_equals_per_window_scipy(n):
    x = np.random.default_rng(n).normal(size=n)
    env = hilbert_envelope(sig(x), 256)
    assert isinstance(env, Envelope) and len(env) == n
    expected = np.concatenate([np.abs(sps.hilbert(x[i:i + 256])) for i in range(0, n, 256)])
    np.testing.assert_allclose(env.values, expected, rtol=1e-9, atol=1e-12)


@given(arrays(np.float64, st.integers(2, 1200), elements=st.floats(-1e4, 1e4)))
def test_envelope_is_nonnegative_and_same_length(x):
    env = hilbert_envelope(sig(x)).values
    assert env.shape == x.shape
    assert np.all(env >= 0)


@pytest.mark.parametrize("bad", [0, 1, -5, 2.5])
def test_envelope_rejects_bad_window(bad):
    with pytest.raises(InvalidParameterError):
        hilbert_envelope(sig(np.ones(10)), bad)


def test_envelope_recovers_amplitude_of_integer_cycle_tone():
    x = tone(8.0, n=2048, amp=3.0)
    np.testing.assert_allclose(hilbert_envelope(sig(x)).values, 3.0, rtol=1e-9)


# ---- trend ------------------------------------------------------------------

@given(st.lists(st.floats(0, 1e6), min_size=2, max_size=301))
def test_trend_matches_sort_based_median_oracle(values):
    res = classify_trend(np.array(values))
    half = len(values) // 2
    m1 = statistics.median(values[:half])
    m2 = statistics.median(values[half:])
    assert res.median_first_half == m1
    assert res.median_second_half == m2
    assert res.trend is (Trend.INCREASING if m2 > m1 else Trend.DECREASING)


def test_trend_tie_is_decreasing():
    assert classify_trend(np.ones(10)).trend is Trend.DECREASING


def test_trend_odd_length_gives_extra_sample_to_second_half():
    res = classify_trend(np.array([1.0, 1.0, 2.0, 2.0, 100.0]))
    assert res.median_first_half == 1.0
    assert res.median_second_half == 2.0


def test_trend_needs_two_samples():
    with pytest.raises(InputError):
        classify_trend(np.array([1.0]))


def test_trend_result_unpacks():
    trend, m1, m2 = classify_trend(np.array([1.0, 2.0]))
    assert (trend, m1, m2) == (Trend.INCREASING, 1.0, 2.0)


# ---- dominant frequency ------------------------------------------------------

def brute_force_dominant(x, fs, band):
    n = len(x)
    best_f, best_p = None, -1.0
    idx = np.arange(n)
    for k in range(n // 2 + 1):
        f = k * fs / n
        if not band.low_hz <= f <= band.high_hz:
            continue
        p = abs(np.sum(x * np.exp(-2j * np.pi * k * idx / n))) ** 2
        if p > best_p + 1e-9 * max(best_p, 1.0):
            best_f, best_p = f, p
    return best_f


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CANONICAL_BANDS), st.integers(0, 2**32 - 1), st.sampled_from([256, 500, 1024]))
def test_dominant_frequency_matches_dft_oracle(band, seed, n):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    f_true = rng.uniform(band.low_hz, band.high_hz)
    x += 5 * tone(f_true, n=n)
    got = dominant_frequency(sig(x), band)
    assert got == pytest.approx(brute_force_dominant(x, FS, band))


def test_power_spectrum_bins():
    freqs, power = power_spectrum(tone(16.0, n=256, amp=2.0), FS)
    assert freqs[1] == pytest.approx(1.0)
    assert freqs[int(np.argmax(power))] == 16.0
    assert power.max() == pytest.approx((2.0 * 256 / 2) ** 2)


def test_dominant_frequency_flat_spectrum_reports_lowest_bin():
    with pytest.raises(FlatSpectrumError) as info:
        dominant_frequency(sig(np.zeros(512)), THETA)
    assert info.value.fallback_hz == 4.0


def test_dominant_frequency_no_bin_in_band():
    with pytest.raises(InputError):
        dominant_frequency(sig(np.ones(3)), THETA)


# ---- pipeline -----------------------------------------------------------------

def test_features_of_ramped_tones():
    tones = [
        ToneSpec(2.0, 1.0, 0.3), ToneSpec(6.0, 0.2, 1.0),
        ToneSpec(11.0, 1.0, 0.5), ToneSpec(22.0, 0.1, 0.6),
    ]
    fs = features_from_signal(synth_eeg(tones, 0.02, duration_s=16.0, seed=1))
    got = {b.band: (b.trend, b.dominant_freq_hz) for b in fs.per_band}
    assert got == {
        "Delta": (Trend.DECREASING, 2.0),
        "Theta": (Trend.INCREASING, 6.0),
        "Alpha": (Trend.DECREASING, 11.0),
        "Beta": (Trend.INCREASING, 22.0),
    }
    assert fs.warnings == ()


def test_zero_signal_yields_decreasing_and_warnings(tmp_path):
    path = write_eeg_log(sig(np.zeros(1024)), tmp_path / "flat.csv")
    fs = process_eeg(path)
    assert all(b.trend is Trend.DECREASING for b in fs.per_band)
    assert len(fs.warnings) == 4
    assert [b.dominant_freq_hz for b in fs.per_band] == [0.5, 4.0, 8.0, 13.0]
    assert fs.to_dict()["warnings"]


def test_feature_set_json_layout(tmp_path):
    path = write_eeg_log(synth_eeg([ToneSpec(10.0, 1, 2)], duration_s=4), tmp_path / "e.csv")
    fs = process_eeg(path)
    d = fs.to_dict()
    assert list(d) == ["bands"]
    assert [b["name"] for b in d["bands"]] == ["Delta", "Theta", "Alpha", "Beta"]
    assert list(d["bands"][0]) == ["name", "trend", "dominant_freq_hz",
                                  "median_first_half", "median_second_half"]
    again = EegFeatureSet.from_dict(d)
    assert again.to_json() == fs.to_json()
    assert fs["Alpha"].dominant_freq_hz == 10.0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1e-3, 0.5, 7.0, 1e4]))
def test_pipeline_is_scale_invariant(seed, c):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=2048) + 3 * tone(rng.uniform(4, 30), n=2048)
    base = features_from_signal(sig(x))
    scaled = features_from_signal(sig(c * x))
    for b0, b1 in zip(base.per_band, scaled.per_band):
        assert b0.trend is b1.trend
        assert b0.dominant_freq_hz == b1.dominant_freq_hz


def test_pipeline_ignores_dc_offset():
    x = tone(10.0, n=2048) + np.linspace(0.2, 1.0, 2048) * tone(6.0, n=2048)
    a = features_from_signal(sig(x))
    b = features_from_signal(sig(x + 500.0))
    assert [f.trend for f in a.per_band] == [f.trend for f in b.per_band]
    assert [f.dominant_freq_hz for f in a.per_band] == [f.dominant_freq_hz for f in b.per_band]
