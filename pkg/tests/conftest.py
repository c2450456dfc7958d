import json

import pytest

from physioreport.ingest import MusicDatabase, MusicTrack
from physioreport.synthgen import ToneSpec, write_fixture

_acceptance_results = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    num, title = marker.args
    _acceptance_results.append((num, title, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    grouped = {}
    for num, title, outcome in _acceptance_results:
        entry = grouped.setdefault(num, {})
        entry[title] = entry.get(title, True) and outcome == "passed"
    for num in sorted(grouped):
        passed = all(grouped[num].values())
        titles = "; ".join(f"{t}{'' if ok else ' [failed]'}" for t, ok in grouped[num].items())
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] AC{num:02d} {titles}")


SESSION_TONES = [
    {"freq_hz": 2.0, "amplitude_start": 1.0, "amplitude_end": 0.4},
    {"freq_hz": 5.0, "amplitude_start": 0.5, "amplitude_end": 1.5},
    {"freq_hz": 10.0, "amplitude_start": 2.0, "amplitude_end": 1.0},
    {"freq_hz": 20.0, "amplitude_start": 0.3, "amplitude_end": 0.9},
]


def session_spec(duration_s=16.0, base_bpm=72.0, seed=3):
    return {
        "eeg": {"tones": SESSION_TONES, "noise_amplitude": 0.05, "fs": 256,
                "duration_s": duration_s, "seed": seed},
        "cardio": {"base_bpm": base_bpm, "jitter_bpm": 2.0, "seed": seed},
    }


@pytest.fixture
def session_dir(tmp_path):
    d = tmp_path / "s01"
    write_fixture(session_spec(), d)
    return d


@pytest.fixture
def small_db():
    return MusicDatabase((
        MusicTrack("A", "Slow", 50.0, "https://example.org/a"),
        MusicTrack("B", "Calm", 66.0, None),
        MusicTrack("C", "Walk", 90.0, "https://example.org/c"),
        MusicTrack("D", "Run", 104.0, "https://example.org/d"),
    ))


def tones(*specs):
    return [ToneSpec(*s) for s in specs]


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path
