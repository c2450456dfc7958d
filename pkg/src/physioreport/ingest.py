"""On-disk formats: EEG logs, oximeter logs and the music database.

EEG log::

    sampling_rate_hz=256,channel=AF3[,key=value...]
    <timestamp_ms>,<voltage_uv>
    ...

Oximeter log (header optional)::

    sample_rate_hz=1[,key=value...]
    <timestamp_ms>,<hr_bpm>[,<spo2_pct>]

Music database: a JSON array of ``{"track_id", "title", "bpm", "link"}``.

All files are UTF-8 with LF line endings and ``.`` as decimal separator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from .cardio import CardioSeries
from .errors import EmptyInputError, FormatError, IngestError, ParseError, ValidationError
from .signal_core.types import EegSignal

MIN_TRACK_BPM = 40.0
MAX_TRACK_BPM = 130.0
DURATION_TOLERANCE = 0.10


def format_number(value: float) -> str:
    """Shortest text that parses back to exactly ``value``."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _read_lines(path) -> list[str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc.strerror or exc}", path) from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise ParseError("file is not valid UTF-8", path, line) from exc
    return text.split("\n")


def _parse_header(line: str, path, lineno: int = 1) -> dict[str, str]:
    fields = {}
    for part in line.strip().split(","):
        key, sep, value = part.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise FormatError(f"malformed header field {part!r}; expected key=value", path, lineno)
        fields[key] = value
    return fields


def _looks_like_header(line: str) -> bool:
    return "=" in line


def _parse_float(text: str, what: str, path, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{what} is not a number: {text!r}", path, lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} is not finite: {text!r}", path, lineno)
    return value


def _parse_timestamp(text: str, path, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"timestamp_ms is not an integer: {text!r}", path, lineno) from None


def _body_rows(lines: list[str], start: int):
    """Yield ``(lineno, fields)`` for non-blank lines from index ``start``."""
    for idx in range(start, len(lines)):
        line = lines[idx].rstrip("\r")
        if not line.strip():
            continue
        yield idx + 1, [f.strip() for f in line.split(",")]


def parse_eeg_log(path) -> EegSignal:
    lines = _read_lines(path)
    if not lines or not _looks_like_header(lines[0]):
        raise FormatError(
            "missing header line (expected e.g. 'sampling_rate_hz=256,channel=AF3')", path, 1
        )
    header = _parse_header(lines[0], path)
    for key in ("sampling_rate_hz", "channel"):
        if key not in header:
            raise FormatError(f"header is missing required key {key!r}", path, 1)
    try:
        fs = float(header.pop("sampling_rate_hz"))
    except ValueError:
        raise FormatError("sampling_rate_hz is not a number", path, 1) from None
    if not (math.isfinite(fs) and fs > 0):
        raise FormatError(f"sampling_rate_hz must be positive, got {fs}", path, 1)
    channel = header.pop("channel")

    timestamps, samples = [], []
    prev_ts = None
    for lineno, fields in _body_rows(lines, 1):
        if len(fields) != 2:
            raise ParseError(
                f"expected 2 fields 'timestamp_ms,voltage_uv', got {len(fields)}", path, lineno
            )
        ts = _parse_timestamp(fields[0], path, lineno)
        if prev_ts is not None and ts < prev_ts:
            raise ParseError(f"timestamp {ts} goes backwards (previous {prev_ts})", path, lineno)
        prev_ts = ts
        timestamps.append(ts)
        samples.append(_parse_float(fields[1], "voltage", path, lineno))
    if not samples:
        raise EmptyInputError("EEG log contains no samples", path, 2)
    return EegSignal(
        samples=np.array(samples),
        sampling_rate_hz=fs,
        channel_label=channel,
        timestamps_ms=np.array(timestamps, dtype=np.int64),
        metadata=header,
    )


def _default_timestamps(n: int, rate_hz: float) -> np.ndarray:
    return np.rint(np.arange(n) * (1000.0 / rate_hz)).astype(np.int64)


def format_eeg_log(signal: EegSignal) -> str:
    header = [f"sampling_rate_hz={format_number(signal.sampling_rate_hz)}", f"channel={signal.channel_label}"]
    header += [f"{k}={v}" for k, v in signal.metadata.items()]
    ts = signal.timestamps_ms
    if ts is None:
        ts = _default_timestamps(len(signal), signal.sampling_rate_hz)
    rows = [f"{int(t)},{format_number(v)}" for t, v in zip(ts.tolist(), signal.samples.tolist())]
    return ",".join(header) + "\n" + "".join(r + "\n" for r in rows)


def write_eeg_log(signal: EegSignal, path) -> Path:
    path = Path(path)
    path.write_text(format_eeg_log(signal), encoding="utf-8", newline="\n")
    return path


def parse_oximeter_log(path) -> CardioSeries:
    lines = _read_lines(path)
    start = 0
    rate = 1.0
    metadata: dict[str, str] = {}
    if lines and _looks_like_header(lines[0]):
        metadata = _parse_header(lines[0], path)
        start = 1
        if "sample_rate_hz" in metadata:
            try:
                rate = float(metadata.pop("sample_rate_hz"))
            except ValueError:
                raise FormatError("sample_rate_hz is not a number", path, 1) from None
            if not (math.isfinite(rate) and rate > 0):
                raise FormatError(f"sample_rate_hz must be positive, got {rate}", path, 1)

    timestamps, hr, spo2 = [], [], []
    prev_ts = None
    for lineno, fields in _body_rows(lines, start):
        if len(fields) not in (2, 3):
            raise ParseError(
                f"expected 'timestamp_ms,hr_bpm[,spo2_pct]', got {len(fields)} fields", path, lineno
            )
        ts = _parse_timestamp(fields[0], path, lineno)
        if prev_ts is not None and ts < prev_ts:
            raise ParseError(f"timestamp {ts} goes backwards (previous {prev_ts})", path, lineno)
        prev_ts = ts
        timestamps.append(ts)
        hr.append(_parse_float(fields[1], "hr_bpm", path, lineno))
        if len(fields) == 3 and fields[2] != "":
            spo2.append(_parse_float(fields[2], "spo2_pct", path, lineno))
        else:
            spo2.append(math.nan)
    if not hr:
        raise EmptyInputError("oximeter log contains no samples", path, start + 1)
    spo2_arr = np.array(spo2)
    if np.all(np.isnan(spo2_arr)):
        spo2_arr = np.array([], dtype=np.float64)
    return CardioSeries(
        hr_bpm=np.array(hr),
        spo2_pct=spo2_arr,
        sample_rate_hz=rate,
        timestamps_ms=np.array(timestamps, dtype=np.int64),
        metadata=metadata,
    )


def format_oximeter_log(series: CardioSeries) -> str:
    header = [f"sample_rate_hz={format_number(series.sample_rate_hz)}"]
    header += [f"{k}={v}" for k, v in series.metadata.items()]
    ts = series.timestamps_ms
    if ts is None:
        ts = _default_timestamps(len(series), series.sample_rate_hz)
    lines = [",".join(header)]
    has_spo2 = series.spo2_pct.size > 0
    for i, (t, h) in enumerate(zip(ts.tolist(), series.hr_bpm.tolist())):
        row = f"{int(t)},{format_number(h)}"
        if has_spo2:
            s = series.spo2_pct[i]
            row += "," + ("" if math.isnan(s) else format_number(s))
        lines.append(row)
    return "".join(line + "\n" for line in lines)


def write_oximeter_log(series: CardioSeries, path) -> Path:
    path = Path(path)
    path.write_text(format_oximeter_log(series), encoding="utf-8", newline="\n")
    return path


@dataclass(frozen=True)
class SessionRecording:
    eeg: EegSignal
    cardio: CardioSeries
    session_id: str
    started_at: datetime | None = None
    metadata: dict = field(default_factory=dict)
    eeg_path: str | None = None

    def __post_init__(self):
        d_eeg = self.eeg.duration_s
        d_cardio = self.cardio.duration_s
        longest = max(d_eeg, d_cardio)
        if longest > 0 and abs(d_eeg - d_cardio) > DURATION_TOLERANCE * longest:
            raise ValidationError(
                f"EEG duration {d_eeg:.1f} s and oximeter duration {d_cardio:.1f} s "
                f"differ by more than {DURATION_TOLERANCE:.0%}"
            )


def load_session(eeg_path, oximeter_path, session_id: str | None = None) -> SessionRecording:
    eeg = parse_eeg_log(eeg_path)
    cardio = parse_oximeter_log(oximeter_path)
    meta = dict(eeg.metadata)
    started_at = None
    if "started_at" in meta:
        try:
            started_at = datetime.fromtimestamp(int(meta["started_at"]) / 1000.0, tz=timezone.utc)
        except ValueError:
            raise FormatError("started_at must be epoch milliseconds", eeg_path, 1) from None
    sid = session_id or meta.get("session_id") or Path(eeg_path).parent.name or Path(eeg_path).stem
    try:
        return SessionRecording(
            eeg=eeg,
            cardio=cardio,
            session_id=sid,
            started_at=started_at,
            metadata=meta,
            eeg_path=str(eeg_path),
        )
    except ValidationError as exc:
        raise ValidationError(exc.reason, oximeter_path) from None


@dataclass(frozen=True)
class MusicTrack:
    track_id: str
    title: str
    bpm: float
    link: str | None = None

    def to_dict(self) -> dict:
        return {"track_id": self.track_id, "title": self.title, "bpm": self.bpm, "link": self.link}


@dataclass(frozen=True)
class MusicDatabase:
    tracks: tuple[MusicTrack, ...]

    def __post_init__(self):
        tracks = tuple(self.tracks)
        object.__setattr__(self, "tracks", tracks)
        if not tracks:
            raise ValidationError("music database has no tracks")
        seen = set()
        for t in tracks:
            if t.track_id in seen:
                raise ValidationError(f"duplicate track_id {t.track_id!r}")
            seen.add(t.track_id)
            if not MIN_TRACK_BPM <= t.bpm <= MAX_TRACK_BPM:
                raise ValidationError(
                    f"track {t.track_id!r} has bpm {t.bpm:g} outside "
                    f"[{MIN_TRACK_BPM:g}, {MAX_TRACK_BPM:g}]"
                )
        object.__setattr__(self, "_by_id", {t.track_id: t for t in tracks})

    def __len__(self) -> int:
        return len(self.tracks)

    def __iter__(self):
        return iter(self.tracks)

    def __contains__(self, track_id) -> bool:
        return track_id in self._by_id

    def get(self, track_id: str) -> MusicTrack:
        return self._by_id[track_id]

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps([t.to_dict() for t in self.tracks], indent=indent, ensure_ascii=False)


def _line_of(text: str, needle: str) -> int | None:
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _track_from_obj(obj, index: int, text: str, path) -> MusicTrack:
    if not isinstance(obj, dict):
        raise FormatError(f"tracks[{index}] is not an object", path)
    track_id = obj.get("track_id")
    line = _line_of(text, json.dumps(track_id)) if isinstance(track_id, str) else None
    if not isinstance(track_id, str) or not track_id:
        raise ValidationError(f"tracks[{index}] has no string track_id", path, line)
    title = obj.get("title")
    if not isinstance(title, str) or not title:
        raise ValidationError(f"track {track_id!r} has no title", path, line)
    bpm = obj.get("bpm")
    if isinstance(bpm, bool) or not isinstance(bpm, (int, float)):
        raise ValidationError(f"track {track_id!r} has non-numeric bpm", path, line)
    link = obj.get("link")
    if link is not None and not isinstance(link, str):
        raise ValidationError(f"track {track_id!r} link must be a string", path, line)
    return MusicTrack(track_id=track_id, title=title, bpm=float(bpm), link=link or None)


def music_db_from_text(text: str, path="<memory>") -> MusicDatabase:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    if not isinstance(data, list):
        raise FormatError("music database must be a JSON array of track objects", path, 1)
    if not data:
        raise ValidationError("music database has no tracks", path, 1)
    tracks = [_track_from_obj(obj, i, text, path) for i, obj in enumerate(data)]
    seen = set()
    for t in tracks:
        line = _line_of(text, json.dumps(t.track_id))
        if t.track_id in seen:
            # report the second occurrence
            first = text.find(json.dumps(t.track_id))
            second = text.find(json.dumps(t.track_id), first + 1)
            line = text.count("\n", 0, second) + 1 if second >= 0 else line
            raise ValidationError(f"duplicate track_id {t.track_id!r}", path, line)
        seen.add(t.track_id)
        if not MIN_TRACK_BPM <= t.bpm <= MAX_TRACK_BPM:
            raise ValidationError(
                f"track {t.track_id!r} has bpm {t.bpm:g} outside "
                f"[{MIN_TRACK_BPM:g}, {MAX_TRACK_BPM:g}]",
                path,
                line,
            )
    return MusicDatabase(tuple(tracks))


def load_music_db(path) -> MusicDatabase:
    lines = _read_lines(path)
    return music_db_from_text("\n".join(lines), path)


def default_music_db() -> MusicDatabase:
    """The bundled 26-track reference corpus."""
    text = resources.files("physioreport").joinpath("data/music_db.json").read_text("utf-8")
    return music_db_from_text(text, "<bundled music_db.json>")


def write_music_db(db: MusicDatabase, path) -> Path:
    path = Path(path)
    path.write_text(db.to_json(indent=2) + "\n", encoding="utf-8", newline="\n")
    return path
