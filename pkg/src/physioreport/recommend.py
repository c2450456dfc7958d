"""Heart-rate to tempo matching: deterministic retrieval and LLM-guided selection."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .cardio import CardioSummary
from .errors import AgentError, InputError
from .ingest import MAX_TRACK_BPM, MIN_TRACK_BPM, MusicDatabase, MusicTrack
from .signal_core.types import EegFeatureSet

if TYPE_CHECKING:
    from .agent.backends import ChatBackend
    from .agent.config import AgentConfig
    from .agent.messages import ChatMessage

log = logging.getLogger(__name__)

DEFAULT_EXERCISE_OFFSET_BPM = 30.0


class Scenario(str, Enum):
    RELAXATION = "Relaxation"
    EXERCISE = "Exercise"

    @property
    def label(self) -> str:
        return "Relaxation" if self is Scenario.RELAXATION else "Physical Activity"

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        key = text.strip().lower()
        for s in cls:
            if key in (s.value.lower(), s.label.lower()):
                return s
        raise InputError(f"unknown scenario {text!r}; expected relaxation or exercise")


class Method(str, Enum):
    DETERMINISTIC = "DeterministicRetrieval"
    LLM_RAG = "LlmRag"


@dataclass(frozen=True)
class Recommendation:
    scenario: Scenario
    track: MusicTrack
    rationale: str
    method: Method

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "track": self.track.to_dict(),
            "rationale": self.rationale,
            "method": self.method.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Recommendation":
        t = data["track"]
        return cls(
            scenario=Scenario(data["scenario"]),
            track=MusicTrack(t["track_id"], t["title"], float(t["bpm"]), t.get("link")),
            rationale=data["rationale"],
            method=Method(data["method"]),
        )


def exercise_target(avg_bpm: float, offset_bpm: float = DEFAULT_EXERCISE_OFFSET_BPM) -> float:
    return min(max(avg_bpm + offset_bpm, MIN_TRACK_BPM), MAX_TRACK_BPM)


def retrieve_tracks(
    avg_bpm: float,
    scenario: Scenario,
    db: MusicDatabase,
    exercise_offset_bpm: float = DEFAULT_EXERCISE_OFFSET_BPM,
) -> list[MusicTrack]:
    """Rank tracks for a scenario; ties go to the lexicographically smaller id.

    Relaxation keeps tracks at or below ``avg_bpm``, closest first, and falls
    back to the single slowest track when none qualify. Exercise ranks every
    track by distance to ``avg_bpm + offset`` clamped to the corpus range.
    """
    if db is None or len(db) == 0:
        raise InputError("music database is empty")
    if not avg_bpm > 0:
        raise InputError(f"average heart rate must be positive, got {avg_bpm}")
    scenario = Scenario(scenario)
    tracks = list(db)
    if scenario is Scenario.RELAXATION:
        below = [t for t in tracks if t.bpm <= avg_bpm]
        if not below:
            return [min(tracks, key=lambda t: (t.bpm, t.track_id))]
        return sorted(below, key=lambda t: (avg_bpm - t.bpm, t.track_id))
    target = exercise_target(avg_bpm, exercise_offset_bpm)
    return sorted(tracks, key=lambda t: (abs(t.bpm - target), t.track_id))


def _deterministic_rationale(track: MusicTrack, scenario: Scenario, avg_bpm: float, offset: float) -> str:
    if scenario is Scenario.RELAXATION:
        if track.bpm <= avg_bpm:
            return (
                f"{track.bpm:g} BPM sits at or just below the average heart rate of "
                f"{avg_bpm:.1f} BPM, encouraging the pulse to settle."
            )
        return (
            f"No track is slower than {avg_bpm:.1f} BPM; {track.bpm:g} BPM is the "
            "slowest available tempo."
        )
    target = exercise_target(avg_bpm, offset)
    return (
        f"{track.bpm:g} BPM is the closest tempo to the activity target of "
        f"{target:.1f} BPM (average heart rate {avg_bpm:.1f} + {offset:g})."
    )


def deterministic_recommendations(
    avg_bpm: float, db: MusicDatabase, exercise_offset_bpm: float = DEFAULT_EXERCISE_OFFSET_BPM
) -> tuple[Recommendation, Recommendation]:
    out = []
    for scenario in (Scenario.RELAXATION, Scenario.EXERCISE):
        track = retrieve_tracks(avg_bpm, scenario, db, exercise_offset_bpm)[0]
        out.append(
            Recommendation(
                scenario=scenario,
                track=track,
                rationale=_deterministic_rationale(track, scenario, avg_bpm, exercise_offset_bpm),
                method=Method.DETERMINISTIC,
            )
        )
    return out[0], out[1]


RAG_SYSTEM_PROMPT = """You are a music therapy assistant that selects tracks from a fixed library.
Choose exactly one track for each scenario:
- Relaxation: tempo matching or slightly below the listener's heart rate.
- Exercise: tempo elevated above the heart rate to suit physical activity.
Only use track_id values that appear in the library.
Reply with a single JSON object and nothing else:
{"relaxation": {"track_id": "...", "rationale": "..."}, "exercise": {"track_id": "...", "rationale": "..."}}"""


def build_rag_messages(summary: CardioSummary, db: MusicDatabase) -> list["ChatMessage"]:
    from .agent.messages import ChatMessage

    user = (
        f"Average heart rate over the session: {summary.avg_hr_bpm:.1f} BPM.\n"
        f"Music library ({len(db)} tracks, JSON):\n{db.to_json()}"
    )
    return [ChatMessage("system", RAG_SYSTEM_PROMPT), ChatMessage("user", user)]


_JSON_OBJECT = re.compile(r"\{.*\}", re.DOTALL)


def parse_rag_answer(text: str, db: MusicDatabase) -> dict[Scenario, tuple[MusicTrack, str]] | None:
    """Validated ``{scenario: (track, rationale)}`` or None if anything is off."""
    match = _JSON_OBJECT.search(text or "")
    if not match:
        return None
    try:
        data = json.loads(match.group(0))
    except json.JSONDecodeError:
        return None
    if not isinstance(data, dict):
        return None
    picks = {}
    for scenario, key in ((Scenario.RELAXATION, "relaxation"), (Scenario.EXERCISE, "exercise")):
        entry = data.get(key)
        if isinstance(entry, str):
            entry = {"track_id": entry}
        if not isinstance(entry, dict):
            return None
        track_id = entry.get("track_id")
        if not isinstance(track_id, str) or track_id not in db:
            return None
        rationale = entry.get("rationale")
        if not isinstance(rationale, str) or not rationale.strip():
            return None
        picks[scenario] = (db.get(track_id), rationale.strip())
    return picks


def llm_recommend(
    summary: CardioSummary,
    db: MusicDatabase,
    config: "AgentConfig",
    llm: "ChatBackend",
    transcript: list | None = None,
) -> tuple[Recommendation, Recommendation]:
    """Ask the model to pick one track per scenario from the embedded library.

    Any transport failure or an answer that does not validate against ``db``
    yields the deterministic picks instead.
    """
    messages = build_rag_messages(summary, db)
    fallback = deterministic_recommendations(summary.avg_hr_bpm, db, config.exercise_offset_bpm)
    if transcript is not None:
        transcript.extend(messages)
    try:
        reply = llm.complete(messages, None, config)
    except AgentError as exc:
        log.warning("music recommendation request failed (%s); using BPM retrieval", exc)
        return fallback
    if transcript is not None:
        transcript.append(reply)
    picks = parse_rag_answer(reply.content, db)
    if picks is None:
        log.warning("music recommendation answer did not validate; using BPM retrieval")
        return fallback
    relax, exercise = (
        Recommendation(s, picks[s][0], picks[s][1], Method.LLM_RAG)
        for s in (Scenario.RELAXATION, Scenario.EXERCISE)
    )
    return relax, exercise


@dataclass(frozen=True)
class MusicFragment:
    """The music-recommendation section of a report."""

    avg_hr_bpm: float
    eeg_context: str
    recommendations: tuple[Recommendation, ...]

    def to_dict(self) -> dict:
        return {
            "avg_hr_bpm": self.avg_hr_bpm,
            "eeg_context": self.eeg_context,
            "recommendations": [r.to_dict() for r in self.recommendations],
        }

    def to_text(self) -> str:
        lines = [
            f"Average heart rate: {self.avg_hr_bpm:.1f} BPM",
            f"EEG context: {self.eeg_context}",
        ]
        for rec in self.recommendations:
            lines.append(f"- {rec.scenario.label}: {rec.track.title} ({rec.track.bpm:g} BPM)")
            if rec.track.link:
                lines.append(f"  {rec.track.link}")
            lines.append(f"  {rec.rationale}")
        return "\n".join(lines)


def integrate(
    features: EegFeatureSet, summary: CardioSummary, recs
) -> MusicFragment:
    context = "; ".join(
        f"{b.band} {b.trend.value.lower()} ({b.dominant_freq_hz:.2f} Hz)" for b in features.per_band
    )
    return MusicFragment(
        avg_hr_bpm=summary.avg_hr_bpm, eeg_context=context, recommendations=tuple(recs)
    )
