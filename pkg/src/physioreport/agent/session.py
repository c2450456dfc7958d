"""Two-phase tool-calling dialogue that turns a session recording into a report."""

from __future__ import annotations

import contextlib
import logging
import tempfile
from pathlib import Path

from ..cardio import summarize_cardio
from ..errors import BackendError, ProtocolError, TurnLimitError
from ..ingest import MusicDatabase, SessionRecording, write_eeg_log
from ..recommend import deterministic_recommendations, integrate, llm_recommend
from ..signal_core import process_eeg
from .backends import ChatBackend
from .config import AgentConfig
from .fallback import deterministic_report
from .messages import ChatMessage
from .prompts import (
    ANALYSIS_HEADER,
    MUSIC_HEADER,
    SOUND_HEADER,
    build_system_prompt,
    build_user_prompt,
    parse_report_sections,
)
from .report import Provenance, TherapyReport
from .tools import execute_tool_call, register_tools

log = logging.getLogger(__name__)


@contextlib.contextmanager
def _eeg_file(recording: SessionRecording):
    if recording.eeg_path:
        yield recording.eeg_path
        return
    with tempfile.TemporaryDirectory(prefix="physioreport-") as tmp:
        path = Path(tmp) / f"{recording.session_id or 'session'}_eeg.csv"
        write_eeg_log(recording.eeg, path)
        yield str(path)


def _dialogue(
    messages: list[ChatMessage], llm: ChatBackend, config: AgentConfig, eeg_path: str
) -> tuple[dict[str, str], int]:
    """Run phase 1 (tool calls) and phase 2 (synthesis); returns sections and requests used."""
    tools = register_tools()
    turns = 0
    while True:
        if turns >= config.max_turns:
            err = TurnLimitError(f"no final report after {config.max_turns} model requests")
            err.transcript = list(messages)
            raise err
        reply = llm.complete(list(messages), tools, config)
        turns += 1
        if reply.role != "assistant":
            raise ProtocolError(f"backend returned a {reply.role!r} message instead of assistant")
        messages.append(reply)
        if reply.tool_calls:
            for call in reply.tool_calls:
                messages.append(execute_tool_call(call, eeg_path))
            continue
        return parse_report_sections(reply.content), turns


def run_session(
    recording: SessionRecording,
    db: MusicDatabase,
    config: AgentConfig,
    llm: ChatBackend | None,
    allow_fallback: bool = True,
) -> TherapyReport:
    """Produce a :class:`TherapyReport` for one recorded session.

    Features and the cardio summary are always computed locally. If the
    backend cannot be reached (``llm`` is None or raises
    :class:`BackendError`) and ``allow_fallback`` is set, the deterministic
    template report is returned instead. Protocol, format and turn-limit
    failures are always raised.
    """
    cardio = summarize_cardio(recording.cardio)
    with _eeg_file(recording) as eeg_path:
        features = process_eeg(eeg_path)
        transcript = [
            ChatMessage("system", build_system_prompt(config)),
            ChatMessage("user", build_user_prompt(eeg_path, cardio)),
        ]
        if llm is None:
            if not allow_fallback:
                raise BackendError("no language-model backend configured")
            return deterministic_report(
                features, cardio, db, config.exercise_offset_bpm, reason="offline"
            )
        try:
            sections, turns = _dialogue(transcript, llm, config, eeg_path)
        except BackendError as exc:
            if not allow_fallback:
                raise
            log.warning("language model unavailable (%s); writing deterministic report", exc)
            return deterministic_report(
                features, cardio, db, config.exercise_offset_bpm, transcript, reason=str(exc)
            )

    if turns < config.max_turns:
        recs = llm_recommend(cardio, db, config, llm, transcript)
    else:
        recs = deterministic_recommendations(cardio.avg_hr_bpm, db, config.exercise_offset_bpm)
    return TherapyReport(
        physiological_analysis=sections[ANALYSIS_HEADER],
        sound_therapy_recommendations=sections[SOUND_HEADER],
        music_recommendations=recs,
        features=features,
        cardio=cardio,
        provenance=Provenance.LLM,
        music_fragment=integrate(features, cardio, recs),
        music_notes=sections[MUSIC_HEADER],
        raw_transcript=tuple(transcript),
    )
