"""System prompt, user prompt and parsing of the model's final report."""

from __future__ import annotations

import re

from ..cardio import CardioSummary
from ..errors import ResponseFormatError
from .config import AgentConfig

ANALYSIS_HEADER = "Physiological Signal Analysis"
SOUND_HEADER = "Personalized Sound Therapy Recommendations"
MUSIC_HEADER = "Personalized Music Recommendations"
SECTION_HEADERS = (ANALYSIS_HEADER, SOUND_HEADER, MUSIC_HEADER)

_HEADER_ALIASES = {
    "physiological signal analysis": ANALYSIS_HEADER,
    "physiological data analysis": ANALYSIS_HEADER,
    "personalized sound therapy recommendations": SOUND_HEADER,
    "personalized music recommendations": MUSIC_HEADER,
}

ROLE = "Brain Signal Analysis and Music Therapy Expert"

_SYSTEM_TEMPLATE = """## Role
You are a {role}. You combine clinical EEG interpretation with receptive music therapy practice, and you explain findings to listeners who have no technical background.

## Task
Step 1: Call the {tool} tool with the EEG file path given by the user. It returns, for the Delta, Theta, Alpha and Beta bands, whether amplitude rose or fell between the first and second half of the session (trend) and the band's dominant frequency in Hz. Interpret what these changes suggest about the listener's state.
Step 2: Integration of results with music therapy theory. Relate the band changes and the average heart rate to established findings and turn them into concrete listening suggestions: frequencies, timbres, pulsed or binaural-beat settings and session timing.

## Output format
Write plain English text with exactly these three section titles, each alone on its own line and in this order. Quote only frequencies the tool returned.

{analysis}
<For each band, one or two sentences: the band name, its trend, its dominant frequency in Hz, and what the change suggests. Finish with one sentence on the overall state.>

{sound}
1. <Frequency resonance: a sound layer tuned to a measured dominant frequency, with an example timbre.>
2. <Dynamic regulation: how to adjust texture or tempo in response to the fastest band.>
3. <Integrated protocol: a binaural-beat pair, naming the frequency for each ear.>

{music}
<One or two sentences of listening advice. Tempo-matched tracks from the music library are attached to this section automatically.>
"""


def build_system_prompt(config: AgentConfig | None = None) -> str:
    return _SYSTEM_TEMPLATE.format(
        role=ROLE,
        tool="process_eeg",
        analysis=ANALYSIS_HEADER,
        sound=SOUND_HEADER,
        music=MUSIC_HEADER,
    )


def build_user_prompt(eeg_path: str, cardio: CardioSummary | None = None) -> str:
    lines = [
        "Please analyse my music therapy session.",
        f"EEG file path: {eeg_path}",
    ]
    if cardio is not None:
        lines.append(f"Average heart rate during the session: {cardio.avg_hr_bpm:.1f} BPM")
        if cardio.avg_spo2_pct is not None:
            lines.append(f"Average blood oxygen saturation: {cardio.avg_spo2_pct:.1f} %")
    return "\n".join(lines)


_DECORATION = re.compile(r"^[\s#*_>\-]*(?:\d+[.)]\s*)?|[\s*_:]*$")


def _header_of(line: str) -> str | None:
    core = _DECORATION.sub("", line)
    core = " ".join(core.split()).lower()
    return _HEADER_ALIASES.get(core)


def parse_report_sections(text: str) -> dict[str, str]:
    """Split the model's final answer on the three section titles.

    Raises :class:`ResponseFormatError` (carrying the raw text) when a title
    is missing, repeated, out of order, or its section is empty.
    """
    sections: dict[str, list[str]] = {}
    order: list[str] = []
    current = None
    for line in (text or "").splitlines():
        header = _header_of(line)
        if header is not None:
            if header in sections:
                raise ResponseFormatError(f"section {header!r} appears twice", text or "")
            sections[header] = []
            order.append(header)
            current = header
        elif current is not None:
            sections[current].append(line)
    missing = [h for h in SECTION_HEADERS if h not in sections]
    if missing:
        raise ResponseFormatError(f"response is missing section(s): {', '.join(missing)}", text or "")
    if tuple(order) != SECTION_HEADERS:
        raise ResponseFormatError("report sections are out of order", text or "")
    out = {}
    for header in SECTION_HEADERS:
        body = "\n".join(sections[header]).strip()
        if not body:
            raise ResponseFormatError(f"section {header!r} is empty", text or "")
        out[header] = body
    return out
