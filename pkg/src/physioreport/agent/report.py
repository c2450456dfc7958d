from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from ..cardio import CardioSummary
from ..recommend import MusicFragment, Recommendation
from ..signal_core.types import EegFeatureSet
from .messages import ChatMessage
from .prompts import ANALYSIS_HEADER, MUSIC_HEADER, SOUND_HEADER


class Provenance(str, Enum):
    LLM = "LlmGenerated"
    FALLBACK = "DeterministicFallback"


@dataclass(frozen=True)
class TherapyReport:
    physiological_analysis: str
    sound_therapy_recommendations: str
    music_recommendations: tuple[Recommendation, ...]
    features: EegFeatureSet
    cardio: CardioSummary
    provenance: Provenance
    music_fragment: MusicFragment
    music_notes: str = ""
    raw_transcript: tuple[ChatMessage, ...] = field(default=())
    fallback_reason: str | None = None

    def __post_init__(self):
        if not self.physiological_analysis.strip():
            raise ValueError("physiological analysis section is empty")
        if not self.sound_therapy_recommendations.strip():
            raise ValueError("sound therapy section is empty")
        if not self.music_recommendations:
            raise ValueError("music recommendation section is empty")
        object.__setattr__(self, "music_recommendations", tuple(self.music_recommendations))
        object.__setattr__(self, "raw_transcript", tuple(self.raw_transcript))

    @property
    def music_section(self) -> str:
        text = self.music_fragment.to_text()
        if self.music_notes.strip():
            text += "\n\n" + self.music_notes.strip()
        return text

    def sections(self) -> dict[str, str]:
        return {
            ANALYSIS_HEADER: self.physiological_analysis,
            SOUND_HEADER: self.sound_therapy_recommendations,
            MUSIC_HEADER: self.music_section,
        }

    def to_text(self) -> str:
        blocks = []
        for title, body in self.sections().items():
            blocks.append(f"{title}\n{'=' * len(title)}\n{body.strip()}\n")
        return "\n".join(blocks)

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance.value,
            "fallback_reason": self.fallback_reason,
            "physiological_analysis": self.physiological_analysis,
            "sound_therapy_recommendations": self.sound_therapy_recommendations,
            "music_recommendations": [r.to_dict() for r in self.music_recommendations],
            "music_section": self.music_section,
            "features": self.features.to_dict(),
            "cardio": self.cardio.to_dict(),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def transcript_json(self, indent: int | None = 2) -> str:
        return json.dumps([m.to_wire() for m in self.raw_transcript], indent=indent, ensure_ascii=False)
