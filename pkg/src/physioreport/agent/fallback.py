"""Template-driven report used when no language model is available."""

from __future__ import annotations

from ..cardio import CardioSummary
from ..ingest import MusicDatabase
from ..recommend import DEFAULT_EXERCISE_OFFSET_BPM, deterministic_recommendations, integrate
from ..signal_core.types import EegFeatureSet, Trend
from .report import Provenance, TherapyReport

_INC, _DEC = Trend.INCREASING, Trend.DECREASING

_MEANING = {
    ("Delta", _INC): "pointing to growing drowsiness or a need for deeper rest",
    ("Delta", _DEC): "suggesting reduced sleep pressure and a more wakeful state",
    ("Theta", _INC): "consistent with a drowsy, inward-turned or meditative state",
    ("Theta", _DEC): "suggesting less drowsiness and a more outward-directed focus",
    ("Alpha", _INC): "a common marker of relaxed wakefulness",
    ("Alpha", _DEC): "often seen when attention becomes more engaged or relaxation lessens",
    ("Beta", _INC): "indicating heightened alertness or active thinking, possibly with some tension",
    ("Beta", _DEC): "suggesting lower arousal and a calmer cortical state",
}


def _band_sentence(band) -> str:
    change = "an increase" if band.trend is _INC else "a decrease"
    return (
        f"{band.band}-band amplitude showed {change} from the first to the second half "
        f"of the session (dominant frequency {band.dominant_freq_hz:.2f} Hz), "
        f"{_MEANING[(band.band, band.trend)]}."
    )


def _overall(features: EegFeatureSet) -> str:
    relaxing = features["Alpha"].trend is _INC or features["Theta"].trend is _INC
    aroused = features["Beta"].trend is _INC
    if relaxing and aroused:
        return ("Overall, relaxation markers appear alongside sustained alertness: "
                "a mixed state of calm and engaged attention.")
    if relaxing:
        return "Overall, the recording points towards a settling, more relaxed state as the session went on."
    if aroused:
        return "Overall, the recording points towards rising alertness over the session; calming material is advisable."
    return ("Overall, band amplitudes declined across the session without a clear "
            "relaxation or arousal signature.")


def analysis_text(features: EegFeatureSet) -> str:
    lines = [_band_sentence(b) for b in features.per_band]
    lines.append(_overall(features))
    return "\n".join(lines)


def sound_therapy_text(features: EegFeatureSet) -> str:
    theta = features["Theta"].dominant_freq_hz
    alpha = features["Alpha"].dominant_freq_hz
    beta = features["Beta"]
    # the carrier difference reproduces the measured theta rhythm
    relax_ear = alpha
    focus_ear = alpha + theta
    if beta.trend is _INC:
        regulation = (
            f"Beta activity rose (dominant {beta.dominant_freq_hz:.2f} Hz). Thin out bright, "
            "fast-moving material and lengthen phrases so the soundscape slows gradually, "
            "easing excess arousal."
        )
    else:
        regulation = (
            f"Beta activity fell (dominant {beta.dominant_freq_hz:.2f} Hz). Occasional light "
            "accents in the upper register can keep attention gently engaged without "
            "over-stimulating."
        )
    return "\n".join([
        f"1. Frequency Resonance: layer sound pulsed at the Theta dominant frequency of "
        f"{theta:.2f} Hz (for example slow singing-bowl swells) over an ambient bed "
        f"modulated near {alpha:.2f} Hz, the Alpha dominant frequency (for example soft rain).",
        f"2. Dynamic Regulation: {regulation}",
        f"3. Integrated Protocol: binaural beats with {focus_ear:.2f} Hz to the left ear "
        f"(focus) and {relax_ear:.2f} Hz to the right ear (relaxation), giving a "
        f"{theta:.2f} Hz difference that matches the measured Theta rhythm.",
    ])


def deterministic_report(
    features: EegFeatureSet,
    cardio: CardioSummary,
    db: MusicDatabase,
    exercise_offset_bpm: float = DEFAULT_EXERCISE_OFFSET_BPM,
    transcript=(),
    reason: str | None = None,
) -> TherapyReport:
    recs = deterministic_recommendations(cardio.avg_hr_bpm, db, exercise_offset_bpm)
    return TherapyReport(
        physiological_analysis=analysis_text(features),
        sound_therapy_recommendations=sound_therapy_text(features),
        music_recommendations=recs,
        features=features,
        cardio=cardio,
        provenance=Provenance.FALLBACK,
        music_fragment=integrate(features, cardio, recs),
        raw_transcript=tuple(transcript),
        fallback_reason=reason,
    )
