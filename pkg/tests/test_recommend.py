import functools
import json

import pytest
from hypothesis import given, settings, strategies as st

from physioreport.agent import AgentConfig, ChatMessage, ScriptedBackend
from physioreport.cardio import CardioSummary
from physioreport.errors import BackendError, InputError
from physioreport.ingest import MusicDatabase, MusicTrack
from physioreport.recommend import (
    Method,
    Recommendation,
    Scenario,
    build_rag_messages,
    deterministic_recommendations,
    exercise_target,
    integrate,
    llm_recommend,
    parse_rag_answer,
    retrieve_tracks,
)
from physioreport.signal_core import BandFeatures, EegFeatureSet, Trend


def make_db(bpms):
    return MusicDatabase(tuple(MusicTrack(f"T{i:02d}", f"Track {i}", float(b)) for i, b in enumerate(bpms)))


def summary(avg):
    return CardioSummary(avg, 98.0, 360, 0)


def oracle(avg, scenario, tracks, offset=30.0):
    # enumerate every track, compare pairwise, no shared sort key with the implementation
    def cmp(dist):
        def inner(x, y):
            dx, dy = dist(x), dist(y)
            if dx != dy:
                return -1 if dx < dy else 1
            return -1 if x.track_id < y.track_id else (1 if x.track_id > y.track_id else 0)
        return functools.cmp_to_key(inner)

    if scenario is Scenario.RELAXATION:
        cands = [t for t in tracks if t.bpm <= avg]
        if not cands:
            lowest = tracks[0]
            for t in tracks[1:]:
                if t.bpm < lowest.bpm or (t.bpm == lowest.bpm and t.track_id < lowest.track_id):
                    lowest = t
            return [lowest]
        return sorted(cands, key=cmp(lambda t: avg - t.bpm))
    target = avg + offset
    target = 40.0 if target < 40 else (130.0 if target > 130 else target)
    return sorted(tracks, key=cmp(lambda t: abs(t.bpm - target)))


def ids(tracks):
    return [t.track_id for t in tracks]


def test_relaxation_ranks_from_below():
    db = make_db([60, 70, 72, 80])
    assert [t.bpm for t in retrieve_tracks(72, Scenario.RELAXATION, db)] == [72, 70, 60]


def test_relaxation_with_no_candidate_returns_slowest():
    db = make_db([80, 60])
    assert [t.bpm for t in retrieve_tracks(50, Scenario.RELAXATION, db)] == [60]


def test_exercise_target():
    db = make_db([60, 100, 130])
    assert retrieve_tracks(72, Scenario.EXERCISE, db)[0].bpm == 100
    assert exercise_target(72) == 102
    assert exercise_target(120) == 130
    assert exercise_target(5, 30) == 40


def test_ties_break_on_track_id():
    db = MusicDatabase((MusicTrack("b", "B", 70.0), MusicTrack("a", "A", 70.0), MusicTrack("c", "C", 74.0)))
    assert ids(retrieve_tracks(72, Scenario.EXERCISE, db, exercise_offset_bpm=0)) == ["a", "b", "c"]


def test_empty_db_and_bad_avg_are_errors():
    with pytest.raises(InputError):
        retrieve_tracks(70, Scenario.RELAXATION, [])
    with pytest.raises(InputError):
        retrieve_tracks(0, Scenario.RELAXATION, make_db([60]))


@settings(max_examples=200)
@given(
    st.lists(st.integers(40, 130), min_size=1, max_size=26),
    st.floats(30, 200),
    st.sampled_from(list(Scenario)),
)
def test_retrieval_matches_oracle(bpms, avg, scenario):
    db = make_db(bpms)
    assert ids(retrieve_tracks(avg, scenario, db)) == ids(oracle(avg, scenario, list(db)))


@given(st.lists(st.integers(40, 130), min_size=1, max_size=26), st.floats(30, 200))
def test_relaxation_bound_and_membership(bpms, avg):
    db = make_db(bpms)
    ranked = retrieve_tracks(avg, Scenario.RELAXATION, db)
    if any(b <= avg for b in bpms):
        assert ranked[0].bpm <= avg
    assert all(t.track_id in db for t in ranked)


def test_scenario_parsing():
    assert Scenario.parse("relaxation") is Scenario.RELAXATION
    assert Scenario.parse("Physical Activity") is Scenario.EXERCISE
    with pytest.raises(InputError):
        Scenario.parse("sleep")


def test_deterministic_recommendations():
    relax, ex = deterministic_recommendations(72, make_db([60, 70, 100, 130]))
    assert (relax.track.bpm, ex.track.bpm) == (70, 100)
    assert relax.method is ex.method is Method.DETERMINISTIC
    assert relax.rationale and ex.rationale
    assert Recommendation.from_dict(relax.to_dict()) == relax


# ---- LLM-guided selection ---------------------------------------------------------------

CFG = AgentConfig()


def answer(relax_id, ex_id, rationale="fits the heart rate"):
    return ChatMessage("assistant", json.dumps({
        "relaxation": {"track_id": relax_id, "rationale": rationale},
        "exercise": {"track_id": ex_id, "rationale": rationale},
    }))


def test_rag_prompt_embeds_heart_rate_and_library(small_db):
    msgs = build_rag_messages(summary(71.25), small_db)
    user = msgs[-1].content
    assert "71.2" in user
    assert json.loads(user.split("JSON):\n", 1)[1]) == json.loads(small_db.to_json())


def test_valid_llm_answer(small_db):
    llm = ScriptedBackend([answer("B", "D")])
    relax, ex = llm_recommend(summary(70), small_db, CFG, llm)
    assert (relax.track.track_id, ex.track.track_id) == ("B", "D")
    assert relax.method is Method.LLM_RAG
    assert llm.requests[0][1] is None


def test_answer_in_prose_with_json_inside(small_db):
    text = "Sure!\n```json\n" + answer("A", "C").content + "\n```"
    picks = parse_rag_answer(text, small_db)
    assert picks[Scenario.RELAXATION][0].track_id == "A"


@pytest.mark.parametrize("reply", [
    answer("A", "NOPE").content,
    answer("A", "C", rationale=" ").content,
    "no json here",
    "{not json}",
    json.dumps({"relaxation": {"track_id": "A", "rationale": "x"}}),
    json.dumps([1, 2]),
])
def test_invalid_answers_fall_back(small_db, reply):
    llm = ScriptedBackend([ChatMessage("assistant", reply)])
    recs = llm_recommend(summary(70), small_db, CFG, llm)
    assert recs == deterministic_recommendations(70, small_db)


def test_transport_failure_falls_back(small_db):
    llm = ScriptedBackend([BackendError("down")])
    transcript = []
    recs = llm_recommend(summary(70), small_db, CFG, llm, transcript)
    assert all(r.method is Method.DETERMINISTIC for r in recs)
    assert [m.role for m in transcript] == ["system", "user"]


# ---- fragment ---------------------------------------------------------------------------

def features():
    bands = [BandFeatures(n, Trend.INCREASING, f, 1.0, 2.0)
             for n, f in (("Delta", 2.0), ("Theta", 5.33), ("Alpha", 12.09), ("Beta", 21.51))]
    return EegFeatureSet(tuple(bands))


def test_fragment_lists_both_scenarios_and_links(small_db):
    recs = deterministic_recommendations(95, small_db)
    frag = integrate(features(), summary(95), recs)
    text = frag.to_text()
    assert "Relaxation: Walk (90 BPM)" in text
    assert "Physical Activity: Run (104 BPM)" in text
    assert "https://example.org/c" in text and "https://example.org/d" in text
    assert "Theta increasing (5.33 Hz)" in text
    assert frag.to_text() == integrate(features(), summary(95), recs).to_text()


def test_fragment_without_link_has_no_url_line(small_db):
    recs = deterministic_recommendations(67, small_db, exercise_offset_bpm=0)
    text = integrate(features(), summary(67), recs).to_text()
    assert "Calm (66 BPM)" in text
    assert "http" not in text.split("Calm (66 BPM)")[1].splitlines()[1]
