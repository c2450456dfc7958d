"""Command-line entry point.

Exit codes: 0 success, 2 input or validation error, 3 language-model backend error.
Machine-readable output goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .agent import HttpChatBackend, load_script, run_session
from .cardio import summarize_cardio
from .config import resolve_config
from .errors import AgentError, IngestError, InputError
from .evaluation import default_lexicon, keyword_score, load_lexicon, load_rankings, allocate_ranks
from .ingest import default_music_db, load_music_db, load_session, parse_oximeter_log
from .recommend import Scenario, integrate, llm_recommend, retrieve_tracks
from .signal_core import process_eeg
from .synthgen import write_fixture

log = logging.getLogger("physioreport")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BACKEND = 3


def _emit(data) -> None:
    sys.stdout.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def _require_file(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise IngestError("file not found", p)
    return p


def _run_config(args, **flags):
    for name in ("endpoint_url", "model_name", "music_db", "lexicon", "output_dir"):
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = value
    cfg = resolve_config(flags, config_path=getattr(args, "config", None))
    for name in ("music_db", "lexicon"):
        value = cfg.values.get(name)
        if value is not None:
            _require_file(value)
    return cfg


def _music_db(cfg):
    return load_music_db(cfg.music_db) if cfg.music_db else default_music_db()


def _backend(args, cfg, eeg_path=None):
    if getattr(args, "offline", False):
        return None
    if getattr(args, "mock_backend", None):
        return load_script(_require_file(args.mock_backend), eeg_path=eeg_path)
    return HttpChatBackend(cfg.endpoint_url, cfg.api_key)


def _features_table(features) -> str:
    header = ("Band", "Trend", "Dominant (Hz)", "Median 1st half", "Median 2nd half")
    rows = [
        (b.band, b.trend.value, f"{b.dominant_freq_hz:.3f}",
         f"{b.median_first_half:.6g}", f"{b.median_second_half:.6g}")
        for b in features.per_band
    ]
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header, *rows]]
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    features = process_eeg(_require_file(args.eeg), window_len=args.window)
    if args.format == "table":
        sys.stdout.write(_features_table(features))
    else:
        _emit(features.to_dict())
    for w in features.warnings:
        log.warning(w)
    return EXIT_OK


def _write_report(report, out_dir: Path, save_transcript: bool) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report_json": out_dir / "report.json",
        "report_text": out_dir / "report.txt",
    }
    paths["report_json"].write_text(report.to_json() + "\n", encoding="utf-8")
    paths["report_text"].write_text(report.to_text(), encoding="utf-8")
    if save_transcript:
        paths["transcript"] = out_dir / "transcript.json"
        paths["transcript"].write_text(report.transcript_json() + "\n", encoding="utf-8")
    return {k: str(v) for k, v in paths.items()}


def _report_one(eeg, oximeter, out_dir, args, cfg) -> dict:
    recording = load_session(_require_file(eeg), _require_file(oximeter))
    db = _music_db(cfg)
    llm = _backend(args, cfg, eeg_path=str(eeg))
    allow_fallback = cfg.fallback and not args.no_fallback
    try:
        report = run_session(recording, db, cfg.agent_config(), llm, allow_fallback=allow_fallback)
    finally:
        if llm is not None:
            llm.close()
    result = {"session_id": recording.session_id, "provenance": report.provenance.value}
    if report.fallback_reason:
        result["fallback_reason"] = report.fallback_reason
    result.update(_write_report(report, Path(out_dir), args.save_transcript))
    return result


def cmd_report(args) -> int:
    if args.offline and args.no_fallback:
        raise InputError("--offline needs the deterministic fallback; drop --no-fallback")
    cfg = _run_config(args)
    _emit(_report_one(args.eeg, args.oximeter, args.out or cfg.output_dir, args, cfg))
    return EXIT_OK


def cmd_batch(args) -> int:
    if args.offline and args.no_fallback:
        raise InputError("--offline needs the deterministic fallback; drop --no-fallback")
    cfg = _run_config(args)
    out_root = Path(args.out or cfg.output_dir)
    sessions = []
    for d in args.sessions:
        d = Path(d)
        sessions.append((d, _require_file(d / "eeg.csv"), _require_file(d / "oximeter.csv")))

    def work(item):
        d, eeg, oxi = item
        return _report_one(eeg, oxi, out_root / d.name, args, cfg)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(work, sessions))
    _emit({"sessions": results})
    return EXIT_OK


def cmd_recommend(args) -> int:
    cfg = _run_config(args, exercise_offset_bpm=args.exercise_offset)
    series = parse_oximeter_log(_require_file(args.oximeter))
    summary = summarize_cardio(series)
    db = _music_db(cfg)
    scenarios = [Scenario.RELAXATION, Scenario.EXERCISE] if args.scenario == "both" \
        else [Scenario.parse(args.scenario)]
    out = {"avg_hr_bpm": summary.avg_hr_bpm, "valid_samples": summary.valid_sample_count,
           "rejected_samples": summary.rejected_sample_count}
    if args.deterministic or args.offline:
        ranked = {}
        for s in scenarios:
            tracks = retrieve_tracks(summary.avg_hr_bpm, s, db, cfg.exercise_offset_bpm)
            if args.top:
                tracks = tracks[: args.top]
            ranked[s.value] = [t.to_dict() for t in tracks]
        out["method"] = "DeterministicRetrieval"
        out["ranked"] = ranked
    else:
        llm = _backend(args, cfg)
        try:
            recs = llm_recommend(summary, db, cfg.agent_config(), llm)
        finally:
            llm.close()
        recs = [r for r in recs if r.scenario in scenarios]
        out["recommendations"] = [r.to_dict() for r in recs]
    _emit(out)
    return EXIT_OK


def cmd_synth(args) -> int:
    spec_path = _require_file(args.spec)
    try:
        spec = json.loads(spec_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON: {exc.msg}", spec_path, exc.lineno) from None
    paths = write_fixture(spec, args.out_dir)
    _emit({k: str(v) for k, v in paths.items()})
    return EXIT_OK


def _report_text_from_file(path: Path) -> str:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
        if isinstance(data, dict):
            parts = [data.get(k, "") for k in
                     ("physiological_analysis", "sound_therapy_recommendations", "music_section")]
            return "\n".join(p for p in parts if isinstance(p, str))
    return text


def cmd_score(args) -> int:
    if bool(args.report) == bool(args.rankings):
        raise InputError("give exactly one of --report or --rankings")
    if args.rankings:
        allocation = allocate_ranks(load_rankings(_require_file(args.rankings)))
        _emit(allocation.to_dict())
        return EXIT_OK
    cfg = _run_config(args)
    lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else default_lexicon()
    score = keyword_score(_report_text_from_file(_require_file(args.report)), lexicon)
    _emit(score.to_dict())
    return EXIT_OK


def _add_llm_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (default: $PHYSIOREPORT_CONFIG)")
    p.add_argument("--endpoint", dest="endpoint_url", help="OpenAI-compatible base URL")
    p.add_argument("--model", dest="model_name", help="model name sent to the endpoint")
    p.add_argument("--db", dest="music_db", help="music database JSON (default: bundled corpus)")
    p.add_argument("--mock-backend", metavar="SCRIPT",
                   help="replay assistant messages from a JSON script instead of calling a server")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="physioreport", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="extract per-band EEG features")
    p.add_argument("eeg", help="EEG log file")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--window", type=int, default=256, help="Hilbert window length in samples")
    p.set_defaults(func=cmd_analyze)

    for name, func, help_ in (("report", cmd_report, "write a therapy report for one session"),
                              ("batch", cmd_batch, "write reports for several session directories")):
        p = sub.add_parser(name, help=help_)
        if name == "report":
            p.add_argument("eeg", help="EEG log file")
            p.add_argument("oximeter", help="oximeter log file")
        else:
            p.add_argument("sessions", nargs="+", help="directories holding eeg.csv and oximeter.csv")
            p.add_argument("--jobs", type=int, default=1, help="sessions processed concurrently")
        p.add_argument("--out", help="output directory (default: config or ./reports)")
        p.add_argument("--offline", action="store_true", help="skip the language model entirely")
        p.add_argument("--no-fallback", action="store_true",
                       help="fail with exit 3 instead of writing a deterministic report")
        p.add_argument("--save-transcript", action="store_true", help="also write transcript.json")
        _add_llm_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("recommend", help="recommend music from an oximeter log")
    p.add_argument("oximeter", help="oximeter log file")
    p.add_argument("--scenario", choices=("relaxation", "exercise", "both"), default="both")
    p.add_argument("--deterministic", action="store_true", help="nearest-BPM retrieval, no model")
    p.add_argument("--offline", action="store_true", help="alias for --deterministic")
    p.add_argument("--top", type=int, default=0, help="limit ranked lists to N tracks")
    p.add_argument("--exercise-offset", type=float, default=None,
                   help="BPM added to the heart rate for the exercise target (default 30)")
    _add_llm_flags(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("synth", help="generate synthetic fixture files from a JSON spec")
    p.add_argument("spec", help="fixture spec JSON")
    p.add_argument("out_dir", help="directory to write fixture files into")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("score", help="keyword tendency of a report, or rank points of a rankings CSV")
    p.add_argument("--report", help="report file (.txt or report .json)")
    p.add_argument("--rankings", help="CSV with case_id,expert_id,first,second,third")
    p.add_argument("--lexicon", help="lexicon JSON (default: bundled)")
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_score)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AgentError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
