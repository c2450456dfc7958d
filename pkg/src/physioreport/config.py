"""Run configuration resolved as: command-line flag > environment > config file > default.

The config file is one JSON document with a section per concern::

    {
      "llm": {"endpoint_url": "...", "model_name": "...", "api_key": "...",
              "temperature": 0.7, "top_p": 0.8, "repetition_penalty": 1.05,
              "max_turns": 4, "request_timeout": 60, "retries": 2},
      "recommend": {"music_db": "tracks.json", "exercise_offset_bpm": 30},
      "evaluation": {"lexicon": "lexicon.json"},
      "output": {"directory": "reports", "fallback": true}
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

from .agent.config import AgentConfig
from .errors import FormatError, IngestError, ParseError

CONFIG_ENV = "PHYSIOREPORT_CONFIG"
# relative paths in the config file are taken relative to the file itself
_PATH_SETTINGS = ("music_db", "lexicon", "output_dir")


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


@dataclass(frozen=True)
class Setting:
    name: str
    section: str
    key: str
    env: str | None
    default: Any
    convert: Callable[[Any], Any] = lambda v: v


SETTINGS = {
    s.name: s
    for s in [
        Setting("endpoint_url", "llm", "endpoint_url", "PHYSIOREPORT_ENDPOINT", "http://localhost:8000/v1", str),
        Setting("api_key", "llm", "api_key", "PHYSIOREPORT_API_KEY", None, str),
        Setting("model_name", "llm", "model_name", "PHYSIOREPORT_MODEL", "qwen3-32b", str),
        Setting("temperature", "llm", "temperature", None, 0.7, float),
        Setting("top_p", "llm", "top_p", None, 0.8, float),
        Setting("repetition_penalty", "llm", "repetition_penalty", None, 1.05, float),
        Setting("max_turns", "llm", "max_turns", None, 4, int),
        Setting("request_timeout", "llm", "request_timeout", "PHYSIOREPORT_TIMEOUT", 60.0, float),
        Setting("retries", "llm", "retries", None, 2, int),
        Setting("music_db", "recommend", "music_db", "PHYSIOREPORT_MUSIC_DB", None, str),
        Setting("exercise_offset_bpm", "recommend", "exercise_offset_bpm", None, 30.0, float),
        Setting("lexicon", "evaluation", "lexicon", "PHYSIOREPORT_LEXICON", None, str),
        Setting("output_dir", "output", "directory", "PHYSIOREPORT_OUTPUT_DIR", "reports", str),
        Setting("fallback", "output", "fallback", "PHYSIOREPORT_FALLBACK", True, _bool),
    ]
}


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read config file: {exc.strerror or exc}", path) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise FormatError("config must be a JSON object of sections", path, 1)
    return data


@dataclass(frozen=True)
class RunConfig:
    values: dict
    sources: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def __repr__(self):
        shown = {k: ("***" if k == "api_key" and v else v) for k, v in self.values.items()}
        return f"RunConfig({shown})"

    def agent_config(self) -> AgentConfig:
        v = self.values
        return AgentConfig(
            model_name=v["model_name"],
            endpoint_url=v["endpoint_url"],
            api_key=v["api_key"],
            temperature=v["temperature"],
            top_p=v["top_p"],
            repetition_penalty=v["repetition_penalty"],
            max_turns=v["max_turns"],
            request_timeout=v["request_timeout"],
            retries=v["retries"],
            exercise_offset_bpm=v["exercise_offset_bpm"],
        )


def resolve_config(
    flags: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
    config_path=None,
) -> RunConfig:
    """Resolve every setting; ``sources`` records which layer supplied it."""
    flags = flags or {}
    env = os.environ if env is None else env
    config_path = config_path or env.get(CONFIG_ENV)
    file_cfg = load_config_file(config_path) if config_path else {}
    values, sources = {}, {}
    for name, s in SETTINGS.items():
        flag_value = flags.get(name)
        if flag_value is not None:
            raw, source = flag_value, "flag"
        elif s.env and env.get(s.env) not in (None, ""):
            raw, source = env[s.env], "env"
        elif s.key in file_cfg.get(s.section, {}):
            raw, source = file_cfg[s.section][s.key], "file"
        else:
            raw, source = s.default, "default"
        if source == "file" and name in _PATH_SETTINGS and raw is not None:
            raw = str(Path(config_path).parent / raw)
        try:
            values[name] = None if raw is None else s.convert(raw)
        except (TypeError, ValueError):
            where = {"flag": "command line", "env": s.env, "file": str(config_path)}.get(source, source)
            raise FormatError(f"invalid value for {name} from {where}") from None
        sources[name] = source
    return RunConfig(values, sources)
