"""Report scoring: emotional-keyword tendency and forced-choice rank points."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import FormatError, InputError, IngestError, ParseError, ValidationError

RANK_POINTS = (20.0, 10.0, 0.0)

_WORD = re.compile(r"[^\W\d_]+")


def tokenize(text: str) -> list[str]:
    """Lower-cased runs of letters; everything else separates words."""
    return _WORD.findall(text.lower())


@dataclass(frozen=True)
class Lexicon:
    positive: frozenset[str]
    negative: frozenset[str]

    def __post_init__(self):
        pos = frozenset(self._normalize(self.positive, "positive"))
        neg = frozenset(self._normalize(self.negative, "negative"))
        if not pos or not neg:
            raise InputError("lexicon needs at least one positive and one negative keyword")
        overlap = pos & neg
        if overlap:
            raise InputError(f"keywords listed as both positive and negative: {sorted(overlap)}")
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)

    @staticmethod
    def _normalize(words, label):
        out = set()
        for w in words:
            tokens = tokenize(str(w))
            if len(tokens) != 1:
                raise InputError(f"{label} keyword {w!r} must be a single word")
            out.add(tokens[0])
        return out


def lexicon_from_dict(data, path="<memory>") -> Lexicon:
    if not isinstance(data, dict) or not isinstance(data.get("positive"), list) \
            or not isinstance(data.get("negative"), list):
        raise FormatError("lexicon must be an object with 'positive' and 'negative' arrays", path)
    try:
        return Lexicon(frozenset(data["positive"]), frozenset(data["negative"]))
    except InputError as exc:
        raise ValidationError(str(exc), path) from None


def load_lexicon(path) -> Lexicon:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc.strerror or exc}", path) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    return lexicon_from_dict(data, path)


def default_lexicon() -> Lexicon:
    text = resources.files("physioreport").joinpath("data/lexicon.json").read_text("utf-8")
    return lexicon_from_dict(json.loads(text), "<bundled lexicon.json>")


@dataclass(frozen=True)
class TendencyScore:
    positive_count: float
    negative_count: float
    score: float

    @classmethod
    def from_counts(cls, positive: float, negative: float) -> "TendencyScore":
        if positive < 0 or negative < 0:
            raise InputError("keyword counts must be non-negative")
        return cls(float(positive), float(negative), float(positive) - float(negative))

    def to_dict(self) -> dict:
        return {
            "positive_count": self.positive_count,
            "negative_count": self.negative_count,
            "score": self.score,
        }


def keyword_score(report_text: str, lexicon: Lexicon) -> TendencyScore:
    """Count every whole-word keyword occurrence, case-insensitively."""
    counts = Counter(tokenize(report_text or ""))
    pos = sum(counts[w] for w in lexicon.positive)
    neg = sum(counts[w] for w in lexicon.negative)
    return TendencyScore.from_counts(pos, neg)


def mean_tendency(scores: Sequence[TendencyScore]) -> TendencyScore:
    """Group mean, as reported per emotion group."""
    if not scores:
        raise InputError("no scores to average")
    n = len(scores)
    return TendencyScore.from_counts(
        math.fsum(s.positive_count for s in scores) / n,
        math.fsum(s.negative_count for s in scores) / n,
    )


@dataclass(frozen=True)
class Ranking:
    case_id: str
    expert_id: str
    order: tuple[str, str, str]

    def __post_init__(self):
        order = tuple(self.order)
        if len(order) != 3:
            raise InputError(f"case {self.case_id}: exactly three systems must be ranked")
        if len(set(order)) != 3:
            raise InputError(f"case {self.case_id}: duplicate system in ranking {order}")
        object.__setattr__(self, "order", order)


@dataclass(frozen=True)
class RankAllocation:
    allocations: tuple[tuple[Ranking, dict], ...]
    per_system_scores: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "cases": [
                {"case_id": r.case_id, "expert_id": r.expert_id, "points": pts}
                for r, pts in self.allocations
            ],
            "per_system_mean": self.per_system_scores,
        }


def allocate_ranks(rankings: Iterable[Ranking]) -> RankAllocation:
    """20/10/0 points per ranked case, averaged per system over all cases and experts."""
    allocations = []
    totals: dict[str, list[float]] = defaultdict(list)
    for r in rankings:
        points = dict(zip(r.order, RANK_POINTS))
        allocations.append((r, points))
        for system, pts in points.items():
            totals[system].append(pts)
    if not allocations:
        raise InputError("no rankings supplied")
    # a system missing from some case scores nothing there
    n = len(allocations)
    means = {s: math.fsum(v) / n for s, v in sorted(totals.items())}
    return RankAllocation(tuple(allocations), means)


RANKING_COLUMNS = ["case_id", "expert_id", "first", "second", "third"]


def parse_rankings(text: str, path="<memory>") -> list[Ranking]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != RANKING_COLUMNS:
        raise FormatError(f"header must be {','.join(RANKING_COLUMNS)}", path, 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) != 5:
            raise ParseError(f"expected 5 fields, got {len(row)}", path, lineno)
        case_id, expert_id, *order = (c.strip() for c in row)
        try:
            out.append(Ranking(case_id, expert_id, tuple(order)))
        except InputError as exc:
            raise ValidationError(str(exc), path, lineno) from None
    if not out:
        raise ValidationError("rankings file has no rows", path, 2)
    return out


def load_rankings(path) -> list[Ranking]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc.strerror or exc}", path) from None
    return parse_rankings(text, path)
