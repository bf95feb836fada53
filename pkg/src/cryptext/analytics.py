"""Social listening over file corpora: frequency and sentiment timelines
for a word and its indexed perturbations."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Document
from .errors import ConfigError, EmptyTokenError
from .index import PhoneticIndex
from .query import LookupParams, lookup, perturbations_only
from .textcore import tokenize

__all__ = [
    "GRANULARITIES",
    "FileCorpusSource",
    "SentimentLexicon",
    "SourceAdapter",
    "TimelineBucket",
    "TimelineQuery",
    "TimelineSeries",
    "build_timeline",
    "keyword_enrich",
    "load_lexicon",
]

GRANULARITIES = ("day", "week", "month")


class SentimentLexicon:
    """Word -> valence in [-1, 1]; unknown words contribute 0."""

    def __init__(self, valences: Mapping[str, float] | None = None):
        self._valences: dict[str, float] = {}
        for word, valence in (valences or {}).items():
            self._validate(word, valence)
            self._valences[word.casefold()] = float(valence)

    @staticmethod
    def _validate(word: str, valence: float) -> None:
        if not -1.0 <= valence <= 1.0:
            raise ConfigError(f"valence for {word!r} must be in [-1, 1], got {valence}")

    def valence(self, word: str) -> float:
        return self._valences.get(word.casefold(), 0.0)

    def __len__(self) -> int:
        return len(self._valences)


def load_lexicon(path: str | Path) -> SentimentLexicon:
    """Parse a sentiment lexicon file: UTF-8 lines ``word<TAB>valence``."""
    valences: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected word<TAB>valence")
        try:
            valences[parts[0]] = float(parts[1])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad valence {parts[1]!r}") from exc
    return SentimentLexicon(valences)


@dataclass(frozen=True)
class TimelineQuery:
    word: str
    start: datetime
    end: datetime
    granularity: str = "day"
    lookup: LookupParams = field(default_factory=LookupParams)
    split_variants: bool = True

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ConfigError("timeline range start must be <= end")
        if self.granularity not in GRANULARITIES:
            raise ConfigError(f"granularity must be one of {GRANULARITIES}, got {self.granularity!r}")


@dataclass
class TimelineBucket:
    bucket_start: date
    variant_counts: dict[str, int]
    document_total: int
    mean_sentiment: float | None = None

    def as_dict(self) -> dict:
        return {
            "bucket_start": self.bucket_start.isoformat(),
            "total": self.document_total,
            "counts": dict(self.variant_counts),
            "mean_sentiment": self.mean_sentiment,
        }


@dataclass
class TimelineSeries:
    word: str
    variants: list[str]
    buckets: list[TimelineBucket]
    granularity: str
    documents_scanned: int = 0
    documents_skipped: int = 0
    warning: str | None = None

    def as_dict(self) -> dict:
        return {
            "word": self.word,
            "variants": list(self.variants),
            "granularity": self.granularity,
            "buckets": [b.as_dict() for b in self.buckets],
            "documents_scanned": self.documents_scanned,
            "documents_skipped": self.documents_skipped,
            "warning": self.warning,
        }


def _period_start(ts: datetime, granularity: str) -> date:
    day = ts.astimezone(timezone.utc).date()
    if granularity == "day":
        return day
    if granularity == "week":
        return day - timedelta(days=day.weekday())
    return day.replace(day=1)


def _next_period(day: date, granularity: str) -> date:
    if granularity == "day":
        return day + timedelta(days=1)
    if granularity == "week":
        return day + timedelta(days=7)
    if day.month == 12:
        return day.replace(year=day.year + 1, month=1)
    return day.replace(month=day.month + 1)


def build_timeline(
    documents: Iterable[Document],
    index: PhoneticIndex,
    query: TimelineQuery,
    lexicon: SentimentLexicon | None = None,
) -> TimelineSeries:
    """Bucket per-variant occurrence counts and per-document sentiment.

    The variant set comes from a lookup of the query word; a word with no
    indexed bucket yields an empty series with a warning instead of an
    error.  Documents outside [start, end) or without a parseable
    timestamp are skipped (and counted).
    """
    try:
        variants = lookup(index, query.word, query.lookup).raws()
    except EmptyTokenError:
        variants = []
    series = TimelineSeries(word=query.word, variants=variants, buckets=[], granularity=query.granularity)
    if not variants:
        series.warning = f"no indexed perturbations for {query.word!r}"
        return series

    fold = not query.lookup.case_sensitive
    match_set = {v.casefold() for v in variants} if fold else set(variants)
    canonical_variant = {v.casefold(): v for v in variants} if fold else {v: v for v in variants}

    counts: dict[date, dict[str, int]] = {}
    doc_totals: dict[date, int] = {}
    sentiments: dict[date, list[float]] = {}

    for doc in documents:
        series.documents_scanned += 1
        if doc.timestamp is None:
            series.documents_skipped += 1
            continue
        if not (query.start <= doc.timestamp < query.end):
            continue
        spans = [s for s in tokenize(doc.text, index.encoder) if s.is_word]
        matched = False
        bucket = _period_start(doc.timestamp, query.granularity)
        for span in spans:
            token = span.raw.casefold() if fold else span.raw
            if token in match_set:
                matched = True
                variant = canonical_variant[token]
                per_variant = counts.setdefault(bucket, {})
                per_variant[variant] = per_variant.get(variant, 0) + 1
        if not matched:
            continue
        doc_totals[bucket] = doc_totals.get(bucket, 0) + 1
        if lexicon is not None and spans:
            valence = sum(lexicon.valence(s.raw) for s in spans) / len(spans)
            sentiments.setdefault(bucket, []).append(valence)

    if query.start < query.end:
        day = _period_start(query.start, query.granularity)
        last = _period_start(query.end - timedelta(microseconds=1), query.granularity)
        while day <= last:
            variant_counts = counts.get(day, {})
            if not query.split_variants and variant_counts:
                variant_counts = {query.word: sum(variant_counts.values())}
            mean = None
            if lexicon is not None and day in sentiments:
                mean = sum(sentiments[day]) / len(sentiments[day])
            series.buckets.append(
                TimelineBucket(
                    bucket_start=day,
                    variant_counts=variant_counts,
                    document_total=doc_totals.get(day, 0),
                    mean_sentiment=mean,
                )
            )
            day = _next_period(day, query.granularity)
    return series


def keyword_enrich(
    index: PhoneticIndex,
    words: Sequence[str],
    params: LookupParams | None = None,
) -> dict[str, list[str]]:
    """Per word: itself plus its indexed perturbations, deduplicated."""
    params = params or LookupParams()
    enriched: dict[str, list[str]] = {}
    for word in words:
        variants = [word]
        try:
            variants += perturbations_only(index, word, params).raws()
        except EmptyTokenError:
            pass
        seen = set()
        enriched[word] = [v for v in variants if not (v in seen or seen.add(v))]
    return enriched


class SourceAdapter:
    """Seam for live-platform search backends: fetch documents matching a
    query within a time range."""

    def fetch(self, query: str, start: datetime, end: datetime) -> Iterable[Document]:
        raise NotImplementedError


class FileCorpusSource(SourceAdapter):
    """SourceAdapter over local corpus files."""

    def __init__(self, documents: Iterable[Document]):
        self._documents = list(documents)

    def fetch(self, query: str, start: datetime, end: datetime) -> Iterable[Document]:
        folded = query.casefold()
        for doc in self._documents:
            if doc.timestamp is None or not (start <= doc.timestamp < end):
                continue
            tokens = {s.raw.casefold() for s in tokenize(doc.text) if s.is_word}
            if folded in tokens:
                yield doc
