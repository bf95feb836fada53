"""Phonetic hash-maps over raw case-sensitive tokens, with persistence.

An index maps each phonetic key at one level k to the set of observed raw
tokens and their occurrence counts.  Indexes are immutable once built;
ingest and merge always return fresh instances.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Document
from .errors import (
    ConfigMismatchError,
    CorruptFileError,
    LevelMismatchError,
    UnsupportedVersionError,
)
from .textcore import EncoderConfig, SoundexKey, config_hash, default_config, encode, fnv1a64, tokenize

__all__ = [
    "IngestReport",
    "PhoneticIndex",
    "TokenEntry",
    "get_bucket",
    "ingest",
    "load_index",
    "load_index_dir",
    "merge",
    "save_index",
    "save_index_dir",
]

FORMAT_NAME = "CRYPTEXT-INDEX"
FORMAT_VERSION = "v1"
MAX_TOKEN_LENGTH = 64


@dataclass
class TokenEntry:
    """One observed raw token with its occurrence count."""

    raw: str
    count: int
    first_seen: datetime | None = None


@dataclass
class IngestReport:
    documents: int = 0
    malformed: int = 0
    token_occurrences: int = 0
    tokens_skipped: int = 0
    errors: list[str] = field(default_factory=list)


class PhoneticIndex:
    """Hash-map from phonetic key text to raw-token entries at one level."""

    def __init__(self, level: int, encoder: EncoderConfig | None = None, encoder_hash: str | None = None):
        if level < 0:
            raise LevelMismatchError(f"phonetic level must be >= 0, got {level}")
        self.level = level
        self.encoder = encoder if encoder is not None else default_config()
        self.encoder_hash = encoder_hash or config_hash(self.encoder)
        self.buckets: dict[str, dict[str, TokenEntry]] = {}
        self.document_count = 0

    @property
    def token_count(self) -> int:
        return sum(len(bucket) for bucket in self.buckets.values())

    @property
    def bucket_count(self) -> int:
        return len(self.buckets)

    def stats(self) -> dict[str, int]:
        return {
            "token_count": self.token_count,
            "bucket_count": self.bucket_count,
            "document_count": self.document_count,
        }

    def _add(self, key_text: str, raw: str, count: int = 1, first_seen: datetime | None = None) -> None:
        bucket = self.buckets.setdefault(key_text, {})
        entry = bucket.get(raw)
        if entry is None:
            bucket[raw] = TokenEntry(raw=raw, count=count, first_seen=first_seen)
        else:
            entry.count += count
            if first_seen is not None and (entry.first_seen is None or first_seen < entry.first_seen):
                entry.first_seen = first_seen

    def __eq__(self, other: object) -> bool:
        # Equality covers the persisted surface: level, encoder identity,
        # and per-bucket raw->count maps.
        if not isinstance(other, PhoneticIndex):
            return NotImplemented
        if self.level != other.level or self.encoder_hash != other.encoder_hash:
            return False
        mine = {k: {raw: e.count for raw, e in b.items()} for k, b in self.buckets.items()}
        theirs = {k: {raw: e.count for raw, e in b.items()} for k, b in other.buckets.items()}
        return mine == theirs

    def __repr__(self) -> str:
        return f"PhoneticIndex(level={self.level}, tokens={self.token_count}, buckets={self.bucket_count})"


def _admit(span_raw: str, is_word: bool) -> bool:
    return is_word and len(span_raw) <= MAX_TOKEN_LENGTH


def ingest(
    documents: Iterable[Document],
    levels: Iterable[int] = (0, 1, 2),
    encoder: EncoderConfig | None = None,
    max_level: int = 2,
) -> tuple[dict[int, PhoneticIndex], IngestReport]:
    """Tokenize a document stream and build one index per phonetic level.

    Word tokens are counted per raw case-sensitive form.  Documents that
    fail to tokenize are reported and skipped; the stream never aborts.
    Ingestion order does not matter: A then B equals B then A.
    """
    levels = sorted(set(levels))
    if not levels:
        raise LevelMismatchError("at least one phonetic level is required")
    for k in levels:
        if not 0 <= k <= max_level:
            raise LevelMismatchError(f"phonetic level {k} outside 0..{max_level}")
    encoder = encoder or default_config()
    indexes = {k: PhoneticIndex(level=k, encoder=encoder) for k in levels}
    report = IngestReport()
    for doc in documents:
        try:
            spans = tokenize(doc.text, encoder)
        except Exception as exc:  # defensive: malformed inputs never abort the stream
            report.malformed += 1
            if len(report.errors) < 20:
                report.errors.append(f"{doc.doc_id}: {exc}")
            continue
        report.documents += 1
        for index in indexes.values():
            index.document_count += 1
        for span in spans:
            if not _admit(span.raw, span.is_word):
                if span.is_word:
                    report.tokens_skipped += 1
                continue
            report.token_occurrences += 1
            for k, index in indexes.items():
                key = encode(span.raw, k, encoder)
                index._add(key.text, span.raw, count=1, first_seen=doc.timestamp)
    return indexes, report


def get_bucket(index: PhoneticIndex, key: SoundexKey) -> list[TokenEntry]:
    """Entries sharing one phonetic key (empty list when unseen)."""
    if key.level != index.level:
        raise LevelMismatchError(f"key level {key.level} != index level {index.level}")
    bucket = index.buckets.get(key.text)
    return list(bucket.values()) if bucket else []


def merge(a: PhoneticIndex, b: PhoneticIndex) -> PhoneticIndex:
    """Bucket-wise union with summed counts; inputs are never mutated."""
    if a.level != b.level:
        raise LevelMismatchError(f"cannot merge level {a.level} with level {b.level}")
    if a.encoder_hash != b.encoder_hash:
        raise ConfigMismatchError("indexes were built with different encoder configs")
    out = PhoneticIndex(level=a.level, encoder=a.encoder, encoder_hash=a.encoder_hash)
    out.document_count = a.document_count + b.document_count
    for source in (a, b):
        for key_text, bucket in source.buckets.items():
            for entry in bucket.values():
                out._add(key_text, entry.raw, count=entry.count, first_seen=entry.first_seen)
    return out


def save_index(index: PhoneticIndex, path: str | Path) -> None:
    """Write the index in the versioned tab-separated format, atomically."""
    path = Path(path)
    lines = [f"{FORMAT_NAME}\t{FORMAT_VERSION}\tk={index.level}\tencoder={index.encoder_hash}\n"]
    rows = []
    for key_text, bucket in index.buckets.items():
        for raw, entry in bucket.items():
            rows.append((key_text, raw, entry.count))
    rows.sort(key=lambda r: (r[0], r[1]))
    lines += [f"{key}\t{raw}\t{count}\n" for key, raw, count in rows]
    body = "".join(lines).encode("utf-8")
    checksum = f"#CHECKSUM\t{fnv1a64(body):016x}\n".encode("utf-8")
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(body + checksum)
    os.replace(tmp, path)


def load_index(
    path: str | Path,
    encoder: EncoderConfig | None = None,
    expect_encoder_hash: str | None = None,
) -> PhoneticIndex:
    """Read an index file written by :func:`save_index`.

    The stored encoder hash must match ``encoder`` (the default config when
    omitted) so queries are guaranteed to encode the way the index was
    built; pass the original config to load a custom-encoder index.
    """
    path = Path(path)
    data = path.read_bytes()
    nl = data.rfind(b"\n", 0, len(data) - 1) if data.endswith(b"\n") else data.rfind(b"\n")
    if nl < 0:
        raise CorruptFileError(f"{path}: missing checksum line")
    body, trailer = data[: nl + 1], data[nl + 1 :]
    trailer_text = trailer.decode("utf-8", errors="replace").strip()
    if not trailer_text.startswith("#CHECKSUM\t"):
        raise CorruptFileError(f"{path}: missing checksum line")
    expected = trailer_text.split("\t", 1)[1].strip()
    actual = f"{fnv1a64(body):016x}"
    if expected != actual:
        raise CorruptFileError(f"{path}: checksum mismatch (stored {expected}, computed {actual})")
    lines = body.decode("utf-8").splitlines()
    header = lines[0].split("\t")
    if len(header) != 4 or header[0] != FORMAT_NAME:
        raise CorruptFileError(f"{path}: not an index file")
    if header[1] != FORMAT_VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported version {header[1]!r}")
    if not header[2].startswith("k=") or not header[3].startswith("encoder="):
        raise CorruptFileError(f"{path}: malformed header")
    level = int(header[2][2:])
    stored_hash = header[3][len("encoder=") :]
    if expect_encoder_hash is not None and stored_hash != expect_encoder_hash:
        raise ConfigMismatchError(f"{path}: encoder hash {stored_hash} != pinned {expect_encoder_hash}")
    encoder = encoder or default_config()
    if config_hash(encoder) != stored_hash:
        raise ConfigMismatchError(
            f"{path}: index was built with encoder {stored_hash}; pass that encoder config to load it"
        )
    index = PhoneticIndex(level=level, encoder=encoder, encoder_hash=stored_hash)
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorruptFileError(f"{path}:{lineno}: expected key<TAB>raw<TAB>count")
        key_text, raw, count_text = parts
        try:
            count = int(count_text)
        except ValueError as exc:
            raise CorruptFileError(f"{path}:{lineno}: bad count {count_text!r}") from exc
        if count < 1:
            raise CorruptFileError(f"{path}:{lineno}: count must be >= 1")
        index._add(key_text, raw, count=count)
    return index


def save_index_dir(indexes: Mapping[int, PhoneticIndex], directory: str | Path) -> list[Path]:
    """Write one ``k<level>.idx`` file per level into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for level in sorted(indexes):
        path = directory / f"k{level}.idx"
        save_index(indexes[level], path)
        paths.append(path)
    return paths


def load_index_dir(directory: str | Path, encoder: EncoderConfig | None = None) -> dict[int, PhoneticIndex]:
    """Load every ``k*.idx`` file in a directory, keyed by level."""
    directory = Path(directory)
    indexes: dict[int, PhoneticIndex] = {}
    for path in sorted(directory.glob("k*.idx")):
        index = load_index(path, encoder=encoder)
        indexes[index.level] = index
    if not indexes:
        raise CorruptFileError(f"{directory}: no k*.idx files found")
    return indexes


def watch_folder(
    corpus_dir: str | Path,
    index_dir: str | Path,
    levels: Iterable[int] = (0, 1, 2),
    encoder: EncoderConfig | None = None,
) -> IngestReport:
    """One sweep of the append-then-merge pipeline over a watched folder.

    Corpus files (*.txt, *.jsonl, *.ndjson, *.json) that are new or have
    changed since the last sweep are ingested and merged into the on-disk
    indexes; a manifest in the index directory remembers what was seen.
    Callers loop this (or run the CLI ``watch`` subcommand) and hit the
    service's reload route to publish the result.
    """
    from .corpus import read_documents

    corpus_dir = Path(corpus_dir)
    index_dir = Path(index_dir)
    encoder = encoder or default_config()
    manifest_path = index_dir / ".ingested"
    seen: dict[str, str] = {}
    if manifest_path.exists():
        for line in manifest_path.read_text(encoding="utf-8").splitlines():
            name, _, stamp = line.partition("\t")
            if name:
                seen[name] = stamp
    pending = []
    for path in sorted(corpus_dir.iterdir()):
        if path.suffix.lower() not in (".txt", ".jsonl", ".ndjson", ".json"):
            continue
        stat = path.stat()
        stamp = f"{stat.st_mtime_ns}:{stat.st_size}"
        if seen.get(path.name) != stamp:
            pending.append((path, stamp))
    if not pending:
        return IngestReport()
    fresh, report = ingest(
        read_documents([p for p, _ in pending], on_error=lambda *_: None),
        levels=levels,
        encoder=encoder,
    )
    index_dir.mkdir(parents=True, exist_ok=True)
    existing = {p.stem for p in index_dir.glob("k*.idx")}
    for level, index in fresh.items():
        path = index_dir / f"k{level}.idx"
        if f"k{level}" in existing:
            index = merge(load_index(path, encoder=encoder), index)
        save_index(index, path)
    for path, stamp in pending:
        seen[path.name] = stamp
    manifest_path.write_text(
        "".join(f"{name}\t{stamp}\n" for name, stamp in sorted(seen.items())), encoding="utf-8"
    )
    return report
