"""Corpus readers: plain text (one document per line) and JSON records."""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from .errors import MalformedDocumentError

__all__ = ["Document", "iter_documents", "parse_timestamp", "read_documents"]


@dataclass(frozen=True)
class Document:
    """One corpus document."""

    doc_id: str
    text: str
    timestamp: datetime | None = None
    source: str | None = None


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 timestamp; naive values are taken as UTC."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError as exc:
        raise MalformedDocumentError(f"unparseable timestamp {value!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def _record_from_json(line: str, doc_id: str) -> Document:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"invalid JSON record: {exc}") from exc
    if not isinstance(record, dict) or not isinstance(record.get("text"), str):
        raise MalformedDocumentError("record must be an object with a string 'text' field")
    timestamp = None
    if record.get("timestamp") is not None:
        if not isinstance(record["timestamp"], str):
            raise MalformedDocumentError("'timestamp' must be an RFC 3339 string")
        timestamp = parse_timestamp(record["timestamp"])
    return Document(
        doc_id=str(record.get("id", doc_id)),
        text=record["text"],
        timestamp=timestamp,
        source=record.get("source"),
    )


_STRUCTURED_SUFFIXES = {".jsonl", ".ndjson", ".json"}


def iter_documents(
    path: str | Path,
    fmt: str | None = None,
    on_error=None,
) -> Iterator[Document]:
    """Yield documents from one corpus file.

    ``fmt`` is "plain", "jsonl", or None to pick by file extension.
    Malformed records are passed to ``on_error(line_no, exc)`` and skipped;
    without a handler they raise.
    """
    path = Path(path)
    if fmt is None:
        fmt = "jsonl" if path.suffix.lower() in _STRUCTURED_SUFFIXES else "plain"
    if fmt not in ("plain", "jsonl"):
        raise ValueError(f"unknown corpus format {fmt!r}")
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            doc_id = f"{path.name}:{line_no}"
            if fmt == "plain":
                yield Document(doc_id=doc_id, text=line)
                continue
            try:
                yield _record_from_json(line, doc_id)
            except MalformedDocumentError as exc:
                if on_error is None:
                    raise
                on_error(line_no, exc)


def read_documents(paths: Iterable[str | Path], fmt: str | None = None, on_error=None) -> Iterator[Document]:
    """Chain documents from several corpus files."""
    for path in paths:
        yield from iter_documents(path, fmt=fmt, on_error=on_error)
