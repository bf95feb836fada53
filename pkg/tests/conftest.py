"""Shared fixtures: the three-sentence sample corpus and indexes over it."""
from __future__ import annotations

from datetime import datetime, timezone

import pytest

from cryptext.corpus import Document
from cryptext.index import ingest

# Three short sentences whose tokens bucket into exactly three phonetic
# groups at level 1; used all over the suite.
SAMPLE_SENTENCES = [
    "the dirrty republicans",
    "thee dirty repubLIEcans",
    "the dirty republic@@ns",
]


def make_docs(texts, start=None, step_days=0):
    docs = []
    for i, text in enumerate(texts):
        ts = None
        if start is not None:
            ts = datetime.fromtimestamp(start.timestamp() + i * step_days * 86400, tz=timezone.utc)
        docs.append(Document(doc_id=f"doc{i}", text=text, timestamp=ts))
    return docs


@pytest.fixture(scope="session")
def sample_docs():
    return make_docs(SAMPLE_SENTENCES)


@pytest.fixture(scope="session")
def sample_indexes(sample_docs):
    indexes, _ = ingest(sample_docs, levels=(0, 1, 2))
    return indexes


@pytest.fixture(scope="session")
def sample_index_k1(sample_indexes):
    return sample_indexes[1]
