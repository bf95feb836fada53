"""Perturbation: rewrite a fraction of word tokens with indexed variants.

Sampling is fully deterministic given the request seed.  The generator is
splitmix64, chosen because it is a tiny, portable, well-specified 64-bit
sequence: the same seed yields the same output on any platform, and each
corpus document derives its own seed as ``seed XOR fnv1a64(doc_id)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace as dc_replace
from typing import Iterable

from .corpus import Document
from .errors import EmptyTokenError, LevelMismatchError, RatioOutOfRangeError
from .index import PhoneticIndex
from .query import LookupParams, perturbations_only
from .textcore import TokenSpan, fnv1a64, replace_spans, tokenize

__all__ = [
    "GENERATOR_NAME",
    "ClassifierClient",
    "CorpusPerturbation",
    "PerturbRequest",
    "PerturbResult",
    "Replacement",
    "SplitMix64",
    "perturb_corpus",
    "perturb_text",
    "prediction_agreement",
    "round_half_up",
]

GENERATOR_NAME = "splitmix64"
_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 sequence; `below(n)` draws uniformly via rejection."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError(f"below() needs n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class PerturbRequest:
    """Manipulation ratio plus the lookup filter feeding replacements."""

    ratio: float
    seed: int = 0
    case_sensitive: bool = False
    lookup: LookupParams = field(default_factory=LookupParams)

    def __post_init__(self) -> None:
        if not 0.0 <= self.ratio <= 1.0:
            raise RatioOutOfRangeError(f"ratio must be in [0, 1], got {self.ratio}")

    def effective_lookup(self) -> LookupParams:
        return dc_replace(self.lookup, case_sensitive=self.case_sensitive)


@dataclass
class Replacement:
    span: TokenSpan
    original: str
    replacement: str
    bucket_size: int

    def as_dict(self) -> dict:
        return {
            "start": self.span.start,
            "end": self.span.end,
            "original": self.original,
            "replacement": self.replacement,
            "bucket_size": self.bucket_size,
        }


@dataclass
class PerturbResult:
    output_text: str
    replacements: list[Replacement]
    requested: int
    achieved: int
    eligible: int
    word_tokens: int = 0

    def as_dict(self) -> dict:
        return {
            "output_text": self.output_text,
            "replacements": [r.as_dict() for r in self.replacements],
            "requested": self.requested,
            "achieved": self.achieved,
            "eligible": self.eligible,
            "generator": GENERATOR_NAME,
        }


def _perturb_spans(text: str, index: PhoneticIndex, req: PerturbRequest, seed: int) -> PerturbResult:
    params = req.effective_lookup()
    if params.k != index.level:
        raise LevelMismatchError(f"lookup.k={params.k} but index level is {index.level}")
    word_spans = [s for s in tokenize(text, index.encoder) if s.is_word]
    requested = round_half_up(req.ratio * len(word_spans))

    variants_by_raw: dict[str, list] = {}
    eligible: list[tuple[TokenSpan, list]] = []
    for span in word_spans:
        if span.raw not in variants_by_raw:
            try:
                variants_by_raw[span.raw] = perturbations_only(index, span.raw, params).members
            except EmptyTokenError:
                variants_by_raw[span.raw] = []
        members = variants_by_raw[span.raw]
        if members:
            eligible.append((span, members))

    achieved = min(requested, len(eligible))
    rng = SplitMix64(seed)
    order = list(range(len(eligible)))
    for i in range(achieved):
        j = i + rng.below(len(order) - i)
        order[i], order[j] = order[j], order[i]
    selected = sorted(order[:achieved])

    replacements = []
    for idx in selected:
        span, members = eligible[idx]
        choice = members[rng.below(len(members))]
        replacements.append(
            Replacement(span=span, original=span.raw, replacement=choice.raw, bucket_size=len(members))
        )
    output = replace_spans(text, [(r.span, r.replacement) for r in replacements])
    return PerturbResult(
        output_text=output,
        replacements=replacements,
        requested=requested,
        achieved=len(replacements),
        eligible=len(eligible),
        word_tokens=len(word_spans),
    )


def perturb_text(text: str, index: PhoneticIndex, req: PerturbRequest) -> PerturbResult:
    """Replace round(ratio * word tokens) tokens with indexed perturbations.

    Targets are sampled without replacement from the tokens that actually
    have perturbations; each target gets a uniformly chosen member of its
    perturbation set.  Same text, index, and seed give identical output.
    """
    return _perturb_spans(text, index, req, req.seed)


@dataclass
class ManifestRow:
    doc_id: str
    requested: int
    eligible: int
    achieved: int
    replacements: list[Replacement]

    def as_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "requested": self.requested,
            "eligible": self.eligible,
            "achieved": self.achieved,
            "replacements": [
                [r.span.start, r.span.end, r.original, r.replacement] for r in self.replacements
            ],
            "generator": GENERATOR_NAME,
        }


@dataclass
class CorpusPerturbation:
    documents: list[Document]
    manifest: list[ManifestRow]
    requested: int = 0
    achieved: int = 0
    eligible: int = 0
    word_tokens: int = 0
    generator: str = GENERATOR_NAME

    @property
    def aggregate_ratio(self) -> float:
        """Fraction of all word tokens actually replaced."""
        return self.achieved / self.word_tokens if self.word_tokens else 0.0


def derive_seed(seed: int, doc_id: str) -> int:
    return (seed ^ fnv1a64(doc_id.encode("utf-8"))) & _MASK64


class ClassifierClient:
    """Seam for robustness evaluation against an external text classifier."""

    def predict(self, texts: list[str]) -> list[str]:
        raise NotImplementedError


def prediction_agreement(
    originals: list[Document],
    perturbed: list[Document],
    client: ClassifierClient,
) -> float:
    """Fraction of documents whose label survives perturbation.

    The classifier itself is external; this only pairs up the two corpora
    by document id and compares predictions.
    """
    by_id = {doc.doc_id: doc.text for doc in perturbed}
    pairs = [(doc.text, by_id[doc.doc_id]) for doc in originals if doc.doc_id in by_id]
    if not pairs:
        return 1.0
    before = client.predict([text for text, _ in pairs])
    after = client.predict([text for _, text in pairs])
    return sum(1 for a, b in zip(before, after) if a == b) / len(pairs)


def perturb_corpus(
    documents: Iterable[Document],
    index: PhoneticIndex,
    req: PerturbRequest,
) -> CorpusPerturbation:
    """Perturb every document with an independent per-document seed.

    Per-document seeds make the result order-independent and the work
    safely parallelizable; the manifest records one row per document.
    """
    out_docs: list[Document] = []
    manifest: list[ManifestRow] = []
    totals = CorpusPerturbation(documents=out_docs, manifest=manifest)
    for doc in documents:
        result = _perturb_spans(doc.text, index, req, derive_seed(req.seed, doc.doc_id))
        out_docs.append(
            Document(doc_id=doc.doc_id, text=result.output_text, timestamp=doc.timestamp, source=doc.source)
        )
        manifest.append(
            ManifestRow(
                doc_id=doc.doc_id,
                requested=result.requested,
                eligible=result.eligible,
                achieved=result.achieved,
                replacements=result.replacements,
            )
        )
        totals.requested += result.requested
        totals.achieved += result.achieved
        totals.eligible += result.eligible
        totals.word_tokens += result.word_tokens
    return totals
