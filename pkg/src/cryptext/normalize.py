"""Normalization: detect perturbed tokens and replace them with the most
coherent dictionary word sharing their sound within an edit bound.

The default coherency scorer is a trainable additive-smoothed n-gram
model; any external scorer can be plugged in through a one-request-per-
line subprocess protocol.
"""
from __future__ import annotations

import math
import os
import subprocess
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document
from .errors import (
    ConfigError,
    CorruptFileError,
    EmptyCorpusError,
    EmptyTokenError,
    EmptyWordlistError,
    LevelMismatchError,
    ToolkitError,
    UnsupportedVersionError,
)
from .textcore import (
    EncoderConfig,
    TokenSpan,
    canonicalize,
    default_config,
    encode,
    fnv1a64,
    levenshtein,
    replace_spans,
    tokenize,
)

__all__ = [
    "Annotation",
    "Candidate",
    "CoherencyScorer",
    "ExternalProcessScorer",
    "NGramModel",
    "NormalizationResult",
    "WordDictionary",
    "build_dictionary",
    "candidates_for",
    "coherency",
    "load_wordlist",
    "normalize_text",
    "train_ngram",
]

STATUS_CLEAN = "clean"
STATUS_NORMALIZED = "normalized"
STATUS_UNKNOWN = "unknown"

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

LM_FORMAT_NAME = "CRYPTEXT-LM"
LM_FORMAT_VERSION = "v1"


@dataclass
class DictionaryReport:
    admitted: int = 0
    rejected: int = 0
    duplicates: int = 0
    rejects: list[str] = field(default_factory=list)


@dataclass
class WordDictionary:
    """Valid words plus per-level phonetic key indexes over them."""

    words: set[str]
    key_indexes: dict[int, dict[str, set[str]]]
    encoder: EncoderConfig
    source: str = ""

    def levels(self) -> list[int]:
        return sorted(self.key_indexes)

    def words_for_key(self, k: int, key_text: str) -> set[str]:
        if k not in self.key_indexes:
            raise LevelMismatchError(f"dictionary has no level {k} index (built: {self.levels()})")
        return self.key_indexes[k].get(key_text, set())


def load_wordlist(path: str | Path) -> list[str]:
    """Words from a UTF-8 file, one per line, '#' comments allowed."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.split("#", 1)[0].strip()
        if word:
            words.append(word)
    return words


def build_dictionary(
    wordlist: Iterable[str],
    levels: Iterable[int] = (0, 1, 2),
    encoder: EncoderConfig | None = None,
    source: str = "",
) -> tuple[WordDictionary, DictionaryReport]:
    """Index a wordlist at the given phonetic levels.

    Entries are stored in canonical form ("répub" is admitted as "repub");
    entries whose canonical form is empty or not purely alphabetic are
    rejected and reported.
    """
    encoder = encoder or default_config()
    levels = sorted(set(levels))
    report = DictionaryReport()
    words: set[str] = set()
    for entry in wordlist:
        canon = canonicalize(entry, encoder).casefold()
        if not canon or not all(ch.isalpha() for ch in canon):
            report.rejected += 1
            if len(report.rejects) < 20:
                report.rejects.append(entry)
            continue
        if canon in words:
            report.duplicates += 1
            continue
        words.add(canon)
        report.admitted += 1
    if not words:
        raise EmptyWordlistError("wordlist contains no admissible words")
    key_indexes: dict[int, dict[str, set[str]]] = {k: {} for k in levels}
    for word in words:
        for k in levels:
            key = encode(word, k, encoder)
            key_indexes[k].setdefault(key.text, set()).add(word)
    return WordDictionary(words=words, key_indexes=key_indexes, encoder=encoder, source=source), report


@dataclass
class Candidate:
    """A dictionary word that could replace a perturbed token."""

    word: str
    distance: int
    coherency: float = 0.0
    corpus_count: int = 0

    def as_dict(self) -> dict:
        return {
            "word": self.word,
            "distance": self.distance,
            "coherency": self.coherency,
            "corpus_count": self.corpus_count,
        }


def candidates_for(token: str, dictionary: WordDictionary, k: int, d: int) -> list[Candidate]:
    """Dictionary words sharing the token's key at level k within distance d.

    Coherency is left at 0.0; ranking happens in :func:`normalize_text`.
    """
    key = encode(token, k, dictionary.encoder)
    folded = token.casefold()
    out = []
    for word in dictionary.words_for_key(k, key.text):
        distance = levenshtein(folded, word)
        if distance <= d:
            out.append(Candidate(word=word, distance=distance))
    out.sort(key=lambda c: (c.distance, c.word))
    return out


class CoherencyScorer:
    """Scores how well a word fits a token slot given its context.

    Higher is more coherent; scores live on a log-probability scale and
    must be finite and deterministic for fixed model state.
    """

    def score(self, word: str, left: Sequence[str], right: Sequence[str]) -> float:
        raise NotImplementedError

    def word_frequency(self, word: str) -> int:
        """Training-corpus occurrences, used as a ranking tie-break."""
        return 0


class NGramModel(CoherencyScorer):
    """Additive-smoothed n-gram scorer trained on a plain corpus."""

    def __init__(self, order: int = 3, alpha: float = 0.1):
        if order < 1:
            raise ConfigError(f"order must be >= 1, got {order}")
        if alpha <= 0:
            raise ConfigError(f"smoothing constant must be > 0, got {alpha}")
        self.order = order
        self.alpha = alpha
        self.counts: dict[int, Counter] = {m: Counter() for m in range(1, order + 1)}
        self.vocab: set[str] = {BOS, EOS}
        self._context_totals: dict[int, Counter] = {m: Counter() for m in range(1, order + 1)}

    # -- training ---------------------------------------------------------

    def add_sentence(self, tokens: Sequence[str]) -> None:
        tokens = list(tokens)
        self.vocab.update(tokens)
        for m in range(1, self.order + 1):
            padded = [BOS] * (m - 1) + tokens + [EOS]
            for i in range(len(padded) - m + 1):
                gram = tuple(padded[i : i + m])
                self.counts[m][gram] += 1
                self._context_totals[m][gram[:-1]] += 1

    @property
    def vocab_size(self) -> int:
        # +1 reserves probability mass for unseen words.
        return len(self.vocab) + 1

    # -- scoring ----------------------------------------------------------

    def _clip(self, token: str) -> str:
        return token if token in self.vocab else UNK

    def conditional(self, word: str, context: Sequence[str]) -> float:
        """P(word | context) with additive smoothing; always finite."""
        m = len(context) + 1
        if m > self.order:
            raise LevelMismatchError(f"context of {m - 1} tokens exceeds model order {self.order}")
        gram = tuple(self._clip(t) for t in context) + (self._clip(word),)
        count = self.counts[m][gram]
        total = self._context_totals[m][gram[:-1]]
        return (count + self.alpha) / (total + self.alpha * self.vocab_size)

    def score(self, word: str, left: Sequence[str], right: Sequence[str]) -> float:
        """Sum of log conditional probabilities of every n-gram covering
        the slot, with a window of order-1 tokens each side and boundary
        symbols supplied at text edges."""
        n = self.order
        lw = list(left)[-(n - 1) :] if n > 1 else []
        lw = [BOS] * (n - 1 - len(lw)) + lw
        rw = list(right)[: n - 1] if n > 1 else []
        rw = rw + [EOS] * (n - 1 - len(rw))
        seq = lw + [word] + rw
        total = 0.0
        for start in range(n):
            gram = seq[start : start + n]
            total += math.log(self.conditional(gram[-1], gram[:-1]))
        return total

    def word_frequency(self, word: str) -> int:
        return self.counts[1][(word,)]

    # -- persistence ------------------------------------------------------

    def save(self, path: str | Path) -> None:
        path = Path(path)
        lines = [f"{LM_FORMAT_NAME} {LM_FORMAT_VERSION} order={self.order} alpha={self.alpha!r}\n"]
        rows = []
        for m in range(1, self.order + 1):
            for gram, count in self.counts[m].items():
                rows.append((m, " ".join(gram[:-1]), gram[-1], count))
        rows.sort(key=lambda r: (r[0], r[1], r[2]))
        lines += [f"{m}\t{ctx}\t{word}\t{count}\n" for m, ctx, word, count in rows]
        body = "".join(lines).encode("utf-8")
        checksum = f"#CHECKSUM\t{fnv1a64(body):016x}\n".encode("utf-8")
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(body + checksum)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "NGramModel":
        path = Path(path)
        data = path.read_bytes()
        nl = data.rfind(b"\n", 0, len(data) - 1) if data.endswith(b"\n") else data.rfind(b"\n")
        if nl < 0:
            raise CorruptFileError(f"{path}: missing checksum line")
        body, trailer = data[: nl + 1], data[nl + 1 :]
        trailer_text = trailer.decode("utf-8", errors="replace").strip()
        if not trailer_text.startswith("#CHECKSUM\t"):
            raise CorruptFileError(f"{path}: missing checksum line")
        if trailer_text.split("\t", 1)[1].strip() != f"{fnv1a64(body):016x}":
            raise CorruptFileError(f"{path}: checksum mismatch")
        lines = body.decode("utf-8").splitlines()
        header = lines[0].split()
        if len(header) != 4 or header[0] != LM_FORMAT_NAME:
            raise CorruptFileError(f"{path}: not a language model file")
        if header[1] != LM_FORMAT_VERSION:
            raise UnsupportedVersionError(f"{path}: unsupported version {header[1]!r}")
        try:
            order = int(header[2].split("=", 1)[1])
            alpha = float(header[3].split("=", 1)[1])
        except (IndexError, ValueError) as exc:
            raise CorruptFileError(f"{path}: malformed header") from exc
        model = cls(order=order, alpha=alpha)
        for lineno, line in enumerate(lines[1:], 2):
            parts = line.split("\t")
            if len(parts) != 4:
                raise CorruptFileError(f"{path}:{lineno}: expected order<TAB>context<TAB>word<TAB>count")
            m_text, ctx_text, word, count_text = parts
            try:
                m = int(m_text)
                count = int(count_text)
            except ValueError as exc:
                raise CorruptFileError(f"{path}:{lineno}: bad integer field") from exc
            if not 1 <= m <= order or count < 1:
                raise CorruptFileError(f"{path}:{lineno}: order/count out of range")
            context = tuple(ctx_text.split(" ")) if ctx_text else ()
            if len(context) != m - 1:
                raise CorruptFileError(f"{path}:{lineno}: context length != order-1")
            gram = context + (word,)
            model.counts[m][gram] += count
            model._context_totals[m][context] += count
            if m == 1 and word not in (BOS, EOS, UNK):
                model.vocab.add(word)
        return model


def train_ngram(corpus: Iterable[Document | str], order: int = 3, alpha: float = 0.1) -> NGramModel:
    """Train the default scorer on a document stream (one sentence each).

    Tokens are the case-folded word tokens of each document.
    """
    model = NGramModel(order=order, alpha=alpha)
    sentences = 0
    for item in corpus:
        text = item.text if isinstance(item, Document) else item
        tokens = [span.raw.casefold() for span in tokenize(text) if span.is_word]
        if not tokens:
            continue
        model.add_sentence(tokens)
        sentences += 1
    if sentences == 0:
        raise EmptyCorpusError("training corpus contains no word tokens")
    return model


def coherency(model: CoherencyScorer, word: str, left: Sequence[str], right: Sequence[str]) -> float:
    """Context-fit score for ``word`` in a token slot (higher = better)."""
    return model.score(word, left, right)


class ExternalProcessScorer(CoherencyScorer):
    """Adapter for an out-of-process scorer.

    Protocol: one request per line, ``candidate<TAB>left tokens<TAB>right
    tokens`` (tokens space-joined); the process answers with one decimal
    score per line.
    """

    def __init__(self, argv: Sequence[str]):
        self._proc = subprocess.Popen(
            list(argv),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def score(self, word: str, left: Sequence[str], right: Sequence[str]) -> float:
        assert self._proc.stdin is not None and self._proc.stdout is not None
        request = f"{word}\t{' '.join(left)}\t{' '.join(right)}\n"
        self._proc.stdin.write(request)
        self._proc.stdin.flush()
        response = self._proc.stdout.readline()
        if not response:
            raise ToolkitError("external scorer closed its output stream")
        return float(response.strip())

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self) -> "ExternalProcessScorer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@dataclass
class Annotation:
    """Per word-token outcome of normalization."""

    span: TokenSpan
    original: str
    replacement: str | None
    candidates: list[Candidate]
    status: str

    def as_dict(self) -> dict:
        return {
            "start": self.span.start,
            "end": self.span.end,
            "original": self.original,
            "replacement": self.replacement,
            "status": self.status,
            "candidates": [c.as_dict() for c in self.candidates],
        }


@dataclass
class NormalizationResult:
    output_text: str
    annotations: list[Annotation]

    def as_dict(self) -> dict:
        return {
            "output_text": self.output_text,
            "annotations": [a.as_dict() for a in self.annotations],
        }


def _match_casing(original: str, replacement: str) -> str:
    if len(original) > 1 and original.isupper():
        return replacement.upper()
    if original[:1].isupper() and original[1:].islower():
        return replacement.capitalize()
    if len(original) == len(replacement):
        return "".join(
            r.upper() if o.isupper() else r for o, r in zip(original, replacement)
        )
    return replacement


def normalize_text(
    text: str,
    dictionary: WordDictionary,
    scorer: CoherencyScorer,
    k: int = 1,
    d: int = 3,
    top_n: int = 5,
) -> NormalizationResult:
    """De-perturb a text.

    Word tokens whose canonical form is already a dictionary word are left
    alone (clean).  Others are matched against dictionary words sharing
    their phonetic key within edit distance d, ranked by coherency, then
    distance, then training-corpus frequency, then alphabetically; the
    winner replaces the token.  Tokens with no candidates stay unchanged
    (unknown).  Bytes outside replaced spans are never touched.
    """
    if k not in dictionary.key_indexes:
        raise LevelMismatchError(f"dictionary has no level {k} index (built: {dictionary.levels()})")
    spans = tokenize(text, dictionary.encoder)
    word_spans = [s for s in spans if s.is_word]
    context = [s.raw.casefold() for s in word_spans]
    annotations: list[Annotation] = []
    edits: list[tuple[TokenSpan, str]] = []
    for i, span in enumerate(word_spans):
        canon = canonicalize(span.raw, dictionary.encoder)
        if canon.casefold() in dictionary.words:
            annotations.append(Annotation(span, span.raw, None, [], STATUS_CLEAN))
            continue
        try:
            candidates = candidates_for(span.raw, dictionary, k, d)
        except EmptyTokenError:
            candidates = []
        if not candidates:
            annotations.append(Annotation(span, span.raw, None, [], STATUS_UNKNOWN))
            continue
        left, right = context[:i], context[i + 1 :]
        for candidate in candidates:
            candidate.coherency = scorer.score(candidate.word, left, right)
            candidate.corpus_count = scorer.word_frequency(candidate.word)
        candidates.sort(key=lambda c: (-c.coherency, c.distance, -c.corpus_count, c.word))
        winner = candidates[0].word
        replacement = _match_casing(span.raw, winner)
        edits.append((span, replacement))
        annotations.append(Annotation(span, span.raw, replacement, candidates[:top_n], STATUS_NORMALIZED))
    return NormalizationResult(output_text=replace_spans(text, edits), annotations=annotations)
