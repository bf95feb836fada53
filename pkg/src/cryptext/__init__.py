"""Toolkit for human-written text perturbations: a phonetic index built
from corpora, with lookup, normalization, perturbation, and timeline
analytics exposed as a library, CLI, and HTTP service."""
from __future__ import annotations

from .analytics import SentimentLexicon, TimelineQuery, TimelineSeries, build_timeline, keyword_enrich
from .corpus import Document, iter_documents, read_documents
from .errors import ToolkitError
from .index import PhoneticIndex, TokenEntry, get_bucket, ingest, load_index, merge, save_index
from .normalize import (
    NGramModel,
    NormalizationResult,
    WordDictionary,
    build_dictionary,
    candidates_for,
    coherency,
    normalize_text,
    train_ngram,
)
from .perturb import PerturbRequest, PerturbResult, perturb_corpus, perturb_text
from .query import LookupParams, PerturbationSet, lookup, perturbations_only
from .textcore import (
    EncoderConfig,
    SoundexKey,
    TokenSpan,
    canonicalize,
    default_config,
    encode,
    levenshtein,
    tokenize,
    within_distance,
)

__version__ = "0.1.0"
