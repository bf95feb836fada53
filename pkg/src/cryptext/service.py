"""Authenticated HTTP JSON API over the toolkit, with an in-process LRU
response cache and atomic index hot-reload.

All /api routes require ``Authorization: Bearer <token>`` when a token is
configured; /health stays open.  Cached responses are byte-identical to
fresh computation within one index generation, and a reload invalidates
every older entry by construction (the generation is part of the key).
"""
from __future__ import annotations

import json
import logging
import os
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analytics, normalize as norm, perturb as pert, query as qry
from .corpus import Document, parse_timestamp, read_documents
from .errors import ConfigError, EmptyTokenError, LevelMismatchError, ToolkitError
from .index import PhoneticIndex, load_index_dir
from .textcore import EncoderConfig, default_config, load_encoder_config

__all__ = ["ApiConfig", "AppState", "ResponseCache", "create_app", "load_api_config", "serve"]

TOKEN_ENV_VAR = "CRYPTEXT_API_TOKEN"


@dataclass
class ApiConfig:
    """Service configuration (key=value file; see :func:`load_api_config`)."""

    index_dir: str
    host: str = "127.0.0.1"
    port: int = 8080
    auth_token: str | None = None
    cache_capacity: int = 1024
    dictionary_path: str | None = None
    model_path: str | None = None
    lexicon_path: str | None = None
    corpus_path: str | None = None
    static_dir: str | None = None
    encoder_config_path: str | None = None

    def __post_init__(self) -> None:
        if self.cache_capacity < 0:
            raise ConfigError("cache_capacity must be >= 0")


_CONFIG_KEYS = {
    "index_dir": str,
    "host": str,
    "port": int,
    "auth_token": str,
    "cache_capacity": int,
    "dictionary_path": str,
    "model_path": str,
    "lexicon_path": str,
    "corpus_path": str,
    "static_dir": str,
    "encoder_config_path": str,
}


def load_api_config(path: str | Path) -> ApiConfig:
    """Parse a plain key=value config file ('#' comments allowed).

    The CRYPTEXT_API_TOKEN environment variable overrides the file token.
    """
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
        try:
            values[key] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}") from exc
    if "index_dir" not in values:
        raise ConfigError(f"{path}: index_dir is required")
    env_token = os.environ.get(TOKEN_ENV_VAR)
    if env_token:
        values["auth_token"] = env_token
    return ApiConfig(**values)


class ResponseCache:
    """Thread-safe LRU over response bytes, keyed by route, canonicalized
    parameters, and index generation."""

    def __init__(self, capacity: int = 1024):
        self.capacity = capacity
        self._entries: OrderedDict[tuple, bytes] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    @staticmethod
    def make_key(route: str, params: Mapping, generation: int) -> tuple:
        return (route, tuple(sorted((str(k), str(v)) for k, v in params.items())), generation)

    def get_or_compute(self, route: str, params: Mapping, generation: int, compute: Callable[[], bytes]) -> tuple[bytes, bool]:
        if self.capacity == 0:
            self.misses += 1
            return compute(), False
        key = self.make_key(route, params, generation)
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                self.hits += 1
                return self._entries[key], True
        body = compute()
        with self._lock:
            if key not in self._entries:
                self._entries[key] = body
                while len(self._entries) > self.capacity:
                    self._entries.popitem(last=False)
                    self.evictions += 1
            self.misses += 1
        return body, False

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def stats(self) -> dict:
        with self._lock:
            return {
                "capacity": self.capacity,
                "entries": len(self._entries),
                "hits": self.hits,
                "misses": self.misses,
                "evictions": self.evictions,
            }


@dataclass
class AppState:
    """Shared immutable artifacts plus the mutable generation pointer."""

    config: ApiConfig
    encoder: EncoderConfig
    indexes: dict[int, PhoneticIndex]
    cache: ResponseCache
    dictionary: norm.WordDictionary | None = None
    scorer: norm.CoherencyScorer | None = None
    lexicon: analytics.SentimentLexicon | None = None
    documents: list[Document] | None = None
    generation: int = 1
    _reload_lock: threading.Lock = field(default_factory=threading.Lock)

    def index_for(self, k: int) -> PhoneticIndex:
        if k not in self.indexes:
            raise LevelMismatchError(f"no index built for level {k} (available: {sorted(self.indexes)})")
        return self.indexes[k]

    def reload_index(self, directory: str | Path | None = None) -> int:
        """Atomically swap in freshly loaded indexes; on any validation
        failure the current generation keeps serving."""
        directory = directory or self.config.index_dir
        fresh = load_index_dir(directory, encoder=self.encoder)
        with self._reload_lock:
            self.indexes = fresh
            self.generation += 1
            self.cache.clear()
            return self.generation


def load_state(config: ApiConfig) -> AppState:
    """Load all artifacts named by the config; failures are fatal."""
    encoder = default_config()
    if config.encoder_config_path:
        encoder = load_encoder_config(config.encoder_config_path)
    indexes = load_index_dir(config.index_dir, encoder=encoder)
    state = AppState(
        config=config,
        encoder=encoder,
        indexes=indexes,
        cache=ResponseCache(config.cache_capacity),
    )
    if config.dictionary_path:
        words = norm.load_wordlist(config.dictionary_path)
        state.dictionary, _ = norm.build_dictionary(
            words, levels=sorted(indexes), encoder=encoder, source=config.dictionary_path
        )
    if config.model_path:
        state.scorer = norm.NGramModel.load(config.model_path)
    if config.lexicon_path:
        state.lexicon = analytics.load_lexicon(config.lexicon_path)
    if config.corpus_path:
        paths = [p.strip() for p in config.corpus_path.split(",") if p.strip()]
        state.documents = list(read_documents(paths, on_error=lambda *_: None))
    return state


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def _json_bytes(payload: dict) -> bytes:
    return json.dumps(payload, ensure_ascii=False).encode("utf-8")


def _json_response(body: bytes, cache_hit: bool | None = None) -> Response:
    headers = {}
    if cache_hit is not None:
        headers["X-Cache"] = "hit" if cache_hit else "miss"
    return Response(content=body, media_type="application/json", headers=headers)


class NormalizeBody(BaseModel):
    text: str
    k: int = 1
    d: int = 3
    top_n: int = 5


class PerturbBody(BaseModel):
    text: str
    ratio: float
    seed: int = 0
    case_sensitive: bool = False
    k: int = 1
    d: int = 3


class CorpusDocument(BaseModel):
    id: str
    text: str


class PerturbCorpusBody(BaseModel):
    documents: list[CorpusDocument]
    ratio: float
    seed: int = 0
    case_sensitive: bool = False
    k: int = 1
    d: int = 3


MAX_BULK_ITEMS = 1000


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="cryptext", docs_url=None, redoc_url=None)
    app.state.toolkit = state

    @app.middleware("http")
    async def require_bearer_token(request: Request, call_next):
        token = state.config.auth_token
        if token and request.url.path.startswith("/api/"):
            supplied = request.headers.get("Authorization", "")
            if supplied != f"Bearer {token}":
                return JSONResponse(
                    status_code=401,
                    content=_error_body("Unauthorized", "missing or invalid bearer token"),
                )
        return await call_next(request)

    @app.exception_handler(ToolkitError)
    async def toolkit_error_handler(request: Request, exc: ToolkitError):
        return JSONResponse(status_code=400, content=_error_body(exc.code, str(exc)))

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content=_error_body("ValidationError", str(exc.errors()[:3])))

    @app.exception_handler(Exception)
    async def unhandled_error_handler(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content=_error_body("InternalError", str(exc)))

    def unconfigured(feature: str) -> Response:
        return JSONResponse(status_code=503, content=_error_body("NotConfigured", f"{feature} not configured"))

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "generation": state.generation,
            "levels": sorted(state.indexes),
            "token_count": sum(i.token_count for i in state.indexes.values()),
            "bucket_count": sum(i.bucket_count for i in state.indexes.values()),
        }

    @app.get("/api/v1/lookup")
    async def lookup_route(
        token: str,
        k: int = 1,
        d: int = 3,
        case_sensitive: bool = False,
        min_count: int = 1,
    ):
        if not token:
            raise EmptyTokenError("query token is empty")
        params = {"token": token, "k": k, "d": d, "case_sensitive": case_sensitive, "min_count": min_count}

        def compute() -> bytes:
            index = state.index_for(k)
            result = qry.lookup(
                index,
                token,
                qry.LookupParams(k=k, d=d, case_sensitive=case_sensitive, min_count=min_count),
            )
            return _json_bytes(result.as_dict())

        body, hit = state.cache.get_or_compute("lookup", params, state.generation, compute)
        return _json_response(body, cache_hit=hit)

    @app.post("/api/v1/normalize")
    async def normalize_route(body: NormalizeBody):
        if state.dictionary is None or state.scorer is None:
            return unconfigured("dictionary/model")
        result = norm.normalize_text(
            body.text, state.dictionary, state.scorer, k=body.k, d=body.d, top_n=body.top_n
        )
        return _json_response(_json_bytes(result.as_dict()))

    @app.post("/api/v1/perturb")
    async def perturb_route(body: PerturbBody):
        index = state.index_for(body.k)
        req = pert.PerturbRequest(
            ratio=body.ratio,
            seed=body.seed,
            case_sensitive=body.case_sensitive,
            lookup=qry.LookupParams(k=body.k, d=body.d, case_sensitive=body.case_sensitive),
        )
        result = pert.perturb_text(body.text, index, req)
        return _json_response(_json_bytes(result.as_dict()))

    @app.post("/api/v1/perturb/corpus")
    async def perturb_corpus_route(body: PerturbCorpusBody):
        if len(body.documents) > MAX_BULK_ITEMS:
            return JSONResponse(
                status_code=400,
                content=_error_body("ValidationError", f"at most {MAX_BULK_ITEMS} documents per request"),
            )
        index = state.index_for(body.k)
        req = pert.PerturbRequest(
            ratio=body.ratio,
            seed=body.seed,
            case_sensitive=body.case_sensitive,
            lookup=qry.LookupParams(k=body.k, d=body.d, case_sensitive=body.case_sensitive),
        )
        docs = [Document(doc_id=d.id, text=d.text) for d in body.documents]
        result = pert.perturb_corpus(docs, index, req)
        payload = {
            "documents": [{"id": d.doc_id, "text": d.text} for d in result.documents],
            "manifest": [row.as_dict() for row in result.manifest],
            "aggregate_achieved_ratio": result.aggregate_ratio,
            "generator": result.generator,
        }
        return _json_response(_json_bytes(payload))

    @app.get("/api/v1/timeline")
    async def timeline_route(
        word: str,
        start: str = Query(alias="from"),
        to: str = Query(),
        granularity: str = "day",
        k: int = 1,
        d: int = 3,
    ):
        if state.documents is None:
            return unconfigured("timeline corpus")
        params = {"word": word, "from": start, "to": to, "granularity": granularity, "k": k, "d": d}

        def compute() -> bytes:
            index = state.index_for(k)
            tq = analytics.TimelineQuery(
                word=word,
                start=parse_timestamp(start),
                end=parse_timestamp(to),
                granularity=granularity,
                lookup=qry.LookupParams(k=k, d=d),
            )
            series = analytics.build_timeline(state.documents, index, tq, state.lexicon)
            return _json_bytes(series.as_dict())

        body, hit = state.cache.get_or_compute("timeline", params, state.generation, compute)
        return _json_response(body, cache_hit=hit)

    @app.get("/api/v1/stats")
    async def stats_route():
        return {
            "generation": state.generation,
            "levels": {str(k): index.stats() for k, index in sorted(state.indexes.items())},
            "cache": state.cache.stats(),
        }

    @app.post("/api/v1/reload")
    async def reload_route():
        try:
            generation = state.reload_index()
        except ToolkitError as exc:
            # Old generation keeps serving; report why the swap was refused.
            logging.getLogger(__name__).warning("index reload rejected: %s", exc)
            return JSONResponse(status_code=409, content=_error_body(exc.code, str(exc)))
        return {"generation": generation}

    static_dir = state.config.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(config: ApiConfig) -> None:
    """Blocking entry point used by the CLI's ``serve`` subcommand."""
    import uvicorn

    app = create_app(load_state(config))
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
