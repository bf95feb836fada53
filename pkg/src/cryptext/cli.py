"""Command-line front door for batch workflows.

Exit codes: 0 success, 1 operational error (stable error code on stderr),
2 usage error.  Query commands emit TSV by default and JSON with
``--format json``; JSON output is field-for-field identical to the HTTP
service's response bodies.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from . import analytics, normalize as norm, perturb as pert, query as qry
from .corpus import parse_timestamp, read_documents
from .errors import ToolkitError
from .index import ingest, load_index_dir, save_index_dir, watch_folder
from .query import LookupParams
from .service import load_api_config, serve
from .textcore import EncoderConfig, default_config, load_encoder_config

__all__ = ["main"]


def _encoder_from_args(args) -> EncoderConfig:
    if getattr(args, "encoder_config", None):
        return load_encoder_config(args.encoder_config)
    return default_config()


def _emit(payload: dict, fmt: str, tsv_rows) -> None:
    if fmt == "json":
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        for row in tsv_rows(payload):
            print("\t".join(str(field) for field in row))


def _read_text_arg(args, parser: argparse.ArgumentParser) -> str:
    if args.text is not None and args.infile is not None:
        parser.error("--text and --in are mutually exclusive")
    if args.text is not None:
        return args.text
    if args.infile is not None:
        return Path(args.infile).read_text(encoding="utf-8")
    parser.error("one of --text or --in is required")
    raise AssertionError  # parser.error never returns


def _cmd_build_index(args, parser) -> int:
    encoder = _encoder_from_args(args)
    levels = [int(part) for part in args.levels.split(",") if part.strip() != ""]
    docs = read_documents(args.corpus, on_error=lambda *_: None)
    indexes, report = ingest(docs, levels=levels, encoder=encoder)
    save_index_dir(indexes, args.out)
    print(
        f"indexed {report.token_occurrences} token occurrences from {report.documents} documents"
        f" into levels {levels} at {args.out}"
        + (f" ({report.malformed} malformed skipped)" if report.malformed else ""),
        file=sys.stderr,
    )
    return 0


def _cmd_lookup(args, parser) -> int:
    encoder = _encoder_from_args(args)
    indexes = load_index_dir(args.index, encoder=encoder)
    if args.k not in indexes:
        raise ToolkitError(f"no index for level {args.k} in {args.index}")
    params = LookupParams(k=args.k, d=args.d, case_sensitive=args.case_sensitive, min_count=args.min_count)
    result = qry.lookup(indexes[args.k], args.token, params)
    _emit(
        result.as_dict(),
        args.format,
        lambda p: [(m["raw"], m["count"], m["distance"]) for m in p["members"]],
    )
    return 0


def _cmd_normalize(args, parser) -> int:
    encoder = _encoder_from_args(args)
    text = _read_text_arg(args, parser)
    words = norm.load_wordlist(args.dict)
    dictionary, _ = norm.build_dictionary(words, levels=[args.k], encoder=encoder, source=args.dict)
    scorer = norm.NGramModel.load(args.model)
    result = norm.normalize_text(text, dictionary, scorer, k=args.k, d=args.d, top_n=args.top_n)
    _emit(result.as_dict(), args.format, lambda p: [(p["output_text"],)])
    return 0


def _cmd_perturb(args, parser) -> int:
    encoder = _encoder_from_args(args)
    text = _read_text_arg(args, parser)
    seed = _require_seed(args, parser)
    indexes = load_index_dir(args.index, encoder=encoder)
    if args.k not in indexes:
        raise ToolkitError(f"no index for level {args.k} in {args.index}")
    req = pert.PerturbRequest(
        ratio=args.ratio,
        seed=seed,
        case_sensitive=args.case_sensitive,
        lookup=LookupParams(k=args.k, d=args.d, case_sensitive=args.case_sensitive),
    )
    result = pert.perturb_text(text, indexes[args.k], req)
    _emit(result.as_dict(), args.format, lambda p: [(p["output_text"],)])
    return 0


def _require_seed(args, parser) -> int:
    if args.seed is not None:
        return args.seed
    if getattr(args, "format", None) == "json":
        parser.error("--seed is required with --format json (reproducibility contract)")
    seed = secrets.randbits(63)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _cmd_perturb_corpus(args, parser) -> int:
    encoder = _encoder_from_args(args)
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    if args.seed is None:
        print(f"seed: {seed}", file=sys.stderr)
    indexes = load_index_dir(args.index, encoder=encoder)
    if args.k not in indexes:
        raise ToolkitError(f"no index for level {args.k} in {args.index}")
    req = pert.PerturbRequest(
        ratio=args.ratio,
        seed=seed,
        case_sensitive=args.case_sensitive,
        lookup=LookupParams(k=args.k, d=args.d, case_sensitive=args.case_sensitive),
    )
    docs = list(read_documents([args.infile], on_error=lambda *_: None))
    result = pert.perturb_corpus(docs, indexes[args.k], req)
    with open(args.out, "w", encoding="utf-8") as handle:
        for doc in result.documents:
            handle.write(json.dumps({"id": doc.doc_id, "text": doc.text}, ensure_ascii=False) + "\n")
    with open(args.manifest, "w", encoding="utf-8") as handle:
        for row in result.manifest:
            handle.write(json.dumps(row.as_dict(), ensure_ascii=False) + "\n")
    print(
        f"perturbed {result.achieved}/{result.word_tokens} word tokens across {len(result.documents)} documents"
        f" (aggregate ratio {result.aggregate_ratio:.4f}, generator {result.generator}, seed {seed})",
        file=sys.stderr,
    )
    return 0


def _cmd_timeline(args, parser) -> int:
    encoder = _encoder_from_args(args)
    indexes = load_index_dir(args.index, encoder=encoder)
    if args.k not in indexes:
        raise ToolkitError(f"no index for level {args.k} in {args.index}")
    lexicon = analytics.load_lexicon(args.lexicon) if args.lexicon else None
    docs = read_documents(args.corpus, on_error=lambda *_: None)
    tq = analytics.TimelineQuery(
        word=args.word,
        start=parse_timestamp(getattr(args, "from")),
        end=parse_timestamp(args.to),
        granularity=args.granularity,
        lookup=LookupParams(k=args.k, d=args.d),
    )
    series = analytics.build_timeline(docs, indexes[args.k], tq, lexicon)

    def rows(payload):
        for bucket in payload["buckets"]:
            counts = ",".join(f"{v}={n}" for v, n in sorted(bucket["counts"].items()))
            sentiment = "" if bucket["mean_sentiment"] is None else f"{bucket['mean_sentiment']:.4f}"
            yield (bucket["bucket_start"], bucket["total"], counts, sentiment)

    _emit(series.as_dict(), args.format, rows)
    return 0


def _cmd_train_lm(args, parser) -> int:
    docs = read_documents(args.corpus, on_error=lambda *_: None)
    model = norm.train_ngram(docs, order=args.order, alpha=args.alpha)
    model.save(args.out)
    print(f"trained order-{args.order} model ({len(model.vocab)} vocabulary) -> {args.out}", file=sys.stderr)
    return 0


def _cmd_serve(args, parser) -> int:
    serve(load_api_config(args.config))
    return 0


def _cmd_watch(args, parser) -> int:
    import time as _time

    encoder = _encoder_from_args(args)
    levels = [int(part) for part in args.levels.split(",") if part.strip() != ""]
    while True:
        report = watch_folder(args.corpus_dir, args.index, levels=levels, encoder=encoder)
        if report.documents or report.malformed:
            print(
                f"ingested {report.token_occurrences} token occurrences from {report.documents} new documents",
                file=sys.stderr,
            )
        if args.once:
            return 0
        _time.sleep(args.interval)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cryptext", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("tsv", "json"), default="tsv", help="output format")

    def add_kd(p):
        p.add_argument("--k", type=int, default=1, help="phonetic level")
        p.add_argument("--d", type=int, default=3, help="Levenshtein bound")

    def add_encoder(p):
        p.add_argument("--encoder-config", help="encoder config file (defaults to built-in rules)")

    p = sub.add_parser("build-index", help="tokenize corpora and build phonetic indexes")
    p.add_argument("--corpus", nargs="+", required=True, help="corpus files (plain lines or JSON records)")
    p.add_argument("--levels", default="0,1,2", help="comma-separated phonetic levels")
    p.add_argument("--out", required=True, help="output directory for k<level>.idx files")
    add_encoder(p)
    p.set_defaults(func=_cmd_build_index)

    p = sub.add_parser("lookup", help="perturbation set of a token")
    p.add_argument("token")
    p.add_argument("--index", required=True, help="index directory")
    add_kd(p)
    p.add_argument("--case-sensitive", action="store_true")
    p.add_argument("--min-count", type=int, default=1)
    add_encoder(p)
    add_format(p)
    p.set_defaults(func=_cmd_lookup)

    p = sub.add_parser("normalize", help="de-perturb a text")
    p.add_argument("--text", help="literal input text")
    p.add_argument("--in", dest="infile", help="input text file")
    p.add_argument("--dict", required=True, help="wordlist file")
    p.add_argument("--model", required=True, help="trained language model file")
    add_kd(p)
    p.add_argument("--top-n", type=int, default=5)
    add_encoder(p)
    add_format(p)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("perturb", help="rewrite a text with indexed perturbations")
    p.add_argument("--text", help="literal input text")
    p.add_argument("--in", dest="infile", help="input text file")
    p.add_argument("--index", required=True)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--case-sensitive", action="store_true")
    add_kd(p)
    add_encoder(p)
    add_format(p)
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("perturb-corpus", help="perturb every document of a corpus file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="perturbed corpus (JSON records)")
    p.add_argument("--manifest", required=True, help="manifest output (JSON records)")
    p.add_argument("--index", required=True)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--case-sensitive", action="store_true")
    add_kd(p)
    add_encoder(p)
    p.set_defaults(func=_cmd_perturb_corpus)

    p = sub.add_parser("timeline", help="frequency/sentiment timeline of a word's perturbations")
    p.add_argument("--word", required=True)
    p.add_argument("--corpus", nargs="+", required=True, help="timestamped corpus files (JSON records)")
    p.add_argument("--index", required=True)
    p.add_argument("--from", required=True, help="range start (RFC 3339)")
    p.add_argument("--to", required=True, help="range end, exclusive (RFC 3339)")
    p.add_argument("--granularity", choices=analytics.GRANULARITIES, default="day")
    p.add_argument("--lexicon", help="sentiment lexicon file (word<TAB>valence)")
    add_kd(p)
    add_encoder(p)
    add_format(p)
    p.set_defaults(func=_cmd_timeline)

    p = sub.add_parser("train-lm", help="train the default n-gram coherency scorer")
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_lm)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True, help="key=value service config file")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("watch", help="re-ingest new corpus files from a folder into the index")
    p.add_argument("--corpus-dir", required=True, help="folder to watch for corpus files")
    p.add_argument("--index", required=True, help="index directory to update in place")
    p.add_argument("--levels", default="0,1,2")
    p.add_argument("--interval", type=float, default=10.0, help="poll interval in seconds")
    p.add_argument("--once", action="store_true", help="run a single sweep and exit")
    add_encoder(p)
    p.set_defaults(func=_cmd_watch)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except ToolkitError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: FileNotFound: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
