"""Command-line pipeline: dedup -> extract -> match -> eval.

Each stage is file-in/file-out and fully determined by the event config,
so runs are reproducible byte for byte.  Exit codes: 0 success, 1 usage
error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import annotations, corpus, evaluation, extraction, geo, lexicons, matching
from .config import EventConfig, load_config
from .embeddings import load_vectors

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_VECTOR_ROLES = {
    "local": "vectors_local",
    "pretrained_crisis": "vectors_crisis",
    "pretrained_general": "vectors_general",
    "paraphrase": "vectors_paraphrase",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class DataError(Exception):
    pass


def _load_cfg(args) -> EventConfig:
    if not args.config:
        return EventConfig()
    path = Path(args.config)
    if not path.is_file():
        raise DataError(f"config file not found: {path}")
    return load_config(path)


def _resolve(cfg: EventConfig, role: str, base: Path) -> Path | None:
    return cfg.path(role, base)


def _build_lexicons(cfg: EventConfig, base: Path):
    lex_dir = _resolve(cfg, "lexicon_dir", base)
    try:
        return lexicons.load_lexicons(lex_dir)
    except (OSError, ValueError, FileNotFoundError) as exc:
        raise DataError(f"cannot load lexicons: {exc}") from exc


def _build_gazetteer(cfg: EventConfig, base: Path) -> geo.Gazetteer:
    fixture = _resolve(cfg, "gazetteer", base)
    if fixture is not None and not fixture.is_file():
        raise DataError(f"gazetteer fixture not found: {fixture}")
    cache = _resolve(cfg, "gazetteer_cache", base)
    coarse = geo.http_fetcher(cfg.gazetteer_coarse_url) if cfg.gazetteer_coarse_url else None
    fine = geo.http_fetcher(cfg.gazetteer_fine_url) if cfg.gazetteer_fine_url else None
    return geo.Gazetteer(
        fixture_path=fixture,
        cache_path=cache,
        box=cfg.bounding_box,
        coarse_fetch=coarse,
        fine_fetch=fine,
        min_interval_s=cfg.gazetteer_min_interval_s,
    )


def run_dedup(args) -> int:
    cfg = _load_cfg(args)
    base = Path(args.config).parent if args.config else Path.cwd()
    if not Path(args.input).is_file():
        raise DataError(f"input file not found: {args.input}")
    lex, _ = _build_lexicons(cfg, base)
    result = corpus.ingest(args.input)
    pre = [corpus.preprocess(t, lex.stopwords) for t in result.tweets]
    keep = set(corpus.deduplicate(pre, cfg.dedup_threshold))
    retained = [t for t in result.tweets if t.id in keep]
    corpus.write_tweets(retained, args.output)
    print(
        f"dedup: {len(result.tweets)} in, {len(retained)} out, "
        f"{len(result.tweets) - len(retained)} discarded, "
        f"{result.skipped} malformed lines skipped"
    )
    return EXIT_OK


def _fill_rates(records) -> dict[str, float]:
    n = max(1, len(records))
    return {
        "resource": sum(1 for r in records if r.resources) / n,
        "location": sum(1 for r in records if r.locations) / n,
        "quantity": sum(1 for r in records if any(m.quantity is not None for m in r.resources))
        / n,
        "source": sum(1 for r in records if r.sources) / n,
        "contact": sum(1 for r in records if r.contacts) / n,
    }


def run_extract(args) -> int:
    cfg = _load_cfg(args)
    base = Path(args.config).parent if args.config else Path.cwd()
    if not Path(args.input).is_file():
        raise DataError(f"input file not found: {args.input}")
    lex, oracle = _build_lexicons(cfg, base)
    gaz = _build_gazetteer(cfg, base)
    try:
        bundles = annotations.load_annotated(args.input)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    records = [
        extraction.extract_record(
            b,
            lex,
            oracle,
            gaz,
            mode=args.mode,
            dependency_distance_max=cfg.dependency_distance_max,
            jw_threshold=cfg.jw_threshold,
            quantity_window=cfg.quantity_window,
        )
        for b in bundles
    ]
    extraction.write_records(records, args.output)
    fallbacks = sum(1 for r in records if r.method != args.mode)
    print(f"extract: {len(records)} records written ({args.mode} mode, {fallbacks} fallbacks)")
    for name, rate in _fill_rates(records).items():
        print(f"  {name:<9} filled in {rate:6.1%} of records")
    return EXIT_OK


def _load_context(cfg: EventConfig, base: Path, method: str, lex) -> matching.MatchContext:
    ctx = matching.MatchContext(box=cfg.bounding_box, stopwords=lex.stopwords)
    flavor = matching._METHOD_FLAVOR.get(method)
    if flavor is not None:
        path = _resolve(cfg, _VECTOR_ROLES[flavor], base)
        if path is None or not path.is_file():
            raise DataError(
                f"method {method} unavailable: no {flavor} vector file configured"
            )
        ctx.tables[flavor] = load_vectors(path, flavor)
    if method in ("B1", "B2", "B3", "B4a", "B4b", "B4c"):
        annotated = _resolve(cfg, "annotated", base)
        if annotated is None or not annotated.is_file():
            raise DataError(f"method {method} needs the annotated corpus path in the config")
        bundles = annotations.load_annotated(annotated)
        ctx.bundles = {b.tweet_id: b for b in bundles}
        ctx.stats = matching.CorpusStats.from_bundles(bundles, lex.stopwords)
    return ctx


def run_match(args) -> int:
    cfg = _load_cfg(args)
    base = Path(args.config).parent if args.config else Path.cwd()
    method = args.method or cfg.method
    for p in (args.needs, args.avails):
        if not Path(p).is_file():
            raise DataError(f"records file not found: {p}")
    lex, _ = _build_lexicons(cfg, base)
    needs = extraction.load_records(args.needs)
    avails = extraction.load_records(args.avails)
    mcfg = matching.MethodConfig(
        method=method,
        k=args.k or cfg.k,
        resource_weight=cfg.resource_weight,
        proximity_weight=cfg.proximity_weight,
    )
    try:
        ctx = _load_context(cfg, base, method, lex)
    except DataError as exc:
        if "unavailable" in str(exc):
            print(str(exc))
            return EXIT_OK
        raise
    results = matching.rank_all(needs, avails, mcfg, ctx)
    skipped = sum(1 for r in results if r.note)
    with open(args.output, "w", encoding="utf-8") as fh:
        for res in results:
            if res.note:
                continue
            fh.write(
                json.dumps(
                    {
                        "need_id": res.need_id,
                        "method": res.method,
                        "ranked": [
                            {
                                "avail_id": a,
                                "total": t,
                                "resource": r,
                                "proximity": p,
                            }
                            for a, t, r, p in res.ranked
                        ],
                    }
                )
                + "\n"
            )
    tsv_path = Path(args.output).with_suffix(".tsv")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("need_id\trank\tavail_id\ttotal\tresource\tproximity\n")
        for res in results:
            for pos, (a, t, r, p) in enumerate(res.ranked, 1):
                prox = "" if p is None else f"{p:.4f}"
                fh.write(f"{res.need_id}\t{pos}\t{a}\t{t:.4f}\t{r:.4f}\t{prox}\n")
    empty = sum(1 for r in results if not r.ranked and not r.note)
    print(
        f"match[{method}]: {len(results) - skipped} needs ranked "
        f"({skipped} skipped, {empty} with no eligible availability), report -> {args.output}"
    )
    if method == "combined" and empty == len(results):
        print("warning: no located need/availability pairs; combined report is empty")
    return EXIT_OK


def run_eval(args) -> int:
    cfg = _load_cfg(args)
    for p in (args.report, args.judgments):
        if not Path(p).is_file():
            raise DataError(f"file not found: {p}")
    try:
        judgments = evaluation.load_judgments(args.judgments)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    if not judgments:
        raise DataError(f"judgments file {args.judgments} is empty")
    results = []
    with open(args.report, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            results.append(
                matching.MatchResult(
                    need_id=obj["need_id"],
                    method=obj.get("method", cfg.method),
                    ranked=[
                        (r["avail_id"], r["total"], r.get("resource", 0.0), r.get("proximity"))
                        for r in obj.get("ranked", [])
                    ],
                )
            )
    if not results:
        raise DataError(f"report {args.report} holds no results")
    report = evaluation.evaluate(results, judgments)
    if args.output:
        Path(args.output).write_text(report.to_json() + "\n", encoding="utf-8")
    print(report.table())
    return EXIT_OK


def run_pipeline(args) -> int:
    cfg = _load_cfg(args)
    base = Path(args.config).parent if args.config else Path.cwd()
    annotated = _resolve(cfg, "annotated", base)
    if annotated is None or not annotated.is_file():
        raise DataError("pipeline needs paths.annotated in the config")
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    lex, oracle = _build_lexicons(cfg, base)
    gaz = _build_gazetteer(cfg, base)
    bundles = annotations.load_annotated(annotated)

    pre = [
        corpus.PreprocessedTweet(b.tweet_id, b.clean_text, corpus.dedup_bag(b.clean_text, lex.stopwords))
        for b in bundles
    ]
    keep = set(corpus.deduplicate(pre, cfg.dedup_threshold))
    bundles = [b for b in bundles if b.tweet_id in keep]
    print(f"pipeline: {len(pre)} tweets, {len(bundles)} after dedup")

    records = [
        extraction.extract_record(
            b,
            lex,
            oracle,
            gaz,
            mode=args.mode,
            dependency_distance_max=cfg.dependency_distance_max,
            jw_threshold=cfg.jw_threshold,
            quantity_window=cfg.quantity_window,
        )
        for b in bundles
    ]
    records_path = outdir / "records.jsonl"
    extraction.write_records(records, records_path)

    needs = [r for r in records if r.kind == "need"]
    avails = [r for r in records if r.kind == "availability"]
    if not needs or not avails:
        print("pipeline: nothing to match (missing need or availability records)")
        return EXIT_OK
    method = args.method or cfg.method
    ctx = _load_context(cfg, base, method, lex)
    ctx.bundles = {b.tweet_id: b for b in bundles}
    ctx.stats = matching.CorpusStats.from_bundles(bundles, lex.stopwords)
    mcfg = matching.MethodConfig(
        method=method,
        k=args.k or cfg.k,
        resource_weight=cfg.resource_weight,
        proximity_weight=cfg.proximity_weight,
    )
    results = matching.rank_all(needs, avails, mcfg, ctx)
    report_path = outdir / "match_report.jsonl"
    with open(report_path, "w", encoding="utf-8") as fh:
        for res in results:
            if res.note:
                continue
            fh.write(
                json.dumps(
                    {
                        "need_id": res.need_id,
                        "method": res.method,
                        "ranked": [
                            {"avail_id": a, "total": t, "resource": r, "proximity": p}
                            for a, t, r, p in res.ranked
                        ],
                    }
                )
                + "\n"
            )
    print(f"pipeline: records -> {records_path}, report -> {report_path}")

    judgments_path = _resolve(cfg, "judgments", base)
    if judgments_path and judgments_path.is_file():
        judgments = evaluation.load_judgments(judgments_path)
        if judgments:
            report = evaluation.evaluate([r for r in results if not r.note], judgments)
            (outdir / "eval.json").write_text(report.to_json() + "\n", encoding="utf-8")
            print(report.table())
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="reliefmatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dedup", help="drop near-duplicate tweets")
    p.add_argument("--config", default="")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=run_dedup)

    p = sub.add_parser("extract", help="extract records from annotated tweets")
    p.add_argument("--config", default="")
    p.add_argument("--input", required=True, help="annotated JSONL")
    p.add_argument("--output", required=True, help="records JSONL")
    p.add_argument("--mode", choices=("proposed", "baseline"), default="proposed")
    p.set_defaults(func=run_extract)

    p = sub.add_parser("match", help="rank availabilities against needs")
    p.add_argument("--config", default="")
    p.add_argument("--needs", required=True, help="need records JSONL")
    p.add_argument("--avails", required=True, help="availability records JSONL")
    p.add_argument("--method", choices=matching.METHODS, default="")
    p.add_argument("--output", required=True, help="match report JSONL (TSV twin alongside)")
    p.add_argument("--k", type=int, default=0)
    p.set_defaults(func=run_match)

    p = sub.add_parser("eval", help="score a match report against judgments")
    p.add_argument("--config", default="")
    p.add_argument("--report", required=True)
    p.add_argument("--judgments", required=True)
    p.add_argument("--output", default="")
    p.set_defaults(func=run_eval)

    p = sub.add_parser("pipeline", help="dedup + extract + match (+ eval)")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--mode", choices=("proposed", "baseline"), default="proposed")
    p.add_argument("--method", choices=matching.METHODS, default="")
    p.add_argument("--k", type=int, default=0)
    p.set_defaults(func=run_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
