"""Command-line entry point: one subcommand per pipeline stage.

Stages talk to each other only through files, so any stage can be re-run
in isolation (QA generation is the expensive one). All randomness flows
from --seed; identical inputs plus identical seed give identical bytes.

    fusionkit ingest --source arxiv=papers/ --out work/
    fusionkit generate --in work/documents.jsonl --mock mock.json --out work/
    fusionkit assemble --in work/records.jsonl --budget 100000 --seed 7 --out work/corpus
    fusionkit export-train --in work/corpus --seed 7 --out work/splits
    fusionkit assess --mock mock.json --judge-mock judge.json --seed 7 --out work/run
    fusionkit report --run work/run --out work/run
    fusionkit serve --mock mock.json --port 8080
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import assessment, corpus, cot_prompting, ingest, qagen
from .errors import FusionKitError
from .llm_client import ChatClient, client_from_config

MAX_SEED = 2**64 - 1


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _client_from_args(args, cfg: dict) -> ChatClient:
    client_cfg = dict(cfg.get("client", {}))
    if getattr(args, "mock", None):
        client_cfg["mock_script"] = args.mock
    return client_from_config(client_cfg)


def _effective_jobs(args, client: ChatClient | None) -> int:
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    if client is not None and client.max_in_flight:
        jobs = min(jobs, client.max_in_flight)
    return max(jobs, 1)


def _stage_error(exc: Exception) -> int:
    line = json.dumps({"error": type(exc).__name__, "detail": str(exc)}, ensure_ascii=False)
    print(line, file=sys.stderr)
    return 1


def _out_dir(args, cfg: dict) -> Path:
    out = args.out or cfg.get("out_dir")
    if not out:
        raise FusionKitError("no output directory: pass --out or set out_dir in config")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_ingest(args) -> int:
    cfg = _load_config(args.config)
    sources: dict[str, str] = dict(cfg.get("sources", {}))
    for spec in args.source or []:
        kind, _, path = spec.partition("=")
        if not path:
            raise FusionKitError(f"--source wants KIND=PATH, got {spec!r}")
        sources[kind] = path
    if not sources:
        raise FusionKitError("no sources: pass --source KIND=PATH or set sources in config")
    out = _out_dir(args, cfg)
    docs = []
    per_kind: dict[str, int] = {}
    for kind in sorted(sources):
        count = 0
        for doc in ingest.load_source(sources[kind], kind):
            docs.append(doc)
            count += 1
        per_kind[kind] = count
    out_path = out / "documents.jsonl"
    ingest.write_documents(docs, out_path)
    print(json.dumps({"documents": len(docs), "per_source": per_kind}, ensure_ascii=False))
    return 0


def cmd_generate(args) -> int:
    cfg = _load_config(args.config)
    client = _client_from_args(args, cfg)
    jobs = _effective_jobs(args, client)
    chunk_cfg = cfg.get("chunking", {})
    max_units = args.max_units or chunk_cfg.get("max_units", 2000)
    overlap = args.overlap if args.overlap is not None else chunk_cfg.get("overlap", 200)
    out = _out_dir(args, cfg)

    docs = ingest.read_documents(args.input)
    chunks = []
    chunk_sources = []
    for doc in docs:
        for ch in ingest.chunk_document(doc, max_units=max_units, overlap=overlap):
            chunks.append(ch)
            chunk_sources.append(doc.source)
    stats = qagen.GenStats()
    grouped = qagen.generate_many(chunks, client, jobs=jobs, stats=stats)
    records = [
        qagen.make_training_record(qa, source=source)
        for pairs, source in zip(grouped, chunk_sources)
        for qa in pairs
    ]
    if args.augment_count:
        pivot = {"zh": "en", "en": "zh"}
        augmented = []
        for record in records[: args.augment_count]:
            lang = ingest.detect_language(record.instruction)
            if lang in pivot:
                augmented.append(
                    qagen.back_translate_augment(record, pivot[lang], client)
                )
        records.extend(augmented)
    out_path = out / "records.jsonl"
    qagen.write_records(records, out_path)
    print(
        json.dumps(
            {
                "chunks": len(chunks),
                "records": len(records),
                "pairs_kept": stats.pairs_kept,
                "chunks_skipped": stats.chunks_skipped,
                "pairs_dropped_language": stats.pairs_dropped_language,
            },
            ensure_ascii=False,
        )
    )
    return 0


def _sampling_spec(args, cfg: dict) -> corpus.SamplingSpec:
    proportions = cfg.get("proportions", dict(corpus.DEFAULT_SOURCE_PROPORTIONS))
    budget = args.budget or cfg.get("budget_units", corpus.DEFAULT_BUDGET_UNITS)
    return corpus.SamplingSpec(proportions=proportions, budget_units=budget).validate()


def cmd_assemble(args) -> int:
    cfg = _load_config(args.config)
    spec = _sampling_spec(args, cfg)
    quotas = corpus.plan_sampling(spec)
    if args.dry_run:
        print(
            json.dumps(
                {
                    "budget_units": spec.budget_units,
                    "quotas": {q.source: q.units for q in quotas},
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
        return 0
    out = _out_dir(args, cfg)
    pools: dict[str, list] = {source: [] for source in ingest.SOURCES}
    with open(args.input, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = qagen.record_from_json(line)
            if record.source not in pools:
                raise FusionKitError(f"line {line_no}: unknown source {record.source!r}")
            pools[record.source].append(record)
    built = corpus.assemble_corpus(
        pools,
        quotas,
        seed=args.seed,
        base_model=cfg.get("base_model", corpus.DEFAULT_BASE_MODEL),
        creation_params={"proportions": spec.proportions},
    )
    dataset_path, manifest_path = corpus.export_corpus(built, out)
    print(
        json.dumps(
            {
                "dataset": dataset_path.name,
                "manifest": manifest_path.name,
                "record_count": built.manifest["record_count"],
                "achieved": built.manifest["achieved"],
                "shortfalls": built.manifest["shortfalls"],
            },
            ensure_ascii=False,
            sort_keys=True,
        )
    )
    return 0


def cmd_export_train(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args, cfg)
    built = corpus.import_corpus(args.input)
    train, val = corpus.split_train_val(built, val_ratio=args.val_ratio, seed=args.seed)
    train_path = out / "train.jsonl"
    val_path = out / "val.jsonl"
    qagen.write_records(train, train_path)
    qagen.write_records(val, val_path)
    print(
        json.dumps(
            {"train": len(train), "val": len(val), "total": len(built.records)},
            ensure_ascii=False,
        )
    )
    return 0


def cmd_assess(args) -> int:
    cfg = _load_config(args.config)
    client = _client_from_args(args, cfg)
    cot_cfg = cot_prompting.load_cot_config(args.cot_config or cfg.get("cot_config_path"))
    items = assessment.load_questionnaire(args.questionnaire)
    if args.limit:
        items = items[: args.limit]
    out = _out_dir(args, cfg)
    run_id = args.run_id or f"run-{args.seed}"
    transcripts = assessment.run_assessment(
        items,
        client,
        cot_cfg,
        cot_enabled=not args.no_cot,
        resume_dir=out,
        backend_id=args.backend_id,
        run_id=run_id,
    )
    summary = {
        "run_id": run_id,
        "items": len(items),
        "ok": sum(1 for t in transcripts if t.status == "ok"),
        "failed": sum(1 for t in transcripts if t.status == "failed"),
    }
    if args.judge_mock:
        judge_client = client_from_config({"mock_script": args.judge_mock})
        judged = list(assessment.load_judgments(out))
        done = {(j.item_id, j.backend_id, j.cot_enabled) for j in judged}
        for t in transcripts:
            if t.status != "ok":
                continue
            if (t.item_id, t.backend_id, t.cot_enabled) in done:
                continue
            judged.append(assessment.judge_transcript(t, assessment.DEFAULT_RUBRIC, judge_client))
        assessment.write_judgments(out, judged)
        summary["judged"] = len(judged)
    print(json.dumps(summary, ensure_ascii=False))
    return 0


def cmd_report(args) -> int:
    run_dir = Path(args.run)
    transcripts = assessment.load_transcripts(run_dir)
    if not transcripts:
        raise FusionKitError(f"no transcripts under {run_dir}")
    judged = assessment.load_judgments(run_dir)
    items = assessment.load_questionnaire(args.questionnaire)
    excerpt_ids = [s for s in (args.excerpts or "").split(",") if s]
    markdown, summary = assessment.build_report(
        transcripts, judged, items, excerpt_item_ids=excerpt_ids or None
    )
    out = Path(args.out) if args.out else run_dir
    out.mkdir(parents=True, exist_ok=True)
    md_path, json_path = assessment.write_report(out, markdown, summary)
    print(json.dumps({"report_md": md_path.name, "report_json": json_path.name}))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .gateway import app_from_config, create_app

    if args.gateway_config:
        app, settings = app_from_config(args.gateway_config)
        listen = settings.get("listen_addr", "127.0.0.1:8080")
        host, _, port = listen.partition(":")
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080))
        return 0
    cfg = _load_config(args.config)
    client = _client_from_args(args, cfg)
    cot_cfg = cot_prompting.load_cot_config(args.cot_config or cfg.get("cot_config_path"))
    app = create_app(
        client,
        cot_cfg,
        model_id=cfg.get("client", {}).get("model_id", ""),
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _seed(value: str) -> int:
    seed = int(value)
    if not (0 <= seed <= MAX_SEED):
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fusionkit", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config; flags override it")
    common.add_argument("--seed", type=_seed, default=0, help="seed for all randomness")
    common.add_argument("--jobs", type=int, default=0, help="worker count (default: CPUs)")
    common.add_argument("--out", help="output directory")

    p = sub.add_parser("ingest", parents=[common], help="read raw sources into documents.jsonl")
    p.add_argument("--source", action="append", metavar="KIND=PATH")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("generate", parents=[common], help="synthesize QA records from documents")
    p.add_argument("--in", dest="input", required=True, help="documents.jsonl from ingest")
    p.add_argument("--mock", help="mock backend script (JSON)")
    p.add_argument("--max-units", type=int, default=0)
    p.add_argument("--overlap", type=int, default=None)
    p.add_argument("--augment-count", type=int, default=0,
                   help="back-translate this many records as augmented copies")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("assemble", parents=[common], help="apportion and dedup into a dataset")
    p.add_argument("--in", dest="input", help="records.jsonl from generate")
    p.add_argument("--budget", type=int, default=0, help="total unit budget")
    p.add_argument("--dry-run", action="store_true", help="print quotas and exit")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("export-train", parents=[common], help="split a dataset into train/val")
    p.add_argument("--in", dest="input", required=True, help="directory with dataset.jsonl + manifest.json")
    p.add_argument("--val-ratio", type=float, default=0.02)
    p.set_defaults(func=cmd_export_train)

    p = sub.add_parser("assess", parents=[common], help="run the questionnaire against a backend")
    p.add_argument("--questionnaire", help="items JSONL (default: shipped 184-item bank)")
    p.add_argument("--mock", help="mock backend script (JSON)")
    p.add_argument("--judge-mock", help="mock judge script; judges ok transcripts when set")
    p.add_argument("--cot-config", help="CoT config JSON (default: shipped)")
    p.add_argument("--no-cot", action="store_true", help="send bare questions")
    p.add_argument("--backend-id", default="default")
    p.add_argument("--run-id", help="default: run-<seed>")
    p.add_argument("--limit", type=int, default=0, help="only run the first N items")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("report", parents=[common], help="aggregate a run directory into a report")
    p.add_argument("--run", required=True, help="run directory with transcripts.jsonl")
    p.add_argument("--questionnaire", help="items JSONL (default: shipped)")
    p.add_argument("--excerpts", help="comma-separated item ids to excerpt")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", parents=[common], help="start the chat gateway")
    p.add_argument("--gateway-config", help="gateway settings JSON")
    p.add_argument("--mock", help="mock backend script (JSON)")
    p.add_argument("--cot-config", help="CoT config JSON (default: shipped)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui", help="static directory to mount at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FusionKitError as exc:
        return _stage_error(exc)
    except OSError as exc:
        return _stage_error(exc)
    except ValueError as exc:
        return _stage_error(exc)


if __name__ == "__main__":
    sys.exit(main())
