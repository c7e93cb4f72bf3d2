"""Budgeted, proportioned, deduplicated corpus assembly and dataset export.

Quotas come from largest-remainder apportionment of a unit budget over the
five-source sampling proportions; assembly takes records per source in pool
order until the quota is crossed (the crossing record is included, biasing
achieved units slightly above quota rather than below). The final ordering
is a deterministic shuffle keyed by the run seed.
"""

from __future__ import annotations

import json
import math
import random
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidSpec, IoError, SchemaViolation
from .ingest import SOURCES
from .qagen import TrainingRecord, record_to_json
from .textunits import approx_token_count  # re-exported: the budget's counting rule

__all__ = [
    "SamplingSpec", "Quota", "Corpus", "DEFAULT_SOURCE_PROPORTIONS", "DEFAULT_BUDGET_UNITS",
    "approx_token_count", "plan_sampling", "dedup_records", "dedup_key",
    "assemble_corpus", "export_corpus", "import_corpus", "record_from_obj",
    "split_train_val",
]

# Sampling proportions of the five training-data sources.
DEFAULT_SOURCE_PROPORTIONS = {
    "commoncrawl": 0.73,
    "cnki": 0.04,
    "ebooks": 0.03,
    "arxiv": 0.10,
    "dissertation": 0.10,
}

# Desk-scale default; the production-scale corpus (hundreds of millions of
# units) is declared in the manifest, not reproduced here.
DEFAULT_BUDGET_UNITS = 100_000

DEFAULT_BASE_MODEL = "Qwen2.5-14B"

_KEY_SEPARATOR = "␟"


@dataclass
class SamplingSpec:
    proportions: dict[str, float]
    budget_units: int

    def validate(self) -> "SamplingSpec":
        if set(self.proportions) != set(SOURCES):
            raise InvalidSpec(
                f"proportions must cover exactly {sorted(SOURCES)}, got {sorted(self.proportions)}"
            )
        for source, fraction in self.proportions.items():
            if not (0.0 <= fraction <= 1.0):
                raise InvalidSpec(f"fraction for {source} out of [0,1]: {fraction}")
        total = sum(self.proportions.values())
        if abs(total - 1.0) > 1e-9:
            raise InvalidSpec(f"fractions sum to {total!r}, expected 1 within 1e-9")
        if self.budget_units < 0:
            raise InvalidSpec(f"negative budget: {self.budget_units}")
        return self


@dataclass
class Quota:
    source: str
    units: int


@dataclass
class Corpus:
    records: list[TrainingRecord]
    manifest: dict


def plan_sampling(spec: SamplingSpec) -> list[Quota]:
    """Largest-remainder apportionment of the budget over the proportions.

    Quotas sum to the budget exactly and each differs from
    budget * proportion by less than one unit. Remainder ties break on
    source-name lexicographic order.
    """
    spec.validate()
    raw = {s: spec.budget_units * spec.proportions[s] for s in SOURCES}
    floors = {s: math.floor(raw[s]) for s in SOURCES}
    leftover = spec.budget_units - sum(floors.values())
    by_remainder = sorted(SOURCES, key=lambda s: (-(raw[s] - floors[s]), s))
    for s in by_remainder[:leftover]:
        floors[s] += 1
    return [Quota(source=s, units=floors[s]) for s in SOURCES]


def _normalize_key_part(text: str) -> str:
    return "".join(
        ch.lower()
        for ch in text
        if not ch.isspace() and not unicodedata.category(ch).startswith("P")
    )


def dedup_key(record: TrainingRecord) -> str:
    return _normalize_key_part(record.instruction) + _KEY_SEPARATOR + _normalize_key_part(record.output)


def dedup_records(records: list[TrainingRecord]) -> list[TrainingRecord]:
    """Drop records repeating a (normalized instruction, output) key; first wins."""
    seen: set[str] = set()
    kept: list[TrainingRecord] = []
    for rec in records:
        key = dedup_key(rec)
        if key in seen:
            continue
        seen.add(key)
        kept.append(rec)
    return kept


def assemble_corpus(
    pools: dict[str, list[TrainingRecord]],
    quotas: list[Quota],
    seed: int,
    base_model: str = DEFAULT_BASE_MODEL,
    creation_params: dict | None = None,
) -> Corpus:
    """Fill each source's quota from its pool in order, then shuffle by seed.

    The record crossing the quota is included. A pool exhausting below quota
    records a shortfall in the manifest (a warning state, not an error).
    Records whose dedup key was already taken are skipped so the corpus-wide
    uniqueness invariant holds even for pools deduplicated only per source.
    """
    quota_by_source = {q.source: q.units for q in quotas}
    selected: list[TrainingRecord] = []
    achieved: dict[str, int] = {}
    shortfalls: dict[str, int] = {}
    seen: set[str] = set()
    for source in SOURCES:
        quota = quota_by_source.get(source, 0)
        cumulative = 0
        for rec in pools.get(source, []):
            if cumulative >= quota:
                break
            key = dedup_key(rec)
            if key in seen:
                continue
            seen.add(key)
            selected.append(rec)
            cumulative += rec.unit_count
        achieved[source] = cumulative
        shortfalls[source] = max(0, quota - cumulative)
    rng = random.Random(seed)
    rng.shuffle(selected)
    manifest = {
        "base_model": base_model,
        "seed": seed,
        "budget_units": sum(quota_by_source.values()),
        "quotas": {s: quota_by_source.get(s, 0) for s in SOURCES},
        "achieved": achieved,
        "shortfalls": shortfalls,
        "record_count": len(selected),
        "creation_params": creation_params or {},
    }
    return Corpus(records=selected, manifest=manifest)


_RECORD_FIELDS = ("instruction", "input", "output", "system", "history")
_META_FIELDS = ("source", "unit_count", "augmented", "doc_id", "chunk_index")


def record_from_obj(obj: dict) -> TrainingRecord:
    """Validate one dataset row against the five-field schema."""
    if not isinstance(obj, dict):
        raise SchemaViolation(f"record must be an object, got {type(obj).__name__}")
    unexpected = set(obj) - set(_RECORD_FIELDS) - {"meta"}
    if unexpected:
        raise SchemaViolation(f"unexpected record fields: {sorted(unexpected)}")
    for name in _RECORD_FIELDS:
        if name not in obj:
            raise SchemaViolation(f"record missing field {name!r}")
    for name in ("instruction", "input", "output", "system"):
        if not isinstance(obj[name], str):
            raise SchemaViolation(f"field {name!r} must be a string")
    if not obj["instruction"].strip():
        raise SchemaViolation("instruction must be non-empty")
    if not obj["output"].strip():
        raise SchemaViolation("output must be non-empty")
    if not isinstance(obj["history"], list):
        raise SchemaViolation("history must be a list of [question, answer] pairs")
    history: list[tuple[str, str]] = []
    for turn in obj["history"]:
        if not (isinstance(turn, (list, tuple)) and len(turn) == 2):
            raise SchemaViolation(f"bad history turn: {turn!r}")
        history.append((str(turn[0]), str(turn[1])))
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaViolation("meta must be an object")
    unexpected_meta = set(meta) - set(_META_FIELDS)
    if unexpected_meta:
        raise SchemaViolation(f"unexpected meta fields: {sorted(unexpected_meta)}")
    if "source" in meta and meta["source"] not in SOURCES:
        raise SchemaViolation(f"meta.source must be one of {SOURCES}, got {meta.get('source')!r}")
    return TrainingRecord(
        instruction=obj["instruction"],
        input=obj["input"],
        output=obj["output"],
        system=obj["system"],
        history=history,
        source=meta.get("source", ""),
        unit_count=int(meta.get("unit_count", 0)),
        augmented=bool(meta.get("augmented", False)),
        doc_id=meta.get("doc_id", ""),
        chunk_index=int(meta.get("chunk_index", 0)),
    )


def export_corpus(corpus: Corpus, out_dir: str | Path) -> tuple[Path, Path]:
    """Write dataset.jsonl plus a manifest.json sidecar; returns both paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        dataset_path = out / "dataset.jsonl"
        manifest_path = out / "manifest.json"
        with open(dataset_path, "w", encoding="utf-8") as fh:
            for rec in corpus.records:
                fh.write(record_to_json(rec) + "\n")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(corpus.manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"export failed: {exc}") from exc
    return dataset_path, manifest_path


def import_corpus(out_dir: str | Path) -> Corpus:
    out = Path(out_dir)
    dataset_path = out / "dataset.jsonl"
    manifest_path = out / "manifest.json"
    if not dataset_path.exists() or not manifest_path.exists():
        raise IoError(f"missing dataset.jsonl or manifest.json in {out}")
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except ValueError as exc:
        raise SchemaViolation(f"manifest is not valid JSON: {exc}") from exc
    records: list[TrainingRecord] = []
    with open(dataset_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError as exc:
                raise SchemaViolation(f"line {line_no}: invalid JSON: {exc}") from exc
            try:
                records.append(record_from_obj(obj))
            except SchemaViolation as exc:
                raise SchemaViolation(f"line {line_no}: {exc}") from exc
    if manifest.get("record_count") != len(records):
        raise SchemaViolation(
            f"manifest record_count {manifest.get('record_count')} != dataset lines {len(records)}"
        )
    return Corpus(records=records, manifest=manifest)


def split_train_val(corpus: Corpus, val_ratio: float, seed: int) -> tuple[list[TrainingRecord], list[TrainingRecord]]:
    """Deterministic split; val takes the configured fraction, rounded down."""
    if not (0.0 <= val_ratio < 1.0):
        raise InvalidSpec(f"val_ratio out of [0,1): {val_ratio}")
    indices = list(range(len(corpus.records)))
    random.Random(seed).shuffle(indices)
    n_val = int(len(indices) * val_ratio)
    val_idx = set(indices[:n_val])
    train = [rec for i, rec in enumerate(corpus.records) if i not in val_idx]
    val = [rec for i, rec in enumerate(corpus.records) if i in val_idx]
    return train, val
