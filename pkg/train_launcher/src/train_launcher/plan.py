"""Training plans: load, validate, and fully resolve before any work runs.

A plan is a small JSON file pointing at an exported dataset (JSONL, one
record per line with the fields instruction/input/output/system/history and
an optional meta object) and its manifest (JSON, carries the declared base
model among other bookkeeping). Relative paths in the plan resolve against
the plan file's own directory so a plan can travel with its artifacts.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import MissingFile, SchemaViolation

RECORD_FIELDS = ("instruction", "input", "output", "system", "history")


@dataclass
class Hyperparameters:
    """Conservative SFT defaults; every knob is overridable from the plan.

    An empty base_model_id means "use whatever the manifest declares".
    """

    learning_rate: float = 2e-5
    epochs: int = 1
    max_seq_len: int = 512
    base_model_id: str = ""
    batch_size: int = 2
    seed: int = 0

    def validate(self) -> None:
        if not (self.learning_rate > 0):
            raise SchemaViolation(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise SchemaViolation(f"epochs must be at least 1, got {self.epochs}")
        if self.max_seq_len < 8:
            raise SchemaViolation(f"max_seq_len must be at least 8, got {self.max_seq_len}")
        if self.batch_size < 1:
            raise SchemaViolation(f"batch_size must be at least 1, got {self.batch_size}")


@dataclass
class TrainPlan:
    dataset_path: Path
    manifest_path: Path
    output_dir: Path
    hparams: Hyperparameters = field(default_factory=Hyperparameters)


_PLAN_KEYS = {"dataset", "manifest", "output_dir", "hyperparameters"}


def load_plan(path: str | Path) -> TrainPlan:
    """Parse a plan file; paths are resolved relative to the plan's directory."""
    plan_path = Path(path)
    if not plan_path.exists():
        raise MissingFile(f"plan file not found: {plan_path}")
    try:
        obj = json.loads(plan_path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise SchemaViolation(f"plan is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaViolation("plan must be a JSON object")
    unexpected = set(obj) - _PLAN_KEYS
    if unexpected:
        raise SchemaViolation(f"unexpected plan keys: {sorted(unexpected)}")
    for key in ("dataset", "manifest", "output_dir"):
        if key not in obj or not isinstance(obj[key], str) or not obj[key].strip():
            raise SchemaViolation(f"plan key {key!r} must be a non-empty path string")
    raw_hp = obj.get("hyperparameters", {})
    if not isinstance(raw_hp, dict):
        raise SchemaViolation("hyperparameters must be an object")
    known = {f.name for f in fields(Hyperparameters)}
    unknown_hp = set(raw_hp) - known
    if unknown_hp:
        raise SchemaViolation(f"unknown hyperparameters: {sorted(unknown_hp)}")
    try:
        hparams = Hyperparameters(**raw_hp)
    except TypeError as exc:
        raise SchemaViolation(f"bad hyperparameters: {exc}") from exc
    for name in ("learning_rate",):
        if not isinstance(getattr(hparams, name), (int, float)):
            raise SchemaViolation(f"hyperparameter {name!r} must be a number")
    for name in ("epochs", "max_seq_len", "batch_size", "seed"):
        if not isinstance(getattr(hparams, name), int):
            raise SchemaViolation(f"hyperparameter {name!r} must be an integer")
    if not isinstance(hparams.base_model_id, str):
        raise SchemaViolation("hyperparameter 'base_model_id' must be a string")
    hparams.validate()
    base = plan_path.parent
    return TrainPlan(
        dataset_path=(base / obj["dataset"]).resolve(),
        manifest_path=(base / obj["manifest"]).resolve(),
        output_dir=(base / obj["output_dir"]).resolve(),
        hparams=hparams,
    )


def _validate_record(obj: object, line_no: int) -> dict:
    if not isinstance(obj, dict):
        raise SchemaViolation(f"line {line_no}: record must be an object")
    unexpected = set(obj) - set(RECORD_FIELDS) - {"meta"}
    if unexpected:
        raise SchemaViolation(f"line {line_no}: unexpected record fields: {sorted(unexpected)}")
    for name in RECORD_FIELDS:
        if name not in obj:
            raise SchemaViolation(f"line {line_no}: missing field {name!r}")
    for name in ("instruction", "input", "output", "system"):
        if not isinstance(obj[name], str):
            raise SchemaViolation(f"line {line_no}: field {name!r} must be a string")
    if not obj["instruction"].strip():
        raise SchemaViolation(f"line {line_no}: instruction must be non-empty")
    if not obj["output"].strip():
        raise SchemaViolation(f"line {line_no}: output must be non-empty")
    if not isinstance(obj["history"], list):
        raise SchemaViolation(f"line {line_no}: history must be a list")
    for turn in obj["history"]:
        if not (
            isinstance(turn, list)
            and len(turn) == 2
            and all(isinstance(part, str) for part in turn)
        ):
            raise SchemaViolation(
                f"line {line_no}: history turns must be [question, answer] string pairs"
            )
    if "meta" in obj and not isinstance(obj["meta"], dict):
        raise SchemaViolation(f"line {line_no}: meta must be an object")
    return obj


def validate_dataset(path: str | Path) -> list[dict]:
    """Read and validate every record; returns them in file order."""
    dataset_path = Path(path)
    if not dataset_path.exists():
        raise MissingFile(f"dataset not found: {dataset_path}")
    records: list[dict] = []
    with open(dataset_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError as exc:
                raise SchemaViolation(f"line {line_no}: invalid JSON: {exc}") from exc
            records.append(_validate_record(obj, line_no))
    return records


def _load_manifest(path: Path) -> dict:
    if not path.exists():
        raise MissingFile(f"manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise SchemaViolation(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise SchemaViolation("manifest must be a JSON object")
    return manifest


def resolve_plan(plan: TrainPlan) -> tuple[dict, list[dict]]:
    """Validate every input and return the fully resolved run configuration.

    The configuration is what a dry run prints and what the trainer receives:
    all hyperparameters with the base model id filled in (plan override wins,
    manifest declaration otherwise), absolute paths, and the validated
    record count. No network and no accelerator is touched here.
    """
    manifest = _load_manifest(plan.manifest_path)
    records = validate_dataset(plan.dataset_path)
    base_model_id = plan.hparams.base_model_id or manifest.get("base_model", "")
    if not isinstance(base_model_id, str) or not base_model_id.strip():
        raise SchemaViolation("base model id is empty in both the plan and the manifest")
    config = asdict(plan.hparams)
    config["base_model_id"] = base_model_id
    config.update(
        {
            "dataset": str(plan.dataset_path),
            "manifest": str(plan.manifest_path),
            "output_dir": str(plan.output_dir),
            "record_count": len(records),
        }
    )
    return config, records
