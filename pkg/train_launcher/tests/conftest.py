"""Shared fixtures: synthetic exported datasets, manifests, and plans."""

import json
from pathlib import Path

import pytest

EN_QUESTIONS = [
    "What limits the plasma density in a tokamak?",
    "Why do stellarators avoid disruptions more easily?",
    "How does neutral beam injection heat a plasma?",
    "What role does the divertor play in exhaust handling?",
    "Why is tritium breeding necessary for a fusion reactor?",
]

ZH_QUESTIONS = [
    "什么限制了托卡马克的等离子体密度？",
    "为什么仿星器更容易避免破裂？",
    "中性束注入如何加热等离子体？",
    "偏滤器在排出热量方面起什么作用？",
    "为什么聚变堆需要氚增殖？",
]


def make_record(index: int) -> dict:
    """One realistic exported record; alternates languages by index."""
    if index % 2 == 0:
        question = f"{EN_QUESTIONS[index % len(EN_QUESTIONS)]} (case {index})"
        answer = f"Answer {index}: the limit comes from a density-dependent instability."
    else:
        question = f"{ZH_QUESTIONS[index % len(ZH_QUESTIONS)]}（第{index}例）"
        answer = f"回答{index}：这一限制与密度相关的不稳定性有关。"
    record = {
        "instruction": question,
        "input": "",
        "output": answer,
        "system": "",
        "history": [],
        "meta": {
            "source": "arxiv",
            "unit_count": 12,
            "augmented": False,
            "doc_id": f"doc-{index:04d}",
            "chunk_index": index % 3,
        },
    }
    if index % 7 == 3:
        record["system"] = "You answer fusion questions for a general audience."
        record["history"] = [["What is plasma?", "An ionized gas of unbound ions and electrons."]]
    return record


def make_records(count: int) -> list[dict]:
    return [make_record(i) for i in range(count)]


def write_dataset(path: Path, records: list[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path


def write_manifest(path: Path, record_count: int, base_model: str = "Qwen2.5-14B") -> Path:
    manifest = {
        "base_model": base_model,
        "seed": 7,
        "budget_units": 1000,
        "quotas": {"commoncrawl": 730, "cnki": 40, "ebooks": 30, "arxiv": 100, "dissertation": 100},
        "achieved": {"commoncrawl": 0, "cnki": 0, "ebooks": 0, "arxiv": record_count * 12, "dissertation": 0},
        "shortfalls": {"commoncrawl": 730, "cnki": 40, "ebooks": 30, "arxiv": 0, "dissertation": 100},
        "record_count": record_count,
        "creation_params": {},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_plan(
    root: Path,
    dataset: str = "corpus/dataset.jsonl",
    manifest: str = "corpus/manifest.json",
    output_dir: str = "run-out",
    hyperparameters: dict | None = None,
    name: str = "plan.json",
) -> Path:
    plan = {"dataset": dataset, "manifest": manifest, "output_dir": output_dir}
    if hyperparameters is not None:
        plan["hyperparameters"] = hyperparameters
    path = root / name
    path.write_text(json.dumps(plan, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def fixture_corpus(tmp_path: Path) -> Path:
    """A 50-record exported dataset with its manifest, plus a default plan."""
    records = make_records(50)
    write_dataset(tmp_path / "corpus" / "dataset.jsonl", records)
    write_manifest(tmp_path / "corpus" / "manifest.json", record_count=50)
    write_plan(tmp_path)
    return tmp_path
