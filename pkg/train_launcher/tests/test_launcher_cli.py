"""End-to-end command line behavior: dry runs, live smoke, and failures."""

import json
import math
import sys

import pytest
from conftest import make_records, write_dataset, write_manifest, write_plan

from train_launcher import cli


def run_cli(capsys, *argv):
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParser:
    def test_subcommand_required(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 2

    def test_plan_argument_required(self, capsys):
        code, _, err = run_cli(capsys, "launch")
        assert code == 2
        assert "--plan" in err


class TestDryRun:
    def test_dry_run_prints_record_count(self, fixture_corpus, capsys):
        sys.modules.pop("train_launcher.trainer", None)
        code, out, err = run_cli(
            capsys, "launch", "--plan", str(fixture_corpus / "plan.json"), "--dry-run"
        )
        assert code == 0, err
        config = json.loads(out)
        assert config["record_count"] == 50
        assert config["base_model_id"] == "Qwen2.5-14B"
        assert config["learning_rate"] == 2e-5
        assert config["epochs"] == 1
        assert config["max_seq_len"] == 512
        assert "train_launcher.trainer" not in sys.modules
        assert not (fixture_corpus / "run-out").exists()

    def test_dry_run_reports_schema_violation_with_line(self, tmp_path, capsys):
        records = make_records(5)
        del records[2]["output"]
        write_dataset(tmp_path / "corpus" / "dataset.jsonl", records)
        write_manifest(tmp_path / "corpus" / "manifest.json", record_count=5)
        plan = write_plan(tmp_path)
        code, _, err = run_cli(capsys, "launch", "--plan", str(plan), "--dry-run")
        assert code == 1
        payload = json.loads(err)
        assert payload["error"] == "SchemaViolation"
        assert "line 3" in payload["detail"] and "output" in payload["detail"]

    def test_missing_plan_reports_missing_file(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "launch", "--plan", str(tmp_path / "nope.json"), "--dry-run")
        assert code == 1
        assert json.loads(err)["error"] == "MissingFile"


class TestLiveRun:
    @pytest.fixture
    def smoke_plan(self, tmp_path):
        write_dataset(tmp_path / "corpus" / "dataset.jsonl", make_records(10))
        write_manifest(tmp_path / "corpus" / "manifest.json", record_count=10)
        return write_plan(
            tmp_path,
            hyperparameters={
                "base_model_id": "tiny-byte-lm",
                "learning_rate": 1e-3,
                "max_seq_len": 256,
            },
        )

    def test_live_smoke_completes_one_epoch(self, smoke_plan, capsys):
        code, out, err = run_cli(capsys, "launch", "--plan", str(smoke_plan))
        assert code == 0, err
        summary = json.loads(out)
        assert summary["records"] == 10
        assert summary["steps"] == 5
        assert math.isfinite(summary["final_loss"]) and summary["final_loss"] > 0
        log_lines = (
            (smoke_plan.parent / "run-out" / "loss_log.jsonl")
            .read_text(encoding="utf-8")
            .splitlines()
        )
        assert len(log_lines) == 5
        assert all(json.loads(line)["loss"] > 0 for line in log_lines)
        assert (smoke_plan.parent / "run-out" / "model.pt").exists()

    def test_live_run_refuses_untrainable_base_model(self, tmp_path, capsys):
        write_dataset(tmp_path / "corpus" / "dataset.jsonl", make_records(3))
        write_manifest(tmp_path / "corpus" / "manifest.json", record_count=3)
        plan = write_plan(tmp_path)
        code, _, err = run_cli(capsys, "launch", "--plan", str(plan))
        assert code == 1
        payload = json.loads(err)
        assert payload["error"] == "TrainerFailure"
        assert "tiny-byte-lm" in payload["detail"]
