import json

import pytest

from conftest import FIXTURES
from fusionkit.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_source_tree(root, kind, texts):
    src = root / kind
    src.mkdir(parents=True, exist_ok=True)
    for i, text in enumerate(texts):
        (src / f"doc-{i:02d}.txt").write_text(text, encoding="utf-8")
    return src


EN_TEXT = (
    "The divertor spreads the exhaust heat over a wide wetted area. "
    "Neutral beam injection drives plasma rotation and current. "
    "Pellet fuelling reaches deeper than gas puffing in large devices. "
) * 30

ZH_TEXT = (
    "偏滤器将排出的热量分散到更大的润湿面积上。"
    "中性束注入驱动等离子体旋转并提供电流。"
    "弹丸加料比喷气加料在大型装置中更深入。"
) * 30


class TestParser:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        assert "fusionkit" in capsys.readouterr().out

    def test_unknown_command_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_negative_seed_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["assemble", "--dry-run", "--seed", "-1"])
        assert exc.value.code == 2
        assert "seed" in capsys.readouterr().err

    def test_oversized_seed_rejected(self):
        with pytest.raises(SystemExit) as exc:
            main(["assemble", "--dry-run", "--seed", str(2**64)])
        assert exc.value.code == 2


class TestDryRun:
    def test_default_quotas(self, capsys):
        code, out, _ = run_cli(capsys, "assemble", "--dry-run")
        assert code == 0
        assert json.loads(out) == {
            "budget_units": 100000,
            "quotas": {
                "arxiv": 10000,
                "cnki": 4000,
                "commoncrawl": 73000,
                "dissertation": 10000,
                "ebooks": 3000,
            },
        }

    def test_budget_override(self, capsys):
        code, out, _ = run_cli(capsys, "assemble", "--dry-run", "--budget", "10")
        assert code == 0
        assert json.loads(out)["quotas"] == {
            "arxiv": 1,
            "cnki": 1,
            "commoncrawl": 7,
            "dissertation": 1,
            "ebooks": 0,
        }


class TestStageErrors:
    def test_missing_input_exit_one(self, capsys, tmp_path):
        code, out, err = run_cli(
            capsys, "generate", "--in", str(tmp_path / "absent.jsonl"),
            "--mock", str(FIXTURES / "mock_backend.json"), "--out", str(tmp_path),
        )
        assert code == 1
        payload = json.loads(err)
        assert payload["error"] == "FileNotFoundError"

    def test_ingest_without_sources(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "ingest", "--out", str(tmp_path))
        assert code == 1
        assert json.loads(err)["error"] == "FusionKitError"

    def test_bad_source_spec(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "ingest", "--source", "nodelimiter", "--out", str(tmp_path)
        )
        assert code == 1
        assert "KIND=PATH" in json.loads(err)["detail"]

    def test_report_without_run(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "report", "--run", str(tmp_path / "void"))
        assert code == 1
        assert json.loads(err)["error"] == "FusionKitError"


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    write_source_tree(root, "cnki", [ZH_TEXT, ZH_TEXT + "不同的结尾。"])
    write_source_tree(root, "ebooks", [EN_TEXT, EN_TEXT + " A different ending."])
    return root


class TestPipeline:
    def test_full_run(self, work, capsys):
        mock = str(FIXTURES / "mock_backend.json")
        out = work / "work"

        code, stdout, _ = run_cli(
            capsys, "ingest",
            "--source", f"cnki={work / 'cnki'}",
            "--source", f"ebooks={work / 'ebooks'}",
            "--out", str(out),
        )
        assert code == 0
        assert json.loads(stdout) == {
            "documents": 4, "per_source": {"cnki": 2, "ebooks": 2}
        }

        code, stdout, _ = run_cli(
            capsys, "generate", "--in", str(out / "documents.jsonl"),
            "--mock", mock, "--max-units", "200", "--overlap", "20",
            "--out", str(out),
        )
        assert code == 0
        gen = json.loads(stdout)
        assert gen["records"] > 0
        assert gen["chunks_skipped"] == 0

        code, stdout, _ = run_cli(
            capsys, "assemble", "--in", str(out / "records.jsonl"),
            "--budget", "200", "--seed", "7", "--out", str(out / "corpus"),
        )
        assert code == 0
        asm = json.loads(stdout)
        assert asm["record_count"] > 0
        assert (out / "corpus" / "dataset.jsonl").exists()
        assert (out / "corpus" / "manifest.json").exists()
        # only cnki and ebooks pools exist; the other three fall short
        missing = {s for s, units in asm["shortfalls"].items() if units > 0}
        assert missing == {"arxiv", "commoncrawl", "dissertation"}
        assert asm["shortfalls"]["cnki"] == 0
        assert asm["shortfalls"]["ebooks"] == 0

        code, stdout, _ = run_cli(
            capsys, "export-train", "--in", str(out / "corpus"),
            "--val-ratio", "0.25", "--seed", "7", "--out", str(out / "splits"),
        )
        assert code == 0
        split = json.loads(stdout)
        assert split["train"] + split["val"] == split["total"] == asm["record_count"]
        assert (out / "splits" / "train.jsonl").exists()
        assert (out / "splits" / "val.jsonl").exists()


class TestAssessAndReport:
    def test_assess_limit_judge_and_report(self, capsys, tmp_path):
        run_dir = tmp_path / "run"
        code, stdout, _ = run_cli(
            capsys, "assess",
            "--mock", str(FIXTURES / "mock_chat.json"),
            "--judge-mock", str(FIXTURES / "mock_judge.json"),
            "--limit", "3", "--seed", "11", "--out", str(run_dir),
        )
        assert code == 0
        summary = json.loads(stdout)
        assert summary == {
            "run_id": "run-11", "items": 3, "ok": 3, "failed": 0, "judged": 3
        }
        assert (run_dir / "transcripts.jsonl").exists()
        assert (run_dir / "judgments.jsonl").exists()

        # re-running is a no-op resume: no new transcripts, no new judgments
        code, stdout, _ = run_cli(
            capsys, "assess",
            "--mock", str(FIXTURES / "mock_chat.json"),
            "--judge-mock", str(FIXTURES / "mock_judge.json"),
            "--limit", "3", "--seed", "11", "--out", str(run_dir),
        )
        assert code == 0
        assert json.loads(stdout)["judged"] == 3

        code, stdout, _ = run_cli(
            capsys, "report", "--run", str(run_dir), "--out", str(run_dir)
        )
        assert code == 0
        names = json.loads(stdout)
        assert names == {"report_md": "report.md", "report_json": "report.json"}
        report = (run_dir / "report.md").read_text(encoding="utf-8")
        assert "default/cot" in report
        summary_obj = json.loads((run_dir / "report.json").read_text(encoding="utf-8"))
        assert summary_obj["transcript_count"] == 3

    def test_no_cot_branch(self, capsys, tmp_path):
        code, stdout, _ = run_cli(
            capsys, "assess",
            "--mock", str(FIXTURES / "mock_chat.json"),
            "--no-cot", "--limit", "2", "--out", str(tmp_path),
        )
        assert code == 0
        assert json.loads(stdout)["ok"] == 2
        lines = (tmp_path / "transcripts.jsonl").read_text(encoding="utf-8").splitlines()
        assert all(len(json.loads(line)["messages"]) == 1 for line in lines)

    def test_custom_questionnaire(self, capsys, tmp_path):
        q = tmp_path / "q.jsonl"
        q.write_text(
            json.dumps(
                {
                    "id": "solo-1", "topic": "wave heating",
                    "question": "How does ECRH couple?", "lang": "en",
                }
            ) + "\n",
            encoding="utf-8",
        )
        code, stdout, _ = run_cli(
            capsys, "assess", "--questionnaire", str(q),
            "--mock", str(FIXTURES / "mock_chat.json"), "--out", str(tmp_path / "r"),
        )
        assert code == 0
        assert json.loads(stdout)["items"] == 1


class TestConfigFile:
    def test_config_supplies_defaults(self, capsys, tmp_path):
        src = write_source_tree(tmp_path, "arxiv", [EN_TEXT])
        cfg = {
            "sources": {"arxiv": str(src)},
            "out_dir": str(tmp_path / "from-config"),
        }
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
        code, stdout, _ = run_cli(capsys, "ingest", "--config", str(cfg_path))
        assert code == 0
        assert json.loads(stdout)["documents"] == 1
        assert (tmp_path / "from-config" / "documents.jsonl").exists()

    def test_client_config_with_mock_override(self, capsys, tmp_path):
        cfg = {"client": {"model_id": "cfg-model"}}
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
        code, stdout, _ = run_cli(
            capsys, "assess", "--config", str(cfg_path),
            "--mock", str(FIXTURES / "mock_chat.json"),
            "--limit", "1", "--out", str(tmp_path / "r"),
        )
        assert code == 0
        assert json.loads(stdout)["ok"] == 1
