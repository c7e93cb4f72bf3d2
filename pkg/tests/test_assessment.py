import json

import pytest

from conftest import make_client
from fusionkit.assessment import (
    CONSISTENCY_RUBRIC,
    DEFAULT_RUBRIC,
    TOPICS,
    AssessmentItem,
    JudgedResult,
    Transcript,
    build_report,
    consistency_check,
    judge_transcript,
    load_judgments,
    load_questionnaire,
    load_transcripts,
    parse_score,
    run_assessment,
    write_judgments,
    write_report,
)
from fusionkit.cot_prompting import load_cot_config
from fusionkit.errors import (
    DuplicateId,
    MixedRuns,
    ScoreOutOfRange,
    SchemaViolation,
    UnknownTopic,
    UnparsableJudgment,
)
from fusionkit.llm_client import ChatMessage


@pytest.fixture(scope="module")
def cot_cfg():
    return load_cot_config()


def make_items(n=3, topic=TOPICS[0], lang="en"):
    return [
        AssessmentItem(id=f"item-{i:02d}", topic=topic, question=f"Question number {i}?", lang=lang)
        for i in range(n)
    ]


def write_questionnaire(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


GOOD_ROW = {
    "id": "x-001",
    "topic": "wave heating",
    "question": "How does ICRF heating work?",
    "lang": "en",
}


class TestLoadQuestionnaire:
    def test_shipped_fixture_has_184_items(self):
        items = load_questionnaire()
        assert len(items) == 184
        assert all(item.topic in TOPICS for item in items)
        assert all(item.lang in ("zh", "en") for item in items)
        by_topic = {}
        for item in items:
            by_topic[item.topic] = by_topic.get(item.topic, 0) + 1
        assert sum(by_topic.values()) == 184
        assert set(by_topic) == set(TOPICS)

    def test_items_keep_file_order(self, tmp_path):
        rows = [
            dict(GOOD_ROW, id="b-2"),
            dict(GOOD_ROW, id="a-1"),
        ]
        path = tmp_path / "q.jsonl"
        write_questionnaire(path, rows)
        items = load_questionnaire(path)
        assert [i.id for i in items] == ["b-2", "a-1"]

    def test_unknown_topic(self, tmp_path):
        path = tmp_path / "q.jsonl"
        write_questionnaire(path, [dict(GOOD_ROW, topic="astrology")])
        with pytest.raises(UnknownTopic, match="line 1"):
            load_questionnaire(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "q.jsonl"
        write_questionnaire(path, [GOOD_ROW, dict(GOOD_ROW, question="other?")])
        with pytest.raises(DuplicateId, match="line 2"):
            load_questionnaire(path)

    def test_missing_field_names_line(self, tmp_path):
        row = {k: v for k, v in GOOD_ROW.items() if k != "question"}
        path = tmp_path / "q.jsonl"
        write_questionnaire(path, [GOOD_ROW, row])
        with pytest.raises(SchemaViolation, match="line 2"):
            load_questionnaire(path)

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "q.jsonl"
        path.write_text(json.dumps(GOOD_ROW) + "\n{broken\n", encoding="utf-8")
        with pytest.raises(SchemaViolation, match="line 2"):
            load_questionnaire(path)

    def test_bad_lang(self, tmp_path):
        path = tmp_path / "q.jsonl"
        write_questionnaire(path, [dict(GOOD_ROW, lang="fr")])
        with pytest.raises(SchemaViolation, match="lang"):
            load_questionnaire(path)


class TestRunAssessment:
    def test_all_ok_in_item_order(self, cot_cfg):
        client = make_client({"default": {"respond": "answer to {{last_user}}"}})
        items = make_items(3)
        transcripts = run_assessment(items, client, cot_cfg, backend_id="b1", run_id="r1")
        assert [t.item_id for t in transcripts] == [i.id for i in items]
        assert all(t.status == "ok" for t in transcripts)
        assert all(t.answer.startswith("answer to Question number") for t in transcripts)
        assert all(t.backend_id == "b1" and t.run_id == "r1" for t in transcripts)
        assert all(len(t.messages) == 18 for t in transcripts)

    def test_cot_disabled_single_message(self, cot_cfg):
        client = make_client({"default": {"respond": "a"}})
        transcripts = run_assessment(make_items(1), client, cot_cfg, cot_enabled=False)
        assert len(transcripts[0].messages) == 1

    def test_failure_is_isolated(self, cot_cfg):
        spec = {
            "entries": [
                {"match_substring": "Question number 1", "fail": "400", "repeat": True}
            ],
            "default": {"respond": "fine"},
        }
        client = make_client(spec)
        transcripts = run_assessment(make_items(3), client, cot_cfg)
        assert [t.status for t in transcripts] == ["ok", "failed", "ok"]
        assert transcripts[1].answer == ""

    def test_end_of_run_retry_recovers(self, cot_cfg):
        # consume-once failure on item 1: retried at end-of-run and succeeds
        spec = {
            "entries": [{"match_substring": "Question number 1", "fail": "400"}],
            "default": {"respond": "fine"},
        }
        client = make_client(spec)
        transcripts = run_assessment(make_items(3), client, cot_cfg)
        assert [t.status for t in transcripts] == ["ok", "ok", "ok"]

    def test_empty_completion_marks_failed(self, cot_cfg):
        client = make_client({"default": {"respond": ""}})
        transcripts = run_assessment(make_items(1), client, cot_cfg)
        assert transcripts[0].status == "failed"
        assert transcripts[0].answer == ""

    def test_transcripts_persisted_and_reloadable(self, cot_cfg, tmp_path):
        client = make_client({"default": {"respond": "persisted answer"}})
        items = make_items(2)
        run_assessment(items, client, cot_cfg, resume_dir=tmp_path, run_id="r9")
        loaded = load_transcripts(tmp_path)
        assert len(loaded) == 2
        assert {t.item_id for t in loaded} == {i.id for i in items}
        assert all(t.run_id == "r9" for t in loaded)
        assert all(t.messages[-1].role == "user" for t in loaded)

    def test_resume_skips_finished_items(self, cot_cfg, tmp_path):
        items = make_items(5)
        first = make_client(
            {
                "entries": [{"respond": "one"}, {"respond": "two"}],
            }
        )
        # no default: the third item fails, simulating an interrupted run
        partial = run_assessment(items[:3], first, cot_cfg, resume_dir=tmp_path, run_id="r1")
        assert [t.status for t in partial] == ["ok", "ok", "failed"]

        second = make_client({"default": {"respond": "resumed"}})
        full = run_assessment(items, second, cot_cfg, resume_dir=tmp_path, run_id="r1")
        assert all(t.status == "ok" for t in full)
        # only the failed item and the two never-run items hit the backend
        assert second.backend.call_count == 3
        assert [t.answer for t in full] == ["one", "two", "resumed", "resumed", "resumed"]

    def test_resume_rejects_other_run(self, cot_cfg, tmp_path):
        client = make_client({"default": {"respond": "a"}})
        run_assessment(make_items(1), client, cot_cfg, resume_dir=tmp_path, run_id="r1")
        with pytest.raises(MixedRuns):
            run_assessment(make_items(1), client, cot_cfg, resume_dir=tmp_path, run_id="r2")

    def test_combos_are_independent(self, cot_cfg, tmp_path):
        items = make_items(2)
        client = make_client({"default": {"respond": "a"}})
        run_assessment(items, client, cot_cfg, cot_enabled=True, resume_dir=tmp_path)
        run_assessment(items, client, cot_cfg, cot_enabled=False, resume_dir=tmp_path)
        loaded = load_transcripts(tmp_path)
        assert len(loaded) == 4
        assert {(t.item_id, t.cot_enabled) for t in loaded} == {
            ("item-00", True), ("item-01", True), ("item-00", False), ("item-01", False),
        }


class TestJudging:
    def test_parse_score_with_rationale(self):
        score, rationale = parse_score("Score: 4\nClear and grounded.")
        assert score == 4
        assert rationale == "Clear and grounded."

    def test_parse_score_rationale_before_line(self):
        score, rationale = parse_score("Good coverage overall.\nscore： 5")
        assert score == 5
        assert rationale == "Good coverage overall."

    def test_parse_score_out_of_range(self):
        with pytest.raises(ScoreOutOfRange):
            parse_score("Score: 9\ntoo good")
        with pytest.raises(ScoreOutOfRange):
            parse_score("Score: -1")

    def test_parse_score_unparsable(self):
        with pytest.raises(UnparsableJudgment):
            parse_score("I would rate this a four out of five.")
        with pytest.raises(UnparsableJudgment):
            parse_score("Score: excellent")

    def test_judge_ok_transcript(self, cot_cfg):
        client = make_client({"default": {"respond": "the answer body"}})
        [transcript] = run_assessment(make_items(1), client, cot_cfg, run_id="r1")
        judge = make_client({"default": {"respond": "Score: 3\nAdequate."}})
        result = judge_transcript(transcript, DEFAULT_RUBRIC, judge)
        assert result.score == 3
        assert result.rationale == "Adequate."
        assert result.item_id == transcript.item_id
        sent = judge.backend.calls[0].messages[0].content
        assert DEFAULT_RUBRIC in sent
        assert "the answer body" in sent
        assert transcript.messages[-1].content in sent

    def test_judge_rejects_failed_transcript(self):
        transcript = Transcript(
            run_id="r", item_id="i", backend_id="b", cot_enabled=True,
            messages=[ChatMessage("user", "q")], answer="", status="failed", latency_ms=0,
        )
        judge = make_client({"default": {"respond": "Score: 5"}})
        with pytest.raises(ValueError):
            judge_transcript(transcript, DEFAULT_RUBRIC, judge)

    def test_judgments_round_trip(self, tmp_path):
        judged = [
            JudgedResult("r1", "item-00", "b", True, 4, "solid"),
            JudgedResult("r1", "item-01", "b", False, 2, "thin"),
        ]
        write_judgments(tmp_path, judged)
        assert load_judgments(tmp_path) == judged

    def test_load_judgments_empty_dir(self, tmp_path):
        assert load_judgments(tmp_path) == []


class TestConsistency:
    def test_paired_counterpart(self, cot_cfg):
        item = AssessmentItem("c-zh", TOPICS[0], "独特标记词是什么？", "zh")
        pair = AssessmentItem("c-en", TOPICS[0], "What is the uniquetokenx?", "en")
        spec = {
            "entries": [
                {"match_substring": "独特标记词", "respond": "中文回答", "repeat": True},
                {"match_substring": "uniquetokenx", "respond": "english answer", "repeat": True},
            ],
        }
        client = make_client(spec)
        judge = make_client({"default": {"respond": "Score: 5\nSame meaning."}})
        result = consistency_check(item, client, cot_cfg, judge, counterpart=pair)
        assert result["score"] == 5
        assert result["answers"] == {"zh": "中文回答", "en": "english answer"}
        assert client.backend.call_count == 2  # no translation call needed
        sent = judge.backend.calls[0].messages[0].content
        assert CONSISTENCY_RUBRIC in sent
        assert "中文回答" in sent and "english answer" in sent
        assert "独特标记词是什么？" in sent and "What is the uniquetokenx?" in sent

    def test_machine_translation_fallback(self, cot_cfg):
        item = AssessmentItem("c-zh", TOPICS[0], "什么是托卡马克？", "zh")
        spec = {
            "entries": [
                {"match_substring": "Translate the following text", "respond": "What is a tokamak?"},
            ],
            "default": {"respond": "an answer"},
        }
        client = make_client(spec)
        judge = make_client({"default": {"respond": "Score: 4\nok"}})
        result = consistency_check(item, client, cot_cfg, judge)
        assert result["score"] == 4
        assert client.backend.call_count == 3  # translate + two answers
        first = client.backend.calls[0].messages[0].content
        assert first.startswith("Translate the following text to English")
        assert "什么是托卡马克？" in first

    def test_counterpart_wrong_language(self, cot_cfg):
        item = AssessmentItem("c-zh", TOPICS[0], "中文问题？", "zh")
        bad = AssessmentItem("c-zh2", TOPICS[0], "另一个中文问题？", "zh")
        client = make_client({"default": {"respond": "a"}})
        judge = make_client({"default": {"respond": "Score: 5"}})
        with pytest.raises(ValueError):
            consistency_check(item, client, cot_cfg, judge, counterpart=bad)

    def test_backend_failure_propagates(self, cot_cfg):
        item = AssessmentItem("c-zh", TOPICS[0], "中文问题？", "zh")
        pair = AssessmentItem("c-en", TOPICS[0], "English question?", "en")
        spec = {
            "entries": [
                {"match_substring": "中文问题", "fail": "400", "repeat": True},
            ],
            "default": {"respond": "a"},
        }
        client = make_client(spec)
        judge = make_client({"default": {"respond": "Score: 5"}})
        with pytest.raises(Exception):
            consistency_check(item, client, cot_cfg, judge, counterpart=pair)
        assert judge.backend.call_count == 0  # no partial judgment


class TestReport:
    def run_grid(self, cot_cfg, items):
        transcripts = []
        for backend_id in ("base", "tuned"):
            for cot_enabled in (True, False):
                client = make_client({"default": {"respond": f"ans {backend_id}"}})
                transcripts.extend(
                    run_assessment(
                        items, client, cot_cfg,
                        cot_enabled=cot_enabled, backend_id=backend_id, run_id="r1",
                    )
                )
        return transcripts

    def test_groups_and_topic_partition(self, cot_cfg):
        items = make_items(2, topic=TOPICS[0]) + [
            AssessmentItem("item-zz", TOPICS[2], "Fuelling question?", "en")
        ]
        transcripts = self.run_grid(cot_cfg, items)
        judged = [
            JudgedResult("r1", t.item_id, t.backend_id, t.cot_enabled, 4, "fine")
            for t in transcripts
        ]
        markdown, summary = build_report(transcripts, judged, items)
        assert set(summary["groups"]) == {
            "base/cot", "base/plain", "tuned/cot", "tuned/plain",
        }
        for entry in summary["groups"].values():
            assert entry["count"] == 3
            assert sum(entry["topics"].values()) == entry["count"]
            assert entry["topics"] == {TOPICS[0]: 2, TOPICS[2]: 1}
            assert entry["score_mean"] == 4
            assert entry["judged_count"] == 3
        assert "| base/cot | 3 | 0 | 3 | 4 | 4 |" in markdown
        assert summary["transcript_count"] == 12

    def test_mixed_runs_rejected(self, cot_cfg):
        items = make_items(1)
        client = make_client({"default": {"respond": "a"}})
        t1 = run_assessment(items, client, cot_cfg, run_id="r1")
        t2 = run_assessment(items, client, cot_cfg, run_id="r2")
        with pytest.raises(MixedRuns):
            build_report(t1 + t2, [], items)

    def test_no_judgments_counts_only(self, cot_cfg):
        items = make_items(2)
        client = make_client({"default": {"respond": "a"}})
        transcripts = run_assessment(items, client, cot_cfg, run_id="r1")
        markdown, summary = build_report(transcripts, [], items)
        assert "mean" not in markdown
        assert "| default/cot | 2 | 0 |" in markdown
        assert "score_mean" not in summary["groups"]["default/cot"]

    def test_failures_counted(self, cot_cfg):
        spec = {
            "entries": [{"match_substring": "Question number 0", "fail": "400", "repeat": True}],
            "default": {"respond": "a"},
        }
        client = make_client(spec)
        transcripts = run_assessment(make_items(2), client, cot_cfg, run_id="r1")
        _, summary = build_report(transcripts, [], make_items(2))
        assert summary["groups"]["default/cot"]["failures"] == 1

    def test_excerpts_included(self, cot_cfg):
        items = make_items(2)
        client = make_client({"default": {"respond": "long answer " * 40}})
        transcripts = run_assessment(items, client, cot_cfg, run_id="r1")
        markdown, _ = build_report(
            transcripts, [], items, excerpt_item_ids=["item-01"], excerpt_chars=30
        )
        assert "## Answer excerpts" in markdown
        assert "### item-01" in markdown
        assert "### item-00" not in markdown

    def test_write_report_files(self, cot_cfg, tmp_path):
        items = make_items(1)
        client = make_client({"default": {"respond": "a"}})
        transcripts = run_assessment(items, client, cot_cfg, run_id="r1")
        markdown, summary = build_report(transcripts, [], items)
        md_path, json_path = write_report(tmp_path, markdown, summary)
        assert md_path.read_text(encoding="utf-8") == markdown
        assert json.loads(json_path.read_text(encoding="utf-8")) == summary
