"""Questionnaire runner, LLM-as-judge scoring, and comparison reports.

The harness runs a fixed questionnaire against one or more chat backends
(with or without the CoT layer), records one transcript per item, and can
score answers with a separate judge backend on a 0-5 rubric. The judge is
a machine-checkable proxy added by this toolkit, and reports label it as
such; it is not a claim about any published evaluation.
"""

from __future__ import annotations

import json
import os
import re
import statistics
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .cot_prompting import CoTConfig, assemble_cot_prompt
from .errors import (
    DuplicateId,
    MixedRuns,
    ScoreOutOfRange,
    SchemaViolation,
    UnknownTopic,
    UnparsableJudgment,
)
from .ingest import detect_language
from .llm_client import ChatClient, ChatMessage
from .qagen import TRANSLATE_PROMPT, LANG_NAMES

TOPICS = (
    "RMP and heat flux",
    "MHD theoretical foundations and phenomena",
    "tokamak fuelling",
    "tokamak high-density operation",
    "tokamak vacuum system",
    "plasma discharge simulation methods",
    "wave heating",
    "impurity research",
    "plasma boundary",
    "other generalized questions",
)

DEFAULT_RUBRIC = (
    "You are grading an answer to a nuclear-fusion question. Rate the answer "
    "from 0 (useless or wrong) to 5 (accurate, complete, well structured). "
    "Reply with a line 'Score: <0-5>' followed by a short rationale."
)

CONSISTENCY_RUBRIC = (
    "You are given two answers to the same nuclear-fusion question, one in "
    "Chinese and one in English. Rate their semantic consistency from 0 "
    "(contradictory) to 5 (same meaning). Reply with a line 'Score: <0-5>' "
    "followed by a short rationale."
)

_SCORE_LINE = re.compile(r"^\s*Score\s*[:：]\s*(-?\d+)\s*$", re.IGNORECASE | re.MULTILINE)


@dataclass
class AssessmentItem:
    id: str
    topic: str
    question: str
    lang: str
    placeholder: bool = False


@dataclass
class Transcript:
    run_id: str
    item_id: str
    backend_id: str
    cot_enabled: bool
    messages: list[ChatMessage]
    answer: str
    status: str  # ok | failed
    latency_ms: int


@dataclass
class JudgedResult:
    run_id: str
    item_id: str
    backend_id: str
    cot_enabled: bool
    score: int
    rationale: str


def load_questionnaire(path: str | Path | None = None) -> list[AssessmentItem]:
    """Load assessment items from JSON Lines; None loads the shipped fixture."""
    if path is None:
        raw = resources.files("fusionkit.data").joinpath("questionnaire.jsonl").read_text("utf-8")
        lines = raw.splitlines()
    else:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    items: list[AssessmentItem] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise SchemaViolation(f"line {line_no}: invalid JSON: {exc}") from exc
        for name in ("id", "topic", "question", "lang"):
            if name not in obj or not isinstance(obj[name], str) or not obj[name]:
                raise SchemaViolation(f"line {line_no}: missing or empty field {name!r}")
        if obj["topic"] not in TOPICS:
            raise UnknownTopic(f"line {line_no}: {obj['topic']!r}")
        if obj["id"] in seen_ids:
            raise DuplicateId(f"line {line_no}: {obj['id']!r}")
        if obj["lang"] not in ("zh", "en"):
            raise SchemaViolation(f"line {line_no}: lang must be zh or en")
        seen_ids.add(obj["id"])
        items.append(
            AssessmentItem(
                id=obj["id"],
                topic=obj["topic"],
                question=obj["question"],
                lang=obj["lang"],
                placeholder=bool(obj.get("placeholder", False)),
            )
        )
    return items


def _transcript_to_obj(t: Transcript) -> dict:
    return {
        "run_id": t.run_id,
        "item_id": t.item_id,
        "backend_id": t.backend_id,
        "cot_enabled": t.cot_enabled,
        "messages": [{"role": m.role, "content": m.content} for m in t.messages],
        "answer": t.answer,
        "status": t.status,
        "latency_ms": t.latency_ms,
    }


def _transcript_from_obj(obj: dict) -> Transcript:
    return Transcript(
        run_id=obj["run_id"],
        item_id=obj["item_id"],
        backend_id=obj["backend_id"],
        cot_enabled=bool(obj["cot_enabled"]),
        messages=[ChatMessage(m["role"], m["content"]) for m in obj.get("messages", [])],
        answer=obj.get("answer", ""),
        status=obj["status"],
        latency_ms=int(obj.get("latency_ms", 0)),
    )


def _atomic_write_jsonl(path: Path, objs: list[dict]) -> None:
    # write-then-rename keeps the file whole under crashes mid-run
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    os.replace(tmp, path)


def load_transcripts(run_dir: str | Path) -> list[Transcript]:
    path = Path(run_dir) / "transcripts.jsonl"
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        return [_transcript_from_obj(json.loads(line)) for line in fh if line.strip()]


def _combo_key(t: Transcript) -> tuple[str, str, bool]:
    return (t.item_id, t.backend_id, t.cot_enabled)


def run_assessment(
    items: list[AssessmentItem],
    client: ChatClient,
    cot_cfg: CoTConfig,
    cot_enabled: bool = True,
    resume_dir: str | Path | None = None,
    backend_id: str = "default",
    run_id: str = "run-0",
) -> list[Transcript]:
    """Run every item in order; per-item failures never abort the run.

    With resume_dir, items already holding an ok transcript for this
    (backend, cot) combination are skipped, and each finished transcript is
    persisted immediately, so a crash after k items costs exactly k calls.
    Failed items are retried once at end-of-run before being finalized.
    """
    run_dir = Path(resume_dir) if resume_dir is not None else None
    existing: dict[tuple[str, str, bool], Transcript] = {}
    if run_dir is not None:
        run_dir.mkdir(parents=True, exist_ok=True)
        for t in load_transcripts(run_dir):
            if t.run_id != run_id:
                raise MixedRuns(f"resume dir holds run {t.run_id!r}, expected {run_id!r}")
            existing[_combo_key(t)] = t

    results: dict[tuple[str, str, bool], Transcript] = dict(existing)

    def persist() -> None:
        if run_dir is None:
            return
        ordered = [results[k] for k in sorted(results)]
        _atomic_write_jsonl(run_dir / "transcripts.jsonl", [_transcript_to_obj(t) for t in ordered])

    def ask(item: AssessmentItem) -> Transcript:
        lang = item.lang if item.lang in ("zh", "en") else "en"
        messages = assemble_cot_prompt(item.question, lang, cot_cfg, cot_enabled)
        start = time.monotonic()
        try:
            completion = client.chat(messages)
            # an ok transcript always carries a non-empty answer
            if completion.text:
                answer, status = completion.text, "ok"
            else:
                answer, status = "", "failed"
        except Exception:
            answer, status = "", "failed"
        latency_ms = int((time.monotonic() - start) * 1000)
        return Transcript(
            run_id=run_id,
            item_id=item.id,
            backend_id=backend_id,
            cot_enabled=cot_enabled,
            messages=messages,
            answer=answer,
            status=status,
            latency_ms=latency_ms,
        )

    failed_items: list[AssessmentItem] = []
    for item in items:
        key = (item.id, backend_id, cot_enabled)
        prior = results.get(key)
        if prior is not None and prior.status == "ok":
            continue
        transcript = ask(item)
        results[key] = transcript
        if transcript.status == "failed":
            failed_items.append(item)
        persist()

    # one end-of-run retry: cheap robustness against transient backend errors
    for item in failed_items:
        key = (item.id, backend_id, cot_enabled)
        retry = ask(item)
        if retry.status == "ok":
            results[key] = retry
            persist()

    ordered = [results[(item.id, backend_id, cot_enabled)] for item in items]
    return ordered


def parse_score(text: str) -> tuple[int, str]:
    match = _SCORE_LINE.search(text)
    if match is None:
        raise UnparsableJudgment(f"no 'Score: <0-5>' line in: {text[:120]!r}")
    score = int(match.group(1))
    if not (0 <= score <= 5):
        raise ScoreOutOfRange(f"score {score} outside 0..5")
    rationale = (text[: match.start()] + text[match.end():]).strip()
    return score, rationale


def judge_transcript(
    transcript: Transcript,
    rubric: str,
    judge_client: ChatClient,
) -> JudgedResult:
    """Score one ok transcript with the judge backend on the 0-5 rubric."""
    if transcript.status != "ok":
        raise ValueError(f"cannot judge a {transcript.status!r} transcript")
    question = transcript.messages[-1].content if transcript.messages else ""
    prompt = (
        f"{rubric}\n\nQuestion:\n{question}\n\nAnswer:\n{transcript.answer}"
    )
    completion = judge_client.chat([ChatMessage("user", prompt)])
    score, rationale = parse_score(completion.text)
    return JudgedResult(
        run_id=transcript.run_id,
        item_id=transcript.item_id,
        backend_id=transcript.backend_id,
        cot_enabled=transcript.cot_enabled,
        score=score,
        rationale=rationale,
    )


def consistency_check(
    item: AssessmentItem,
    client: ChatClient,
    cot_cfg: CoTConfig,
    judge_client: ChatClient,
    counterpart: AssessmentItem | None = None,
    cot_enabled: bool = True,
) -> dict:
    """Rate semantic agreement of the zh and en answers to one question.

    The other-language rendering comes from `counterpart` (paired fixture)
    or, when absent, from the backend via a fixed translation prompt. Any
    backend or judge failure propagates; no partial result is produced.
    """
    if item.lang not in ("zh", "en"):
        raise ValueError(f"item lang must be zh or en, got {item.lang!r}")
    other_lang = "en" if item.lang == "zh" else "zh"
    if counterpart is not None:
        if counterpart.lang != other_lang:
            raise ValueError(f"counterpart must be in {other_lang!r}")
        other_question = counterpart.question
    else:
        translation = client.chat(
            [ChatMessage("user", TRANSLATE_PROMPT.format(target=LANG_NAMES[other_lang], text=item.question))]
        )
        other_question = translation.text.strip()
    questions = {item.lang: item.question, other_lang: other_question}
    answers: dict[str, str] = {}
    for lang in ("zh", "en"):
        completion = client.chat(assemble_cot_prompt(questions[lang], lang, cot_cfg, cot_enabled))
        answers[lang] = completion.text
    judge_prompt = (
        f"{CONSISTENCY_RUBRIC}\n\nQuestion (zh):\n{questions['zh']}\n\n"
        f"Question (en):\n{questions['en']}\n\nAnswer (zh):\n{answers['zh']}\n\n"
        f"Answer (en):\n{answers['en']}"
    )
    completion = judge_client.chat([ChatMessage("user", judge_prompt)])
    score, _ = parse_score(completion.text)
    return {"score": score, "answers": answers}


def _group_label(backend_id: str, cot_enabled: bool) -> str:
    return f"{backend_id}/{'cot' if cot_enabled else 'plain'}"


def build_report(
    transcripts: list[Transcript],
    judged: list[JudgedResult],
    items: list[AssessmentItem],
    excerpt_item_ids: list[str] | None = None,
    excerpt_chars: int = 240,
) -> tuple[str, dict]:
    """Aggregate transcripts and judgments into Markdown plus a JSON summary.

    Groups are (backend, cot) pairs; topic counts partition the transcript
    total. All inputs must share one run id (MixedRuns otherwise).
    """
    run_ids = {t.run_id for t in transcripts} | {j.run_id for j in judged}
    if len(run_ids) > 1:
        raise MixedRuns(f"inputs span runs {sorted(run_ids)}")
    run_id = next(iter(run_ids)) if run_ids else ""
    topic_by_item = {item.id: item.topic for item in items}

    groups: dict[str, dict] = {}
    for t in transcripts:
        label = _group_label(t.backend_id, t.cot_enabled)
        group = groups.setdefault(
            label,
            {"backend": t.backend_id, "cot_enabled": t.cot_enabled, "count": 0,
             "failures": 0, "topics": {}, "scores": []},
        )
        group["count"] += 1
        if t.status != "ok":
            group["failures"] += 1
        topic = topic_by_item.get(t.item_id, "unknown")
        group["topics"][topic] = group["topics"].get(topic, 0) + 1
    for j in judged:
        label = _group_label(j.backend_id, j.cot_enabled)
        if label in groups:
            groups[label]["scores"].append(j.score)

    summary: dict = {"run_id": run_id, "transcript_count": len(transcripts), "groups": {}}
    for label in sorted(groups):
        group = groups[label]
        entry = {
            "backend": group["backend"],
            "cot_enabled": group["cot_enabled"],
            "count": group["count"],
            "failures": group["failures"],
            "topics": dict(sorted(group["topics"].items())),
        }
        if group["scores"]:
            entry["score_mean"] = round(statistics.mean(group["scores"]), 3)
            entry["score_median"] = statistics.median(group["scores"])
            entry["judged_count"] = len(group["scores"])
        summary["groups"][label] = entry

    lines = [f"# Assessment report: {run_id}", ""]
    lines.append(f"Transcripts: {len(transcripts)} across {len(groups)} group(s).")
    lines.append("")
    if judged:
        lines.append("Scores below come from an LLM judge on a 0-5 rubric, a")
        lines.append("machine-checkable proxy added by this toolkit, not a human grade.")
        lines.append("")
        lines.append("| group | items | failures | judged | mean | median |")
        lines.append("|---|---|---|---|---|---|")
        for label in sorted(groups):
            entry = summary["groups"][label]
            if "score_mean" in entry:
                lines.append(
                    f"| {label} | {entry['count']} | {entry['failures']} "
                    f"| {entry['judged_count']} | {entry['score_mean']} | {entry['score_median']} |"
                )
            else:
                lines.append(f"| {label} | {entry['count']} | {entry['failures']} | - | - | - |")
    else:
        lines.append("| group | items | failures |")
        lines.append("|---|---|---|")
        for label in sorted(groups):
            entry = summary["groups"][label]
            lines.append(f"| {label} | {entry['count']} | {entry['failures']} |")
    lines.append("")
    lines.append("## Per-topic counts")
    lines.append("")
    for label in sorted(groups):
        lines.append(f"### {label}")
        lines.append("")
        for topic, count in sorted(groups[label]["topics"].items()):
            lines.append(f"- {topic}: {count}")
        lines.append("")

    if excerpt_item_ids:
        by_item: dict[str, list[Transcript]] = {}
        for t in transcripts:
            by_item.setdefault(t.item_id, []).append(t)
        lines.append("## Answer excerpts")
        lines.append("")
        for item_id in excerpt_item_ids:
            lines.append(f"### {item_id}")
            lines.append("")
            for t in sorted(
                by_item.get(item_id, []),
                key=lambda t: _group_label(t.backend_id, t.cot_enabled),
            ):
                excerpt = t.answer[:excerpt_chars].replace("\n", " ")
                lines.append(f"- **{_group_label(t.backend_id, t.cot_enabled)}**: {excerpt}")
            lines.append("")

    return "\n".join(lines) + "\n", summary


def write_report(run_dir: str | Path, markdown: str, summary: dict) -> tuple[Path, Path]:
    run = Path(run_dir)
    run.mkdir(parents=True, exist_ok=True)
    md_path = run / "report.md"
    json_path = run / "report.json"
    md_path.write_text(markdown, encoding="utf-8")
    json_path.write_text(
        json.dumps(summary, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return md_path, json_path


def load_judgments(run_dir: str | Path) -> list[JudgedResult]:
    path = Path(run_dir) / "judgments.jsonl"
    if not path.exists():
        return []
    results = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            results.append(
                JudgedResult(
                    run_id=obj["run_id"],
                    item_id=obj["item_id"],
                    backend_id=obj["backend_id"],
                    cot_enabled=bool(obj.get("cot_enabled", True)),
                    score=int(obj["score"]),
                    rationale=obj.get("rationale", ""),
                )
            )
    return results


def write_judgments(run_dir: str | Path, judged: list[JudgedResult]) -> Path:
    path = Path(run_dir) / "judgments.jsonl"
    _atomic_write_jsonl(
        path,
        [
            {
                "run_id": j.run_id,
                "item_id": j.item_id,
                "backend_id": j.backend_id,
                "cot_enabled": j.cot_enabled,
                "score": j.score,
                "rationale": j.rationale,
            }
            for j in judged
        ],
    )
    return path
