"""Turn chunks into QA pairs and five-field training records.

The generation prompt sends a fixed instruction as the system message and
the chunk text as the user message; the backend's completion is parsed
back into Q/A pairs. Real LLM output drifts from the requested format, so
the parser tolerates full-width colons and numbered markers; chunks whose
completion yields nothing well-formed are counted, never silently lost.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import EmptyChunk, EmptyText, NoPairsFound
from .ingest import Chunk, detect_language
from .llm_client import ChatClient, ChatMessage
from .textunits import approx_token_count

# The exact generation instruction sent for every chunk. The instruction
# itself routes output language, so zh and en chunks share it.
GENERATION_INSTRUCTION = (
    "You are a helpful assistant. According to the language of the input text, "
    "generate highly professional and technical question-answer pairs about "
    "nuclear fusion for advanced educational purposes. Ensure that the "
    "questions are specific, research-oriented, and cover critical aspects or "
    "challenges of nuclear fusion, such as plasma confinement, energy "
    "efficiency, or tokamak design. If the text is in Chinese, generate Q&A "
    "pairs in Chinese; if the text is in English, generate Q&A pairs in "
    "English. Ensure the format is consistent: Q: <question> A: <answer>."
)

TRANSLATE_PROMPT = (
    "Translate the following text to {target}. Output only the translation, "
    "with no preamble or commentary.\n\n{text}"
)

REFINE_PROMPT = (
    "Rewrite the following question so it is fluent, precise, and preserves "
    "the original meaning exactly. Output only the rewritten question.\n\n{text}"
)

LANG_NAMES = {"zh": "Chinese", "en": "English"}

# Q/A markers: optional number, ASCII or full-width colon, at line start or
# after whitespace (LLMs regularly emit "Q: ... A: ..." on one line).
_MARKER = re.compile(r"(?:(?<=\s)|^)([QA])(\d{0,3})\s*[:：]", re.IGNORECASE)


@dataclass
class QAPair:
    question: str
    answer: str
    lang: str
    provenance: tuple[str, int]  # (doc_id, chunk_index)


@dataclass
class TrainingRecord:
    instruction: str
    input: str = ""
    output: str = ""
    system: str = ""
    history: list[tuple[str, str]] = field(default_factory=list)
    source: str = ""
    unit_count: int = 0
    augmented: bool = False
    doc_id: str = ""
    chunk_index: int = 0


@dataclass
class GenStats:
    chunks_processed: int = 0
    chunks_skipped: int = 0  # completion had no well-formed pairs
    pairs_kept: int = 0
    pairs_dropped_language: int = 0
    pairs_dropped_malformed: int = 0

    def merge(self, other: "GenStats") -> None:
        self.chunks_processed += other.chunks_processed
        self.chunks_skipped += other.chunks_skipped
        self.pairs_kept += other.pairs_kept
        self.pairs_dropped_language += other.pairs_dropped_language
        self.pairs_dropped_malformed += other.pairs_dropped_malformed


def build_generation_prompt(chunk: Chunk) -> list[ChatMessage]:
    if not chunk.text.strip():
        raise EmptyChunk(f"chunk {chunk.doc_id}#{chunk.index} is empty")
    return [
        ChatMessage(role="system", content=GENERATION_INSTRUCTION),
        ChatMessage(role="user", content=chunk.text),
    ]


def _pair_language(question: str, answer: str) -> str:
    try:
        return detect_language(question + " " + answer)
    except EmptyText:
        return "other"


def parse_qa_pairs(
    completion_text: str,
    expected_lang: str,
    stats: GenStats | None = None,
) -> list[QAPair]:
    """Extract Q/A pairs from a completion.

    A well-formed pair is a Q marker followed by exactly one A marker before
    the next Q. Pairs whose detected language differs from expected_lang are
    dropped and counted. Raises NoPairsFound when non-empty text contains no
    well-formed pair at all.
    """
    stats = stats if stats is not None else GenStats()
    markers = list(_MARKER.finditer(completion_text))
    spans: list[tuple[str, str]] = []  # (kind, text up to next marker)
    for i, m in enumerate(markers):
        end = markers[i + 1].start() if i + 1 < len(markers) else len(completion_text)
        spans.append((m.group(1).upper(), completion_text[m.end():end].strip()))

    pairs: list[QAPair] = []
    found_well_formed = False
    i = 0
    while i < len(spans):
        kind, text = spans[i]
        if kind != "Q":
            stats.pairs_dropped_malformed += 1
            i += 1
            continue
        answers = []
        j = i + 1
        while j < len(spans) and spans[j][0] == "A":
            answers.append(spans[j][1])
            j += 1
        if len(answers) != 1 or not text or not answers[0]:
            stats.pairs_dropped_malformed += 1
            i = j
            continue
        found_well_formed = True
        lang = _pair_language(text, answers[0])
        if lang != expected_lang:
            stats.pairs_dropped_language += 1
        else:
            pairs.append(QAPair(question=text, answer=answers[0], lang=lang, provenance=("", 0)))
            stats.pairs_kept += 1
        i = j
    if not found_well_formed:
        raise NoPairsFound("no well-formed Q/A pair in completion")
    return pairs


def generate_qa(chunk: Chunk, client: ChatClient, stats: GenStats | None = None) -> list[QAPair]:
    """Prompt the backend for one chunk and parse the completion.

    A completion without well-formed pairs skips the chunk (counted in
    stats), it is not fatal. Client errors propagate.
    """
    stats = stats if stats is not None else GenStats()
    expected_lang = detect_language(chunk.text)
    stats.chunks_processed += 1
    if expected_lang == "other":
        stats.chunks_skipped += 1
        return []
    messages = build_generation_prompt(chunk)
    completion = client.chat(messages)
    try:
        pairs = parse_qa_pairs(completion.text, expected_lang, stats)
    except NoPairsFound:
        stats.chunks_skipped += 1
        return []
    return [replace(p, provenance=(chunk.doc_id, chunk.index)) for p in pairs]


def generate_many(
    chunks: Sequence[Chunk],
    client: ChatClient,
    jobs: int = 1,
    stats: GenStats | None = None,
) -> list[list[QAPair]]:
    """Run generate_qa over chunks with bounded parallelism.

    Results come back in chunk order regardless of completion order.
    """
    stats = stats if stats is not None else GenStats()
    if jobs <= 1:
        return [generate_qa(c, client, stats) for c in chunks]
    per_chunk_stats = [GenStats() for _ in chunks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(generate_qa, chunks, [client] * len(chunks), per_chunk_stats))
    for s in per_chunk_stats:
        stats.merge(s)
    return results


def make_training_record(qa: QAPair, source: str = "") -> TrainingRecord:
    """Five-field record: instruction := question, output := answer, rest empty."""
    return TrainingRecord(
        instruction=qa.question,
        input="",
        output=qa.answer,
        system="",
        history=[],
        source=source,
        unit_count=approx_token_count(qa.question) + approx_token_count(qa.answer),
        doc_id=qa.provenance[0],
        chunk_index=qa.provenance[1],
    )


def back_translate_augment(
    record: TrainingRecord,
    pivot: str,
    client: ChatClient,
    refine: bool = False,
) -> TrainingRecord:
    """Paraphrase the instruction by translating to `pivot` and back.

    Two client calls (plus one refine call when enabled); any failure
    propagates before a record is produced. The caller drops the result if
    the paraphrase equals the original after normalization.
    """
    lang = detect_language(record.instruction)
    if pivot == lang:
        raise ValueError(f"pivot language equals record language ({pivot})")
    if pivot not in LANG_NAMES:
        raise ValueError(f"unsupported pivot language: {pivot!r}")
    there = client.chat(
        [ChatMessage("user", TRANSLATE_PROMPT.format(target=LANG_NAMES[pivot], text=record.instruction))]
    )
    back_target = LANG_NAMES.get(lang, LANG_NAMES["en"])
    back = client.chat(
        [ChatMessage("user", TRANSLATE_PROMPT.format(target=back_target, text=there.text))]
    )
    paraphrase = back.text.strip()
    if refine:
        refined = client.chat([ChatMessage("user", REFINE_PROMPT.format(text=paraphrase))])
        paraphrase = refined.text.strip()
    return replace(
        record,
        instruction=paraphrase,
        unit_count=approx_token_count(paraphrase) + approx_token_count(record.output),
        augmented=True,
    )


def record_to_json(record: TrainingRecord) -> str:
    """Serialize in the dataset wire format: five fields plus a meta sub-object."""
    return json.dumps(
        {
            "instruction": record.instruction,
            "input": record.input,
            "output": record.output,
            "system": record.system,
            "history": [list(turn) for turn in record.history],
            "meta": {
                "source": record.source,
                "unit_count": record.unit_count,
                "augmented": record.augmented,
                "doc_id": record.doc_id,
                "chunk_index": record.chunk_index,
            },
        },
        ensure_ascii=False,
    )


def record_from_json(line: str) -> TrainingRecord:
    from .corpus import record_from_obj  # shared schema validation

    return record_from_obj(json.loads(line))


def write_records(records: Iterable[TrainingRecord], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(record_to_json(rec) + "\n")
            count += 1
    return count
