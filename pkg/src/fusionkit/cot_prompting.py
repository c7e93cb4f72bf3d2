"""Assemble the chain-of-thought prompt: 5-aspect scaffold + 8 exemplars.

The enabled prompt is one system message (the per-language scaffold with
the five aspects interpolated), the eight exemplar QA pairs as alternating
user/assistant messages, then the question, 18 messages in all. Disabled, the
prompt is exactly the bare user question, so with/without comparisons
never alter the question text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import EmptyField, EmptyQuestion, WrongAspectCount, WrongExemplarCount
from .llm_client import ChatMessage

ASPECT_COUNT = 5
EXEMPLAR_COUNT = 8

# The five answer aspects the scaffold asks for, in order.
DEFAULT_ASPECTS = (
    "Background introduction of the question.",
    "Definition of terms and case analysis.",
    "Multi-angle reasoning and exploration of alternative solutions.",
    "Verification of actual cases and real-world applications.",
    "Summary and interactive guidance.",
)


@dataclass
class CoTConfig:
    aspects: list[str]
    exemplars: list[tuple[str, str]]
    scaffold: dict[str, str]  # per-language template with an {aspects} slot
    inline: bool = False  # render exemplars into the system message instead


def validate_cot_config(cfg: CoTConfig) -> CoTConfig:
    if len(cfg.aspects) != ASPECT_COUNT:
        raise WrongAspectCount(f"need exactly {ASPECT_COUNT} aspects, got {len(cfg.aspects)}")
    if any(not a.strip() for a in cfg.aspects):
        raise EmptyField("empty aspect string")
    if len(cfg.exemplars) != EXEMPLAR_COUNT:
        raise WrongExemplarCount(f"need exactly {EXEMPLAR_COUNT} exemplars, got {len(cfg.exemplars)}")
    for q, a in cfg.exemplars:
        if not q.strip() or not a.strip():
            raise EmptyField("exemplar with empty question or answer")
    for lang in ("zh", "en"):
        if lang not in cfg.scaffold:
            raise EmptyField(f"scaffold missing language {lang!r}")
        if "{aspects}" not in cfg.scaffold[lang]:
            raise EmptyField(f"scaffold for {lang!r} has no {{aspects}} slot")
    return cfg


def load_cot_config(path: str | Path | None = None) -> CoTConfig:
    """Load and validate a CoT config file; None loads the shipped default."""
    if path is None:
        raw = resources.files("fusionkit.data").joinpath("cot_default.json").read_text("utf-8")
        obj = json.loads(raw)
    else:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    cfg = CoTConfig(
        aspects=list(obj.get("aspects", [])),
        exemplars=[(e["q"], e["a"]) for e in obj.get("exemplars", [])],
        scaffold=dict(obj.get("scaffold", {})),
        inline=bool(obj.get("inline", False)),
    )
    return validate_cot_config(cfg)


def _render_aspects(aspects: list[str]) -> str:
    return "\n".join(f"{i}). {aspect}" for i, aspect in enumerate(aspects, start=1))


def _render_exemplars(exemplars: list[tuple[str, str]]) -> str:
    return "\n\n".join(f"Q: {q}\nA: {a}" for q, a in exemplars)


def assemble_cot_prompt(
    question: str,
    lang: str,
    cfg: CoTConfig,
    cot_enabled: bool = True,
) -> list[ChatMessage]:
    """Build the message sequence for one question.

    Enabled (default delivery): 1 system + 16 exemplar + 1 user = 18
    messages. Enabled with cfg.inline: exemplars render into the system
    message (2 messages). Disabled: exactly the bare user question.
    """
    if not question.strip():
        raise EmptyQuestion("question is empty")
    if not cot_enabled:
        return [ChatMessage(role="user", content=question)]
    if lang not in ("zh", "en"):
        raise ValueError(f"scaffold language must be zh or en, got {lang!r}")
    system_text = cfg.scaffold[lang].replace("{aspects}", _render_aspects(cfg.aspects))
    if cfg.inline:
        system_text = system_text + "\n\n" + _render_exemplars(cfg.exemplars)
        return [
            ChatMessage(role="system", content=system_text),
            ChatMessage(role="user", content=question),
        ]
    messages = [ChatMessage(role="system", content=system_text)]
    for q, a in cfg.exemplars:
        messages.append(ChatMessage(role="user", content=q))
        messages.append(ChatMessage(role="assistant", content=a))
    messages.append(ChatMessage(role="user", content=question))
    return messages
