"""Fusion-domain instruction corpus builder, CoT chat gateway, and assessment harness."""

from .corpus import (
    DEFAULT_BASE_MODEL,
    DEFAULT_BUDGET_UNITS,
    DEFAULT_SOURCE_PROPORTIONS,
    SamplingSpec,
    assemble_corpus,
    plan_sampling,
)
from .cot_prompting import assemble_cot_prompt, load_cot_config
from .ingest import SOURCES, chunk_document, detect_language, load_source
from .llm_client import ChatClient, ChatMessage, MockBackend
from .qagen import GENERATION_INSTRUCTION, parse_qa_pairs
from .textunits import approx_token_count

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BASE_MODEL",
    "DEFAULT_BUDGET_UNITS",
    "GENERATION_INSTRUCTION",
    "SOURCES",
    "DEFAULT_SOURCE_PROPORTIONS",
    "ChatClient",
    "ChatMessage",
    "MockBackend",
    "SamplingSpec",
    "approx_token_count",
    "assemble_corpus",
    "assemble_cot_prompt",
    "chunk_document",
    "detect_language",
    "load_cot_config",
    "load_source",
    "parse_qa_pairs",
    "plan_sampling",
    "__version__",
]
