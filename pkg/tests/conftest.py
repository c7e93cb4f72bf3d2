import random
from pathlib import Path

import pytest

from fusionkit.ingest import SourceDocument
from fusionkit.llm_client import ChatClient, MockBackend

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def sources_dir() -> Path:
    return FIXTURES / "sources"


def make_client(spec: dict, **kwargs) -> ChatClient:
    """Client over a scripted mock with sleeps disabled and a fixed rng."""
    backend = MockBackend.from_spec(spec)
    kwargs.setdefault("sleeper", lambda s: None)
    kwargs.setdefault("rng", random.Random(0))
    return ChatClient(backend, **kwargs)


def make_doc(text: str, doc_id: str = "doc-1", source: str = "arxiv", lang: str = "en") -> SourceDocument:
    return SourceDocument(id=doc_id, source=source, lang=lang, text=text, meta={})
