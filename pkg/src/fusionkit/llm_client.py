"""Pluggable chat-completion client: wire protocol, retries, limits, mock.

The wire shape is the de-facto chat-completions JSON-over-HTTP protocol
(messages array of {role, content}; response carrying
choices[0].message.content), which every backend we target exposes. Auth
is a bearer token read from the ``FUSION_LLM_TOKEN`` environment variable.

Every other module's tests run offline against :class:`MockBackend`, a
file-scripted queue of responses with call instrumentation.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import httpx

from .errors import InvalidMessages, NonRetryable, ProtocolError, RetriesExhausted

TOKEN_ENV_VAR = "FUSION_LLM_TOKEN"

DEFAULT_MODEL_ID = "Qwen2.5-14B"
DEFAULT_TEMPERATURE = 0.7
DEFAULT_TIMEOUT_S = 120.0  # CoT answers are long


@dataclass
class ChatMessage:
    role: str  # system | user | assistant
    content: str


@dataclass
class Completion:
    text: str
    usage: dict | None = None
    attempts: int = 1


@dataclass
class ChatParams:
    model_id: str = DEFAULT_MODEL_ID
    temperature: float = DEFAULT_TEMPERATURE
    max_output_units: int | None = None


class TransientBackendError(Exception):
    """Retryable failure: HTTP 429/5xx or a timeout."""


def validate_messages(messages: list[ChatMessage]) -> None:
    """Reject empty message lists, bad roles, and broken user/assistant alternation."""
    if not messages:
        raise InvalidMessages("empty message list")
    i = 0
    while i < len(messages) and messages[i].role == "system":
        i += 1
    expected = "user"
    for msg in messages[i:]:
        if msg.role not in ("user", "assistant"):
            raise InvalidMessages(f"unexpected role {msg.role!r} after system prefix")
        if msg.role != expected:
            raise InvalidMessages(f"roles must alternate user/assistant, got {msg.role!r}")
        if not msg.content:
            raise InvalidMessages(f"empty content for role {msg.role!r}")
        expected = "assistant" if expected == "user" else "user"
    if i == len(messages):
        raise InvalidMessages("no user message after system prefix")


class Backend(Protocol):
    def complete(self, messages: list[ChatMessage], params: ChatParams) -> Completion: ...

    def healthy(self) -> bool: ...


class HTTPBackend:
    """POST {base_url}/chat/completions with bearer auth from the environment."""

    def __init__(self, base_url: str, timeout_s: float = DEFAULT_TIMEOUT_S):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(TOKEN_ENV_VAR, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, messages: list[ChatMessage], params: ChatParams) -> Completion:
        body: dict = {
            "model": params.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": params.temperature,
        }
        if params.max_output_units is not None:
            body["max_tokens"] = params.max_output_units
        try:
            resp = httpx.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers=self._headers(),
                timeout=self.timeout_s,
            )
        except httpx.TimeoutException as exc:
            raise TransientBackendError(f"timeout: {exc}") from exc
        except httpx.HTTPError as exc:
            raise TransientBackendError(f"transport error: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientBackendError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise NonRetryable(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            payload = resp.json()
            text = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"malformed completion response: {exc}") from exc
        if not isinstance(text, str):
            raise ProtocolError("completion content is not a string")
        usage = None
        raw_usage = payload.get("usage")
        if isinstance(raw_usage, dict):
            usage = {
                "prompt_units": raw_usage.get("prompt_tokens"),
                "completion_units": raw_usage.get("completion_tokens"),
            }
        return Completion(text=text, usage=usage)

    def healthy(self) -> bool:
        try:
            resp = httpx.get(f"{self.base_url}/healthz", timeout=2.0)
            return resp.status_code < 500
        except httpx.HTTPError:
            return False


@dataclass
class MockEntry:
    respond: str | None = None
    fail: str | None = None  # "429" | "500" | "timeout" | "400" | "protocol"
    match_substring: str | None = None
    repeat: bool = False
    consumed: bool = False


@dataclass
class MockCall:
    messages: list[ChatMessage]
    params: ChatParams


class MockBackend:
    """Scripted backend: an ordered consume-once queue of respond/fail entries.

    Entries with ``repeat: true`` are never consumed; an optional ``default``
    entry answers any request the queue does not. ``respond`` strings may
    use ``{{last_user}}`` (content of the last user message) and ``{{hash}}``
    (8 hex chars derived from the full message sequence) so one stateless
    entry can produce varied deterministic output.

    Instrumentation: every call is recorded, and the peak number of
    concurrently active calls is tracked for concurrency-bound assertions.
    """

    def __init__(self, entries: list[MockEntry], default: MockEntry | None = None,
                 latency_s: float = 0.0):
        self.entries = entries
        self.default = default
        self.latency_s = latency_s
        self.calls: list[MockCall] = []
        self.max_in_flight_seen = 0
        self._active = 0
        self._lock = threading.Lock()

    @classmethod
    def from_script(cls, path: str | Path) -> "MockBackend":
        with open(path, encoding="utf-8") as fh:
            return cls.from_spec(json.load(fh))

    @classmethod
    def from_spec(cls, spec: dict) -> "MockBackend":
        entries = [cls._parse_entry(e) for e in spec.get("entries", [])]
        default = cls._parse_entry(spec["default"]) if "default" in spec else None
        return cls(entries, default=default, latency_s=spec.get("latency_s", 0.0))

    @staticmethod
    def _parse_entry(obj: dict) -> MockEntry:
        if ("respond" in obj) == ("fail" in obj):
            raise ValueError(f"mock entry needs exactly one of respond/fail: {obj}")
        return MockEntry(
            respond=obj.get("respond"),
            fail=str(obj["fail"]) if "fail" in obj else None,
            match_substring=obj.get("match_substring"),
            repeat=bool(obj.get("repeat", False)),
        )

    @property
    def call_count(self) -> int:
        return len(self.calls)

    def _pick(self, request_text: str) -> MockEntry:
        for entry in self.entries:
            if entry.consumed:
                continue
            if entry.match_substring is not None and entry.match_substring not in request_text:
                continue
            if not entry.repeat:
                entry.consumed = True
            return entry
        if self.default is not None:
            return self.default
        raise ProtocolError("mock script has no entry for this request")

    @staticmethod
    def _render(template: str, messages: list[ChatMessage]) -> str:
        out = template
        if "{{last_user}}" in out:
            last_user = next((m.content for m in reversed(messages) if m.role == "user"), "")
            out = out.replace("{{last_user}}", last_user)
        if "{{hash}}" in out:
            digest = hashlib.sha256(
                "\x1e".join(f"{m.role}:{m.content}" for m in messages).encode("utf-8")
            ).hexdigest()[:8]
            out = out.replace("{{hash}}", digest)
        return out

    def complete(self, messages: list[ChatMessage], params: ChatParams) -> Completion:
        with self._lock:
            self._active += 1
            self.max_in_flight_seen = max(self.max_in_flight_seen, self._active)
            self.calls.append(MockCall(messages=list(messages), params=params))
            request_text = "\n".join(m.content for m in messages)
            entry = self._pick(request_text)
        try:
            if self.latency_s:
                time.sleep(self.latency_s)
            if entry.fail is not None:
                if entry.fail == "timeout":
                    raise TransientBackendError("scripted timeout")
                if entry.fail == "protocol":
                    raise ProtocolError("scripted malformed response")
                status = int(entry.fail)
                if status == 429 or status >= 500:
                    raise TransientBackendError(f"scripted HTTP {status}")
                raise NonRetryable(f"scripted HTTP {status}")
            assert entry.respond is not None
            return Completion(text=self._render(entry.respond, messages))
        finally:
            with self._lock:
                self._active -= 1

    def healthy(self) -> bool:
        return True


class ChatClient:
    """Retrying, rate-limited front over a backend; shareable across workers.

    Transient failures (429/5xx/timeouts) retry with exponential backoff:
    base 1 s, factor 2, jitter +/-20%, at most `max_retries` retries after
    the initial attempt. A semaphore bounds concurrent in-flight requests
    and an optional requests-per-minute ceiling paces issue times.
    """

    def __init__(
        self,
        backend: Backend,
        params: ChatParams | None = None,
        max_retries: int = 5,
        backoff_base_s: float = 1.0,
        backoff_factor: float = 2.0,
        jitter: float = 0.2,
        max_in_flight: int | None = None,
        requests_per_minute: int | None = None,
        sleeper: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
        rng: random.Random | None = None,
    ):
        self.backend = backend
        self.params = params or ChatParams()
        self.max_retries = max_retries
        self.max_in_flight = max_in_flight
        self.backoff_base_s = backoff_base_s
        self.backoff_factor = backoff_factor
        self.jitter = jitter
        self._sleep = sleeper
        self._clock = clock
        self._rng = rng or random.Random()
        self._sem = threading.Semaphore(max_in_flight) if max_in_flight else None
        self._rpm = requests_per_minute
        self._issue_times: deque[float] = deque()
        self._rpm_lock = threading.Lock()

    def _pace(self) -> None:
        if not self._rpm:
            return
        while True:
            with self._rpm_lock:
                now = self._clock()
                while self._issue_times and now - self._issue_times[0] >= 60.0:
                    self._issue_times.popleft()
                if len(self._issue_times) < self._rpm:
                    self._issue_times.append(now)
                    return
                wait = 60.0 - (now - self._issue_times[0])
            self._sleep(max(wait, 0.01))

    def _backoff_delay(self, retry_index: int) -> float:
        base = self.backoff_base_s * (self.backoff_factor ** retry_index)
        return base * self._rng.uniform(1.0 - self.jitter, 1.0 + self.jitter)

    def chat(self, messages: list[ChatMessage], params: ChatParams | None = None) -> Completion:
        validate_messages(messages)
        effective = params or self.params
        last_error: Exception | None = None
        for attempt in range(1, self.max_retries + 2):
            if self._sem is not None:
                self._sem.acquire()
            try:
                self._pace()
                completion = self.backend.complete(messages, effective)
                completion.attempts = attempt
                return completion
            except TransientBackendError as exc:
                last_error = exc
            finally:
                if self._sem is not None:
                    self._sem.release()
            if attempt <= self.max_retries:
                self._sleep(self._backoff_delay(attempt - 1))
        raise RetriesExhausted(
            f"gave up after {self.max_retries + 1} attempts: {last_error}"
        ) from last_error

    def healthy(self) -> bool:
        return self.backend.healthy()


def client_from_config(cfg: dict) -> ChatClient:
    """Build a client from the `client` section of a run config."""
    params = ChatParams(
        model_id=cfg.get("model_id", DEFAULT_MODEL_ID),
        temperature=cfg.get("temperature", DEFAULT_TEMPERATURE),
        max_output_units=cfg.get("max_output_units"),
    )
    backend: Backend
    if cfg.get("mock_script"):
        backend = MockBackend.from_script(cfg["mock_script"])
    elif cfg.get("base_url"):
        backend = HTTPBackend(cfg["base_url"], timeout_s=cfg.get("timeout_s", DEFAULT_TIMEOUT_S))
    else:
        raise ValueError("client config needs base_url or mock_script")
    return ChatClient(
        backend,
        params=params,
        max_retries=cfg.get("max_retries", 5),
        max_in_flight=cfg.get("max_in_flight"),
        requests_per_minute=cfg.get("requests_per_minute"),
    )
