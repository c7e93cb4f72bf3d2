"""HTTP service fronting a chat backend with the CoT prompt layer.

Stateless by design: no server-side conversation memory, every request
carries its own question. Multi-turn context is the caller's problem (the
web UI can resend prior turns inside the question if the user opts in).

Routes:
    POST /v1/ask     question in, answer out; optional chunked streaming
    GET  /healthz    upstream probe, bounded at 2 seconds
    GET  /v1/config  active model id and CoT shape (nothing secret)
    /ui              static files for the bundled web chat, when present
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .cot_prompting import CoTConfig, assemble_cot_prompt, load_cot_config
from .errors import EmptyQuestion, FusionKitError
from .ingest import detect_language
from .llm_client import ChatClient, client_from_config

HEALTH_PROBE_BOUND_S = 2.0
STREAM_SENTINEL = "[DONE]"
STREAM_CHUNK_CHARS = 48


class AskRequest(BaseModel):
    question: str
    lang: str | None = None
    cot: bool = True
    stream: bool = False


class AskResponse(BaseModel):
    answer: str
    cot_used: bool
    message_count: int
    latency_ms: int


def _resolve_lang(question: str, lang: str | None) -> str:
    if lang in ("zh", "en"):
        return lang
    detected = detect_language(question)
    return detected if detected in ("zh", "en") else "en"


def create_app(
    client: ChatClient,
    cot_cfg: CoTConfig | None = None,
    model_id: str = "",
    ui_dir: str | Path | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    cfg = cot_cfg if cot_cfg is not None else load_cot_config()
    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)
    app.state.client = client
    app.state.draining = False
    app.state.health_pool = ThreadPoolExecutor(max_workers=2, thread_name_prefix="healthz")

    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins if cors_origins is not None else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    def begin_drain() -> None:
        app.state.draining = True

    app.state.begin_drain = begin_drain

    @app.post("/v1/ask")
    def ask(body: AskRequest):
        if app.state.draining:
            return JSONResponse(status_code=503, content={"error": "draining"})
        question = body.question
        if not question.strip():
            return JSONResponse(status_code=400, content={"error": "empty question"})
        try:
            lang = _resolve_lang(question, body.lang)
            messages = assemble_cot_prompt(question, lang, cfg, cot_enabled=body.cot)
        except EmptyQuestion:
            return JSONResponse(status_code=400, content={"error": "empty question"})
        start = time.monotonic()
        try:
            completion = client.chat(messages)
        except FusionKitError as exc:
            return JSONResponse(
                status_code=502,
                content={"error": f"upstream failure: {type(exc).__name__}"},
            )
        latency_ms = int((time.monotonic() - start) * 1000)
        if body.stream:
            def frames():
                text = completion.text
                for i in range(0, len(text), STREAM_CHUNK_CHARS):
                    yield text[i : i + STREAM_CHUNK_CHARS]
                yield f"\n{STREAM_SENTINEL}\n"

            return StreamingResponse(frames(), media_type="text/plain; charset=utf-8")
        return AskResponse(
            answer=completion.text,
            cot_used=body.cot,
            message_count=len(messages),
            latency_ms=latency_ms,
        )

    @app.get("/healthz")
    def healthz():
        if app.state.draining:
            return JSONResponse(status_code=503, content={"status": "draining"})
        future = app.state.health_pool.submit(client.backend.healthy)
        try:
            ok = future.result(timeout=HEALTH_PROBE_BOUND_S)
        except FutureTimeoutError:
            ok = False
        except Exception:
            ok = False
        if not ok:
            return JSONResponse(status_code=503, content={"status": "degraded"})
        return {"status": "ok"}

    @app.get("/v1/config")
    def config():
        return {
            "model_id": model_id,
            "cot": {
                "aspects": list(cfg.aspects),
                "exemplar_count": len(cfg.exemplars),
                "inline": cfg.inline,
            },
            "stream_supported": True,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def app_from_config(path: str | Path) -> tuple[FastAPI, dict]:
    """Build the app from a JSON config file; returns (app, settings).

    Recognized keys: listen_addr, upstream_url, cot_config_path,
    max_inflight, mock_script, model_id, ui_dir, cors_origins.
    """
    with open(path, encoding="utf-8") as fh:
        settings = json.load(fh)
    client_cfg: dict = {}
    if "upstream_url" in settings:
        client_cfg["base_url"] = settings["upstream_url"]
    if "mock_script" in settings:
        client_cfg["mock_script"] = settings["mock_script"]
    if "max_inflight" in settings:
        client_cfg["max_in_flight"] = settings["max_inflight"]
    if "model_id" in settings:
        client_cfg["model_id"] = settings["model_id"]
    client = client_from_config(client_cfg)
    cot_cfg = load_cot_config(settings.get("cot_config_path"))
    app = create_app(
        client,
        cot_cfg,
        model_id=settings.get("model_id", ""),
        ui_dir=settings.get("ui_dir"),
        cors_origins=settings.get("cors_origins"),
    )
    return app, settings
