"""HTTP face of the scan engine: /annotate, /seeds, /health.

The app holds no mutable state.  An engine is loaded before serving and is
read-only afterwards; creating the app with ``engine=None`` yields the
"still loading" behaviour (503 on everything except /health).
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .service import Annotation, ScanEngine, ServiceConfig, annotation_to_wire


def create_app(engine: ScanEngine | None, config: ServiceConfig | None = None) -> FastAPI:
    """Build the app around an engine (or None while models load).

    The request body is parsed by hand rather than through a pydantic
    model so that oversized and malformed payloads get exact 413/400
    statuses instead of validation-layer 422s.
    """
    cfg = config if config is not None else (
        engine.config if engine is not None else ServiceConfig()
    )
    app = FastAPI(title="snowclone", version=__version__, docs_url=None, redoc_url=None)
    # The extension calls from arbitrary page origins.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def unavailable() -> JSONResponse:
        return JSONResponse({"detail": "models not loaded"}, status_code=503)

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok" if engine is not None else "loading",
            "version": __version__,
        }

    @app.get("/seeds")
    def seeds():
        if engine is None:
            return unavailable()
        return {
            "seeds": [
                {
                    "seed_id": s.seed_id,
                    "quote": list(s.quote.tokens),
                    "origin_title": s.origin_title,
                    "origin_note": s.origin_note,
                }
                for s in engine.seeds
            ]
        }

    @app.post("/annotate")
    async def annotate(request: Request):
        if engine is None:
            return unavailable()
        body = await request.body()
        if len(body) > cfg.max_body_bytes:
            return JSONResponse({"detail": "body too large"}, status_code=413)
        try:
            payload = json.loads(body)
        except (UnicodeDecodeError, json.JSONDecodeError):
            return JSONResponse({"detail": "body is not valid JSON"}, status_code=400)
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            return JSONResponse(
                {"detail": 'body must be {"text": <string>}'}, status_code=400
            )
        anns: list[Annotation] = engine.annotate(payload["text"])
        return {"annotations": [annotation_to_wire(a) for a in anns]}

    return app


def serve(
    config: ServiceConfig,
    model_dir: str,
    seed_file: str,
    host: str = "127.0.0.1",
) -> None:
    """Load models and block serving until interrupted."""
    import uvicorn

    engine = ScanEngine.load(model_dir, seed_file, config)
    uvicorn.run(create_app(engine), host=host, port=config.port)
