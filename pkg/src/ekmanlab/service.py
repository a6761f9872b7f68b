"""HTTP JSON inference service.

Endpoints:
  POST /api/predict  {"text": str}  -> prediction with per-class probabilities
  GET  /api/health                  -> {"status", "model_name", "uptime_s"}
  GET  /api/model                   -> bundle metadata (never weights)

The model bundle is loaded once at startup and shared immutably across
request threads; errors use {"error": {"code", "message"}} bodies.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import modelstore
from .pipeline import EmotionPipeline

MAX_TEXT_CHARS = 10_000
DEFAULT_PORT = 8080


class ServiceError(Exception):
    pass


class _Server(ThreadingHTTPServer):
    # wait for in-flight handler threads on shutdown
    daemon_threads = False
    block_on_close = True
    allow_reuse_address = True
    # a burst of concurrent clients must not overflow the accept backlog
    request_queue_size = 128


class PredictionService:
    """Owns the pipeline, the HTTP server, and request handling."""

    def __init__(self, pipeline: EmotionPipeline, cors_origins: str = "*",
                 quiet: bool = False):
        self.pipeline = pipeline
        self.cors_origins = cors_origins
        self.quiet = quiet
        self.started_at = time.monotonic()
        self._server: _Server | None = None
        self._thread: threading.Thread | None = None

    # -- request logic (transport-independent, used by the handler) --------

    def health_payload(self) -> dict:
        return {
            "status": "ok",
            "model_name": self.pipeline.model_name,
            "uptime_s": time.monotonic() - self.started_at,
        }

    def model_payload(self) -> dict:
        bundle = self.pipeline.bundle
        return {
            "format_version": bundle.format_version,
            "model_kind": bundle.model.kind,
            "pipeline_mode": bundle.pipeline_mode,
            "norm_resources_digest": bundle.norm_resources_digest,
            "metadata": bundle.metadata,
        }

    def predict_payload(self, body: bytes) -> tuple[int, dict]:
        try:
            parsed = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return 400, _error("invalid_json", "request body must be a JSON object")
        if not isinstance(parsed, dict) or "text" not in parsed:
            return 400, _error("missing_field", "JSON body must contain a 'text' field")
        text = parsed["text"]
        if not isinstance(text, str):
            return 400, _error("invalid_type", "'text' must be a string")
        if len(text) > MAX_TEXT_CHARS:
            return 400, _error(
                "text_too_long", f"'text' exceeds {MAX_TEXT_CHARS} characters"
            )
        start = time.perf_counter()
        payload = self.pipeline.predict_text(text)
        payload["elapsed_ms"] = (time.perf_counter() - start) * 1000.0
        return 200, payload

    # -- lifecycle ----------------------------------------------------------

    def start(self, port: int = DEFAULT_PORT, host: str = "127.0.0.1") -> int:
        """Bind and serve on a background thread; returns the bound port."""
        handler = _make_handler(self)
        try:
            self._server = _Server((host, port), handler)
        except OSError as exc:
            raise ServiceError(f"cannot bind {host}:{port}: {exc}") from exc
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self._server.server_address[1]

    def serve_forever(self, port: int = DEFAULT_PORT, host: str = "127.0.0.1") -> None:
        handler = _make_handler(self)
        try:
            self._server = _Server((host, port), handler)
        except OSError as exc:
            raise ServiceError(f"cannot bind {host}:{port}: {exc}") from exc
        print(f"serving {self.pipeline.model_name} on http://{host}:{self._server.server_address[1]}")
        try:
            self._server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            self._server.server_close()

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        if self._thread is not None:
            self._thread.join()
            self._thread = None


def _error(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def _make_handler(service: PredictionService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", service.cors_origins)
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", service.cors_origins)
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            if self.path == "/api/health":
                self._send(200, service.health_payload())
            elif self.path == "/api/model":
                self._send(200, service.model_payload())
            else:
                self._send(404, _error("not_found", f"unknown path {self.path}"))

        def do_POST(self):
            if self.path != "/api/predict":
                self._send(404, _error("not_found", f"unknown path {self.path}"))
                return
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length) if length else b""
            try:
                status, payload = service.predict_payload(body)
            except Exception as exc:  # defensive: surface as structured 500
                status, payload = 500, _error("internal_error", str(exc))
            self._send(status, payload)

        def log_message(self, fmt, *args):
            if not service.quiet:
                print(f"{self.address_string()} - {fmt % args}")

    return Handler


def serve(bundle_path: str | Path, port: int = DEFAULT_PORT,
          host: str = "127.0.0.1", cors_origins: str = "*") -> None:
    """Load a bundle and serve it until interrupted."""
    try:
        bundle = modelstore.load(bundle_path)
    except (OSError, modelstore.StoreError) as exc:
        raise ServiceError(f"cannot load bundle {bundle_path}: {exc}") from exc
    service = PredictionService(EmotionPipeline(bundle), cors_origins=cors_origins)
    service.serve_forever(port=port, host=host)
