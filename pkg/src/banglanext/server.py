"""HTTP JSON API over an immutable trained bundle.

POST /api/suggest   {context, k, engine} -> {candidates, order_used, latency_ms}
POST /api/complete  {prefix, engine, max_len} -> {tokens, terminated_by, steps}
GET  /api/health    -> {status, bundle_orders, vocab_size}

The bundle is loaded once and never mutated, so request handling is freely
concurrent; 400 covers malformed bodies and empty context, 422 an unknown
engine, 503 a bundle still loading. Optionally serves a directory of static
UI assets at /.
"""
from __future__ import annotations

import json
import mimetypes
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .predictor import DEFAULT_MAX_LEN, ENGINES, ModelBundle, complete_sentence, suggest
from .text import CleaningConfig, RawDocument, normalize, tokenize

K_MIN, K_MAX = 1, 20


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    request_queue_size = 128  # burst of concurrent clients must not get reset


class _BadRequest(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "banglanext"

    # quiet by default; the CLI enables logging via the server flag
    def log_message(self, fmt, *args):
        if self.server.verbose:  # type: ignore[attr-defined]
            super().log_message(fmt, *args)

    # -- plumbing ---------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self._cors_headers()
        self.end_headers()
        self.wfile.write(body)

    def _cors_headers(self) -> None:
        self.send_header("Access-Control-Allow-Origin", self.server.cors_origin)
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _BadRequest(400, f"malformed JSON body: {exc}") from exc
        if not isinstance(payload, dict):
            raise _BadRequest(400, "request body must be a JSON object")
        return payload

    def _bundle(self) -> ModelBundle:
        bundle = self.server.bundle  # type: ignore[attr-defined]
        if bundle is None:
            raise _BadRequest(503, "bundle still loading")
        return bundle

    def _tokens(self, payload: dict, field: str) -> list[str]:
        value = payload.get(field)
        if not isinstance(value, str):
            raise _BadRequest(400, f"{field!r} must be a string")
        tokens = tokenize(normalize(RawDocument("request", value), self.server.cleaning))
        if not tokens:
            raise _BadRequest(400, f"{field!r} is empty after cleaning")
        return tokens

    def _engine(self, payload: dict) -> str:
        engine = payload.get("engine", "neural")
        if engine not in ENGINES:
            raise _BadRequest(422, f"unknown engine {engine!r}")
        return engine

    # -- endpoints ----------------------------------------------------------

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors_headers()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        if self.path == "/api/health":
            bundle = self.server.bundle  # type: ignore[attr-defined]
            if bundle is None:
                self._send_json(503, {"status": "loading"})
                return
            self._send_json(
                200,
                {
                    "status": "ok",
                    "bundle_orders": bundle.orders(),
                    "vocab_size": bundle.vocabulary.size,
                },
            )
            return
        if self.server.static_dir is not None:  # type: ignore[attr-defined]
            self._serve_static()
            return
        self._send_json(404, {"error": f"no such endpoint: {self.path}"})

    def do_POST(self):
        started = time.perf_counter()
        try:
            if self.path == "/api/suggest":
                response = self._suggest(self._read_body(), started)
            elif self.path == "/api/complete":
                response = self._complete(self._read_body())
            else:
                self._send_json(404, {"error": f"no such endpoint: {self.path}"})
                return
        except _BadRequest as exc:
            self._send_json(exc.status, {"error": str(exc)})
            return
        self.server.count_request()  # type: ignore[attr-defined]
        self._send_json(200, response)

    def _suggest(self, payload: dict, started: float) -> dict:
        bundle = self._bundle()
        tokens = self._tokens(payload, "context")
        engine = self._engine(payload)
        k = payload.get("k", 5)
        if not isinstance(k, int) or isinstance(k, bool):
            raise _BadRequest(400, "'k' must be an integer")
        k = max(K_MIN, min(k, K_MAX))
        candidates = suggest(bundle, tokens, k=k, engine=engine)
        order_used = min(len(tokens), 5)
        return {
            "candidates": [
                {"token": c.token, "probability": c.probability} for c in candidates
            ],
            "order_used": order_used,
            "latency_ms": (time.perf_counter() - started) * 1000.0,
        }

    def _complete(self, payload: dict) -> dict:
        bundle = self._bundle()
        tokens = self._tokens(payload, "prefix")
        engine = self._engine(payload)
        max_len = payload.get("max_len", DEFAULT_MAX_LEN)
        if not isinstance(max_len, int) or isinstance(max_len, bool) or max_len < 1:
            raise _BadRequest(400, "'max_len' must be an integer >= 1")
        completion = complete_sentence(bundle, tokens, engine=engine, max_len=max_len)
        return {
            "tokens": completion.tokens,
            "terminated_by": completion.terminated_by,
            "steps": completion.steps,
        }

    def _serve_static(self):
        root = Path(self.server.static_dir).resolve()  # type: ignore[attr-defined]
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if not target.is_relative_to(root) or not target.is_file():
            self._send_json(404, {"error": f"no such file: {self.path}"})
            return
        body = target.read_bytes()
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self._cors_headers()
        self.end_headers()
        self.wfile.write(body)


class SuggestServer:
    """Thread-per-request server; `bundle=None` answers 503 until `set_bundle`."""

    def __init__(
        self,
        bundle: ModelBundle | None,
        port: int = 8080,
        cors_origin: str = "*",
        static_dir: str | None = None,
        cleaning: CleaningConfig | None = None,
        verbose: bool = False,
    ):
        self._http = _Server(("0.0.0.0", port), _Handler)
        self._http.bundle = bundle
        self._http.cors_origin = cors_origin
        self._http.static_dir = static_dir
        self._http.cleaning = cleaning or CleaningConfig.romanized()
        self._http.verbose = verbose
        self._lock = threading.Lock()
        self._requests = 0

        def count_request():
            with self._lock:
                self._requests += 1

        self._http.count_request = count_request
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._http.server_address[1]

    @property
    def request_count(self) -> int:
        with self._lock:
            return self._requests

    def set_bundle(self, bundle: ModelBundle) -> None:
        self._http.bundle = bundle

    def serve_forever(self) -> None:
        self._http.serve_forever()

    def start(self) -> "SuggestServer":
        """Run in a daemon thread (used by tests and embedding callers)."""
        self._thread = threading.Thread(target=self._http.serve_forever, daemon=True)
        self._thread.start()
        return self

    def shutdown(self) -> None:
        self._http.shutdown()
        self._http.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
