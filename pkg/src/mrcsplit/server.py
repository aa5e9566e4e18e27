"""HTTP backend for the annotation UI.

Serves blinded tasks one at a time, validates submitted labels against
the record schema, and appends accepted records to a durable
line-delimited log. Restarting the server replays the log, so a crash
mid-collection loses nothing. All mutation goes through one lock; the
log is the single source of truth.
"""

from __future__ import annotations

import json
import mimetypes
import os
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import provenance as prov
from .annotate import (
    AnnotationTask,
    RELATION_LABELS,
    SKILL_LABELS,
    VALIDITY_LABELS,
    validate_record,
)
from .errors import BindFailure, MalformedFile, StoreUnwritable

LEASE_SECONDS = 30 * 60

# Shown by the UI; the constraint wording mirrors validate_record.
LABEL_SCHEMA = {
    "validity": list(VALIDITY_LABELS),
    "skill": list(SKILL_LABELS),
    "relation": list(RELATION_LABELS),
    "constraints": [
        "pick exactly one validity label for every question",
        "skill and the multi-sentence flag are given exactly when validity is valid",
        "a relation is given exactly when multi-sentence is true; none is a real choice",
    ],
}


class SessionState:
    """Task queue plus append-only record log, safe for concurrent use."""

    def __init__(
        self,
        tasks: list,
        store_path,
        lease_seconds: float = LEASE_SECONDS,
        clock=time.monotonic,
        header: dict | None = None,
    ):
        self.tasks = {task.task_id: task for task in tasks}
        self.order = [task.task_id for task in tasks]
        self.store_path = Path(store_path)
        self.lease_seconds = lease_seconds
        self.clock = clock
        self.lock = threading.Lock()
        self.submitted: dict[str, dict] = {}
        self.leases: dict[str, tuple[str, float]] = {}  # task_id -> (annotator, expiry)
        self._replay()
        if not self.store_path.exists():
            try:
                with open(self.store_path, "w", encoding="utf-8") as fh:
                    fh.write(
                        json.dumps(
                            {"_provenance": header or prov.make_provenance("serve")},
                            ensure_ascii=False,
                            sort_keys=True,
                        )
                        + "\n"
                    )
            except OSError as exc:
                raise StoreUnwritable(f"{self.store_path}: {exc}") from exc

    def _replay(self) -> None:
        """Restore submitted-set from the log. A torn final line (crash
        mid-append) is dropped; corruption anywhere else is an error."""
        if not self.store_path.exists():
            return
        with open(self.store_path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        for lineno, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                body = json.loads(line)
            except json.JSONDecodeError as exc:
                if lineno == len(lines) - 1:
                    break
                raise MalformedFile(
                    f"{self.store_path}:{lineno + 1}: {exc}"
                ) from exc
            if "_provenance" in body:
                continue
            self.submitted[body["task_id"]] = body

    def next_task(self, annotator: str):
        """Earliest unsubmitted task that is unleased, expired, or
        already leased to this annotator (resume case)."""
        now = self.clock()
        with self.lock:
            for task_id in self.order:
                if task_id in self.submitted:
                    continue
                lease = self.leases.get(task_id)
                if lease is not None and lease[1] > now and lease[0] != annotator:
                    continue
                self.leases[task_id] = (annotator, now + self.lease_seconds)
                return self.tasks[task_id]
        return None

    def submit(self, body) -> tuple[int, dict]:
        violations = validate_record(body)
        if violations:
            return 422, {"error": "schema_violation", "violations": violations}
        task_id = body["task_id"]
        with self.lock:
            if task_id in self.submitted:
                return 409, {"error": "already_submitted", "task_id": task_id}
            if task_id not in self.tasks:
                return 422, {
                    "error": "schema_violation",
                    "violations": [f"unknown task id {task_id!r}"],
                }
            try:
                with open(self.store_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(body, ensure_ascii=False, sort_keys=True) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StoreUnwritable(f"{self.store_path}: {exc}") from exc
            self.submitted[task_id] = dict(body)
            self.leases.pop(task_id, None)
        return 200, {"ok": True, "task_id": task_id}

    def progress(self) -> dict:
        now = self.clock()
        with self.lock:
            remaining = sum(1 for t in self.order if t not in self.submitted)
            leased = sum(
                1
                for task_id, (_, expiry) in self.leases.items()
                if task_id not in self.submitted and expiry > now
            )
            return {
                "remaining": remaining,
                "submitted": len(self.submitted),
                "leased": leased,
            }

    def export_records(self) -> list[dict]:
        with self.lock:
            return [dict(self.submitted[t]) for t in self.order if t in self.submitted]


def _make_handler(state: SessionState, allow_export: bool, ui_dir):
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _send_empty(self, status: int) -> None:
            self.send_response(status)
            self.send_header("Content-Length", "0")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            parsed = urlparse(self.path)
            if parsed.path == "/api/tasks/next":
                query = parse_qs(parsed.query)
                annotator = query.get("annotator", ["anonymous"])[0]
                task = state.next_task(annotator)
                if task is None:
                    self._send_empty(204)
                else:
                    self._send_json(200, task.payload())
            elif parsed.path == "/api/progress":
                self._send_json(200, state.progress())
            elif parsed.path == "/api/schema":
                self._send_json(200, LABEL_SCHEMA)
            elif parsed.path == "/api/export":
                if not allow_export:
                    self._send_json(403, {"error": "export_disabled"})
                else:
                    self._send_json(200, {"records": state.export_records()})
            elif ui_root is not None and not parsed.path.startswith("/api/"):
                self._serve_static(parsed.path)
            else:
                self._send_json(404, {"error": "not_found"})

        def _serve_static(self, path: str) -> None:
            relative = path.lstrip("/") or "index.html"
            target = (ui_root / relative).resolve()
            if not str(target).startswith(str(ui_root)) or not target.is_file():
                self._send_json(404, {"error": "not_found"})
                return
            content = target.read_bytes()
            ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(content)))
            self.end_headers()
            self.wfile.write(content)

        def do_POST(self):
            parsed = urlparse(self.path)
            if parsed.path != "/api/labels":
                self._send_json(404, {"error": "not_found"})
                return
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            try:
                body = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError):
                self._send_json(400, {"error": "bad_json"})
                return
            status, payload = state.submit(body)
            self._send_json(status, payload)

    return Handler


def create_server(
    tasks: list,
    store_path,
    host: str = "127.0.0.1",
    port: int = 0,
    allow_export: bool = False,
    ui_dir=None,
    lease_seconds: float = LEASE_SECONDS,
    header: dict | None = None,
) -> ThreadingHTTPServer:
    """Build the HTTP server (unstarted). Port 0 picks a free port; the
    chosen one is on server.server_address."""
    state = SessionState(tasks, store_path, lease_seconds, header=header)
    handler = _make_handler(state, allow_export, ui_dir)
    try:
        server = ThreadingHTTPServer((host, port), handler)
    except OSError as exc:
        raise BindFailure(f"cannot bind {host}:{port}: {exc}") from exc
    server.state = state
    return server


def load_tasks(path) -> list[AnnotationTask]:
    """Read a blinded task file (provenance header plus one task per line)."""
    header, records = prov.read_jsonl(path)
    del header
    return [AnnotationTask.from_payload(record) for record in records]
