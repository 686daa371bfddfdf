"""HTTP serve mode.

One session per server process. GETs read immutable snapshot strings, so
they never block; POSTs take a non-blocking evaluation lock and answer
409 when a pulse is already running. POST /spec builds the replacement
session completely (through pulse 0) before swapping it in, so a bad spec
leaves the old one untouched.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Union

from .errors import FlowlensError, SpecSyntaxError
from .pipeline import Session
from .profiler import serialize_report


def snapshot_session(session: Session):
    """Render a session into the three immutable GET bodies."""
    report = session.report()
    summaries = [{
        "pulse_id": p["pulse_id"],
        "trigger": p["trigger"],
        "wall_total": p["wall_total"],
        "evaluated_count": len(p["evaluated"]),
    } for p in report.pulses]
    return (serialize_report(report), json.dumps(summaries, indent=2) + "\n",
            report.scene_svg)


def error_payload(exc: FlowlensError) -> dict:
    err = {"message": exc.message}
    if isinstance(exc, SpecSyntaxError):
        err["line"] = exc.line
        err["col"] = exc.col
    if getattr(exc, "path", None) is not None:
        err["path"] = list(exc.path)
    if getattr(exc, "span", None) is not None:
        err["span"] = exc.span.to_json()
    return {"error": err}


class FlowlensServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, data_dir: Path, session: Session,
                 ui_dir: Optional[Path] = None):
        super().__init__(address, _Handler)
        self.data_dir = data_dir
        self.ui_dir = ui_dir
        self.eval_lock = threading.Lock()
        self.session = session
        self.report_json = ""
        self.pulses_json = ""
        self.svg = ""
        self.refresh_snapshots()

    def refresh_snapshots(self) -> None:
        self.report_json, self.pulses_json, self.svg = snapshot_session(self.session)


class _Handler(BaseHTTPRequestHandler):
    server: FlowlensServer

    def log_message(self, fmt, *args):  # keep test output clean
        pass

    def _send(self, status: int, content_type: str, body: str) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _send_json(self, status: int, payload) -> None:
        self._send(status, "application/json", json.dumps(payload) + "\n")

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/report":
            self._send(200, "application/json", self.server.report_json)
        elif path == "/pulses":
            self._send(200, "application/json", self.server.pulses_json)
        elif path == "/scene":
            self._send(200, "image/svg+xml", self.server.svg)
        else:
            self._serve_static(path)

    def _serve_static(self, path: str) -> None:
        ui_dir = self.server.ui_dir
        if ui_dir is None:
            self._send_json(404, {"error": {"message": f"no route {path}"}})
            return
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (ui_dir / rel).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            self._send_json(404, {"error": {"message": f"no route {path}"}})
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self._send(200, ctype, target.read_text(encoding="utf-8"))

    def _read_body(self) -> Optional[dict]:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._send_json(400, {"error": {"message": "body must be JSON"}})
            return None
        if not isinstance(body, dict):
            self._send_json(400, {"error": {"message": "body must be a JSON object"}})
            return None
        return body

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if path not in ("/signal", "/spec"):
            self._send_json(404, {"error": {"message": f"no route {path}"}})
            return
        body = self._read_body()
        if body is None:
            return
        if not self.server.eval_lock.acquire(blocking=False):
            self._send_json(409, {"error": {"message": "evaluation in progress"}})
            return
        try:
            if path == "/signal":
                self._post_signal(body)
            else:
                self._post_spec(body)
        finally:
            self.server.eval_lock.release()

    def _post_signal(self, body: dict) -> None:
        if "name" not in body or "value" not in body:
            self._send_json(400, {"error": {"message": "need name and value"}})
            return
        try:
            pulse = self.server.session.apply_event(body["name"], body["value"])
        except FlowlensError as exc:
            self._send_json(400, error_payload(exc))
            return
        self.server.refresh_snapshots()
        self._send_json(200, {"pulse_id": pulse.pulse_id})

    def _post_spec(self, body: dict) -> None:
        if not isinstance(body.get("text"), str):
            self._send_json(400, {"error": {"message": "need text (a string)"}})
            return
        try:
            session = Session.from_text(body["text"], self.server.data_dir)
            session.run_initial()
            # build the snapshots too before swapping anything, so a spec
            # that fails at any stage leaves the old session fully intact
            snapshots = snapshot_session(session)
        except FlowlensError as exc:
            self._send_json(400, error_payload(exc))
            return
        self.server.session = session
        self.server.report_json, self.server.pulses_json, self.server.svg = snapshots
        self._send(200, "application/json", self.server.report_json)


def make_server(spec_text: str, data_dir: Union[str, Path], port: int = 8642,
                host: str = "127.0.0.1",
                ui_dir: Optional[Path] = None) -> FlowlensServer:
    session = Session.from_text(spec_text, data_dir)
    session.run_initial()
    return FlowlensServer((host, port), Path(data_dir), session, ui_dir=ui_dir)
