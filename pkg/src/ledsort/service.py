"""Long-running operator service around the sorting engine.

One engine loop thread is the single writer; every reader gets immutable
snapshot documents. Control commands are applied between engine steps, so a
pause lands on an LED boundary and counters never tear.

Wire protocol (documented contract, version 1)
----------------------------------------------
Request/response bodies are JSON documents except where noted; every
service-authored document carries ``"v": 1``.

=====================  ======  ====================================================
endpoint               method  behaviour
=====================  ======  ====================================================
/health                GET     liveness probe
/state                 GET     current JobState snapshot
/jobs                  GET     known jobs (id, name, phase)
/jobs                  POST    body is a *job document* (structured text); stages it
/jobs/{id}             GET     snapshot if {id} is the current job
/jobs/{id}             DELETE  drop a non-running job
/control               POST    {"command": "start"|"pause"|"resume"|"stop"}
/speed                 PUT     {"speed": factor}; 0 = max speed
/screen                GET     active screen document (structured text)
/screen                PUT     body is a screen document; replaces it atomically
/plotdata              GET     PlotBundle JSON for the diagram backdrop
/report/summary        GET     summary document of the finished job
/report/leds           GET     per-LED CSV of the finished job
/telemetry             GET     NDJSON event stream (chunked)
=====================  ======  ====================================================

Telemetry events are one JSON object per line: ``measurement`` events carry a
per-job ``index`` 1..N, ``phase`` events announce JobState changes, and a
``gap`` event tells a slow consumer how many events its bounded buffer
dropped (drop-oldest policy). All events share one strictly increasing
``seq``. The listen address comes from the LEDSORT_ADDR environment variable
(host:port) unless given explicitly.
"""

from __future__ import annotations

import json
import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import configio
from .binning import BinScreen, build_grid_screen, validate_screen
from .ellipses import macadam_1942_ellipses
from .linesim import ConfigError, SortEngine, SortReport
from .plotdata import build_plot_bundle, bundle_to_json

DEFAULT_ADDR = "127.0.0.1:8787"
ADDR_ENV_VAR = "LEDSORT_ADDR"
PROTOCOL_VERSION = 1


class Busy(RuntimeError):
    """A job is running; the requested operation must wait."""


class IllegalTransition(RuntimeError):
    """Control command not legal in the current phase."""


class JobPhase:
    Empty = "Empty"
    Loaded = "Loaded"
    Running = "Running"
    Paused = "Paused"
    Finished = "Finished"
    Faulted = "Faulted"


# ---------------------------------------------------------------------------
# Telemetry


class TelemetrySubscription:
    """Bounded per-consumer event buffer with drop-oldest and gap markers."""

    def __init__(self, hub: "TelemetryHub", maxlen: int):
        self._hub = hub
        self._maxlen = maxlen
        self._events: deque[dict] = deque()
        self._dropped = 0
        self._cond = threading.Condition()
        self._closed = False

    def _offer(self, doc: dict) -> None:
        with self._cond:
            if self._closed:
                return
            if len(self._events) >= self._maxlen:
                self._events.popleft()
                self._dropped += 1
            self._events.append(doc)
            self._cond.notify()

    def next_event(self, timeout: float | None = None) -> dict | None:
        """Next event, a gap marker, or None on timeout / after close."""
        with self._cond:
            if self._dropped:
                gap = {"v": PROTOCOL_VERSION, "type": "gap", "dropped": self._dropped}
                self._dropped = 0
                return gap
            if not self._events and not self._closed:
                self._cond.wait(timeout)
            if self._dropped:
                gap = {"v": PROTOCOL_VERSION, "type": "gap", "dropped": self._dropped}
                self._dropped = 0
                return gap
            if self._events:
                return self._events.popleft()
            return None

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()
        self._hub.unsubscribe(self)


class TelemetryHub:
    """Fan-out of service events; assigns the global sequence numbers."""

    def __init__(self) -> None:
        self._subs: list[TelemetrySubscription] = []
        self._lock = threading.Lock()
        self._seq = 0

    def subscribe(self, maxlen: int = 1024) -> TelemetrySubscription:
        sub = TelemetrySubscription(self, maxlen)
        with self._lock:
            self._subs.append(sub)
        return sub

    def unsubscribe(self, sub: TelemetrySubscription) -> None:
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)

    def publish(self, doc: dict) -> int:
        with self._lock:
            self._seq += 1
            stamped = {"v": PROTOCOL_VERSION, "seq": self._seq, **doc}
            for sub in self._subs:
                sub._offer(stamped)
            return self._seq


# ---------------------------------------------------------------------------
# Service core


def _default_screen() -> BinScreen:
    return build_grid_screen(0.28, 0.28, 0.01, 0.01, 3, 3, name="default")


@dataclass
class _JobInfo:
    job_id: str
    name: str
    phase: str
    total: int


class OperatorService:
    """Job lifecycle, live telemetry, counters and screen editing."""

    def __init__(
        self,
        screen: BinScreen | None = None,
        report_dir: str | Path = "reports",
        asset_dir: str | Path = ".",
    ):
        self._lock = threading.RLock()
        self._cond = threading.Condition(self._lock)
        self.hub = TelemetryHub()
        self._screen = screen if screen is not None else _default_screen()
        self._report_dir = Path(report_dir)
        self._asset_dir = Path(asset_dir)
        self._phase = JobPhase.Empty
        self._job_counter = 0
        self._jobs: dict[str, _JobInfo] = {}
        self._job_id: str | None = None
        self._job_name: str | None = None
        self._engine: SortEngine | None = None
        self._speed = 0.0
        self._processed = 0
        self._total = 0
        self._live: dict | None = None
        self._counters: dict[str, int] = {}
        self._rejects = 0
        self._overflows = 0
        self._fault: str | None = None
        self._report: SortReport | None = None
        self._stop_requested = False
        self._thread: threading.Thread | None = None

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "v": PROTOCOL_VERSION,
                "phase": self._phase,
                "job_id": self._job_id,
                "job_name": self._job_name,
                "processed": self._processed,
                "total": self._total,
                "live": self._live,
                "counters": dict(self._counters),
                "rejects": self._rejects,
                "overflows": self._overflows,
                "screen": self._screen.name,
                "speed": self._speed,
                "fault": self._fault,
                "report_available": self._report is not None,
            }

    def jobs(self) -> list[dict]:
        with self._lock:
            return [
                {"job_id": j.job_id, "name": j.name, "phase": j.phase, "total": j.total}
                for j in self._jobs.values()
            ]

    def _publish_phase(self) -> None:
        snap = self.snapshot()
        self.hub.publish(
            {
                "type": "phase",
                "phase": snap["phase"],
                "job_id": snap["job_id"],
                "processed": snap["processed"],
                "total": snap["total"],
            }
        )

    def _set_phase(self, phase: str) -> None:
        with self._lock:
            self._phase = phase
            if self._job_id is not None and self._job_id in self._jobs:
                self._jobs[self._job_id].phase = phase
            self._cond.notify_all()
        self._publish_phase()

    # -- job lifecycle ------------------------------------------------------

    def load_job(self, document: str, source: str = "<job>") -> str:
        """Validate and stage a job; raises Busy while one is in flight."""
        with self._lock:
            if self._phase in (JobPhase.Running, JobPhase.Paused):
                raise Busy(f"a job is {self._phase}; stop it before loading another")
            spec = configio.parse_job(document, source)
            assembled = configio.assemble_job(
                spec,
                self._asset_dir,
                screen=None if spec.screen_ref is not None else self._screen,
            )
            diags = validate_screen(assembled.cfg.screen)
            if diags:
                raise configio.ValidationError(source, diags)
            engine = SortEngine(assembled.batch, assembled.cfg, spec.seed)
            self._job_counter += 1
            job_id = f"job-{self._job_counter}"
            self._job_id = job_id
            self._job_name = spec.name
            self._engine = engine
            self._speed = spec.speed
            self._processed = 0
            self._total = engine.total
            self._live = None
            self._counters = {bid: 0 for bid in assembled.cfg.screen.bin_ids()}
            self._rejects = 0
            self._overflows = 0
            self._fault = None
            self._report = None
            self._stop_requested = False
            self._jobs[job_id] = _JobInfo(job_id, spec.name, JobPhase.Loaded, engine.total)
        self._set_phase(JobPhase.Loaded)
        return job_id

    def control(self, command: str) -> dict:
        """Apply start/pause/resume/stop; returns the resulting snapshot."""
        if command == "start":
            with self._lock:
                if self._phase != JobPhase.Loaded:
                    raise IllegalTransition(f"cannot start from {self._phase}")
                self._phase = JobPhase.Running
                if self._job_id in self._jobs:
                    self._jobs[self._job_id].phase = JobPhase.Running
                self._thread = threading.Thread(
                    target=self._engine_loop, name="ledsort-engine", daemon=True
                )
                thread = self._thread
            self._publish_phase()
            thread.start()
        elif command == "pause":
            with self._lock:
                if self._phase != JobPhase.Running:
                    raise IllegalTransition(f"cannot pause from {self._phase}")
                self._phase = JobPhase.Paused
                if self._job_id in self._jobs:
                    self._jobs[self._job_id].phase = JobPhase.Paused
                self._cond.notify_all()
            self._publish_phase()
        elif command == "resume":
            with self._lock:
                if self._phase != JobPhase.Paused:
                    raise IllegalTransition(f"cannot resume from {self._phase}")
                self._phase = JobPhase.Running
                if self._job_id in self._jobs:
                    self._jobs[self._job_id].phase = JobPhase.Running
                self._cond.notify_all()
            self._publish_phase()
        elif command == "stop":
            with self._lock:
                if self._phase not in (JobPhase.Running, JobPhase.Paused):
                    raise IllegalTransition(f"cannot stop from {self._phase}")
                self._stop_requested = True
                self._cond.notify_all()
                thread = self._thread
            if thread is not None:
                thread.join(timeout=30.0)
        else:
            raise IllegalTransition(f"unknown command {command!r}")
        return self.snapshot()

    def set_speed(self, speed: float) -> dict:
        if speed < 0:
            raise ValueError("speed cannot be negative")
        with self._lock:
            self._speed = speed
            self._cond.notify_all()
        return self.snapshot()

    def delete_job(self, job_id: str) -> None:
        with self._lock:
            if job_id not in self._jobs:
                raise KeyError(job_id)
            if job_id == self._job_id and self._phase in (JobPhase.Running, JobPhase.Paused):
                raise Busy("cannot delete a running job")
            del self._jobs[job_id]
            if job_id == self._job_id:
                self._job_id = None
                self._job_name = None
                self._engine = None
                self._report = None
                self._live = None
                self._counters = {}
                self._processed = 0
                self._total = 0
                self._rejects = 0
                self._overflows = 0
        self._set_phase(JobPhase.Empty)

    # -- engine loop (the single writer) -------------------------------------

    def _engine_loop(self) -> None:
        engine = self._engine
        assert engine is not None
        try:
            while True:
                with self._cond:
                    while self._phase == JobPhase.Paused and not self._stop_requested:
                        self._cond.wait()
                    if self._stop_requested or self._phase != JobPhase.Running:
                        break
                record = engine.process_next()
                if record is None:
                    break
                with self._lock:
                    self._processed = engine.processed
                    self._counters = engine.compartment_counts
                    self._rejects = engine.rejects
                    self._overflows = engine.overflows
                    index = engine.processed
                    doc = {
                        "type": "measurement",
                        "index": index,
                        "job_id": self._job_id,
                        "led_id": record.led_id,
                        "x": record.x,
                        "y": record.y,
                        "lumens": record.lumens,
                        "chroma_bin": record.assignment.chroma_bin,
                        "lum_class": record.assignment.lum_class,
                        "reject": record.assignment.is_reject,
                        "destination": record.destination,
                        "compartment": record.compartment,
                        "overflowed": record.overflowed,
                        "cycle_time_s": record.cycle_time_s,
                    }
                    self._live = doc
                    speed = self._speed
                self.hub.publish(doc)
                if speed > 0:
                    self._scaled_wait(record.cycle_time_s / speed)
            self._finalize(engine)
        except Exception as exc:  # measurement/config failure mid-run
            with self._lock:
                self._fault = str(exc)
            self._set_phase(JobPhase.Faulted)

    def _scaled_wait(self, seconds: float) -> None:
        deadline = time.monotonic() + seconds
        with self._cond:
            while self._phase == JobPhase.Running and not self._stop_requested:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return
                self._cond.wait(remaining)

    def _finalize(self, engine: SortEngine) -> None:
        report = engine.report()
        with self._lock:
            self._report = report
            job_id = self._job_id or "job"
            name = self._job_name or "job"
        configio.write_report(report, self._report_dir / job_id, name)
        self._set_phase(JobPhase.Finished)

    # -- screen editing -------------------------------------------------------

    def screen_document(self) -> str:
        with self._lock:
            return configio.format_screen(self._screen)

    def update_screen(self, document: str, source: str = "<screen>") -> BinScreen:
        """Replace the active screen for subsequent jobs; Busy while Running."""
        with self._lock:
            if self._phase == JobPhase.Running:
                raise Busy("cannot edit the screen while a job is running")
            screen = configio.parse_screen(document, source)
            diags = validate_screen(screen)
            if diags:
                raise configio.ValidationError(source, diags)
            self._screen = screen
            return screen

    # -- misc -----------------------------------------------------------------

    def plot_bundle_json(self) -> str:
        with self._lock:
            screen = self._screen
        bundle = build_plot_bundle(screen, macadam_1942_ellipses())
        return bundle_to_json(bundle)

    def report_texts(self) -> tuple[str, str] | None:
        with self._lock:
            report, name = self._report, self._job_name or "job"
        if report is None:
            return None
        return configio.format_report_csv(report), configio.format_report_summary(report, name)

    def subscribe(self, maxlen: int = 1024) -> TelemetrySubscription:
        return self.hub.subscribe(maxlen)


# ---------------------------------------------------------------------------
# HTTP layer


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


def _make_handler(service: OperatorService, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        # -- plumbing -----------------------------------------------------

        def log_message(self, fmt, *args):  # tests stay quiet
            pass

        def _send(self, code: int, body: bytes, content_type: str) -> None:
            self.send_response(code)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, code: int, doc: dict) -> None:
            self._send(code, (json.dumps(doc) + "\n").encode(), "application/json")

        def _send_text(self, code: int, text: str, content_type: str = "text/plain; charset=utf-8") -> None:
            self._send(code, text.encode(), content_type)

        def _send_error_json(self, code: int, message: str, **extra) -> None:
            self._send_json(code, {"v": PROTOCOL_VERSION, "error": message, **extra})

        def _body(self) -> str:
            length = int(self.headers.get("Content-Length") or 0)
            return self.rfile.read(length).decode("utf-8") if length else ""

        # -- routes ---------------------------------------------------------

        def do_GET(self) -> None:
            path = self.path.split("?", 1)[0]
            try:
                if path == "/health":
                    self._send_json(200, {"v": PROTOCOL_VERSION, "status": "ok"})
                elif path == "/state":
                    self._send_json(200, service.snapshot())
                elif path == "/jobs":
                    self._send_json(200, {"v": PROTOCOL_VERSION, "jobs": service.jobs()})
                elif path.startswith("/jobs/"):
                    job_id = path.removeprefix("/jobs/")
                    snap = service.snapshot()
                    if snap["job_id"] == job_id:
                        self._send_json(200, snap)
                    elif any(j["job_id"] == job_id for j in service.jobs()):
                        self._send_json(200, {"v": PROTOCOL_VERSION, **next(
                            j for j in service.jobs() if j["job_id"] == job_id
                        )})
                    else:
                        self._send_error_json(404, f"unknown job {job_id!r}")
                elif path == "/screen":
                    self._send_text(200, service.screen_document())
                elif path == "/plotdata":
                    self._send_text(200, service.plot_bundle_json(), "application/json")
                elif path == "/report/summary":
                    texts = service.report_texts()
                    if texts is None:
                        self._send_error_json(404, "no finished report")
                    else:
                        self._send_text(200, texts[1])
                elif path == "/report/leds":
                    texts = service.report_texts()
                    if texts is None:
                        self._send_error_json(404, "no finished report")
                    else:
                        self._send_text(200, texts[0], "text/csv; charset=utf-8")
                elif path == "/telemetry":
                    self._stream_telemetry()
                elif static_dir is not None:
                    self._serve_static(path)
                else:
                    self._send_error_json(404, f"unknown path {path!r}")
            except (BrokenPipeError, ConnectionResetError):
                pass

        def do_POST(self) -> None:
            path = self.path.split("?", 1)[0]
            if path == "/jobs":
                try:
                    job_id = service.load_job(self._body(), "<posted job>")
                    self._send_json(201, {"v": PROTOCOL_VERSION, "job_id": job_id})
                except Busy as exc:
                    self._send_error_json(409, str(exc))
                except configio.ParseError as exc:
                    self._send_error_json(400, str(exc))
                except configio.ValidationError as exc:
                    self._send_error_json(
                        422, str(exc), diagnostics=[str(d) for d in exc.diagnostics]
                    )
                except (ConfigError, OSError, ValueError) as exc:
                    self._send_error_json(422, str(exc))
            elif path == "/control":
                try:
                    doc = json.loads(self._body() or "{}")
                    snap = service.control(str(doc.get("command", "")))
                    self._send_json(200, snap)
                except IllegalTransition as exc:
                    self._send_error_json(409, str(exc))
                except json.JSONDecodeError as exc:
                    self._send_error_json(400, f"body must be JSON: {exc}")
            else:
                self._send_error_json(404, f"unknown path {path!r}")

        def do_PUT(self) -> None:
            path = self.path.split("?", 1)[0]
            if path == "/screen":
                try:
                    screen = service.update_screen(self._body(), "<put screen>")
                    self._send_json(
                        200,
                        {
                            "v": PROTOCOL_VERSION,
                            "screen": screen.name,
                            "bins": len(screen.bins),
                            "diagnostics": [],
                        },
                    )
                except Busy as exc:
                    self._send_error_json(409, str(exc))
                except configio.ParseError as exc:
                    self._send_error_json(400, str(exc))
                except configio.ValidationError as exc:
                    self._send_error_json(
                        422, str(exc), diagnostics=[str(d) for d in exc.diagnostics]
                    )
            elif path == "/speed":
                try:
                    doc = json.loads(self._body() or "{}")
                    snap = service.set_speed(float(doc["speed"]))
                    self._send_json(200, snap)
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                    self._send_error_json(400, f"body must be {{\"speed\": factor}}: {exc}")
            else:
                self._send_error_json(404, f"unknown path {path!r}")

        def do_DELETE(self) -> None:
            path = self.path.split("?", 1)[0]
            if path.startswith("/jobs/"):
                job_id = path.removeprefix("/jobs/")
                try:
                    service.delete_job(job_id)
                    self._send_json(200, {"v": PROTOCOL_VERSION, "deleted": job_id})
                except KeyError:
                    self._send_error_json(404, f"unknown job {job_id!r}")
                except Busy as exc:
                    self._send_error_json(409, str(exc))
            else:
                self._send_error_json(404, f"unknown path {path!r}")

        # -- streaming ------------------------------------------------------

        def _write_chunk(self, data: bytes) -> None:
            self.wfile.write(f"{len(data):x}\r\n".encode() + data + b"\r\n")
            self.wfile.flush()

        def _stream_telemetry(self) -> None:
            sub = service.subscribe()
            try:
                self.send_response(200)
                self.send_header("Content-Type", "application/x-ndjson")
                self.send_header("Cache-Control", "no-store")
                self.send_header("Transfer-Encoding", "chunked")
                self.end_headers()
                # Opening snapshot orients late subscribers.
                hello = dict(service.snapshot())
                hello["type"] = "snapshot"
                self._write_chunk((json.dumps(hello) + "\n").encode())
                while True:
                    event = sub.next_event(timeout=5.0)
                    if event is None:
                        self._write_chunk(b"\n")  # keepalive; write fails when gone
                        continue
                    self._write_chunk((json.dumps(event) + "\n").encode())
            except (BrokenPipeError, ConnectionResetError, ConnectionAbortedError):
                pass
            finally:
                sub.close()

        # -- static UI --------------------------------------------------------

        def _serve_static(self, path: str) -> None:
            assert static_dir is not None
            rel = "index.html" if path in ("/", "") else path.lstrip("/")
            target = (static_dir / rel).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send_error_json(404, f"unknown path {path!r}")
                return
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self._send(200, target.read_bytes(), ctype)

    return Handler


def make_server(
    service: OperatorService,
    addr: str | None = None,
    static_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    """Bind a threading HTTP server for the service; caller runs serve_forever.

    ``addr`` is "host:port"; when None, the LEDSORT_ADDR environment variable
    applies, then the documented default.
    """
    if addr is None:
        addr = os.environ.get(ADDR_ENV_VAR, DEFAULT_ADDR)
    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"listen address must be host:port, got {addr!r}")
    handler = _make_handler(service, Path(static_dir) if static_dir is not None else None)
    server = ThreadingHTTPServer((host, int(port_text)), handler)
    server.daemon_threads = True
    return server
