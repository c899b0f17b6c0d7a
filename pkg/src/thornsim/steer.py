"""Live computational steering over local HTTP.

The server never touches live simulation storage: readers get the latest
boundary snapshot (an immutable copy replaced atomically once per
iteration), and writers enqueue commands that the main loop drains at the
iteration boundary between one iteration's ANALYSIS and the next PRESTEP.
Routines therefore never observe a parameter change mid-iteration.

Endpoints (all JSON, under /api/v1):

====================================  ========================================
GET /api/v1/state                     snapshot record
GET /api/v1/schedule                  ordered tree (bins and groups)
GET /api/v1/params                    parameter table with steerable flags
PATCH /api/v1/params/<impl>::<name>   body {"value": ...}; 200 applied-at-
                                      iteration, 409 NotSteerable,
                                      422 OutOfRange, 404 unknown
GET /api/v1/vars                      variable directory
GET /api/v1/vars/<name>?axis=A&fix=I  1D slice {coords, values, iteration, time}
POST /api/v1/control                  {"action": "pause"|"resume"|"terminate"
                                      |"step", "n": int}
====================================  ========================================
"""

from __future__ import annotations

import itertools
import json
import logging
import queue
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

import numpy as np

from . import flesh as _flesh
from . import grid as _grid
from .ccl import SCHEDULE_BINS, KeywordRange, NumericRange
from .errors import BadSlice, NotSteerable, OutOfRange, PortInUse, UnknownParameter, UnknownVariable
from .flesh import SimulationState

log = logging.getLogger("thornsim.steer")

_request_ids = itertools.count(1)


@dataclass
class SteerCommand:
    kind: str  # pause | resume | step | terminate | set_param
    name: str = ""
    value: object = None
    steps: int = 1
    request_id: int = field(default_factory=lambda: next(_request_ids))
    done: threading.Event = field(default_factory=threading.Event, repr=False)
    result: dict = field(default_factory=dict)

    def finish(self, **result) -> None:
        self.result = {"request_id": self.request_id, **result}
        self.done.set()


@dataclass(frozen=True)
class StateSnapshot:
    """Internally consistent copy taken between iterations."""

    iteration: int
    time: float
    control: str
    active_thorns: tuple[str, ...]
    params: tuple[dict, ...]
    variables: tuple[dict, ...]
    data: dict[str, np.ndarray]
    global_n: tuple[int, ...]
    lower: tuple[float, ...]
    h: tuple[float, ...]
    last_reduction_row: dict | None


def _param_table(state: SimulationState) -> tuple[dict, ...]:
    rows = []
    for name in state.params.names():
        decl = state.params.decl(name)
        if isinstance(decl.range, NumericRange):
            rng: object = {"lo": decl.range.lo, "hi": decl.range.hi}
        elif isinstance(decl.range, KeywordRange):
            rng = list(decl.range.allowed)
        else:
            rng = None
        rows.append(
            {
                "name": name,
                "type": decl.ptype,
                "value": state.params.get(name),
                "steerable": decl.steerable,
                "range": rng,
                "description": decl.description,
            }
        )
    return tuple(rows)


def take_snapshot(state: SimulationState) -> StateSnapshot:
    variables = []
    data: dict[str, np.ndarray] = {}
    for name in sorted(state.registry):
        handle = state.registry[name]
        if handle.kind == "GF" and state.partitions:
            arr = _grid.gather(state.partitions, name)
        elif handle.kind == "SCALAR":
            arr = np.asarray(state.scalars[name][0]).copy()
        else:
            continue
        data[name] = arr
        variables.append({"name": name, "kind": handle.kind, "shape": list(arr.shape)})
    spec = state.grid_spec
    return StateSnapshot(
        iteration=state.iteration,
        time=state.time,
        control=state.control,
        active_thorns=tuple(state.manifests),
        params=_param_table(state),
        variables=tuple(variables),
        data=data,
        global_n=spec.global_n if spec else (),
        lower=spec.lower if spec else (),
        h=spec.h if spec else (),
        last_reduction_row=state.last_reduction_row,
    )


def snapshot_variable(
    snapshot: StateSnapshot, name: str, axis: int = 0, fix: list[int] | None = None
) -> tuple[list[float], list[float]]:
    """A 1D line through the snapshot's copy of one variable.

    ``axis`` varies along the line; ``fix`` pins the other axes (defaulting
    to the domain centre).  Returns (coordinates, values) in global order.
    """
    if name not in snapshot.data:
        raise UnknownVariable(name)
    arr = snapshot.data[name]
    if arr.ndim == 0:
        raise BadSlice(f"{name} is a scalar; nothing to slice")
    if not 0 <= axis < arr.ndim:
        raise BadSlice(f"axis {axis} out of range for {arr.ndim}-dimensional {name}")
    others = [a for a in range(arr.ndim) if a != axis]
    if fix is None or not fix:
        fix = [arr.shape[a] // 2 for a in others]
    if len(fix) != len(others):
        raise BadSlice(f"need {len(others)} fixed indices, got {len(fix)}")
    index: list = [slice(None)] * arr.ndim
    for a, i in zip(others, fix):
        if not 0 <= i < arr.shape[a]:
            raise BadSlice(f"fixed index {i} out of range on axis {a}")
        index[a] = i
    values = arr[tuple(index)]
    coords = snapshot.lower[axis] + np.arange(arr.shape[axis]) * snapshot.h[axis]
    return [float(c) for c in coords], [float(v) for v in values]


class SteerChannel:
    """Command queue plus the published snapshot; owned by the main loop."""

    def __init__(self):
        self.commands: queue.Queue[SteerCommand] = queue.Queue()
        self.snapshot: StateSnapshot | None = None
        self.steps_budget: int | None = None
        self.schedule_dump: dict | None = None

    def submit(self, command: SteerCommand, timeout: float = 30.0) -> dict:
        self.commands.put(command)
        if not command.done.wait(timeout):
            return {"status": "timeout", "error": "command not applied in time"}
        return command.result

    def publish(self, state: SimulationState) -> None:
        self.snapshot = take_snapshot(state)

    # -- applied at the iteration boundary, in arrival order

    def apply(self, command: SteerCommand, state: SimulationState) -> None:
        if command.kind == "set_param":
            try:
                _flesh.set_parameter(state, command.name, command.value, phase="steering")
            except UnknownParameter:
                command.finish(status="error", error="UnknownParameter", http=404)
            except NotSteerable:
                command.finish(status="error", error="NotSteerable", http=409)
            except OutOfRange:
                command.finish(status="error", error="OutOfRange", http=422)
            else:
                command.finish(
                    status="applied", applied_at_iteration=state.iteration, name=command.name
                )
            return
        if command.kind == "pause":
            if state.control != "terminating":
                state.control = "paused"
                self.steps_budget = None
        elif command.kind == "resume":
            if state.control == "paused":
                state.control = "running"
            self.steps_budget = None
        elif command.kind == "step":
            if state.control != "terminating":
                state.control = "running"
                self.steps_budget = max(1, int(command.steps))
        elif command.kind == "terminate":
            state.control = "terminating"
            self.steps_budget = None
        else:
            command.finish(status="error", error=f"unknown action {command.kind!r}", http=400)
            return
        command.finish(status="applied", applied_at_iteration=state.iteration)

    def drain(self, state: SimulationState) -> list[SteerCommand]:
        """Apply every queued command, in order; returns the applied list."""
        applied = []
        while True:
            try:
                command = self.commands.get_nowait()
            except queue.Empty:
                return applied
            self.apply(command, state)
            applied.append(command)

    def boundary(self, state: SimulationState, after_iteration: bool) -> None:
        """The once-per-iteration interruption point."""
        if after_iteration and self.steps_budget is not None:
            self.steps_budget -= 1
            if self.steps_budget <= 0:
                self.steps_budget = None
                state.control = "paused"
        self.publish(state)
        applied = self.drain(state)
        while state.control == "paused":
            if applied:
                self.publish(state)
                applied = []
            try:
                command = self.commands.get(timeout=0.05)
            except queue.Empty:
                continue
            self.apply(command, state)
            applied = [command]
        if applied or (self.snapshot is not None and self.snapshot.control != state.control):
            self.publish(state)

    def shutdown(self, state: SimulationState) -> None:
        """Publish the final snapshot and fail any still-queued commands."""
        self.publish(state)
        for command in self.drain(state):
            if not command.done.is_set():
                command.finish(status="error", error="simulation ended", http=409)


# ---------------------------------------------------------------------------
# HTTP layer


def _json_bytes(payload) -> bytes:
    return json.dumps(payload).encode("utf-8")


class _Handler(BaseHTTPRequestHandler):
    server_version = "thornsim-steer/1"
    channel: SteerChannel
    static_dir: Path | None = None

    def log_message(self, fmt, *args):  # route through logging, keep stdout clean
        log.debug("steer http: " + fmt, *args)

    def _send(self, status: int, payload) -> None:
        body = _json_bytes(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        try:
            return json.loads(self.rfile.read(length))
        except json.JSONDecodeError:
            return {}

    def _snapshot(self) -> StateSnapshot | None:
        return self.channel.snapshot

    # -- GET

    def do_GET(self):
        url = urlparse(self.path)
        path = unquote(url.path)
        snap = self._snapshot()
        if path in ("/api/v1/state", "/api/v1/params", "/api/v1/vars", "/api/v1/schedule"):
            if snap is None:
                self._send(503, {"error": "no snapshot yet"})
                return
        if path == "/api/v1/state":
            self._send(
                200,
                {
                    "iteration": snap.iteration,
                    "time": snap.time,
                    "control": snap.control,
                    "active_thorns": list(snap.active_thorns),
                    "params": list(snap.params),
                    "variables": list(snap.variables),
                    "last_reductions": snap.last_reduction_row,
                },
            )
        elif path == "/api/v1/params":
            self._send(200, {"iteration": snap.iteration, "params": list(snap.params)})
        elif path == "/api/v1/vars":
            self._send(200, {"iteration": snap.iteration, "variables": list(snap.variables)})
        elif path == "/api/v1/schedule":
            self._send(
                200, {"iteration": snap.iteration, "schedule": self.channel.schedule_dump or {}}
            )
        elif path.startswith("/api/v1/vars/"):
            self._get_slice(path, url.query, snap)
        elif self.static_dir is not None:
            self._get_static(path)
        else:
            self._send(404, {"error": "not found"})

    def _get_slice(self, path: str, query: str, snap: StateSnapshot | None):
        if snap is None:
            self._send(503, {"error": "no snapshot yet"})
            return
        name = path[len("/api/v1/vars/") :]
        q = parse_qs(query)
        try:
            axis = int(q.get("axis", ["0"])[0])
            fix = [int(x) for x in q["fix"][0].split(",") if x] if "fix" in q else None
        except ValueError:
            self._send(400, {"error": "BadSlice", "detail": "axis/fix must be integers"})
            return
        try:
            coords, values = snapshot_variable(snap, name, axis, fix)
        except UnknownVariable:
            self._send(404, {"error": "UnknownVariable", "name": name})
            return
        except BadSlice as e:
            self._send(400, {"error": "BadSlice", "detail": str(e)})
            return
        self._send(
            200,
            {
                "name": name,
                "coords": coords,
                "values": values,
                "iteration": snap.iteration,
                "time": snap.time,
            },
        )

    def _get_static(self, path: str):
        assert self.static_dir is not None
        rel = path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            self._send(404, {"error": "not found"})
            return
        body = target.read_bytes()
        ctype = {
            ".html": "text/html",
            ".js": "text/javascript",
            ".css": "text/css",
            ".svg": "image/svg+xml",
        }.get(target.suffix, "application/octet-stream")
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # -- mutations

    def do_PATCH(self):
        path = unquote(urlparse(self.path).path)
        if not path.startswith("/api/v1/params/"):
            self._send(404, {"error": "not found"})
            return
        name = path[len("/api/v1/params/") :]
        body = self._body()
        if "value" not in body:
            self._send(400, {"error": "body must be {\"value\": ...}"})
            return
        result = self.channel.submit(SteerCommand(kind="set_param", name=name, value=body["value"]))
        status = result.get("http", 200 if result.get("status") == "applied" else 500)
        self._send(status, result)

    def do_POST(self):
        path = unquote(urlparse(self.path).path)
        if path != "/api/v1/control":
            self._send(404, {"error": "not found"})
            return
        body = self._body()
        action = body.get("action")
        if action not in ("pause", "resume", "terminate", "step"):
            self._send(400, {"error": f"unknown action {action!r}"})
            return
        command = SteerCommand(kind=action, steps=int(body.get("n", 1)))
        result = self.channel.submit(command)
        status = result.get("http", 200 if result.get("status") == "applied" else 500)
        self._send(status, result)


class SteerServer:
    """Threaded HTTP server wrapper; start() binds, stop() joins."""

    def __init__(self, channel: SteerChannel, port: int, static_dir: str | Path | None = None):
        self.channel = channel
        self.port = port
        handler = type(
            "BoundHandler",
            (_Handler,),
            {"channel": channel, "static_dir": Path(static_dir) if static_dir else None},
        )
        try:
            self.httpd = ThreadingHTTPServer(("127.0.0.1", port), handler)
        except OSError as e:
            raise PortInUse(f"cannot bind 127.0.0.1:{port}: {e}") from e
        self.port = self.httpd.server_address[1]
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        log.info("steering server listening on http://127.0.0.1:%d/api/v1", self.port)

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5.0)


def schedule_dump(state: SimulationState) -> dict:
    tree = state.schedule
    if tree is None:
        return {}
    return {
        "bins": {b: [c.key for c in tree.bins.get(b, ())] for b in SCHEDULE_BINS},
        "groups": {g: [c.key for c in calls] for g, calls in sorted(tree.groups.items())},
        "sync": {
            c.key: list(c.sync)
            for calls in list(tree.bins.values()) + list(tree.groups.values())
            for c in calls
            if c.sync
        },
    }


def attach_server(
    state: SimulationState, port: int, static_dir: str | Path | None = None
) -> SteerServer:
    """Wire a steering channel into the state and start serving."""
    channel = SteerChannel()
    channel.schedule_dump = schedule_dump(state)
    channel.publish(state)
    state.steer_channel = channel
    server = SteerServer(channel, port, static_dir=static_dir)
    server.start()
    return server


__all__ = [
    "SteerCommand",
    "StateSnapshot",
    "SteerChannel",
    "SteerServer",
    "take_snapshot",
    "snapshot_variable",
    "schedule_dump",
    "attach_server",
]
