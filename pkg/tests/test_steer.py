"""Steering: command queue semantics, snapshots, and the HTTP surface."""

from __future__ import annotations

import json
import threading
import time
import urllib.error
import urllib.request

import numpy as np
import pytest

from thornsim import (
    activate,
    attach_server,
    build_schedule,
    main_loop,
    parse_run_config,
    run_bin,
    take_snapshot,
)
from thornsim.errors import BadSlice, PortInUse, UnknownVariable
from thornsim.steer import SteerChannel, SteerCommand, SteerServer, snapshot_variable


def wave_state(builtin_manifests, t_final=100.0, n=16, extra=""):
    cfg = parse_run_config(
        'ActiveThorns = "driver mol wavetoy io_ascii"\n'
        f"driver::global_n = {n}\n"
        f"driver::t_final = {t_final}\n"
        "mol::dt = 0.025\n" + extra
    )
    active = [builtin_manifests[name] for name in cfg.active_thorns]
    state = activate(active, cfg)
    build_schedule(state)
    return state


# ---------------------------------------------------------------------------
# channel semantics (no HTTP)


def test_drain_applies_in_order_and_reports_per_command(builtin_manifests):
    state = wave_state(builtin_manifests)
    channel = SteerChannel()
    bad = SteerCommand(kind="set_param", name="wavetoy::amplitude", value=2.0)
    good = SteerCommand(kind="set_param", name="io_ascii::out_every", value=3)
    term = SteerCommand(kind="terminate")
    for c in (bad, good, term):
        channel.commands.put(c)
    applied = channel.drain(state)
    assert [c.kind for c in applied] == ["set_param", "set_param", "terminate"]
    assert bad.result["error"] == "NotSteerable"
    assert good.result["status"] == "applied"
    assert state.control == "terminating"  # errors do not block later commands
    assert state.params.get("io_ascii::out_every") == 3


def test_snapshot_is_a_copy(builtin_manifests):
    state = wave_state(builtin_manifests)
    run_bin(state, "STARTUP")
    run_bin(state, "INITIAL")
    snap = take_snapshot(state)
    live = state.partitions[0].interior("wavetoy::phi")
    live[...] = -99.0
    assert not np.any(snap.data["wavetoy::phi"] == -99.0)


def test_snapshot_variable_default_slice_is_whole_interior(builtin_manifests):
    state = wave_state(builtin_manifests, n=16)
    run_bin(state, "STARTUP")
    run_bin(state, "INITIAL")
    snap = take_snapshot(state)
    coords, values = snapshot_variable(snap, "wavetoy::phi")
    assert len(values) == 16
    x = np.arange(16) / 16.0
    assert np.array_equal(values, np.sin(2 * np.pi * x))  # exact initial data
    assert np.array_equal(coords, x)


def test_snapshot_variable_bad_slices(builtin_manifests):
    state = wave_state(builtin_manifests)
    run_bin(state, "STARTUP")
    snap = take_snapshot(state)
    with pytest.raises(BadSlice):
        snapshot_variable(snap, "wavetoy::phi", axis=2)
    with pytest.raises(UnknownVariable):
        snapshot_variable(snap, "wavetoy::ghostvar")


def test_boundary_only_mutation(builtin_manifests, routine_registry):
    """No routine ever observes a parameter change inside an iteration."""
    from thornsim import parse_manifest

    probe = parse_manifest(
        "thorn probe\nimplements probe\n"
        'schedule Pre at PRESTEP\n{ } ""\n'
        'schedule Post at POSTSTEP\n{ } ""'
    )
    hashes: list[tuple[str, int]] = []
    routine_registry("probe", "Pre",
                     lambda ctx: hashes.append(("pre", ctx.state.params.table_hash())),
                     mode="global")
    routine_registry("probe", "Post",
                     lambda ctx: hashes.append(("post", ctx.state.params.table_hash())),
                     mode="global")
    cfg = parse_run_config(
        'ActiveThorns = "driver mol wavetoy io_ascii probe"\n'
        "driver::global_n = 8\ndriver::t_final = 0.25\nmol::dt = 0.025\n"
    )
    manifests = dict(builtin_manifests, probe=probe)
    active = [manifests[n] for n in cfg.active_thorns]
    state = activate(active, cfg)
    build_schedule(state)
    channel = SteerChannel()
    state.steer_channel = channel
    # a steer is queued mid-run; it must land between iterations
    channel.commands.put(SteerCommand(kind="set_param", name="io_ascii::out_every", value=9))
    main_loop(state)
    pairs = [(hashes[i][1], hashes[i + 1][1]) for i in range(0, len(hashes), 2)]
    assert all(pre == post for pre, post in pairs)
    assert state.params.get("io_ascii::out_every") == 9


# ---------------------------------------------------------------------------
# HTTP surface


def _get(port, path):
    try:
        with urllib.request.urlopen(f"http://127.0.0.1:{port}{path}") as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


def _send(port, method, path, payload):
    req = urllib.request.Request(
        f"http://127.0.0.1:{port}{path}",
        data=json.dumps(payload).encode(),
        method=method,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req) as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


@pytest.fixture()
def live_run(builtin_manifests):
    state = wave_state(builtin_manifests)
    server = attach_server(state, 0)
    worker = threading.Thread(target=lambda: main_loop(state), daemon=True)
    worker.start()
    yield state, server.port
    _send(server.port, "POST", "/api/v1/control", {"action": "terminate"})
    worker.join(timeout=10)
    state.steer_channel.shutdown(state)
    server.stop()


def test_state_endpoint_reports_progress(live_run):
    _state, port = live_run
    status, body = _get(port, "/api/v1/state")
    assert status == 200
    assert body["control"] in ("running", "paused")
    assert set(body) >= {"iteration", "time", "active_thorns", "params", "variables"}


def test_pause_freezes_iteration_and_resume_continues(live_run):
    _state, port = live_run
    assert _send(port, "POST", "/api/v1/control", {"action": "pause"})[0] == 200
    seen = [_get(port, "/api/v1/state")[1]["iteration"] for _ in range(3)]
    time.sleep(0.15)
    seen.append(_get(port, "/api/v1/state")[1]["iteration"])
    assert len(set(seen)) == 1
    assert _send(port, "POST", "/api/v1/control", {"action": "resume"})[0] == 200
    deadline = time.time() + 5
    while time.time() < deadline:
        if _get(port, "/api/v1/state")[1]["iteration"] > seen[0]:
            break
        time.sleep(0.02)
    assert _get(port, "/api/v1/state")[1]["iteration"] > seen[0]


def test_step_advances_exactly_n(live_run):
    _state, port = live_run
    _send(port, "POST", "/api/v1/control", {"action": "pause"})
    it0 = _get(port, "/api/v1/state")[1]["iteration"]
    _send(port, "POST", "/api/v1/control", {"action": "step", "n": 5})
    deadline = time.time() + 10
    while time.time() < deadline:
        body = _get(port, "/api/v1/state")[1]
        if body["control"] == "paused" and body["iteration"] != it0:
            break
        time.sleep(0.02)
    assert body["iteration"] == it0 + 5
    assert body["control"] == "paused"


def test_patch_status_codes(live_run):
    _state, port = live_run
    ok = _send(port, "PATCH", "/api/v1/params/io_ascii::out_every", {"value": 4})
    assert ok[0] == 200 and "applied_at_iteration" in ok[1]
    assert _send(port, "PATCH", "/api/v1/params/wavetoy::amplitude", {"value": 2})[0] == 409
    assert _send(port, "PATCH", "/api/v1/params/io_ascii::out_every", {"value": 0})[0] == 422
    assert _send(port, "PATCH", "/api/v1/params/io_ascii::nonsense", {"value": 1})[0] == 404


def test_vars_and_slice_endpoints(live_run):
    _state, port = live_run
    status, body = _get(port, "/api/v1/vars")
    assert status == 200
    names = {v["name"] for v in body["variables"]}
    assert "wavetoy::phi" in names
    status, body = _get(port, "/api/v1/vars/wavetoy::phi?axis=0")
    assert status == 200
    assert len(body["values"]) == 16
    assert _get(port, "/api/v1/vars/wavetoy::phi?axis=2")[0] == 400
    assert _get(port, "/api/v1/vars/who::cares")[0] == 404


def test_schedule_endpoint(live_run):
    _state, port = live_run
    status, body = _get(port, "/api/v1/schedule")
    assert status == 200
    assert body["schedule"]["bins"]["EVOL"] == ["mol::MoL_Step"]
    assert "wavetoy::WaveToy_RHS" in body["schedule"]["groups"]["MoL_CalcRHS"]


def test_port_in_use(builtin_manifests):
    state = wave_state(builtin_manifests)
    channel = SteerChannel()
    first = SteerServer(channel, 0)
    try:
        with pytest.raises(PortInUse):
            SteerServer(channel, first.port)
    finally:
        first.httpd.server_close()


def test_idle_server_changes_nothing(builtin_manifests, tmp_path):
    """Liveness: enabling the server leaves numerical outputs byte-identical."""
    extra = 'io_ascii::out_vars = "wavetoy::phi"\nio_ascii::reductions_vars = "wavetoy::*"\n'

    def run(out_dir, serve):
        cfg = parse_run_config(
            'ActiveThorns = "driver mol wavetoy io_ascii"\n'
            "driver::global_n = 16\ndriver::t_final = 0.25\nmol::dt = 0.025\n" + extra
        )
        active = [builtin_manifests[n] for n in cfg.active_thorns]
        state = activate(active, cfg, out_dir=out_dir)
        build_schedule(state)
        server = attach_server(state, 0) if serve else None
        main_loop(state)
        if server:
            state.steer_channel.shutdown(state)
            server.stop()

    a, b = tmp_path / "plain", tmp_path / "served"
    run(a, serve=False)
    run(b, serve=True)
    for name in ("wavetoy__phi.asc", "reductions.asc"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
