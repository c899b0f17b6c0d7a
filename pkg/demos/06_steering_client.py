"""Operate a running simulation over HTTP: inspect, steer, step, terminate.

Starts a served run in-process, then acts as a remote client would:
pause it, read frozen state, retarget the text output live, single-step,
and shut it down.
"""

import json
import threading
import time
import urllib.request

from thornsim import activate, build_schedule, main_loop, parse_run_config
from thornsim.cli import discover_manifests
from thornsim.steer import attach_server

manifests = discover_manifests([])
config = parse_run_config("""
ActiveThorns = "driver mol wavetoy io_ascii"
driver::global_n = 32
driver::t_final = 1000.0
mol::dt = 0.015625
io_ascii::out_vars = "wavetoy::phi"
io_ascii::out_every = 64
""")
state = activate([manifests[n] for n in config.active_thorns], config, out_dir="demo_out")
build_schedule(state)
server = attach_server(state, 0)
base = f"http://127.0.0.1:{server.port}/api/v1"
worker = threading.Thread(target=lambda: main_loop(state), daemon=True)
worker.start()


def get(path):
    with urllib.request.urlopen(base + path) as r:
        return json.loads(r.read())


def send(method, path, payload):
    req = urllib.request.Request(
        base + path, data=json.dumps(payload).encode(), method=method,
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(req) as r:
        return json.loads(r.read())


time.sleep(0.3)
print("running at iteration", get("/state")["iteration"])

send("POST", "/control", {"action": "pause"})
frozen = [get("/state")["iteration"] for _ in range(3)]
print("paused; three reads of the iteration:", frozen)

slice_payload = get("/vars/wavetoy::phi?axis=0")
print(f"phi slice: {len(slice_payload['values'])} points at iteration",
      slice_payload["iteration"])

print("steer out_every ->", send("PATCH", "/params/io_ascii::out_every", {"value": 32}))

send("POST", "/control", {"action": "step", "n": 5})
while get("/state")["control"] != "paused":
    time.sleep(0.02)
print("stepped 5; iteration is now", get("/state")["iteration"])

send("POST", "/control", {"action": "terminate"})
worker.join(timeout=10)
server.stop()
print("terminated at iteration", state.iteration)
