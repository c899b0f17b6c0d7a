"""Bit-exact restart: 100 iterations equal 50 + checkpoint + restore + 50.

The resumed run may even use a different partition count; the reductions
table tail and the re-written checkpoint come out byte-identical.
"""

import pathlib
import tempfile

from thornsim import activate, build_schedule, main_loop, parse_run_config, restore_checkpoint
from thornsim.cli import discover_manifests

manifests = discover_manifests([])


def cfg(t_final):
    return parse_run_config(
        'ActiveThorns = "driver mol wavetoy io_ascii checkpoint"\n'
        "driver::global_n = 32\n"
        f"driver::t_final = {t_final}\n"
        "mol::method = icn\nmol::dt = 0.015625\n"
        'io_ascii::reductions_vars = "wavetoy::*"\n'
        "checkpoint::every = 50\n"
    )


def rows(path, lo):
    return {
        int(line.split()[0]): line
        for line in path.read_text().splitlines()
        if not line.startswith("#") and int(line.split()[0]) >= lo
    }


work = pathlib.Path(tempfile.mkdtemp(prefix="ckpt_demo_"))
full, half, resumed = work / "full", work / "half", work / "resumed"

config = cfg(1.5625)
active = [manifests[n] for n in config.active_thorns]
state = activate(active, config, partition_count=2, out_dir=full)
build_schedule(state)
print("unbroken run:", main_loop(state).iterations, "iterations")

state = activate(active, cfg(0.78125), partition_count=2, out_dir=half)
build_schedule(state)
print("first half:  ", main_loop(state).iterations, "iterations")

ck = half / "checkpoint_00000050.ckpt"
state = restore_checkpoint(ck, active, config, partition_count=3, out_dir=resumed)
build_schedule(state)
print("resumed half:", main_loop(state).iterations, "iterations on 3 partitions")

same_rows = rows(full / "reductions.asc", 50) == rows(resumed / "reductions.asc", 50)
same_ckpt = (full / "checkpoint_00000100.ckpt").read_bytes() == (
    resumed / "checkpoint_00000100.ckpt"
).read_bytes()
print("reductions tail byte-identical:", same_rows)
print("final checkpoints byte-identical:", same_ckpt)
