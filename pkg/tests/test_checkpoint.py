"""Checkpoint container layout, round trips, and restore error paths."""

from __future__ import annotations

import struct

import numpy as np
import pytest

from thornsim import (
    activate,
    build_schedule,
    gather,
    main_loop,
    parse_run_config,
    read_checkpoint,
    restore_checkpoint,
    write_checkpoint,
)
from thornsim.checkpoint import FORMAT_VERSION, MAGIC
from thornsim.errors import RestoreError


def cfg_text(n=8, t_final=0.25, extra=""):
    return (
        'ActiveThorns = "driver mol wavetoy odetest io_ascii checkpoint"\n'
        f"driver::global_n = {n}\n"
        f"driver::t_final = {t_final}\n"
        "mol::dt = 0.03125\n"
        'io_ascii::reductions_vars = "wavetoy::phi"\n' + extra
    )


def make_state(builtin_manifests, tmp_path, text=None, partitions=1, run=True):
    cfg = parse_run_config(text or cfg_text())
    active = [builtin_manifests[n] for n in cfg.active_thorns]
    state = activate(active, cfg, partition_count=partitions, out_dir=tmp_path)
    build_schedule(state)
    if run:
        main_loop(state)
    return state, cfg


# ---------------------------------------------------------------------------
# container layout


def test_header_layout(builtin_manifests, tmp_path):
    state, _ = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "layout.ckpt"
    write_checkpoint(state, path)
    blob = path.read_bytes()
    assert blob[:8] == MAGIC == b"THRNCKPT"
    version, = struct.unpack_from("<I", blob, 8)
    iteration, = struct.unpack_from("<Q", blob, 12)
    time, = struct.unpack_from("<d", blob, 20)
    assert version == FORMAT_VERSION == 1
    assert iteration == state.iteration
    assert time == state.time


def test_read_checkpoint_contents(builtin_manifests, tmp_path):
    state, _ = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    snap = read_checkpoint(path)
    assert snap["iteration"] == state.iteration
    assert snap["params"]["mol::dt"] == ("real", 0.03125)
    assert snap["params"]["mol::method"] == ("keyword", "rk4")
    names = {(name, tl) for name, tl, _ in snap["variables"]}
    assert ("wavetoy::phi", 0) in names and ("wavetoy::phi", 1) in names
    assert ("odetest::u", 0) in names  # scalar, rank 0
    scalar = next(d for n, t, d in snap["variables"] if n == "odetest::u" and t == 0)
    assert scalar.shape == ()
    phi = next(d for n, t, d in snap["variables"] if n == "wavetoy::phi" and t == 0)
    assert np.array_equal(phi, gather(state.partitions, "wavetoy::phi"))


def test_round_trip_restores_observables(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    active = [builtin_manifests[n] for n in cfg.active_thorns]
    restored = restore_checkpoint(path, active, cfg, out_dir=tmp_path)
    assert restored.iteration == state.iteration
    assert restored.time == state.time
    assert restored.params.snapshot() == state.params.snapshot()
    for name, handle in state.registry.items():
        for tl in range(handle.timelevels):
            if handle.kind == "SCALAR":
                a = np.asarray(state.scalars[name][tl])
                b = np.asarray(restored.scalars[name][tl])
            else:
                a = gather(state.partitions, name, tl)
                b = gather(restored.partitions, name, tl)
            assert np.array_equal(a, b), (name, tl)
    assert restored.resume


def test_rewrite_is_byte_identical(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    first = tmp_path / "a.ckpt"
    write_checkpoint(state, first)
    active = [builtin_manifests[n] for n in cfg.active_thorns]
    restored = restore_checkpoint(first, active, cfg, partition_count=4, out_dir=tmp_path)
    second = tmp_path / "b.ckpt"
    write_checkpoint(restored, second)
    assert first.read_bytes() == second.read_bytes()


def test_bad_magic(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    blob = bytearray(path.read_bytes())
    blob[0] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(RestoreError) as err:
        read_checkpoint(path)
    assert err.value.kind == RestoreError.BAD_MAGIC


def test_version_mismatch(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    blob = bytearray(path.read_bytes())
    struct.pack_into("<I", blob, 8, 99)
    path.write_bytes(bytes(blob))
    with pytest.raises(RestoreError) as err:
        read_checkpoint(path)
    assert err.value.kind == RestoreError.VERSION_MISMATCH


def test_truncated_file_is_corrupt(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    path.write_bytes(path.read_bytes()[:40])
    with pytest.raises(RestoreError) as err:
        read_checkpoint(path)
    assert err.value.kind == RestoreError.CORRUPT


def test_missing_variable_on_restore(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    smaller = parse_run_config(
        'ActiveThorns = "driver mol odetest io_ascii checkpoint"\n'
        "driver::global_n = 8\ndriver::t_final = 0.25\nmol::dt = 0.03125\n"
        'io_ascii::reductions_vars = "wavetoy::phi"\n'
    )
    active = [builtin_manifests[n] for n in smaller.active_thorns]
    with pytest.raises(RestoreError) as err:
        restore_checkpoint(path, active, smaller, out_dir=tmp_path)
    assert err.value.kind == RestoreError.MISSING_VARIABLE
    assert "wavetoy::phi" in str(err.value)


def test_shape_mismatch_on_changed_grid(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    changed = parse_run_config(cfg_text(n=16))
    active = [builtin_manifests[n] for n in changed.active_thorns]
    with pytest.raises(RestoreError) as err:
        restore_checkpoint(path, active, changed, out_dir=tmp_path)
    assert err.value.kind == RestoreError.SHAPE_MISMATCH


def test_parameter_conflict_on_never_steerable_change(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    changed = parse_run_config(cfg_text(extra="mol::method = icn\n"))
    active = [builtin_manifests[n] for n in changed.active_thorns]
    with pytest.raises(RestoreError) as err:
        restore_checkpoint(path, active, changed, out_dir=tmp_path)
    assert err.value.kind == RestoreError.PARAMETER_CONFLICT
    assert "mol::method" in str(err.value)


def test_recover_steerable_parameter_may_change(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    extended = parse_run_config(cfg_text(t_final=0.5))
    active = [builtin_manifests[n] for n in extended.active_thorns]
    restored = restore_checkpoint(path, active, extended, out_dir=tmp_path)
    assert restored.params.get("driver::t_final") == 0.5


def test_unassigned_parameters_come_from_checkpoint(builtin_manifests, tmp_path):
    # the writer steered out_every to 7 after binding; the restoring config
    # does not mention it, so the checkpoint value must win over the default
    state, cfg = make_state(builtin_manifests, tmp_path, run=False)
    state.params.set("io_ascii::out_every", 7, phase="steering")
    path = tmp_path / "c.ckpt"
    write_checkpoint(state, path)
    active = [builtin_manifests[n] for n in cfg.active_thorns]
    restored = restore_checkpoint(path, active, cfg, out_dir=tmp_path)
    assert restored.params.get("io_ascii::out_every") == 7


def test_restore_skips_initial_bin(builtin_manifests, tmp_path):
    state, cfg = make_state(builtin_manifests, tmp_path)
    path = tmp_path / "c.ckpt"
    # make the stored data recognizably non-initial
    for part in state.partitions:
        part.interior("wavetoy::phi")[...] = 42.0
    write_checkpoint(state, path)
    active = [builtin_manifests[n] for n in cfg.active_thorns]
    restored = restore_checkpoint(path, active, cfg, out_dir=tmp_path)
    build_schedule(restored)
    restored.params.set("driver::t_final", restored.time, phase="initial")
    main_loop(restored)  # runs STARTUP + ANALYSIS + TERMINATE, no INITIAL
    assert np.all(gather(restored.partitions, "wavetoy::phi") == 42.0)
