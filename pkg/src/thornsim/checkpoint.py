"""Bit-exact checkpoint/restart.

The container is a little-endian binary file:

========================  ======================================
magic                     ``THRNCKPT`` (8 bytes)
format version            u32 (currently 1)
iteration                 u64
time                      f64
parameter count           u32
per parameter             u16 name length + UTF-8 name,
                          type tag u8 (0 real, 1 int, 2 keyword,
                          3 boolean, 4 string), then the value as
                          f64 / i64 / u16-prefixed UTF-8 / u8 /
                          u16-prefixed UTF-8
variable count            u32
per variable record       u16-prefixed name, timelevel u8, rank u8,
                          shape u32 per axis, payload of
                          shape-product f64 values in ascending
                          global index order, interior only
========================  ======================================

Variable data is gathered to global index order before writing, so the file
is identical for any partition count, and restore scatters it back onto
whatever decomposition the resuming run uses.
"""

from __future__ import annotations

import logging
import struct
from io import BytesIO
from pathlib import Path

import numpy as np

from . import flesh as _flesh
from . import grid as _grid
from .ccl import RunConfig, ThornManifest
from .errors import RestoreError
from .flesh import GlobalContext, SimulationState
from .registry import thorn_routine

log = logging.getLogger("thornsim.checkpoint")

MAGIC = b"THRNCKPT"
FORMAT_VERSION = 1

_TYPE_TAGS = {"real": 0, "int": 1, "keyword": 2, "boolean": 3, "string": 4}
_TAG_TYPES = {v: k for k, v in _TYPE_TAGS.items()}


def _pack_str(out: BytesIO, text: str) -> None:
    data = text.encode("utf-8")
    out.write(struct.pack("<H", len(data)))
    out.write(data)


def checkpoint_bytes(state: SimulationState) -> bytes:
    """Serialize iteration, time, all parameters, and all variable data."""
    out = BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<I", FORMAT_VERSION))
    out.write(struct.pack("<Q", state.iteration))
    out.write(struct.pack("<d", state.time))

    names = state.params.names()
    out.write(struct.pack("<I", len(names)))
    for name in names:
        decl = state.params.decl(name)
        value = state.params.get(name)
        _pack_str(out, name)
        out.write(struct.pack("<B", _TYPE_TAGS[decl.ptype]))
        if decl.ptype == "real":
            out.write(struct.pack("<d", float(value)))
        elif decl.ptype == "int":
            out.write(struct.pack("<q", int(value)))
        elif decl.ptype == "boolean":
            out.write(struct.pack("<B", 1 if value else 0))
        else:
            _pack_str(out, str(value))

    records: list[tuple[str, int, np.ndarray]] = []
    for full_name in sorted(state.registry):
        handle = state.registry[full_name]
        for tl in range(handle.timelevels):
            if handle.kind == "SCALAR":
                data = np.asarray(state.scalars[full_name][tl])
            else:
                data = _grid.gather(state.partitions, full_name, tl)
            records.append((full_name, tl, data))

    out.write(struct.pack("<I", len(records)))
    for name, tl, data in records:
        _pack_str(out, name)
        out.write(struct.pack("<BB", tl, data.ndim))
        for n in data.shape:
            out.write(struct.pack("<I", n))
        out.write(np.ascontiguousarray(data, dtype="<f8").tobytes())
    return out.getvalue()


def write_checkpoint(state: SimulationState, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(checkpoint_bytes(state))


# ---------------------------------------------------------------------------
# Reading


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise RestoreError(RestoreError.CORRUPT, "file truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))[0]

    def str(self) -> str:
        n = self.unpack("<H")
        return self.take(n).decode("utf-8")


def read_checkpoint(path: str | Path) -> dict:
    """Parse a checkpoint file into a plain dict (no simulation needed)."""
    r = _Reader(Path(path).read_bytes())
    if r.take(len(MAGIC)) != MAGIC:
        raise RestoreError(RestoreError.BAD_MAGIC, str(path))
    version = r.unpack("<I")
    if version != FORMAT_VERSION:
        raise RestoreError(RestoreError.VERSION_MISMATCH, f"format version {version}")
    iteration = r.unpack("<Q")
    time = r.unpack("<d")

    params: dict[str, tuple[str, object]] = {}
    for _ in range(r.unpack("<I")):
        name = r.str()
        ptype = _TAG_TYPES.get(r.unpack("<B"))
        if ptype is None:
            raise RestoreError(RestoreError.CORRUPT, f"bad type tag for parameter {name!r}")
        if ptype == "real":
            value: object = r.unpack("<d")
        elif ptype == "int":
            value = r.unpack("<q")
        elif ptype == "boolean":
            value = bool(r.unpack("<B"))
        else:
            value = r.str()
        params[name] = (ptype, value)

    variables: list[tuple[str, int, np.ndarray]] = []
    for _ in range(r.unpack("<I")):
        name = r.str()
        tl = r.unpack("<B")
        rank = r.unpack("<B")
        shape = tuple(r.unpack("<I") for _ in range(rank))
        count = int(np.prod(shape)) if shape else 1
        payload = r.take(8 * count)
        data = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(shape)
        variables.append((name, tl, data))

    return {"iteration": iteration, "time": time, "params": params, "variables": variables}


def restore_checkpoint(
    path: str | Path,
    manifests: list[ThornManifest],
    config: RunConfig,
    *,
    partition_count: int | None = None,
    out_dir: str | Path = ".",
) -> SimulationState:
    """Rebuild a simulation state from a checkpoint.

    Parameters come from the checkpoint verbatim; only ``steerable=recover``
    parameters may be overridden by the restoring config, and a config
    assignment that would change any other parameter is a ParameterConflict.
    The resuming run skips the INITIAL bin (STARTUP still runs, re-creating
    in-memory registrations).
    """
    snapshot = read_checkpoint(path)
    state = _flesh.activate(
        manifests, config, partition_count=partition_count, out_dir=out_dir
    )

    for name, tl, data in snapshot["variables"]:
        handle = state.registry.get(name)
        if handle is None:
            raise RestoreError(
                RestoreError.MISSING_VARIABLE, f"{name!r} is not declared by any active thorn"
            )
        if tl >= handle.timelevels:
            raise RestoreError(
                RestoreError.SHAPE_MISMATCH,
                f"{name}: checkpoint holds timelevel {tl}, declaration has {handle.timelevels}",
            )
        if handle.kind == "SCALAR":
            if data.shape != ():
                raise RestoreError(RestoreError.SHAPE_MISMATCH, f"{name}: expected scalar")
            state.scalars[name][tl][...] = data
        else:
            expected = state.grid_spec.global_n if state.grid_spec else ()
            if data.shape != tuple(expected):
                raise RestoreError(
                    RestoreError.SHAPE_MISMATCH,
                    f"{name}: checkpoint shape {data.shape}, grid is {tuple(expected)}",
                )
            _grid.scatter(state.partitions, name, data, tl)

    assigned = {name for name, _raw in config.assignments}
    for name, (ptype, value) in snapshot["params"].items():
        if name not in state.params:
            raise RestoreError(
                RestoreError.PARAMETER_CONFLICT,
                f"checkpoint parameter {name!r} is not declared by any active thorn",
            )
        decl = state.params.decl(name)
        if decl.ptype != ptype:
            raise RestoreError(
                RestoreError.PARAMETER_CONFLICT,
                f"{name}: checkpoint type {ptype}, declaration says {decl.ptype}",
            )
        current = state.params.get(name)
        if name in assigned and current != value:
            if decl.steerable == "never":
                raise RestoreError(
                    RestoreError.PARAMETER_CONFLICT,
                    f"{name} is steerable=never and cannot change on recovery "
                    f"(checkpoint {value!r}, config {current!r})",
                )
            continue  # recover/always: the restoring config wins
        state.params.set(name, value, phase="initial")

    # ghost zones are derived state (the file holds interiors only): rebuild
    # the exchanged ghosts; physical-boundary ghosts are re-filled by the
    # boundary routines from interior data on first use
    for m in state.manifests.values():
        for g in m.groups:
            if g.kind == "GF":
                members = [f"{m.implementation}::{v}" for v in g.members]
                _grid.sync_ghosts(state.partitions, members)

    state.iteration = snapshot["iteration"]
    state.time = snapshot["time"]
    state.resume = True
    return state


# ---------------------------------------------------------------------------
# Scheduled routine


@thorn_routine("checkpoint", "Checkpoint_Write", mode="global")
def checkpoint_write(ctx: GlobalContext) -> None:
    every = int(ctx.param("checkpoint::every"))
    if every <= 0 or ctx.iteration % every != 0:
        return
    configured = str(ctx.param("checkpoint::dir"))
    directory = ctx.out_dir if configured in ("", ".") else Path(configured)
    path = directory / f"checkpoint_{ctx.iteration:08d}.ckpt"
    try:
        write_checkpoint(ctx.state, path)
    except OSError as e:
        log.error("checkpoint: cannot write %s: %s", path, e)
        ctx.state.checkpoint_failed = True


__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "checkpoint_bytes",
    "write_checkpoint",
    "read_checkpoint",
    "restore_checkpoint",
]
