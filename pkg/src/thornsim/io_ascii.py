"""Name-driven text output, fully decoupled from the science thorns.

Output routines take variable glob patterns as parameters, resolve them
through run-time reflection at output time (so steering ``out_vars`` takes
effect immediately), and append deterministic text blocks.  Floats render as
shortest round-trip decimals and data lines follow ascending global index
order, so two identical runs produce byte-identical files regardless of the
partition count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .flesh import GlobalContext, SimulationState, list_variables
from .grid import gather, reduce_variable
from .registry import thorn_routine

log = logging.getLogger("thornsim.io")


@dataclass(frozen=True)
class OutputSelection:
    patterns: tuple[str, ...]
    cadence: int
    directory: Path


def _fmt(x: float) -> str:
    return repr(float(x))


def ascii_block(state: SimulationState, name: str, values: np.ndarray) -> str:
    """One output block: header, then one line per interior point."""
    spec = state.grid_spec
    lines = [f"# iteration {state.iteration} time {_fmt(state.time)}"]
    for idx in np.ndindex(values.shape):
        coords = [_fmt(spec.coord(a, i)) for a, i in enumerate(idx)]
        lines.append(" ".join([*map(str, idx), *coords, _fmt(values[idx])]))
    lines.append("")
    return "\n".join(lines) + "\n"


def output_ascii(state: SimulationState, selection: OutputSelection) -> list[Path]:
    """Append one block per matched grid function; returns files written."""
    if state.iteration % selection.cadence != 0:
        return []
    written: list[Path] = []
    handles: dict[str, object] = {}
    for pattern in selection.patterns:
        for h in list_variables(state, pattern):
            if h.kind == "GF":
                handles[h.full_name] = h
    for name in sorted(handles):
        values = gather(state.partitions, name)
        impl, _, var = name.partition("::")
        path = selection.directory / f"{impl}__{var}.asc"
        try:
            selection.directory.mkdir(parents=True, exist_ok=True)
            with open(path, "a") as f:
                f.write(ascii_block(state, name, values))
        except OSError as e:
            log.warning("output_ascii: cannot write %s: %s", path, e)
            continue
        written.append(path)
    return written


def output_reductions(
    state: SimulationState,
    variables: list[str],
    kinds: list[str],
    directory: Path,
) -> Path | None:
    """Append one row (iteration, time, one column per variable/kind pair)."""
    path = directory / "reductions.asc"
    columns: list[tuple[str, str]] = [(v, k) for v in variables for k in kinds]
    row_values = {}
    parts = [str(state.iteration), _fmt(state.time)]
    for var, kind in columns:
        value = reduce_variable(state.partitions, var, kind).value
        row_values[f"{var}.{kind}"] = value
        parts.append(_fmt(value))
    state.last_reduction_row = {
        "iteration": state.iteration,
        "time": state.time,
        "values": row_values,
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        new_file = not path.exists()
        with open(path, "a") as f:
            if new_file:
                header = ["# iteration", "time"] + [f"{v}.{k}" for v, k in columns]
                f.write(" ".join(header) + "\n")
            f.write(" ".join(parts) + "\n")
    except OSError as e:
        log.warning("output_reductions: cannot write %s: %s", path, e)
        return None
    return path


def _out_directory(ctx: GlobalContext) -> Path:
    configured = str(ctx.param("io_ascii::out_dir"))
    return ctx.out_dir if configured in ("", ".") else Path(configured)


@thorn_routine("io_ascii", "IOASCII_Output", mode="global")
def ioascii_output(ctx: GlobalContext) -> None:
    patterns = tuple(str(ctx.param("io_ascii::out_vars")).split())
    if not patterns:
        return
    selection = OutputSelection(
        patterns=patterns,
        cadence=int(ctx.param("io_ascii::out_every")),
        directory=_out_directory(ctx),
    )
    output_ascii(ctx.state, selection)


@thorn_routine("io_ascii", "IOASCII_Reductions", mode="global")
def ioascii_reductions(ctx: GlobalContext) -> None:
    patterns = str(ctx.param("io_ascii::reductions_vars")).split()
    kinds = str(ctx.param("io_ascii::reductions")).split()
    handles: dict[str, object] = {}
    for pattern in patterns:
        for h in list_variables(ctx.state, pattern):
            if h.kind == "GF":
                handles[h.full_name] = h
    output_reductions(ctx.state, sorted(handles), kinds, _out_directory(ctx))


__all__ = ["OutputSelection", "ascii_block", "output_ascii", "output_reductions"]
