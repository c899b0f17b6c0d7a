"""The flesh: activation, reflection, parameter store, and the main loop.

Thorns stay dormant unless a run config activates them; only active thorns
contribute variables, parameters, and schedule items.  The flesh owns the
variable registry (run-time reflection by ``impl::var`` name), binds and
range-checks parameters, builds the schedule tree, and drives the bins in a
deterministic order.
"""

from __future__ import annotations

import fnmatch
import logging
import re
import time as _time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import grid as _grid
from .ccl import GroupDecl, ParamDecl, RunConfig, ThornManifest
from .errors import (
    ActivationError,
    BindError,
    NotSteerable,
    OutOfRange,
    RoutineFailure,
    UnknownParameter,
    UnknownVariable,
)
from .registry import resolve_routine
from .schedule import ScheduleTree, build_schedule_tree

log = logging.getLogger("thornsim")


# ---------------------------------------------------------------------------
# Reflection records


@dataclass(frozen=True)
class VariableHandle:
    """Reflection record for one grid variable."""

    full_name: str  # impl::var
    thorn: str
    implementation: str
    group: GroupDecl
    index_in_group: int

    @property
    def kind(self) -> str:
        return self.group.kind

    @property
    def timelevels(self) -> int:
        return self.group.timelevels

    @property
    def parity(self) -> str:
        return self.group.parity[self.index_in_group]


# ---------------------------------------------------------------------------
# Parameters


def _coerce(decl: ParamDecl, raw: str):
    """Type a verbatim run-config value against a declaration."""
    text = raw.strip()
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        quoted, text_unq = True, text[1:-1]
    else:
        quoted, text_unq = False, text
    if decl.ptype == "real":
        return float(text)
    if decl.ptype == "int":
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"{text!r} is not an integer")
        return int(value)
    if decl.ptype == "boolean":
        word = text_unq.lower()
        if word in ("true", "yes", "1"):
            return True
        if word in ("false", "no", "0"):
            return False
        raise ValueError(f"{text!r} is not a boolean")
    if decl.ptype == "keyword":
        return text_unq
    return text_unq if quoted else text


class ParameterStore:
    """Map of ``impl::name`` to (declaration, current value).

    Every stored value satisfies its declared range; parameters declared
    ``steerable=never`` reject changes after initial binding.
    """

    def __init__(self):
        self._decls: dict[str, ParamDecl] = {}
        self._values: dict[str, object] = {}

    def declare(self, full_name: str, decl: ParamDecl) -> None:
        self._decls[full_name] = decl
        self._values[full_name] = decl.default

    def __contains__(self, full_name: str) -> bool:
        return full_name in self._decls

    def names(self) -> list[str]:
        return sorted(self._decls)

    def decl(self, full_name: str) -> ParamDecl:
        try:
            return self._decls[full_name]
        except KeyError:
            raise UnknownParameter(full_name) from None

    def get(self, full_name: str):
        self.decl(full_name)
        return self._values[full_name]

    def bind(self, full_name: str, raw: str) -> None:
        """Initial binding of a verbatim config value; raises BindError."""
        if full_name not in self._decls:
            raise BindError(f"{full_name}: unknown parameter")
        decl = self._decls[full_name]
        try:
            value = _coerce(decl, raw)
        except ValueError as e:
            raise BindError(f"{full_name}: {e}") from None
        if not decl.accepts(value):
            raise BindError(f"{full_name}: value {value!r} violates declared range")
        self._values[full_name] = value

    def set(self, full_name: str, value, phase: str = "initial") -> None:
        """Typed set with steering rules; raises typed errors."""
        decl = self.decl(full_name)
        if phase == "steering" and decl.steerable != "always":
            raise NotSteerable(f"{full_name} is steerable={decl.steerable}")
        if decl.ptype == "real" and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not decl.accepts(value):
            raise OutOfRange(f"{full_name}: value {value!r} violates declared range")
        self._values[full_name] = value

    def snapshot(self) -> dict[str, object]:
        return dict(self._values)

    def table_hash(self) -> int:
        return hash(tuple(sorted((k, repr(v)) for k, v in self._values.items())))


# ---------------------------------------------------------------------------
# Simulation state


@dataclass
class ExitReport:
    iterations: int
    final_iteration: int
    wall_seconds: float
    bin_seconds: dict[str, float] = field(default_factory=dict)
    checkpoint_failed: bool = False
    terminated_by: str = "t_final"  # t_final | control


@dataclass
class SimulationState:
    manifests: dict[str, ThornManifest]  # active thorns, in activation order
    impl_to_thorn: dict[str, str]
    params: ParameterStore
    registry: dict[str, VariableHandle]
    grid_spec: _grid.GridSpec | None = None
    partitions: list[_grid.Partition] = field(default_factory=list)
    scalars: dict[str, list[np.ndarray]] = field(default_factory=dict)
    schedule: ScheduleTree | None = None
    iteration: int = 0
    time: float = 0.0
    control: str = "running"  # running | paused | terminating
    resume: bool = False
    out_dir: Path = Path(".")
    extensions: dict[str, object] = field(default_factory=dict)
    steer_channel: object | None = None
    checkpoint_failed: bool = False
    bin_seconds: dict[str, float] = field(default_factory=dict)
    nan_reports: list = field(default_factory=list)
    last_reduction_row: dict | None = None

    @property
    def dt(self) -> float:
        return float(self.params.get("mol::dt")) if "mol::dt" in self.params else 1.0

    @property
    def t_final(self) -> float:
        return float(self.params.get("driver::t_final")) if "driver::t_final" in self.params else 0.0

    def manifest_for_impl(self, impl: str) -> ThornManifest:
        return self.manifests[self.impl_to_thorn[impl]]

    def group_members(self, group_ref: str) -> tuple[GroupDecl, list[str]]:
        """Resolve ``impl::group`` to its declaration and full member names."""
        impl, _, gname = group_ref.partition("::")
        if impl not in self.impl_to_thorn:
            raise UnknownVariable(f"group reference {group_ref!r}: unknown implementation")
        decl = self.manifest_for_impl(impl).group(gname)
        if decl is None:
            raise UnknownVariable(f"group reference {group_ref!r}: unknown group")
        return decl, [f"{impl}::{v}" for v in decl.members]


# ---------------------------------------------------------------------------
# Activation


def _build_grid_spec(params: ParameterStore, max_ghost: int) -> _grid.GridSpec:
    def per_axis(raw: str, dims: int, conv) -> tuple:
        parts = str(raw).split()
        if len(parts) == 1:
            parts = parts * dims
        if len(parts) != dims:
            raise BindError(f"driver: expected 1 or {dims} per-axis values, got {raw!r}")
        return tuple(conv(p) for p in parts)

    dims = int(params.get("driver::dimensions"))
    global_n = per_axis(params.get("driver::global_n"), dims, int)
    lower = per_axis(params.get("driver::lower"), dims, float)
    upper = per_axis(params.get("driver::upper"), dims, float)
    boundary = (str(params.get("driver::boundary")),) * dims
    return _grid.GridSpec(
        dimensions=dims,
        global_n=global_n,
        lower=lower,
        upper=upper,
        boundary=boundary,
        ghost=max_ghost,
    )


def activate(
    manifests: list[ThornManifest],
    config: RunConfig,
    *,
    partition_count: int | None = None,
    out_dir: str | Path = ".",
    allocate: bool = True,
) -> SimulationState:
    """Bring the active thorns to life: parameters, registry, grid storage.

    Inactive thorns contribute nothing.  Parameters start at their declared
    defaults and are overridden by config assignments in file order; any
    type or range violation raises BindError naming the parameter.
    """
    by_name = {m.thorn_name: m for m in manifests}
    active: dict[str, ThornManifest] = {}
    for name in config.active_thorns:
        if name not in by_name:
            raise ActivationError(f"active thorn {name!r} has no manifest")
        active[name] = by_name[name]

    impl_to_thorn: dict[str, str] = {}
    for m in active.values():
        if m.implementation in impl_to_thorn:
            raise ActivationError(f"implementation {m.implementation!r} provided twice")
        impl_to_thorn[m.implementation] = m.thorn_name

    params = ParameterStore()
    for m in active.values():
        for p in m.params:
            params.declare(f"{m.implementation}::{p.name}", p)
    for full_name, raw in config.assignments:
        params.bind(full_name, raw)

    registry: dict[str, VariableHandle] = {}
    for m in active.values():
        for g in m.groups:
            for idx, var in enumerate(g.members):
                full = f"{m.implementation}::{var}"
                if full in registry:
                    raise ActivationError(f"variable {full!r} declared twice")
                registry[full] = VariableHandle(
                    full_name=full,
                    thorn=m.thorn_name,
                    implementation=m.implementation,
                    group=g,
                    index_in_group=idx,
                )

    state = SimulationState(
        manifests=active,
        impl_to_thorn=impl_to_thorn,
        params=params,
        registry=registry,
        out_dir=Path(out_dir),
    )

    if partition_count is not None and "driver::partitions" in params:
        params.set("driver::partitions", int(partition_count), phase="initial")

    gf_handles = [h for h in registry.values() if h.kind == "GF"]
    if allocate:
        if gf_handles and "driver::dimensions" not in params:
            raise ActivationError("grid functions declared but no grid driver thorn is active")
        if "driver::dimensions" in params:
            max_ghost = max((h.group.ghost for h in gf_handles), default=0)
            state.grid_spec = _build_grid_spec(params, max_ghost)
            count = (
                int(partition_count)
                if partition_count is not None
                else int(params.get("driver::partitions"))
                if "driver::partitions" in params
                else 1
            )
            state.partitions = _grid.decompose(state.grid_spec, count)
            for h in sorted(gf_handles, key=lambda h: h.full_name):
                for part in state.partitions:
                    part.add_variable(h.full_name, h.timelevels, h.group.ghost)
        for h in sorted(registry.values(), key=lambda h: h.full_name):
            if h.kind == "SCALAR":
                state.scalars[h.full_name] = [np.zeros(()) for _ in range(h.timelevels)]

    return state


def build_schedule(state: SimulationState) -> ScheduleTree:
    """Order every bin and schedule group; stores and returns the tree."""
    tree = build_schedule_tree(list(state.manifests.values()))
    state.schedule = tree
    return tree


# ---------------------------------------------------------------------------
# Reflection


def lookup_variable(state: SimulationState, full_name: str) -> VariableHandle:
    handle = state.registry.get(full_name)
    if handle is None:
        raise UnknownVariable(full_name)
    return handle


_GLOB_OK = re.compile(r"[A-Za-z0-9_:*]*\Z")


def list_variables(state: SimulationState, pattern: str) -> list[VariableHandle]:
    """Handles of all active variables matching a ``*``-glob, sorted by name."""
    if not _GLOB_OK.match(pattern):
        raise UnknownVariable(f"bad pattern {pattern!r}: only '*' wildcards are supported")
    return [
        state.registry[name]
        for name in sorted(state.registry)
        if fnmatch.fnmatchcase(name, pattern)
    ]


def set_parameter(state: SimulationState, full_name: str, value, phase: str = "initial") -> None:
    state.params.set(full_name, value, phase=phase)


# ---------------------------------------------------------------------------
# Execution contexts handed to routines


class _ContextBase:
    def __init__(self, state: SimulationState):
        self._state = state

    @property
    def iteration(self) -> int:
        return self._state.iteration

    @property
    def time(self) -> float:
        return self._state.time

    @property
    def dt(self) -> float:
        return self._state.dt

    def param(self, full_name: str):
        return self._state.params.get(full_name)

    def scalar(self, full_name: str, timelevel: int = 0) -> np.ndarray:
        try:
            return self._state.scalars[full_name][timelevel]
        except KeyError:
            raise UnknownVariable(full_name) from None

    def set_scalar(self, full_name: str, value, timelevel: int = 0) -> None:
        self.scalar(full_name, timelevel)[...] = value

    def warn(self, message: str) -> None:
        log.warning(message)


class LocalContext(_ContextBase):
    """View of one partition, handed to ``mode="local"`` kernels."""

    def __init__(self, state: SimulationState, partition: _grid.Partition):
        super().__init__(state)
        self.partition = partition

    @property
    def rank(self) -> int:
        return self.partition.rank

    @property
    def h(self) -> tuple[float, ...]:
        return self._state.grid_spec.h  # type: ignore[union-attr]

    @property
    def dimensions(self) -> int:
        return self._state.grid_spec.dimensions  # type: ignore[union-attr]

    def var(self, full_name: str, timelevel: int = 0) -> np.ndarray:
        """Local array including ghost zones."""
        return self.partition.data(full_name, timelevel)

    def interior(self, full_name: str, timelevel: int = 0) -> np.ndarray:
        return self.partition.interior(full_name, timelevel)

    def coord_mesh(self) -> tuple[np.ndarray, ...]:
        return self.partition.coord_mesh()

    def apply_boundary(self, group_ref: str, kind: str, timelevel: int = 0) -> None:
        decl, members = self._state.group_members(group_ref)
        parities = dict(zip(members, decl.parity))
        _grid.apply_boundary(
            [self.partition], members, parities, kind, decl.timelevels, timelevel
        )


class GlobalContext(_ContextBase):
    """Whole-simulation view for ``mode="global"`` routines."""

    @property
    def state(self) -> SimulationState:
        return self._state

    @property
    def partitions(self) -> list[_grid.Partition]:
        return self._state.partitions

    def lookup(self, full_name: str) -> VariableHandle:
        return lookup_variable(self._state, full_name)

    def find(self, pattern: str) -> list[VariableHandle]:
        return list_variables(self._state, pattern)

    def gather(self, full_name: str, timelevel: int = 0) -> np.ndarray:
        handle = self.lookup(full_name)
        if handle.kind == "SCALAR":
            return self.scalar(full_name, timelevel).reshape(())
        return _grid.gather(self._state.partitions, full_name, timelevel)

    def reduce(self, full_name: str, kind: str) -> _grid.ReductionResult:
        return _grid.reduce_variable(self._state.partitions, full_name, kind)

    def run_group(self, group_name: str) -> None:
        run_bin(self._state, group_name)

    def request_termination(self) -> None:
        self._state.control = "terminating"

    @property
    def out_dir(self) -> Path:
        return self._state.out_dir

    def extension(self, name: str, factory=None):
        if name not in self._state.extensions and factory is not None:
            self._state.extensions[name] = factory()
        return self._state.extensions.get(name)


# ---------------------------------------------------------------------------
# Running bins and the main loop


def run_bin(state: SimulationState, bin_or_group: str) -> None:
    """Run every scheduled call of one bin or group, in tree order.

    Local routines run once per partition; after a call completes, each
    group in its sync list gets a ghost exchange.  A raising routine is
    wrapped in RoutineFailure naming ``thorn::routine`` and flips the
    control state to terminating.
    """
    if state.schedule is None:
        raise ActivationError("schedule not built")
    for call in state.schedule.container(bin_or_group):
        rdef = resolve_routine(call.thorn, call.routine)
        try:
            if rdef.mode == "global":
                rdef.func(GlobalContext(state))
            else:
                for part in state.partitions:
                    rdef.func(LocalContext(state, part))
        except RoutineFailure:
            state.control = "terminating"
            raise
        except Exception as e:
            state.control = "terminating"
            raise RoutineFailure(f"{call.key}: {type(e).__name__}: {e}") from e
        for group_ref in call.sync:
            decl, members = state.group_members(group_ref)
            if decl.kind == "GF":
                _grid.sync_ghosts(state.partitions, members)


def _timed_bin(state: SimulationState, name: str) -> None:
    t0 = _time.perf_counter()
    try:
        run_bin(state, name)
    finally:
        state.bin_seconds[name] = state.bin_seconds.get(name, 0.0) + _time.perf_counter() - t0


def _steer_boundary(state: SimulationState, after_iteration: bool) -> None:
    channel = state.steer_channel
    if channel is not None:
        channel.boundary(state, after_iteration)  # type: ignore[attr-defined]


def main_loop(state: SimulationState) -> ExitReport:
    """Run the simulation to completion.

    STARTUP, PARAMCHECK and INITIAL run once (INITIAL is skipped on a
    checkpoint resume), followed by an ANALYSIS pass over the initial data.
    Each iteration then drains steering commands and runs PRESTEP, EVOL,
    POSTSTEP, ANALYSIS; the iteration counter and time advance with the EVOL
    step, so ANALYSIS observes data labelled with its own iteration.
    TERMINATE always runs, even when a routine failure propagates.
    """
    wall0 = _time.perf_counter()
    start_iteration = state.iteration
    terminated_by = "t_final"
    try:
        _timed_bin(state, "STARTUP")
        _timed_bin(state, "PARAMCHECK")
        if not state.resume:
            _timed_bin(state, "INITIAL")
        _timed_bin(state, "ANALYSIS")
        _steer_boundary(state, after_iteration=False)
        dt = state.dt
        while state.control != "terminating" and state.time < state.t_final - dt / 2.0:
            _timed_bin(state, "PRESTEP")
            _timed_bin(state, "EVOL")
            state.iteration += 1
            state.time = state.iteration * dt
            _timed_bin(state, "POSTSTEP")
            _timed_bin(state, "ANALYSIS")
            _steer_boundary(state, after_iteration=True)
        if state.control == "terminating":
            terminated_by = "control"
    except RoutineFailure:
        try:
            _timed_bin(state, "TERMINATE")
        except RoutineFailure:
            log.exception("TERMINATE bin failed during shutdown")
        raise
    _timed_bin(state, "TERMINATE")
    return ExitReport(
        iterations=state.iteration - start_iteration,
        final_iteration=state.iteration,
        wall_seconds=_time.perf_counter() - wall0,
        bin_seconds=dict(state.bin_seconds),
        checkpoint_failed=state.checkpoint_failed,
        terminated_by=terminated_by,
    )


__all__ = [
    "VariableHandle",
    "ParameterStore",
    "SimulationState",
    "ExitReport",
    "LocalContext",
    "GlobalContext",
    "activate",
    "build_schedule",
    "lookup_variable",
    "list_variables",
    "set_parameter",
    "run_bin",
    "main_loop",
]
