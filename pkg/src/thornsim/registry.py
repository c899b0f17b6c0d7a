"""Routine registry: binds schedule-item names to Python callables.

A thorn manifest declares *when* a routine runs; the implementation
registers *what* runs under that name.  Grid kernels register with
``mode="local"`` and are invoked once per partition with a
:class:`~thornsim.flesh.LocalContext`.  Coordination work (registration,
I/O, reductions, checkpointing) registers with ``mode="global"`` and is
invoked exactly once per scheduled call with a
:class:`~thornsim.flesh.GlobalContext`.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from .errors import RoutineFailure


@dataclass(frozen=True)
class RoutineDef:
    func: Callable
    mode: str  # "local" | "global"


_ROUTINES: dict[tuple[str, str], RoutineDef] = {}


def register_routine(thorn: str, routine: str, func: Callable, mode: str = "local") -> None:
    if mode not in ("local", "global"):
        raise ValueError(f"routine mode must be local or global, got {mode!r}")
    _ROUTINES[(thorn, routine)] = RoutineDef(func, mode)


def thorn_routine(thorn: str, routine: str, mode: str = "local"):
    """Decorator form of :func:`register_routine`."""

    def wrap(func: Callable) -> Callable:
        register_routine(thorn, routine, func, mode)
        return func

    return wrap


def resolve_routine(thorn: str, routine: str) -> RoutineDef:
    try:
        return _ROUTINES[(thorn, routine)]
    except KeyError:
        raise RoutineFailure(
            f"{thorn}::{routine}: no implementation registered for this routine"
        ) from None


def unregister_routine(thorn: str, routine: str) -> None:
    _ROUTINES.pop((thorn, routine), None)


__all__ = ["RoutineDef", "register_routine", "thorn_routine", "resolve_routine", "unregister_routine"]
