"""Shared fixtures: built-in manifests, run harness, synthetic thorn helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

from thornsim import activate, build_schedule, main_loop, parse_run_config
from thornsim.cli import discover_manifests
from thornsim.registry import register_routine, unregister_routine


@pytest.fixture(scope="session")
def builtin_manifests():
    return discover_manifests([])


@pytest.fixture()
def run_sim(builtin_manifests, tmp_path):
    """Activate + schedule + run a config text; returns (state, exit report)."""

    def _run(cfg_text: str, partitions: int | None = None, out_dir: Path | None = None):
        config = parse_run_config(cfg_text)
        active = [builtin_manifests[name] for name in config.active_thorns]
        state = activate(
            active, config, partition_count=partitions, out_dir=out_dir or tmp_path
        )
        build_schedule(state)
        report = main_loop(state)
        return state, report

    return _run


@pytest.fixture()
def routine_registry():
    """Register throwaway routines for synthetic thorns; cleaned up afterwards."""
    registered: list[tuple[str, str]] = []

    def _register(thorn: str, routine: str, func, mode: str = "local"):
        register_routine(thorn, routine, func, mode)
        registered.append((thorn, routine))

    yield _register
    for thorn, routine in registered:
        unregister_routine(thorn, routine)
