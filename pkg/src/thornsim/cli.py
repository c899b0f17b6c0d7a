"""The ``simrun`` command line entry point.

    simrun <paramfile> [--thorn-path DIR]... [--partitions N] [--serve PORT]
           [--recover FILE] [--dry-run] [--out-dir DIR]

Thorn manifests are discovered as ``*.thorn`` files: the built-in thorns
ship with the package, SIMRUN_THORN_PATH adds directories, and --thorn-path
flags take the highest precedence (later sources override earlier ones per
thorn name).

Exit codes: 0 success, 1 routine failure, 2 validation or configuration
errors, 64 usage errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from . import checkpoint as _checkpoint
from . import flesh as _flesh
from . import io_ascii as _io_ascii  # noqa: F401  (registers thorn routines)
from . import mol as _mol  # noqa: F401
from . import physics as _physics  # noqa: F401
from . import steer as _steer
from .ccl import ThornManifest, parse_manifest, parse_run_config, validate_closure
from .errors import (
    ActivationError,
    BindError,
    CclError,
    CycleDetected,
    PortInUse,
    RestoreError,
    RoutineFailure,
    TooManyPartitions,
    UnknownRoutineRef,
)
from .schedule import render_schedule

log = logging.getLogger("thornsim.cli")

USAGE_EXIT = 64
VALIDATION_EXIT = 2
FAILURE_EXIT = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"simrun: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _build_parser() -> _Parser:
    p = _Parser(prog="simrun", description="run a thorn-based simulation")
    p.add_argument("paramfile", help="run configuration file")
    p.add_argument("--thorn-path", action="append", default=[], metavar="DIR",
                   help="extra directory scanned for *.thorn manifests (repeatable)")
    p.add_argument("--partitions", type=int, default=None, metavar="N",
                   help="override driver::partitions")
    p.add_argument("--serve", type=int, default=None, metavar="PORT",
                   help="serve the steering API on 127.0.0.1:PORT")
    p.add_argument("--recover", default=None, metavar="FILE",
                   help="restore from a checkpoint instead of running INITIAL")
    p.add_argument("--dry-run", action="store_true",
                   help="print the schedule tree and exit without allocating storage")
    p.add_argument("--out-dir", default=".", metavar="DIR", help="output directory")
    return p


def builtin_thorn_dir() -> Path:
    return Path(str(resources.files("thornsim") / "thorns"))


def discover_manifests(extra_paths: list[str]) -> dict[str, ThornManifest]:
    """Load *.thorn files; later sources override earlier ones by thorn name."""
    search: list[Path] = [builtin_thorn_dir()]
    env = os.environ.get("SIMRUN_THORN_PATH", "")
    search += [Path(p) for p in env.split(os.pathsep) if p]
    search += [Path(p) for p in extra_paths]

    manifests: dict[str, ThornManifest] = {}
    for directory in search:
        if not directory.is_dir():
            log.warning("thorn path %s is not a directory", directory)
            continue
        for path in sorted(directory.glob("*.thorn")):
            try:
                m = parse_manifest(path.read_text())
            except CclError as e:
                log.warning("skipping unparseable manifest %s: %s", path, e)
                continue
            manifests[m.thorn_name] = m
    return manifests


def _print_summary(report: _flesh.ExitReport | None, state: _flesh.SimulationState) -> None:
    print("---- run summary ----")
    if report is not None:
        print(f"iterations: {report.iterations}  (final iteration {report.final_iteration})")
        print(f"wall seconds: {report.wall_seconds:.3f}")
        if report.checkpoint_failed:
            print("WARNING: a checkpoint write failed during this run")
    for name, seconds in sorted(state.bin_seconds.items()):
        print(f"  timer {name:<10} {seconds:.4f} s")


def run(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    paramfile = Path(args.paramfile)
    if not paramfile.is_file():
        print(f"simrun: error: parameter file {paramfile} does not exist", file=sys.stderr)
        return USAGE_EXIT

    try:
        config = parse_run_config(paramfile.read_text())
    except CclError as e:
        print(f"simrun: {paramfile}: {e}", file=sys.stderr)
        return VALIDATION_EXIT

    manifests = discover_manifests(args.thorn_path)
    report = validate_closure(list(manifests.values()), config)
    if not report.ok:
        print("validation failed:", file=sys.stderr)
        print(str(report), file=sys.stderr)
        return VALIDATION_EXIT

    active = [manifests[name] for name in config.active_thorns]

    try:
        if args.dry_run:
            state = _flesh.activate(active, config, out_dir=args.out_dir, allocate=False)
            tree = _flesh.build_schedule(state)
            print(render_schedule(tree), end="")
            return 0
        if args.recover:
            state = _checkpoint.restore_checkpoint(
                args.recover,
                active,
                config,
                partition_count=args.partitions,
                out_dir=args.out_dir,
            )
        else:
            state = _flesh.activate(
                active, config, partition_count=args.partitions, out_dir=args.out_dir
            )
        _flesh.build_schedule(state)
    except (CycleDetected, UnknownRoutineRef, BindError, ActivationError,
            TooManyPartitions, RestoreError) as e:
        print(f"simrun: {e}", file=sys.stderr)
        return VALIDATION_EXIT

    server = None
    if args.serve is not None:
        try:
            static = os.environ.get("SIMRUN_UI_DIR")
            if static is None and Path("frontend/dist").is_dir():
                static = "frontend/dist"
            server = _steer.attach_server(state, args.serve, static_dir=static)
        except PortInUse as e:
            print(f"simrun: {e}", file=sys.stderr)
            return VALIDATION_EXIT

    exit_report = None
    try:
        exit_report = _flesh.main_loop(state)
        return 0
    except RoutineFailure as e:
        print(f"simrun: routine failure: {e}", file=sys.stderr)
        return FAILURE_EXIT
    finally:
        if state.steer_channel is not None:
            state.steer_channel.shutdown(state)
        if server is not None:
            server.stop()
        _print_summary(exit_report, state)


def main() -> None:
    logging.basicConfig(level=os.environ.get("SIMRUN_LOG", "WARNING"))
    raise SystemExit(run())


if __name__ == "__main__":
    main()
