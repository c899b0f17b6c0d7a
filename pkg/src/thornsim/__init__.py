"""thornsim: a desk-scale modular simulation framework.

Modules ("thorns") are declared by small manifest files and stay dormant
until a run configuration activates them.  The core ("flesh") binds
parameters, owns run-time reflection over grid variables, orders the
schedule tree deterministically, and drives the evolution loop over
partitioned uniform Cartesian grids with ghost-zone synchronization.
Time integration, text output, bit-exact checkpoint/restart, and live
steering are ordinary thorns layered on those seams.
"""

from . import io_ascii as _io_ascii  # noqa: F401  (import registers thorn routines)
from . import mol as _mol_module  # noqa: F401
from . import physics as _physics  # noqa: F401
from .ccl import (
    GroupDecl,
    KeywordRange,
    NumericRange,
    ParamDecl,
    RunConfig,
    ScheduleDecl,
    ThornManifest,
    ValidationReport,
    parse_manifest,
    parse_run_config,
    print_manifest,
    validate_closure,
)
from .checkpoint import read_checkpoint, restore_checkpoint, write_checkpoint
from .flesh import (
    ExitReport,
    GlobalContext,
    LocalContext,
    ParameterStore,
    SimulationState,
    VariableHandle,
    activate,
    build_schedule,
    list_variables,
    lookup_variable,
    main_loop,
    run_bin,
    set_parameter,
)
from .grid import (
    GridSpec,
    Partition,
    ReductionResult,
    apply_boundary,
    decompose,
    gather,
    reduce_variable,
    scatter,
    sync_ghosts,
)
from .mol import couple_check, register_evolved
from .registry import register_routine, thorn_routine, unregister_routine
from .schedule import ScheduledCall, ScheduleTree, build_schedule_tree, render_schedule
from .steer import SteerChannel, SteerServer, attach_server, snapshot_variable, take_snapshot

__version__ = "0.1.0"

__all__ = [
    "GroupDecl",
    "KeywordRange",
    "NumericRange",
    "ParamDecl",
    "RunConfig",
    "ScheduleDecl",
    "ThornManifest",
    "ValidationReport",
    "parse_manifest",
    "parse_run_config",
    "print_manifest",
    "validate_closure",
    "read_checkpoint",
    "restore_checkpoint",
    "write_checkpoint",
    "ExitReport",
    "GlobalContext",
    "LocalContext",
    "ParameterStore",
    "SimulationState",
    "VariableHandle",
    "activate",
    "build_schedule",
    "list_variables",
    "lookup_variable",
    "main_loop",
    "run_bin",
    "set_parameter",
    "GridSpec",
    "Partition",
    "ReductionResult",
    "apply_boundary",
    "decompose",
    "gather",
    "reduce_variable",
    "scatter",
    "sync_ghosts",
    "couple_check",
    "register_evolved",
    "register_routine",
    "thorn_routine",
    "unregister_routine",
    "ScheduledCall",
    "ScheduleTree",
    "build_schedule_tree",
    "render_schedule",
    "SteerChannel",
    "SteerServer",
    "attach_server",
    "snapshot_variable",
    "take_snapshot",
    "__version__",
]
