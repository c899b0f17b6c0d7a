"""Exception types raised across the framework.

Parser errors carry a 1-based line:column location into the source text.
Run-time errors are plain exceptions; the scheduler and flesh wrap routine
failures in :class:`RoutineFailure` so the offending ``thorn::routine`` is
always named.
"""

from __future__ import annotations


class ThornsimError(Exception):
    """Base class for all framework errors."""


# ---------------------------------------------------------------------------
# DSL / manifest parsing


class CclError(ThornsimError):
    """Base for declaration-DSL errors; carries a source location."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class CclSyntaxError(CclError):
    """Input violates the manifest or run-config grammar."""


class DuplicateName(CclError):
    """A group, parameter, or schedule routine is declared twice."""


class BadRange(CclError):
    """A parameter default lies outside its declared range."""


class BadValue(CclError):
    """A declaration is structurally valid but semantically impossible."""


class DuplicateAssignment(CclError):
    """A run config assigns the same parameter twice."""


# ---------------------------------------------------------------------------
# Flesh: activation, parameters, reflection, scheduling


class ActivationError(ThornsimError):
    """Activation cannot produce a consistent simulation state."""


class BindError(ThornsimError):
    """A run-config assignment fails its parameter's type or range check."""


class UnknownParameter(ThornsimError):
    pass


class NotSteerable(ThornsimError):
    pass


class OutOfRange(ThornsimError):
    pass


class UnknownVariable(ThornsimError):
    pass


class CycleDetected(ThornsimError):
    """Schedule constraints form a cycle; ``routines`` lists one cycle."""

    def __init__(self, where: str, routines: list[str]):
        super().__init__(f"cycle in schedule constraints for {where}: " + " -> ".join(routines))
        self.where = where
        self.routines = routines


class UnknownRoutineRef(ThornsimError):
    """A before/after constraint names a routine not scheduled in the same bin or group."""


class RoutineFailure(ThornsimError):
    """A scheduled routine raised; the message names ``thorn::routine``."""


# ---------------------------------------------------------------------------
# Grid driver


class TooManyPartitions(ThornsimError):
    """Decomposition would produce a slab thinner than the ghost width."""


class MissingTimelevel(ThornsimError):
    """A boundary condition needs more timelevels than the group declares."""


# ---------------------------------------------------------------------------
# Method-of-lines integrator


class AlreadyRegistered(ThornsimError):
    pass


class TimelevelMismatch(ThornsimError):
    pass


class NoRegistrations(ThornsimError):
    pass


# ---------------------------------------------------------------------------
# I/O and checkpointing


class IoFailure(ThornsimError):
    pass


class RestoreError(ThornsimError):
    """Checkpoint restore failed; ``kind`` states which contract broke."""

    BAD_MAGIC = "BadMagic"
    VERSION_MISMATCH = "VersionMismatch"
    MISSING_VARIABLE = "MissingVariable"
    SHAPE_MISMATCH = "ShapeMismatch"
    PARAMETER_CONFLICT = "ParameterConflict"
    CORRUPT = "Corrupt"

    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind
        self.detail = detail


# ---------------------------------------------------------------------------
# Physics thorns and steering


class BadParameter(ThornsimError):
    """A routine rejects a parameter value the range check could not."""


class PortInUse(ThornsimError):
    pass


class BadSlice(ThornsimError):
    pass
