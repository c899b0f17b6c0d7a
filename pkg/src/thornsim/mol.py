"""Method-of-lines time integration, decoupled from the physics thorns.

Physics thorns register (evolved, rhs) variable pairs at startup and
schedule their RHS kernels in the ``MoL_CalcRHS`` group and their
post-substep fixups (boundaries, ghost sync) in ``MoL_PostStep``.  The step
driver advances every registered variable through the configured method's
stages; after the final stage the timelevels rotate, leaving the new
solution at level 0 and the step's initial state at level 1.

Methods
-------
rk2
    Explicit midpoint: k1 = f(u), k2 = f(u + dt/2 k1), u' = u + dt k2.
rk4
    The classic tableau: stages at 0, 1/2, 1/2, 1 with weights
    1/6, 1/3, 1/3, 1/6.
icn
    Iterative Crank-Nicholson with theta=1/2 averaging: w0 = u;
    v_k = u + dt f(w_{k-1}), w_k = (u + v_k)/2 for k = 1..N; result v_N.
    One iteration reduces to forward Euler; N >= 2 is second order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlreadyRegistered, NoRegistrations, TimelevelMismatch
from .flesh import GlobalContext, SimulationState, VariableHandle, lookup_variable
from .registry import thorn_routine

# per-method (stage-state coefficients c_1..c_{s-1}, accumulation weights b_1..b_s)
_TABLEAUS: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {
    "rk2": ((0.5,), (0.0, 1.0)),
    "rk4": ((0.5, 0.5, 1.0), (1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0)),
}


def _icn_tableau(n_iterations: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    # averaging w_k = (u + v_k)/2 is algebraically u + dt/2 f(w_{k-1})
    return (0.5,) * (n_iterations - 1), (0.0,) * (n_iterations - 1) + (1.0,)


@dataclass(frozen=True)
class EvolvedRegistration:
    evolved: VariableHandle
    rhs: VariableHandle
    thorn: str


@dataclass
class MolState:
    """Integrator bookkeeping stored on the simulation state."""

    registrations: list[EvolvedRegistration] = field(default_factory=list)
    scratch: dict = field(default_factory=dict)  # (name, rank) or name -> ndarray
    steps_taken: int = 0

    def find(self, evolved_name: str) -> EvolvedRegistration | None:
        for reg in self.registrations:
            if reg.evolved.full_name == evolved_name:
                return reg
        return None


def _mol_state(state: SimulationState) -> MolState:
    return state.extensions.setdefault("mol", MolState())  # type: ignore[return-value]


def register_evolved(state: SimulationState, evolved_name: str, rhs_name: str, thorn: str = "") -> None:
    """Record that ``evolved`` advances by ``rhs`` each step.

    Meant to be called from a STARTUP- or INITIAL-bin routine.  The evolved
    variable needs at least two timelevels; evolved and rhs must agree in
    kind (and therefore shape).
    """
    mol = _mol_state(state)
    evolved = lookup_variable(state, evolved_name)
    rhs = lookup_variable(state, rhs_name)
    if mol.find(evolved_name) is not None:
        raise AlreadyRegistered(evolved_name)
    if evolved.timelevels < 2:
        raise TimelevelMismatch(f"{evolved_name}: evolved variables need >= 2 timelevels")
    if evolved.kind != rhs.kind:
        raise TimelevelMismatch(f"{evolved_name}/{rhs_name}: evolved and rhs kinds differ")
    mol.registrations.append(EvolvedRegistration(evolved, rhs, thorn or evolved.thorn))


def couple_check(state: SimulationState) -> list[tuple[str, list[str]]]:
    """Registrations grouped by registering thorn, in registration order."""
    mol = _mol_state(state)
    out: dict[str, list[str]] = {}
    for reg in mol.registrations:
        out.setdefault(reg.thorn, []).append(reg.evolved.full_name)
    return list(out.items())


# ---------------------------------------------------------------------------
# The step driver


class _Slot:
    """Uniform view over one registered variable on one storage unit."""

    def __init__(self, state: SimulationState, reg: EvolvedRegistration, rank: int | None):
        self.state = state
        self.reg = reg
        self.rank = rank

    def _arrays(self, handle: VariableHandle, timelevel: int) -> np.ndarray:
        if handle.kind == "SCALAR":
            return self.state.scalars[handle.full_name][timelevel]
        part = self.state.partitions[self.rank]  # type: ignore[index]
        return part.interior(handle.full_name, timelevel)

    def u(self, timelevel: int = 0) -> np.ndarray:
        return self._arrays(self.reg.evolved, timelevel)

    def k(self) -> np.ndarray:
        return self._arrays(self.reg.rhs, 0)

    def scratch(self, mol: MolState, which: str) -> np.ndarray:
        key = (self.reg.evolved.full_name, which, self.rank)
        if key not in mol.scratch:
            mol.scratch[key] = np.zeros_like(self.u())
        return mol.scratch[key]


def _slots(state: SimulationState, mol: MolState) -> list[_Slot]:
    out = []
    for reg in mol.registrations:
        if reg.evolved.kind == "SCALAR":
            out.append(_Slot(state, reg, None))
        else:
            for part in state.partitions:
                out.append(_Slot(state, reg, part.rank))
    return out


def step(ctx: GlobalContext) -> None:
    """Advance all registered variables by one dt.

    Per substage: the stage state sits at timelevel 0, the MoL_CalcRHS group
    fills the rhs variables from it, the tableau update writes the next stage
    state (interior only), and the MoL_PostStep group applies fixups.  After
    the final stage the timelevels rotate.
    """
    state = ctx.state
    mol = _mol_state(state)
    if not mol.registrations:
        raise NoRegistrations("no variables registered with the integrator")

    method = str(state.params.get("mol::method"))
    dt = float(state.params.get("mol::dt"))
    if method == "icn":
        coefs, weights = _icn_tableau(int(state.params.get("mol::icn_iterations")))
    else:
        coefs, weights = _TABLEAUS[method]
    n_stages = len(weights)

    slots = _slots(state, mol)
    for slot in slots:
        u0 = slot.scratch(mol, "u0")
        acc = slot.scratch(mol, "acc")
        u0[...] = slot.u()
        acc[...] = 0.0

    for stage in range(n_stages):
        ctx.run_group("MoL_CalcRHS")
        b = weights[stage]
        last = stage == n_stages - 1
        for slot in slots:
            u0 = slot.scratch(mol, "u0")
            acc = slot.scratch(mol, "acc")
            k = slot.k()
            if b != 0.0:
                acc += b * k
            if last:
                slot.u()[...] = u0 + dt * acc
            else:
                slot.u()[...] = u0 + (coefs[stage] * dt) * k
        ctx.run_group("MoL_PostStep")

    for slot in slots:
        u0 = slot.scratch(mol, "u0")
        levels = slot.reg.evolved.timelevels
        for tl in range(levels - 1, 1, -1):
            slot.u(tl)[...] = slot.u(tl - 1)
        slot.u(1)[...] = u0
    mol.steps_taken += 1


@thorn_routine("mol", "MoL_Step", mode="global")
def _mol_step_routine(ctx: GlobalContext) -> None:
    step(ctx)


@thorn_routine("mol", "MoL_ParamCheck", mode="global")
def _mol_paramcheck(ctx: GlobalContext) -> None:
    dt = float(ctx.param("mol::dt"))
    if dt <= 0.0:
        raise ValueError(f"mol::dt must be positive, got {dt}")


__all__ = [
    "EvolvedRegistration",
    "MolState",
    "register_evolved",
    "couple_check",
    "step",
]
