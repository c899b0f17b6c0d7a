"""Demonstration and debugging thorns.

wavetoy
    Scalar wave equation in first-order-in-time form: phi' = pi,
    pi' = c^2 lap(phi) with a second-order central Laplacian.  Exercises MoL
    registration with two coupled variables, ghost sync, and both boundary
    kinds.  Contains no I/O: output happens by name through the I/O thorns.
odetest
    A single SCALAR u with u' = lambda u; the integrator's exactness and
    order oracle.
nanchecker
    Scans matched variables for non-finite interior values and optionally
    terminates the run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mol
from .errors import BadParameter
from .flesh import GlobalContext, LocalContext, list_variables
from .registry import thorn_routine

# ---------------------------------------------------------------------------
# wavetoy


@thorn_routine("wavetoy", "WaveToy_Register", mode="global")
def wave_register(ctx: GlobalContext) -> None:
    mol.register_evolved(ctx.state, "wavetoy::phi", "wavetoy::phi_rhs", thorn="wavetoy")
    mol.register_evolved(ctx.state, "wavetoy::pi", "wavetoy::pi_rhs", thorn="wavetoy")


@thorn_routine("wavetoy", "WaveToy_ParamCheck", mode="global")
def wave_paramcheck(ctx: GlobalContext) -> None:
    # stability bound for the demo: dt <= h/c per axis (warn only)
    if ctx.state.grid_spec is None or "mol::dt" not in ctx.state.params:
        return
    c = float(ctx.param("wavetoy::c"))
    dt = float(ctx.param("mol::dt"))
    h_min = min(ctx.state.grid_spec.h)
    if c > 0.0 and dt > h_min / c:
        ctx.warn(f"wavetoy: dt={dt} exceeds the stability bound h/c={h_min / c}")


@thorn_routine("wavetoy", "WaveToy_Init", mode="local")
def wave_init(ctx: LocalContext) -> None:
    """Fill phi and pi at iteration 0.

    standing: phi = A * prod_a sin(2 pi x_a), pi = 0.
    gaussian: phi = A * exp(-|x - x0|^2 / sigma^2), pi = 0.
    """
    mode = str(ctx.param("wavetoy::mode"))
    amplitude = float(ctx.param("wavetoy::amplitude"))
    mesh = ctx.coord_mesh()
    if mode == "standing":
        value = amplitude
        for c in mesh:
            value = value * np.sin(2.0 * np.pi * c)
    else:
        sigma = float(ctx.param("wavetoy::sigma"))
        if sigma <= 0.0:
            raise BadParameter(f"wavetoy::sigma must be positive, got {sigma}")
        x0 = float(ctx.param("wavetoy::x0"))
        r2 = 0.0
        for c in mesh:
            r2 = r2 + (c - x0) ** 2
        value = amplitude * np.exp(-r2 / sigma**2)
    ctx.interior("wavetoy::phi")[...] = value
    ctx.interior("wavetoy::pi")[...] = 0.0
    _apply_wave_boundary(ctx)


def _laplacian(arr: np.ndarray, ghost: int, interior_shape: tuple[int, ...], h: tuple[float, ...]) -> np.ndarray:
    out = np.zeros(interior_shape)
    ndim = len(interior_shape)
    base = tuple(slice(ghost, ghost + n) for n in interior_shape)
    for axis in range(ndim):
        lo = list(base)
        hi = list(base)
        lo[axis] = slice(ghost - 1, ghost - 1 + interior_shape[axis])
        hi[axis] = slice(ghost + 1, ghost + 1 + interior_shape[axis])
        out = out + (arr[tuple(lo)] - 2.0 * arr[base] + arr[tuple(hi)]) / (h[axis] * h[axis])
    return out


@thorn_routine("wavetoy", "WaveToy_RHS", mode="local")
def wave_rhs(ctx: LocalContext) -> None:
    # boundary fill first: ghosts at physical faces are derived from the
    # interior, which keeps stencils checkpoint-restart exact
    _apply_wave_boundary(ctx)
    c = float(ctx.param("wavetoy::c"))
    phi = ctx.var("wavetoy::phi")
    ghost = ctx.partition.ghosts["wavetoy::phi"]
    ctx.interior("wavetoy::phi_rhs")[...] = ctx.interior("wavetoy::pi")
    ctx.interior("wavetoy::pi_rhs")[...] = (c * c) * _laplacian(
        phi, ghost, ctx.partition.interior_shape, ctx.h
    )


def _apply_wave_boundary(ctx: LocalContext) -> None:
    kind = str(ctx.param("wavetoy::bc"))
    if kind != "none":
        ctx.apply_boundary("wavetoy::scalars", kind)


@thorn_routine("wavetoy", "WaveToy_PostStep", mode="local")
def wave_poststep(ctx: LocalContext) -> None:
    # ghost sync is declared on the schedule item; only physical faces here
    _apply_wave_boundary(ctx)


# ---------------------------------------------------------------------------
# odetest


@thorn_routine("odetest", "ODETest_Register", mode="global")
def ode_register(ctx: GlobalContext) -> None:
    mol.register_evolved(ctx.state, "odetest::u", "odetest::u_rhs", thorn="odetest")


@thorn_routine("odetest", "ODETest_Init", mode="global")
def ode_init(ctx: GlobalContext) -> None:
    ctx.set_scalar("odetest::u", float(ctx.param("odetest::u0")))


@thorn_routine("odetest", "ODETest_RHS", mode="global")
def ode_rhs(ctx: GlobalContext) -> None:
    rate = float(ctx.param("odetest::rate"))
    ctx.set_scalar("odetest::u_rhs", rate * ctx.scalar("odetest::u"))


# ---------------------------------------------------------------------------
# nanchecker


@dataclass(frozen=True)
class NaNReport:
    variable: str
    count: int
    first_index: tuple[int, ...]
    action: str  # warn | terminate


def scan_for_nonfinite(ctx: GlobalContext, patterns: list[str], action: str) -> list[NaNReport]:
    """Scan matched variables' interiors (ascending global index) for non-finite values."""
    reports: list[NaNReport] = []
    handles: dict[str, object] = {}
    for pattern in patterns:
        for h in list_variables(ctx.state, pattern):
            handles[h.full_name] = h
    for name in sorted(handles):
        data = ctx.gather(name)
        finite = np.isfinite(data)
        if finite.all():
            continue
        if data.ndim == 0:
            first: tuple[int, ...] = ()
        else:
            first = tuple(int(i) for i in np.argwhere(~finite)[0])
        reports.append(NaNReport(name, int((~finite).sum()), first, action))
    return reports


@thorn_routine("nanchecker", "NaNChecker_Check", mode="global")
def nan_check(ctx: GlobalContext) -> None:
    every = int(ctx.param("nanchecker::check_every"))
    if ctx.iteration % every != 0:
        return
    action = str(ctx.param("nanchecker::action"))
    patterns = str(ctx.param("nanchecker::check_vars")).split()
    reports = scan_for_nonfinite(ctx, patterns, action)
    for r in reports:
        where = r.first_index[0] if len(r.first_index) == 1 else r.first_index
        ctx.warn(
            f"nanchecker: {r.variable} has {r.count} non-finite interior values "
            f"(first at global index {where}) at iteration {ctx.iteration}"
        )
    ctx.state.nan_reports.extend(reports)
    if reports and action == "terminate":
        ctx.request_termination()


__all__ = ["NaNReport", "scan_for_nonfinite", "wave_init", "wave_rhs"]
